#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace vpfp {

inline constexpr const char* kVersion = "0.1.0";

/// u(x) = mean + sum_m coeffs[m-1] * cos(2 pi m x / L).
struct CosineSeries {
    double mean = 1.0;
    std::vector<double> cos;

    double operator()(double x, double length) const;
};

/// Initial macroscopic data: rho_0 (electrons) and rho_i (ion background).
struct InitSpec {
    CosineSeries rho0{1.0, {0.5}};
    CosineSeries rho_i{1.0, {}};
};

/// dt = min(c_adv * eps * dv / e_bound, t_final / n_min, c_coll * eps^2),
/// then shrunk so that an integer number of steps fills each diagnostic interval.
struct DtPolicy {
    double c_adv = 0.5;
    double e_bound = 1.0;
    std::size_t n_min = 200;
    double c_coll = 0.1;
};

struct SimConfig {
    int dim = 1;
    double length = 1.0;
    std::size_t nx = 128;
    std::size_t nv = 256;
    double vmax = 8.0;
    double epsilon = 0.1;
    std::vector<double> epsilons;       // sweep list; empty means single run
    double t_final = 0.5;
    DtPolicy dt;
    double diagnostic_interval = 0.0;   // 0 selects t_final / 64
    std::size_t fluid_substeps = 16;    // fluid steps per diagnostic interval
    std::vector<double> p_list{2.0, 4.0};
    InitSpec init;
    double c_calib = 1.0;               // stand-in for the unnamed constant in T^eps
    std::uint64_t seed = 0;
    std::size_t particles = 100000;
    double oracle_dt_ratio = 0.01;      // particle dt / eps^2
    std::size_t jobs = 1;
    std::string output_dir = "out";

    /// Number of diagnostic intervals in [0, t_final] (0 when t_final == 0).
    std::size_t diagnostic_count() const;
    /// Resolved interval length (0 when t_final == 0).
    double resolved_interval() const;
};

/// Throws ConfigError on the first violated constraint.
void validate(const SimConfig& config);

/// Strict parse: unknown keys are rejected, defaults are filled, result validated.
SimConfig config_from_json(const nlohmann::json& j);
SimConfig load_config(const std::filesystem::path& path);

/// Fully resolved config, suitable for manifests and round-tripping through config_from_json.
nlohmann::json to_json(const SimConfig& config);

}  // namespace vpfp
