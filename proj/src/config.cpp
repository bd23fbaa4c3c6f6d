#include "vpfp/config.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "vpfp/error.hpp"

namespace vpfp {

using nlohmann::json;

double CosineSeries::operator()(double x, double length) const
{
    double u = mean;
    for (std::size_t m = 0; m < cos.size(); ++m)
        u += cos[m] * std::cos(2.0 * std::numbers::pi * static_cast<double>(m + 1) * x / length);
    return u;
}

std::size_t SimConfig::diagnostic_count() const
{
    if (t_final == 0.0) return 0;
    const double interval = diagnostic_interval > 0.0 ? diagnostic_interval : t_final / 64.0;
    return static_cast<std::size_t>(std::llround(t_final / interval));
}

double SimConfig::resolved_interval() const
{
    const std::size_t n = diagnostic_count();
    return n == 0 ? 0.0 : t_final / static_cast<double>(n);
}

namespace {

void require(bool ok, const std::string& path, const std::string& message)
{
    if (!ok) throw ConfigError(path, message);
}

void check_epsilon(double eps, const std::string& path)
{
    require(std::isfinite(eps) && eps > 0.0 && eps <= 1.0, path, "epsilon must lie in (0, 1]");
}

}  // namespace

void validate(const SimConfig& c)
{
    require(c.dim == 1, "d", "only d = 1 is supported");
    require(std::isfinite(c.length) && c.length > 0.0, "L", "must be positive");
    require(c.nx >= 8 && std::has_single_bit(c.nx), "Nx", "must be a power of two >= 8");
    require(c.nv >= 8, "Nv", "must be >= 8");
    require(std::isfinite(c.vmax) && c.vmax >= 6.0, "Vmax", "must be >= 6");
    check_epsilon(c.epsilon, "epsilon");
    for (std::size_t i = 0; i < c.epsilons.size(); ++i)
        check_epsilon(c.epsilons[i], "epsilons[" + std::to_string(i) + "]");
    require(std::isfinite(c.t_final) && c.t_final >= 0.0, "T_final", "must be >= 0");
    require(c.dt.c_adv > 0.0, "dt_policy.c_adv", "must be positive");
    require(c.dt.e_bound > 0.0, "dt_policy.E_bound", "must be positive");
    require(c.dt.n_min >= 1, "dt_policy.N_min", "must be >= 1");
    require(c.dt.c_coll > 0.0, "dt_policy.c_coll", "must be positive");
    require(c.diagnostic_interval >= 0.0, "diagnostic_interval", "must be >= 0");
    if (c.t_final > 0.0 && c.diagnostic_interval > 0.0) {
        const double ratio = c.t_final / c.diagnostic_interval;
        require(ratio >= 1.0 - 1e-9 && std::abs(ratio - std::round(ratio)) < 1e-9, "diagnostic_interval",
                "must divide T_final into a whole number of intervals");
    }
    require(c.fluid_substeps >= 1, "fluid_substeps", "must be >= 1");
    require(!c.p_list.empty(), "p", "needs at least one exponent");
    for (std::size_t i = 0; i < c.p_list.size(); ++i)
        require(std::isfinite(c.p_list[i]) && c.p_list[i] >= 2.0, "p[" + std::to_string(i) + "]",
                "exponents must be >= 2 (p > d and dissipations need p >= 2)");
    require(c.c_calib > 0.0, "C_calib", "must be positive");
    require(c.particles >= 1, "particles", "must be >= 1");
    require(c.oracle_dt_ratio > 0.0 && c.oracle_dt_ratio <= 0.1, "oracle_dt_ratio",
            "must lie in (0, 0.1] (Euler-Maruyama stability)");
    require(c.jobs >= 1, "jobs", "must be >= 1");
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& prefix)
{
    require(j.is_object(), prefix, "expected a JSON object");
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw ConfigError(prefix.empty() ? key : prefix + "." + key, "unknown key");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& prefix = "")
{
    if (!j.contains(key)) return;
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(path, std::string("wrong type: ") + e.what());
    }
}

CosineSeries series_from_json(const json& j, const std::string& path)
{
    reject_unknown(j, {"mean", "cos"}, path);
    CosineSeries s;
    read(j, "mean", s.mean, path);
    read(j, "cos", s.cos, path);
    return s;
}

json series_to_json(const CosineSeries& s) { return json{{"mean", s.mean}, {"cos", s.cos}}; }

}  // namespace

SimConfig config_from_json(const json& j)
{
    reject_unknown(j,
                   {"d", "L", "Nx", "Nv", "Vmax", "epsilon", "epsilons", "T_final", "dt_policy",
                    "diagnostic_interval", "fluid_substeps", "p", "init", "C_calib", "seed", "particles",
                    "oracle_dt_ratio", "jobs", "output_dir"},
                   "");
    SimConfig c;
    read(j, "d", c.dim);
    read(j, "L", c.length);
    read(j, "Nx", c.nx);
    read(j, "Nv", c.nv);
    read(j, "Vmax", c.vmax);
    read(j, "epsilon", c.epsilon);
    read(j, "epsilons", c.epsilons);
    read(j, "T_final", c.t_final);
    if (j.contains("dt_policy")) {
        const json& d = j.at("dt_policy");
        reject_unknown(d, {"c_adv", "E_bound", "N_min", "c_coll"}, "dt_policy");
        read(d, "c_adv", c.dt.c_adv, "dt_policy");
        read(d, "E_bound", c.dt.e_bound, "dt_policy");
        read(d, "N_min", c.dt.n_min, "dt_policy");
        read(d, "c_coll", c.dt.c_coll, "dt_policy");
    }
    read(j, "diagnostic_interval", c.diagnostic_interval);
    read(j, "fluid_substeps", c.fluid_substeps);
    read(j, "p", c.p_list);
    if (j.contains("init")) {
        const json& init = j.at("init");
        reject_unknown(init, {"rho0", "rho_i"}, "init");
        if (init.contains("rho0")) c.init.rho0 = series_from_json(init.at("rho0"), "init.rho0");
        if (init.contains("rho_i")) c.init.rho_i = series_from_json(init.at("rho_i"), "init.rho_i");
    }
    read(j, "C_calib", c.c_calib);
    read(j, "seed", c.seed);
    read(j, "particles", c.particles);
    read(j, "oracle_dt_ratio", c.oracle_dt_ratio);
    read(j, "jobs", c.jobs);
    read(j, "output_dir", c.output_dir);
    validate(c);
    return c;
}

SimConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("parse error: ") + e.what());
    }
    return config_from_json(j);
}

json to_json(const SimConfig& c)
{
    return json{
        {"d", c.dim},
        {"L", c.length},
        {"Nx", c.nx},
        {"Nv", c.nv},
        {"Vmax", c.vmax},
        {"epsilon", c.epsilon},
        {"epsilons", c.epsilons},
        {"T_final", c.t_final},
        {"dt_policy", {{"c_adv", c.dt.c_adv}, {"E_bound", c.dt.e_bound}, {"N_min", c.dt.n_min}, {"c_coll", c.dt.c_coll}}},
        {"diagnostic_interval", c.resolved_interval()},
        {"fluid_substeps", c.fluid_substeps},
        {"p", c.p_list},
        {"init", {{"rho0", series_to_json(c.init.rho0)}, {"rho_i", series_to_json(c.init.rho_i)}}},
        {"C_calib", c.c_calib},
        {"seed", c.seed},
        {"particles", c.particles},
        {"oracle_dt_ratio", c.oracle_dt_ratio},
        {"jobs", c.jobs},
        {"output_dir", c.output_dir},
    };
}

}  // namespace vpfp
