#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <json.hpp>

#include "vpfp/config.hpp"
#include "vpfp/grid.hpp"
#include "vpfp/poisson.hpp"

namespace vpfp {

/// Langevin particles whose law solves the kinetic equation:
///   dX = V / eps dt,  dV = (E(X) / eps - V / eps^2) dt + sqrt(2) / eps dW.
///
/// Random numbers come from one mt19937_64 stream per fixed block of particles
/// (seeded by (seed, block)), so results do not depend on the thread count.
class ParticleEnsemble {
public:
    static constexpr std::size_t kBlock = 4096;

    ParticleEnsemble(std::vector<double> x, std::vector<double> v, double eps, double length, std::uint64_t seed);

    std::size_t size() const { return x_.size(); }
    double epsilon() const { return eps_; }
    double length() const { return length_; }
    double time() const { return t_; }
    const std::vector<double>& positions() const { return x_; }
    const std::vector<double>& velocities() const { return v_; }
    /// Unwrapped X(t) - X(0).
    const std::vector<double>& displacements() const { return disp_; }

    /// One Euler-Maruyama step with E sampled by periodic linear interpolation.
    /// Rejects dt > 0.1 eps^2; dt == 0 is the identity.
    void step(const SpatialField& e, double dt, Exec exec = Exec::parallel);

    /// Cloud-in-cell density on `grid`, normalized to total mass `mass`.
    SpatialField deposit(const SpatialGrid& grid, double mass) const;

    std::mt19937_64& block_engine(std::size_t b) { return engines_[b]; }

private:
    std::vector<double> x_, v_, disp_;
    double eps_;
    double length_;
    double t_ = 0.0;
    std::vector<std::mt19937_64> engines_;
};

/// Draws X from rho0 (rejection sampling of the cosine series) and V from N(0, 1).
ParticleEnsemble sample_local_equilibrium(const CosineSeries& rho0, double length, std::size_t n, double eps,
                                          std::uint64_t seed);

struct MarginalReport {
    std::size_t particles = 0;
    double t = 0.0;
    double l1_distance = 0.0;       // sum_j |h_j - rho_j| dx
    double l1_standard_error = 0.0; // mass * sum_j sqrt(p_j (1 - p_j) / N)
    double mean_v_gap = 0.0;
    double mean_v_standard_error = 0.0;
    double second_moment_gap = 0.0;
    double second_moment_standard_error = 0.0;
    double dx = 0.0;
    double total_variation = 0.0;   // TV of marginal(f)

    /// L1 gap within `k` standard errors plus 2 dx TV(rho).
    bool histogram_agrees(double k = 5.0) const
    {
        return l1_distance <= k * l1_standard_error + 2.0 * dx * total_variation;
    }
};

/// Nearest-node histogram of X (Nx bins centered on the nodes) against marginal(f),
/// and the gaps in the first two velocity moments.
MarginalReport compare_marginals(const ParticleEnsemble& ens, const PhaseField& f);

nlohmann::json to_json(const MarginalReport& r);

/// Self-consistent particle run: field from the deposited density each step.
/// dt = oracle_dt_ratio * eps^2, shrunk to land on t_final.
ParticleEnsemble run_particles(const SimConfig& config, double eps, double t_final, Exec exec = Exec::parallel);

}  // namespace vpfp
