#include "vpfp/sde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vpfp/diagnostics.hpp"
#include "vpfp/error.hpp"

namespace vpfp {

namespace {

std::vector<std::mt19937_64> make_engines(std::size_t n, std::uint64_t seed)
{
    const std::size_t blocks = (n + ParticleEnsemble::kBlock - 1) / ParticleEnsemble::kBlock;
    std::vector<std::mt19937_64> engines;
    engines.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
        engines.emplace_back(seq);
    }
    return engines;
}

double wrap(double x, double length)
{
    double y = std::fmod(x, length);
    if (y < 0.0) y += length;
    if (y >= length) y -= length;
    return y;
}

double interpolate(const SpatialField& e, double x)
{
    const double dx = e.grid().dx();
    const std::size_t n = e.size();
    const double s = x / dx;
    const double fl = std::floor(s);
    const double frac = s - fl;
    const auto j = static_cast<std::size_t>(static_cast<long long>(fl) % static_cast<long long>(n));
    return (1.0 - frac) * e[j] + frac * e[(j + 1) % n];
}

}  // namespace

ParticleEnsemble::ParticleEnsemble(std::vector<double> x, std::vector<double> v, double eps, double length,
                                   std::uint64_t seed)
    : x_(std::move(x)), v_(std::move(v)), disp_(x_.size(), 0.0), eps_(eps), length_(length),
      engines_(make_engines(x_.size(), seed))
{
    if (x_.size() != v_.size()) throw InvalidArgument("ParticleEnsemble: x and v sizes differ");
    if (!(eps > 0.0)) throw InvalidArgument("ParticleEnsemble: eps must be positive");
    for (auto& xi : x_) xi = wrap(xi, length_);
}

void ParticleEnsemble::step(const SpatialField& e, double dt, Exec exec)
{
    if (dt == 0.0) return;
    if (!(dt > 0.0) || dt > 0.1 * eps_ * eps_ * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "particle step needs 0 <= dt <= 0.1 eps^2, got dt = " << dt;
        throw CflViolation(os.str());
    }
    const double inv_eps = 1.0 / eps_;
    const double noise = std::sqrt(2.0 * dt) * inv_eps;
    const auto blocks = static_cast<std::ptrdiff_t>(engines_.size());
    auto advance_block = [&](std::size_t b) {
        std::normal_distribution<double> normal;
        auto& engine = engines_[b];
        const std::size_t begin = b * kBlock;
        const std::size_t end = std::min(x_.size(), begin + kBlock);
        for (std::size_t i = begin; i < end; ++i) {
            const double x = x_[i];
            const double v = v_[i];
            const double step_x = v * inv_eps * dt;
            v_[i] = v + (interpolate(e, x) * inv_eps - v * inv_eps * inv_eps) * dt + noise * normal(engine);
            disp_[i] += step_x;
            x_[i] = wrap(x + step_x, length_);
        }
    };
    if (exec == Exec::serial) {
        for (std::ptrdiff_t b = 0; b < blocks; ++b) advance_block(static_cast<std::size_t>(b));
    } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t b = 0; b < blocks; ++b) advance_block(static_cast<std::size_t>(b));
    }
    t_ += dt;
}

SpatialField ParticleEnsemble::deposit(const SpatialGrid& grid, double mass) const
{
    SpatialField rho(grid);
    const double dx = grid.dx();
    const std::size_t n = grid.nx;
    for (double x : x_) {
        const double s = x / dx;
        const double fl = std::floor(s);
        const double frac = s - fl;
        const auto j = static_cast<std::size_t>(fl) % n;
        rho[j] += 1.0 - frac;
        rho[(j + 1) % n] += frac;
    }
    rho *= mass / (static_cast<double>(x_.size()) * dx);
    return rho;
}

ParticleEnsemble sample_local_equilibrium(const CosineSeries& rho0, double length, std::size_t n, double eps,
                                          std::uint64_t seed)
{
    double bound = std::abs(rho0.mean);
    for (double c : rho0.cos) bound += std::abs(c);

    std::vector<double> x(n), v(n);
    const std::size_t blocks = (n + ParticleEnsemble::kBlock - 1) / ParticleEnsemble::kBlock;
    // Sampling uses its own streams (seed offset) so the dynamics streams start fresh.
    auto engines = make_engines(n, seed ^ 0x9e3779b97f4a7c15ULL);
    for (std::size_t b = 0; b < blocks; ++b) {
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::normal_distribution<double> normal;
        auto& engine = engines[b];
        const std::size_t end = std::min(n, (b + 1) * ParticleEnsemble::kBlock);
        for (std::size_t i = b * ParticleEnsemble::kBlock; i < end; ++i) {
            double xi;
            do {
                xi = uni(engine) * length;
            } while (uni(engine) * bound > rho0(xi, length));
            x[i] = xi;
            v[i] = normal(engine);
        }
    }
    return ParticleEnsemble(std::move(x), std::move(v), eps, length, seed);
}

MarginalReport compare_marginals(const ParticleEnsemble& ens, const PhaseField& f)
{
    const SpatialGrid& grid = f.space().x;
    const std::size_t nx = grid.nx;
    const double dx = grid.dx();
    const SpatialField rho = marginal(f);
    const double mass = f.mass();
    const double n = static_cast<double>(ens.size());

    std::vector<double> counts(nx, 0.0);
    for (double x : ens.positions()) {
        const auto j = static_cast<std::size_t>(std::floor(x / dx + 0.5)) % nx;
        counts[j] += 1.0;
    }

    MarginalReport r;
    r.particles = ens.size();
    r.t = ens.time();
    r.dx = dx;
    r.total_variation = total_variation(rho);
    for (std::size_t j = 0; j < nx; ++j) {
        const double h = mass * counts[j] / (n * dx);
        r.l1_distance += std::abs(h - rho[j]) * dx;
        const double p = std::clamp(rho[j] * dx / mass, 0.0, 1.0);
        r.l1_standard_error += mass * std::sqrt(p * (1.0 - p) / n);
    }

    // Velocity moments of f per unit mass.
    const auto nodes = f.space().v.nodes();
    const auto w = f.space().v.weights();
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j < nx; ++j) {
        const auto row = f.row(j);
        for (std::size_t k = 0; k < row.size(); ++k) {
            m1 += nodes[k] * row[k] * w[k];
            m2 += nodes[k] * nodes[k] * row[k] * w[k];
        }
    }
    m1 *= dx / mass;
    m2 *= dx / mass;

    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (double v : ens.velocities()) {
        s1 += v;
        s2 += v * v;
        s4 += v * v * v * v;
    }
    const double pm1 = s1 / n, pm2 = s2 / n, pm4 = s4 / n;
    r.mean_v_gap = std::abs(pm1 - m1);
    r.mean_v_standard_error = std::sqrt(std::max(0.0, pm2 - pm1 * pm1) / n);
    r.second_moment_gap = std::abs(pm2 - m2);
    r.second_moment_standard_error = std::sqrt(std::max(0.0, pm4 - pm2 * pm2) / n);
    return r;
}

nlohmann::json to_json(const MarginalReport& r)
{
    return {
        {"particles", r.particles},
        {"t", r.t},
        {"l1_distance", r.l1_distance},
        {"l1_standard_error", r.l1_standard_error},
        {"mean_v_gap", r.mean_v_gap},
        {"mean_v_standard_error", r.mean_v_standard_error},
        {"second_moment_gap", r.second_moment_gap},
        {"second_moment_standard_error", r.second_moment_standard_error},
        {"dx", r.dx},
        {"total_variation", r.total_variation},
        {"histogram_agrees", r.histogram_agrees()},
    };
}

ParticleEnsemble run_particles(const SimConfig& config, double eps, double t_final, Exec exec)
{
    const SpatialGrid grid{config.length, config.nx};
    const SpatialField rho_i = sample(config.init.rho_i, grid);
    const double mass = config.init.rho0.mean * config.length;
    ParticleEnsemble ens = sample_local_equilibrium(config.init.rho0, config.length, config.particles, eps, config.seed);
    if (t_final <= 0.0) return ens;
    const double dt_max = config.oracle_dt_ratio * eps * eps;
    const auto steps = static_cast<std::size_t>(std::ceil(t_final / dt_max * (1.0 - 1e-12)));
    const double dt = t_final / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s) {
        SpatialField rho = ens.deposit(grid, mass);
        // Remove the O(1e-16) mean drift of the deposit before the compatibility check.
        const double drift = rho.mean() - rho_i.mean();
        for (auto& r : rho.values()) r -= drift;
        const FieldPair field = field_from_density(rho, rho_i);
        ens.step(field.field, dt, exec);
    }
    return ens;
}

}  // namespace vpfp
