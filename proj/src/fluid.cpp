#include "vpfp/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vpfp/error.hpp"
#include "vpfp/fourier.hpp"

namespace vpfp {

namespace {
constexpr double kDriftCfl = 0.25;
}

FluidState make_fluid_state(SpatialField rho, const SpatialField& rho_i)
{
    FluidState s;
    s.field = field_from_density(rho, rho_i);
    s.rho = std::move(rho);
    return s;
}

FluidState step_ddp(const FluidState& state, double dt, const SpatialField& rho_i)
{
    const SpatialGrid& grid = state.rho.grid();
    const double e_max = sup_norm(state.field.field);
    if (dt * e_max > kDriftCfl * grid.dx()) {
        std::ostringstream os;
        os << "fluid step violates drift CFL: dt = " << dt << " > 0.25 dx / sup|E| = " << kDriftCfl * grid.dx() / e_max;
        throw CflViolation(os.str());
    }
    const Fourier& fft = fourier_for(grid.nx);
    const std::size_t nm = fft.modes();
    std::vector<Complex> rho_hat(nm), flux_hat(nm);

    SpatialField flux(grid);
    for (std::size_t j = 0; j < grid.nx; ++j) flux[j] = state.field.field[j] * state.rho[j];
    fft.forward(state.rho.values(), rho_hat);
    fft.forward(flux.values(), flux_hat);

    for (std::size_t m = 1; m < nm; ++m) {
        const double kappa = wavenumber(m, grid.length);
        const Complex drift = (2 * m == grid.nx) ? Complex{} : Complex{0.0, kappa} * flux_hat[m];
        rho_hat[m] = std::exp(-kappa * kappa * dt) * (rho_hat[m] - dt * drift);
    }

    FluidState next;
    next.rho = SpatialField(grid);
    fft.inverse(rho_hat, next.rho.values());
    next.field = field_from_density(next.rho, rho_i);
    next.t = state.t + dt;
    return next;
}

FluidTrajectory run_ddp(const SimConfig& config, const FluidObserver& observer)
{
    const SpatialGrid grid{config.length, config.nx};
    SpatialField rho0 = sample(config.init.rho0, grid);
    const SpatialField rho_i = sample(config.init.rho_i, grid);
    if (std::abs(rho0.mean() - rho_i.mean()) > 1e-12)
        throw InvalidArgument("rho0 and rho_i must have equal means (compatibility)");

    FluidTrajectory traj;
    FluidState state = make_fluid_state(std::move(rho0), rho_i);
    traj.times.push_back(0.0);
    traj.rho.push_back(state.rho);
    if (observer) observer(state);

    const std::size_t intervals = config.diagnostic_count();
    const double interval = config.resolved_interval();
    for (std::size_t n = 1; n <= intervals; ++n) {
        const double e_max = sup_norm(state.field.field);
        std::size_t sub = config.fluid_substeps;
        if (e_max > 0.0) {
            const auto needed = static_cast<std::size_t>(std::ceil(interval * e_max / (kDriftCfl * grid.dx())));
            sub = std::max(sub, needed);
        }
        const double dt = interval / static_cast<double>(sub);
        for (std::size_t s = 0; s < sub; ++s) state = step_ddp(state, dt, rho_i);
        state.t = static_cast<double>(n) * interval;
        traj.times.push_back(state.t);
        traj.rho.push_back(state.rho);
        if (observer) observer(state);
    }
    return traj;
}

}  // namespace vpfp
