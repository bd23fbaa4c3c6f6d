#pragma once

#include <functional>
#include <vector>

#include "vpfp/config.hpp"
#include "vpfp/grid.hpp"
#include "vpfp/poisson.hpp"

namespace vpfp {

/// Drift-diffusion-Poisson state: d_t rho + d_x(E rho) - d_xx rho = 0.
struct FluidState {
    double t = 0.0;
    SpatialField rho;
    FieldPair field;
};

FluidState make_fluid_state(SpatialField rho, const SpatialField& rho_i);

/// Spectral integrating-factor step
///   rho_hat <- exp(-kappa^2 dt) (rho_hat - dt i kappa (E rho)_hat),
/// with E taken at the start of the step. Throws CflViolation when
/// dt > 0.25 dx / sup|E|.
FluidState step_ddp(const FluidState& state, double dt, const SpatialField& rho_i);

struct FluidTrajectory {
    std::vector<double> times;
    std::vector<SpatialField> rho;
};

using FluidObserver = std::function<void(const FluidState&)>;

/// Samples rho on the kinetic diagnostic schedule (t = n * interval). Each interval
/// takes `fluid_substeps` steps, more when the drift CFL demands it.
FluidTrajectory run_ddp(const SimConfig& config, const FluidObserver& observer = {});

}  // namespace vpfp
