#pragma once

#include <functional>
#include <vector>

#include "vpfp/config.hpp"
#include "vpfp/grid.hpp"
#include "vpfp/parallel.hpp"
#include "vpfp/poisson.hpp"

namespace vpfp {

struct KineticState {
    double t = 0.0;
    PhaseField f;
    FieldPair field;     // field_from_density(marginal(f), rho_i) at time t
    double epsilon = 1.0;
    double outflow = 0.0;  // cumulative mass lost through v = +-Vmax
};

/// Backward-Euler step of df/dt = (1/eps^2) d/dv (v f + df/dv) with tau = dt / eps^2.
///
/// Chang-Cooper (Bernoulli-weighted) fluxes written in u = f / M_h:
///   G_{k+1/2} = c_{k+1/2} (u_{k+1} - u_k),  c_{k+1/2} = B(v_{k+1/2} dv) M_k / dv,
/// with zero flux at both ends and trapezoid weights as cell volumes. The system
/// (diag(w M) + tau L) u^{n+1} = diag(w M) u^n is symmetric positive definite
/// and an M-matrix, so mass is conserved, constants in u are fixed points and
/// positivity is preserved. The factorization is computed once per tau.
class CollisionStep {
public:
    CollisionStep(const VelocityGrid& v, double tau);

    /// Advances one velocity slice in place.
    void apply(std::span<double> slice) const;
    double tau() const { return tau_; }

private:
    double tau_;
    std::vector<double> maxwellian_;
    std::vector<double> weights_;
    std::vector<double> lower_;   // sub-diagonal a_k
    std::vector<double> upper_;   // modified super-diagonal c'_k
    std::vector<double> pivot_;   // b_k - a_k c'_{k-1}
};

PhaseField fokker_planck_step(const PhaseField& f, double dt, double eps, Exec exec = Exec::parallel);

/// Exact free streaming f(x, v) <- f(x - v dt / eps, v) by spectral phase shift.
/// Negative dt runs the stream backwards.
PhaseField transport_step(const PhaseField& f, double dt, double eps, Exec exec = Exec::parallel);

/// Conservative MUSCL-Hancock (minmod) sweep in v for df/dt + (E/eps) df/dv = 0,
/// zero inflow at +-Vmax. Throws CflViolation when dt sup|E| / (eps dv) > 1.
/// Mass leaving through the cutoff is added to *outflow when given.
PhaseField acceleration_step(const PhaseField& f, const FieldPair& field, double dt, double eps,
                             Exec exec = Exec::parallel, double* outflow = nullptr);

/// Strang step: C(dt/2) A(dt/2) T(dt) A(dt/2) C(dt/2), field recomputed from
/// the density before each acceleration half step and at the end.
KineticState step_vpfp(const KineticState& state, double dt, const SpatialField& rho_i,
                       Exec exec = Exec::parallel);

KineticState make_kinetic_state(PhaseField f, const SpatialField& rho_i, double eps);

/// Fixed time step and diagnostic schedule for one epsilon.
struct StepSchedule {
    double dt = 0.0;
    std::size_t steps_per_interval = 0;
    std::size_t intervals = 0;
    double interval = 0.0;
};

/// dt = min(c_adv eps dv / E_bound, T / N_min, c_coll eps^2), reduced so that
/// each diagnostic interval holds a whole number of steps.
StepSchedule kinetic_schedule(const SimConfig& config, double eps, const VelocityGrid& v);

using StateObserver = std::function<void(const KineticState&)>;

/// Integrates from the configured initial data to T_final; `observer` is called
/// at t = 0 and after every diagnostic interval. Deterministic for a given config.
KineticState run_vpfp(const SimConfig& config, double eps, const StateObserver& observer,
                      Exec exec = Exec::parallel);

}  // namespace vpfp
