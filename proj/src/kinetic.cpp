#include "vpfp/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vpfp/diagnostics.hpp"
#include "vpfp/error.hpp"

namespace vpfp {

namespace {

// B(z) = z / (e^z - 1)
double bernoulli(double z)
{
    if (std::abs(z) < 1e-12) return 1.0 - 0.5 * z;
    return z / std::expm1(z);
}

double minmod(double a, double b)
{
    if (a * b <= 0.0) return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
}

}  // namespace

CollisionStep::CollisionStep(const VelocityGrid& v, double tau)
    : tau_(tau),
      maxwellian_(v.maxwellian().begin(), v.maxwellian().end()),
      weights_(v.weights().begin(), v.weights().end())
{
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("collision step needs dt > 0 and eps > 0");
    const std::size_t n = v.size();
    const auto nodes = v.nodes();
    const double dv = v.dv();

    std::vector<double> edge(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double mid = 0.5 * (nodes[k] + nodes[k + 1]);
        edge[k] = bernoulli(mid * dv) * maxwellian_[k] / dv;
    }

    lower_.assign(n, 0.0);
    upper_.assign(n, 0.0);
    pivot_.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double left = k > 0 ? edge[k - 1] : 0.0;
        const double right = k + 1 < n ? edge[k] : 0.0;
        const double diag = weights_[k] * maxwellian_[k] + tau * (left + right);
        lower_[k] = -tau * left;
        const double super = -tau * right;
        pivot_[k] = k > 0 ? diag - lower_[k] * upper_[k - 1] : diag;
        upper_[k] = super / pivot_[k];
    }
}

void CollisionStep::apply(std::span<double> f) const
{
    const std::size_t n = f.size();
    // Right-hand side diag(w M) u = w f, forward elimination in place.
    f[0] = weights_[0] * f[0] / pivot_[0];
    for (std::size_t k = 1; k < n; ++k) f[k] = (weights_[k] * f[k] - lower_[k] * f[k - 1]) / pivot_[k];
    for (std::size_t k = n - 1; k-- > 0;) f[k] -= upper_[k] * f[k + 1];
    for (std::size_t k = 0; k < n; ++k) f[k] *= maxwellian_[k];
}

PhaseField fokker_planck_step(const PhaseField& f, double dt, double eps, Exec exec)
{
    if (!(dt > 0.0) || !(eps > 0.0)) throw InvalidArgument("fokker_planck_step: dt and eps must be positive");
    const CollisionStep step(f.space().v, dt / (eps * eps));
    PhaseField out = f;
    const auto nx = static_cast<std::ptrdiff_t>(f.nx());
    if (exec == Exec::serial) {
        for (std::ptrdiff_t j = 0; j < nx; ++j) step.apply(out.row(static_cast<std::size_t>(j)));
    } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t j = 0; j < nx; ++j) step.apply(out.row(static_cast<std::size_t>(j)));
    }
    if (!out.all_finite()) throw NumericalError("fokker_planck_step produced non-finite values");
    return out;
}

namespace {

void stream_column(PhaseField& f, std::size_t k, double shift, std::vector<double>& column,
                   std::vector<Complex>& modes)
{
    const std::size_t nx = f.nx();
    for (std::size_t j = 0; j < nx; ++j) column[j] = f(j, k);
    translate_in_place(column, f.space().x.length, shift, modes);
    for (std::size_t j = 0; j < nx; ++j) f(j, k) = column[j];
}

}  // namespace

PhaseField transport_step(const PhaseField& f, double dt, double eps, Exec exec)
{
    if (!(eps > 0.0)) throw InvalidArgument("transport_step: eps must be positive");
    PhaseField out = f;
    const std::size_t nx = f.nx();
    const auto nodes = f.space().v.nodes();
    const auto nv = static_cast<std::ptrdiff_t>(f.nv());
    const double ratio = dt / eps;
    if (exec == Exec::serial) {
        std::vector<double> column(nx);
        std::vector<Complex> modes(nx / 2 + 1);
        for (std::ptrdiff_t k = 0; k < nv; ++k)
            stream_column(out, static_cast<std::size_t>(k), -nodes[static_cast<std::size_t>(k)] * ratio, column, modes);
        return out;
    }
#pragma omp parallel
    {
        std::vector<double> column(nx);
        std::vector<Complex> modes(nx / 2 + 1);
#pragma omp for schedule(static)
        for (std::ptrdiff_t k = 0; k < nv; ++k)
            stream_column(out, static_cast<std::size_t>(k), -nodes[static_cast<std::size_t>(k)] * ratio, column, modes);
    }
    return out;
}

namespace {

// One velocity slice with constant speed a = E / eps; returns mass flux leaving
// the slice (per unit x), already multiplied by dt.
double advect_slice(std::span<const double> in, std::span<double> out, std::span<const double> weights,
                    double speed, double dt, double dv, std::vector<double>& flux)
{
    const std::size_t n = in.size();
    const double courant = speed * dt / dv;
    auto slope = [&](std::size_t i) {
        if (i == 0 || i + 1 == n) return 0.0;
        return minmod(in[i] - in[i - 1], in[i + 1] - in[i]);
    };
    // flux[i] sits at the interface between nodes i-1 and i; flux[0] and flux[n] are the cutoff faces.
    flux.assign(n + 1, 0.0);
    if (speed > 0.0) {
        for (std::size_t i = 1; i < n; ++i) flux[i] = speed * (in[i - 1] + 0.5 * (1.0 - courant) * slope(i - 1));
        flux[n] = speed * in[n - 1];
    } else if (speed < 0.0) {
        for (std::size_t i = 1; i < n; ++i) flux[i] = speed * (in[i] - 0.5 * (1.0 + courant) * slope(i));
        flux[0] = speed * in[0];
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = in[i] - dt * (flux[i + 1] - flux[i]) / weights[i];
    return dt * (std::abs(flux[0]) + std::abs(flux[n]));
}

}  // namespace

PhaseField acceleration_step(const PhaseField& f, const FieldPair& field, double dt, double eps, Exec exec,
                             double* outflow)
{
    if (!(eps > 0.0)) throw InvalidArgument("acceleration_step: eps must be positive");
    const VelocityGrid& v = f.space().v;
    const double courant = std::abs(dt) * sup_norm(field.field) / (eps * v.dv());
    if (courant > 1.0) {
        std::ostringstream os;
        os << "acceleration step violates CFL: dt sup|E| / (eps dv) = " << courant << " > 1";
        throw CflViolation(os.str());
    }
    PhaseField out(f.space_ptr());
    const auto nx = static_cast<std::ptrdiff_t>(f.nx());
    const auto w = v.weights();
    const double dv = v.dv();
    std::vector<double> lost(f.nx(), 0.0);
    if (exec == Exec::serial) {
        std::vector<double> flux;
        for (std::ptrdiff_t j = 0; j < nx; ++j) {
            const auto jj = static_cast<std::size_t>(j);
            lost[jj] = advect_slice(f.row(jj), out.row(jj), w, field.field[jj] / eps, dt, dv, flux);
        }
    } else {
#pragma omp parallel
        {
            std::vector<double> flux;
#pragma omp for schedule(static)
            for (std::ptrdiff_t j = 0; j < nx; ++j) {
                const auto jj = static_cast<std::size_t>(j);
                lost[jj] = advect_slice(f.row(jj), out.row(jj), w, field.field[jj] / eps, dt, dv, flux);
            }
        }
    }
    if (outflow) {
        double total = 0.0;
        for (double x : lost) total += x;
        *outflow += total * f.space().x.dx();
    }
    return out;
}

KineticState make_kinetic_state(PhaseField f, const SpatialField& rho_i, double eps)
{
    KineticState s;
    s.field = field_from_density(marginal(f), rho_i);
    s.f = std::move(f);
    s.epsilon = eps;
    return s;
}

KineticState step_vpfp(const KineticState& state, double dt, const SpatialField& rho_i, Exec exec)
{
    const double eps = state.epsilon;
    const double half = 0.5 * dt;
    KineticState next;
    next.epsilon = eps;
    next.outflow = state.outflow;

    PhaseField f = fokker_planck_step(state.f, half, eps, exec);
    f = acceleration_step(f, field_from_density(marginal(f), rho_i), half, eps, exec, &next.outflow);
    f = transport_step(f, dt, eps, exec);
    f = acceleration_step(f, field_from_density(marginal(f), rho_i), half, eps, exec, &next.outflow);
    f = fokker_planck_step(f, half, eps, exec);

    next.field = field_from_density(marginal(f), rho_i);
    next.f = std::move(f);
    next.t = state.t + dt;
    return next;
}

StepSchedule kinetic_schedule(const SimConfig& config, double eps, const VelocityGrid& v)
{
    StepSchedule s;
    s.intervals = config.diagnostic_count();
    if (s.intervals == 0) return s;
    s.interval = config.resolved_interval();
    const DtPolicy& p = config.dt;
    const double dt_max = std::min({p.c_adv * eps * v.dv() / p.e_bound,
                                    config.t_final / static_cast<double>(p.n_min), p.c_coll * eps * eps});
    s.steps_per_interval = static_cast<std::size_t>(std::ceil(s.interval / dt_max * (1.0 - 1e-12)));
    s.steps_per_interval = std::max<std::size_t>(s.steps_per_interval, 1);
    s.dt = s.interval / static_cast<double>(s.steps_per_interval);
    return s;
}

KineticState run_vpfp(const SimConfig& config, double eps, const StateObserver& observer, Exec exec)
{
    auto space = build_grids(config);
    InitialData init = initial_data(config.init, space);
    const StepSchedule schedule = kinetic_schedule(config, eps, space->v);

    KineticState state = make_kinetic_state(std::move(init.f0), init.rho_i, eps);
    if (observer) observer(state);
    for (std::size_t n = 1; n <= schedule.intervals; ++n) {
        for (std::size_t s = 0; s < schedule.steps_per_interval; ++s)
            state = step_vpfp(state, schedule.dt, init.rho_i, exec);
        // Pin the clock to the shared schedule instead of accumulating dt.
        state.t = static_cast<double>(n) * schedule.interval;
        if (!state.f.all_finite()) throw NumericalError("kinetic state became non-finite");
        if (observer) observer(state);
    }
    return state;
}

}  // namespace vpfp
