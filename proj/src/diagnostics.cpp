#include "vpfp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vpfp/error.hpp"
#include "vpfp/fourier.hpp"

namespace vpfp {

SpatialField marginal(const PhaseField& f)
{
    const auto w = f.space().v.weights();
    SpatialField rho(f.space().x);
    for (std::size_t j = 0; j < f.nx(); ++j) {
        const auto r = f.row(j);
        double s = 0.0;
        for (std::size_t k = 0; k < r.size(); ++k) s += w[k] * r[k];
        rho[j] = s;
    }
    return rho;
}

SpatialField shifted_marginal(const PhaseField& f, double eps, Exec exec)
{
    const SpatialGrid& grid = f.space().x;
    const VelocityGrid& vg = f.space().v;
    const std::size_t nx = grid.nx;
    const std::size_t nm = nx / 2 + 1;
    const auto nv = static_cast<std::ptrdiff_t>(vg.size());
    const Fourier& fft = fourier_for(nx);

    // Spectrum of every velocity column, then a fixed-order weighted sum per mode.
    std::vector<Complex> spectra(vg.size() * nm);
    auto transform_column = [&](std::size_t k, std::vector<double>& column) {
        for (std::size_t j = 0; j < nx; ++j) column[j] = f(j, k);
        fft.forward(column, std::span<Complex>(spectra.data() + k * nm, nm));
    };
    if (exec == Exec::serial) {
        std::vector<double> column(nx);
        for (std::ptrdiff_t k = 0; k < nv; ++k) transform_column(static_cast<std::size_t>(k), column);
    } else {
#pragma omp parallel
        {
            std::vector<double> column(nx);
#pragma omp for schedule(static)
            for (std::ptrdiff_t k = 0; k < nv; ++k) transform_column(static_cast<std::size_t>(k), column);
        }
    }

    const auto nodes = vg.nodes();
    const auto w = vg.weights();
    std::vector<Complex> sum(nm);
    auto reduce_mode = [&](std::size_t m) {
        const double kappa = wavenumber(m, grid.length);
        Complex acc{};
        for (std::size_t k = 0; k < vg.size(); ++k) {
            // u(x - eps v): multiply mode m by exp(-i kappa eps v).
            const double theta = -kappa * eps * nodes[k];
            const Complex phase = (2 * m == nx) ? Complex{std::cos(theta), 0.0}
                                                : Complex{std::cos(theta), std::sin(theta)};
            acc += w[k] * phase * spectra[k * nm + m];
        }
        sum[m] = acc;
    };
    const auto nmodes = static_cast<std::ptrdiff_t>(nm);
    if (exec == Exec::serial) {
        for (std::ptrdiff_t m = 0; m < nmodes; ++m) reduce_mode(static_cast<std::size_t>(m));
    } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t m = 0; m < nmodes; ++m) reduce_mode(static_cast<std::size_t>(m));
    }

    SpatialField pi(grid);
    fft.inverse(sum, pi.values());
    return pi;
}

double weighted_lp_norm(const PhaseField& f, double p)
{
    if (!(p >= 1.0)) throw InvalidArgument("weighted_lp_norm: p must be >= 1");
    const auto w = f.space().v.weights();
    const auto m = f.space().v.maxwellian();
    double s = 0.0;
    for (std::size_t j = 0; j < f.nx(); ++j) {
        const auto r = f.row(j);
        for (std::size_t k = 0; k < r.size(); ++k) {
            const double u = std::abs(r[k] / m[k]);
            s += (p == 2.0 ? u * u : std::pow(u, p)) * m[k] * w[k];
        }
    }
    s *= f.space().x.dx();
    return p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p);
}

double distance_to_local_equilibrium(const PhaseField& f, const SpatialField& g)
{
    const auto w = f.space().v.weights();
    const auto m = f.space().v.maxwellian();
    double s = 0.0;
    for (std::size_t j = 0; j < f.nx(); ++j) {
        const auto r = f.row(j);
        for (std::size_t k = 0; k < r.size(); ++k) {
            const double d = r[k] / m[k] - g[j];
            s += d * d * m[k] * w[k];
        }
    }
    return std::sqrt(s * f.space().x.dx());
}

double fp_dissipation(const PhaseField& f, double p)
{
    if (!(p >= 2.0)) throw InvalidArgument("fp_dissipation: p must be >= 2");
    const VelocityGrid& vg = f.space().v;
    const auto w = vg.weights();
    const auto m = vg.maxwellian();
    const std::size_t nv = vg.size();
    const double dv = vg.dv();
    std::vector<double> u(nv);
    double s = 0.0;
    for (std::size_t j = 0; j < f.nx(); ++j) {
        const auto r = f.row(j);
        for (std::size_t k = 0; k < nv; ++k) u[k] = r[k] / m[k];
        for (std::size_t k = 0; k < nv; ++k) {
            double du;
            if (k == 0)
                du = (u[1] - u[0]) / dv;
            else if (k + 1 == nv)
                du = (u[nv - 1] - u[nv - 2]) / dv;
            else
                du = (u[k + 1] - u[k - 1]) / (2.0 * dv);
            const double weight = p == 2.0 ? 1.0 : std::pow(std::abs(u[k]), p - 2.0);
            s += du * du * weight * m[k] * w[k];
        }
    }
    return (p - 1.0) * s * f.space().x.dx();
}

double laplace_dissipation(const SpatialField& rho, double p)
{
    if (!(p >= 2.0)) throw InvalidArgument("laplace_dissipation: p must be >= 2");
    const SpatialField d = spectral_derivative(rho);
    double s = 0.0;
    for (std::size_t j = 0; j < rho.size(); ++j) {
        const double weight = p == 2.0 ? 1.0 : std::pow(std::abs(rho[j]), p - 2.0);
        s += d[j] * d[j] * weight;
    }
    return (p - 1.0) * s * rho.grid().dx();
}

double field_discrepancy(const PhaseField& f, const SpatialField& rho_i, double eps)
{
    const FieldPair e = field_from_density(marginal(f), rho_i);
    const FieldPair i = field_from_density(shifted_marginal(f, eps), rho_i);
    return sup_norm(e.field - i.field);
}

std::vector<double> default_shifts(const SpatialGrid& grid)
{
    std::vector<double> shifts;
    const double top = std::min(1.0, grid.length);
    for (double s = grid.dx(); s <= top * (1.0 + 1e-12); s *= 2.0) shifts.push_back(s);
    return shifts;
}

double translation_modulus(const PhaseField& f, double beta, double p, const std::vector<double>& shifts)
{
    if (shifts.empty()) throw InvalidArgument("translation_modulus: empty shift set");
    double best = 0.0;
    for (double x0 : shifts) {
        if (!(std::abs(x0) > 0.0) || std::abs(x0) > 1.0)
            throw InvalidArgument("translation_modulus: shifts must satisfy 0 < |x0| <= 1");
        PhaseField diff = translate_field(f, x0);
        auto dv = diff.values();
        const auto fv = f.values();
        for (std::size_t i = 0; i < dv.size(); ++i) dv[i] -= fv[i];
        best = std::max(best, weighted_lp_norm(diff, p) / std::pow(std::abs(x0), beta));
    }
    return best;
}

HolderNorm holder_seminorm(const SpatialField& e, double gamma)
{
    if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("holder_seminorm: gamma must lie in (0, 1]");
    const std::size_t n = e.size();
    const double length = e.grid().length;
    const double dx = e.grid().dx();
    HolderNorm h;
    h.sup = sup_norm(e);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const double d = static_cast<double>(b - a) * dx;
            const double dist = std::min(d, length - d);
            h.seminorm = std::max(h.seminorm, std::abs(e[a] - e[b]) / std::pow(dist, gamma));
        }
    }
    return h;
}

double gamma_exponent(double p, int dim) { return 1.0 - static_cast<double>(dim) / p; }

double beta_exponent(double p, int dim) { return (p - static_cast<double>(dim)) / (p - 1.0); }

double c_rho0_rhoi(const SpatialField& rho0, const SpatialField& rho_i, double p)
{
    const double n0 = lp_norm(rho0, p);
    const double ni = lp_norm(rho_i, p + 1.0);
    return std::max({n0 * n0, std::pow(ni, 2.0 - 2.0 / (p * p)), sup_norm(rho0), sup_norm(rho_i)});
}

double t_epsilon(const TEpsilonInputs& in)
{
    if (!(in.f0_norm_p > 0 && in.m_p > 0 && in.c_const > 0 && in.gamma > 0 && in.eps > 0 && in.c_calib > 0 &&
          in.p > 1))
        throw InvalidArgument("t_epsilon: inputs must be positive and p > 1");
    const double tail = in.c_calib * in.m_p * in.m_p * std::pow(in.eps, in.gamma * (1.0 + 2.0 / (in.p - 1.0)));
    const double denom = 4.0 * (in.f0_norm_p * in.f0_norm_p + tail);
    return std::log1p(in.c_const * std::pow(in.eps, -in.gamma) / denom) / (in.c_const * in.c_calib);
}

double well_preparedness(const PhaseField& f0, const SpatialField& rho0, double eps, double p, double beta)
{
    const double norm = weighted_lp_norm(f0, p);
    const double modulus = translation_modulus(f0, beta, p, default_shifts(f0.space().x));
    const double mismatch = lp_norm(marginal(f0) - rho0, p);
    const double third = mismatch == 0.0 ? 0.0 : std::pow(eps, -beta) * mismatch;
    return norm + modulus + third;
}

InstantErrors instant_errors(const PhaseField& f, const SpatialField& rho, double eps, Exec exec)
{
    const SpatialField rho_eps = marginal(f);
    const SpatialField pi_eps = shifted_marginal(f, eps, exec);
    InstantErrors e;
    e.f_minus_rhoeps_m = distance_to_local_equilibrium(f, rho_eps);
    e.rhoeps_minus_pieps = lp_norm(rho_eps - pi_eps, 2.0);
    e.pieps_minus_rho = lp_norm(pi_eps - rho, 2.0);
    e.f_minus_rho_m = distance_to_local_equilibrium(f, rho);
    return e;
}

void ErrorIntegrator::add(double t, const InstantErrors& e)
{
    if (started_) {
        const double h = t - last_t_;
        if (!(h >= 0.0)) throw InvalidArgument("ErrorIntegrator: times must be nondecreasing");
        auto trap = [h](double a, double b) { return 0.5 * h * (a * a + b * b); };
        sq_[0] += trap(last_.f_minus_rhoeps_m, e.f_minus_rhoeps_m);
        sq_[1] += trap(last_.rhoeps_minus_pieps, e.rhoeps_minus_pieps);
        sq_[2] += trap(last_.pieps_minus_rho, e.pieps_minus_rho);
        sq_[3] += trap(last_.f_minus_rho_m, e.f_minus_rho_m);
    }
    started_ = true;
    last_t_ = t;
    last_ = e;
}

ErrorDecomposition ErrorIntegrator::current() const
{
    return {std::sqrt(sq_[0]), std::sqrt(sq_[1]), std::sqrt(sq_[2]), std::sqrt(sq_[3])};
}

ErrorDecomposition error_decomposition(const std::vector<KineticSample>& kinetic,
                                       const std::vector<FluidSample>& fluid, double eps)
{
    if (kinetic.size() != fluid.size())
        throw InvalidArgument("error_decomposition: kinetic and fluid schedules have different lengths");
    ErrorIntegrator integrator;
    for (std::size_t n = 0; n < kinetic.size(); ++n) {
        const double tk = kinetic[n].t;
        const double tf = fluid[n].t;
        if (std::abs(tk - tf) > 1e-12 * std::max(1.0, std::abs(tk))) {
            std::ostringstream os;
            os << "error_decomposition: schedule mismatch at sample " << n << " (" << tk << " vs " << tf << ")";
            throw InvalidArgument(os.str());
        }
        integrator.add(tk, instant_errors(kinetic[n].f, fluid[n].rho, eps));
    }
    return integrator.current();
}

DiagnosticsRecorder::DiagnosticsRecorder(SpatialField rho_i, std::vector<double> p_list,
                                         std::vector<SpatialField> fluid, Exec exec)
    : rho_i_(std::move(rho_i)), p_list_(std::move(p_list)), fluid_(std::move(fluid)), exec_(exec)
{
}

DiagnosticsRecord DiagnosticsRecorder::observe(const KineticState& state)
{
    if (index_ >= fluid_.size())
        throw InvalidArgument("DiagnosticsRecorder: more kinetic samples than fluid samples");
    const PhaseField& f = state.f;
    DiagnosticsRecord r;
    r.t = state.t;
    r.mass = f.mass();
    for (double p : p_list_) r.lp_norms.emplace_back(p, weighted_lp_norm(f, p));
    r.errors = instant_errors(f, fluid_[index_], state.epsilon, exec_);
    r.field_discrepancy = field_discrepancy(f, rho_i_, state.epsilon);
    r.d2_dissipation = fp_dissipation(f, 2.0);
    integrator_.add(state.t, r.errors);
    r.integrated = integrator_.current();
    const auto v = f.values();
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    r.min_f = *lo;
    r.max_f = *hi;
    ++index_;
    return r;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points)
{
    if (points.size() < 3) throw InvalidArgument("fit_rate: needs at least 3 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<std::pair<double, double>> logs;
    for (const auto& [eps, err] : points) {
        if (!(eps > 0.0) || !(err > 0.0)) throw InvalidArgument("fit_rate: epsilon and error must be positive");
        const double x = std::log(eps), y = std::log(err);
        logs.emplace_back(x, y);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(points.size());
    const double denom = n * sxx - sx * sx;
    if (denom <= 0.0) throw InvalidArgument("fit_rate: epsilon values must not all coincide");
    RateFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (const auto& [x, y] : logs) {
        const double r = y - (fit.intercept + fit.slope * x);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss);
    return fit;
}

}  // namespace vpfp
