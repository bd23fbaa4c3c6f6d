#pragma once

#include <utility>
#include <vector>

#include "vpfp/grid.hpp"
#include "vpfp/kinetic.hpp"
#include "vpfp/parallel.hpp"
#include "vpfp/poisson.hpp"

namespace vpfp {

// ---------------------------------------------------------------------------
// Moments and norms
// ---------------------------------------------------------------------------

/// rho(x_j) = sum_k w_k f(x_j, v_k)
SpatialField marginal(const PhaseField& f);

/// pi(x_j) = sum_k w_k f(x_j - eps v_k, v_k): density in the shifted
/// coordinates x -> x + eps v. Spectral interpolation in x; the shifted field
/// itself is never stored.
SpatialField shifted_marginal(const PhaseField& f, double eps, Exec exec = Exec::parallel);

/// (sum_{j,k} |f_jk / M_k|^p M_k w_k dx)^{1/p}
double weighted_lp_norm(const PhaseField& f, double p);

/// || f - g (x) M_h ||_{L^2(M)}
double distance_to_local_equilibrium(const PhaseField& f, const SpatialField& g);

/// D_p[f] = (p - 1) sum |d_v(f/M)|^2 |f/M|^{p-2} M w dx, centered differences
/// in v (one-sided at the cutoff).
double fp_dissipation(const PhaseField& f, double p);

/// Delta_p[rho] = (p - 1) sum |d_x rho|^2 |rho|^{p-2} dx, spectral d_x.
double laplace_dissipation(const SpatialField& rho, double p);

/// sup_j |E^eps - I^eps| with E^eps from marginal(f) and I^eps from shifted_marginal(f, eps).
double field_discrepancy(const PhaseField& f, const SpatialField& rho_i, double eps);

/// Dyadic grid shifts dx * 2^m up to min(1, L).
std::vector<double> default_shifts(const SpatialGrid& grid);

/// max over shifts of |x0|^{-beta} || tau_{x0} f - f ||_p.
double translation_modulus(const PhaseField& f, double beta, double p, const std::vector<double>& shifts);

struct HolderNorm {
    double seminorm = 0.0;  // max_{j != j'} |E_j - E_j'| / dist^gamma (periodic distance)
    double sup = 0.0;
    double total() const { return seminorm + sup; }
};

/// Brute force over all grid pairs.
HolderNorm holder_seminorm(const SpatialField& e, double gamma);

// ---------------------------------------------------------------------------
// Convergence-estimate constants
// ---------------------------------------------------------------------------

/// gamma = 1 - d / p
double gamma_exponent(double p, int dim = 1);
/// beta = (p - d) / (p - 1)
double beta_exponent(double p, int dim = 1);

/// max(||rho0||_p^2, ||rho_i||_{p+1}^{2 - 2/p^2}, ||rho0||_inf, ||rho_i||_inf)
double c_rho0_rhoi(const SpatialField& rho0, const SpatialField& rho_i, double p);

struct TEpsilonInputs {
    double f0_norm_p = 1.0;   // ||f_0||_p
    double m_p = 1.0;
    double c_const = 1.0;     // C_{rho0, rho_i}
    double gamma = 0.5;
    double p = 2.0;
    double eps = 1.0;
    double c_calib = 1.0;     // not a value from the analysis; defaults to 1
};

/// T^eps = ln(1 + C eps^{-gamma} / (4 (||f0||_p^2 + C_calib m_p^2 eps^{gamma (1 + 2/(p-1))}))) / (C C_calib)
double t_epsilon(const TEpsilonInputs& in);

/// ||f0||_p + translation_modulus(f0, beta, p, default shifts) + eps^{-beta} ||marginal(f0) - rho0||_p
double well_preparedness(const PhaseField& f0, const SpatialField& rho0, double eps, double p, double beta);

// ---------------------------------------------------------------------------
// Error decomposition
// ---------------------------------------------------------------------------

/// Instantaneous pieces of the decomposition at one time.
struct InstantErrors {
    double f_minus_rhoeps_m = 0.0;   // ||f - rho^eps M||_{L^2(M)}
    double rhoeps_minus_pieps = 0.0; // ||rho^eps - pi^eps||_{L^2}
    double pieps_minus_rho = 0.0;    // ||pi^eps - rho||_{L^2}
    double f_minus_rho_m = 0.0;      // ||f - rho M||_{L^2(M)}
};

InstantErrors instant_errors(const PhaseField& f, const SpatialField& rho, double eps, Exec exec = Exec::parallel);

/// Time-integrated L^2([0, t]) norms.
struct ErrorDecomposition {
    double e1 = 0.0;
    double e2 = 0.0;
    double e3 = 0.0;
    double total = 0.0;
};

/// Trapezoid accumulation of squared errors on a fixed schedule.
class ErrorIntegrator {
public:
    void add(double t, const InstantErrors& e);
    ErrorDecomposition current() const;

private:
    bool started_ = false;
    double last_t_ = 0.0;
    InstantErrors last_;
    double sq_[4] = {0.0, 0.0, 0.0, 0.0};
};

struct KineticSample {
    double t;
    PhaseField f;
};
struct FluidSample {
    double t;
    SpatialField rho;
};

/// Rejects trajectories whose time schedules differ (tolerance 1e-12 relative).
ErrorDecomposition error_decomposition(const std::vector<KineticSample>& kinetic,
                                       const std::vector<FluidSample>& fluid, double eps);

// ---------------------------------------------------------------------------
// Records and rate fitting
// ---------------------------------------------------------------------------

struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    std::vector<std::pair<double, double>> lp_norms;  // (p, ||f||_p)
    InstantErrors errors;
    double field_discrepancy = 0.0;
    double d2_dissipation = 0.0;
    ErrorDecomposition integrated;  // running L^2-in-time norms up to t
    double min_f = 0.0;
    double max_f = 0.0;
};

class DiagnosticsSink {
public:
    virtual ~DiagnosticsSink() = default;
    virtual void write(const DiagnosticsRecord& record) = 0;
};

/// Turns kinetic states on the diagnostic schedule into records, comparing
/// against a fluid trajectory sampled on the same schedule.
class DiagnosticsRecorder {
public:
    DiagnosticsRecorder(SpatialField rho_i, std::vector<double> p_list, std::vector<SpatialField> fluid,
                        Exec exec = Exec::parallel);

    DiagnosticsRecord observe(const KineticState& state);
    std::size_t count() const { return index_; }

private:
    SpatialField rho_i_;
    std::vector<double> p_list_;
    std::vector<SpatialField> fluid_;
    Exec exec_;
    std::size_t index_ = 0;
    ErrorIntegrator integrator_;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // Euclidean norm of the log-space residuals
};

/// Least squares of ln(error) against ln(eps). Needs >= 3 points, all positive.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

}  // namespace vpfp
