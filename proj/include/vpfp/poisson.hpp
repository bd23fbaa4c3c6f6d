#pragma once

#include "vpfp/fourier.hpp"
#include "vpfp/grid.hpp"
#include "vpfp/parallel.hpp"

namespace vpfp {

/// Potential and field on the torus, gauge mean(potential) == 0.
struct FieldPair {
    SpatialField potential;
    SpatialField field;
};

/// Spectral solve of -phi'' = charge with zero mode of phi set to 0, E = -phi'.
/// Throws CompatibilityError when |mean(charge)| exceeds 1e-10 (scaled by max|charge| when larger than 1).
FieldPair solve_poisson(const SpatialField& charge);

/// solve_poisson(rho - rho_i).
FieldPair field_from_density(const SpatialField& rho, const SpatialField& rho_i);

/// Spectral derivative du/dx (Nyquist mode dropped).
SpatialField spectral_derivative(const SpatialField& u);

/// u(. + shift) by trigonometric interpolation. The Nyquist mode is kept as the
/// real cosine component, so translation is exact for data without Nyquist content.
SpatialField translate_field(const SpatialField& u, double shift);

/// Every velocity slice translated by the same shift.
PhaseField translate_field(const PhaseField& f, double shift, Exec exec = Exec::parallel);

/// In-place translation of one periodic sample; `modes` is scratch of size n/2 + 1.
void translate_in_place(std::span<double> u, double length, double shift, std::span<Complex> modes);

}  // namespace vpfp
