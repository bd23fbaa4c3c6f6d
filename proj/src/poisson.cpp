#include "vpfp/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "vpfp/error.hpp"

namespace vpfp {

FieldPair solve_poisson(const SpatialField& charge)
{
    const SpatialGrid& grid = charge.grid();
    const double scale = std::max(1.0, sup_norm(charge));
    const double mean = charge.mean();
    if (std::abs(mean) > 1e-10 * scale) {
        std::ostringstream os;
        os << "Poisson source must have zero mean on the torus, got mean " << mean;
        throw CompatibilityError(os.str());
    }

    const Fourier& fft = fourier_for(grid.nx);
    const std::size_t nm = fft.modes();
    const std::size_t nyquist = grid.nx / 2;
    std::vector<Complex> q(nm), phi_hat(nm), e_hat(nm);
    fft.forward(charge.values(), q);

    for (std::size_t m = 1; m < nm; ++m) {
        const double kappa = wavenumber(m, grid.length);
        phi_hat[m] = q[m] / (kappa * kappa);
        // E = -phi'  =>  E_hat = -i kappa phi_hat; the Nyquist derivative is dropped.
        e_hat[m] = (m == nyquist) ? Complex{} : Complex{0.0, -1.0} * q[m] / kappa;
    }

    FieldPair out{SpatialField(grid), SpatialField(grid)};
    fft.inverse(phi_hat, out.potential.values());
    fft.inverse(e_hat, out.field.values());
    return out;
}

FieldPair field_from_density(const SpatialField& rho, const SpatialField& rho_i)
{
    return solve_poisson(rho - rho_i);
}

SpatialField spectral_derivative(const SpatialField& u)
{
    const SpatialGrid& grid = u.grid();
    const Fourier& fft = fourier_for(grid.nx);
    std::vector<Complex> modes(fft.modes());
    fft.forward(u.values(), modes);
    modes[0] = 0.0;
    for (std::size_t m = 1; m < modes.size(); ++m)
        modes[m] = (m == grid.nx / 2) ? Complex{} : Complex{0.0, wavenumber(m, grid.length)} * modes[m];
    SpatialField du(grid);
    fft.inverse(modes, du.values());
    return du;
}

void translate_in_place(std::span<double> u, double length, double shift, std::span<Complex> modes)
{
    const std::size_t n = u.size();
    const Fourier& fft = fourier_for(n);
    fft.forward(u, modes);
    const double s = std::fmod(shift, length);
    for (std::size_t m = 1; m < modes.size(); ++m) {
        const double theta = wavenumber(m, length) * s;
        if (2 * m == n)
            modes[m] *= std::cos(theta);
        else
            modes[m] *= Complex{std::cos(theta), std::sin(theta)};
    }
    fft.inverse(modes, u);
}

SpatialField translate_field(const SpatialField& u, double shift)
{
    SpatialField out = u;
    std::vector<Complex> modes(u.size() / 2 + 1);
    translate_in_place(out.values(), u.grid().length, shift, modes);
    return out;
}

namespace {

void translate_column(PhaseField& f, std::size_t k, double shift, std::vector<double>& column,
                      std::vector<Complex>& modes)
{
    const std::size_t nx = f.nx();
    for (std::size_t j = 0; j < nx; ++j) column[j] = f(j, k);
    translate_in_place(column, f.space().x.length, shift, modes);
    for (std::size_t j = 0; j < nx; ++j) f(j, k) = column[j];
}

}  // namespace

PhaseField translate_field(const PhaseField& f, double shift, Exec exec)
{
    PhaseField out = f;
    const std::size_t nx = f.nx();
    const auto nv = static_cast<std::ptrdiff_t>(f.nv());
    if (exec == Exec::serial) {
        std::vector<double> column(nx);
        std::vector<Complex> modes(nx / 2 + 1);
        for (std::ptrdiff_t k = 0; k < nv; ++k) translate_column(out, static_cast<std::size_t>(k), shift, column, modes);
        return out;
    }
#pragma omp parallel
    {
        std::vector<double> column(nx);
        std::vector<Complex> modes(nx / 2 + 1);
#pragma omp for schedule(static)
        for (std::ptrdiff_t k = 0; k < nv; ++k) translate_column(out, static_cast<std::size_t>(k), shift, column, modes);
    }
    return out;
}

}  // namespace vpfp
