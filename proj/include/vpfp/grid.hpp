#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "vpfp/config.hpp"

namespace vpfp {

/// Uniform periodic grid on [0, L): x_j = j L / Nx, Nx a power of two.
struct SpatialGrid {
    double length = 1.0;
    std::size_t nx = 0;

    double dx() const { return length / static_cast<double>(nx); }
    double node(std::size_t j) const { return static_cast<double>(j) * dx(); }
    bool operator==(const SpatialGrid&) const = default;
};

/// Standard 1d Maxwellian (2 pi)^{-1/2} exp(-v^2 / 2).
double maxwellian(double v);

/// Uniform nodes on [-Vmax, Vmax] with trapezoid weights and the discrete
/// Maxwellian, renormalized so that sum_k w_k M_k == 1.
class VelocityGrid {
public:
    VelocityGrid(double vmax, std::size_t nv);

    double vmax() const { return vmax_; }
    std::size_t size() const { return nodes_.size(); }
    double dv() const { return dv_; }
    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }
    std::span<const double> maxwellian() const { return maxwellian_; }
    /// Factor applied to the sampled Gaussian to make its discrete mass exactly 1.
    double renormalization() const { return renormalization_; }

private:
    double vmax_;
    double dv_;
    double renormalization_ = 1.0;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> maxwellian_;
};

struct PhaseSpace {
    SpatialGrid x;
    VelocityGrid v;
};

/// Values on the nodes of a SpatialGrid.
class SpatialField {
public:
    SpatialField() = default;
    explicit SpatialField(SpatialGrid grid, double fill = 0.0);
    SpatialField(SpatialGrid grid, std::vector<double> values);

    const SpatialGrid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double& operator[](std::size_t j) { return values_[j]; }
    double operator[](std::size_t j) const { return values_[j]; }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    double mean() const;
    /// sum_j u_j dx
    double integral() const;

    SpatialField& operator+=(const SpatialField& other);
    SpatialField& operator-=(const SpatialField& other);
    SpatialField& operator*=(double s);

private:
    SpatialGrid grid_;
    std::vector<double> values_;
};

SpatialField operator+(SpatialField a, const SpatialField& b);
SpatialField operator-(SpatialField a, const SpatialField& b);
SpatialField operator*(double s, SpatialField a);

/// Discrete (sum_j |u_j|^p dx)^{1/p}.
double lp_norm(const SpatialField& u, double p);
double sup_norm(const SpatialField& u);
/// Total variation over one period, sum_j |u_{j+1} - u_j|.
double total_variation(const SpatialField& u);

/// Phase-space density sampled on x-major storage: value(j, k) = data[j * Nv + k].
class PhaseField {
public:
    PhaseField() = default;
    explicit PhaseField(std::shared_ptr<const PhaseSpace> space, double fill = 0.0);

    const PhaseSpace& space() const { return *space_; }
    const std::shared_ptr<const PhaseSpace>& space_ptr() const { return space_; }
    std::size_t nx() const { return space_->x.nx; }
    std::size_t nv() const { return space_->v.size(); }

    double& operator()(std::size_t j, std::size_t k) { return values_[j * nv() + k]; }
    double operator()(std::size_t j, std::size_t k) const { return values_[j * nv() + k]; }

    /// Velocity slice at x_j (contiguous).
    std::span<double> row(std::size_t j) { return {values_.data() + j * nv(), nv()}; }
    std::span<const double> row(std::size_t j) const { return {values_.data() + j * nv(), nv()}; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    /// sum_{j,k} f_jk w_k dx
    double mass() const;
    bool all_finite() const;

private:
    std::shared_ptr<const PhaseSpace> space_;
    std::vector<double> values_;
};

/// Builds the grids described by `config`; rejects non-power-of-two Nx,
/// Nx or Nv below 8, and Vmax below 6.
std::shared_ptr<const PhaseSpace> build_grids(const SimConfig& config);
std::shared_ptr<const PhaseSpace> build_grids(double length, std::size_t nx, double vmax, std::size_t nv);

SpatialField sample(const CosineSeries& series, const SpatialGrid& grid);

/// rho (x) M_h.
PhaseField local_equilibrium(const SpatialField& rho, std::shared_ptr<const PhaseSpace> space);

struct InitialData {
    PhaseField f0;
    SpatialField rho0;
    SpatialField rho_i;
};

/// Well-prepared data f0 = rho_0 (x) M_h. Rejects nonpositive densities on the
/// grid and mean mismatch between rho_0 and rho_i above 1e-12.
InitialData initial_data(const InitSpec& spec, std::shared_ptr<const PhaseSpace> space);

}  // namespace vpfp
