#include "vpfp/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vpfp/error.hpp"

namespace vpfp {

double maxwellian(double v)
{
    return std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi);
}

VelocityGrid::VelocityGrid(double vmax, std::size_t nv)
    : vmax_(vmax), dv_(2.0 * vmax / static_cast<double>(nv - 1))
{
    if (nv < 8) throw InvalidArgument("velocity grid needs Nv >= 8");
    if (!(vmax >= 6.0)) throw InvalidArgument("velocity cutoff Vmax must be >= 6");

    nodes_.resize(nv);
    weights_.assign(nv, dv_);
    maxwellian_.resize(nv);
    weights_.front() = weights_.back() = 0.5 * dv_;

    // Fill symmetric pairs from the same magnitude so v_k == -v_{Nv-1-k} bitwise.
    for (std::size_t k = 0; k < (nv + 1) / 2; ++k) {
        const double v = -vmax + static_cast<double>(k) * dv_;
        const double mirror = (2 * k + 1 == nv) ? 0.0 : v;
        nodes_[k] = mirror;
        nodes_[nv - 1 - k] = -mirror;
    }
    double mass = 0.0;
    for (std::size_t k = 0; k < nv; ++k) {
        maxwellian_[k] = vpfp::maxwellian(nodes_[k]);
        if (!(maxwellian_[k] > 0.0)) throw InvalidArgument("Vmax too large: Maxwellian underflows at the cutoff");
        mass += weights_[k] * maxwellian_[k];
    }
    renormalization_ = 1.0 / mass;
    for (auto& m : maxwellian_) m *= renormalization_;
}

SpatialField::SpatialField(SpatialGrid grid, double fill) : grid_(grid), values_(grid.nx, fill) {}

SpatialField::SpatialField(SpatialGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values))
{
    if (values_.size() != grid_.nx) throw InvalidArgument("SpatialField: size does not match grid");
}

double SpatialField::mean() const
{
    double s = 0.0;
    for (double u : values_) s += u;
    return s / static_cast<double>(values_.size());
}

double SpatialField::integral() const { return mean() * grid_.length; }

SpatialField& SpatialField::operator+=(const SpatialField& other)
{
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += other.values_[j];
    return *this;
}

SpatialField& SpatialField::operator-=(const SpatialField& other)
{
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= other.values_[j];
    return *this;
}

SpatialField& SpatialField::operator*=(double s)
{
    for (auto& u : values_) u *= s;
    return *this;
}

SpatialField operator+(SpatialField a, const SpatialField& b) { return a += b; }
SpatialField operator-(SpatialField a, const SpatialField& b) { return a -= b; }
SpatialField operator*(double s, SpatialField a) { return a *= s; }

double lp_norm(const SpatialField& u, double p)
{
    double s = 0.0;
    if (p == 2.0) {
        for (double x : u.values()) s += x * x;
        return std::sqrt(s * u.grid().dx());
    }
    for (double x : u.values()) s += std::pow(std::abs(x), p);
    return std::pow(s * u.grid().dx(), 1.0 / p);
}

double sup_norm(const SpatialField& u)
{
    double m = 0.0;
    for (double x : u.values()) m = std::max(m, std::abs(x));
    return m;
}

double total_variation(const SpatialField& u)
{
    const std::size_t n = u.size();
    double tv = 0.0;
    for (std::size_t j = 0; j < n; ++j) tv += std::abs(u[(j + 1) % n] - u[j]);
    return tv;
}

PhaseField::PhaseField(std::shared_ptr<const PhaseSpace> space, double fill)
    : space_(std::move(space)), values_(space_->x.nx * space_->v.size(), fill)
{
}

double PhaseField::mass() const
{
    const auto w = space_->v.weights();
    double total = 0.0;
    for (std::size_t j = 0; j < nx(); ++j) {
        const auto r = row(j);
        double s = 0.0;
        for (std::size_t k = 0; k < r.size(); ++k) s += w[k] * r[k];
        total += s;
    }
    return total * space_->x.dx();
}

bool PhaseField::all_finite() const
{
    return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

std::shared_ptr<const PhaseSpace> build_grids(double length, std::size_t nx, double vmax, std::size_t nv)
{
    if (!(length > 0.0)) throw InvalidArgument("domain length must be positive");
    if (nx < 8) throw InvalidArgument("spatial grid needs Nx >= 8");
    if (!std::has_single_bit(nx)) {
        std::ostringstream os;
        os << "Nx must be a power of two, got " << nx;
        throw InvalidArgument(os.str());
    }
    return std::make_shared<const PhaseSpace>(PhaseSpace{SpatialGrid{length, nx}, VelocityGrid(vmax, nv)});
}

std::shared_ptr<const PhaseSpace> build_grids(const SimConfig& config)
{
    return build_grids(config.length, config.nx, config.vmax, config.nv);
}

SpatialField sample(const CosineSeries& series, const SpatialGrid& grid)
{
    SpatialField u(grid);
    for (std::size_t j = 0; j < grid.nx; ++j) u[j] = series(grid.node(j), grid.length);
    return u;
}

PhaseField local_equilibrium(const SpatialField& rho, std::shared_ptr<const PhaseSpace> space)
{
    PhaseField f(space);
    const auto m = space->v.maxwellian();
    for (std::size_t j = 0; j < f.nx(); ++j) {
        auto r = f.row(j);
        for (std::size_t k = 0; k < r.size(); ++k) r[k] = rho[j] * m[k];
    }
    return f;
}

InitialData initial_data(const InitSpec& spec, std::shared_ptr<const PhaseSpace> space)
{
    const SpatialGrid& grid = space->x;
    SpatialField rho0 = sample(spec.rho0, grid);
    SpatialField rho_i = sample(spec.rho_i, grid);

    auto check_positive = [](const SpatialField& u, const char* name) {
        const double lo = *std::min_element(u.values().begin(), u.values().end());
        if (!(lo > 0.0)) {
            std::ostringstream os;
            os << name << " must be positive on the grid (min = " << lo << ")";
            throw InvalidArgument(os.str());
        }
    };
    check_positive(rho0, "rho0");
    check_positive(rho_i, "rho_i");

    const double mismatch = std::abs(rho0.mean() - rho_i.mean());
    if (mismatch > 1e-12) {
        std::ostringstream os;
        os << "rho0 and rho_i must have equal means (compatibility), mismatch = " << mismatch;
        throw InvalidArgument(os.str());
    }

    PhaseField f0 = local_equilibrium(rho0, space);
    return {std::move(f0), std::move(rho0), std::move(rho_i)};
}

}  // namespace vpfp
