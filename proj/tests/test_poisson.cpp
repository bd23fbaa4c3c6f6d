#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "vpfp/error.hpp"
#include "vpfp/fourier.hpp"
#include "vpfp/poisson.hpp"

using namespace vpfp;
using oracle::kPi;

TEST_CASE("forward transform matches a brute-force DFT")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<double> u(32);
    for (double& x : u) x = U(rng);
    std::vector<Complex> out(17);
    fourier_for(32).forward(u, out);
    const auto ref = oracle::dft(u);
    for (std::size_t m = 0; m < out.size(); ++m) CHECK(std::abs(out[m] - ref[m]) < 1e-12);
    std::vector<double> back(32);
    fourier_for(32).inverse(out, back);
    for (std::size_t j = 0; j < u.size(); ++j) CHECK(back[j] == oracle::approx(u[j]).epsilon(1e-14));
}

TEST_CASE("Poisson single-mode oracles")
{
    SpatialGrid g{1.0, 128};
    SUBCASE("zero charge")
    {
        auto fp = solve_poisson(SpatialField(g, 0.0));
        CHECK(sup_norm(fp.potential) == 0.0);
        CHECK(sup_norm(fp.field) == 0.0);
    }
    SUBCASE("cos(2 pi x)")
    {
        auto fp = solve_poisson(oracle::field_of(g, [](double x) { return std::cos(2 * kPi * x); }));
        auto phi = oracle::field_of(g, [](double x) { return std::cos(2 * kPi * x) / (4 * kPi * kPi); });
        auto e = oracle::field_of(g, [](double x) { return std::sin(2 * kPi * x) / (2 * kPi); });
        CHECK(oracle::max_abs_diff(fp.potential, phi) < 1e-10);
        CHECK(oracle::max_abs_diff(fp.field, e) < 1e-10);
        CHECK(sup_norm(fp.field) == oracle::approx(0.15915494).epsilon(1e-7));
    }
    SUBCASE("sin(4 pi x)")
    {
        auto fp = solve_poisson(oracle::field_of(g, [](double x) { return std::sin(4 * kPi * x); }));
        auto e = oracle::field_of(g, [](double x) { return -std::cos(4 * kPi * x) / (4 * kPi); });
        CHECK(oracle::max_abs_diff(fp.field, e) < 1e-10);
    }
    SUBCASE("density against background")
    {
        auto rho = oracle::field_of(g, [](double x) { return 1 + 0.5 * std::cos(2 * kPi * x); });
        auto fp = field_from_density(rho, SpatialField(g, 1.0));
        CHECK(sup_norm(fp.field) == oracle::approx(0.07957747).epsilon(1e-7));
        CHECK(sup_norm(field_from_density(rho, rho).field) == 0.0);
        auto rho2 = oracle::field_of(g, [](double x) { return 1 + 0.41046 * std::cos(2 * kPi * x); });
        CHECK(sup_norm(field_from_density(rho2, SpatialField(g, 1.0)).field) ==
              oracle::approx(0.41046 / (2 * kPi)).epsilon(1e-8));
    }
    SUBCASE("incompatible charge")
    {
        CHECK_THROWS_AS(solve_poisson(SpatialField(g, 1e-6)), CompatibilityError);
    }
}

TEST_CASE("Poisson properties: gauge, zero-mean field, linearity")
{
    std::mt19937_64 rng(3);
    SpatialGrid g{1.0, 64};
    for (int trial = 0; trial < 20; ++trial) {
        auto q1 = oracle::random_field(rng, g, 10, 0.0, 1.0);
        auto q2 = oracle::random_field(rng, g, 10, 0.0, 1.0);
        q1 -= SpatialField(g, q1.mean());
        q2 -= SpatialField(g, q2.mean());
        auto f1 = solve_poisson(q1), f2 = solve_poisson(q2);
        CHECK(std::abs(f1.potential.mean()) <= 1e-13 * sup_norm(f1.potential));
        CHECK(std::abs(f1.field.mean()) < 1e-15);
        const double a = 1.7, b = -0.3;
        auto combo = solve_poisson(a * q1 + b * q2);
        auto lin = a * f1.field + b * f2.field;
        CHECK(oracle::max_abs_diff(combo.field, lin) <= 1e-12 * sup_norm(lin));
        // -phi'' = q through the spectral derivative.
        auto lap = spectral_derivative(spectral_derivative(f1.potential));
        CHECK(oracle::max_abs_diff(-1.0 * lap, q1) < 1e-10);
    }
}

TEST_CASE("translation")
{
    SpatialGrid g{1.0, 128};
    auto u = oracle::field_of(g, [](double x) { return std::cos(2 * kPi * x); });
    CHECK(oracle::max_abs_diff(translate_field(u, 0.0), u) < 1e-15);
    CHECK(oracle::max_abs_diff(translate_field(u, 1.0), u) < 1e-13);
    auto s = oracle::field_of(g, [](double x) { return -std::sin(2 * kPi * x); });
    CHECK(oracle::max_abs_diff(translate_field(u, 0.25), s) < 1e-12);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        auto r = oracle::random_field(rng, g, 30, 0.3, 1.0);
        const double shift = std::uniform_real_distribution<double>(-3, 3)(rng);
        CHECK(lp_norm(translate_field(r, shift), 2.0) == oracle::approx(lp_norm(r, 2.0)).epsilon(1e-12));
        CHECK(oracle::max_abs_diff(translate_field(translate_field(r, shift), -shift), r) < 1e-12);
    }
}
