#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "vpfp/error.hpp"
#include "vpfp/fluid.hpp"

using namespace vpfp;
using oracle::kPi;

namespace {

double mode_amplitude(const SpatialField& u, std::size_t m)
{
    const auto modes = oracle::dft({u.values().begin(), u.values().end()});
    return 2.0 * std::abs(modes[m]) / static_cast<double>(u.size());
}

}  // namespace

TEST_CASE("neutral uniform state is stationary")
{
    SpatialGrid g{1.0, 64};
    SpatialField one(g, 1.0);
    auto st = make_fluid_state(one, one);
    for (int n = 0; n < 100; ++n) st = step_ddp(st, 1e-3, one);
    CHECK(oracle::max_abs_diff(st.rho, one) < 1e-13);
}

TEST_CASE("linear decay rate 1 + 4 pi^2")
{
    SimConfig c;
    c.init.rho0 = {1.0, {0.01}};
    c.t_final = 0.05;
    const auto traj = run_ddp(c);
    CHECK(traj.times.back() == oracle::approx(0.05));
    const double expected = 0.01 * std::exp(-(1 + 4 * kPi * kPi) * 0.05);
    CHECK(expected == oracle::approx(1.322e-3).epsilon(1e-3));
    CHECK(mode_amplitude(traj.rho.back(), 1) == oracle::approx(expected).epsilon(0.02));
}

TEST_CASE("mass is exact over many steps")
{
    SpatialGrid g{1.0, 128};
    auto rho = oracle::field_of(g, [](double x) { return 1 + 0.5 * std::cos(2 * kPi * x); });
    SpatialField rho_i(g, 1.0);
    auto st = make_fluid_state(rho, rho_i);
    const double m0 = st.rho.integral();
    for (int n = 0; n < 10000; ++n) st = step_ddp(st, 1e-4, rho_i);
    CHECK(std::abs(st.rho.integral() - m0) < 1e-12);
}

TEST_CASE("drift CFL is enforced")
{
    SpatialGrid g{1.0, 128};
    auto rho = oracle::field_of(g, [](double x) { return 1 + 0.5 * std::cos(2 * kPi * x); });
    SpatialField rho_i(g, 1.0);
    CHECK_THROWS_AS(step_ddp(make_fluid_state(rho, rho_i), 1.0, rho_i), CflViolation);
}

TEST_CASE("trajectory edge cases")
{
    SimConfig c;
    c.t_final = 0.0;
    auto traj = run_ddp(c);
    REQUIRE(traj.rho.size() == 1);
    CHECK(oracle::max_abs_diff(traj.rho[0], sample(c.init.rho0, {1.0, 128})) == 0.0);

    c.t_final = 0.1;
    c.init.rho0 = {1.0, {}};
    traj = run_ddp(c);
    for (const auto& r : traj.rho) CHECK(oracle::max_abs_diff(r, traj.rho[0]) < 1e-14);
}

TEST_CASE("acceptance trajectory: L2 decreasing and above the mean")
{
    SimConfig c;
    const auto traj = run_ddp(c);
    double prev = INFINITY;
    for (const auto& r : traj.rho) {
        const double n = lp_norm(r, 2.0);
        CHECK(n <= prev * (1 + 1e-14));
        CHECK(n >= 1.0 - 1e-14);
        prev = n;
    }
}

TEST_CASE("L^p and L^inf bounds on random positive data")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int trial = 0; trial < 10; ++trial) {
        SimConfig c;
        c.nx = 64;
        c.t_final = 0.2;
        c.init.rho0.cos = {0.4 * U(rng), 0.2 * U(rng), 0.1 * U(rng)};
        c.init.rho_i.cos = {0.3 * U(rng), 0.1 * U(rng)};
        const SpatialGrid g{1.0, c.nx};
        const auto rho0 = sample(c.init.rho0, g), rho_i = sample(c.init.rho_i, g);
        const auto traj = run_ddp(c);
        for (double p : {2.0, 4.0}) {
            const double bound = std::max(lp_norm(rho0, p), std::pow(lp_norm(rho_i, p + 1), 1 - 1 / (p * p)));
            for (const auto& r : traj.rho) CHECK(lp_norm(r, p) <= bound * (1 + 1e-3));
        }
        const double sup_bound = std::max(sup_norm(rho0), sup_norm(rho_i));
        for (const auto& r : traj.rho) CHECK(sup_norm(r) <= sup_bound * (1 + 1e-3));
    }
}
