#include <doctest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "vpfp/error.hpp"
#include "vpfp/harness.hpp"

using namespace vpfp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("vpfp_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SimConfig small_config()
{
    SimConfig c;
    c.nx = 32;
    c.nv = 64;
    c.t_final = 0.05;
    c.diagnostic_interval = 0.01;
    c.epsilons = {0.4, 0.2, 0.1};
    return c;
}

std::size_t count(const std::string& s, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("diagnostics CSV schema")
{
    const auto cols = diagnostics_columns({2.0, 4.0});
    const std::vector<std::string> expected{"t",
                                            "mass",
                                            "lp_norm_p2",
                                            "lp_norm_p4",
                                            "f_minus_rhoeps_M_l2",
                                            "rhoeps_minus_pieps_l2",
                                            "pieps_minus_rho_l2",
                                            "field_discrepancy_inf",
                                            "d2_dissipation"};
    CHECK(cols == expected);
    CHECK(diagnostics_columns({2.5}).at(2) == "lp_norm_p2_5");
}

TEST_CASE("run: zero horizon gives one record")
{
    auto dir = scratch("zero");
    SimConfig c = small_config();
    c.t_final = 0.0;
    c.diagnostic_interval = 0.0;
    auto run = command_run(c, dir);
    CHECK(run.records.size() == 1);
    const std::string csv = slurp(dir / "diagnostics.csv");
    CHECK(count(csv, "\n") == 2);
    CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("run: deterministic outputs and manifest")
{
    auto a = scratch("det_a"), b = scratch("det_b");
    SimConfig c = small_config();
    command_run(c, a);
    command_run(c, b);
    CHECK(slurp(a / "diagnostics.csv") == slurp(b / "diagnostics.csv"));
    CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
    const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
    CHECK(m.at("version") == kVersion);
    CHECK(m.at("config").at("Nx") == 32);
    CHECK(m.at("timings").contains("total_seconds"));
    CHECK(config_from_json(m.at("config")).nv == 64);
}

TEST_CASE("sweep: validation")
{
    SimConfig c = small_config();
    c.epsilons = {0.2, 0.1, 0.2};
    CHECK_THROWS_AS(run_convergence_sweep(c), ConfigError);
    c.epsilons = {0.2, 0.1};
    CHECK_THROWS_AS(run_convergence_sweep(c), ConfigError);
}

TEST_CASE("sweep: outputs independent of the worker count")
{
    auto a = scratch("sweep_a"), b = scratch("sweep_b");
    SimConfig c = small_config();
    c.jobs = 1;
    auto ra = run_convergence_sweep(c, a);
    c.jobs = 3;
    auto rb = run_convergence_sweep(c, b);
    CHECK_FALSE(ra.partial);
    CHECK(slurp(a / "sweep.csv") == slurp(b / "sweep.csv"));
    CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
    CHECK(slurp(a / "eps_0.1" / "diagnostics.csv") == slurp(b / "eps_0.1" / "diagnostics.csv"));
    CHECK(slurp(a / "sweep.csv").rfind("epsilon,err_total,err_E1,err_E2,err_E3,field_disc_at_T\n", 0) == 0);

    const auto s = nlohmann::json::parse(slurp(a / "summary.json"));
    CHECK(s.at("slopes").contains("total"));
    CHECK(s.at("theory").size() == 2);
    CHECK(s.at("runs").size() == 3);
    CHECK(s.at("runs")[0].at("horizon").size() == 2);
    CHECK(fs::exists(a / "manifest.json"));
    CHECK(fs::exists(a / "sweep.svg"));
}

TEST_CASE("sweep: a failing epsilon is recorded, others kept")
{
    // One step per interval: the acceleration half-step CFL number is about 0.008 / eps,
    // so only the smallest epsilon fails.
    SimConfig c = small_config();
    c.epsilons = {0.4, 0.2, 0.1, 0.005};
    c.dt.c_adv = 1e9;
    c.dt.c_coll = 1e9;
    c.dt.n_min = 1;
    c.diagnostic_interval = 0.05;
    auto r = run_convergence_sweep(c);
    CHECK(r.partial);
    REQUIRE(r.runs.size() == 4);
    for (const auto& run : r.runs) CHECK(run.ok == (run.eps > 0.05));
    CHECK(r.runs.back().error.find("CFL") != std::string::npos);
    CHECK(r.slopes.count("total") == 1);
}

TEST_CASE("plot")
{
    auto dir = scratch("plot");
    {
        std::ofstream out(dir / "sweep.csv");
        out << "epsilon,err_total,err_E1,err_E2,err_E3,field_disc_at_T\n"
               "0.2,0.05,0.04,0.05,0.02,1e-10\n0.1,0.026,0.024,0.018,0.007,5e-11\n"
               "0.05,0.012,0.012,0.005,0.002,1.2e-11\n0.025,0.0056,0.0056,0.0013,0.001,3e-12\n";
    }
    emit_plot(dir / "sweep.csv", dir / "sweep.svg");
    const std::string svg = slurp(dir / "sweep.svg");
    CHECK(count(svg, "<circle") == 4 * 5);
    CHECK(count(svg, "class=\"fit\"") == 5);
    CHECK(count(svg, "class=\"reference\"") == 1);

    for (const char* axis : {"xtick", "ytick"}) {
        // Tick labels must increase along the axis direction.
        std::regex re(std::string("class=\"") + axis + R"(\"[^>]*/><text[^>]*>([^<]+)</text>)");
        std::vector<double> vals;
        for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
            vals.push_back(std::stod((*it)[1]));
        CHECK(vals.size() >= 2);
        for (std::size_t i = 1; i < vals.size(); ++i) CHECK(vals[i] > vals[i - 1]);
    }

    {
        std::ofstream(dir / "empty.csv");
    }
    CHECK_THROWS_AS(emit_plot(dir / "empty.csv", dir / "x.svg"), IoError);
    {
        std::ofstream(dir / "header.csv") << "epsilon,err_total\n";
    }
    CHECK_THROWS_AS(emit_plot(dir / "header.csv", dir / "x.svg"), IoError);
    {
        std::ofstream(dir / "bad.csv") << "epsilon,err_total\n0.1,abc\n";
    }
    CHECK_THROWS_AS(emit_plot(dir / "bad.csv", dir / "x.svg"), IoError);
    {
        std::ofstream(dir / "ragged.csv") << "epsilon,err_total\n0.1\n";
    }
    CHECK_THROWS_AS(emit_plot(dir / "ragged.csv", dir / "x.svg"), IoError);
    CHECK_THROWS_AS(emit_plot(dir / "missing.csv", dir / "x.svg"), IoError);
}
