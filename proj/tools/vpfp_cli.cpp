// vpfp: command-line driver for the kinetic solver, fluid limit and particle oracle.
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "vpfp/error.hpp"
#include "vpfp/harness.hpp"

namespace fs = std::filesystem;

namespace {

int fail(const std::string& kind, const std::string& message, const std::string& path, const fs::path& out_dir)
{
    nlohmann::json err = {{"error", {{"kind", kind}, {"message", message}}}};
    if (!path.empty()) err["error"]["path"] = path;
    std::cerr << err.dump() << '\n';
    if (!out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        std::ofstream(out_dir / "error.json") << err.dump(2) << '\n';
    }
    return kind == "config" || kind == "usage" ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Vlasov-Poisson-Fokker-Planck diffusive limit solver"};
    app.require_subcommand(1);
    app.set_version_flag("--version", vpfp::kVersion);

    std::string config_path, out, csv_in, svg_out;
    std::vector<double> epsilons;
    std::optional<std::size_t> jobs;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory (default: config output_dir)");
        sub->add_option("--seed", seed, "random seed");
    };
    auto* run = app.add_subcommand("run", "single kinetic run at epsilon, writes diagnostics.csv");
    add_common(run);
    run->add_option("--epsilons", epsilons, "override epsilon (one value)")->delimiter(',');
    auto* sweep = app.add_subcommand("sweep", "convergence sweep over epsilons");
    add_common(sweep);
    sweep->add_option("--epsilons", epsilons, "comma separated list")->delimiter(',');
    sweep->add_option("--jobs", jobs, "epsilon runs in flight")->check(CLI::PositiveNumber);
    auto* fluid = app.add_subcommand("fluid", "drift-diffusion-Poisson limit only");
    add_common(fluid);
    auto* oracle = app.add_subcommand("oracle", "Langevin particle cross-check at epsilon");
    add_common(oracle);
    oracle->add_option("--epsilons", epsilons, "override epsilon (one value)")->delimiter(',');
    auto* plot = app.add_subcommand("plot", "log-log SVG of a sweep.csv");
    plot->add_option("--out", out, "sweep output directory (reads sweep.csv, writes sweep.svg)");
    plot->add_option("--csv", csv_in, "input CSV (overrides --out)");
    plot->add_option("--svg", svg_out, "output SVG (overrides --out)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), "", {});
    }

    fs::path out_dir = out;
    try {
        if (plot->parsed()) {
            if (csv_in.empty() && out.empty()) throw vpfp::ConfigError("--csv", "give --out DIR or --csv FILE");
            const fs::path csv = csv_in.empty() ? out_dir / "sweep.csv" : fs::path(csv_in);
            const fs::path svg = svg_out.empty() ? (out.empty() ? fs::path(csv).replace_extension(".svg")
                                                                : out_dir / "sweep.svg")
                                                 : fs::path(svg_out);
            vpfp::emit_plot(csv, svg);
            std::cout << svg.string() << '\n';
            return 0;
        }

        vpfp::SimConfig config = config_path.empty() ? vpfp::SimConfig{} : vpfp::load_config(config_path);
        if (seed) config.seed = *seed;
        if (jobs) config.jobs = *jobs;
        if (!epsilons.empty()) {
            if (sweep->parsed()) {
                config.epsilons = epsilons;
            } else {
                if (epsilons.size() != 1) throw vpfp::ConfigError("--epsilons", "expects a single value here");
                config.epsilon = epsilons.front();
            }
        }
        if (out.empty()) out_dir = config.output_dir;
        config.output_dir = out_dir.string();
        vpfp::validate(config);

        if (run->parsed()) {
            const auto r = vpfp::command_run(config, out_dir);
            std::cout << "epsilon " << r.eps << ": err_total " << r.errors.total << " (E1 " << r.errors.e1
                      << ", E2 " << r.errors.e2 << ", E3 " << r.errors.e3 << "), mass drift " << r.mass_drift
                      << '\n';
        } else if (sweep->parsed()) {
            const auto res = vpfp::run_convergence_sweep(config, out_dir);
            for (const auto& [name, f] : res.slopes)
                std::cout << name << ": slope " << f.slope << " residual " << f.residual << '\n';
            if (res.partial) {
                std::string failed;
                for (const auto& r : res.runs)
                    if (!r.ok) failed += (failed.empty() ? "" : "; ") + vpfp::format_number(r.eps) + ": " + r.error;
                return fail("partial_sweep", failed, "", out_dir);
            }
        } else if (fluid->parsed()) {
            const auto traj = vpfp::command_fluid(config, out_dir);
            std::cout << traj.times.size() << " fluid samples written\n";
        } else if (oracle->parsed()) {
            const auto r = vpfp::command_oracle(config, out_dir);
            std::cout << "L1 gap " << r.l1_distance << " (standard error " << r.l1_standard_error << "), "
                      << (r.histogram_agrees() ? "agrees" : "DISAGREES") << '\n';
            if (!r.histogram_agrees()) return fail("oracle_mismatch", "particle histogram disagrees with grid marginal", "", out_dir);
        }
    } catch (const vpfp::ConfigError& e) {
        return fail(e.kind(), e.what(), e.path(), out_dir);
    } catch (const vpfp::Error& e) {
        return fail(e.kind(), e.what(), "", out_dir);
    } catch (const nlohmann::json::exception& e) {
        return fail("config", e.what(), "", out_dir);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), "", out_dir);
    }
    return 0;
}
