#include "vpfp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

#include "vpfp/error.hpp"
#include "vpfp/fluid.hpp"

namespace vpfp {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string p_label(double p)
{
    if (p == std::floor(p) && std::abs(p) < 1e9) return std::to_string(static_cast<long long>(p));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", p);
    std::string s = buf;
    std::replace(s.begin(), s.end(), '.', '_');
    return s;
}

std::ofstream open_output(const fs::path& path)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void write_json(const fs::path& path, const nlohmann::json& j)
{
    auto out = open_output(path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

std::string eps_dir_name(double eps)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "eps_%g", eps);
    return buf;
}

nlohmann::json fit_json(const RateFit& f)
{
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual}};
}

nlohmann::json run_json(const EpsilonRun& r)
{
    nlohmann::json j = {{"epsilon", r.eps}, {"ok", r.ok}};
    if (!r.ok) {
        j["error"] = r.error;
        return j;
    }
    j["dt"] = r.schedule.dt;
    j["steps"] = r.schedule.steps_per_interval * r.schedule.intervals;
    j["err_total"] = r.errors.total;
    j["err_E1"] = r.errors.e1;
    j["err_E2"] = r.errors.e2;
    j["err_E3"] = r.errors.e3;
    j["field_disc_at_T"] = r.field_disc_at_t;
    j["field_disc_sup"] = r.sup_field_disc;
    j["pieps_minus_rho_sup"] = r.sup_pi_minus_rho;
    j["mass_drift"] = r.mass_drift;
    j["outflow"] = r.outflow;
    j["min_over_max_f"] = r.min_over_max_f;
    nlohmann::json h = nlohmann::json::array();
    for (const auto& e : r.horizon)
        h.push_back({{"p", e.p}, {"f0_norm", e.f0_norm}, {"M_p", e.m_p}, {"C", e.c_const}, {"T_eps", e.t_eps}});
    j["horizon"] = h;
    return j;
}

}  // namespace

std::vector<std::string> diagnostics_columns(const std::vector<double>& p_list)
{
    std::vector<std::string> cols{"t", "mass"};
    for (double p : p_list) cols.push_back("lp_norm_p" + p_label(p));
    for (const char* c : {"f_minus_rhoeps_M_l2", "rhoeps_minus_pieps_l2", "pieps_minus_rho_l2",
                          "field_discrepancy_inf", "d2_dissipation"})
        cols.emplace_back(c);
    return cols;
}

std::string format_number(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string csv_row(const DiagnosticsRecord& r)
{
    std::string s = format_number(r.t) + ',' + format_number(r.mass);
    for (const auto& [p, val] : r.lp_norms) s += ',' + format_number(val);
    for (double v : {r.errors.f_minus_rhoeps_m, r.errors.rhoeps_minus_pieps, r.errors.pieps_minus_rho,
                     r.field_discrepancy, r.d2_dissipation})
        s += ',' + format_number(v);
    return s;
}

CsvDiagnosticsSink::CsvDiagnosticsSink(const fs::path& path, const std::vector<double>& p_list)
    : out_(open_output(path))
{
    const auto cols = diagnostics_columns(p_list);
    for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
    out_ << '\n' << std::flush;
}

void CsvDiagnosticsSink::write(const DiagnosticsRecord& record)
{
    out_ << csv_row(record) << '\n' << std::flush;
    if (!out_) throw IoError("failed writing diagnostics row");
}

void MemorySink::write(const DiagnosticsRecord& record)
{
    records_.push_back(record);
    if (next_) next_->write(record);
}

std::vector<HorizonEntry> horizon(const SimConfig& config, double eps)
{
    auto space = build_grids(config);
    const InitialData init = initial_data(config.init, space);
    std::vector<HorizonEntry> out;
    for (double p : config.p_list) {
        HorizonEntry e;
        e.p = p;
        e.gamma = gamma_exponent(p, config.dim);
        e.beta = beta_exponent(p, config.dim);
        e.f0_norm = weighted_lp_norm(init.f0, p);
        e.m_p = well_preparedness(init.f0, init.rho0, eps, p, e.beta);
        e.c_const = c_rho0_rhoi(init.rho0, init.rho_i, p);
        e.t_eps = t_epsilon({e.f0_norm, e.m_p, e.c_const, e.gamma, p, eps, config.c_calib});
        out.push_back(e);
    }
    return out;
}

EpsilonRun run_with_diagnostics(const SimConfig& config, double eps, DiagnosticsSink& sink, Exec exec)
{
    const auto t0 = Clock::now();
    EpsilonRun run;
    run.eps = eps;
    auto space = build_grids(config);
    run.schedule = kinetic_schedule(config, eps, space->v);
    run.horizon = horizon(config, eps);

    const FluidTrajectory fluid = run_ddp(config);
    DiagnosticsRecorder recorder(sample(config.init.rho_i, space->x), config.p_list, fluid.rho, exec);
    run.min_over_max_f = std::numeric_limits<double>::infinity();
    const KineticState last = run_vpfp(
        config, eps,
        [&](const KineticState& s) {
            DiagnosticsRecord r = recorder.observe(s);
            sink.write(r);
            run.sup_field_disc = std::max(run.sup_field_disc, r.field_discrepancy);
            run.sup_pi_minus_rho = std::max(run.sup_pi_minus_rho, r.errors.pieps_minus_rho);
            if (r.max_f > 0.0) run.min_over_max_f = std::min(run.min_over_max_f, r.min_f / r.max_f);
            run.records.push_back(std::move(r));
        },
        exec);

    const auto& first = run.records.front();
    const auto& final = run.records.back();
    run.errors = final.integrated;
    run.field_disc_at_t = final.field_discrepancy;
    run.mass_drift = std::abs(final.mass - first.mass) / first.mass;
    run.outflow = last.outflow;
    run.ok = true;
    run.seconds = seconds_since(t0);
    return run;
}

SweepResult run_convergence_sweep(const SimConfig& config, const fs::path& out_dir)
{
    const auto t0 = Clock::now();
    std::vector<double> eps_list = config.epsilons;
    if (std::set<double>(eps_list.begin(), eps_list.end()).size() != eps_list.size())
        throw ConfigError("epsilons", "duplicate values");
    if (eps_list.size() < 3) throw ConfigError("epsilons", "a sweep needs at least 3 distinct values");
    std::sort(eps_list.begin(), eps_list.end(), std::greater<>());

    SweepResult result;
    result.runs.resize(eps_list.size());
    const std::size_t jobs = std::clamp<std::size_t>(config.jobs, 1, eps_list.size());
    // Several runs at once: keep each kernel serial to avoid oversubscription.
    // The serial and OpenMP drivers agree bit for bit, so outputs do not change.
    const Exec exec = jobs > 1 ? Exec::serial : Exec::parallel;

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < eps_list.size(); i = next++) {
            const double eps = eps_list[i];
            EpsilonRun& slot = result.runs[i];
            try {
                if (out_dir.empty()) {
                    MemorySink sink;
                    slot = run_with_diagnostics(config, eps, sink, exec);
                } else {
                    CsvDiagnosticsSink csv(out_dir / eps_dir_name(eps) / "diagnostics.csv", config.p_list);
                    slot = run_with_diagnostics(config, eps, csv, exec);
                }
            } catch (const std::exception& e) {
                slot = EpsilonRun{};
                slot.eps = eps;
                slot.ok = false;
                slot.error = e.what();
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < jobs; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<const EpsilonRun*> good;
    for (const auto& r : result.runs) {
        if (r.ok)
            good.push_back(&r);
        else
            result.partial = true;
    }

    auto fit = [&](const char* name, auto get) {
        std::vector<std::pair<double, double>> pts;
        for (const EpsilonRun* r : good) pts.emplace_back(r->eps, get(*r));
        try {
            result.slopes[name] = fit_rate(pts);
        } catch (const InvalidArgument&) {
            // Too few successful runs or a vanishing error; left out of the summary.
        }
    };
    fit("total", [](const EpsilonRun& r) { return r.errors.total; });
    fit("E1", [](const EpsilonRun& r) { return r.errors.e1; });
    fit("E2", [](const EpsilonRun& r) { return r.errors.e2; });
    fit("E3", [](const EpsilonRun& r) { return r.errors.e3; });
    fit("field_disc_at_T", [](const EpsilonRun& r) { return r.field_disc_at_t; });
    fit("field_disc_sup", [](const EpsilonRun& r) { return r.sup_field_disc; });
    fit("pieps_minus_rho_sup", [](const EpsilonRun& r) { return r.sup_pi_minus_rho; });

    for (double p : config.p_list) {
        HorizonEntry e;
        e.p = p;
        e.gamma = gamma_exponent(p, config.dim);
        e.beta = beta_exponent(p, config.dim);
        result.theory.push_back(e);
    }
    result.min_t_eps = std::numeric_limits<double>::infinity();
    for (const EpsilonRun* r : good)
        for (const auto& h : r->horizon) result.min_t_eps = std::min(result.min_t_eps, h.t_eps);
    result.horizon_exceeded = !good.empty() && config.t_final > result.min_t_eps;
    if (result.horizon_exceeded)
        std::cerr << "warning: T_final = " << config.t_final << " exceeds min T^eps = " << result.min_t_eps
                  << " (C_calib = " << config.c_calib << ")\n";

    if (!out_dir.empty()) {
        write_sweep_csv(result, out_dir / "sweep.csv");
        write_json(out_dir / "summary.json", summary_json(result));
        if (good.size() >= 1) emit_plot(out_dir / "sweep.csv", out_dir / "sweep.svg");
        nlohmann::json timings = {{"total_seconds", seconds_since(t0)}, {"jobs", jobs}};
        nlohmann::json per = nlohmann::json::array();
        for (const auto& r : result.runs) per.push_back({{"epsilon", r.eps}, {"seconds", r.seconds}});
        timings["runs"] = per;
        write_manifest(out_dir, config, "sweep", timings);
    }
    return result;
}

nlohmann::json summary_json(const SweepResult& result)
{
    nlohmann::json j;
    j["version"] = kVersion;
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : result.runs) runs.push_back(run_json(r));
    j["runs"] = runs;
    nlohmann::json slopes = nlohmann::json::object();
    for (const auto& [name, f] : result.slopes) slopes[name] = fit_json(f);
    j["slopes"] = slopes;
    nlohmann::json theory = nlohmann::json::array();
    for (const auto& e : result.theory) theory.push_back({{"p", e.p}, {"gamma", e.gamma}, {"beta", e.beta}});
    j["theory"] = theory;
    j["min_T_eps"] = std::isfinite(result.min_t_eps) ? nlohmann::json(result.min_t_eps) : nlohmann::json(nullptr);
    j["horizon_exceeded"] = result.horizon_exceeded;
    j["partial"] = result.partial;
    return j;
}

void write_sweep_csv(const SweepResult& result, const fs::path& path)
{
    auto out = open_output(path);
    out << "epsilon,err_total,err_E1,err_E2,err_E3,field_disc_at_T\n";
    for (const auto& r : result.runs) {
        if (!r.ok) continue;  // failures are reported in summary.json
        out << format_number(r.eps) << ',' << format_number(r.errors.total) << ',' << format_number(r.errors.e1)
            << ',' << format_number(r.errors.e2) << ',' << format_number(r.errors.e3) << ','
            << format_number(r.field_disc_at_t) << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

void write_manifest(const fs::path& dir, const SimConfig& config, const std::string& command,
                    const nlohmann::json& timings)
{
    nlohmann::json j = {{"version", kVersion},
                        {"command", command},
                        {"config", to_json(config)},
                        {"threads", max_threads()},
                        {"timings", timings}};
    write_json(dir / "manifest.json", j);
}

EpsilonRun command_run(const SimConfig& config, const fs::path& out_dir)
{
    const auto t0 = Clock::now();
    CsvDiagnosticsSink csv(out_dir / "diagnostics.csv", config.p_list);
    EpsilonRun run = run_with_diagnostics(config, config.epsilon, csv);
    nlohmann::json summary = run_json(run);
    summary["version"] = kVersion;
    write_json(out_dir / "summary.json", summary);
    write_manifest(out_dir, config, "run", {{"total_seconds", seconds_since(t0)}});
    return run;
}

FluidTrajectory command_fluid(const SimConfig& config, const fs::path& out_dir)
{
    const auto t0 = Clock::now();
    auto out = open_output(out_dir / "fluid.csv");
    out << "t,mass,l2_norm,min_rho,max_rho,field_sup\n";
    FluidTrajectory traj = run_ddp(config, [&](const FluidState& s) {
        const auto v = s.rho.values();
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        out << format_number(s.t) << ',' << format_number(s.rho.integral()) << ','
            << format_number(lp_norm(s.rho, 2.0)) << ',' << format_number(*lo) << ',' << format_number(*hi) << ','
            << format_number(sup_norm(s.field.field)) << '\n';
    });
    if (!out) throw IoError("failed writing fluid.csv");
    write_manifest(out_dir, config, "fluid", {{"total_seconds", seconds_since(t0)}});
    return traj;
}

MarginalReport command_oracle(const SimConfig& config, const fs::path& out_dir)
{
    const auto t0 = Clock::now();
    const double eps = config.epsilon;
    const KineticState grid_state = run_vpfp(config, eps, {});
    const double t_grid = seconds_since(t0);
    const ParticleEnsemble ens = run_particles(config, eps, config.t_final);
    MarginalReport report = compare_marginals(ens, grid_state.f);
    nlohmann::json j = to_json(report);
    j["epsilon"] = eps;
    j["seed"] = config.seed;
    j["histogram_agrees"] = report.histogram_agrees();
    write_json(out_dir / "oracle.json", j);
    write_manifest(out_dir, config, "oracle",
                   {{"grid_seconds", t_grid}, {"total_seconds", seconds_since(t0)}});
    return report;
}

}  // namespace vpfp
