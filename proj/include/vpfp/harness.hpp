#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "vpfp/config.hpp"
#include "vpfp/diagnostics.hpp"
#include "vpfp/fluid.hpp"
#include "vpfp/kinetic.hpp"
#include "vpfp/sde.hpp"

namespace vpfp {

/// Column names of diagnostics.csv for the given p list.
std::vector<std::string> diagnostics_columns(const std::vector<double>& p_list);
std::string format_number(double x);
std::string csv_row(const DiagnosticsRecord& r);

/// Writes diagnostics.csv row by row; every row is flushed so a failing run
/// leaves the records written so far.
class CsvDiagnosticsSink : public DiagnosticsSink {
public:
    CsvDiagnosticsSink(const std::filesystem::path& path, const std::vector<double>& p_list);
    void write(const DiagnosticsRecord& record) override;

private:
    std::ofstream out_;
};

/// Collects records in memory (optionally forwarding to another sink).
class MemorySink : public DiagnosticsSink {
public:
    explicit MemorySink(DiagnosticsSink* next = nullptr) : next_(next) {}
    void write(const DiagnosticsRecord& record) override;
    const std::vector<DiagnosticsRecord>& records() const { return records_; }

private:
    DiagnosticsSink* next_;
    std::vector<DiagnosticsRecord> records_;
};

/// Validity horizon T^eps and its inputs for one exponent.
struct HorizonEntry {
    double p = 2.0;
    double gamma = 0.0;
    double beta = 0.0;
    double f0_norm = 0.0;
    double m_p = 0.0;
    double c_const = 0.0;
    double t_eps = 0.0;
};

std::vector<HorizonEntry> horizon(const SimConfig& config, double eps);

/// Summary of one kinetic run against its fluid reference.
struct EpsilonRun {
    double eps = 0.0;
    bool ok = false;
    std::string error;
    StepSchedule schedule;
    std::vector<DiagnosticsRecord> records;
    ErrorDecomposition errors;
    double field_disc_at_t = 0.0;
    double sup_field_disc = 0.0;
    double sup_pi_minus_rho = 0.0;
    double mass_drift = 0.0;      // |mass(T) - mass(0)| / mass(0)
    double outflow = 0.0;
    double min_over_max_f = 0.0;  // min over time of min f / max f
    std::vector<HorizonEntry> horizon;
    double seconds = 0.0;
};

/// Fluid reference + kinetic run with diagnostics streamed to `sink`.
EpsilonRun run_with_diagnostics(const SimConfig& config, double eps, DiagnosticsSink& sink,
                                Exec exec = Exec::parallel);

struct SweepResult {
    std::vector<EpsilonRun> runs;
    std::map<std::string, RateFit> slopes;
    std::vector<HorizonEntry> theory;  // gamma/beta per p (eps-independent fields)
    bool partial = false;
    bool horizon_exceeded = false;
    double min_t_eps = 0.0;
};

/// Runs every epsilon (independently, up to `jobs` at a time), fits rates and,
/// when `out_dir` is non-empty, writes per-epsilon diagnostics, sweep.csv,
/// summary.json, sweep.svg and manifest.json.
SweepResult run_convergence_sweep(const SimConfig& config, const std::filesystem::path& out_dir = {});

nlohmann::json summary_json(const SweepResult& result);
void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path);

/// Log-log SVG of every err_* / field_disc_* series in sweep.csv with fitted
/// lines and a reference slope-beta line. Throws on malformed or empty CSV.
void emit_plot(const std::filesystem::path& csv_path, const std::filesystem::path& svg_path);

/// Manifest with the resolved config, version and timings.
void write_manifest(const std::filesystem::path& dir, const SimConfig& config, const std::string& command,
                    const nlohmann::json& timings);

/// Single command drivers used by the CLI. Each writes into out_dir.
EpsilonRun command_run(const SimConfig& config, const std::filesystem::path& out_dir);
FluidTrajectory command_fluid(const SimConfig& config, const std::filesystem::path& out_dir);
MarginalReport command_oracle(const SimConfig& config, const std::filesystem::path& out_dir);

}  // namespace vpfp
