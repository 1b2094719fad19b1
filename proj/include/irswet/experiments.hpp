#pragma once

#include "irswet/config.hpp"
#include "irswet/table.hpp"

#include "json.hpp"

#include <string>
#include <utility>
#include <vector>

namespace irswet {

inline constexpr int manifest_schema_version = 1;

struct RunOptions {
    bool quick = false; ///< reduced sizes for smoke runs
};

/// CSV files (name, table) plus solver diagnostics of one subcommand.
struct ExperimentOutput {
    std::string command;
    std::vector<std::pair<std::string, Table>> tables;
    nlohmann::json diagnostics = nlohmann::json::object();
    bool passed = true; ///< false when a validation check failed
};

/// Subcommands understood by run_experiment().
const std::vector<std::string>& experiment_names();

/// Dispatches on `command`; throws std::invalid_argument for unknown names.
ExperimentOutput run_experiment(const std::string& command, const ScenarioConfig& cfg, const RunOptions& opts = {});

ExperimentOutput coupling_sweep(const ScenarioConfig& cfg, const RunOptions& opts = {});
ExperimentOutput tau_fit_experiment(const ScenarioConfig& cfg, const RunOptions& opts = {});
ExperimentOutput energy_distribution(const ScenarioConfig& cfg, const RunOptions& opts = {});
ExperimentOutput energy_vs_distance(const ScenarioConfig& cfg, const RunOptions& opts = {});
ExperimentOutput beam_plan(const ScenarioConfig& cfg, const RunOptions& opts = {});
ExperimentOutput heatmap(const ScenarioConfig& cfg, const RunOptions& opts = {});
ExperimentOutput versus_n(const ScenarioConfig& cfg, const RunOptions& opts = {});
ExperimentOutput versus_k(const ScenarioConfig& cfg, const RunOptions& opts = {});
ExperimentOutput validate_suite(const ScenarioConfig& cfg, const RunOptions& opts = {});

/// CSV text of one table with the hash/seed preamble.
std::string render_csv(const ExperimentOutput& out, const Table& table, const ScenarioConfig& cfg);

/// Manifest: schema version, command, resolved config, hash, seed, baseline
/// solver name, file list and diagnostics.
std::string manifest_json(const ExperimentOutput& out, const ScenarioConfig& cfg);

/// Stages every file as a temporary, then renames them into cfg.output.
/// Returns the written paths, manifest last.
std::vector<std::string> write_outputs(const ExperimentOutput& out, const ScenarioConfig& cfg);

/// Phase design for the practical IRS under cfg.scheme (auto selects by the
/// kappa boundary).
struct PracticalBeam {
    OptimResult result;
    Scheme scheme = Scheme::OM;
    double kappa_boundary = 0;
};

PracticalBeam practical_beam(const ScenarioConfig& cfg, const RVec& los, const RVec& mus);

/// Density of Pe R / (2(k+1)) X with X noncentral chi-square, two degrees of
/// freedom, noncentrality 2 k E / R.
double energy_pdf(double e, double Pe, double kappa, double r_sigma, double e_eq);

} // namespace irswet
