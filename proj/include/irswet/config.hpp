#pragma once

#include "irswet/beam_planner.hpp"
#include "irswet/geometry.hpp"
#include "irswet/hardware.hpp"
#include "irswet/mc_harness.hpp"
#include "irswet/phase_optimizer.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace irswet {

/// Raised for malformed or out-of-range configuration; one line per field.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

private:
    std::vector<std::string> issues_;
};

enum class SchemeChoice { Auto, DM, OM };

const char* to_string(SchemeChoice s);

/// Everything one experiment needs.
struct ScenarioConfig {
    ArrayGeometry geometry;
    AngleSet angles;
    CouplingParams coupling;
    double P = 1;
    double kappa = 2;
    LinkBudget budget;
    EhModel eh;
    OverheadModel overhead;
    SchemeChoice scheme = SchemeChoice::Auto;
    AOConfig optimizer = {};
    AOConfig baseline = worst_case_baseline_config();
    double beam_slack = default_beam_slack;
    double n_eff = 0; ///< 0 -> Ny
    std::size_t trials = 10000;            ///< channel draws for energy statistics
    std::size_t worst_case_trials = 20;    ///< channel draws per worst-ER comparison point
    std::size_t heatmap_trials = 2000;     ///< channel draws per heat-map cell
    std::size_t ers = 16;
    std::uint64_t seed = 1;
    std::string output = "results";
    unsigned threads = 1;

    double effective_n_eff() const { return n_eff > 0 ? n_eff : static_cast<double>(geometry.Ny); }

    /// Throws ConfigError listing every violated field.
    void validate() const;
};

/// Defaults, with the seed taken from IRSWET_SEED when set.
ScenarioConfig default_config();

/// Applies a YAML document (or a JSON run manifest carrying a "config" object)
/// on top of `cfg`. Unknown sections and keys are rejected.
void apply_config_text(ScenarioConfig& cfg, const std::string& text, const std::string& origin);
void apply_config_file(ScenarioConfig& cfg, const std::string& path);

/// `section.key=value` assignment, same parsing rules as the file.
void apply_override(ScenarioConfig& cfg, const std::string& assignment);

/// Canonical JSON text of every result-affecting field (output path and
/// thread count excluded), keys sorted.
std::string canonical_json(const ScenarioConfig& cfg);

/// Every field, output path and thread count included; loadable by
/// apply_config_text().
std::string config_document(const ScenarioConfig& cfg);

/// FNV-1a 64 of canonical_json(), 16 hex digits.
std::string config_hash(const ScenarioConfig& cfg);

/// Angle literal: plain radians, "<x>pi" or "<x>deg".
double parse_angle(const std::string& text);

} // namespace irswet
