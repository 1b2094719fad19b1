#include "irswet/config.hpp"
#include "irswet/experiments.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct Flags {
    std::string config_path;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<unsigned> threads;
    std::optional<double> n_eff;
    std::optional<std::string> output;
    bool quick = false;
    bool print_config = false;
};

void add_flags(CLI::App& sub, Flags& f)
{
    sub.add_option("-c,--config", f.config_path, "YAML config file or a previous run manifest");
    sub.add_option("--set", f.sets, "override, section.key=value (repeatable)");
    sub.add_option("--seed", f.seed, "base seed (default: IRSWET_SEED or 1)");
    sub.add_option("--trials", f.trials, "channel draws for energy statistics");
    sub.add_option("--threads", f.threads, "worker cap, 0 = all cores");
    sub.add_option("--n-eff", f.n_eff, "effective aperture for beam widths (default Ny)");
    sub.add_option("-o,--output", f.output, "output directory");
    sub.add_flag("--quick", f.quick, "reduced sizes");
    sub.add_flag("--print-config", f.print_config, "print the resolved config and exit");
}

irswet::ScenarioConfig resolve(const Flags& f)
{
    irswet::ScenarioConfig cfg = irswet::default_config();
    if (!f.config_path.empty()) irswet::apply_config_file(cfg, f.config_path);
    std::vector<std::string> issues;
    for (const auto& s : f.sets) {
        try {
            irswet::apply_override(cfg, s);
        } catch (const irswet::ConfigError& e) {
            issues.insert(issues.end(), e.issues().begin(), e.issues().end());
        }
    }
    if (!issues.empty()) throw irswet::ConfigError(std::move(issues));
    if (f.seed) cfg.seed = *f.seed;
    if (f.trials) cfg.trials = *f.trials;
    if (f.threads) cfg.threads = *f.threads;
    if (f.n_eff) cfg.n_eff = *f.n_eff;
    if (f.output) cfg.output = *f.output;
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simulator for IRS-assisted wireless energy transfer without channel state information"};
    app.require_subcommand(1);
    Flags flags;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"coupling-sweep", "amplitude-phase coupling curves"},
        {"tau-fit", "optimised E_eq versus N and the fitted tau"},
        {"energy-dist", "received-energy distribution, Monte Carlo against theory"},
        {"energy-vs-distance", "mean received and harvested power versus ER distance"},
        {"beam-plan", "rotation schedule from half-power beam widths"},
        {"heatmap", "time-averaged harvested power over the charging area"},
        {"vs-N", "worst-ER comparison of CSI-free rotation and the CSI-based baseline versus N"},
        {"vs-K", "worst-ER comparison versus the number of ERs"},
        {"validate", "property checks; exit status 1 on any failure"}};
    for (const auto& [name, help] : commands) add_flags(*app.add_subcommand(name, help), flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        const irswet::ScenarioConfig cfg = resolve(flags);
        if (flags.print_config) {
            std::cout << irswet::config_document(cfg) << "\nconfig_hash=" << irswet::config_hash(cfg) << "\n";
            return 0;
        }
        irswet::RunOptions opts;
        opts.quick = flags.quick;
        const irswet::ExperimentOutput out = irswet::run_experiment(command, cfg, opts);
        for (const auto& path : irswet::write_outputs(out, cfg)) std::cout << path << "\n";
        if (!out.passed) {
            std::cerr << command << ": one or more checks failed\n";
            return 1;
        }
    } catch (const irswet::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return 3;
    }
    return 0;
}
