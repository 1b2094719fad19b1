#include "irswet/config.hpp"

#include "json.hpp"
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace irswet {

namespace {

std::string join_issues(const std::vector<std::string>& issues)
{
    std::string s = "invalid configuration:";
    for (const auto& i : issues) s += "\n  " + i;
    return s;
}

std::string trim(std::string s)
{
    auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
    return s;
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Thrown by the value parsers; turned into a field diagnostic by the caller.
struct BadValue {
    std::string expected;
};

double parse_double(const std::string& raw)
{
    const std::string t = lower(trim(raw));
    if (t == "inf" || t == "+inf" || t == ".inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf" || t == "-.inf") return -std::numeric_limits<double>::infinity();
    double v = 0;
    const char* first = t.data();
    if (!t.empty() && t[0] == '+') ++first;
    const auto r = std::from_chars(first, t.data() + t.size(), v);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) throw BadValue{"number"};
    return v;
}

long long parse_int(const std::string& raw)
{
    const std::string t = trim(raw);
    long long v = 0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) throw BadValue{"integer"};
    return v;
}

std::uint64_t parse_u64(const std::string& raw)
{
    const std::string t = trim(raw);
    std::uint64_t v = 0;
    int base = 10;
    const char* first = t.data();
    if (t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) {
        base = 16;
        first += 2;
    }
    const auto r = std::from_chars(first, t.data() + t.size(), v, base);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) throw BadValue{"unsigned integer"};
    return v;
}

bool parse_bool(const std::string& raw)
{
    const std::string t = lower(trim(raw));
    if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
    if (t == "false" || t == "no" || t == "off" || t == "0") return false;
    throw BadValue{"boolean"};
}

nlohmann::json num(double x)
{
    if (std::isfinite(x)) return x;
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

using Setter = std::function<void(ScenarioConfig&, const std::string&)>;
using Getter = std::function<nlohmann::json(const ScenarioConfig&)>;

struct Field {
    std::string section;
    std::string key;
    Setter set;
    Getter get;
    bool hashed = true;
};

template <class T>
Field real(std::string sec, std::string key, T ScenarioConfig::*part, double T::*member)
{
    return {sec, key, [=](ScenarioConfig& c, const std::string& v) { (c.*part).*member = parse_double(v); },
            [=](const ScenarioConfig& c) { return num((c.*part).*member); }};
}

template <class T>
Field angle(std::string sec, std::string key, T ScenarioConfig::*part, double T::*member)
{
    return {sec, key, [=](ScenarioConfig& c, const std::string& v) { (c.*part).*member = parse_angle(v); },
            [=](const ScenarioConfig& c) { return num((c.*part).*member); }};
}

template <class T, class I>
Field integer(std::string sec, std::string key, T ScenarioConfig::*part, I T::*member)
{
    return {sec, key,
            [=](ScenarioConfig& c, const std::string& v) {
                const long long x = parse_int(v);
                if (x < std::numeric_limits<I>::min() || x > std::numeric_limits<I>::max()) throw BadValue{"integer in range"};
                (c.*part).*member = static_cast<I>(x);
            },
            [=](const ScenarioConfig& c) { return static_cast<long long>((c.*part).*member); }};
}

template <class T>
Field flag(std::string sec, std::string key, T ScenarioConfig::*part, bool T::*member)
{
    return {sec, key, [=](ScenarioConfig& c, const std::string& v) { (c.*part).*member = parse_bool(v); },
            [=](const ScenarioConfig& c) { return (c.*part).*member; }};
}

void add_ao_fields(std::vector<Field>& f, const std::string& sec, AOConfig ScenarioConfig::*part)
{
    f.push_back(integer(sec, "grid_points", part, &AOConfig::grid_points));
    f.push_back(real(sec, "refine_tol", part, &AOConfig::refine_tol));
    f.push_back(real(sec, "sweep_tol", part, &AOConfig::sweep_tol));
    f.push_back(integer(sec, "max_sweeps", part, &AOConfig::max_sweeps));
    f.push_back(integer(sec, "restarts", part, &AOConfig::restarts));
    f.push_back(flag(sec, "warm_start", part, &AOConfig::warm_start));
    f.push_back({sec, "seed", [=](ScenarioConfig& c, const std::string& v) { (c.*part).seed = parse_u64(v); },
                 [=](const ScenarioConfig& c) { return (c.*part).seed; }});
}

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = [] {
        using S = ScenarioConfig;
        std::vector<Field> f;
        f.push_back(integer("geometry", "M", &S::geometry, &ArrayGeometry::M));
        f.push_back(integer("geometry", "Nx", &S::geometry, &ArrayGeometry::Nx));
        f.push_back(integer("geometry", "Ny", &S::geometry, &ArrayGeometry::Ny));
        f.push_back(real("geometry", "spacing_ratio", &S::geometry, &ArrayGeometry::spacing_ratio));
        f.push_back(angle("angles", "phi_G", &S::angles, &AngleSet::phi_G));
        f.push_back(angle("angles", "theta_G", &S::angles, &AngleSet::theta_G));
        f.push_back(angle("angles", "gamma_G", &S::angles, &AngleSet::gamma_G));
        f.push_back(real("coupling", "beta_min", &S::coupling, &CouplingParams::beta_min));
        f.push_back(angle("coupling", "eta", &S::coupling, &CouplingParams::eta));
        f.push_back(real("coupling", "alpha", &S::coupling, &CouplingParams::alpha));
        f.push_back({"power", "P", [](S& c, const std::string& v) { c.P = parse_double(v); },
                     [](const S& c) { return num(c.P); }});
        f.push_back({"channel", "kappa", [](S& c, const std::string& v) { c.kappa = parse_double(v); },
                     [](const S& c) { return num(c.kappa); }});
        f.push_back(real("link", "ref_loss_db", &S::budget, &LinkBudget::ref_loss_db));
        f.push_back(real("link", "exp_pb_irs", &S::budget, &LinkBudget::exp_pb_irs));
        f.push_back(real("link", "exp_irs_er", &S::budget, &LinkBudget::exp_irs_er));
        f.push_back(real("link", "pb_gain_dbi", &S::budget, &LinkBudget::pb_gain_dbi));
        f.push_back(real("link", "element_gain_dbi", &S::budget, &LinkBudget::element_gain_dbi));
        f.push_back(real("link", "pb_irs_distance_m", &S::budget, &LinkBudget::pb_irs_distance_m));
        f.push_back(real("link", "charge_radius_m", &S::budget, &LinkBudget::charge_radius_m));
        f.push_back(flag("link", "blocked", &S::budget, &LinkBudget::blocked));
        f.push_back(real("harvester", "conversion", &S::eh, &EhModel::conversion));
        f.push_back(real("harvester", "sensitivity_dbm", &S::eh, &EhModel::sensitivity_dbm));
        f.push_back(real("harvester", "saturation_dbm", &S::eh, &EhModel::saturation_dbm));
        f.push_back(integer("overhead", "coherence", &S::overhead, &OverheadModel::coherence));
        f.push_back({"scheme", "selection",
                     [](S& c, const std::string& v) {
                         const std::string t = lower(trim(v));
                         if (t == "auto") c.scheme = SchemeChoice::Auto;
                         else if (t == "dm") c.scheme = SchemeChoice::DM;
                         else if (t == "om") c.scheme = SchemeChoice::OM;
                         else throw BadValue{"one of auto, dm, om"};
                     },
                     [](const S& c) { return to_string(c.scheme); }});
        add_ao_fields(f, "optimizer", &S::optimizer);
        add_ao_fields(f, "baseline", &S::baseline);
        f.push_back(integer("baseline", "smooth_stages", &S::baseline, &AOConfig::smooth_stages));
        f.push_back(real("baseline", "smooth_growth", &S::baseline, &AOConfig::smooth_growth));
        f.push_back(integer("baseline", "smooth_sweeps", &S::baseline, &AOConfig::smooth_sweeps));
        f.push_back({"beams", "slack", [](S& c, const std::string& v) { c.beam_slack = parse_double(v); },
                     [](const S& c) { return num(c.beam_slack); }});
        f.push_back({"beams", "n_eff", [](S& c, const std::string& v) { c.n_eff = parse_double(v); },
                     [](const S& c) { return num(c.n_eff); }});
        f.push_back({"run", "trials",
                     [](S& c, const std::string& v) {
                         const long long x = parse_int(v);
                         if (x < 0) throw BadValue{"non-negative integer"};
                         c.trials = static_cast<std::size_t>(x);
                     },
                     [](const S& c) { return static_cast<unsigned long long>(c.trials); }});
        auto count = [](const char* key, std::size_t ScenarioConfig::*m) {
            return Field{"run", key,
                         [=](S& c, const std::string& v) {
                             const long long x = parse_int(v);
                             if (x < 0) throw BadValue{"non-negative integer"};
                             c.*m = static_cast<std::size_t>(x);
                         },
                         [=](const S& c) { return static_cast<unsigned long long>(c.*m); }};
        };
        f.push_back(count("worst_case_trials", &S::worst_case_trials));
        f.push_back(count("heatmap_trials", &S::heatmap_trials));
        f.push_back({"run", "ers",
                     [](S& c, const std::string& v) {
                         const long long x = parse_int(v);
                         if (x < 0) throw BadValue{"non-negative integer"};
                         c.ers = static_cast<std::size_t>(x);
                     },
                     [](const S& c) { return static_cast<unsigned long long>(c.ers); }});
        f.push_back({"run", "seed", [](S& c, const std::string& v) { c.seed = parse_u64(v); },
                     [](const S& c) { return c.seed; }});
        f.push_back({"run", "output", [](S& c, const std::string& v) { c.output = trim(v); },
                     [](const S& c) { return c.output; }, false});
        f.push_back({"run", "threads",
                     [](S& c, const std::string& v) {
                         const long long x = parse_int(v);
                         if (x < 0 || x > 4096) throw BadValue{"integer in [0, 4096]"};
                         c.threads = static_cast<unsigned>(x);
                     },
                     [](const S& c) { return c.threads; }, false});
        return f;
    }();
    return table;
}

const Field* find_field(const std::string& section, const std::string& key)
{
    for (const auto& f : fields())
        if (f.section == section && f.key == key) return &f;
    return nullptr;
}

bool known_section(const std::string& section)
{
    return std::any_of(fields().begin(), fields().end(), [&](const Field& f) { return f.section == section; });
}

void assign(ScenarioConfig& cfg, const std::string& section, const std::string& key, const std::string& value,
            const std::string& origin, std::vector<std::string>& issues)
{
    if (!known_section(section)) {
        issues.push_back(origin + ": unknown section '" + section + "'");
        return;
    }
    const Field* f = find_field(section, key);
    if (!f) {
        issues.push_back(origin + ": unknown key '" + section + "." + key + "'");
        return;
    }
    try {
        f->set(cfg, value);
    } catch (const BadValue& b) {
        issues.push_back(origin + ": " + section + "." + key + ": expected " + b.expected + ", got '" + value + "'");
    }
}

std::vector<std::string> check(const ScenarioConfig& c)
{
    std::vector<std::string> issues;
    auto guard = [&](const std::string& where, auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            issues.push_back(where + ": " + e.what());
        }
    };
    guard("geometry", [&] { c.geometry.validate(); });
    guard("angles", [&] { c.angles.validate(); });
    guard("coupling", [&] { c.coupling.validate(); });
    guard("link", [&] { c.budget.validate(); });
    guard("harvester", [&] { c.eh.validate(); });
    guard("overhead", [&] { c.overhead.validate(); });
    guard("optimizer", [&] { c.optimizer.validate(); });
    guard("baseline", [&] { c.baseline.validate(); });
    if (!(c.P > 0) || !std::isfinite(c.P)) issues.push_back("power.P: must be positive and finite");
    if (!(c.kappa >= 0)) issues.push_back("channel.kappa: must be non-negative");
    if (!(c.beam_slack >= 0 && c.beam_slack < 1 / std::sqrt(2.0))) issues.push_back("beams.slack: must lie in [0, 1/sqrt(2))");
    if (!(c.n_eff == 0 || c.n_eff >= 2) || !std::isfinite(c.n_eff)) issues.push_back("beams.n_eff: must be 0 (use Ny) or >= 2");
    if (c.trials < 1) issues.push_back("run.trials: must be >= 1");
    if (c.worst_case_trials < 1) issues.push_back("run.worst_case_trials: must be >= 1");
    if (c.heatmap_trials < 1) issues.push_back("run.heatmap_trials: must be >= 1");
    if (c.ers < 1) issues.push_back("run.ers: must be >= 1");
    if (c.output.empty()) issues.push_back("run.output: must not be empty");
    return issues;
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> issues) : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

const char* to_string(SchemeChoice s)
{
    switch (s) {
    case SchemeChoice::Auto: return "auto";
    case SchemeChoice::DM: return "dm";
    case SchemeChoice::OM: return "om";
    }
    return "?";
}

void ScenarioConfig::validate() const
{
    auto issues = check(*this);
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

ScenarioConfig default_config()
{
    ScenarioConfig cfg;
    if (const char* env = std::getenv("IRSWET_SEED"); env && *env) {
        try {
            cfg.seed = parse_u64(env);
        } catch (const BadValue&) {
            throw ConfigError({std::string("IRSWET_SEED: expected unsigned integer, got '") + env + "'"});
        }
    }
    return cfg;
}

double parse_angle(const std::string& text)
{
    const std::string t = lower(trim(text));
    auto scaled = [&](std::size_t suffix, double factor) {
        const std::string head = trim(t.substr(0, t.size() - suffix));
        if (head.empty() || head == "+") return factor;
        if (head == "-") return -factor;
        return parse_double(head) * factor;
    };
    if (t.size() >= 2 && t.ends_with("pi")) return scaled(2, pi);
    if (t.size() >= 3 && t.ends_with("deg")) return scaled(3, pi / 180);
    return parse_double(t);
}

void apply_config_text(ScenarioConfig& cfg, const std::string& text, const std::string& origin)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError({origin + ": parse error: " + e.what()});
    }
    if (root.IsNull()) return;
    if (!root.IsMap()) throw ConfigError({origin + ": top level must be a mapping of sections"});
    if (root["schema_version"] && root["config"]) root = root["config"];

    std::vector<std::string> issues;
    ScenarioConfig next = cfg;
    for (const auto& sec : root) {
        const std::string section = sec.first.as<std::string>();
        if (!sec.second.IsMap()) {
            issues.push_back(origin + ": section '" + section + "' must be a mapping");
            continue;
        }
        for (const auto& kv : sec.second) {
            const std::string key = kv.first.as<std::string>();
            if (!kv.second.IsScalar()) {
                issues.push_back(origin + ": " + section + "." + key + ": expected a scalar value");
                continue;
            }
            assign(next, section, key, kv.second.Scalar(), origin, issues);
        }
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));
    cfg = std::move(next);
}

void apply_config_file(ScenarioConfig& cfg, const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError({path + ": cannot open"});
    std::ostringstream ss;
    ss << in.rdbuf();
    apply_config_text(cfg, ss.str(), path);
}

void apply_override(ScenarioConfig& cfg, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
        throw ConfigError({"--set '" + assignment + "': expected section.key=value"});
    std::vector<std::string> issues;
    assign(cfg, trim(assignment.substr(0, dot)), trim(assignment.substr(dot + 1, eq - dot - 1)), assignment.substr(eq + 1),
           "--set", issues);
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

std::string canonical_json(const ScenarioConfig& cfg)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& f : fields())
        if (f.hashed) j[f.section][f.key] = f.get(cfg);
    return j.dump();
}

std::string config_document(const ScenarioConfig& cfg)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& f : fields()) j[f.section][f.key] = f.get(cfg);
    return j.dump();
}

std::string config_hash(const ScenarioConfig& cfg)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_json(cfg)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace irswet
