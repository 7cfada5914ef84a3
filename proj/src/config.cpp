#include "contgrow/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace contgrow {

const std::vector<std::string> kExperimentKinds = {
    "simulate", "estimate-mu", "shape-check", "coexist",
    "couple-check", "brw-speed", "effective-count"};

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

const char* const kKnownKeys[] = {
    "kind", "d", "mode", "lambda1", "lambda2", "radius.family", "radius.r", "radius.a",
    "radius.b", "radius.rate", "radius.scale", "radius.shape", "allow_inadmissible", "horizon",
    "max_events", "seed", "replicas", "stripe.active", "stripe.b", "covering.resolution",
    "cell.side", "initial1", "initial2", "mu.distances", "shape.t", "shape.directions",
    "shape.max_deviation", "shape.replicas", "coexist.window", "couple.kind", "couple.lambda",
    "couple.lambdas", "couple.audit_points", "brw.population_cap", "brw.iid_ancestor",
    "region.radius"};

bool known_key(const std::string& k) {
    for (const char* key : kKnownKeys)
        if (k == key) return true;
    return false;
}

struct Reader {
    const std::map<std::string, std::string>& entries;
    std::vector<std::string>& errors;

    bool has(const std::string& key) const { return entries.count(key) > 0; }

    std::string str(const std::string& key, const std::string& fallback) const {
        const auto it = entries.find(key);
        return it == entries.end() ? fallback : it->second;
    }

    double num(const std::string& key, double fallback) {
        const auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            errors.push_back("key '" + key + "': not a number: '" + it->second + "'");
            return fallback;
        }
    }

    long integer(const std::string& key, long fallback) {
        const double v = num(key, static_cast<double>(fallback));
        if (v != std::floor(v)) {
            errors.push_back("key '" + key + "': expected an integer");
            return fallback;
        }
        return static_cast<long>(v);
    }

    bool boolean(const std::string& key, bool fallback) {
        const auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        errors.push_back("key '" + key + "': expected true/false: '" + it->second + "'");
        return fallback;
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        const auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        std::vector<double> out;
        std::stringstream ss(it->second);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            try {
                out.push_back(std::stod(tok));
            } catch (const std::exception&) {
                errors.push_back("key '" + key + "': not a number list: '" + it->second + "'");
                return fallback;
            }
        }
        if (out.empty()) {
            errors.push_back("key '" + key + "': empty list");
            return fallback;
        }
        return out;
    }

    // balls as "x1 x2 ... xd r" groups separated by ';'
    std::vector<Ball> balls(const std::string& key, std::size_t d) {
        std::vector<Ball> out;
        const auto it = entries.find(key);
        if (it == entries.end()) return out;
        std::stringstream groups(it->second);
        std::string group;
        while (std::getline(groups, group, ';')) {
            group = trim(group);
            if (group.empty()) continue;
            std::stringstream ss(group);
            std::vector<double> vals;
            double v;
            while (ss >> v) vals.push_back(v);
            if (vals.size() != d + 1) {
                errors.push_back("key '" + key + "': each ball needs " + std::to_string(d) +
                                 " coordinates and a radius: '" + group + "'");
                continue;
            }
            Ball b;
            b.center.assign(vals.begin(), vals.end() - 1);
            b.radius = vals.back();
            if (!(b.radius > 0.0)) {
                errors.push_back("key '" + key + "': ball radius must be > 0: '" + group + "'");
                continue;
            }
            out.push_back(std::move(b));
        }
        return out;
    }
};

std::optional<RadiusDistribution> read_radius(Reader& r) {
    const std::string family = r.str("radius.family", "deterministic");
    try {
        if (family == "deterministic")
            return RadiusDistribution::deterministic(r.num("radius.r", 1.0));
        if (family == "uniform")
            return RadiusDistribution::uniform(r.num("radius.a", 0.5), r.num("radius.b", 1.5));
        if (family == "exponential")
            return RadiusDistribution::exponential(r.num("radius.rate", 1.0));
        if (family == "pareto")
            return RadiusDistribution::pareto(r.num("radius.scale", 1.0),
                                              r.num("radius.shape", 3.0));
        r.errors.push_back("key 'radius.family': unknown family '" + family + "'");
    } catch (const std::exception& e) {
        r.errors.push_back(std::string("radius parameters: ") + e.what());
    }
    return std::nullopt;
}

}  // namespace

ProcessConfig ExperimentSpec::process_config() const {
    ProcessConfig cfg(*radius);
    cfg.d = d;
    cfg.mode = mode;
    cfg.lambda1 = lambda1;
    cfg.lambda2 = mode == GrowthMode::one_type ? 0.0 : lambda2;
    cfg.horizon_time = horizon;
    cfg.max_events = max_events;
    cfg.seed = seed;
    cfg.stripe = stripe;
    cfg.covering_resolution = covering_resolution;
    cfg.cell_side = cell_side;
    cfg.initial_1 = initial1;
    cfg.initial_2 = mode == GrowthMode::one_type ? std::vector<Ball>{} : initial2;
    cfg.allow_inadmissible = allow_inadmissible;
    return cfg;
}

ParseOutcome parse_spec(const std::string& text) {
    ParseOutcome out;
    std::map<std::string, std::string> entries;
    std::map<std::string, long> first_line;
    std::vector<std::string>& errors = out.errors;

    std::stringstream ss(text);
    std::string line;
    long lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            errors.push_back("line " + std::to_string(lineno) + ": empty key or value");
            continue;
        }
        if (!known_key(key)) {
            errors.push_back("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
            continue;
        }
        if (entries.count(key)) {
            errors.push_back("duplicate key '" + key + "' (lines " +
                             std::to_string(first_line[key]) + " and " + std::to_string(lineno) +
                             ")");
            continue;
        }
        entries[key] = value;
        first_line[key] = lineno;
    }

    ExperimentSpec spec;
    Reader r{entries, errors};

    spec.kind = r.str("kind", "");
    if (spec.kind.empty()) {
        errors.push_back("missing required key 'kind'");
    } else if (std::find(kExperimentKinds.begin(), kExperimentKinds.end(), spec.kind) ==
               kExperimentKinds.end()) {
        errors.push_back("unknown kind '" + spec.kind + "'");
    }

    spec.d = static_cast<std::size_t>(r.integer("d", 2));
    if (spec.d < 1 || spec.d > 16) errors.push_back("key 'd': dimension must be in [1, 16]");

    const bool two_type_default = spec.kind == "coexist" || spec.kind == "couple-check" ||
                                  spec.kind == "effective-count" || spec.kind == "simulate";
    const std::string mode = r.str("mode", two_type_default ? "two_type" : "one_type");
    if (mode == "one_type") spec.mode = GrowthMode::one_type;
    else if (mode == "two_type") spec.mode = GrowthMode::two_type;
    else errors.push_back("key 'mode': expected one_type or two_type");

    spec.lambda1 = r.num("lambda1", 1.0);
    spec.lambda2 = r.num("lambda2", spec.mode == GrowthMode::two_type ? 1.0 : 0.0);
    if (spec.lambda1 < 0.0 || spec.lambda2 < 0.0) errors.push_back("rates must be >= 0");
    if (!(spec.lambda1 > 0.0) && !(spec.mode == GrowthMode::two_type && spec.lambda2 > 0.0))
        errors.push_back("at least one rate must be > 0");

    spec.allow_inadmissible = r.boolean("allow_inadmissible", false);
    spec.radius = read_radius(r);
    if (spec.radius && !spec.radius->mgf_exists() && !spec.allow_inadmissible)
        errors.push_back("radius family '" + spec.radius->family_name() +
                         "' lacks the required exponential tail moment; set allow_inadmissible "
                         "= true to override");

    spec.horizon = r.num("horizon", 10.0);
    if (!(spec.horizon > 0.0)) errors.push_back("key 'horizon': must be > 0");
    spec.max_events = r.integer("max_events", 1000000);
    if (spec.max_events < 1) errors.push_back("key 'max_events': must be >= 1");
    spec.seed = static_cast<std::uint64_t>(r.integer("seed", 1));
    spec.replicas = r.integer("replicas", 200);
    if (spec.replicas < 1) errors.push_back("key 'replicas': must be >= 1");

    spec.stripe.active = r.boolean("stripe.active", false);
    spec.stripe.b = r.num("stripe.b", 2.0);
    if (spec.stripe.active && !(spec.stripe.b > 0.0))
        errors.push_back("key 'stripe.b': must be > 0 when the stripe is active");

    spec.covering_resolution = r.num("covering.resolution", 0.0);
    if (spec.covering_resolution < 0.0)
        errors.push_back("key 'covering.resolution': must be >= 0");
    spec.cell_side = r.num("cell.side", 0.0);
    if (spec.cell_side < 0.0) errors.push_back("key 'cell.side': must be >= 0");

    spec.initial1 = r.balls("initial1", spec.d);
    spec.initial2 = r.balls("initial2", spec.d);
    if (spec.mode == GrowthMode::one_type && r.has("initial2"))
        errors.push_back("key 'initial2': not allowed in one_type mode");

    spec.mu_distances = r.numbers("mu.distances", spec.mu_distances);
    for (double n : spec.mu_distances)
        if (!(n > 0.0)) errors.push_back("key 'mu.distances': distances must be > 0");
    spec.shape_t = r.num("shape.t", spec.shape_t);
    spec.shape_directions = r.integer("shape.directions", spec.shape_directions);
    spec.shape_max_deviation = r.num("shape.max_deviation", spec.shape_max_deviation);
    spec.shape_replicas = r.integer("shape.replicas", spec.shape_replicas);
    spec.coexist_window = r.num("coexist.window", spec.coexist_window);
    if (spec.kind == "coexist" &&
        !(spec.coexist_window > 0.0 && spec.coexist_window < spec.horizon))
        errors.push_back("key 'coexist.window': need 0 < window < horizon");

    spec.couple_kind = r.str("couple.kind", "all");
    bool couple_kind_ok = false;
    for (const char* k : {"all", "subset", "union", "domination", "family"})
        if (spec.couple_kind == k) couple_kind_ok = true;
    if (!couple_kind_ok)
        errors.push_back("key 'couple.kind': expected all|subset|union|domination|family");
    spec.couple_lambda = r.num("couple.lambda", spec.couple_lambda);
    if (spec.couple_lambda < 0.0 || spec.couple_lambda > 1.0)
        errors.push_back("key 'couple.lambda': must be in [0,1]");
    spec.couple_lambdas = r.numbers("couple.lambdas", spec.couple_lambdas);
    spec.audit_points = r.integer("couple.audit_points", spec.audit_points);
    spec.population_cap = r.integer("brw.population_cap", spec.population_cap);
    spec.iid_ancestor = r.boolean("brw.iid_ancestor", false);
    spec.region_radius = r.num("region.radius", spec.region_radius);
    if (!(spec.region_radius > 0.0)) errors.push_back("key 'region.radius': must be > 0");

    if (!errors.empty()) return out;
    spec.entries = std::move(entries);
    out.spec = std::move(spec);
    return out;
}

std::string canonical_spec(const ExperimentSpec& spec) {
    std::ostringstream os;
    for (const auto& [k, v] : spec.entries) os << k << " = " << v << '\n';
    return os.str();
}

std::string config_hash(const ExperimentSpec& spec) {
    const std::string canon = canonical_spec(spec);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::string manifest_text(const ExperimentSpec& spec, double wall_time_s) {
    std::ostringstream os;
    os << "# manifest\n";
    os << "# config_hash = " << config_hash(spec) << '\n';
    os << "# wall_time_s = " << wall_time_s << '\n';
    os << canonical_spec(spec);
    return os.str();
}

}  // namespace contgrow
