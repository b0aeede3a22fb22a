#include "nashflow/config.hpp"

#include "nashflow/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace nashflow {

ConfigError::ConfigError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_key_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

/// Cuts a trailing comment, ignoring '#' inside quoted strings.
std::string_view strip_comment(std::string_view line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_string && c == '\\') {
            ++i;
        } else if (c == '"') {
            in_string = !in_string;
        } else if (c == '#' && !in_string) {
            return line.substr(0, i);
        }
    }
    return line;
}

double parse_number(std::string_view tok, int line) {
    std::string s(tok);
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    for (char& c : s)
        if (c == '_') c = ' ';
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    if (s.empty()) throw ConfigError(line, "empty value");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || std::isnan(v)) {
        throw ConfigError(line, "cannot parse '" + std::string(tok) + "' as a number, string, boolean or array");
    }
    return v;
}

std::string parse_string(std::string_view tok, int line) {
    // tok starts and ends with '"'
    std::string out;
    for (std::size_t i = 1; i + 1 < tok.size(); ++i) {
        char c = tok[i];
        if (c == '\\') {
            if (i + 2 >= tok.size()) throw ConfigError(line, "dangling escape in string");
            const char e = tok[++i];
            switch (e) {
                case 'n': c = '\n'; break;
                case 't': c = '\t'; break;
                case '"': c = '"'; break;
                case '\\': c = '\\'; break;
                default: throw ConfigError(line, std::string("unknown escape \\") + e);
            }
        } else if (c == '"') {
            throw ConfigError(line, "unexpected quote inside string");
        }
        out.push_back(c);
    }
    return out;
}

ConfigValue parse_value(std::string_view tok, int line) {
    tok = trim(tok);
    if (tok.empty()) throw ConfigError(line, "missing value");
    if (tok.front() == '"') {
        if (tok.size() < 2 || tok.back() != '"') throw ConfigError(line, "unterminated string");
        return parse_string(tok, line);
    }
    if (tok == "true") return true;
    if (tok == "false") return false;
    if (tok.front() == '[') {
        if (tok.back() != ']') throw ConfigError(line, "unterminated array (arrays must fit on one line)");
        std::vector<double> items;
        std::string_view body = trim(tok.substr(1, tok.size() - 2));
        while (!body.empty()) {
            const auto comma = body.find(',');
            const auto item = trim(body.substr(0, comma));
            if (item.empty()) {
                if (comma == std::string_view::npos) break;
                throw ConfigError(line, "empty array element");
            }
            items.push_back(parse_number(item, line));
            if (comma == std::string_view::npos) break;
            body = trim(body.substr(comma + 1));
        }
        return items;
    }
    return parse_number(tok, line);
}

}  // namespace

ConfigDocument ConfigDocument::parse(std::string_view text) {
    ConfigDocument doc;
    std::string table;
    std::set<std::string> tables_seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_no, "malformed table header");
            const auto name = trim(line.substr(1, line.size() - 2));
            if (name.empty() || !std::all_of(name.begin(), name.end(), is_key_char)) {
                throw ConfigError(line_no, "invalid table name '" + std::string(name) + "'");
            }
            table = std::string(name);
            if (!tables_seen.insert(table).second) throw ConfigError(line_no, "table [" + table + "] defined twice");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        if (key.empty() || !std::all_of(key.begin(), key.end(), is_key_char)) {
            throw ConfigError(line_no, "invalid key '" + std::string(key) + "'");
        }
        const std::string full = table.empty() ? std::string(key) : table + "." + std::string(key);
        if (doc.entries_.count(full)) throw ConfigError(line_no, "duplicate key '" + full + "'");
        doc.entries_.emplace(full, ConfigEntry{parse_value(line.substr(eq + 1), line_no), line_no});
    }
    return doc;
}

const ConfigEntry* ConfigDocument::find(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

int ExperimentConfig::line_of(const std::string& key) const {
    const auto it = lines.find(key);
    return it == lines.end() ? 0 : it->second;
}

std::string_view to_string(GraphKind k) noexcept {
    switch (k) {
        case GraphKind::Path: return "path";
        case GraphKind::Cycle: return "cycle";
        case GraphKind::Complete: return "complete";
        case GraphKind::Random: return "random";
        case GraphKind::EdgeList: return "edge-list";
    }
    return "unknown";
}

namespace {

const std::set<std::string> kKnownKeys = {
    "name",
    "description",
    "game.kind",
    "game.n_players",
    "game.cost_coeffs",
    "game.cost_base",
    "game.cost_step",
    "game.demand_intercept",
    "game.demand",
    "graph.kind",
    "graph.edge_prob",
    "graph.seed",
    "graph.file",
    "dynamics.variant",
    "dynamics.eps_inv",
    "dynamics.action_gain",
    "constraints.omega",
    "constraints.lo",
    "constraints.hi",
    "integrator.scheme",
    "integrator.dt",
    "integrator.t_end",
    "integrator.record_every",
    "integrator.stop_residual",
    "initial.actions",
    "initial.estimates",
    "initial.seed",
    "output.csv",
    "output.summary",
};

class Reader {
public:
    Reader(const ConfigDocument& doc, ExperimentConfig& cfg) : doc_(doc), cfg_(cfg) {}

    const ConfigEntry* get(const std::string& key) {
        const ConfigEntry* e = doc_.find(key);
        if (e) cfg_.lines[key] = e->line;
        return e;
    }

    std::optional<std::string> str(const std::string& key) {
        const auto* e = get(key);
        if (!e) return std::nullopt;
        if (const auto* s = std::get_if<std::string>(&e->value)) return *s;
        throw ConfigError(e->line, key + " must be a string");
    }

    std::optional<double> num(const std::string& key) {
        const auto* e = get(key);
        if (!e) return std::nullopt;
        if (const auto* d = std::get_if<double>(&e->value)) return *d;
        throw ConfigError(e->line, key + " must be a number");
    }

    std::optional<long long> integer(const std::string& key, long long min_value) {
        const auto v = num(key);
        if (!v) return std::nullopt;
        const int line = cfg_.line_of(key);
        if (std::floor(*v) != *v || !std::isfinite(*v)) throw ConfigError(line, key + " must be an integer");
        if (*v < static_cast<double>(min_value) || *v > 9.0e15) {
            throw ConfigError(line, key + " must be an integer >= " + std::to_string(min_value));
        }
        return static_cast<long long>(*v);
    }

    std::optional<std::vector<double>> array(const std::string& key) {
        const auto* e = get(key);
        if (!e) return std::nullopt;
        if (const auto* a = std::get_if<std::vector<double>>(&e->value)) return *a;
        throw ConfigError(e->line, key + " must be an array of numbers");
    }

    std::optional<std::pair<double, double>> range(const std::string& key) {
        const auto a = array(key);
        if (!a) return std::nullopt;
        if (a->size() != 2) throw ConfigError(cfg_.line_of(key), key + " must be a two-element array [lo, hi]");
        return std::pair{(*a)[0], (*a)[1]};
    }

    int line(const std::string& key) const { return cfg_.line_of(key); }

private:
    const ConfigDocument& doc_;
    ExperimentConfig& cfg_;
};

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())); }

}  // namespace

ExperimentConfig parse_experiment(std::string_view text, std::filesystem::path base_dir) {
    const ConfigDocument doc = ConfigDocument::parse(text);
    for (const auto& [key, entry] : doc.entries()) {
        if (!kKnownKeys.count(key)) throw ConfigError(entry.line, "unknown key '" + key + "'");
    }

    ExperimentConfig cfg;
    cfg.base_dir = std::move(base_dir);
    Reader r(doc, cfg);

    if (auto v = r.str("name")) cfg.name = *v;
    if (auto v = r.str("description")) cfg.description = *v;

    if (auto v = r.str("game.kind")) cfg.game.kind = *v;
    if (auto v = r.integer("game.n_players", 1)) cfg.game.n_players = static_cast<int>(*v);
    if (auto v = r.array("game.cost_coeffs")) cfg.game.cost_coeffs = to_vector(*v);
    cfg.game.cost_base = r.num("game.cost_base");
    cfg.game.cost_step = r.num("game.cost_step");
    cfg.game.demand_intercept = r.num("game.demand_intercept");
    if (auto v = r.str("game.demand")) {
        if (*v == "linear") {
            cfg.game.demand = DemandKind::LinearSum;
        } else if (*v == "square-sum") {
            cfg.game.demand = DemandKind::SquareSum;
        } else {
            throw ConfigError(r.line("game.demand"), "game.demand must be \"linear\" or \"square-sum\"");
        }
    }

    if (auto v = r.str("graph.kind")) {
        static const std::map<std::string, GraphKind> kinds = {{"path", GraphKind::Path},
                                                               {"cycle", GraphKind::Cycle},
                                                               {"complete", GraphKind::Complete},
                                                               {"random", GraphKind::Random},
                                                               {"edge-list", GraphKind::EdgeList}};
        const auto it = kinds.find(*v);
        if (it == kinds.end()) {
            throw ConfigError(r.line("graph.kind"), "graph.kind must be one of path, cycle, complete, random, edge-list");
        }
        cfg.graph.kind = it->second;
    }
    if (auto v = r.num("graph.edge_prob")) cfg.graph.edge_prob = *v;
    if (auto v = r.integer("graph.seed", 0)) cfg.graph.seed = static_cast<std::uint64_t>(*v);
    if (auto v = r.str("graph.file")) cfg.graph.file = *v;

    if (auto v = r.str("dynamics.variant")) {
        const auto variant = parse_variant(*v);
        if (!variant) {
            throw ConfigError(r.line("dynamics.variant"),
                              "unknown dynamics.variant '" + *v +
                                  "' (perfect-info, augmented, augmented-eps, projected-perfect, "
                                  "projected-augmented, projected-augmented-eps)");
        }
        cfg.variant = *variant;
    }
    if (auto v = r.num("dynamics.eps_inv")) cfg.eps_inv = *v;
    if (auto v = r.str("dynamics.action_gain")) {
        cfg.action_gain = parse_action_gain(*v);
        if (!cfg.action_gain) throw ConfigError(r.line("dynamics.action_gain"), "dynamics.action_gain must be unit or scaled");
    }

    if (const auto* e = r.get("constraints.omega")) {
        if (const auto* s = std::get_if<std::string>(&e->value)) {
            if (*s != "unbounded") throw ConfigError(e->line, "constraints.omega must be [lo, hi] or \"unbounded\"");
        } else {
            cfg.constraints.omega = r.range("constraints.omega");
        }
    }
    if (auto v = r.array("constraints.lo")) cfg.constraints.lo = to_vector(*v);
    if (auto v = r.array("constraints.hi")) cfg.constraints.hi = to_vector(*v);

    if (auto v = r.str("integrator.scheme")) {
        const auto scheme = parse_scheme(*v);
        if (!scheme) throw ConfigError(r.line("integrator.scheme"), "integrator.scheme must be euler, rk4 or projected-euler");
        cfg.integrator.scheme = *scheme;
    } else if (is_projected(cfg.variant)) {
        cfg.integrator.scheme = Scheme::ProjectedEuler;
    }
    if (auto v = r.num("integrator.dt")) cfg.integrator.dt = *v;
    if (auto v = r.num("integrator.t_end")) cfg.integrator.t_end = *v;
    if (auto v = r.num("integrator.record_every")) {
        if (std::floor(*v) != *v || std::abs(*v) > 2e9) {
            throw ConfigError(r.line("integrator.record_every"), "integrator.record_every must be an integer");
        }
        cfg.integrator.record_every = static_cast<int>(*v);
    }
    cfg.stop_residual = r.num("integrator.stop_residual");

    if (auto v = r.range("initial.actions")) cfg.initial.actions = *v;
    cfg.initial.estimates = r.range("initial.estimates");
    if (auto v = r.integer("initial.seed", 0)) cfg.initial.seed = static_cast<std::uint64_t>(*v);

    if (auto v = r.str("output.csv")) cfg.output.csv = *v;
    if (auto v = r.str("output.summary")) cfg.output.summary = *v;
    return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot read config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_experiment(buf.str(), path.parent_path());
}

std::string ConfigDiagnostic::to_string() const {
    std::string s;
    if (line > 0) s += "line " + std::to_string(line) + ": ";
    if (!field.empty()) s += field + ": ";
    return s + message;
}

namespace {

struct ExampleDefaults {
    int n_players;
    double cost_base;
    double cost_step;
    double demand_intercept;
    DemandKind demand;
};

std::optional<ExampleDefaults> example_defaults(const std::string& kind) {
    if (kind == "example1") return ExampleDefaults{20, 20.0, 10.0, 2200.0, DemandKind::LinearSum};
    if (kind == "example2") return ExampleDefaults{8, 10.0, 4.0, 600.0, DemandKind::SquareSum};
    if (kind == "example3") return ExampleDefaults{20, 20.0, 40.0, 1200.0, DemandKind::LinearSum};
    return std::nullopt;
}

}  // namespace

Game build_game(const ExperimentConfig& cfg) {
    const GameConfig& g = cfg.game;
    const auto defaults = example_defaults(g.kind);
    if (!defaults && g.kind != "custom-quadratic") {
        throw ConfigError(cfg.line_of("game.kind"),
                          "game.kind must be example1, example2, example3 or custom-quadratic, got '" + g.kind + "'");
    }

    AggregativeSpec spec;
    if (g.cost_coeffs) {
        if (g.cost_coeffs->size() == 0) throw ConfigError(cfg.line_of("game.cost_coeffs"), "game.cost_coeffs is empty");
        if (g.n_players && *g.n_players != g.cost_coeffs->size()) {
            throw ConfigError(cfg.line_of("game.cost_coeffs"),
                              "game.cost_coeffs has " + std::to_string(g.cost_coeffs->size()) +
                                  " entries but game.n_players = " + std::to_string(*g.n_players));
        }
        if (g.cost_base || g.cost_step) {
            throw ConfigError(cfg.line_of("game.cost_coeffs"),
                              "game.cost_coeffs cannot be combined with game.cost_base / game.cost_step");
        }
        spec.cost_coeffs = *g.cost_coeffs;
    } else {
        const bool complete = defaults || (g.n_players && g.cost_base && g.cost_step);
        if (!complete) {
            throw ConfigError(cfg.line_of("game.kind"),
                              "custom-quadratic needs game.cost_coeffs or all of game.n_players, game.cost_base, "
                              "game.cost_step");
        }
        const int n = g.n_players.value_or(defaults ? defaults->n_players : 0);
        const double base = g.cost_base.value_or(defaults ? defaults->cost_base : 0.0);
        const double step = g.cost_step.value_or(defaults ? defaults->cost_step : 0.0);
        spec.cost_coeffs = arithmetic_costs(n, base, step);
    }
    if (!spec.cost_coeffs.allFinite()) throw ConfigError(cfg.line_of("game.kind"), "cost coefficients must be finite");

    if (g.demand_intercept) {
        spec.demand_intercept = *g.demand_intercept;
    } else if (defaults) {
        spec.demand_intercept = defaults->demand_intercept;
    } else {
        throw ConfigError(cfg.line_of("game.kind"), "custom-quadratic needs game.demand_intercept");
    }
    if (!std::isfinite(spec.demand_intercept)) {
        throw ConfigError(cfg.line_of("game.demand_intercept"), "game.demand_intercept must be finite");
    }
    spec.demand = g.demand ? *g.demand : (defaults ? defaults->demand : DemandKind::LinearSum);
    return make_aggregative_game(std::move(spec));
}

CommGraph build_graph(const ExperimentConfig& cfg, int n_players) {
    const GraphConfig& g = cfg.graph;
    const int line = cfg.line_of("graph.kind");
    if (n_players < 2) throw ConfigError(line, "a communication graph needs at least 2 players");
    try {
        switch (g.kind) {
            case GraphKind::Path: return make_path(n_players);
            case GraphKind::Cycle: return make_cycle(n_players);
            case GraphKind::Complete: return make_complete(n_players);
            case GraphKind::Random:
                if (!(g.edge_prob > 0.0 && g.edge_prob <= 1.0)) {
                    throw ConfigError(cfg.line_of("graph.edge_prob"), "graph.edge_prob must lie in (0, 1]");
                }
                return make_random_connected(n_players, g.edge_prob, g.seed);
            case GraphKind::EdgeList: {
                if (g.file.empty()) throw ConfigError(line, "graph.kind = \"edge-list\" needs graph.file");
                const auto path = g.file.is_absolute() ? g.file : cfg.base_dir / g.file;
                CommGraph graph = read_edge_list(path, n_players);
                if (!graph.is_connected()) {
                    throw ConfigError(cfg.line_of("graph.file"), "graph in " + path.string() + " is not connected");
                }
                return graph;
            }
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        const int at = g.kind == GraphKind::EdgeList ? cfg.line_of("graph.file") : line;
        throw ConfigError(at, std::string("graph: ") + e.what());
    }
    throw ConfigError(line, "unknown graph kind");
}

std::optional<BoxSet> build_box(const ExperimentConfig& cfg, int n_players) {
    const ConstraintConfig& c = cfg.constraints;
    if (!c.omega && !c.lo && !c.hi) return std::nullopt;
    Vector lo = Vector::Constant(n_players, c.omega ? c.omega->first : -kInf);
    Vector hi = Vector::Constant(n_players, c.omega ? c.omega->second : kInf);
    if (c.lo) {
        if (c.lo->size() != n_players) {
            throw ConfigError(cfg.line_of("constraints.lo"), "constraints.lo needs one entry per player (" +
                                                                 std::to_string(n_players) + ")");
        }
        lo = *c.lo;
    }
    if (c.hi) {
        if (c.hi->size() != n_players) {
            throw ConfigError(cfg.line_of("constraints.hi"), "constraints.hi needs one entry per player (" +
                                                                 std::to_string(n_players) + ")");
        }
        hi = *c.hi;
    }
    try {
        return BoxSet(std::move(lo), std::move(hi));
    } catch (const std::invalid_argument&) {
        const int line = c.omega ? cfg.line_of("constraints.omega") : cfg.line_of(c.lo ? "constraints.lo" : "constraints.hi");
        throw ConfigError(line, "constraints: every lower bound must be <= its upper bound");
    }
}

std::vector<ConfigDiagnostic> validate_experiment(const ExperimentConfig& cfg) {
    std::vector<ConfigDiagnostic> out;
    auto report = [&](const std::string& field, std::string message) {
        out.push_back({cfg.line_of(field), field, std::move(message)});
    };
    auto report_error = [&](const ConfigError& e) {
        std::string msg = e.what();
        const std::string prefix = "line " + std::to_string(e.line()) + ": ";
        if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
        out.push_back({e.line(), "", std::move(msg)});
    };

    std::optional<Game> game;
    try {
        game = build_game(cfg);
    } catch (const ConfigError& e) {
        report_error(e);
    }
    const int n_players = game ? game->n_players() : 0;
    const bool augmented = is_augmented(cfg.variant);
    const bool projected = is_projected(cfg.variant);
    const bool eps_variant = cfg.variant == Variant::AugmentedEps || cfg.variant == Variant::ProjectedAugmentedEps;

    if (game && augmented) {
        try {
            (void)build_graph(cfg, n_players);
        } catch (const ConfigError& e) {
            report_error(e);
        }
    }

    std::optional<BoxSet> box;
    bool box_ok = true;
    if (game) {
        try {
            box = build_box(cfg, n_players);
        } catch (const ConfigError& e) {
            report_error(e);
            box_ok = false;
        }
    }
    if (game && box_ok) {
        if (projected && (!box || !box->is_bounded())) {
            report("dynamics.variant", "projected variant '" + std::string(to_string(cfg.variant)) +
                                           "' needs a bounded action box, but [constraints] leaves it unbounded");
        } else if (!projected && box) {
            report("dynamics.variant", "[constraints] bounds are only enforced by projected variants, not '" +
                                           std::string(to_string(cfg.variant)) + "'");
        }
    }

    if (!(cfg.eps_inv > 0.0) || !std::isfinite(cfg.eps_inv)) {
        report("dynamics.eps_inv", "dynamics.eps_inv must be a positive number");
    } else if (!eps_variant && cfg.eps_inv != 1.0) {
        report("dynamics.eps_inv", "dynamics.eps_inv only applies to augmented-eps and projected-augmented-eps");
    }
    if (cfg.action_gain && !eps_variant) {
        report("dynamics.action_gain", "dynamics.action_gain only applies to augmented-eps and projected-augmented-eps");
    }

    const IntegratorConfig& ic = cfg.integrator;
    if (!(ic.dt > 0.0) || !std::isfinite(ic.dt)) report("integrator.dt", "integrator.dt must be a positive number");
    if (!(ic.t_end > 0.0) || !std::isfinite(ic.t_end)) {
        report("integrator.t_end", "integrator.t_end must be a positive number");
    }
    if (ic.record_every < 1) report("integrator.record_every", "integrator.record_every must be >= 1");
    if (ic.dt > 0.0 && ic.t_end > 0.0 && ic.t_end / ic.dt > 1e10) {
        report("integrator.dt", "integrator.dt is too small for integrator.t_end (more than 1e10 steps)");
    }
    if (projected && ic.scheme != Scheme::ProjectedEuler) {
        report("integrator.scheme", "projected variants require integrator.scheme = \"projected-euler\"");
    } else if (!projected && ic.scheme == Scheme::ProjectedEuler) {
        report("integrator.scheme", "integrator.scheme = \"projected-euler\" needs a projected variant");
    }
    if (cfg.stop_residual && !(*cfg.stop_residual > 0.0)) {
        report("integrator.stop_residual", "integrator.stop_residual must be a positive number");
    }

    auto check_range = [&](const std::string& field, const std::pair<double, double>& r) {
        if (!std::isfinite(r.first) || !std::isfinite(r.second) || r.first > r.second) {
            report(field, field + " must be a finite range [lo, hi] with lo <= hi");
            return false;
        }
        return true;
    };
    const bool actions_ok = check_range("initial.actions", cfg.initial.actions);
    if (cfg.initial.estimates) {
        if (!augmented) {
            report("initial.estimates", "initial.estimates only applies to augmented variants");
        } else {
            check_range("initial.estimates", *cfg.initial.estimates);
        }
    }
    if (actions_ok && projected && box && box->is_bounded()) {
        const auto [lo, hi] = cfg.initial.actions;
        if ((box->lo().array() > lo).any() || (box->hi().array() < hi).any()) {
            report("initial.actions", "initial.actions must lie inside the action box of every player");
        }
    }

    if (cfg.output.csv.empty()) report("output.csv", "output.csv must not be empty");
    if (cfg.output.summary.empty()) report("output.summary", "output.summary must not be empty");
    return out;
}

}  // namespace nashflow
