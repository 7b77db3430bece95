// Command-line front end: ingest point logs, fit players, and write the
// report tables as CSV or JSON.
//
// Exit codes: 0 ok, 1 internal error, 2 bad input data, 3 bad configuration.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "serve/bootstrap.hpp"
#include "serve/bounds.hpp"
#include "serve/counterfactual.hpp"
#include "serve/error.hpp"
#include "serve/estimation.hpp"
#include "serve/ingest.hpp"
#include "serve/parallel.hpp"
#include "serve/robustness.hpp"
#include "serve/scoring.hpp"
#include "serve/structural.hpp"

namespace fs = std::filesystem;
using namespace serve;

namespace {

struct RunConfig {
    std::string input;
    std::string prizes;
    std::string out;  // directory; empty writes to stdout
    std::string format = "csv";
    std::uint64_t seed = 20250916;
    double eps = kDefaultEps;
    int min_matches = 20;
    std::vector<double> t_grid{0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
    int replications = 300;
    double level = 0.95;
    unsigned threads = 0;
    double span = 0.5;
    double ratio_threshold = kDefaultRatioThreshold;
    int series_points = 101;
};

// ---- tables ----

struct Missing {};  // written as "n.a." in CSV and null in JSON
using Cell = std::variant<std::string, double, std::int64_t, bool, Missing>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    bool stdout_too = true;  // long plot series only go to files
};

// Shortest text that parses back to the same double, so CSV and JSON agree.
std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_cell(const Cell& c) {
    struct V {
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\n") == std::string::npos) return s;
            std::string q = "\"";
            for (char ch : s) {
                if (ch == '"') q += '"';
                q += ch;
            }
            return q + "\"";
        }
        std::string operator()(double d) const { return fmt_double(d); }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(Missing) const { return "n.a."; }
    };
    return std::visit(V{}, c);
}

nlohmann::json json_cell(const Cell& c) {
    struct V {
        nlohmann::json operator()(const std::string& s) const { return s; }
        nlohmann::json operator()(double d) const {
            // JSON has no infinities; keep them readable instead of null.
            if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
            if (std::isnan(d)) return nullptr;
            return d;
        }
        nlohmann::json operator()(std::int64_t i) const { return i; }
        nlohmann::json operator()(bool b) const { return b; }
        nlohmann::json operator()(Missing) const { return nullptr; }
    };
    return std::visit(V{}, c);
}

void write_csv(std::ostream& out, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
        out << '\n';
    }
}

nlohmann::json to_json(const Table& t) {
    auto arr = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = json_cell(row[i]);
        arr.push_back(std::move(obj));
    }
    return arr;
}

void emit(const RunConfig& cfg, const std::vector<Table>& tables) {
    const bool json = cfg.format == "json";
    if (!cfg.out.empty()) {
        std::error_code ec;
        fs::create_directories(cfg.out, ec);
        if (ec) throw ConfigError("cannot create output directory " + cfg.out + ": " + ec.message());
        for (const auto& t : tables) {
            const fs::path p = fs::path(cfg.out) / (t.name + (json ? ".json" : ".csv"));
            std::ofstream f(p, std::ios::binary);
            if (!f) throw ConfigError("cannot write " + p.string());
            if (json)
                f << to_json(t).dump(2) << '\n';
            else
                write_csv(f, t);
        }
        return;
    }
    if (json) {
        nlohmann::json doc = nlohmann::json::object();
        for (const auto& t : tables)
            if (t.stdout_too) doc[t.name] = to_json(t);
        std::cout << doc.dump(2) << '\n';
        return;
    }
    bool first = true;
    for (const auto& t : tables) {
        if (!t.stdout_too) continue;
        if (tables.size() > 1) std::cout << (first ? "" : "\n") << "# " << t.name << '\n';
        first = false;
        write_csv(std::cout, t);
    }
}

// ---- inputs ----

std::string slurp(const std::string& path) {
    if (path.empty()) throw ConfigError("--input is required");
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open input file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

enum class InputKind { Points, Counts, Stats, Empty };

InputKind sniff(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> header;
    if (!csv::next_row(in, header)) return InputKind::Empty;
    auto has = [&](const char* c) { return std::find(header.begin(), header.end(), c) != header.end(); };
    if (has("server_id")) return InputKind::Points;
    if (has("n_x1")) return InputKind::Counts;
    if (has("x1")) return InputKind::Stats;
    throw InputError("unrecognised input header (expected points, counts or stats columns)");
}

struct PlayerData {
    std::optional<ServeCounts> counts;
    ServeStats stats;
};

struct Failure {
    std::string player_id, stage, message;
};

// Players keyed by id; players whose counts do not support frequencies land in `failures`.
std::map<std::string, PlayerData> load_players(const RunConfig& cfg, std::vector<Failure>& failures) {
    const std::string text = slurp(cfg.input);
    std::istringstream in(text);
    std::map<std::string, PlayerData> out;
    std::map<std::string, ServeCounts> counts;
    switch (sniff(text)) {
        case InputKind::Empty:
            return out;
        case InputKind::Stats:
            for (auto& [id, s] : read_stats_csv(in)) out[id].stats = s;
            return out;
        case InputKind::Points:
            counts = aggregate_counts(parse_points_csv(in), cfg.min_matches);
            break;
        case InputKind::Counts:
            counts = read_counts_csv(in);
            break;
    }
    for (auto& [id, c] : counts) {
        try {
            out[id] = PlayerData{c, mle_stats(c)};
        } catch (const ModelError& e) {
            failures.push_back({id, "mle_stats", e.what()});
        }
    }
    return out;
}

PrizeLadder load_ladder(const RunConfig& cfg) {
    if (cfg.prizes.empty()) throw ConfigError("--prizes is required");
    std::ifstream f(cfg.prizes);
    if (!f) throw ConfigError("cannot open prize ladder: " + cfg.prizes);
    return load_prize_ladder(f);
}

void check_config(const RunConfig& cfg) {
    if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("--format must be csv or json");
    if (!(cfg.eps > 0)) throw ConfigError("--eps must be positive");
    if (cfg.min_matches < 0) throw ConfigError("--min-matches must be non-negative");
    if (!(cfg.span > 0 && cfg.span <= 1)) throw ConfigError("--span must be in (0, 1]");
    if (!(cfg.level > 0 && cfg.level < 1)) throw ConfigError("--level must be in (0, 1)");
    for (double t : cfg.t_grid)
        if (!(t > 0)) throw ConfigError("--t-grid values must be positive");
}

Table failure_table(std::vector<Failure> failures) {
    std::sort(failures.begin(), failures.end(),
              [](const Failure& a, const Failure& b) { return a.player_id < b.player_id; });
    Table t{"errors", {"player_id", "stage", "message"}, {}};
    for (const auto& f : failures) {
        std::cerr << "warning: " << f.player_id << ": " << f.stage << ": " << f.message << '\n';
        t.rows.push_back({f.player_id, f.stage, f.message});
    }
    return t;
}

// Runs `fn` per player in parallel and keeps results in id order.
template <class R, class Fn>
std::vector<std::pair<std::string, std::optional<R>>> per_player(const std::map<std::string, PlayerData>& players,
                                                                 const RunConfig& cfg, const char* stage, Fn&& fn,
                                                                 std::vector<Failure>& failures) {
    std::vector<std::pair<std::string, std::optional<R>>> out;
    std::vector<const PlayerData*> data;
    for (const auto& [id, p] : players) {
        out.push_back({id, std::nullopt});
        data.push_back(&p);
    }
    std::vector<std::optional<Failure>> errs(out.size());
    parallel_for(
        out.size(),
        [&](std::size_t i) {
            try {
                out[i].second = fn(*data[i]);
            } catch (const FitError& e) {
                errs[i] = Failure{out[i].first, e.stage, e.what()};
            } catch (const ModelError& e) {
                errs[i] = Failure{out[i].first, stage, e.what()};
            }
        },
        cfg.threads);
    for (auto& e : errs)
        if (e) failures.push_back(std::move(*e));
    return out;
}

// ---- commands ----

std::vector<Table> cmd_ingest(const RunConfig& cfg) {
    std::istringstream in(slurp(cfg.input));
    const auto counts = aggregate_counts(parse_points_csv(in), cfg.min_matches);
    Table t{"counts", {"player_id", "n_matches", "N", "n_x1", "n_x2", "n_f1", "n_f2", "n_k1", "n_k2"}, {}};
    for (const auto& [id, c] : counts)
        t.rows.push_back({id, c.n_matches, c.N, c.n_x1, c.n_x2, c.n_f1, c.n_f2, c.n_k1, c.n_k2});
    return {t};
}

Table ci_table(const std::vector<std::pair<std::string, std::optional<BootstrapResult>>>& results) {
    Table t{"ci", {"player_id", "param", "point", "lo", "hi", "significant", "failed_reps"}, {}};
    for (const auto& [id, r] : results) {
        if (!r) continue;
        for (const auto& iv : r->intervals)
            t.rows.push_back({id, iv.param, iv.point, iv.lo, iv.hi, iv.significant,
                              static_cast<std::int64_t>(r->failed)});
    }
    return t;
}

std::vector<std::pair<std::string, std::optional<BootstrapResult>>> run_bootstrap(
    const std::map<std::string, PlayerData>& players, const RunConfig& cfg, std::vector<Failure>& failures) {
    BootstrapConfig bc;
    bc.replications = cfg.replications;
    bc.level = cfg.level;
    bc.seed = cfg.seed;
    bc.threads = 1;  // players already run in parallel
    const auto est = structural_estimator(cfg.eps);
    std::map<std::string, PlayerData> with_counts;
    for (const auto& [id, p] : players)
        if (p.counts) with_counts.emplace(id, p);
    return per_player<BootstrapResult>(
        with_counts, cfg, "bootstrap", [&](const PlayerData& p) { return bootstrap_ci(*p.counts, est, bc); },
        failures);
}

std::vector<Table> cmd_estimate(const RunConfig& cfg) {
    std::vector<Failure> failures;
    const auto players = load_players(cfg, failures);
    const auto fits = per_player<StructuralFit>(
        players, cfg, "fit", [&](const PlayerData& p) { return fit_player(p.stats, cfg.eps); }, failures);

    Table fit{"fits",
              {"player_id", "delta", "beta", "lambda", "tau_f", "a_f", "tau_k", "a_k", "a", "tau", "soc_ok",
               "cond3_i", "cond3_ii", "cond3_iii", "statics", "residual", "iterations", "lower_bound",
               "upper_bound", "ratio", "classification"},
              {}};
    Table skills{"series_skills", {"player_id", "x", "f", "k", "y"}, {}, false};
    Table lmap{"series_lambda_map", {"player_id", "lambda", "Lambda"}, {}, false};
    for (const auto& [id, r] : fits) {
        if (!r) continue;
        const auto& sk = r->skills;
        const auto& s = r->stats;
        const auto b = optimality_bounds(s);
        Cell ratio = Missing{};
        try {
            const auto g = lemma2_geometry(s);
            if (g.ratio) ratio = *g.ratio;
        } catch (const ConditionBFailed&) {
        }
        fit.rows.push_back({id, r->prefs.delta, r->prefs.beta, sk.lambda, sk.tau_f, sk.a_f, sk.tau_k, sk.a_k,
                            sk.a, sk.tau, r->soc_ok, r->cond3.i, r->cond3.ii, r->cond3.iii,
                            std::string(to_string(comparative_statics_sign(sk))), r->residual,
                            static_cast<std::int64_t>(r->iterations), b.lower, b.upper, ratio,
                            std::string(to_string(classify_player(s, cfg.ratio_threshold)))});
        const int n = cfg.series_points;
        for (int i = 1; i <= n; ++i) {
            const double x = static_cast<double>(i) / n;
            skills.rows.push_back({id, x, sk.f(x), sk.k(x), sk.y(x)});
        }
        // Fixed-point map around the solution, for plots against the diagonal.
        const double hi = std::max(6.0, 2 * sk.lambda);
        for (int i = 0; i < n; ++i) {
            const double l = hi * i / (n - 1);
            lmap.rows.push_back({id, l, lambda_map(l, s.x1, s.x2)});
        }
    }
    std::vector<Table> out{fit};
    const bool any_counts =
        std::any_of(players.begin(), players.end(), [](const auto& kv) { return kv.second.counts.has_value(); });
    if (any_counts && cfg.replications > 0) out.push_back(ci_table(run_bootstrap(players, cfg, failures)));
    out.push_back(skills);
    out.push_back(lmap);
    out.push_back(failure_table(failures));
    return out;
}

std::vector<Table> cmd_bounds(const RunConfig& cfg) {
    std::vector<Failure> failures;
    const auto players = load_players(cfg, failures);
    Table t{"bounds",
            {"player_id", "lower", "upper", "A_x1", "B_x1", "A_x2", "B_x2", "lemma1_b", "lemma1_c", "b12", "x12",
             "x14", "x24", "A1", "A2", "ratio", "classification"},
            {}};
    for (const auto& [id, p] : players) {
        const auto b = optimality_bounds(p.stats);
        std::vector<Cell> row{id, b.lower, b.upper, b.abc_x1.A, b.abc_x1.B, b.abc_x2.A, b.abc_x2.B, b.lemma1_b,
                              b.lemma1_c};
        try {
            const auto g = lemma2_geometry(p.stats);
            row.insert(row.end(), {g.b12, g.x12, g.x14, g.x24, g.A1, g.A2});
            row.push_back(g.ratio ? Cell{*g.ratio} : Cell{Missing{}});
        } catch (const ConditionBFailed&) {
            for (int i = 0; i < 7; ++i) row.push_back(Missing{});
        }
        row.push_back(std::string(to_string(classify_player(p.stats, cfg.ratio_threshold))));
        t.rows.push_back(std::move(row));
    }
    return {t, failure_table(failures)};
}

std::vector<Table> cmd_counterfactual(const RunConfig& cfg) {
    const auto ladder = load_ladder(cfg);
    std::vector<Failure> failures;
    const auto players = load_players(cfg, failures);
    const auto reports = per_player<CounterfactualReport>(
        players, cfg, "counterfactual",
        [&](const PlayerData& p) { return counterfactual_report(fit_player(p.stats, cfg.eps), ladder); }, failures);
    Table t{"counterfactual",
            {"player_id", "delta", "dx1", "dx2", "dpt", "dgm", "dset", "dmat", "dprize", "x1_cf", "x2_cf",
             "point_cf", "point_obs"},
            {}};
    for (const auto& [id, r] : reports) {
        if (!r) continue;
        t.rows.push_back({id, r->delta, r->delta_x1, r->delta_x2, r->delta_point, r->delta_game, r->delta_set,
                          r->delta_match, r->delta_prize, r->counterfactual.x1, r->counterfactual.x2,
                          r->counterfactual.point, r->baseline_point});
    }
    return {t, failure_table(failures)};
}

std::vector<Table> cmd_robustness(const RunConfig& cfg) {
    std::vector<Failure> failures;
    const auto players = load_players(cfg, failures);

    const auto soft = per_player<SoftmaxFit>(
        players, cfg, "softmax", [&](const PlayerData& p) { return softmax_fit(p.stats, cfg.eps); }, failures);
    Table st{"softmax", {"player_id", "lambda", "a_f", "tau_f", "a_k", "tau_k", "beta", "delta", "residual",
                         "sign_changes"}, {}};
    for (const auto& [id, r] : soft)
        if (r)
            st.rows.push_back({id, r->lambda, r->a_f, r->tau_f, r->a_k, r->tau_k, r->beta, r->delta, r->residual,
                               static_cast<std::int64_t>(r->sign_changes)});

    using Row = std::vector<CurvatureTFit>;
    const auto tfits = per_player<Row>(
        players, cfg, "curvature_t",
        [&](const PlayerData& p) {
            Row row;
            for (double t : cfg.t_grid) row.push_back(curvature_t_fit(p.stats, t, cfg.eps));
            return row;
        },
        failures);
    std::vector<std::string> tcols{"player_id"};
    for (double t : cfg.t_grid) tcols.push_back("t=" + fmt_double(t));
    Table td{"t_grid_delta", tcols, {}}, tl{"t_grid_lambda", tcols, {}};
    for (const auto& [id, r] : tfits) {
        if (!r) continue;
        std::vector<Cell> dr{id}, lr{id};
        for (const auto& f : *r) {
            dr.push_back(f.solved ? Cell{f.delta} : Cell{Missing{}});
            lr.push_back(f.solved ? Cell{f.lambda} : Cell{Missing{}});
        }
        td.rows.push_back(std::move(dr));
        tl.rows.push_back(std::move(lr));
    }

    const auto dfs = per_player<DoubleFaultFit>(
        players, cfg, "double_fault", [&](const PlayerData& p) { return double_fault_fit(p.stats, cfg.eps); },
        failures);
    Table dt{"double_fault", {"player_id", "gamma", "lambda", "a", "tau"}, {}};
    std::vector<GammaInput> gin;
    for (const auto& [id, r] : dfs) {
        if (!r) continue;
        dt.rows.push_back({id, r->gamma, r->lambda, r->a, r->tau});
        gin.push_back({id, r->gamma, players.at(id).stats});
    }

    Table gt{"gamma_diagnostic",
             {"player_id", "m1", "m1_lo", "m1_hi", "m1_positive", "m2", "m2_lo", "m2_hi", "m2_positive", "flagged"},
             {}};
    if (gin.size() >= 10) {
        const int reps = std::max(cfg.replications, 100);
        for (const auto& d : gamma_diagnostic(gin, cfg.span, reps, cfg.seed, cfg.level, cfg.threads))
            gt.rows.push_back({d.player_id, d.first.fitted, d.first.lo, d.first.hi, d.first.positive,
                               d.second.fitted, d.second.lo, d.second.hi, d.second.positive, d.flagged()});
    } else {
        std::cerr << "warning: gamma diagnostic skipped, needs at least 10 players (have " << gin.size() << ")\n";
    }
    return {st, td, tl, dt, gt, failure_table(failures)};
}

std::vector<Table> cmd_bootstrap(const RunConfig& cfg) {
    if (cfg.replications < 2) throw ConfigError("--replications must be at least 2");
    std::vector<Failure> failures;
    const auto players = load_players(cfg, failures);
    for (const auto& [id, p] : players)
        if (!p.counts) throw InputError("bootstrap needs counts or points input, not stats");
    return {ci_table(run_bootstrap(players, cfg, failures)), failure_table(failures)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structural serve-strategy estimation"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--input", cfg.input, "points, counts or stats CSV")->required();
        sub->add_option("--out", cfg.out, "output directory (default: stdout)");
        sub->add_option("--format", cfg.format, "csv or json")->capture_default_str();
        sub->add_option("--eps", cfg.eps, "solver tolerance")->capture_default_str();
        sub->add_option("--min-matches", cfg.min_matches, "minimum charted matches per player")
            ->capture_default_str();
        sub->add_option("--threads", cfg.threads, "worker threads (0 = all cores)")->capture_default_str();
    };
    auto* ingest = app.add_subcommand("ingest", "aggregate a point log into serve counts");
    add_common(ingest);
    auto* estimate = app.add_subcommand("estimate", "structural fit, bounds, plot series, bootstrap CIs");
    add_common(estimate);
    auto* bounds = app.add_subcommand("bounds", "nonparametric bounds on the salience weight");
    add_common(bounds);
    auto* counter = app.add_subcommand("counterfactual", "re-optimize without process utility");
    add_common(counter);
    auto* robust = app.add_subcommand("robustness", "softmax, curvature-t grid, double-fault models");
    add_common(robust);
    auto* boot = app.add_subcommand("bootstrap", "parametric bootstrap intervals");
    add_common(boot);

    for (auto* sub : {estimate, boot, robust}) {
        sub->add_option("--seed", cfg.seed, "bootstrap seed")->capture_default_str();
        sub->add_option("--replications", cfg.replications, "bootstrap replications")->capture_default_str();
        sub->add_option("--level", cfg.level, "confidence level")->capture_default_str();
    }
    for (auto* sub : {estimate, bounds})
        sub->add_option("--ratio-threshold", cfg.ratio_threshold, "A2/A1 cutoff for LikelyPositive")
            ->capture_default_str();
    estimate->add_option("--series-points", cfg.series_points, "points per plot series")->check(CLI::Range(2, 100000));
    counter->add_option("--prizes", cfg.prizes, "prize ladder JSON")->required();
    robust->add_option("--t-grid", cfg.t_grid, "relative curvature values")->delimiter(',');
    robust->add_option("--span", cfg.span, "LOWESS span")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    try {
        check_config(cfg);
        std::vector<Table> tables;
        if (*ingest)
            tables = cmd_ingest(cfg);
        else if (*estimate)
            tables = cmd_estimate(cfg);
        else if (*bounds)
            tables = cmd_bounds(cfg);
        else if (*counter)
            tables = cmd_counterfactual(cfg);
        else if (*robust)
            tables = cmd_robustness(cfg);
        else if (*boot)
            tables = cmd_bootstrap(cfg);
        emit(cfg, tables);
        return 0;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
