#include "dsm/cli.hpp"

#include "dsm/altsched.hpp"
#include "dsm/equilibrium.hpp"
#include "dsm/kernel.hpp"
#include "dsm/montecarlo.hpp"
#include "dsm/report.hpp"
#include "dsm/scenario_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <sstream>

namespace dsm {

namespace {

// Bad input discovered after parsing; maps to exit code 1.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flag combinations CLI11 cannot express; maps to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string scheme;
    int runs = 1000;
    int max_rounds = 1000;
    std::uint64_t cap = 10'000'000;
    std::string out;
    int threads = 0;
};

void add_common(CLI::App* sub, Common& c, bool seed_required) {
    auto* seed = sub->add_option("--seed", c.seed, "Master seed");
    if (seed_required) seed->required();
    sub->add_option("--scheme", c.scheme, "Override the billing scheme")->check(CLI::IsMember({"hourly", "daily"}));
    sub->add_option("--runs", c.runs, "Number of runs")->check(CLI::Range(1, 100'000'000));
    sub->add_option("--max-rounds", c.max_rounds, "Round cap per run")->check(CLI::Range(1, 100'000'000));
    sub->add_option("--cap", c.cap, "Joint-space cap for exhaustive search")->check(CLI::PositiveNumber);
    sub->add_option("--out", c.out, "Output directory");
    sub->add_option("--threads", c.threads, "Worker threads (0: all)")->check(CLI::Range(0, 4096));
}

Scenario load_checked(const Common& c) {
    if (c.scenario.empty()) throw UsageError("--scenario is required");
    Scenario s;
    try {
        s = load_scenario(c.scenario);
    } catch (const ScenarioFormatError& e) {
        throw InputError(e.what());
    }
    if (!c.scheme.empty()) s.billing = parse_billing_scheme(c.scheme);
    auto violations = validate_scenario(s);
    if (!violations.empty()) {
        std::string msg = c.scenario + ": " + std::to_string(violations.size()) + " violation(s)";
        for (const auto& v : violations) msg += "\n  " + (v.load_id.empty() ? std::string("scenario") : v.load_id) + ": " + v.reason;
        throw InputError(msg);
    }
    return s;
}

std::string to_text(const auto& writer) {
    std::ostringstream os;
    writer(os);
    return os.str();
}

void maybe_write(const Common& c, const std::string& name, const std::string& content) {
    if (!c.out.empty()) write_file(c.out, name, content);
}

std::vector<int> parse_order(const std::string& text, int users) {
    if (text.empty()) return ascending_order(users);
    std::vector<int> order;
    for (int v : parse_schedule(text).starts) order.push_back(v);
    return order;
}

MatrixGame game_from(const Common& c, const std::string& game_path) {
    if (!game_path.empty() && !c.scenario.empty()) throw UsageError("give either --game or --scenario, not both");
    if (!game_path.empty()) {
        try {
            return load_matrix_game(game_path);
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
    }
    return build_matrix_game(load_checked(c));
}

Rational parse_threshold(const std::string& text, const Scenario& s) {
    if (text == "inf" || text == "infinity") {
        Rational top = 0;
        for (const auto& l : s.loads) top = std::max(top, l.energy());
        return top + 1;
    }
    Rational t;
    try {
        t = parse_rational(text);
    } catch (const std::invalid_argument&) {
        throw UsageError("--threshold must be a number or 'inf'");
    }
    if (t < 0) throw UsageError("--threshold must be nonnegative");
    return t;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Day-ahead load scheduling game analysis"};
    app.require_subcommand(1);

    Common c;
    std::string game;
    std::string valuations;
    std::string initial;
    std::string order;
    std::string mode = "per-load";
    std::string order_policy = "ascending";
    std::string threshold = "inf";
    bool group = false;
    int episodes = 1000;
    double epsilon = 0.1;
    double learning_rate = 0.1;
    double decay = 1.0;
    int users = 10;
    int loads_per_user = 2;
    int horizon = 24;

    auto* validate = app.add_subcommand("validate", "Check a scenario file");
    validate->add_option("--scenario", c.scenario)->required();
    add_common(validate, c, false);

    auto* simulate = app.add_subcommand("simulate", "One Cournot run with its trajectory");
    simulate->add_option("--scenario", c.scenario)->required();
    simulate->add_option("--initial", initial, "Initial starts, e.g. 2,2 (random from --seed if absent)");
    simulate->add_option("--order", order, "Turn order, e.g. 2,1");
    add_common(simulate, c, false);

    auto* enumerate = app.add_subcommand("enumerate", "All pure Nash equilibria");
    enumerate->add_option("--scenario", c.scenario)->required();
    enumerate->add_flag("--group", group, "Group equilibria by total cost");
    enumerate->add_option("--mode", mode)->check(CLI::IsMember({"per-load", "per-user"}));
    add_common(enumerate, c, false);

    auto* study = app.add_subcommand("study", "Seeded random-initialization convergence study");
    study->add_option("--scenario", c.scenario)->required();
    study->add_option("--order", order_policy)->check(CLI::IsMember({"ascending", "random"}));
    add_common(study, c, true);

    auto* matrix = app.add_subcommand("matrix", "Two-player bill matrix and its pure equilibria");
    matrix->add_option("--scenario", c.scenario);
    matrix->add_option("--game", game, "Matrix game JSON instead of a scenario");
    matrix->add_option("--valuations", valuations, "Payoff matrix added cell-wise");
    add_common(matrix, c, false);

    auto* hull = app.add_subcommand("hull", "Payoff hull, maximin point and folk-theorem region");
    hull->add_option("--scenario", c.scenario);
    hull->add_option("--game", game);
    hull->add_option("--valuations", valuations);
    add_common(hull, c, false);

    auto* twophase = app.add_subcommand("twophase", "Central pre-scheduling of large loads, then Cournot play");
    twophase->add_option("--scenario", c.scenario)->required();
    twophase->add_option("--threshold", threshold, "kWh; loads with more energy are scheduled centrally ('inf': none)");
    twophase->add_option("--order", order_policy)->check(CLI::IsMember({"ascending", "random"}));
    add_common(twophase, c, true);

    auto* qlearn = app.add_subcommand("qlearn", "Epsilon-greedy Q-learning in repeated play");
    qlearn->add_option("--scenario", c.scenario)->required();
    qlearn->add_option("--episodes", episodes)->check(CLI::Range(1, 100'000'000));
    qlearn->add_option("--epsilon", epsilon)->check(CLI::Range(0.0, 1.0));
    qlearn->add_option("--learning-rate", learning_rate)->check(CLI::Range(1e-12, 1.0));
    qlearn->add_option("--decay", decay, "Epsilon multiplier per episode")->check(CLI::Range(0.0, 1.0));
    add_common(qlearn, c, true);

    auto* genflat = app.add_subcommand("gen-flat", "Random scenario that admits a flat profile");
    genflat->add_option("--users", users)->check(CLI::Range(1, 100'000));
    genflat->add_option("--loads-per-user", loads_per_user)->check(CLI::Range(1, 100'000));
    genflat->add_option("--horizon", horizon)->check(CLI::Range(1, 100'000));
    add_common(genflat, c, true);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        if (validate->parsed()) {
            Scenario s = load_checked(c);
            out << c.scenario << ": ok (" << s.users << " users, " << s.loads.size() << " loads, "
                << s.shiftable_indices().size() << " shiftable, H = " << s.horizon << ")\n";
        } else if (simulate->parsed()) {
            Scenario s = load_checked(c);
            JointSchedule init;
            if (!initial.empty()) {
                init = parse_schedule(initial);
            } else {
                if (!c.seed) throw UsageError("simulate needs --initial or --seed");
                StudyConfig cfg;
                cfg.master_seed = *c.seed;
                init = run_setup(s, cfg, 0).initial;
            }
            auto rec = cournot_run(s, init, parse_order(order, s.users), c.max_rounds);
            for (const auto& u : rec.trajectory)
                out << "round " << u.round << ": user " << u.user << " moves " << u.load_id << ' ' << u.old_start
                    << " -> " << u.new_start << " (bill " << u.user_bill.str() << ", total " << u.total_cost.str() << ")\n";
            auto e = expand(s, rec.terminal);
            out << to_string(rec.status) << " after " << rec.rounds << " round(s): " << format_schedule(rec.terminal)
                << ", total cost " << total_cost(e.aggregate, s.pricing).str() << ", PAR "
                << to_fixed(par(e.aggregate), kParDecimals) << '\n';
            maybe_write(c, "trace.csv", to_text([&](std::ostream& os) { write_trace_csv(os, rec); }));
        } else if (enumerate->parsed()) {
            Scenario s = load_checked(c);
            EnumerationOptions opts;
            opts.mode = mode == "per-user" ? NashMode::PerUserExact : NashMode::PerLoad;
            opts.cap = c.cap;
            opts.threads = c.threads;
            auto nes = enumerate_ne(s, opts);
            out << nes.size() << " pure Nash equilibria\n";
            maybe_write(c, "ne.csv", to_text([&](std::ostream& os) { write_ne_csv(os, s, nes); }));
            if (group && !nes.empty()) {
                auto table = group_equilibria(s, nes);
                out << render_equilibrium_table(table);
                maybe_write(c, "table.csv", to_text([&](std::ostream& os) { write_equilibrium_csv(os, table); }));
            }
        } else if (study->parsed()) {
            Scenario s = load_checked(c);
            StudyConfig cfg;
            cfg.runs = c.runs;
            cfg.master_seed = *c.seed;
            cfg.order_policy = order_policy == "random" ? OrderPolicy::RandomPerRun : OrderPolicy::Ascending;
            cfg.max_rounds = c.max_rounds;
            cfg.threads = c.threads;
            auto r = run_study(s, cfg);
            std::optional<EquilibriumTable> table;
            if (GameKernel(s).joint_space_size() <= c.cap) {
                EnumerationOptions opts;
                opts.cap = c.cap;
                opts.threads = c.threads;
                auto nes = enumerate_ne(s, opts);
                if (!nes.empty()) table = group_equilibria(s, nes);
            }
            out << r.converged() << " of " << r.runs << " runs converged, " << r.cycle_count << " cycled, "
                << r.max_rounds_count << " hit the round cap; mean PAR " << to_fixed(r.mean_par(), kParDecimals)
                << ", mean total cost " << r.mean_cost().str() << '\n';
            if (table) out << render_equilibrium_table(with_convergence(*table, r));
            maybe_write(c, "study.csv", to_text([&](std::ostream& os) { write_study_csv(os, r, table ? &*table : nullptr); }));
            maybe_write(c, "histogram.csv", to_text([&](std::ostream& os) { write_histogram_csv(os, r); }));
            maybe_write(c, "summary.json", to_text([&](std::ostream& os) { write_study_summary_json(os, r); }));
        } else if (matrix->parsed()) {
            MatrixGame g = game_from(c, game);
            if (!valuations.empty()) g = augment_with_valuations(as_payoffs(g), load_matrix_game(valuations));
            std::string text = render_matrix(g);
            out << text;
            maybe_write(c, "matrix.txt", text);
            std::ostringstream ne;
            ne << "row,col\n";
            for (const auto& cell : pure_ne_cells(g)) ne << cell.row + 1 << ',' << cell.col + 1 << '\n';
            maybe_write(c, "ne_cells.csv", ne.str());
        } else if (hull->parsed()) {
            MatrixGame g = game_from(c, game);
            if (!valuations.empty()) g = augment_with_valuations(as_payoffs(g), load_matrix_game(valuations));
            auto h = hull_and_folk_region(g);
            out << "hull vertices:";
            for (const auto& p : h.vertices) out << " (" << to_string_exact(p.x) << ", " << to_string_exact(p.y) << ')';
            out << "\nmaximin: (" << to_string_exact(h.maximin.x) << ", " << to_string_exact(h.maximin.y) << ")\nfolk region:";
            for (const auto& p : h.folk_region) out << " (" << to_string_exact(p.x) << ", " << to_string_exact(p.y) << ')';
            out << '\n';
            maybe_write(c, "vertices.csv", to_text([&](std::ostream& os) { write_points_csv(os, h.vertices); }));
            maybe_write(c, "region.csv", to_text([&](std::ostream& os) { write_points_csv(os, h.folk_region); }));
            maybe_write(c, "report.json", to_text([&](std::ostream& os) { write_hull_json(os, h); }));
        } else if (twophase->parsed()) {
            Scenario s = load_checked(c);
            StudyConfig cfg;
            cfg.runs = c.runs;
            cfg.master_seed = *c.seed;
            cfg.order_policy = order_policy == "random" ? OrderPolicy::RandomPerRun : OrderPolicy::Ascending;
            cfg.max_rounds = c.max_rounds;
            cfg.threads = c.threads;
            auto r = two_phase_study(s, parse_threshold(threshold, s), cfg, c.cap);
            out << "central loads:";
            if (r.central.starts.empty()) out << " none";
            for (const auto& [id, t] : r.central.starts) out << ' ' << id << '@' << t;
            out << (r.central.exact ? "" : " (greedy)") << '\n';
            std::string summary = to_text([&](std::ostream& os) { write_twophase_csv(os, r); });
            out << summary;
            maybe_write(c, "twophase.csv", summary);
            std::ostringstream central;
            central << "load,start\n";
            for (const auto& [id, t] : r.central.starts) central << id << ',' << t << '\n';
            maybe_write(c, "central.csv", central.str());
        } else if (qlearn->parsed()) {
            Scenario s = load_checked(c);
            QLearningConfig cfg;
            cfg.episodes = episodes;
            cfg.epsilon = epsilon;
            cfg.epsilon_decay = decay;
            cfg.learning_rate = learning_rate;
            cfg.seed = *c.seed;
            auto q = q_learning_repeated(s, cfg);
            const auto& last = q.trace.back();
            auto e = expand(s, q.final_schedule);
            out << "episode " << last.episode << ": total cost " << last.total_cost.str() << ", PAR "
                << to_fixed(last.par, kParDecimals) << "\ngreedy schedule " << format_schedule(q.final_schedule)
                << ": total cost " << total_cost(e.aggregate, s.pricing).str() << ", PAR "
                << to_fixed(par(e.aggregate), kParDecimals) << '\n';
            maybe_write(c, "qlearn.csv", to_text([&](std::ostream& os) { write_qlearning_csv(os, q); }));
        } else if (genflat->parsed()) {
            auto flat = generate_flat_scenario(users, loads_per_user, horizon, *c.seed);
            if (!c.scheme.empty()) flat.scenario.billing = parse_billing_scheme(c.scheme);
            std::string json = write_scenario(flat.scenario);
            if (c.out.empty()) {
                out << json;
            } else {
                write_file(c.out, "scenario.json", json);
                write_file(c.out, "witness.txt", format_schedule(flat.witness) + "\n");
                out << "wrote " << (std::filesystem::path(c.out) / "scenario.json").string() << '\n';
            }
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const InputError& e) {
        err << e.what() << '\n';
        return 1;
    } catch (const CapExceeded& e) {
        err << "cap exceeded: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace dsm
