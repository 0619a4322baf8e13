#include "dsm/altsched.hpp"

#include "dsm/dynamics.hpp"
#include "dsm/kernel.hpp"
#include "dsm/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace dsm {

namespace {

// Fixed loads plus the large shiftable ones, priced by total cost.
Scenario large_only(const Scenario& s, const Rational& threshold, std::vector<std::string>& large_ids) {
    Scenario r = s;
    r.loads.clear();
    r.billing = BillingScheme::DailyProportional;
    for (const auto& l : s.loads) {
        if (l.kind == LoadKind::Fixed) {
            r.loads.push_back(l);
        } else if (l.energy() > threshold) {
            r.loads.push_back(l);
            large_ids.push_back(l.id);
        }
    }
    return r;
}

}  // namespace

PartialSchedule central_schedule_large(const Scenario& s, const Rational& threshold_kwh, std::uint64_t cap) {
    auto violations = validate_scenario(s);
    if (!violations.empty()) throw std::invalid_argument("invalid scenario: " + violations.front().reason);
    std::vector<std::string> ids;
    Scenario reduced = large_only(s, threshold_kwh, ids);
    PartialSchedule out;
    if (ids.empty()) return out;

    GameKernel k(reduced);
    const auto& agents = k.agents();
    std::vector<int> best(agents.size());
    for (std::size_t a = 0; a < agents.size(); ++a) best[a] = agents[a].starts.front();

    if (k.joint_space_size() <= cap) {
        // lexicographic scan, strict improvement: the first minimizer wins
        std::vector<std::size_t> digit(agents.size(), 0);
        std::vector<int> starts = best;
        auto st = k.make_state(starts);
        Wide best_key = k.cost_key(st);
        for (;;) {
            std::size_t a = agents.size();
            while (a-- > 0) {
                k.place(st, a, starts[a], -1);
                if (++digit[a] < agents[a].starts.size()) {
                    starts[a] = agents[a].starts[digit[a]];
                    k.place(st, a, starts[a], +1);
                    break;
                }
                digit[a] = 0;
                starts[a] = agents[a].starts.front();
                k.place(st, a, starts[a], +1);
            }
            if (a == static_cast<std::size_t>(-1)) break;
            Wide key = k.cost_key(st);
            if (key < best_key) {
                best_key = key;
                best = starts;
            }
        }
    } else {
        out.exact = false;
        std::vector<std::size_t> order(agents.size());
        for (std::size_t a = 0; a < order.size(); ++a) order[a] = a;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            return agents[x].units * agents[x].duration > agents[y].units * agents[y].duration;
        });
        auto st = k.make_state(best);
        for (std::size_t a = 0; a < agents.size(); ++a) k.place(st, a, best[a], -1);
        for (std::size_t a : order) {
            // enter at the lowest start; best_start keeps it on ties
            k.place(st, a, best[a], +1);
            best[a] = k.best_start(st, a, best[a]);
        }
    }
    for (std::size_t a = 0; a < agents.size(); ++a) out.starts[ids[a]] = best[a] + 1;
    return out;
}

Scenario pin_loads(const Scenario& s, const PartialSchedule& central) {
    Scenario r = s;
    std::size_t pinned = 0;
    for (auto& l : r.loads) {
        auto it = central.starts.find(l.id);
        if (it == central.starts.end()) continue;
        if (l.kind != LoadKind::Shiftable) throw std::invalid_argument("cannot pin fixed load " + l.id);
        ++pinned;
        const TimeSlot t = it->second;
        auto feasible = feasible_starts(l, s.horizon, s.wrap_allowed);
        if (std::find(feasible.begin(), feasible.end(), t) == feasible.end())
            throw std::invalid_argument("start " + std::to_string(t) + " is not feasible for " + l.id);
        // a window admitting exactly one start; the load stays in the schedule
        l.window_start = t;
        l.window_end = s.wrap_allowed ? t : t + l.duration - 1;
    }
    if (pinned != central.starts.size()) throw std::invalid_argument("central schedule names an unknown load");
    return r;
}

TwoPhaseResult two_phase_study(const Scenario& s, const Rational& threshold_kwh, const StudyConfig& cfg,
                               std::uint64_t cap) {
    TwoPhaseResult out;
    out.central = central_schedule_large(s, threshold_kwh, cap);
    out.pinned = pin_loads(s, out.central);
    out.two_phase = run_study(out.pinned, cfg);
    out.plain = run_study(s, cfg);

    auto setup = run_setup(out.pinned, cfg, 0);
    DynamicsOptions opts;
    opts.max_rounds = cfg.max_rounds;
    opts.sweep_cap = cfg.sweep_cap;
    opts.record_trace = false;
    auto rec = cournot_run(out.pinned, setup.initial, setup.order, cfg.max_rounds, opts);

    out.final_schedule = rec.terminal;
    return out;
}

QLearningResult q_learning_repeated(const Scenario& s, const QLearningConfig& cfg) {
    if (cfg.episodes < 1) throw std::invalid_argument("episodes must be at least 1");
    if (!(cfg.epsilon >= 0 && cfg.epsilon <= 1)) throw std::invalid_argument("epsilon must lie in [0, 1]");
    if (!(cfg.learning_rate > 0 && cfg.learning_rate <= 1))
        throw std::invalid_argument("learning rate must lie in (0, 1]");
    if (!(cfg.epsilon_decay >= 0 && cfg.epsilon_decay <= 1))
        throw std::invalid_argument("epsilon decay must lie in [0, 1]");

    GameKernel k(s);
    const auto& agents = k.agents();
    QLearningResult out;
    out.q_values.resize(agents.size());
    out.action_counts.resize(agents.size());
    for (std::size_t a = 0; a < agents.size(); ++a) {
        out.q_values[a].assign(agents[a].starts.size(), 0.0);
        out.action_counts[a].assign(agents[a].starts.size(), 0);
    }

    // each load is credited with its energy share of the owner's shiftable energy
    std::vector<std::int64_t> owner_units(static_cast<std::size_t>(k.users()) + 1, 0);
    for (const auto& a : agents) owner_units[static_cast<std::size_t>(a.owner)] += a.units * a.duration;

    auto greedy = [&](std::size_t a) {
        const auto& q = out.q_values[a];
        return static_cast<std::size_t>(std::max_element(q.begin(), q.end()) - q.begin());
    };

    Xoshiro256StarStar rng(cfg.seed);
    double epsilon = cfg.epsilon;
    std::vector<std::size_t> action(agents.size());
    std::vector<int> starts(agents.size());
    std::vector<double> bills(owner_units.size(), 0.0);
    for (int e = 1; e <= cfg.episodes; ++e) {
        for (std::size_t a = 0; a < agents.size(); ++a) {
            if (rng.unit() < epsilon)
                action[a] = static_cast<std::size_t>(rng.below(agents[a].starts.size()));
            else
                action[a] = greedy(a);
            starts[a] = agents[a].starts[action[a]];
            ++out.action_counts[a][action[a]];
        }
        auto st = k.make_state(starts);
        for (int u = 1; u <= k.users(); ++u)
            if (owner_units[static_cast<std::size_t>(u)] > 0)
                bills[static_cast<std::size_t>(u)] = to_double(k.bill_money(st, u).cents);
        for (std::size_t a = 0; a < agents.size(); ++a) {
            const auto owner = static_cast<std::size_t>(agents[a].owner);
            const double share = static_cast<double>(agents[a].units * agents[a].duration) /
                                 static_cast<double>(owner_units[owner]);
            double& q = out.q_values[a][action[a]];
            q += cfg.learning_rate * (-bills[owner] * share - q);
        }
        out.trace.push_back({e, k.cost_money(k.cost_key(st)), k.par(st)});
        epsilon *= cfg.epsilon_decay;
    }
    for (std::size_t a = 0; a < agents.size(); ++a) starts[a] = agents[a].starts[greedy(a)];
    out.final_schedule = k.to_schedule(starts);
    return out;
}

}  // namespace dsm
