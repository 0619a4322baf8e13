#include "dsm/dynamics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace dsm {

std::string to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Converged: return "converged";
        case RunStatus::CycleDetected: return "cycle_detected";
        case RunStatus::MaxRounds: return "max_rounds";
    }
    return "unknown";
}

std::vector<int> ascending_order(int users) {
    std::vector<int> order(static_cast<std::size_t>(users));
    std::iota(order.begin(), order.end(), 1);
    return order;
}

namespace detail {

namespace {

struct ScheduleHash {
    std::size_t operator()(const std::vector<int>& v) const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the starts
        for (int x : v) {
            h ^= static_cast<std::uint32_t>(x);
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

void check_order(const GameKernel& k, std::span<const int> order) {
    std::vector<bool> seen(static_cast<std::size_t>(k.users()) + 1, false);
    if (order.size() != static_cast<std::size_t>(k.users()))
        throw std::invalid_argument("turn order must list every user exactly once");
    for (int u : order) {
        if (u < 1 || u > k.users() || seen[static_cast<std::size_t>(u)])
            throw std::invalid_argument("turn order must be a permutation of 1..K");
        seen[static_cast<std::size_t>(u)] = true;
    }
}

}  // namespace

bool user_best_response(const GameKernel& k, GameKernel::State& st, std::vector<int>& starts, int user,
                        int sweep_cap, int round, RunRecord* record) {
    const auto& mine = k.agents_of(user);
    bool changed = false;
    for (int sweep = 0; sweep < std::max(1, sweep_cap); ++sweep) {
        bool sweep_changed = false;
        for (std::size_t a : mine) {
            int old = starts[a];
            int now = k.best_start(st, a, old);
            if (now == old) continue;
            starts[a] = now;
            sweep_changed = true;
            if (record) {
                Update u;
                u.round = round;
                u.user = user;
                u.load_id = k.scenario().loads[k.agents()[a].load_index].id;
                u.old_start = old + 1;
                u.new_start = now + 1;
                u.user_bill = k.bill_money(st, user);
                u.total_cost = k.cost_money(k.cost_key(st));
                record->potential_trace.push_back(u.total_cost);
                record->trajectory.push_back(std::move(u));
            }
        }
        changed = changed || sweep_changed;
        // a single own load is settled after one exact step
        if (!sweep_changed || mine.size() == 1) break;
    }
    return changed;
}

RunOutcome cournot(const GameKernel& k, GameKernel::State& st, std::vector<int>& starts, std::span<const int> order,
                   const DynamicsOptions& options, RunRecord* record) {
    if (options.max_rounds < 1) throw std::invalid_argument("max_rounds must be at least 1");
    check_order(k, order);
    std::unordered_set<std::vector<int>, ScheduleHash> seen;
    RunOutcome out;
    for (int round = 1; round <= options.max_rounds; ++round) {
        // Round starts form a deterministic sequence, so any recurring turn
        // state also shows up as a recurring round-start schedule.
        if (seen.count(starts)) {
            out.status = RunStatus::CycleDetected;
            out.rounds = round - 1;
            return out;
        }
        if (seen.size() < options.cycle_state_cap) seen.insert(starts);
        bool changed = false;
        for (int user : order) {
            if (k.agents_of(user).empty()) continue;
            changed = user_best_response(k, st, starts, user, options.sweep_cap, round, record) || changed;
        }
        out.rounds = round;
        if (!changed) {
            out.status = RunStatus::Converged;
            return out;
        }
    }
    out.status = RunStatus::MaxRounds;
    return out;
}

bool is_nash(const GameKernel& k, GameKernel::State& st, std::vector<int>& starts, NashMode mode, std::uint64_t cap) {
    if (mode == NashMode::PerLoad) {
        for (std::size_t a = 0; a < k.agents().size(); ++a)
            if (k.has_improving_move(st, a, starts[a])) return false;
        return true;
    }
    for (int user = 1; user <= k.users(); ++user) {
        const auto& mine = k.agents_of(user);
        if (mine.empty()) continue;
        std::uint64_t space = 1;
        for (std::size_t a : mine) {
            space *= k.agents()[a].starts.size();
            if (space > cap) throw std::length_error("user " + std::to_string(user) + " action space exceeds cap");
        }
        const Wide current = k.bill_key(st, user);
        for (std::size_t a : mine) k.place(st, a, starts[a], -1);
        std::vector<std::size_t> digit(mine.size(), 0);
        bool improving = false;
        bool done = false;
        while (!done && !improving) {
            for (std::size_t i = 0; i < mine.size(); ++i) k.place(st, mine[i], k.agents()[mine[i]].starts[digit[i]], +1);
            improving = k.bill_key(st, user) < current;
            for (std::size_t i = 0; i < mine.size(); ++i) k.place(st, mine[i], k.agents()[mine[i]].starts[digit[i]], -1);
            // odometer increment, last digit fastest
            std::size_t i = mine.size();
            while (true) {
                if (i == 0) {
                    done = true;
                    break;
                }
                --i;
                if (++digit[i] < k.agents()[mine[i]].starts.size()) break;
                digit[i] = 0;
            }
        }
        for (std::size_t a : mine) k.place(st, a, starts[a], +1);
        if (improving) return false;
    }
    return true;
}

}  // namespace detail

JointSchedule best_response(const Scenario& s, const JointSchedule& j, int user, int sweep_cap) {
    GameKernel k(s);
    if (user < 1 || user > k.users() || k.agents_of(user).empty())
        throw std::invalid_argument("user " + std::to_string(user) + " owns no shiftable load");
    auto starts = k.to_internal(j);
    auto st = k.make_state(starts);
    detail::user_best_response(k, st, starts, user, sweep_cap, 0, nullptr);
    return k.to_schedule(starts);
}

RunRecord cournot_run(const Scenario& s, const JointSchedule& initial, const std::vector<int>& order, int max_rounds,
                      DynamicsOptions options) {
    if (max_rounds < 1) throw std::invalid_argument("max_rounds must be at least 1");
    options.max_rounds = max_rounds;
    GameKernel k(s);
    auto starts = k.to_internal(initial);
    auto st = k.make_state(starts);
    RunRecord rec;
    rec.initial = initial;
    auto out = detail::cournot(k, st, starts, order, options, options.record_trace ? &rec : nullptr);
    rec.status = out.status;
    rec.rounds = out.rounds;
    rec.terminal = k.to_schedule(starts);
    return rec;
}

bool is_nash(const Scenario& s, const JointSchedule& j, NashMode mode, std::uint64_t cap) {
    GameKernel k(s);
    auto starts = k.to_internal(j);
    auto st = k.make_state(starts);
    return detail::is_nash(k, st, starts, mode, cap);
}

}  // namespace dsm
