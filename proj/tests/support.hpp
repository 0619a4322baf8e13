#pragma once

// Shared fixtures and brute-force oracles for the test binaries. The oracles
// deliberately go through the rational model functions only, never the
// integer kernel.

#include "dsm/model.hpp"
#include "dsm/scenario_io.hpp"

#include <random>
#include <string>
#include <vector>

namespace dsm::testing {

inline std::string data_path(const std::string& name) { return std::string(DSM_DATA_DIR) + "/" + name; }

inline Scenario scenario1() { return load_scenario(data_path("scenario1.json")); }
inline Scenario scenario2() { return load_scenario(data_path("scenario2.json")); }
inline Scenario scenario2_thirds() { return load_scenario(data_path("scenario2_thirds.json")); }

inline JointSchedule js(std::vector<TimeSlot> starts) { return JointSchedule{std::move(starts)}; }

// Every joint schedule of s, lexicographic with the first load most significant.
inline std::vector<JointSchedule> all_schedules(const Scenario& s) {
    std::vector<std::vector<TimeSlot>> options;
    for (std::size_t i : s.shiftable_indices()) options.push_back(feasible_starts(s.loads[i], s.horizon, s.wrap_allowed));
    std::vector<JointSchedule> out;
    std::vector<std::size_t> digit(options.size(), 0);
    for (;;) {
        JointSchedule j;
        for (std::size_t i = 0; i < options.size(); ++i) j.starts.push_back(options[i][digit[i]]);
        out.push_back(j);
        std::size_t i = options.size();
        while (true) {
            if (i == 0) return out;
            --i;
            if (++digit[i] < options[i].size()) break;
            digit[i] = 0;
        }
    }
}

// No single load can move to strictly lower its owner's bill.
inline bool brute_force_is_nash(const Scenario& s, const JointSchedule& j) {
    const auto idx = s.shiftable_indices();
    for (std::size_t p = 0; p < idx.size(); ++p) {
        const Load& l = s.loads[idx[p]];
        const Money here = user_bill(s, j, l.owner);
        for (TimeSlot t : feasible_starts(l, s.horizon, s.wrap_allowed)) {
            JointSchedule alt = j;
            alt.starts[p] = t;
            if (user_bill(s, alt, l.owner) < here) return false;
        }
    }
    return true;
}

inline std::vector<JointSchedule> brute_force_ne(const Scenario& s) {
    std::vector<JointSchedule> out;
    for (const auto& j : all_schedules(s))
        if (brute_force_is_nash(s, j)) out.push_back(j);
    return out;
}

// Small random scenario: up to `max_users` users with one shiftable load each,
// optional owned and background fixed loads.
inline Scenario random_tiny_scenario(std::mt19937_64& rng, int max_users = 3, int max_horizon = 4,
                                     int loads_per_user = 1) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    static const Rational rates[] = {Rational(1, 2), Rational(1), Rational(3, 2), Rational(2), Rational(5, 2), Rational(2, 3)};
    Scenario s;
    s.horizon = pick(2, max_horizon);
    s.users = pick(1, max_users);
    s.wrap_allowed = pick(0, 1) == 1;
    s.billing = pick(0, 1) == 1 ? BillingScheme::DailyProportional : BillingScheme::HourlyProportional;
    s.pricing = pick(0, 2) == 0 ? PricingFunction{PricingFunction::Kind::Polynomial, {0, 1, 1, Rational(1, 2)}}
                                : PricingFunction::quadratic(Rational(pick(1, 3)));
    int n = 0;
    auto fixed = [&](int owner) {
        Load l;
        l.id = "f" + std::to_string(++n);
        l.owner = owner;
        l.kind = LoadKind::Fixed;
        l.rate = rates[pick(0, 5)];
        l.duration = pick(1, s.horizon);
        l.window_start = pick(1, s.horizon - l.duration + 1);
        l.window_end = l.window_start + l.duration - 1;
        s.loads.push_back(l);
    };
    if (pick(0, 1)) fixed(kBackgroundOwner);
    for (int u = 1; u <= s.users; ++u) {
        if (pick(0, 2) == 0) fixed(u);
        for (int j = 0; j < loads_per_user; ++j) {
            Load l;
            l.id = "s" + std::to_string(++n);
            l.owner = u;
            l.rate = rates[pick(0, 5)];
            l.duration = pick(1, s.horizon);
            l.kind = LoadKind::Shiftable;
            if (s.wrap_allowed) {
                l.window_start = pick(1, s.horizon);
                l.window_end = pick(l.window_start, s.horizon);
            } else {
                l.window_start = pick(1, s.horizon - l.duration + 1);
                l.window_end = pick(l.window_start + l.duration - 1, s.horizon);
            }
            s.loads.push_back(l);
        }
    }
    return s;
}

inline JointSchedule random_schedule(std::mt19937_64& rng, const Scenario& s) {
    JointSchedule j;
    for (std::size_t i : s.shiftable_indices()) {
        auto f = feasible_starts(s.loads[i], s.horizon, s.wrap_allowed);
        j.starts.push_back(f[std::uniform_int_distribution<std::size_t>(0, f.size() - 1)(rng)]);
    }
    return j;
}

}  // namespace dsm::testing
