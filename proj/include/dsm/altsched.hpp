#pragma once

// Alternative scheduling mechanisms: utility pre-scheduling of large loads
// followed by user-level Cournot play, and stateless epsilon-greedy Q-learning
// in repeated play.

#include "dsm/model.hpp"
#include "dsm/montecarlo.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dsm {

/// Start slot chosen by the utility for each centrally scheduled load.
struct PartialSchedule {
    std::map<std::string, TimeSlot> starts;  // load id -> start
    bool exact = true;                       // false if the greedy fallback was used
};

/// Schedules every shiftable load with energy strictly above `threshold_kwh`
/// to minimize sum_h C(X^h) given the fixed loads alone. Exhaustive when the
/// large loads' joint space is at most `cap`, otherwise greedy by descending
/// energy (ties to the lower start).
PartialSchedule central_schedule_large(const Scenario& s, const Rational& threshold_kwh,
                                       std::uint64_t cap = 10'000'000);

/// The scenario with the given loads pinned at their central starts. Pinned
/// loads stay shiftable with a single feasible start, so schedules keep their shape.
Scenario pin_loads(const Scenario& s, const PartialSchedule& central);

struct TwoPhaseResult {
    PartialSchedule central;
    Scenario pinned;                 // scenario seen by the users in phase 2
    JointSchedule final_schedule;    // terminal schedule of run 0
    StudyResult two_phase;
    StudyResult plain;
};

/// Phase 1 pins the large loads; phase 2 runs `run_study` on the pinned
/// scenario. `plain` is the same study on the original scenario with the same
/// seeds. A threshold at or above every load's energy leaves phase 1 empty.
TwoPhaseResult two_phase_study(const Scenario& s, const Rational& threshold_kwh, const StudyConfig& cfg,
                               std::uint64_t cap = 10'000'000);

struct QLearningConfig {
    int episodes = 1000;
    double epsilon = 0.1;
    double epsilon_decay = 1.0;  // epsilon *= decay after every episode
    double learning_rate = 0.1;
    std::uint64_t seed = 0;
};

struct QEpisode {
    int episode = 0;  // 1-based
    Money total_cost;
    Rational par{0};
};

struct QLearningResult {
    std::vector<QEpisode> trace;
    /// Action values per shiftable load (canonical order), one per feasible start.
    std::vector<std::vector<double>> q_values;
    /// How often each start was played, same shape as q_values.
    std::vector<std::vector<std::uint64_t>> action_counts;
    JointSchedule final_schedule;  // greedy joint action after learning
};

/// Throws std::invalid_argument for episodes < 1, epsilon outside [0, 1],
/// learning_rate outside (0, 1] or decay outside [0, 1].
QLearningResult q_learning_repeated(const Scenario& s, const QLearningConfig& cfg);

}  // namespace dsm
