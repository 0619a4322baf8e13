#pragma once

// Seeded random-initialization convergence studies and the flat-profile
// scenario generator.
//
// Run i draws every shiftable load's initial start uniformly from its feasible
// starts (in canonical load order) from Xoshiro256StarStar(sub_seed(master, i)),
// then, under RandomPerRun, shuffles the turn order with Fisher-Yates from the
// same stream. Aggregation only adds counts and exact sums, so the result does
// not depend on how runs are spread over threads.

#include "dsm/dynamics.hpp"
#include "dsm/model.hpp"

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace dsm {

enum class OrderPolicy { Ascending, RandomPerRun };

struct StudyConfig {
    int runs = 1000;
    std::uint64_t master_seed = 0;
    OrderPolicy order_policy = OrderPolicy::Ascending;
    int max_rounds = 1000;
    int sweep_cap = 100;
    int threads = 0;  // 0: OpenMP default
};

/// Converged terminal states sharing total cost and PAR at 0.01 resolution.
struct TerminalGroup {
    BigInt cost_hundredths;  // total cost in 1/100 cent, rounded
    BigInt par_hundredths;
    Money total_cost;        // exact, of the representative
    Rational par{0};         // exact, of the representative
    std::uint64_t count = 0;
    std::uint64_t first_run = 0;  // lowest run index reaching this group
    JointSchedule representative;  // terminal schedule of first_run

    friend bool operator==(const TerminalGroup&, const TerminalGroup&) = default;
};

struct StudyResult {
    int runs = 0;
    std::vector<TerminalGroup> groups;  // ascending by (cost, PAR)
    std::uint64_t cycle_count = 0;
    std::uint64_t max_rounds_count = 0;
    std::map<BigInt, std::uint64_t> par_bins;  // bin k covers [1 + k/100, 1 + (k+1)/100), converged runs
    std::uint64_t total_rounds = 0;
    int max_rounds_seen = 0;
    Rational par_sum{0};   // over all runs' terminal states
    Rational cost_sum{0};  // cents, over all runs' terminal states
    double elapsed_seconds = 0;  // wall clock; excluded from comparisons

    std::uint64_t converged() const;
    Rational mean_par() const;
    Money mean_cost() const;
    friend bool operator==(const StudyResult& a, const StudyResult& b);
};

/// Throws std::invalid_argument for runs < 1 or an invalid scenario.
StudyResult run_study(const Scenario& s, const StudyConfig& cfg);
/// Single-threaded reference; equal to run_study for every configuration.
StudyResult run_study_serial(const Scenario& s, const StudyConfig& cfg);

/// Initial schedule and turn order drawn for run `run` of a study.
struct RunSetup {
    JointSchedule initial;
    std::vector<int> order;
};
RunSetup run_setup(const Scenario& s, const StudyConfig& cfg, std::uint64_t run);

struct HistogramBin {
    Rational low{0};
    Rational high{0};
    std::uint64_t count = 0;
};

/// Contiguous 0.01-wide bins from 1.00 up to the bin holding the largest PAR.
/// Throws std::invalid_argument when no run converged.
std::vector<HistogramBin> par_histogram(const StudyResult& result);

struct FlatScenario {
    Scenario scenario;
    JointSchedule witness;  // a schedule whose aggregate profile is flat
};

/// Tiles a flat day profile with rectangular blocks (rate x duration), deals the
/// blocks to users at random and emits them as full-day shiftable loads with wrap.
/// Throws std::invalid_argument for non-positive parameters.
FlatScenario generate_flat_scenario(int users, int loads_per_user, int horizon, std::uint64_t seed);

}  // namespace dsm
