#pragma once

// Best responses over discrete start times and the round-robin Cournot
// adjustment process.

#include "dsm/kernel.hpp"
#include "dsm/model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dsm {

enum class RunStatus { Converged, CycleDetected, MaxRounds };
enum class NashMode { PerLoad, PerUserExact };

std::string to_string(RunStatus status);

struct Update {
    int round = 0;
    int user = 0;
    std::string load_id;
    TimeSlot old_start = 0;
    TimeSlot new_start = 0;
    Money user_bill;   // acting user's bill after the move
    Money total_cost;  // sum_h C(X^h) after the move
};

struct RunRecord {
    JointSchedule initial;
    std::vector<Update> trajectory;
    JointSchedule terminal;
    RunStatus status = RunStatus::MaxRounds;
    int rounds = 0;
    std::vector<Money> potential_trace;
};

struct DynamicsOptions {
    int max_rounds = 1000;
    int sweep_cap = 100;                      // coordinate-descent sweeps per best response
    std::size_t cycle_state_cap = 1'000'000;  // round-start states remembered for cycle detection
    bool record_trace = true;
};

inline constexpr std::uint64_t kDefaultUserActionCap = 1'000'000;

/// Re-schedules `user`'s shiftable loads to minimize their bill with everyone else fixed.
/// Throws std::invalid_argument if the user owns no shiftable load.
JointSchedule best_response(const Scenario& s, const JointSchedule& j, int user, int sweep_cap = 100);

/// `order` is a permutation of 1..K; users without shiftable loads are skipped.
/// Throws std::invalid_argument for max_rounds < 1 or a bad order.
RunRecord cournot_run(const Scenario& s, const JointSchedule& initial, const std::vector<int>& order,
                      int max_rounds, DynamicsOptions options = {});

/// Ascending user order 1..K.
std::vector<int> ascending_order(int users);

/// Throws std::length_error in PerUserExact mode if a user's own joint action space exceeds `cap`.
bool is_nash(const Scenario& s, const JointSchedule& j, NashMode mode, std::uint64_t cap = kDefaultUserActionCap);

// Kernel-level forms, used by the enumeration and study kernels. `starts` are
// 0-based and `st` must match them on entry; both are kept in sync.
namespace detail {

struct RunOutcome {
    RunStatus status = RunStatus::MaxRounds;
    int rounds = 0;
};

bool user_best_response(const GameKernel& k, GameKernel::State& st, std::vector<int>& starts, int user,
                        int sweep_cap, int round, RunRecord* record);

RunOutcome cournot(const GameKernel& k, GameKernel::State& st, std::vector<int>& starts,
                   std::span<const int> order, const DynamicsOptions& options, RunRecord* record);

bool is_nash(const GameKernel& k, GameKernel::State& st, std::vector<int>& starts, NashMode mode,
             std::uint64_t cap);

}  // namespace detail

}  // namespace dsm
