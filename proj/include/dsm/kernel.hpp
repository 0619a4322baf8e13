#pragma once

// Exact integer evaluation of a scenario.
//
// Every rate is scaled by the common denominator D of all rates, so slot
// energies become integers n = D x. With power coefficients c_i and L the
// common denominator of the c_i, the scaled pricing polynomial
//
//     P(n) = sum_i (L c_i) n^i D^(p-i)  =  L D^p C(n / D)
//
// is an integer, and so is every cost and bill comparison key below. Keys are
// 128-bit; construction fails if the scenario's energy scale could overflow.

#include "dsm/model.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace dsm {

using Wide = __int128;

BigInt to_big(Wide w);

class GameKernel {
public:
    /// One decision-making agent per shiftable load.
    struct Agent {
        std::size_t load_index = 0;  // into Scenario::loads
        int owner = kBackgroundOwner;
        std::int64_t units = 0;      // rate * D
        int duration = 1;
        std::vector<int> starts;     // feasible starts, 0-based slots, ascending
    };

    /// Slot energies in units of 1/D kWh. `user` has K + 1 rows; row 0 is the background.
    struct State {
        std::vector<std::int64_t> aggregate;
        std::vector<std::vector<std::int64_t>> user;
    };

    /// Throws std::invalid_argument if the scenario fails validation or its scale overflows 128 bits.
    explicit GameKernel(const Scenario& s);

    const Scenario& scenario() const { return scenario_; }
    int horizon() const { return horizon_; }
    int users() const { return scenario_.users; }
    const std::vector<Agent>& agents() const { return agents_; }
    /// Agents owned by `user`, ascending.
    const std::vector<std::size_t>& agents_of(int user) const { return by_user_[static_cast<std::size_t>(user)]; }
    /// Product of feasible-start counts, saturating at UINT64_MAX.
    std::uint64_t joint_space_size() const;

    /// Start slot index (0-based) <-> public 1-based JointSchedule entries.
    std::vector<int> to_internal(const JointSchedule& j) const;
    JointSchedule to_schedule(std::span<const int> starts) const;

    State make_state(std::span<const int> starts) const;
    void place(State& st, std::size_t agent, int start, int sign) const;

    /// Scaled total cost sum_h P(n_h).
    Wide cost_key(const State& st) const;
    /// Key ordering `user`'s bill (for fixed scenario and user). Daily scheme: the cost key.
    /// Hourly scheme: sum_h (scaled x_k^h C(X^h) / X^h), which is polynomial since C(0) = 0.
    Wide bill_key(const State& st, int user) const;

    /// Exact money values.
    Money cost_money(Wide cost_key) const;
    Money bill_money(const State& st, int user) const;
    LoadProfile aggregate_profile(const State& st) const;
    Rational par(const State& st) const;

    /// Exact best start for `agent` (currently placed at `current`) holding
    /// everything else fixed, under the owner's bill. Ties keep `current`, else
    /// the lowest start. Leaves the agent placed at the returned start.
    int best_start(State& st, std::size_t agent, int current) const;
    /// True if moving `agent` alone strictly lowers its owner's bill. State is unchanged on return.
    bool has_improving_move(State& st, std::size_t agent, int current) const;

private:
    Wide pricing_scaled(std::int64_t n) const;            // P(n)
    Wide hourly_share_scaled(std::int64_t x, std::int64_t total) const;
    // Per-slot marginal key change from adding the agent's rate to each slot.
    void marginal_gains(const State& st, std::size_t agent, std::vector<Wide>& gain) const;
    Wide run_sum(const std::vector<Wide>& gain, int start, int duration) const;

    Scenario scenario_;
    int horizon_ = 1;
    Rational unit_;                  // kWh per unit, 1/D
    Rational key_scale_;             // L D^p
    std::vector<Wide> scaled_coeffs_;  // L c_i D^(p-i)
    std::vector<Agent> agents_;
    std::vector<std::vector<std::size_t>> by_user_;
    std::vector<std::int64_t> fixed_aggregate_;
    std::vector<std::vector<std::int64_t>> fixed_user_;
};

}  // namespace dsm
