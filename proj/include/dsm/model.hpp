#pragma once

// Domain types for the day-ahead load scheduling game: loads, scenarios,
// joint schedules, load profiles, pricing and the two billing schemes.
//
// All quantities are exact rationals. Time slots are 1-based (1..H) in every
// public interface.

#include "dsm/rational.hpp"

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace dsm {

using TimeSlot = int;

/// Owner index reserved for unowned (background) loads. Real users are 1..K.
inline constexpr int kBackgroundOwner = 0;

enum class LoadKind { Fixed, Shiftable };

/// Hourly: each slot's cost C(X^h) is split by the users' demand in that slot.
/// Daily: the day's total cost is split by the users' daily energy.
enum class BillingScheme { HourlyProportional, DailyProportional };

/// Exact amount in cents. Rounded only when rendered.
struct Money {
    Rational cents{0};

    std::string str() const;  // 2 decimals, half away from zero
    friend auto operator<=>(const Money& a, const Money& b) { return compare(a.cents, b.cents); }
    friend bool operator==(const Money& a, const Money& b) { return a.cents == b.cents; }
    friend Money operator+(Money a, const Money& b) { return Money{a.cents + b.cents}; }
};

/// Strictly convex, increasing pricing function C with C(0) = 0.
///
/// Quadratic: coefficients = {a}, C(x) = a x^2.
/// Polynomial: coefficients = {c0, c1, ..., cp}, C(x) = sum c_i x^i (c0 must be 0).
struct PricingFunction {
    enum class Kind { Quadratic, Polynomial };

    Kind kind = Kind::Quadratic;
    std::vector<Rational> coefficients{Rational(1)};

    static PricingFunction quadratic(Rational a = 1);

    /// Power-basis coefficients c0..cp regardless of kind.
    std::vector<Rational> power_coefficients() const;
    Rational operator()(const Rational& x) const;

    friend bool operator==(const PricingFunction&, const PricingFunction&) = default;
};

struct Load {
    std::string id;
    int owner = kBackgroundOwner;
    Rational rate{0};  // kWh per period
    int duration = 1;  // periods
    TimeSlot window_start = 1;
    TimeSlot window_end = 1;
    LoadKind kind = LoadKind::Shiftable;

    Rational energy() const { return rate * duration; }

    friend bool operator==(const Load&, const Load&) = default;
};

struct Scenario {
    int horizon = 1;
    int users = 1;
    std::vector<Load> loads;
    PricingFunction pricing;
    BillingScheme billing = BillingScheme::DailyProportional;
    bool wrap_allowed = false;

    /// Indices into `loads` of the shiftable loads, in declaration order. This
    /// order is the canonical order of JointSchedule entries.
    std::vector<std::size_t> shiftable_indices() const;
    /// Position of the shiftable load with this id in the canonical order.
    std::size_t shiftable_position(const std::string& load_id) const;
    Rational total_energy() const;
    Rational user_energy(int user) const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Chosen start slot of every shiftable load, in Scenario::shiftable_indices() order.
struct JointSchedule {
    std::vector<TimeSlot> starts;

    friend auto operator<=>(const JointSchedule&, const JointSchedule&) = default;
};

struct LoadProfile {
    std::vector<Rational> energy;  // kWh per slot, H entries

    Rational total() const;
    friend bool operator==(const LoadProfile&, const LoadProfile&) = default;
};

struct Violation {
    std::string load_id;  // empty for scenario-level violations
    std::string reason;
};

std::vector<Violation> validate_scenario(const Scenario& s);

/// Starts admitted by the load's window. A fixed load has exactly one. With wrap
/// enabled a shiftable load may start anywhere in its window and run past the end
/// of the day; otherwise the whole run must fit inside the window.
std::vector<TimeSlot> feasible_starts(const Load& load, int horizon, bool wrap);

/// Slots covered by a run starting at `start`, in running order.
/// Throws std::invalid_argument if the run overflows the day without wrap.
std::vector<TimeSlot> occupied_slots(const Load& load, TimeSlot start, int horizon, bool wrap);

/// Throws std::invalid_argument naming the first mismatch between j and s.
void check_schedule(const Scenario& s, const JointSchedule& j);

struct Expansion {
    std::vector<LoadProfile> per_user;  // index 0 is the background, 1..K are users
    LoadProfile aggregate;
};

Expansion expand(const Scenario& s, const JointSchedule& j);

Money total_cost(const LoadProfile& profile, const PricingFunction& c);

Money user_bill_hourly(const Scenario& s, const JointSchedule& j, int user);
Money user_bill_daily(const Scenario& s, const JointSchedule& j, int user);
/// Bill under the scenario's configured scheme. `user` may be kBackgroundOwner.
Money user_bill(const Scenario& s, const JointSchedule& j, int user);

/// Peak slot energy over mean slot energy (mean over all H slots).
/// Throws std::domain_error for an all-zero profile.
Rational par(const LoadProfile& profile);

std::string to_string(BillingScheme scheme);
BillingScheme parse_billing_scheme(const std::string& text);

}  // namespace dsm
