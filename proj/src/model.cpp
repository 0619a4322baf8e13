#include "dsm/model.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace dsm {

std::string Money::str() const { return to_fixed(cents, 2); }

PricingFunction PricingFunction::quadratic(Rational a) {
    return PricingFunction{Kind::Quadratic, {std::move(a)}};
}

std::vector<Rational> PricingFunction::power_coefficients() const {
    if (kind == Kind::Quadratic) {
        Rational a = coefficients.empty() ? Rational(0) : coefficients.front();
        return {Rational(0), Rational(0), a};
    }
    return coefficients;
}

Rational PricingFunction::operator()(const Rational& x) const {
    auto c = power_coefficients();
    Rational acc = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;  // Horner
    return acc;
}

std::vector<std::size_t> Scenario::shiftable_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < loads.size(); ++i)
        if (loads[i].kind == LoadKind::Shiftable) out.push_back(i);
    return out;
}

std::size_t Scenario::shiftable_position(const std::string& load_id) const {
    auto idx = shiftable_indices();
    for (std::size_t p = 0; p < idx.size(); ++p)
        if (loads[idx[p]].id == load_id) return p;
    throw std::invalid_argument("no shiftable load with id '" + load_id + "'");
}

Rational Scenario::total_energy() const {
    Rational e = 0;
    for (const auto& l : loads) e += l.energy();
    return e;
}

Rational Scenario::user_energy(int user) const {
    Rational e = 0;
    for (const auto& l : loads)
        if (l.owner == user) e += l.energy();
    return e;
}

Rational LoadProfile::total() const {
    Rational e = 0;
    for (const auto& x : energy) e += x;
    return e;
}

std::vector<Violation> validate_scenario(const Scenario& s) {
    std::vector<Violation> out;
    if (s.horizon < 1) out.push_back({"", "horizon must be at least 1"});
    if (s.users < 1) out.push_back({"", "users must be at least 1"});

    auto coeffs = s.pricing.power_coefficients();
    bool negative = std::any_of(coeffs.begin(), coeffs.end(), [](const Rational& c) { return c < 0; });
    if (negative) out.push_back({"", "pricing coefficients must be nonnegative"});
    if (s.pricing.kind == PricingFunction::Kind::Quadratic && s.pricing.coefficients.size() != 1)
        out.push_back({"", "quadratic pricing takes exactly one coefficient"});
    if (!coeffs.empty() && coeffs.front() != 0) out.push_back({"", "pricing must satisfy C(0) = 0"});
    bool convex = false;
    for (std::size_t i = 2; i < coeffs.size(); ++i) convex = convex || coeffs[i] > 0;
    if (!convex) out.push_back({"", "pricing must be strictly convex (some coefficient of degree >= 2 positive)"});

    std::set<std::string> ids;
    bool any_shiftable = false;
    for (const auto& l : s.loads) {
        auto bad = [&](std::string reason) { out.push_back({l.id, std::move(reason)}); };
        if (l.id.empty()) bad("load id must be nonempty");
        if (!ids.insert(l.id).second) bad("duplicate load id");
        if (l.owner != kBackgroundOwner && (l.owner < 1 || l.owner > s.users)) bad("owner out of range");
        if (l.rate <= 0) bad("rate must be positive");
        if (l.duration < 1) bad("duration must be positive");
        if (s.horizon >= 1 && l.duration > s.horizon) bad("duration exceeds horizon");
        if (l.window_start < 1 || l.window_end > s.horizon || l.window_start > l.window_end) {
            bad("window must lie within [1, H] with start <= end");
            continue;
        }
        int length = l.window_end - l.window_start + 1;
        if (l.kind == LoadKind::Fixed) {
            if (length != l.duration) bad("fixed load window length must equal duration");
        } else {
            any_shiftable = true;
            if (l.owner == kBackgroundOwner) bad("background loads must be fixed");
            if (!s.wrap_allowed && length < l.duration) bad("no feasible start");
        }
    }
    if (!any_shiftable) out.push_back({"", "scenario has no shiftable load"});
    return out;
}

std::vector<TimeSlot> feasible_starts(const Load& load, int horizon, bool wrap) {
    if (load.kind == LoadKind::Fixed) return {load.window_start};
    std::vector<TimeSlot> out;
    TimeSlot last = wrap ? load.window_end : load.window_end - load.duration + 1;
    for (TimeSlot t = load.window_start; t <= last && t <= horizon; ++t) out.push_back(t);
    return out;
}

std::vector<TimeSlot> occupied_slots(const Load& load, TimeSlot start, int horizon, bool wrap) {
    if (start < 1 || start > horizon) throw std::invalid_argument("start slot outside the day for load '" + load.id + "'");
    if (!wrap && start + load.duration - 1 > horizon)
        throw std::invalid_argument("run of load '" + load.id + "' overflows the day without wrap");
    std::vector<TimeSlot> out;
    out.reserve(static_cast<std::size_t>(load.duration));
    for (int i = 0; i < load.duration; ++i) out.push_back((start - 1 + i) % horizon + 1);
    return out;
}

void check_schedule(const Scenario& s, const JointSchedule& j) {
    auto idx = s.shiftable_indices();
    if (j.starts.size() != idx.size())
        throw std::invalid_argument("schedule has " + std::to_string(j.starts.size()) + " entries, scenario has " +
                                    std::to_string(idx.size()) + " shiftable loads");
    for (std::size_t p = 0; p < idx.size(); ++p) {
        const Load& l = s.loads[idx[p]];
        auto starts = feasible_starts(l, s.horizon, s.wrap_allowed);
        if (!std::binary_search(starts.begin(), starts.end(), j.starts[p]))
            throw std::invalid_argument("start " + std::to_string(j.starts[p]) + " infeasible for load '" + l.id + "'");
    }
}

Expansion expand(const Scenario& s, const JointSchedule& j) {
    check_schedule(s, j);
    const auto h = static_cast<std::size_t>(s.horizon);
    Expansion e;
    e.per_user.assign(static_cast<std::size_t>(s.users) + 1, LoadProfile{std::vector<Rational>(h)});
    e.aggregate.energy.assign(h, Rational(0));
    std::size_t pos = 0;
    for (const auto& l : s.loads) {
        TimeSlot start = l.kind == LoadKind::Fixed ? l.window_start : j.starts[pos++];
        for (TimeSlot t : occupied_slots(l, start, s.horizon, s.wrap_allowed)) {
            auto slot = static_cast<std::size_t>(t - 1);
            e.per_user[static_cast<std::size_t>(l.owner)].energy[slot] += l.rate;
            e.aggregate.energy[slot] += l.rate;
        }
    }
    return e;
}

Money total_cost(const LoadProfile& profile, const PricingFunction& c) {
    Money m;
    for (const auto& x : profile.energy) m.cents += c(x);
    return m;
}

namespace {

void check_user(const Scenario& s, int user) {
    if (user < 0 || user > s.users) throw std::invalid_argument("user " + std::to_string(user) + " out of range");
}

}  // namespace

Money user_bill_hourly(const Scenario& s, const JointSchedule& j, int user) {
    check_user(s, user);
    auto e = expand(s, j);
    const auto& mine = e.per_user[static_cast<std::size_t>(user)].energy;
    Money m;
    for (std::size_t h = 0; h < mine.size(); ++h) {
        const Rational& total = e.aggregate.energy[h];
        if (total == 0) continue;  // 0/0 slots contribute nothing
        m.cents += mine[h] / total * s.pricing(total);
    }
    return m;
}

Money user_bill_daily(const Scenario& s, const JointSchedule& j, int user) {
    check_user(s, user);
    auto e = expand(s, j);
    Rational total = e.aggregate.total();
    if (total == 0) throw std::domain_error("zero total energy");
    Rational mine = e.per_user[static_cast<std::size_t>(user)].total();
    return Money{mine / total * total_cost(e.aggregate, s.pricing).cents};
}

Money user_bill(const Scenario& s, const JointSchedule& j, int user) {
    return s.billing == BillingScheme::HourlyProportional ? user_bill_hourly(s, j, user) : user_bill_daily(s, j, user);
}

Rational par(const LoadProfile& profile) {
    if (profile.energy.empty()) throw std::domain_error("PAR of an empty profile");
    Rational total = profile.total();
    if (total == 0) throw std::domain_error("PAR of an all-zero profile");
    Rational peak = *std::max_element(profile.energy.begin(), profile.energy.end());
    return peak * static_cast<int>(profile.energy.size()) / total;
}

std::string to_string(BillingScheme scheme) {
    return scheme == BillingScheme::HourlyProportional ? "hourly" : "daily";
}

BillingScheme parse_billing_scheme(const std::string& text) {
    if (text == "hourly") return BillingScheme::HourlyProportional;
    if (text == "daily") return BillingScheme::DailyProportional;
    throw std::invalid_argument("unknown billing scheme '" + text + "' (expected hourly or daily)");
}

}  // namespace dsm
