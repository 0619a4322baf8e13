#include "dsm/kernel.hpp"

#include <limits>
#include <stdexcept>

namespace dsm {

namespace {

Wide to_wide(const BigInt& v) {
    // Callers have bounded |v| < 2^125.
    bool negative = v < 0;
    BigInt mag = negative ? BigInt(-v) : v;
    auto lo = static_cast<unsigned long long>(mag & BigInt(std::numeric_limits<unsigned long long>::max()));
    auto hi = static_cast<unsigned long long>(mag >> 64);
    Wide w = (static_cast<Wide>(hi) << 64) | static_cast<Wide>(lo);
    return negative ? -w : w;
}

}  // namespace

BigInt to_big(Wide w) {
    bool negative = w < 0;
    unsigned __int128 mag = negative ? static_cast<unsigned __int128>(-w) : static_cast<unsigned __int128>(w);
    BigInt v = static_cast<unsigned long long>(mag >> 64);
    v <<= 64;
    v += static_cast<unsigned long long>(mag & std::numeric_limits<unsigned long long>::max());
    return negative ? BigInt(-v) : v;
}

GameKernel::GameKernel(const Scenario& s) : scenario_(s), horizon_(s.horizon) {
    auto violations = validate_scenario(s);
    if (!violations.empty()) {
        std::string msg = "invalid scenario:";
        for (const auto& v : violations) msg += " [" + (v.load_id.empty() ? std::string("scenario") : v.load_id) + ": " + v.reason + "]";
        throw std::invalid_argument(msg);
    }

    BigInt d = 1;
    for (const auto& l : s.loads) d = boost::multiprecision::lcm(d, boost::multiprecision::denominator(l.rate));
    unit_ = Rational(1, d);

    auto coeffs = s.pricing.power_coefficients();
    while (coeffs.size() > 1 && coeffs.back() == 0) coeffs.pop_back();
    const auto degree = static_cast<int>(coeffs.size()) - 1;
    BigInt l_den = 1;
    for (const auto& c : coeffs) l_den = boost::multiprecision::lcm(l_den, boost::multiprecision::denominator(c));
    BigInt d_pow = 1;
    for (int i = 0; i < degree; ++i) d_pow *= d;
    key_scale_ = Rational(l_den * d_pow);

    BigInt max_units = 0;
    const auto users = static_cast<std::size_t>(s.users);
    fixed_aggregate_.assign(static_cast<std::size_t>(horizon_), 0);
    fixed_user_.assign(users + 1, std::vector<std::int64_t>(static_cast<std::size_t>(horizon_), 0));
    by_user_.assign(users + 1, {});
    const BigInt int64_max = std::numeric_limits<std::int64_t>::max();
    for (std::size_t i = 0; i < s.loads.size(); ++i) {
        const Load& l = s.loads[i];
        BigInt u = boost::multiprecision::numerator(Rational(l.rate * d));
        max_units += u;
        if (max_units > int64_max) throw std::invalid_argument("scenario energy scale exceeds 64-bit slot units");
        auto units = static_cast<std::int64_t>(u);
        if (l.kind == LoadKind::Fixed) {
            for (TimeSlot t : occupied_slots(l, l.window_start, horizon_, s.wrap_allowed)) {
                fixed_aggregate_[static_cast<std::size_t>(t - 1)] += units;
                fixed_user_[static_cast<std::size_t>(l.owner)][static_cast<std::size_t>(t - 1)] += units;
            }
            continue;
        }
        Agent a;
        a.load_index = i;
        a.owner = l.owner;
        a.units = units;
        a.duration = l.duration;
        for (TimeSlot t : feasible_starts(l, horizon_, s.wrap_allowed)) a.starts.push_back(t - 1);
        by_user_[static_cast<std::size_t>(l.owner)].push_back(agents_.size());
        agents_.push_back(std::move(a));
    }

    // Largest possible key magnitude: H * sum_i |L c_i D^(p-i)| * Nmax^i.
    BigInt bound = 0;
    BigInt n_pow = 1;
    for (int i = 0; i <= degree; ++i) {
        BigInt dp = 1;
        for (int k = 0; k < degree - i; ++k) dp *= d;
        BigInt scaled = boost::multiprecision::numerator(Rational(coeffs[static_cast<std::size_t>(i)] * l_den)) * dp;
        scaled_coeffs_.push_back(0);
        bound += scaled * n_pow;
        n_pow *= (max_units + 1);
    }
    bound *= (horizon_ + 1);
    if (bound >= (BigInt(1) << 124)) throw std::invalid_argument("scenario energy scale overflows 128-bit cost keys");
    for (int i = 0; i <= degree; ++i) {
        BigInt dp = 1;
        for (int k = 0; k < degree - i; ++k) dp *= d;
        scaled_coeffs_[static_cast<std::size_t>(i)] =
            to_wide(boost::multiprecision::numerator(Rational(coeffs[static_cast<std::size_t>(i)] * l_den)) * dp);
    }
}

std::uint64_t GameKernel::joint_space_size() const {
    std::uint64_t n = 1;
    for (const auto& a : agents_) {
        std::uint64_t k = a.starts.size();
        if (n > std::numeric_limits<std::uint64_t>::max() / k) return std::numeric_limits<std::uint64_t>::max();
        n *= k;
    }
    return n;
}

std::vector<int> GameKernel::to_internal(const JointSchedule& j) const {
    check_schedule(scenario_, j);
    std::vector<int> out(j.starts.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = j.starts[i] - 1;
    return out;
}

JointSchedule GameKernel::to_schedule(std::span<const int> starts) const {
    JointSchedule j;
    j.starts.reserve(starts.size());
    for (int s : starts) j.starts.push_back(s + 1);
    return j;
}

GameKernel::State GameKernel::make_state(std::span<const int> starts) const {
    State st{fixed_aggregate_, fixed_user_};
    for (std::size_t a = 0; a < agents_.size(); ++a) place(st, a, starts[a], +1);
    return st;
}

void GameKernel::place(State& st, std::size_t agent, int start, int sign) const {
    const Agent& a = agents_[agent];
    auto& mine = st.user[static_cast<std::size_t>(a.owner)];
    const std::int64_t delta = sign * a.units;
    int slot = start;
    for (int i = 0; i < a.duration; ++i) {
        st.aggregate[static_cast<std::size_t>(slot)] += delta;
        mine[static_cast<std::size_t>(slot)] += delta;
        if (++slot == horizon_) slot = 0;
    }
}

Wide GameKernel::pricing_scaled(std::int64_t n) const {
    Wide acc = 0;
    for (auto it = scaled_coeffs_.rbegin(); it != scaled_coeffs_.rend(); ++it) acc = acc * n + *it;
    return acc;
}

Wide GameKernel::hourly_share_scaled(std::int64_t x, std::int64_t total) const {
    if (x == 0) return 0;
    // x * sum_{i>=1} s_i X^(i-1)
    Wide acc = 0;
    for (std::size_t i = scaled_coeffs_.size(); i-- > 1;) acc = acc * total + scaled_coeffs_[i];
    return acc * x;
}

Wide GameKernel::cost_key(const State& st) const {
    Wide sum = 0;
    for (auto n : st.aggregate) sum += pricing_scaled(n);
    return sum;
}

Wide GameKernel::bill_key(const State& st, int user) const {
    if (scenario_.billing == BillingScheme::DailyProportional) return cost_key(st);
    const auto& mine = st.user[static_cast<std::size_t>(user)];
    Wide sum = 0;
    for (std::size_t h = 0; h < mine.size(); ++h) sum += hourly_share_scaled(mine[h], st.aggregate[h]);
    return sum;
}

Money GameKernel::cost_money(Wide key) const { return Money{Rational(to_big(key)) / key_scale_}; }

Money GameKernel::bill_money(const State& st, int user) const {
    if (scenario_.billing == BillingScheme::HourlyProportional)
        return Money{Rational(to_big(bill_key(st, user))) / key_scale_};
    std::int64_t mine = 0;
    std::int64_t total = 0;
    for (std::size_t h = 0; h < st.aggregate.size(); ++h) {
        mine += st.user[static_cast<std::size_t>(user)][h];
        total += st.aggregate[h];
    }
    return Money{Rational(mine, total) * cost_money(cost_key(st)).cents};
}

LoadProfile GameKernel::aggregate_profile(const State& st) const {
    LoadProfile p;
    p.energy.reserve(st.aggregate.size());
    for (auto n : st.aggregate) p.energy.push_back(Rational(n) * unit_);
    return p;
}

Rational GameKernel::par(const State& st) const {
    std::int64_t peak = 0;
    std::int64_t total = 0;
    for (auto n : st.aggregate) {
        peak = std::max(peak, n);
        total += n;
    }
    if (total == 0) throw std::domain_error("PAR of an all-zero profile");
    return Rational(peak * horizon_, total);
}

void GameKernel::marginal_gains(const State& st, std::size_t agent, std::vector<Wide>& gain) const {
    const Agent& a = agents_[agent];
    gain.resize(static_cast<std::size_t>(horizon_));
    const std::int64_t r = a.units;
    if (scenario_.billing == BillingScheme::DailyProportional) {
        for (std::size_t h = 0; h < gain.size(); ++h) {
            auto n = st.aggregate[h];
            gain[h] = pricing_scaled(n + r) - pricing_scaled(n);
        }
        return;
    }
    const auto& mine = st.user[static_cast<std::size_t>(a.owner)];
    for (std::size_t h = 0; h < gain.size(); ++h) {
        auto n = st.aggregate[h];
        auto x = mine[h];
        gain[h] = hourly_share_scaled(x + r, n + r) - hourly_share_scaled(x, n);
    }
}

Wide GameKernel::run_sum(const std::vector<Wide>& gain, int start, int duration) const {
    Wide sum = 0;
    int slot = start;
    for (int i = 0; i < duration; ++i) {
        sum += gain[static_cast<std::size_t>(slot)];
        if (++slot == horizon_) slot = 0;
    }
    return sum;
}

int GameKernel::best_start(State& st, std::size_t agent, int current) const {
    const Agent& a = agents_[agent];
    if (a.starts.size() == 1) return current;
    place(st, agent, current, -1);
    thread_local std::vector<Wide> gain;
    marginal_gains(st, agent, gain);
    Wide best = run_sum(gain, current, a.duration);
    int choice = current;
    for (int s : a.starts) {
        if (s == current) continue;
        Wide v = run_sum(gain, s, a.duration);
        // starts ascend, so strict improvement keeps the lowest index among ties
        if (v < best) {
            best = v;
            choice = s;
        }
    }
    place(st, agent, choice, +1);
    return choice;
}

bool GameKernel::has_improving_move(State& st, std::size_t agent, int current) const {
    const Agent& a = agents_[agent];
    if (a.starts.size() == 1) return false;
    place(st, agent, current, -1);
    thread_local std::vector<Wide> gain;
    marginal_gains(st, agent, gain);
    Wide here = run_sum(gain, current, a.duration);
    bool improving = false;
    for (int s : a.starts) {
        if (s != current && run_sum(gain, s, a.duration) < here) {
            improving = true;
            break;
        }
    }
    place(st, agent, current, +1);
    return improving;
}

}  // namespace dsm
