#include "dsm/montecarlo.hpp"

#include "dsm/kernel.hpp"
#include "dsm/rng.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dsm {

std::uint64_t StudyResult::converged() const {
    std::uint64_t n = 0;
    for (const auto& g : groups) n += g.count;
    return n;
}

Rational StudyResult::mean_par() const { return runs > 0 ? Rational(par_sum / runs) : Rational(0); }

Money StudyResult::mean_cost() const { return Money{runs > 0 ? Rational(cost_sum / runs) : Rational(0)}; }

bool operator==(const StudyResult& a, const StudyResult& b) {
    return a.runs == b.runs && a.groups == b.groups && a.cycle_count == b.cycle_count &&
           a.max_rounds_count == b.max_rounds_count && a.par_bins == b.par_bins && a.total_rounds == b.total_rounds &&
           a.max_rounds_seen == b.max_rounds_seen && a.par_sum == b.par_sum && a.cost_sum == b.cost_sum;
}

namespace {

using GroupKey = std::pair<BigInt, BigInt>;

// Per-worker partial result. Exact sums are kept as integers in kernel units
// so the hot loop avoids rational arithmetic.
struct Partial {
    std::map<GroupKey, TerminalGroup> groups;
    std::uint64_t cycles = 0;
    std::uint64_t capped = 0;
    std::map<BigInt, std::uint64_t> bins;
    std::uint64_t total_rounds = 0;
    int max_rounds_seen = 0;
    BigInt peak_sum = 0;
    BigInt cost_key_sum = 0;

    void merge(Partial&& o) {
        for (auto& [key, g] : o.groups) {
            auto [it, inserted] = groups.try_emplace(key, g);
            if (inserted) continue;
            it->second.count += g.count;
            if (g.first_run < it->second.first_run) {
                auto count = it->second.count;
                it->second = std::move(g);
                it->second.count = count;
            }
        }
        cycles += o.cycles;
        capped += o.capped;
        for (const auto& [k, c] : o.bins) bins[k] += c;
        total_rounds += o.total_rounds;
        max_rounds_seen = std::max(max_rounds_seen, o.max_rounds_seen);
        peak_sum += o.peak_sum;
        cost_key_sum += o.cost_key_sum;
    }
};

void draw_setup(const GameKernel& k, const StudyConfig& cfg, std::uint64_t run, std::vector<int>& starts,
                std::vector<int>& order) {
    Xoshiro256StarStar rng(sub_seed(cfg.master_seed, run));
    const auto& agents = k.agents();
    starts.resize(agents.size());
    for (std::size_t a = 0; a < agents.size(); ++a) starts[a] = agents[a].starts[rng.below(agents[a].starts.size())];
    order = ascending_order(k.users());
    if (cfg.order_policy == OrderPolicy::RandomPerRun)
        for (std::size_t i = order.size(); i-- > 1;) std::swap(order[i], order[rng.below(i + 1)]);
}

void run_one(const GameKernel& k, const StudyConfig& cfg, std::uint64_t run, Partial& out) {
    std::vector<int> starts;
    std::vector<int> order;
    draw_setup(k, cfg, run, starts, order);

    auto st = k.make_state(starts);
    DynamicsOptions opts;
    opts.max_rounds = cfg.max_rounds;
    opts.sweep_cap = cfg.sweep_cap;
    opts.record_trace = false;
    auto outcome = detail::cournot(k, st, starts, order, opts, nullptr);

    out.total_rounds += static_cast<std::uint64_t>(outcome.rounds);
    out.max_rounds_seen = std::max(out.max_rounds_seen, outcome.rounds);
    const Wide cost_key = k.cost_key(st);
    std::int64_t peak = *std::max_element(st.aggregate.begin(), st.aggregate.end());
    out.peak_sum += peak;
    out.cost_key_sum += to_big(cost_key);
    if (outcome.status == RunStatus::CycleDetected) {
        ++out.cycles;
        return;
    }
    if (outcome.status == RunStatus::MaxRounds) {
        ++out.capped;
        return;
    }
    Money cost = k.cost_money(cost_key);
    Rational p = k.par(st);
    GroupKey key{round_scaled(cost.cents, 2), round_scaled(p, 2)};
    auto [it, inserted] = out.groups.try_emplace(key);
    TerminalGroup& g = it->second;
    if (inserted || run < g.first_run) {
        g.cost_hundredths = key.first;
        g.par_hundredths = key.second;
        g.total_cost = cost;
        g.par = p;
        g.first_run = run;
        g.representative = k.to_schedule(starts);
    }
    ++g.count;
    ++out.bins[floor_int((p - 1) * 100)];
}

std::vector<int> zero_starts(const GameKernel& k) {
    std::vector<int> s(k.agents().size());
    for (std::size_t a = 0; a < s.size(); ++a) s[a] = k.agents()[a].starts.front();
    return s;
}

StudyResult finish(const GameKernel& k, const StudyConfig& cfg, Partial&& total, double elapsed) {
    StudyResult r;
    r.runs = cfg.runs;
    for (auto& [key, g] : total.groups) r.groups.push_back(std::move(g));
    r.cycle_count = total.cycles;
    r.max_rounds_count = total.capped;
    r.par_bins = std::move(total.bins);
    r.total_rounds = total.total_rounds;
    r.max_rounds_seen = total.max_rounds_seen;
    const auto energy = k.make_state(zero_starts(k)).aggregate;
    const std::int64_t units = std::accumulate(energy.begin(), energy.end(), std::int64_t{0});
    r.par_sum = Rational(total.peak_sum * k.horizon(), units);
    r.cost_sum = k.cost_money(1).cents * total.cost_key_sum;
    r.elapsed_seconds = elapsed;
    return r;
}

void check_config(const StudyConfig& cfg) {
    if (cfg.runs < 1) throw std::invalid_argument("a study needs at least one run");
    if (cfg.max_rounds < 1) throw std::invalid_argument("max_rounds must be at least 1");
}

}  // namespace

StudyResult run_study_serial(const Scenario& s, const StudyConfig& cfg) {
    check_config(cfg);
    GameKernel k(s);
    auto t0 = std::chrono::steady_clock::now();
    Partial total;
    for (int i = 0; i < cfg.runs; ++i) run_one(k, cfg, static_cast<std::uint64_t>(i), total);
    std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    return finish(k, cfg, std::move(total), dt.count());
}

StudyResult run_study(const Scenario& s, const StudyConfig& cfg) {
    check_config(cfg);
    GameKernel k(s);
    auto t0 = std::chrono::steady_clock::now();
#ifdef _OPENMP
    const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#else
    const int threads = 1;
#endif
    std::vector<Partial> partials(static_cast<std::size_t>(threads));
#pragma omp parallel num_threads(threads)
    {
#ifdef _OPENMP
        Partial& mine = partials[static_cast<std::size_t>(omp_get_thread_num())];
#else
        Partial& mine = partials[0];
#endif
#pragma omp for schedule(dynamic, 16)
        for (int i = 0; i < cfg.runs; ++i) run_one(k, cfg, static_cast<std::uint64_t>(i), mine);
    }
    Partial total;
    for (auto& p : partials) total.merge(std::move(p));
    std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    return finish(k, cfg, std::move(total), dt.count());
}

RunSetup run_setup(const Scenario& s, const StudyConfig& cfg, std::uint64_t run) {
    GameKernel k(s);
    std::vector<int> starts;
    RunSetup out;
    draw_setup(k, cfg, run, starts, out.order);
    out.initial = k.to_schedule(starts);
    return out;
}

std::vector<HistogramBin> par_histogram(const StudyResult& result) {
    if (result.par_bins.empty()) throw std::invalid_argument("no converged runs to histogram");
    BigInt last = result.par_bins.rbegin()->first;
    std::vector<HistogramBin> out;
    for (BigInt k = 0; k <= last; ++k) {
        HistogramBin bin;
        bin.low = 1 + Rational(k, 100);
        bin.high = 1 + Rational(k + 1, 100);
        auto it = result.par_bins.find(k);
        bin.count = it == result.par_bins.end() ? 0 : it->second;
        out.push_back(bin);
    }
    return out;
}

FlatScenario generate_flat_scenario(int users, int loads_per_user, int horizon, std::uint64_t seed) {
    if (users < 1 || loads_per_user < 1 || horizon < 1)
        throw std::invalid_argument("users, loads per user and horizon must all be positive");
    const long long blocks = static_cast<long long>(users) * loads_per_user;
    // Lanes are horizontal strips of the flat profile; each is cut into
    // consecutive blocks, averaging about kTargetDuration slots per block.
    constexpr long long kTargetDuration = 4;
    const long long lanes = std::min<long long>(blocks, std::max<long long>(1, (blocks * kTargetDuration + horizon - 1) / horizon));

    Xoshiro256StarStar rng(seed);
    static const Rational kRates[] = {Rational(1, 2), Rational(1), Rational(3, 2), Rational(2)};

    struct Block {
        Rational rate;
        int duration;
        int start;  // 0-based
    };
    std::vector<Block> pieces;
    for (long long lane = 0; lane < lanes; ++lane) {
        const long long cuts = blocks / lanes + (lane < blocks % lanes ? 1 : 0);
        Rational rate = kRates[rng.below(4)];
        // choose cuts - 1 distinct interior cut points among 1..H-1
        std::vector<int> interior(static_cast<std::size_t>(horizon - 1));
        std::iota(interior.begin(), interior.end(), 1);
        for (std::size_t i = 0; i + 1 < static_cast<std::size_t>(cuts); ++i)
            std::swap(interior[i], interior[i + rng.below(interior.size() - i)]);
        std::vector<int> edges(interior.begin(), interior.begin() + (cuts - 1));
        edges.push_back(0);
        edges.push_back(horizon);
        std::sort(edges.begin(), edges.end());
        const int offset = static_cast<int>(rng.below(static_cast<std::uint64_t>(horizon)));
        for (std::size_t e = 0; e + 1 < edges.size(); ++e)
            pieces.push_back({rate, edges[e + 1] - edges[e], (edges[e] + offset) % horizon});
    }
    for (std::size_t i = pieces.size(); i-- > 1;) std::swap(pieces[i], pieces[rng.below(i + 1)]);

    FlatScenario out;
    Scenario& s = out.scenario;
    s.horizon = horizon;
    s.users = users;
    s.wrap_allowed = true;
    s.billing = BillingScheme::DailyProportional;
    s.pricing = PricingFunction::quadratic(1);
    for (int u = 0; u < users; ++u) {
        for (int j = 0; j < loads_per_user; ++j) {
            const Block& b = pieces[static_cast<std::size_t>(u) * static_cast<std::size_t>(loads_per_user) + static_cast<std::size_t>(j)];
            Load l;
            l.id = "u" + std::to_string(u + 1) + "-l" + std::to_string(j + 1);
            l.owner = u + 1;
            l.rate = b.rate;
            l.duration = b.duration;
            l.window_start = 1;
            l.window_end = horizon;
            l.kind = LoadKind::Shiftable;
            s.loads.push_back(std::move(l));
            out.witness.starts.push_back(b.start + 1);
        }
    }
    return out;
}

}  // namespace dsm
