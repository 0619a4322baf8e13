#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dsm/kernel.hpp"
#include "dsm/model.hpp"
#include "dsm/rational.hpp"
#include "dsm/scenario_io.hpp"
#include "support.hpp"

#include <algorithm>

using namespace dsm;
using dsm::testing::js;

TEST_CASE("parse_rational is exact") {
    CHECK(parse_rational("3") == Rational(3));
    CHECK(parse_rational("-2") == Rational(-2));
    CHECK(parse_rational("0.67") == Rational(67, 100));
    CHECK(parse_rational("2/3") == Rational(2, 3));
    CHECK(parse_rational("1.5e-1") == Rational(3, 20));
    CHECK(parse_rational("2.5E2") == Rational(250));
    CHECK(parse_rational("-0.5") == Rational(-1, 2));
    CHECK(parse_rational(" 1 ") == Rational(1));
    for (const char* bad : {"", "abc", "1/0", "1.2.3", "1/", "e5", "0x10", "1 2", "1 /2"})
        CHECK_THROWS_AS(parse_rational(bad), std::invalid_argument);
}

TEST_CASE("exact text round trip") {
    for (Rational r : {Rational(0), Rational(7), Rational(-3, 4), Rational(67, 100), Rational(1, 3)})
        CHECK(parse_rational(to_string_exact(r)) == r);
    CHECK(to_string_exact(Rational(3, 2)) == "3/2");
}

TEST_CASE("fixed-point rendering rounds half away from zero") {
    CHECK(to_fixed(Rational(1, 200), 2) == "0.01");
    CHECK(to_fixed(Rational(-1, 200), 2) == "-0.01");
    CHECK(to_fixed(Rational(1, 201), 2) == "0.00");
    CHECK(to_fixed(Rational(2675, 1000), 2) == "2.68");
    CHECK(to_fixed(Rational(10, 7), 4) == "1.4286");
    CHECK(to_fixed(Rational(5), 2) == "5.00");
    CHECK(to_fixed(Rational(-1, 1000), 2) == "0.00");
    CHECK(round_scaled(Rational(15758, 100), 1) == BigInt(1576));
    CHECK(floor_int(Rational(-1, 2)) == BigInt(-1));
    CHECK(floor_int(Rational(7, 2)) == BigInt(3));
    CHECK(Money{Rational(3157, 200)}.str() == "15.79");
}

TEST_CASE("scenario I is valid and expands as computed by hand") {
    auto s = testing::scenario1();
    CHECK(validate_scenario(s).empty());
    auto e = expand(s, js({1, 3}));
    CHECK(e.aggregate.energy == std::vector<Rational>{3, 5, Rational(5, 2)});
    CHECK(total_cost(e.aggregate, s.pricing).cents == Rational(161, 4));  // 40.25
    auto e22 = expand(s, js({2, 2}));
    CHECK(e22.aggregate.energy == std::vector<Rational>{1, Rational(19, 2), 0});
    CHECK(total_cost(e22.aggregate, s.pricing).cents == Rational(365, 4));  // 91.25
    CHECK(par(e.aggregate) == Rational(10, 7));
}

TEST_CASE("daily bills reproduce the scenario I matrix") {
    auto s = testing::scenario1();
    const char* expected[3][3][2] = {
        {{"15.79", "39.46"}, {"18.64", "46.61"}, {"11.50", "28.75"}},
        {{"17.50", "43.75"}, {"26.07", "65.18"}, {"16.07", "40.18"}},
        {{"11.79", "29.46"}, {"17.50", "43.75"}, {"13.21", "33.04"}},
    };
    for (int a = 1; a <= 3; ++a) {
        for (int b = 1; b <= 3; ++b) {
            CAPTURE(a);
            CAPTURE(b);
            CHECK(user_bill_daily(s, js({a, b}), 1).str() == expected[a - 1][b - 1][0]);
            CHECK(user_bill_daily(s, js({a, b}), 2).str() == expected[a - 1][b - 1][1]);
        }
    }
}

TEST_CASE("hourly bills") {
    auto s = testing::scenario1();
    CHECK(user_bill_hourly(s, js({1, 1}), 1).cents == Rational(33, 2));  // (3/5.5) * 30.25
    CHECK(user_bill_hourly(s, js({1, 3}), 2).cents == Rational(125, 4));
    // empty slots contribute nothing
    CHECK(user_bill_hourly(s, js({2, 2}), 1).cents > 0);
    s.billing = BillingScheme::HourlyProportional;
    CHECK(user_bill(s, js({1, 1}), 1) == user_bill_hourly(s, js({1, 1}), 1));
    s.billing = BillingScheme::DailyProportional;
    CHECK(user_bill(s, js({1, 1}), 1) == user_bill_daily(s, js({1, 1}), 1));
}

TEST_CASE("billing scheme names") {
    CHECK(parse_billing_scheme("hourly") == BillingScheme::HourlyProportional);
    CHECK(parse_billing_scheme("daily") == BillingScheme::DailyProportional);
    CHECK(to_string(BillingScheme::HourlyProportional) == "hourly");
    CHECK_THROWS(parse_billing_scheme("weekly"));
}

TEST_CASE("feasible starts and occupied slots") {
    Load l;
    l.id = "x";
    l.owner = 1;
    l.rate = 1;
    l.duration = 2;
    l.window_start = 2;
    l.window_end = 5;
    CHECK(feasible_starts(l, 6, false) == std::vector<TimeSlot>{2, 3, 4});
    CHECK(feasible_starts(l, 6, true) == std::vector<TimeSlot>{2, 3, 4, 5});
    CHECK(occupied_slots(l, 5, 6, true) == std::vector<TimeSlot>{5, 6});
    l.duration = 3;
    CHECK(occupied_slots(l, 5, 6, true) == std::vector<TimeSlot>{5, 6, 1});
    CHECK_THROWS_AS(occupied_slots(l, 5, 6, false), std::invalid_argument);
    l.kind = LoadKind::Fixed;
    l.window_start = 2;
    l.window_end = 4;
    CHECK(feasible_starts(l, 6, false) == std::vector<TimeSlot>{2});
}

TEST_CASE("validation reports every violation") {
    auto s = load_scenario(testing::data_path("malformed.json"));
    auto v = validate_scenario(s);
    auto has = [&](const std::string& id, const std::string& reason) {
        return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.load_id == id && x.reason == reason; });
    };
    CHECK(has("a", "duplicate load id"));
    CHECK(has("a", "owner out of range"));
    CHECK(has("a", "rate must be positive"));
    CHECK(has("a", "duration exceeds horizon"));
    CHECK(has("b", "fixed load window length must equal duration"));

    auto ok = testing::scenario1();
    ok.pricing = PricingFunction{PricingFunction::Kind::Polynomial, {0, 1}};
    CHECK_FALSE(validate_scenario(ok).empty());  // linear pricing is not strictly convex
    ok.pricing = PricingFunction{PricingFunction::Kind::Polynomial, {1, 0, 1}};
    CHECK_FALSE(validate_scenario(ok).empty());  // C(0) != 0
    ok = testing::scenario1();
    ok.loads[1].owner = kBackgroundOwner;
    CHECK_FALSE(validate_scenario(ok).empty());  // background loads cannot be shiftable
    ok = testing::scenario1();
    ok.loads.erase(ok.loads.begin() + 3);
    ok.loads.erase(ok.loads.begin() + 1);
    CHECK_FALSE(validate_scenario(ok).empty());  // nothing to schedule
}

TEST_CASE("schedule shape is checked") {
    auto s = testing::scenario1();
    CHECK_NOTHROW(check_schedule(s, js({1, 3})));
    CHECK_THROWS_AS(check_schedule(s, js({1})), std::invalid_argument);
    CHECK_THROWS_AS(check_schedule(s, js({1, 4})), std::invalid_argument);
}

TEST_CASE("PAR is 1 exactly for flat profiles") {
    CHECK(par(LoadProfile{{2, 2, 2}}) == 1);
    CHECK(par(LoadProfile{{2, 2, Rational(201, 100)}}) > 1);
    CHECK_THROWS_AS(par(LoadProfile{{0, 0}}), std::domain_error);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        LoadProfile p;
        int h = 1 + static_cast<int>(rng() % 6);
        bool flat = rng() % 2;
        Rational level(1 + static_cast<int>(rng() % 5), 2);
        for (int t = 0; t < h; ++t) p.energy.push_back(flat ? level : Rational(static_cast<int>(rng() % 4), 3));
        if (p.total() == 0) continue;
        bool is_flat = std::all_of(p.energy.begin(), p.energy.end(), [&](const Rational& x) { return x == p.energy[0]; });
        CHECK((par(p) == 1) == is_flat);
        CHECK(par(p) >= 1);
    }
}

TEST_CASE("bill and energy conservation on random scenarios") {
    std::mt19937_64 rng(20241);
    for (int i = 0; i < 150; ++i) {
        auto s = testing::random_tiny_scenario(rng, 4, 5, 1 + static_cast<int>(i % 2));
        REQUIRE(validate_scenario(s).empty());
        auto j = testing::random_schedule(rng, s);
        auto e = expand(s, j);
        CHECK(e.aggregate.total() == s.total_energy());
        for (int u = 0; u <= s.users; ++u) CHECK(e.per_user[static_cast<std::size_t>(u)].total() == s.user_energy(u));
        const Money cost = total_cost(e.aggregate, s.pricing);
        Money hourly, daily;
        for (int u = 0; u <= s.users; ++u) {
            hourly = hourly + user_bill_hourly(s, j, u);
            daily = daily + user_bill_daily(s, j, u);
        }
        CHECK(hourly == cost);
        CHECK(daily == cost);
    }
}

TEST_CASE("scenario files round-trip") {
    for (const char* name : {"scenario1.json", "scenario2.json", "scenario2_thirds.json", "scenario3.json"}) {
        CAPTURE(name);
        auto s = load_scenario(testing::data_path(name));
        CHECK(parse_scenario(write_scenario(s)) == s);
    }
    auto s2 = testing::scenario2();
    CHECK(s2.loads[s2.shiftable_indices()[2]].rate == Rational(67, 100));
    auto t2 = testing::scenario2_thirds();
    CHECK(t2.loads[t2.shiftable_indices()[2]].rate == Rational(2, 3));
    CHECK(s2.loads[0].owner == kBackgroundOwner);
}

TEST_CASE("malformed scenario documents") {
    CHECK_THROWS_AS(parse_scenario("{"), ScenarioFormatError);
    CHECK_THROWS_AS(parse_scenario("[]"), ScenarioFormatError);
    CHECK_THROWS_AS(parse_scenario(R"({"horizon": 3})"), ScenarioFormatError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ScenarioFormatError);
    auto text = write_scenario(testing::scenario1());
    auto bad = text;
    bad.replace(bad.find("\"fixed\""), 7, "\"floating\"");
    CHECK_THROWS_AS(parse_scenario(bad), ScenarioFormatError);
    bad = text;
    bad.replace(bad.find("\"daily\""), 7, "\"weekly\"");
    CHECK_THROWS_AS(parse_scenario(bad), ScenarioFormatError);
}

TEST_CASE("integer kernel agrees with the rational model") {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 150; ++i) {
        auto s = testing::random_tiny_scenario(rng, 4, 6, 1 + static_cast<int>(i % 3));
        GameKernel k(s);
        auto j = testing::random_schedule(rng, s);
        auto starts = k.to_internal(j);
        auto st = k.make_state(starts);
        auto e = expand(s, j);
        CHECK(k.cost_money(k.cost_key(st)) == total_cost(e.aggregate, s.pricing));
        CHECK(k.aggregate_profile(st) == e.aggregate);
        CHECK(k.par(st) == par(e.aggregate));
        for (int u = 0; u <= s.users; ++u) CHECK(k.bill_money(st, u) == user_bill(s, j, u));
        CHECK(k.to_schedule(starts) == j);
    }
}

TEST_CASE("kernel rejects scales that would overflow its keys") {
    auto s = testing::scenario1();
    s.loads[1].rate = Rational(1, BigInt(1) << 40);
    CHECK_NOTHROW(GameKernel{s});
    s.pricing = PricingFunction{PricingFunction::Kind::Polynomial, {0, 0, 0, 0, 1}};
    CHECK_THROWS_AS(GameKernel{s}, std::invalid_argument);
    auto bad = load_scenario(testing::data_path("malformed.json"));
    CHECK_THROWS_AS(GameKernel{bad}, std::invalid_argument);
}
