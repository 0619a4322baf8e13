#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dsm/cli.hpp"
#include "dsm/report.hpp"
#include "support.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dsm;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("dsm-cli-test-" + name);
    fs::remove_all(p);
    return p;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("validate") {
    auto ok = cli({"validate", "--scenario", testing::data_path("scenario1.json")});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("ok") != std::string::npos);
    auto bad = cli({"validate", "--scenario", testing::data_path("malformed.json")});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("duplicate load id") != std::string::npos);
    CHECK(cli({"validate", "--scenario", "/nonexistent.json"}).code == 1);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"validate"}).code == 2);
    CHECK(cli({"study", "--scenario", testing::data_path("scenario1.json")}).code == 2);  // no seed
    CHECK(cli({"study", "--scenario", testing::data_path("scenario1.json"), "--seed", "1", "--runs", "0"}).code == 2);
    CHECK(cli({"enumerate", "--scenario", testing::data_path("scenario1.json"), "--scheme", "weekly"}).code == 2);
    CHECK(cli({"simulate", "--scenario", testing::data_path("scenario1.json")}).code == 2);
    CHECK(cli({"twophase", "--scenario", testing::data_path("scenario1.json"), "--seed", "1", "--threshold", "-1"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("matrix reproduces the scenario I table") {
    auto r = cli({"matrix", "--scenario", testing::data_path("scenario1.json")});
    CHECK(r.code == 0);
    CHECK(r.out.find("15.79, 39.46") != std::string::npos);
    CHECK(r.out.find("11.50, 28.75 *") != std::string::npos);
    CHECK(r.out.find("11.79, 29.46 *") != std::string::npos);
    auto dir = scratch("matrix");
    CHECK(cli({"matrix", "--scenario", testing::data_path("scenario1.json"), "--out", dir.string()}).code == 0);
    CHECK(slurp(dir / "ne_cells.csv") == "row,col\n1,3\n3,1\n");
}

TEST_CASE("matrix and hull on explicit games") {
    auto r = cli({"matrix", "--game", testing::data_path("fig2a.json"), "--valuations", testing::data_path("fig2b.json")});
    CHECK(r.code == 0);
    CHECK(r.out.find("1.00, 1.00 *") != std::string::npos);
    auto dir = scratch("hull");
    auto h = cli({"hull", "--game", testing::data_path("fig2a.json"), "--valuations", testing::data_path("fig2b.json"),
                  "--out", dir.string()});
    CHECK(h.code == 0);
    CHECK(slurp(dir / "vertices.csv") == "x,y\n-1,-1\n2,0\n0,2\n");
    CHECK(slurp(dir / "region.csv") == "x,y\n1,1\n");
    CHECK(slurp(dir / "report.json").find("\"maximin\"") != std::string::npos);
    CHECK(cli({"hull", "--game", testing::data_path("scenario1.json")}).code == 1);
    CHECK(cli({"hull", "--game", testing::data_path("fig2a.json"), "--scenario", testing::data_path("scenario1.json")}).code == 2);
}

TEST_CASE("enumerate writes grouped tables") {
    auto dir = scratch("enumerate");
    auto r = cli({"enumerate", "--scenario", testing::data_path("scenario1.json"), "--group", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(slurp(dir / "ne.csv") == "index,starts,total_cost_cents,par\n1,1;3,40.25,1.4286\n2,3;1,41.25,1.4286\n");
    CHECK(slurp(dir / "table.csv") == "ne_count,total_cost_cents,par\n1,40.25,1.4286\n1,41.25,1.4286\n");
    auto capped = cli({"enumerate", "--scenario", testing::data_path("scenario1.json"), "--cap", "4"});
    CHECK(capped.code == 1);
    CHECK(capped.err.find("cap") != std::string::npos);
}

TEST_CASE("simulate writes the trajectory") {
    auto dir = scratch("simulate");
    auto r = cli({"simulate", "--scenario", testing::data_path("scenario1.json"), "--initial", "2,2", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("converged after 2 round(s): 3;1") != std::string::npos);
    CHECK(slurp(dir / "trace.csv") ==
          "round,user,load,old_start,new_start,user_bill_cents,total_cost_cents\n"
          "1,1,u1-shift,2,3,17.50,61.25\n"
          "1,2,u2-shift,2,1,29.46,41.25\n");
    auto bad = cli({"simulate", "--scenario", testing::data_path("scenario1.json"), "--initial", "2,x"});
    CHECK(bad.code == 1);
    CHECK(cli({"simulate", "--scenario", testing::data_path("scenario1.json"), "--seed", "3"}).code == 0);
}

TEST_CASE("study output is deterministic") {
    auto a = scratch("study-a");
    auto b = scratch("study-b");
    std::vector<std::string> base{"study", "--scenario", testing::data_path("scenario2.json"), "--seed", "11", "--runs", "500"};
    auto ra = base;
    ra.insert(ra.end(), {"--out", a.string(), "--threads", "1"});
    auto rb = base;
    rb.insert(rb.end(), {"--out", b.string(), "--threads", "3"});
    CHECK(cli(ra).code == 0);
    CHECK(cli(rb).code == 0);
    for (const char* f : {"study.csv", "histogram.csv", "summary.json"}) {
        CAPTURE(f);
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK(slurp(a / f).find('\r') == std::string::npos);
    }
    auto table = lines(slurp(a / "study.csv"));
    CHECK(table.front() == "ne_count,total_cost_cents,convergence_pct,par");
    CHECK(table.size() == 10);  // one row per enumerated group
    auto hist = lines(slurp(a / "histogram.csv"));
    CHECK(hist.front() == "bin_low,bin_high,count");
}

TEST_CASE("twophase, qlearn and gen-flat") {
    auto dir = scratch("misc");
    auto t = cli({"twophase", "--scenario", testing::data_path("scenario2.json"), "--seed", "2", "--runs", "200",
                  "--threshold", "4", "--out", dir.string()});
    CHECK(t.code == 0);
    CHECK(t.out.find("u5@1") != std::string::npos);
    CHECK(lines(slurp(dir / "twophase.csv")).front() == "metric,plain,two_phase");
    CHECK(slurp(dir / "central.csv") == "load,start\nu5,1\n");

    auto q = cli({"qlearn", "--scenario", testing::data_path("scenario1.json"), "--seed", "2", "--episodes", "50",
                  "--out", dir.string()});
    CHECK(q.code == 0);
    auto trace = lines(slurp(dir / "qlearn.csv"));
    CHECK(trace.size() == 51);
    CHECK(trace.front() == "episode,total_cost_cents,par");
    CHECK(cli({"qlearn", "--scenario", testing::data_path("scenario1.json"), "--seed", "2", "--epsilon", "2"}).code == 2);

    auto g = cli({"gen-flat", "--users", "10", "--loads-per-user", "20", "--horizon", "24", "--seed", "1"});
    CHECK(g.code == 0);
    CHECK(g.out == slurp(testing::data_path("scenario3.json")));
    CHECK(parse_scenario(g.out) == load_scenario(testing::data_path("scenario3.json")));
    CHECK(cli({"gen-flat", "--users", "3"}).code == 2);
}

TEST_CASE("scheme override") {
    auto daily = cli({"enumerate", "--scenario", testing::data_path("scenario1.json"), "--scheme", "daily"});
    auto hourly = cli({"enumerate", "--scenario", testing::data_path("scenario1.json"), "--scheme", "hourly"});
    CHECK(daily.code == 0);
    CHECK(hourly.code == 0);
}

TEST_CASE("schedule text") {
    CHECK(parse_schedule("1,3").starts == std::vector<TimeSlot>{1, 3});
    CHECK(parse_schedule("4;5;6").starts == std::vector<TimeSlot>{4, 5, 6});
    CHECK(format_schedule(JointSchedule{{1, 3}}) == "1;3");
    CHECK_THROWS_AS(parse_schedule(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_schedule("1,,2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_schedule("1.5"), std::invalid_argument);
}
