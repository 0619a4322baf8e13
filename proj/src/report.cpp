#include "dsm/report.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dsm {

namespace {

std::string pct(std::uint64_t count, int runs) { return to_fixed(Rational(count * 100) / runs, 2); }

std::string par_text(const Rational& p) { return to_fixed(p, kParDecimals); }

}  // namespace

std::string format_schedule(const JointSchedule& j) {
    std::string out;
    for (std::size_t i = 0; i < j.starts.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(j.starts[i]);
    }
    return out;
}

JointSchedule parse_schedule(const std::string& text) {
    JointSchedule j;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, text.find(';') != std::string::npos ? ';' : ',')) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw std::invalid_argument("bad start slot '" + item + "' in schedule");
        j.starts.push_back(v);
    }
    if (j.starts.empty()) throw std::invalid_argument("empty schedule");
    return j;
}

void write_ne_csv(std::ostream& os, const Scenario& s, const std::vector<JointSchedule>& nes) {
    os << "index,starts,total_cost_cents,par\n";
    for (std::size_t i = 0; i < nes.size(); ++i) {
        auto e = expand(s, nes[i]);
        os << i + 1 << ',' << format_schedule(nes[i]) << ',' << total_cost(e.aggregate, s.pricing).str() << ','
           << par_text(par(e.aggregate)) << '\n';
    }
}

void write_equilibrium_csv(std::ostream& os, const EquilibriumTable& t) {
    bool with_pct = false;
    for (const auto& r : t.rows) with_pct = with_pct || r.convergence_pct.has_value();
    os << "ne_count,total_cost_cents,par" << (with_pct ? ",convergence_pct" : "") << '\n';
    for (const auto& r : t.rows) {
        os << r.ne_count << ',' << r.total_cost.str() << ',' << par_text(r.par);
        if (with_pct) os << ',' << (r.convergence_pct ? to_fixed(*r.convergence_pct, 2) : std::string());
        os << '\n';
    }
}

EquilibriumTable with_convergence(const EquilibriumTable& table, const StudyResult& r) {
    EquilibriumTable out = table;
    for (auto& row : out.rows) {
        BigInt key = round_scaled(row.total_cost.cents, 2);
        std::uint64_t count = 0;
        for (const auto& g : r.groups)
            if (g.cost_hundredths == key) count += g.count;
        row.convergence_pct = Rational(count * 100) / r.runs;
    }
    return out;
}

void write_study_csv(std::ostream& os, const StudyResult& r, const EquilibriumTable* table) {
    os << "ne_count,total_cost_cents,convergence_pct,par\n";
    if (table == nullptr) {
        for (const auto& g : r.groups)
            os << ',' << g.total_cost.str() << ',' << pct(g.count, r.runs) << ',' << par_text(g.par) << '\n';
        return;
    }
    std::map<BigInt, const TerminalGroup*> by_cost;
    for (const auto& g : r.groups) by_cost[g.cost_hundredths] = &g;
    std::map<BigInt, bool> listed;
    for (const auto& row : table->rows) {
        BigInt key = round_scaled(row.total_cost.cents, 2);
        auto it = by_cost.find(key);
        std::uint64_t count = it == by_cost.end() ? 0 : it->second->count;
        listed[key] = true;
        os << row.ne_count << ',' << row.total_cost.str() << ',' << pct(count, r.runs) << ',' << par_text(row.par)
           << '\n';
    }
    // terminal groups outside the table, possible only under a loose sweep cap
    for (const auto& g : r.groups)
        if (!listed.count(g.cost_hundredths))
            os << ',' << g.total_cost.str() << ',' << pct(g.count, r.runs) << ',' << par_text(g.par) << '\n';
}

void write_histogram_csv(std::ostream& os, const StudyResult& r) {
    os << "bin_low,bin_high,count\n";
    if (r.par_bins.empty()) return;
    for (const auto& b : par_histogram(r)) os << to_fixed(b.low, 2) << ',' << to_fixed(b.high, 2) << ',' << b.count << '\n';
}

void write_study_summary_json(std::ostream& os, const StudyResult& r) {
    nlohmann::ordered_json j;
    j["runs"] = r.runs;
    j["converged"] = r.converged();
    j["cycle_detected"] = r.cycle_count;
    j["max_rounds_reached"] = r.max_rounds_count;
    j["groups"] = r.groups.size();
    j["mean_par"] = to_fixed(r.mean_par(), kParDecimals);
    j["mean_total_cost_cents"] = r.mean_cost().str();
    j["mean_rounds"] = to_fixed(Rational(r.total_rounds) / r.runs, 2);
    j["max_rounds_seen"] = r.max_rounds_seen;
    os << j.dump(2) << '\n';
}

void write_trace_csv(std::ostream& os, const RunRecord& rec) {
    os << "round,user,load,old_start,new_start,user_bill_cents,total_cost_cents\n";
    for (const auto& u : rec.trajectory)
        os << u.round << ',' << u.user << ',' << u.load_id << ',' << u.old_start << ',' << u.new_start << ','
           << u.user_bill.str() << ',' << u.total_cost.str() << '\n';
}

void write_qlearning_csv(std::ostream& os, const QLearningResult& q) {
    os << "episode,total_cost_cents,par\n";
    for (const auto& e : q.trace) os << e.episode << ',' << e.total_cost.str() << ',' << par_text(e.par) << '\n';
}

void write_twophase_csv(std::ostream& os, const TwoPhaseResult& r) {
    const StudyResult& a = r.plain;
    const StudyResult& b = r.two_phase;
    os << "metric,plain,two_phase\n";
    os << "runs," << a.runs << ',' << b.runs << '\n';
    os << "converged_pct," << pct(a.converged(), a.runs) << ',' << pct(b.converged(), b.runs) << '\n';
    os << "mean_par," << par_text(a.mean_par()) << ',' << par_text(b.mean_par()) << '\n';
    os << "mean_total_cost_cents," << a.mean_cost().str() << ',' << b.mean_cost().str() << '\n';
    os << "mean_rounds," << to_fixed(Rational(a.total_rounds) / a.runs, 2) << ','
       << to_fixed(Rational(b.total_rounds) / b.runs, 2) << '\n';
    os << "terminal_groups," << a.groups.size() << ',' << b.groups.size() << '\n';
}

void write_points_csv(std::ostream& os, const std::vector<Point>& pts) {
    os << "x,y\n";
    for (const auto& p : pts) os << to_string_exact(p.x) << ',' << to_string_exact(p.y) << '\n';
}

void write_hull_json(std::ostream& os, const HullReport& h) {
    auto pts = [](const std::vector<Point>& v) {
        nlohmann::ordered_json a = nlohmann::ordered_json::array();
        for (const auto& p : v) a.push_back({to_string_exact(p.x), to_string_exact(p.y)});
        return a;
    };
    nlohmann::ordered_json j;
    j["points"] = pts(h.points);
    j["vertices"] = pts(h.vertices);
    j["maximin"] = {to_string_exact(h.maximin.x), to_string_exact(h.maximin.y)};
    j["folk_region"] = pts(h.folk_region);
    os << j.dump(2) << '\n';
}

std::string render_equilibrium_table(const EquilibriumTable& t) {
    std::ostringstream os;
    os << "  NEs  total cost (c)     PAR";
    bool with_pct = false;
    for (const auto& r : t.rows) with_pct = with_pct || r.convergence_pct.has_value();
    if (with_pct) os << "  convergence";
    os << '\n';
    for (const auto& r : t.rows) {
        std::string cost = r.total_cost.str();
        std::string n = std::to_string(r.ne_count);
        os << std::string(5 - std::min<std::size_t>(5, n.size()), ' ') << n << "  "
           << std::string(14 - std::min<std::size_t>(14, cost.size()), ' ') << cost << "  " << to_fixed(r.par, 4);
        if (with_pct && r.convergence_pct) os << "  " << to_fixed(*r.convergence_pct, 2) << '%';
        os << '\n';
    }
    return os.str();
}

void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.close();
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace dsm
