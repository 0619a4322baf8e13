#pragma once

// CSV and JSON report emitters. Output is plain ASCII with LF line endings and
// fixed column orders; money in cents with 2 decimals, PAR with 4.
//
//   ne.csv          index,starts,total_cost_cents,par        (starts joined by ';')
//   table.csv       ne_count,total_cost_cents,par[,convergence_pct]
//   study.csv       ne_count,total_cost_cents,convergence_pct,par
//   histogram.csv   bin_low,bin_high,count
//   trace.csv       round,user,load,old_start,new_start,user_bill_cents,total_cost_cents
//   qlearn.csv      episode,total_cost_cents,par
//   twophase.csv    metric,plain,two_phase
//   vertices.csv, region.csv   x,y

#include "dsm/altsched.hpp"
#include "dsm/dynamics.hpp"
#include "dsm/equilibrium.hpp"
#include "dsm/montecarlo.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace dsm {

inline constexpr int kParDecimals = 4;

std::string format_schedule(const JointSchedule& j);  // "1;3"
/// Parses "1,3" or "1;3". Throws std::invalid_argument.
JointSchedule parse_schedule(const std::string& text);

void write_ne_csv(std::ostream& os, const Scenario& s, const std::vector<JointSchedule>& nes);
void write_equilibrium_csv(std::ostream& os, const EquilibriumTable& t);

/// One row per converged terminal group. With an enumerated table, rows follow
/// the table (groups no run reached appear with 0%) and ne_count is filled in;
/// without one, ne_count is left empty.
/// Copy of `table` with each row's convergence_pct taken from the study's terminal groups.
EquilibriumTable with_convergence(const EquilibriumTable& table, const StudyResult& r);
void write_study_csv(std::ostream& os, const StudyResult& r, const EquilibriumTable* table = nullptr);
void write_histogram_csv(std::ostream& os, const StudyResult& r);
void write_study_summary_json(std::ostream& os, const StudyResult& r);

void write_trace_csv(std::ostream& os, const RunRecord& rec);
void write_qlearning_csv(std::ostream& os, const QLearningResult& q);
void write_twophase_csv(std::ostream& os, const TwoPhaseResult& r);

void write_points_csv(std::ostream& os, const std::vector<Point>& pts);
void write_hull_json(std::ostream& os, const HullReport& h);

/// Text table in the same column order as write_equilibrium_csv.
std::string render_equilibrium_table(const EquilibriumTable& t);

/// Writes `content` to dir/name, creating dir. Throws std::runtime_error on I/O failure.
void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content);

}  // namespace dsm
