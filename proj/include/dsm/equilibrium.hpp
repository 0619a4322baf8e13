#pragma once

// Pure-strategy equilibrium analysis: exhaustive joint-space enumeration,
// grouping by total cost, explicit two-player matrix games, valuation
// augmentation, maximin values, payoff hulls and the folk-theorem region.

#include "dsm/dynamics.hpp"
#include "dsm/geometry.hpp"
#include "dsm/model.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsm {

struct CapExceeded : std::length_error {
    using std::length_error::length_error;
};

struct EnumerationOptions {
    NashMode mode = NashMode::PerLoad;
    std::uint64_t cap = 10'000'000;  // joint outcomes
    std::uint64_t user_action_cap = kDefaultUserActionCap;
    int threads = 0;                 // 0: OpenMP default
};

/// Every joint schedule passing is_nash, in lexicographic order over
/// (shiftable load, start). Parallel over contiguous index chunks.
/// Throws CapExceeded if the joint space is larger than options.cap.
std::vector<JointSchedule> enumerate_ne(const Scenario& s, const EnumerationOptions& options = {});
/// Single-threaded reference for enumerate_ne; identical output.
std::vector<JointSchedule> enumerate_ne_serial(const Scenario& s, const EnumerationOptions& options = {});

struct EquilibriumRow {
    int ne_count = 0;
    Money total_cost;           // exact cost of the group's first member
    Rational par{0};            // PAR of the group's first member
    std::optional<Rational> convergence_pct;
    JointSchedule representative;
};

/// Rows ascending by total cost.
struct EquilibriumTable {
    std::vector<EquilibriumRow> rows;
};

/// Groups by total cost rounded to 0.01 cent. Throws std::invalid_argument on an
/// empty list and std::runtime_error if a group's PARs differ at 2 decimals.
EquilibriumTable group_equilibria(const Scenario& s, const std::vector<JointSchedule>& nes);

enum class Orientation { Cost, Payoff };

struct Cell {
    std::size_t row = 0;
    std::size_t col = 0;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Two-player normal-form game. cells[r][c] = {row player's value, column player's value}.
struct MatrixGame {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<std::vector<std::pair<Rational, Rational>>> cells;
    Orientation orientation = Orientation::Payoff;

    std::size_t rows() const { return cells.size(); }
    std::size_t cols() const { return cells.empty() ? 0 : cells.front().size(); }
};

/// Throws std::invalid_argument unless the game is rectangular and nonempty.
void check_matrix_game(const MatrixGame& g);

/// Bills of both users for every pair of starts; requires exactly two users with
/// one shiftable load each.
MatrixGame build_matrix_game(const Scenario& s);

/// Cells where neither player strictly gains by a unilateral switch. Ascending.
std::vector<Cell> pure_ne_cells(const MatrixGame& g);

/// Payoff view of a game: costs are negated, payoff games returned unchanged.
MatrixGame as_payoffs(const MatrixGame& g);

/// Cell-wise sum of two payoff games of the same shape.
MatrixGame augment_with_valuations(const MatrixGame& base, const MatrixGame& valuations);

/// Pure maximin value of each player in a payoff game.
std::pair<Rational, Rational> maximin_values(const MatrixGame& g);

struct HullReport {
    std::vector<Point> points;     // one per cell, row-major
    std::vector<Point> vertices;   // counterclockwise, collinear points dropped
    Point maximin;
    std::vector<Point> folk_region;  // hull restricted to points weakly above maximin
};

HullReport hull_and_folk_region(const MatrixGame& g);

/// Aligned text table, one row per row action.
std::string render_matrix(const MatrixGame& g, int decimals = 2);

MatrixGame parse_matrix_game(const std::string& json_text);
MatrixGame load_matrix_game(const std::string& path);

}  // namespace dsm
