#include "dsm/equilibrium.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dsm {

namespace {

void check_enumerable(const GameKernel& k, const EnumerationOptions& options) {
    const std::uint64_t total = k.joint_space_size();
    if (total > options.cap)
        throw CapExceeded("joint space of " + std::to_string(total) + " outcomes exceeds the enumeration cap of " +
                          std::to_string(options.cap) + "; use a Monte Carlo study instead");
    if (options.mode != NashMode::PerUserExact) return;
    for (int u = 1; u <= k.users(); ++u) {
        std::uint64_t space = 1;
        for (std::size_t a : k.agents_of(u)) {
            space *= k.agents()[a].starts.size();
            if (space > options.user_action_cap)
                throw CapExceeded("user " + std::to_string(u) + " action space exceeds cap");
        }
    }
}

// Scans joint indices [lo, hi) in lexicographic order (first agent most significant).
void scan_range(const GameKernel& k, std::uint64_t lo, std::uint64_t hi, const EnumerationOptions& options,
                std::vector<std::vector<int>>& found) {
    if (lo >= hi) return;
    const auto& agents = k.agents();
    const std::size_t n = agents.size();
    std::vector<std::size_t> digit(n, 0);
    std::uint64_t rest = lo;
    for (std::size_t i = n; i-- > 0;) {
        digit[i] = static_cast<std::size_t>(rest % agents[i].starts.size());
        rest /= agents[i].starts.size();
    }
    std::vector<int> starts(n);
    for (std::size_t i = 0; i < n; ++i) starts[i] = agents[i].starts[digit[i]];
    auto st = k.make_state(starts);
    for (std::uint64_t idx = lo; idx < hi; ++idx) {
        if (detail::is_nash(k, st, starts, options.mode, options.user_action_cap)) found.push_back(starts);
        if (idx + 1 == hi) break;
        for (std::size_t i = n; i-- > 0;) {
            k.place(st, i, starts[i], -1);
            bool carry = ++digit[i] == agents[i].starts.size();
            if (carry) digit[i] = 0;
            starts[i] = agents[i].starts[digit[i]];
            k.place(st, i, starts[i], +1);
            if (!carry) break;
        }
    }
}

std::vector<JointSchedule> to_schedules(const GameKernel& k, const std::vector<std::vector<int>>& found) {
    std::vector<JointSchedule> out;
    out.reserve(found.size());
    for (const auto& f : found) out.push_back(k.to_schedule(f));
    return out;
}

}  // namespace

std::vector<JointSchedule> enumerate_ne_serial(const Scenario& s, const EnumerationOptions& options) {
    GameKernel k(s);
    check_enumerable(k, options);
    std::vector<std::vector<int>> found;
    scan_range(k, 0, k.joint_space_size(), options, found);
    return to_schedules(k, found);
}

std::vector<JointSchedule> enumerate_ne(const Scenario& s, const EnumerationOptions& options) {
    GameKernel k(s);
    check_enumerable(k, options);
    const std::uint64_t total = k.joint_space_size();
#ifdef _OPENMP
    const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
#else
    const int threads = 1;
#endif
    const std::uint64_t chunks = std::max<std::uint64_t>(1, std::min<std::uint64_t>(total, 16ULL * threads));
    std::vector<std::vector<std::vector<int>>> found(chunks);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long long c = 0; c < static_cast<long long>(chunks); ++c) {
        const auto cu = static_cast<std::uint64_t>(c);
        // total * c / chunks without 128-bit overflow concerns: total <= cap
        const auto lo = static_cast<std::uint64_t>(static_cast<unsigned __int128>(total) * cu / chunks);
        const auto hi = static_cast<std::uint64_t>(static_cast<unsigned __int128>(total) * (cu + 1) / chunks);
        scan_range(k, lo, hi, options, found[cu]);
    }
    std::vector<std::vector<int>> merged;
    for (auto& f : found) merged.insert(merged.end(), std::make_move_iterator(f.begin()), std::make_move_iterator(f.end()));
    return to_schedules(k, merged);
}

EquilibriumTable group_equilibria(const Scenario& s, const std::vector<JointSchedule>& nes) {
    if (nes.empty()) throw std::invalid_argument("no equilibria to group");
    GameKernel k(s);
    std::map<BigInt, EquilibriumRow> groups;
    std::map<BigInt, BigInt> group_par;
    for (const auto& ne : nes) {
        auto starts = k.to_internal(ne);
        auto st = k.make_state(starts);
        Money cost = k.cost_money(k.cost_key(st));
        Rational p = k.par(st);
        BigInt key = round_scaled(cost.cents, 2);
        BigInt par_key = round_scaled(p, 2);
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) {
            it->second.total_cost = cost;
            it->second.par = p;
            it->second.representative = ne;
            group_par[key] = par_key;
        } else if (group_par[key] != par_key) {
            throw std::runtime_error("equilibria with total cost " + cost.str() + " disagree on PAR (" +
                                     to_fixed(it->second.par, 2) + " vs " + to_fixed(p, 2) + ")");
        }
        ++it->second.ne_count;
    }
    EquilibriumTable table;
    for (auto& [key, row] : groups) table.rows.push_back(std::move(row));
    return table;
}

void check_matrix_game(const MatrixGame& g) {
    if (g.rows() == 0 || g.cols() == 0) throw std::invalid_argument("matrix game must have at least one cell");
    for (const auto& row : g.cells)
        if (row.size() != g.cols()) throw std::invalid_argument("matrix game must be rectangular");
    if (g.row_labels.size() != g.rows() || g.col_labels.size() != g.cols())
        throw std::invalid_argument("matrix game labels do not match its shape");
}

MatrixGame build_matrix_game(const Scenario& s) {
    GameKernel k(s);
    if (k.users() != 2 || k.agents_of(1).size() != 1 || k.agents_of(2).size() != 1 || k.agents().size() != 2)
        throw std::invalid_argument("matrix games need exactly two users with one shiftable load each");
    const std::size_t a1 = k.agents_of(1).front();
    const std::size_t a2 = k.agents_of(2).front();
    const auto& rows = k.agents()[a1].starts;
    const auto& cols = k.agents()[a2].starts;
    MatrixGame g;
    g.orientation = Orientation::Cost;
    for (int r : rows) g.row_labels.push_back("t_U1=" + std::to_string(r + 1));
    for (int c : cols) g.col_labels.push_back("t_U2=" + std::to_string(c + 1));
    std::vector<int> starts(2);
    for (int r : rows) {
        auto& line = g.cells.emplace_back();
        for (int c : cols) {
            starts[a1] = r;
            starts[a2] = c;
            auto st = k.make_state(starts);
            line.emplace_back(k.bill_money(st, 1).cents, k.bill_money(st, 2).cents);
        }
    }
    return g;
}

std::vector<Cell> pure_ne_cells(const MatrixGame& g) {
    check_matrix_game(g);
    auto better = [&](const Rational& a, const Rational& b) {
        return g.orientation == Orientation::Cost ? a < b : a > b;
    };
    std::vector<Cell> out;
    for (std::size_t r = 0; r < g.rows(); ++r) {
        for (std::size_t c = 0; c < g.cols(); ++c) {
            bool stable = true;
            for (std::size_t r2 = 0; r2 < g.rows() && stable; ++r2)
                stable = !better(g.cells[r2][c].first, g.cells[r][c].first);
            for (std::size_t c2 = 0; c2 < g.cols() && stable; ++c2)
                stable = !better(g.cells[r][c2].second, g.cells[r][c].second);
            if (stable) out.push_back({r, c});
        }
    }
    return out;
}

MatrixGame as_payoffs(const MatrixGame& g) {
    if (g.orientation == Orientation::Payoff) return g;
    MatrixGame p = g;
    p.orientation = Orientation::Payoff;
    for (auto& row : p.cells)
        for (auto& [a, b] : row) {
            a = -a;
            b = -b;
        }
    return p;
}

MatrixGame augment_with_valuations(const MatrixGame& base, const MatrixGame& valuations) {
    check_matrix_game(base);
    check_matrix_game(valuations);
    if (base.orientation != Orientation::Payoff || valuations.orientation != Orientation::Payoff)
        throw std::invalid_argument("valuation augmentation needs payoff-oriented games (negate costs first)");
    if (base.rows() != valuations.rows() || base.cols() != valuations.cols())
        throw std::invalid_argument("valuation matrix shape does not match the game");
    MatrixGame out = base;
    for (std::size_t r = 0; r < out.rows(); ++r)
        for (std::size_t c = 0; c < out.cols(); ++c) {
            out.cells[r][c].first += valuations.cells[r][c].first;
            out.cells[r][c].second += valuations.cells[r][c].second;
        }
    return out;
}

std::pair<Rational, Rational> maximin_values(const MatrixGame& game) {
    check_matrix_game(game);
    const MatrixGame g = as_payoffs(game);
    std::optional<Rational> row_value;
    for (std::size_t r = 0; r < g.rows(); ++r) {
        Rational worst = g.cells[r][0].first;
        for (std::size_t c = 1; c < g.cols(); ++c) worst = std::min(worst, g.cells[r][c].first);
        if (!row_value || worst > *row_value) row_value = worst;
    }
    std::optional<Rational> col_value;
    for (std::size_t c = 0; c < g.cols(); ++c) {
        Rational worst = g.cells[0][c].second;
        for (std::size_t r = 1; r < g.rows(); ++r) worst = std::min(worst, g.cells[r][c].second);
        if (!col_value || worst > *col_value) col_value = worst;
    }
    return {*row_value, *col_value};
}

HullReport hull_and_folk_region(const MatrixGame& game) {
    check_matrix_game(game);
    const MatrixGame g = as_payoffs(game);
    HullReport rep;
    for (const auto& row : g.cells)
        for (const auto& [a, b] : row) rep.points.push_back(Point{a, b});
    rep.vertices = convex_hull(rep.points);
    auto [m1, m2] = maximin_values(g);
    rep.maximin = Point{m1, m2};
    auto region = clip_half_plane(rep.vertices, 1, 0, m1);
    rep.folk_region = clip_half_plane(region, 0, 1, m2);
    return rep;
}

std::string render_matrix(const MatrixGame& g, int decimals) {
    check_matrix_game(g);
    auto ne = pure_ne_cells(g);
    std::vector<std::vector<std::string>> grid(g.rows() + 1, std::vector<std::string>(g.cols() + 1));
    for (std::size_t c = 0; c < g.cols(); ++c) grid[0][c + 1] = g.col_labels[c];
    for (std::size_t r = 0; r < g.rows(); ++r) {
        grid[r + 1][0] = g.row_labels[r];
        for (std::size_t c = 0; c < g.cols(); ++c) {
            bool star = std::binary_search(ne.begin(), ne.end(), Cell{r, c});
            grid[r + 1][c + 1] = to_fixed(g.cells[r][c].first, decimals) + ", " +
                                 to_fixed(g.cells[r][c].second, decimals) + (star ? " *" : "");
        }
    }
    std::vector<std::size_t> width(g.cols() + 1, 0);
    for (const auto& line : grid)
        for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
    std::ostringstream out;
    for (std::size_t r = 0; r < grid.size(); ++r) {
        for (std::size_t c = 0; c < grid[r].size(); ++c) {
            if (c) out << " | ";
            out << grid[r][c] << std::string(width[c] - grid[r][c].size(), ' ');
        }
        out << '\n';
    }
    out << "(* pure Nash equilibrium; " << (g.orientation == Orientation::Cost ? "costs, lower is better" : "payoffs, higher is better")
        << ")\n";
    return out.str();
}

MatrixGame parse_matrix_game(const std::string& json_text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("malformed matrix game: ") + e.what());
    }
    auto value = [](const json& v) {
        if (v.is_string()) return parse_rational(v.get<std::string>());
        if (v.is_number_integer()) return Rational(v.get<long long>());
        if (v.is_number_float()) return parse_rational(v.dump());
        throw std::invalid_argument("matrix game values must be numbers or rational strings");
    };
    MatrixGame g;
    std::string orientation = doc.value("orientation", "payoff");
    if (orientation == "payoff")
        g.orientation = Orientation::Payoff;
    else if (orientation == "cost")
        g.orientation = Orientation::Cost;
    else
        throw std::invalid_argument("orientation must be payoff or cost");
    if (!doc.contains("cells") || !doc["cells"].is_array()) throw std::invalid_argument("matrix game needs a cells list");
    for (const auto& row : doc["cells"]) {
        auto& line = g.cells.emplace_back();
        for (const auto& cell : row) {
            if (!cell.is_array() || cell.size() != 2) throw std::invalid_argument("each cell must be a pair");
            line.emplace_back(value(cell[0]), value(cell[1]));
        }
    }
    if (doc.contains("row_labels")) g.row_labels = doc["row_labels"].get<std::vector<std::string>>();
    if (doc.contains("col_labels")) g.col_labels = doc["col_labels"].get<std::vector<std::string>>();
    for (std::size_t r = g.row_labels.size(); r < g.rows(); ++r) g.row_labels.push_back("r" + std::to_string(r + 1));
    for (std::size_t c = g.col_labels.size(); c < g.cols(); ++c) g.col_labels.push_back("c" + std::to_string(c + 1));
    check_matrix_game(g);
    return g;
}

MatrixGame load_matrix_game(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open matrix game file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_matrix_game(buf.str());
}

}  // namespace dsm
