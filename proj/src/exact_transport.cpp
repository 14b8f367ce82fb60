#include "slicedot/exact_transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "slicedot/errors.hpp"

namespace slicedot {

namespace {

constexpr std::size_t kMaxAtoms = 2000;

// Basic cell of the transportation tableau.
struct BasicCell {
    std::size_t i, j;
    double flow;
};

}  // namespace

double exact_transport_cost(const Matrix& a_points, const std::vector<double>& a_mass,
                            const Matrix& b_points, const std::vector<double>& b_mass) {
    const std::size_t m = a_mass.size();
    const std::size_t n = b_mass.size();
    if (m == 0 || n == 0) throw InvalidArgument("exact_transport: empty atom set");
    if (static_cast<std::size_t>(a_points.rows()) != m ||
        static_cast<std::size_t>(b_points.rows()) != n)
        throw InvalidArgument("exact_transport: mass/point count mismatch");
    if (a_points.cols() != b_points.cols())
        throw InvalidArgument("exact_transport: dimension mismatch");
    if (m > kMaxAtoms || n > kMaxAtoms)
        throw InvalidArgument("exact_transport: more than 2000 atoms per side; subsample first");

    double total_a = 0.0, total_b = 0.0;
    for (double v : a_mass) {
        if (!(v >= 0.0)) throw InvalidArgument("exact_transport: negative mass");
        total_a += v;
    }
    for (double v : b_mass) {
        if (!(v >= 0.0)) throw InvalidArgument("exact_transport: negative mass");
        total_b += v;
    }
    if (!(total_a > 0.0)) return 0.0;
    if (std::fabs(total_a - total_b) > 1e-9 * std::max(1.0, total_a))
        throw InvalidArgument("exact_transport: total masses differ");

    std::vector<double> supply(a_mass);
    std::vector<double> demand(b_mass);
    const double rescale = total_a / total_b;
    for (double& v : demand) v *= rescale;

    Matrix cost(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                (a_points.row(static_cast<Eigen::Index>(i)) -
                 b_points.row(static_cast<Eigen::Index>(j)))
                    .norm();

    // Northwest-corner initial basis: exactly m + n - 1 basic cells,
    // including zero-flow cells under degeneracy.
    std::vector<BasicCell> basis;
    basis.reserve(m + n - 1);
    {
        std::size_t i = 0, j = 0;
        double rem_s = supply[0], rem_d = demand[0];
        while (true) {
            const double f = std::min(rem_s, rem_d);
            basis.push_back({i, j, f});
            rem_s -= f;
            rem_d -= f;
            if (i + 1 == m && j + 1 == n) break;
            // Advance along the exhausted side; prefer the row on ties
            // unless it is the last row.
            if ((rem_s <= rem_d && i + 1 < m) || j + 1 == n) {
                ++i;
                rem_s = supply[i];
            } else {
                ++j;
                rem_d = demand[j];
            }
        }
    }

    const double cost_scale = std::max(1.0, cost.maxCoeff());
    const double tol = 1e-11 * cost_scale;
    const std::size_t max_pivots = 1000 * (m + n);

    std::vector<double> u(m), v(n);
    std::vector<char> u_set(m), v_set(n);
    // Adjacency of the basis tree: per row/column, indices into `basis`.
    std::vector<std::vector<std::size_t>> row_cells(m), col_cells(n);

    for (std::size_t pivot = 0;; ++pivot) {
        if (pivot > max_pivots)
            throw NumericError("exact_transport: simplex failed to converge");

        for (auto& cells : row_cells) cells.clear();
        for (auto& cells : col_cells) cells.clear();
        for (std::size_t k = 0; k < basis.size(); ++k) {
            row_cells[basis[k].i].push_back(k);
            col_cells[basis[k].j].push_back(k);
        }

        // Duals from u_0 = 0 by traversing the basis tree.
        std::fill(u_set.begin(), u_set.end(), 0);
        std::fill(v_set.begin(), v_set.end(), 0);
        u[0] = 0.0;
        u_set[0] = 1;
        std::queue<std::pair<char, std::size_t>> frontier;  // ('r', i) or ('c', j)
        frontier.push({'r', 0});
        while (!frontier.empty()) {
            auto [side, idx] = frontier.front();
            frontier.pop();
            if (side == 'r') {
                for (std::size_t k : row_cells[idx]) {
                    const auto& cell = basis[k];
                    if (!v_set[cell.j]) {
                        v[cell.j] = cost(static_cast<Eigen::Index>(cell.i),
                                         static_cast<Eigen::Index>(cell.j)) -
                                    u[cell.i];
                        v_set[cell.j] = 1;
                        frontier.push({'c', cell.j});
                    }
                }
            } else {
                for (std::size_t k : col_cells[idx]) {
                    const auto& cell = basis[k];
                    if (!u_set[cell.i]) {
                        u[cell.i] = cost(static_cast<Eigen::Index>(cell.i),
                                         static_cast<Eigen::Index>(cell.j)) -
                                    v[cell.j];
                        u_set[cell.i] = 1;
                        frontier.push({'r', cell.i});
                    }
                }
            }
        }
        for (std::size_t i = 0; i < m; ++i)
            if (!u_set[i]) throw NumericError("exact_transport: basis is not a spanning tree");
        for (std::size_t j = 0; j < n; ++j)
            if (!v_set[j]) throw NumericError("exact_transport: basis is not a spanning tree");

        // Entering cell: most negative reduced cost.
        double best_rc = -tol;
        std::size_t ei = m, ej = n;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double rc =
                    cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - u[i] - v[j];
                if (rc < best_rc) {
                    best_rc = rc;
                    ei = i;
                    ej = j;
                }
            }
        }
        if (ei == m) break;  // optimal

        // The entering cell closes a unique cycle with the basis tree:
        // BFS the tree path from row ei to column ej, recording for each
        // node the basic cell it was discovered through.
        std::vector<std::size_t> path;
        {
            std::vector<int> from_cell_row(m, -1), from_cell_col(n, -1);
            std::vector<char> row_seen(m, 0), col_seen(n, 0);
            row_seen[ei] = 1;
            std::queue<std::pair<char, std::size_t>> bfs;
            bfs.push({'r', ei});
            while (!bfs.empty() && !col_seen[ej]) {
                auto [side, idx] = bfs.front();
                bfs.pop();
                const auto& cells = side == 'r' ? row_cells[idx] : col_cells[idx];
                for (std::size_t k : cells) {
                    const auto& cell = basis[k];
                    if (side == 'r') {
                        if (col_seen[cell.j]) continue;
                        col_seen[cell.j] = 1;
                        from_cell_col[cell.j] = static_cast<int>(k);
                        bfs.push({'c', cell.j});
                    } else {
                        if (row_seen[cell.i]) continue;
                        row_seen[cell.i] = 1;
                        from_cell_row[cell.i] = static_cast<int>(k);
                        bfs.push({'r', cell.i});
                    }
                }
            }
            if (!col_seen[ej]) throw NumericError("exact_transport: cycle search failed");
            char side = 'c';
            std::size_t idx = ej;
            while (!(side == 'r' && idx == ei)) {
                const int k = side == 'c' ? from_cell_col[idx] : from_cell_row[idx];
                if (k < 0) throw NumericError("exact_transport: broken parent chain");
                path.push_back(static_cast<std::size_t>(k));
                const auto& cell = basis[static_cast<std::size_t>(k)];
                if (side == 'c') {
                    side = 'r';
                    idx = cell.i;
                } else {
                    side = 'c';
                    idx = cell.j;
                }
            }
        }

        // Alternating signs along the cycle: the entering arc is '+',
        // path cells alternate '-', '+', ... starting from the one
        // adjacent to column ej.
        double theta = std::numeric_limits<double>::infinity();
        std::size_t leave = basis.size();
        for (std::size_t s = 0; s < path.size(); s += 2) {
            const auto& cell = basis[path[s]];
            if (cell.flow < theta ||
                (cell.flow == theta && (leave == basis.size() || path[s] < leave))) {
                theta = cell.flow;
                leave = path[s];
            }
        }
        if (leave == basis.size()) throw NumericError("exact_transport: no leaving cell");
        for (std::size_t s = 0; s < path.size(); ++s) {
            if (s % 2 == 0)
                basis[path[s]].flow -= theta;
            else
                basis[path[s]].flow += theta;
        }
        basis[leave] = BasicCell{ei, ej, theta};
    }

    double total = 0.0;
    for (const auto& cell : basis)
        total += cell.flow *
                 cost(static_cast<Eigen::Index>(cell.i), static_cast<Eigen::Index>(cell.j));
    return total;
}

}  // namespace slicedot
