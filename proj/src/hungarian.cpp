// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#include "edgepipe/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace edgepipe {

std::vector<int> hungarian_square(const CostMatrix& cost) {
    const int n = cost.rows();
    if (cost.cols() != n) throw std::invalid_argument("hungarian_square: matrix is not square");
    if (n == 0) return {};
    constexpr double kInf = std::numeric_limits<double>::infinity();

    // 1-based potentials formulation; p[j] is the row matched to column j.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> col_of_row(n, -1);
    for (int j = 1; j <= n; ++j) col_of_row[p[j] - 1] = j - 1;
    return col_of_row;
}

namespace {

// Optimal cost of matching `rows` to `cols` of `cost` (rows.size() <= cols.size()
// after padding); virtual columns are those with index >= real_cols.
double solve_restricted(const CostMatrix& cost, const std::vector<int>& rows, const std::vector<int>& cols,
                        std::vector<int>* assignment) {
    const int r = static_cast<int>(rows.size());
    const int c = static_cast<int>(cols.size());
    const int n = std::max(r, c);
    CostMatrix square(n, n, 0.0);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) square(i, j) = cost(rows[i], cols[j]);
    const auto match = hungarian_square(square);
    double total = 0.0;
    if (assignment) assignment->assign(r, -1);
    for (int i = 0; i < r; ++i) {
        const int j = match[i];
        if (j < c) {
            total += cost(rows[i], cols[j]);
            if (assignment) (*assignment)[i] = cols[j];
        }
    }
    return total;
}

}  // namespace

AssignmentResult min_cost_assignment(const CostMatrix& cost) {
    const int N = cost.rows();
    const int J = cost.cols();
    AssignmentResult out;
    out.column_of_row.assign(N, -1);
    if (N == 0) return out;

    // Pad with zero-cost virtual columns so every row can be matched.
    const int width = std::max(N, J);
    CostMatrix padded(N, width, 0.0);
    double scale = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < J; ++j) {
            padded(i, j) = cost(i, j);
            scale += std::fabs(cost(i, j));
        }
    const double tol = 1e-12 * std::max(scale, 1e-300);

    std::vector<int> all_rows(N), all_cols(width);
    for (int i = 0; i < N; ++i) all_rows[i] = i;
    for (int j = 0; j < width; ++j) all_cols[j] = j;
    const double optimum = solve_restricted(padded, all_rows, all_cols, nullptr);

    // Fix rows in order to the smallest column that keeps the optimum reachable.
    // Virtual columns are interchangeable, so only one is tried.
    std::vector<int> free_cols = all_cols;
    double fixed_cost = 0.0;
    for (int i = 0; i < N; ++i) {
        std::vector<int> rest_rows(all_rows.begin() + i + 1, all_rows.end());
        bool placed = false;
        bool tried_virtual = false;
        for (std::size_t idx = 0; idx < free_cols.size() && !placed; ++idx) {
            const int col = free_cols[idx];
            if (col >= J) {
                if (tried_virtual) continue;
                tried_virtual = true;
            }
            std::vector<int> rest_cols = free_cols;
            rest_cols.erase(rest_cols.begin() + static_cast<long>(idx));
            const double here = fixed_cost + padded(i, col) + solve_restricted(padded, rest_rows, rest_cols, nullptr);
            if (here <= optimum + tol) {
                fixed_cost += padded(i, col);
                out.column_of_row[i] = col < J ? col : -1;
                free_cols = std::move(rest_cols);
                placed = true;
            }
        }
        if (!placed) throw std::logic_error("min_cost_assignment: tie-break pass lost the optimum");
    }
    out.cost = fixed_cost;
    return out;
}

}  // namespace edgepipe
