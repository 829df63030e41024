// Copyright (c) 2026, edgepipe contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace edgepipe {

/// Dense row-major cost matrix.
class CostMatrix {
public:
    CostMatrix(int rows, int cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    double& operator()(int r, int c) { return data_[r * cols_ + c]; }
    double operator()(int r, int c) const { return data_[r * cols_ + c]; }

private:
    int rows_;
    int cols_;
    std::vector<double> data_;
};

struct AssignmentResult {
    std::vector<int> column_of_row;  // -1: virtual (excluded)
    double cost = 0.0;
};

/// Minimum-cost matching of rows (CUs) to columns (channels). When rows
/// outnumber columns, zero-cost virtual columns absorb the excess; every row
/// gets a real column otherwise. Among optimal matchings the lexicographically
/// smallest column vector wins, virtual sorting after every real column.
AssignmentResult min_cost_assignment(const CostMatrix& cost);

/// Plain Hungarian (Kuhn-Munkres with potentials) on an n x n matrix.
/// Returns the column of each row.
std::vector<int> hungarian_square(const CostMatrix& cost);

}  // namespace edgepipe
