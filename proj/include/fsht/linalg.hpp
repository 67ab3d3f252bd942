#pragma once
// Minimal dense linear algebra: row-major matrices and Gaussian
// elimination with partial pivoting.  The systems solved here are small
// (one row per machine state), dense, and well conditioned away from the
// degenerate inputs the callers already reject, so a textbook O(n^3)
// elimination is the right tool.

#include <cmath>
#include <cstddef>
#include <vector>

#include "model.hpp"

namespace fsht {

struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;  // row-major

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)]; }
};

// Solves A X = B in place (A is n x n, B is n x k) by LU decomposition
// with partial pivoting; the solution is left in B.  Throws
// numerical_error when a pivot falls below tolerance relative to the
// largest entry of A, i.e. the system is singular for our purposes.
inline void solve_in_place(Matrix& A, Matrix& B) {
    const int n = A.rows;
    const int k = B.cols;

    double scale = 1.0;
    for (double v : A.data) scale = std::max(scale, std::fabs(v));
    const double tol = 1e-13 * scale;

    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::fabs(A.at(col, col));
        for (int r = col + 1; r < n; ++r) {
            double cand = std::fabs(A.at(r, col));
            if (cand > best) { best = cand; pivot = r; }
        }
        if (best < tol)
            throw numerical_error("solve_in_place: system singular beyond tolerance");
        if (pivot != col) {
            for (int c = col; c < n; ++c) std::swap(A.at(pivot, c), A.at(col, c));
            for (int c = 0; c < k; ++c) std::swap(B.at(pivot, c), B.at(col, c));
        }
        const double inv = 1.0 / A.at(col, col);
        for (int r = col + 1; r < n; ++r) {
            double f = A.at(r, col) * inv;
            if (f == 0.0) continue;
            A.at(r, col) = 0.0;
            for (int c = col + 1; c < n; ++c) A.at(r, c) -= f * A.at(col, c);
            for (int c = 0; c < k; ++c) B.at(r, c) -= f * B.at(col, c);
        }
    }
    // back substitution
    for (int col = n - 1; col >= 0; --col) {
        const double inv = 1.0 / A.at(col, col);
        for (int c = 0; c < k; ++c) {
            double sum = B.at(col, c);
            for (int j = col + 1; j < n; ++j) sum -= A.at(col, j) * B.at(j, c);
            B.at(col, c) = sum * inv;
        }
    }
}

inline std::vector<double> solve(Matrix A, const std::vector<double>& b) {
    Matrix B(A.rows, 1);
    for (int r = 0; r < A.rows; ++r) B.at(r, 0) = b[static_cast<std::size_t>(r)];
    solve_in_place(A, B);
    return B.data;
}

}  // namespace fsht
