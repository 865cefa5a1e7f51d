#include "monoeq/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace monoeq {

namespace {

struct Tableau {
    std::size_t rows = 0;               // constraint rows
    std::size_t cols = 0;               // variables (excluding rhs)
    std::vector<std::vector<double>> t;  // rows x (cols + 1), last column rhs
    std::vector<std::size_t> basis;

    void pivot(std::size_t r, std::size_t c) {
        const double p = t[r][c];
        for (double& v : t[r]) v /= p;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r) continue;
            const double f = t[i][c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[r][j];
        }
        basis[r] = c;
    }

    // Maximizes obj^T x over the current basis; columns >= `allowed` never enter.
    LpResult::Status optimize(const std::vector<double>& obj, std::size_t allowed, double eps) {
        for (int guard = 0; guard < 100000; ++guard) {
            // Reduced costs: obj_j - obj_B^T column_j.
            std::size_t enter = cols;
            for (std::size_t j = 0; j < allowed; ++j) {
                double rc = obj[j];
                for (std::size_t i = 0; i < rows; ++i) rc -= obj[basis[i]] * t[i][j];
                if (rc > eps) {
                    enter = j;  // Bland: smallest index
                    break;
                }
            }
            if (enter == cols) return LpResult::Status::Optimal;
            std::size_t leave = rows;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < rows; ++i) {
                if (t[i][enter] > eps) {
                    const double ratio = t[i][cols] / t[i][enter];
                    if (ratio < best - 1e-15 || (std::fabs(ratio - best) <= 1e-15 && leave < rows && basis[i] < basis[leave])) {
                        best = ratio;
                        leave = i;
                    }
                }
            }
            if (leave == rows) return LpResult::Status::Unbounded;
            pivot(leave, enter);
        }
        throw std::runtime_error("simplex iteration limit reached");
    }
};

}  // namespace

LpResult simplex_maximize(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                          const std::vector<double>& c, double eps) {
    const std::size_t m = A.size();
    const std::size_t n = c.size();
    if (b.size() != m) throw std::invalid_argument("simplex: rhs size mismatch");
    for (const auto& row : A)
        if (row.size() != n) throw std::invalid_argument("simplex: constraint width mismatch");

    Tableau tab;
    tab.rows = m;
    tab.cols = n + m;
    tab.t.assign(m, std::vector<double>(tab.cols + 1, 0.0));
    tab.basis.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double sign = b[i] < 0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) tab.t[i][j] = sign * A[i][j];
        tab.t[i][n + i] = 1.0;
        tab.t[i][tab.cols] = sign * b[i];
        tab.basis[i] = n + i;
    }
    // Phase 1: maximize -sum(artificials).
    std::vector<double> phase1(tab.cols, 0.0);
    for (std::size_t i = 0; i < m; ++i) phase1[n + i] = -1.0;
    tab.optimize(phase1, tab.cols, eps);
    double infeas = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        if (tab.basis[i] >= n) infeas += tab.t[i][tab.cols];
    LpResult res;
    if (infeas > 1e-9) {
        res.status = LpResult::Status::Infeasible;
        return res;
    }
    // Drive artificials out of the basis where possible; drop redundant rows.
    for (std::size_t i = 0; i < tab.rows;) {
        if (tab.basis[i] < n) {
            ++i;
            continue;
        }
        std::size_t col = n;
        for (std::size_t j = 0; j < n; ++j)
            if (std::fabs(tab.t[i][j]) > 1e-9) {
                col = j;
                break;
            }
        if (col < n) {
            tab.pivot(i, col);
            ++i;
        } else {
            tab.t.erase(tab.t.begin() + static_cast<std::ptrdiff_t>(i));
            tab.basis.erase(tab.basis.begin() + static_cast<std::ptrdiff_t>(i));
            --tab.rows;
        }
    }
    std::vector<double> phase2(tab.cols, 0.0);
    for (std::size_t j = 0; j < n; ++j) phase2[j] = c[j];
    res.status = tab.optimize(phase2, n, eps);
    if (res.status != LpResult::Status::Optimal) return res;
    res.x.assign(n, 0.0);
    for (std::size_t i = 0; i < tab.rows; ++i)
        if (tab.basis[i] < n) res.x[tab.basis[i]] = tab.t[i][tab.cols];
    res.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
    return res;
}

}  // namespace monoeq
