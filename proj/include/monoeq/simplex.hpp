#pragma once

#include <string>
#include <vector>

namespace monoeq {

struct LpResult {
    enum class Status { Optimal, Infeasible, Unbounded } status = Status::Optimal;
    double objective = 0.0;
    std::vector<double> x;
};

// maximize c^T x subject to A x = b, x >= 0 (dense two-phase simplex with
// Bland's rule; sized for dominance problems with tens of variables).
LpResult simplex_maximize(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                          const std::vector<double>& c, double eps = 1e-11);

}  // namespace monoeq
