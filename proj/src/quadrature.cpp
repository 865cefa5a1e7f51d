#include "monoeq/quadrature.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace monoeq {

namespace {

GaussRule compute_rule(int n) {
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int k = 0; k < n; ++k) {
        double x = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        r.nodes[n - 1 - k] = x;
        r.weights[n - 1 - k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
    if (order < 1 || order > 128) throw std::invalid_argument("quadrature order must be in [1,128]");
    static std::array<GaussRule, 129> table;
    static std::array<std::once_flag, 129> flags;
    std::call_once(flags[order], [order] { table[order] = compute_rule(order); });
    return table[order];
}

double unit_from_bits(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

double van_der_corput(std::uint64_t k) {
    double x = 0.0, f = 0.5;
    while (k) {
        if (k & 1u) x += f;
        k >>= 1;
        f *= 0.5;
    }
    return x;
}

}  // namespace monoeq
