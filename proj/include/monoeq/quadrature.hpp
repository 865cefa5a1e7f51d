#pragma once

#include <cstdint>
#include <vector>

namespace monoeq {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre rule with `order` points (1 <= order <= 128); cached, thread-safe.
const GaussRule& gauss_legendre(int order);

// Integral of f over [a, b] with an `order`-point Gauss-Legendre rule.
template <class F>
double gauss_integrate(F&& f, double a, double b, int order) {
    const GaussRule& r = gauss_legendre(order);
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t k = 0; k < r.nodes.size(); ++k) s += r.weights[k] * f(c + h * r.nodes[k]);
    return s * h;
}

// Deterministic, platform-independent helpers for sampling.
double unit_from_bits(std::uint64_t bits);  // uniform in [0, 1)
double van_der_corput(std::uint64_t k);     // base-2 radical inverse in [0, 1)

}  // namespace monoeq
