#pragma once
// Independent reference implementations used by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

struct FiniteMeasure {
    std::vector<std::vector<double>> points;
    std::vector<double> mass;
};

inline double euclid(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

// Prohorov distance of two finitely supported measures by exhaustive search:
// the map eps -> max_A mu(A) - nu(A^eps) is constant between consecutive
// pairwise distances, so the infimum of {eps : max_A ... <= eps} is attained
// at the left end of an interval or at the constant itself.
inline double prohorov_brute_force(const FiniteMeasure& mu, const FiniteMeasure& nu) {
    const std::size_t p = mu.points.size(), q = nu.points.size();
    std::vector<double> d{0.0};
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = 0; b < q; ++b) d.push_back(euclid(mu.points[a], nu.points[b]));
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    double best = 1.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
        const double left = d[k];
        const double right = k + 1 < d.size() ? d[k + 1] : std::numeric_limits<double>::infinity();
        double c = 0.0;
        for (std::uint32_t A = 1; A < (1u << p); ++A) {
            double ma = 0.0, nb = 0.0;
            for (std::size_t a = 0; a < p; ++a)
                if (A >> a & 1u) ma += mu.mass[a];
            for (std::size_t b = 0; b < q; ++b) {
                bool near = false;
                for (std::size_t a = 0; a < p && !near; ++a)
                    if ((A >> a & 1u) && euclid(mu.points[a], nu.points[b]) <= left) near = true;
                if (near) nb += nu.mass[b];
            }
            c = std::max(c, ma - nb);
        }
        const double eps = std::max(c, left);
        if (eps < right) best = std::min(best, eps);
    }
    return best;
}

inline FiniteMeasure random_measure(std::mt19937_64& rng, int max_atoms, int dim, int coord_levels) {
    std::uniform_int_distribution<int> atoms(1, max_atoms), coord(0, coord_levels);
    std::uniform_real_distribution<double> w(0.05, 1.0);
    FiniteMeasure m;
    const int k = atoms(rng);
    double total = 0.0;
    for (int a = 0; a < k; ++a) {
        std::vector<double> x;
        for (int c = 0; c < dim; ++c) x.push_back(coord(rng) / static_cast<double>(coord_levels));
        m.points.push_back(x);
        m.mass.push_back(w(rng));
        total += m.mass.back();
    }
    for (double& x : m.mass) x /= total;
    return m;
}

// Composite Simpson rule.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace oracle
