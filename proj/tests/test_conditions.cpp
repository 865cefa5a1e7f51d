#include <doctest.h>

#include "monoeq/conditions.hpp"
#include "monoeq/scenarios.hpp"

#include <cmath>
#include <random>

using namespace monoeq;

namespace {
const FiniteLattice kChain3 = FiniteLattice::chain({0.0, 1.0, 2.0});
const FiniteLattice kSquare = FiniteLattice::product({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
}  // namespace

TEST_CASE("single crossing: ordinal condition holds where increasing differences fails") {
    const auto grid = uniform_grid(0.0, 1.0, 21);
    // The gain (t - 1/2) e^{-4t} changes sign once but decreases for t > 3/4.
    auto h = [](int a, double t) { return a * (t - 0.5) * std::exp(-4.0 * t); };
    const ConditionReport scc = check_single_crossing(h, kChain3, grid);
    const ConditionReport idc = check_increasing_differences(h, kChain3, grid);
    CHECK(scc.holds);
    CHECK_FALSE(idc.holds);
    REQUIRE(idc.witness.has_value());
    // The witness re-evaluates to a violation.
    const auto& w = *idc.witness;
    const int x = static_cast<int>(w.x[0]), xp = static_cast<int>(w.x_prime[0]);
    CHECK(h(xp, *w.y_prime) - h(x, *w.y_prime) < h(xp, *w.y) - h(x, *w.y));
}

TEST_CASE("single crossing fails for a gain that changes sign twice") {
    auto h = [](int a, double t) { return a * std::sin(6.0 * t); };
    const ConditionReport scc = check_single_crossing(h, kChain3, uniform_grid(0.0, 1.0, 33));
    CHECK_FALSE(scc.holds);
    CHECK(scc.witness.has_value());
    CHECK(scc.verdict() == "fails");
}

TEST_CASE("supermodular versus quasi-supermodular on the square") {
    const std::vector<double> sm{0.0, 1.0, 1.0, 2.5};    // h(0,0), h(0,1), h(1,0), h(1,1)
    const std::vector<double> qsm{0.0, 1.0, 1.0, 1.5};   // ordinal but not cardinal complementarity
    const std::vector<double> none{0.0, 1.0, 1.0, 0.5};
    auto f = [](const std::vector<double>& v) { return [v](int k) { return v[static_cast<std::size_t>(k)]; }; };
    CHECK(check_supermodular(f(sm), kSquare).holds);
    CHECK(check_quasi_supermodular(f(sm), kSquare).holds);
    CHECK_FALSE(check_supermodular(f(qsm), kSquare).holds);
    CHECK(check_quasi_supermodular(f(qsm), kSquare).holds);
    CHECK_FALSE(check_quasi_supermodular(f(none), kSquare).holds);
}

TEST_CASE("every function on a chain is supermodular") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        const std::vector<double> v{u(rng), u(rng), u(rng)};
        CHECK(check_supermodular([&](int a) { return v[static_cast<std::size_t>(a)]; }, kChain3).holds);
    }
}

TEST_CASE("affiliation of densities") {
    const std::vector<std::vector<double>> grid{uniform_grid(0.0, 1.0, 9), uniform_grid(0.0, 1.0, 9)};
    CHECK(check_affiliated([](const std::vector<double>&) { return 1.0; }, grid).holds);
    CHECK(check_affiliated([](const std::vector<double>& t) { return std::exp(t[0] * t[1]); }, grid).holds);
    const ConditionReport neg =
        check_affiliated([](const std::vector<double>& t) { return 1.0 - 0.9 * (t[0] - 0.5) * (t[1] - 0.5) * 4.0; }, grid);
    CHECK_FALSE(neg.holds);
    CHECK(neg.witness.has_value());
}

TEST_CASE("uniform grids include both endpoints") {
    const auto g = uniform_grid(1.0, 2.0, 5);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == 1.0);
    CHECK(g.back() == 2.0);
    CHECK(g[2] == doctest::Approx(1.5));
}

TEST_CASE("cutoff family members are monotone opponent strategies") {
    const BayesGame g = single_crossing_game();
    const OpponentFamily fam = cutoff_family(g, 0, 3);
    CHECK(fam.profiles.size() >= 8);
    CHECK(fam.profiles.size() == fam.labels.size());
    for (const auto& p : fam.profiles) {
        const auto& s = p[1];
        for (std::size_t k = 1; k < s.cells.size(); ++k) {
            // Pure cells, nondecreasing actions.
            CHECK(s.cells[k].atoms.size() == 1);
            CHECK(s.cells[k].atoms[0].first >= s.cells[k - 1].atoms[0].first);
        }
    }
}

TEST_CASE("interim conditions of the single-crossing game: the ordinal condition alone holds") {
    const BayesGame g = single_crossing_game();
    const auto reps = check_player_conditions(g, 0, cutoff_family(g, 0), uniform_grid(0.0, 1.0, 17), {"scc", "idc"});
    REQUIRE(reps.size() == 2);
    for (const auto& r : reps) {
        if (r.condition == "single-crossing") CHECK(r.holds);
        if (r.condition == "increasing-differences") {
            CHECK_FALSE(r.holds);
            REQUIRE(r.witness.has_value());
            // The difference (7/4 - 2 x2)(1 + x2/6 - 2 t1/3) decreases in t1 exactly when x2 < 7/8.
            REQUIRE_FALSE(r.witness->opponent_cutoffs.empty());
            CHECK(r.witness->opponent_cutoffs[0] < 0.875);
        }
    }
}
