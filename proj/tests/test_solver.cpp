#include <doctest.h>

#include "monoeq/scenarios.hpp"
#include "monoeq/solver.hpp"

#include <cmath>

using namespace monoeq;

TEST_CASE("cutoff representation round-trips monotone strategies") {
    const FiniteLattice L = FiniteLattice::chain({0.0, 1.0, 2.0, 3.0});
    const TypeSpace box{0.0, 2.0};
    const StepStrategy s{{0.0, 0.5, 1.5, 2.0}, {0, 2, 3}};
    const auto c = strategy_cutoffs(s, L, box);
    REQUIRE(c.size() == 4);
    CHECK(c[1] == doctest::Approx(0.5));   // first type playing at least action 1
    CHECK(c[2] == doctest::Approx(0.5));
    CHECK(c[3] == doctest::Approx(1.5));
    const StepStrategy back = strategy_from_cutoffs(c, L, box).merged();
    CHECK(back.cuts == s.cuts);
    CHECK(back.actions == s.actions);
}

TEST_CASE("extremal iterations of the coordination game reach both equilibria") {
    const BayesGame g = coordination_game();
    SolveSettings st;
    st.grid_log2 = 8;
    const EquilibriumResult low = find_monotone_equilibrium(g, st, InitKind::ExtremalLow);
    const EquilibriumResult high = find_monotone_equilibrium(g, st, InitKind::ExtremalHigh);
    CHECK(low.converged);
    CHECK(high.converged);
    CHECK(low.profile[0].merged().actions == std::vector<int>{0});
    CHECK(high.profile[0].merged().actions == std::vector<int>{1});
    CHECK(extremal_profile(g, true)[1].actions.front() == 1);
}

TEST_CASE("single-crossing game: monotone equilibrium cutoffs solve the indifference conditions") {
    const BayesGame g = single_crossing_game();
    SolveSettings st;
    st.grid_log2 = 10;
    const EquilibriumResult eq = find_monotone_equilibrium(g, st);
    REQUIRE(eq.converged);
    const auto b1 = eq.profile[0].merged().breakpoints(), b2 = eq.profile[1].merged().breakpoints();
    REQUIRE(b1.size() == 1);
    REQUIRE(b2.size() == 1);
    // Player 2 is indifferent iff 10 x1 - 8 = 0; player 1 at t1 = x1 iff (7/4 - 2 x2)(1 + x2/6 - 2 x1/3) = 0.
    CHECK(std::fabs(10.0 * b1[0] - 8.0) < 1e-6);
    CHECK(std::fabs((7.0 / 4.0 - 2.0 * b2[0]) * (1.0 + b2[0] / 6.0 - 2.0 * b1[0] / 3.0)) < 1e-6);
    CHECK(eq.residual <= st.residual_tol);
    CHECK_FALSE(eq.trace.empty());
}

TEST_CASE("settings validation") {
    SolveSettings st;
    st.damping = 0.0;
    CHECK_THROWS_AS(st.validate(), SolverError);
    SolveSettings ok;
    CHECK_NOTHROW(ok.validate());
    CHECK(ok.grid_step(2.0) == doctest::Approx(2.0 / 4096.0));
}

TEST_CASE("offset bid grids and tie measurements") {
    const auto g0 = offset_bid_grid(1.0, 2, 0.0, -1.0);
    CHECK(g0 == std::vector<double>{-1.0, 0.0, 0.25, 0.5, 0.75, 1.0});
    const auto g1 = offset_bid_grid(1.0, 2, 0.01, -1.0);
    CHECK(g1.front() == -1.0);
    CHECK(g1[1] == doctest::Approx(0.01));
    CHECK(g1.back() <= 1.0);

    const GeneralizedAuction a = uniform_first_price_auction(2);
    // Both bidders pool on one bid: every profile ties.
    const std::vector<BidStrategy> pool{BidStrategy::constant(0.0, 1.0, 0.5), BidStrategy::constant(0.0, 1.0, 0.5)};
    CHECK(auction_tie_probability(a, pool) == doctest::Approx(1.0));
    // Bid 0.5 below value 1/2 and 0.25 above for one player; the other bids 0.25 everywhere:
    // a tie needs the first bidder above 1/2, probability 1/2.
    const std::vector<BidStrategy> half{BidStrategy{{0.0, 0.5, 1.0}, {0.5, 0.25}}, BidStrategy::constant(0.0, 1.0, 0.25)};
    CHECK(auction_tie_probability(a, half) == doctest::Approx(0.5));
    const std::vector<BidStrategy> distinct{BidStrategy::constant(0.0, 1.0, 0.5), BidStrategy::constant(0.0, 1.0, 0.25)};
    CHECK(auction_tie_probability(a, distinct) == doctest::Approx(0.0));
    CHECK(auction_pooling_mass(a, distinct, 1.0) == doctest::Approx(1.0));
    CHECK(auction_pooling_mass(a, distinct, 0.5) == doctest::Approx(0.0));
}

TEST_CASE("perturbed games: the coordination game keeps the all-zero equilibrium") {
    const BayesGame g = coordination_game();
    SolveSettings st;
    st.grid_log2 = 8;
    const EquilibriumResult r = find_perturbed_equilibrium(g, 8, st, InitKind::ExtremalLow);
    CHECK(r.converged);
    CHECK(r.profile[0].merged().actions == std::vector<int>{0});
}

TEST_CASE("uniqueness scan of the single-crossing game isolates one cell") {
    const UniquenessVerdict v = uniqueness_scan(single_crossing_game(), 40, 1e-9, 129);
    CHECK(v.minimal_components == 1);
    REQUIRE_FALSE(v.minimal.empty());
    CHECK(std::fabs(v.minimal.front()[0] - 0.8) < 0.05);
    CHECK(std::fabs(v.minimal.front()[1] - 0.875) < 0.05);
}
