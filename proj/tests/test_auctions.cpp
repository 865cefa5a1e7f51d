#include <doctest.h>

#include "monoeq/auctions.hpp"
#include "monoeq/scenarios.hpp"

#include <cmath>

using namespace monoeq;

TEST_CASE("first-price outcomes with ties and the quit action") {
    const GeneralizedAuction a = uniform_first_price_auction(2);
    const AuctionOutcome tie = resolve_outcome(a, {0.4, 0.4}, {0.9, 0.5});
    CHECK(tie.tie);
    CHECK(tie.winners.size() == 2);
    CHECK(tie.payoffs[0] == doctest::Approx(0.5 * (0.9 - 0.4)));
    CHECK(tie.payoffs[1] == doctest::Approx(0.5 * (0.5 - 0.4)));
    const auto quit = ex_post_payoff(a, {-1.0, 0.2}, {0.9, 0.5});
    CHECK(quit[0] == 0.0);
    CHECK(quit[1] == doctest::Approx(0.3));
    const auto nobody = ex_post_payoff(a, {-1.0, -1.0}, {0.9, 0.5});
    CHECK(nobody[0] == 0.0);
    CHECK(nobody[1] == 0.0);
    CHECK(win_weight(a, 0, {0.4, 0.4}) == doctest::Approx(0.5));
    CHECK(win_weight(a, 1, {0.4, 0.6}) == doctest::Approx(1.0));
}

TEST_CASE("all-pay payments are unconditional") {
    const GeneralizedAuction a = build_all_pay(
        2, [](int i, double, const std::vector<double>& v) { return 1.0 + v[static_cast<std::size_t>(i)]; },
        JointDensity::independent_uniform({{0.0, 1.0}, {0.0, 1.0}}));
    const auto u = ex_post_payoff(a, {0.3, 0.2}, {0.8, 0.9});
    CHECK(u[0] == doctest::Approx(1.8 - 0.3));
    CHECK(u[1] == doctest::Approx(-0.2));
}

TEST_CASE("generalized-auction assumptions hold for the standard formats") {
    CHECK(validate_auction_assumptions(uniform_first_price_auction(2)).holds());
    CHECK(validate_auction_assumptions(uniform_first_price_auction(3)).holds());
}

TEST_CASE("simulation: revenue of the risk-neutral equilibrium b(v) = v/2 is 1/3") {
    const GeneralizedAuction a = uniform_first_price_auction(2);
    const std::vector<BidStrategy> half{BidStrategy{{0.0, 1.0}, {0.0}}, BidStrategy{{0.0, 1.0}, {0.0}}};
    // Piecewise-constant approximation of v/2 on 1024 cells.
    std::vector<BidStrategy> prof(2);
    for (auto& b : prof) {
        for (int k = 0; k <= 1024; ++k) b.cuts.push_back(k / 1024.0);
        for (int k = 0; k < 1024; ++k) b.bids.push_back((k + 0.5) / 2048.0);
    }
    const SimulationStats s = simulate(a, prof, 200000, 5);
    // E[max(v1, v2)] / 2 = 1/3.
    CHECK(std::fabs(s.revenue_mean - 1.0 / 3.0) < s.revenue_ci + 1e-3);
    CHECK(s.efficiency_rate > 0.99);
    CHECK(s.draws == 200000);
    const SimulationStats z = simulate(a, half, 1000, 5);
    CHECK(z.tie_frequency == doctest::Approx(1.0));
}

TEST_CASE("finite-grid auction games reproduce the auction payoffs") {
    const GeneralizedAuction a = uniform_first_price_auction(2);
    const std::vector<double> grid{-1.0, 0.0, 0.25, 0.5};
    const BayesGame g = to_bayes_game(a, {grid, grid});
    CHECK(g.n == 2);
    CHECK(g.lattice(0).size() == 4);
    // Bid 0.25 against 0 at value 0.75 wins outright.
    CHECK(g.payoff(0, {2, 1}, {0.75, 0.5}) == doctest::Approx(0.5));
    CHECK(g.payoff(0, {2, 2}, {0.75, 0.5}) == doctest::Approx(0.25));
}

TEST_CASE("second-price game: winner pays the competing bid") {
    const BayesGame g = build_second_price_game({0.0, 1.0, 2.0}, {{1.0, 2.0}, {1.0, 2.0}});
    CHECK(g.payoff(0, {2, 1}, {1.7, 1.2}) == doctest::Approx(0.7));
    CHECK(g.payoff(1, {2, 1}, {1.7, 1.2}) == 0.0);
    CHECK(g.payoff(0, {1, 1}, {1.7, 1.2}) == doctest::Approx(0.5 * 0.7));
}

TEST_CASE("bid strategies evaluate cellwise") {
    const BidStrategy b{{0.0, 0.5, 1.0}, {0.1, 0.3}};
    CHECK(b.bid_at(0.2) == 0.1);
    CHECK(b.bid_at(0.5) == 0.3);
    CHECK(b.bid_at(1.0) == 0.3);
}
