#include <doctest.h>

#include "monoeq/perturbation.hpp"
#include "monoeq/scenarios.hpp"

#include <cmath>

using namespace monoeq;

TEST_CASE("finite tremble: mass (1 - 1/m) on the action and 1/m spread over all actions") {
    const MixedAction mix = perturb_action_finite(1, 4, 8);
    double total = 0.0;
    for (const auto& [a, p] : mix.atoms) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mix.weight_of(1) == doctest::Approx(1.0 - 1.0 / 8.0 + 1.0 / 32.0));
    for (int a : {0, 2, 3}) CHECK(mix.weight_of(a) == doctest::Approx(1.0 / 32.0));
    const MixedAction w = perturb_action_finite(0, 2, 4, {0.25, 0.75});
    CHECK(w.weight_of(0) == doctest::Approx(0.75 + 0.0625));
    CHECK(w.weight_of(1) == doctest::Approx(0.1875));
    CHECK_THROWS(perturb_action_finite(0, 2, 0));
}

TEST_CASE("tremble of a mixture is the mixture of trembles") {
    const MixedAction sigma{{{0, 0.3}, {2, 0.7}}};
    const MixedAction p = perturb_mixture_finite(sigma, 3, 5);
    for (int a = 0; a < 3; ++a) {
        const double expected = 0.3 * perturb_action_finite(0, 3, 5).weight_of(a) + 0.7 * perturb_action_finite(2, 3, 5).weight_of(a);
        CHECK(p.weight_of(a) == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("auction tremble: atom, uniform component and quit atom") {
    const BidMixture mix = perturb_action_auction(0.4, 10, 2.0, -1.0);
    CHECK(mix.total() == doctest::Approx(1.0));
    CHECK(mix.uniform_weight == doctest::Approx(0.05));
    CHECK(mix.uniform_lo == 0.0);
    CHECK(mix.uniform_hi == 2.0);
    double at_bid = 0.0, at_quit = 0.0;
    for (const auto& [b, p] : mix.atoms) {
        if (b == 0.4) at_bid += p;
        if (b == -1.0) at_quit += p;
    }
    CHECK(at_bid == doctest::Approx(0.9));
    CHECK(at_quit == doctest::Approx(0.05));
}

TEST_CASE("perturbed payoff equals the brute-force expectation over both trembles") {
    const BayesGame g = single_crossing_game();
    PerturbedGame pg;
    pg.game = g;
    pg.scheme.m = 3;
    const std::vector<double> t{0.3, 0.6};
    for (int a0 = 0; a0 < 2; ++a0)
        for (int a1 = 0; a1 < 2; ++a1) {
            double ref = 0.0;
            for (int b0 = 0; b0 < 2; ++b0)
                for (int b1 = 0; b1 < 2; ++b1) {
                    const double p0 = b0 == a0 ? 1.0 - 1.0 / 3.0 + 1.0 / 6.0 : 1.0 / 6.0;
                    const double p1 = b1 == a1 ? 1.0 - 1.0 / 3.0 + 1.0 / 6.0 : 1.0 / 6.0;
                    ref += p0 * p1 * g.payoff(0, {b0, b1}, t);
                }
            CHECK(perturbed_payoff(pg, 0, {a0, a1}, t) == doctest::Approx(ref).epsilon(1e-14));
        }
}

TEST_CASE("perturbed interim payoffs agree with the stand-alone perturbed game") {
    const BayesGame g = single_crossing_game();
    PerturbationScheme scheme;
    scheme.m = 4;
    const BayesGame gm = make_perturbed_game(g, scheme);
    const Profile p = single_crossing_monotone_profile();
    const BehavioralProfile bp = to_behavioral(p);
    for (double t : {0.1, 0.5, 0.95}) {
        const auto direct = perturbed_interim_payoffs(g, scheme, 0, t, bp);
        const auto brute = interim_payoffs(gm, 0, t, bp);
        REQUIRE(direct.size() == brute.size());
        for (std::size_t a = 0; a < direct.size(); ++a) CHECK(direct[a] == doctest::Approx(brute[a]).epsilon(1e-12));
    }
}

TEST_CASE("embedded strategies are completely mixed") {
    PerturbationScheme scheme;
    scheme.m = 16;
    const BehavioralStrategy s = embed_strategy(StepStrategy{{0.0, 0.5, 1.0}, {0, 2}}, 3, scheme);
    for (const auto& cell : s.cells)
        for (int a = 0; a < 3; ++a) CHECK(cell.weight_of(a) > 0.0);
}

TEST_CASE("auction expansion: partition terms sum to the interim value") {
    const GeneralizedAuction a = uniform_first_price_auction(2);
    const std::vector<BidStrategy> others{BidStrategy::constant(0.0, 1.0, 0.0), BidStrategy{{0.0, 0.5, 1.0}, {0.1, 0.3}}};
    for (double b : {0.05, 0.2, 0.45})
        for (double v : {0.3, 0.8}) {
            const AuctionExpansion e = auction_interim_expansion(a, 8, 0, b, v, others);
            double sum = 0.0;
            for (const auto& term : e.terms) sum += term.contribution();
            // Every partition weight carries the own (1 - 1/m) factor.
            CHECK(sum == doctest::Approx((1.0 - 1.0 / 8.0) * e.tremble_value).epsilon(1e-12));
            // Win probability of bid b against the opponent's tremble, by hand:
            // strategy part (7/8) * P(opp bid < b), uniform part (1/16) * b, quit part (1/16).
            const double p_strategy = b > 0.3 ? 1.0 : (b > 0.1 ? 0.5 : 0.0);
            const double win = 7.0 / 8.0 * p_strategy + 1.0 / 16.0 * b + 1.0 / 16.0;
            CHECK(e.tremble_value == doctest::Approx((v - b) * win).epsilon(1e-10));
        }
}
