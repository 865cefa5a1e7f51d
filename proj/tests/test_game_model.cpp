#include <doctest.h>

#include "monoeq/game_model.hpp"
#include "monoeq/scenarios.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace monoeq;

namespace {

StepStrategy step(std::vector<double> cuts, std::vector<int> actions) { return StepStrategy{cuts, actions}; }

// Conditional expectation of u_0(a, s(t2); t1, t2) over t2 given t1 by Simpson's rule,
// split at the cuts of s; `weight` is the joint density.
double simpson_interim(const BayesGame& g, int a, double t1, const StepStrategy& s,
                       const std::function<double(double, double)>& weight) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < s.cells(); ++k) {
        const int b = s.actions[k];
        num += oracle::simpson([&](double t2) { return g.payoff(0, {a, b}, {t1, t2}) * weight(t1, t2); }, s.cuts[k],
                               s.cuts[k + 1]);
        den += oracle::simpson([&](double t2) { return weight(t1, t2); }, s.cuts[k], s.cuts[k + 1]);
    }
    return num / den;
}

}  // namespace

TEST_CASE("step strategies: evaluation, merging and validation") {
    const StepStrategy s = step({0.0, 0.25, 0.5, 1.0}, {0, 0, 2});
    CHECK(s.eval(0.0) == 0);
    CHECK(s.eval(0.3) == 0);
    CHECK(s.eval(0.5) == 2);
    CHECK(s.eval(1.0) == 2);
    const StepStrategy m = s.merged();
    CHECK(m.cells() == 2);
    CHECK(m.breakpoints() == std::vector<double>{0.5});
    CHECK(is_monotone(s, FiniteLattice::chain({0.0, 1.0, 2.0})));
    CHECK_FALSE(is_monotone(step({0.0, 0.5, 1.0}, {1, 0}), FiniteLattice::chain({0.0, 1.0})));
    CHECK_THROWS(step({0.0, 0.5, 0.4}, {0, 1}).validate());
    CHECK_THROWS(step({0.0, 1.0}, {0, 1}).validate());
}

TEST_CASE("mixed actions validate their weights") {
    const MixedAction good{{{0, 0.25}, {1, 0.75}}};
    CHECK_NOTHROW(good.validate(2));
    CHECK(good.weight_of(1) == doctest::Approx(0.75));
    CHECK_THROWS(MixedAction{{{0, 0.5}, {1, 0.25}}}.validate(2));
    CHECK_THROWS(MixedAction{{{3, 1.0}}}.validate(2));
}

TEST_CASE("type-free payoffs: interim value equals the opponent cutoff mass") {
    const BayesGame g = single_crossing_game();
    for (double x1 : {0.1, 0.37, 0.8, 0.95}) {
        const BehavioralProfile opp{BehavioralStrategy::from_step(step({0.0, x1, 1.0}, {0, 1})),
                                    BehavioralStrategy::from_step(step({0.0, 1.0}, {0}))};
        const auto v = interim_payoffs(g, 1, 0.5, opp);
        // Closed forms of player 2's values against a cutoff opponent.
        CHECK(v[0] == doctest::Approx(7.0 - 8.0 * x1).epsilon(1e-12));
        CHECK(v[1] == doctest::Approx(2.0 * x1 - 1.0).epsilon(1e-12));
    }
}

TEST_CASE("exact and quadrature integration agree with an independent Simpson rule") {
    const BayesGame g = single_crossing_game();
    const StepStrategy opp = step({0.0, 0.3, 0.55, 1.0}, {1, 0, 1});
    const BehavioralProfile prof{BehavioralStrategy::from_step(step({0.0, 1.0}, {0})), BehavioralStrategy::from_step(opp)};
    IntegrationOptions exact, quad;
    exact.method = IntegrationOptions::Method::Exact;
    quad.method = IntegrationOptions::Method::Quadrature;
    for (double t1 : {0.0, 0.2, 0.77, 1.0})
        for (int a = 0; a < 2; ++a) {
            const double ref = simpson_interim(g, a, t1, opp, [](double, double) { return 1.0; });
            const InterimValue ve = interim_payoff(g, 0, a, t1, prof, exact);
            const InterimValue vq = interim_payoff(g, 0, a, t1, prof, quad);
            CHECK(ve.method == "exact");
            CHECK(vq.method == "quadrature");
            CHECK(std::fabs(ve.value - ref) < 1e-10);
            CHECK(std::fabs(vq.value - ref) < 1e-10);
        }
}

TEST_CASE("correlated types: interim payoffs use the conditional density") {
    BayesGame g = single_crossing_game();
    auto f = [](double a, double b) { return 1.0 + 0.8 * (a - 0.5) * (b - 0.5); };
    g.density = JointDensity::general({{0.0, 1.0}, {0.0, 1.0}},
                                      [f](const std::vector<double>& t) { return f(t[0], t[1]); }, 1.2);
    const StepStrategy opp = step({0.0, 0.6, 1.0}, {0, 1});
    const BehavioralProfile prof{BehavioralStrategy::from_step(step({0.0, 1.0}, {0})), BehavioralStrategy::from_step(opp)};
    for (double t1 : {0.05, 0.5, 0.9})
        for (int a = 0; a < 2; ++a) {
            const double ref = simpson_interim(g, a, t1, opp, f);
            CHECK(std::fabs(interim_payoff(g, 0, a, t1, prof).value - ref) < 1e-9);
        }
}

TEST_CASE("Monte Carlo oracle brackets the integrated interim payoff") {
    const BayesGame g = single_crossing_game();
    const BehavioralProfile prof{BehavioralStrategy::from_step(step({0.0, 1.0}, {0})),
                                 BehavioralStrategy::from_step(step({0.0, 0.4, 1.0}, {0, 1}))};
    const double exact = interim_payoff(g, 0, 1, 0.3, prof).value;
    const McEstimate mc = mc_interim_oracle(g, 0, 1, 0.3, prof, 100000, 11);
    CHECK(mc.stderr_ > 0.0);
    CHECK(std::fabs(mc.mean - exact) < 4.0 * mc.stderr_);
}

TEST_CASE("best-response sets and the maximal selection") {
    const BestResponseSet br = best_response_from_values({1.0, 3.0, 3.0 - 1e-12, 2.0}, 1e-10);
    CHECK(br.actions == std::vector<int>{1, 2});
    CHECK(br.max_value == doctest::Approx(3.0));
    const FiniteLattice chain = FiniteLattice::chain({0.0, 1.0, 2.0, 3.0});
    CHECK(select_maximal(chain, br.actions) == 2);
    const FiniteLattice sq = FiniteLattice::product({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    CHECK(select_maximal(sq, {1, 2, 3}) == 3);
    CHECK(select_maximal(sq, {1, 2}) == 2);
}

TEST_CASE("interval best response locates the maximizer") {
    const IntervalMaximizer r = best_response_interval([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0, 1e-6);
    REQUIRE(r.maximizers.size() >= 1);
    CHECK(std::fabs(r.maximizers.front() - 0.3) < 1e-5);
    const IntervalMaximizer edge = best_response_interval([](double x) { return x; }, 0.0, 2.0);
    CHECK(std::fabs(edge.maximizers.back() - 2.0) < 1e-9);
}

TEST_CASE("game validation catches malformed games") {
    BayesGame g = single_crossing_game();
    CHECK_NOTHROW(g.validate());
    g.n = 3;
    CHECK_THROWS_AS(g.validate(), ModelError);
    BayesGame h = single_crossing_game();
    h.types[0] = TypeSpace{1.0, 0.0};
    CHECK_THROWS_AS(h.validate(), ModelError);
}
