#include <doctest.h>

#include "monoeq/scenarios.hpp"
#include "monoeq/verification.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace monoeq;

namespace {

Measure to_measure(const oracle::FiniteMeasure& m) {
    Measure out;
    for (std::size_t k = 0; k < m.points.size(); ++k) out.atoms.push_back(Measure::Atom{m.points[k], m.mass[k]});
    return out;
}

}  // namespace

TEST_CASE("Prohorov distance between point masses") {
    CHECK(prohorov_distance(Measure::dirac({0.0}), Measure::dirac({0.3})) == doctest::Approx(0.3));
    CHECK(prohorov_distance(Measure::dirac({0.0}), Measure::dirac({5.0})) == doctest::Approx(1.0));
    CHECK(prohorov_distance(Measure::dirac({1.0, 1.0}), Measure::dirac({1.0, 1.0})) == 0.0);
}

TEST_CASE("Prohorov distance agrees with exhaustive search on small random measures") {
    std::mt19937_64 rng(2024);
    for (int rep = 0; rep < 200; ++rep) {
        const auto a = oracle::random_measure(rng, 4, 1 + rep % 2, 4);
        const auto b = oracle::random_measure(rng, 4, 1 + rep % 2, 4);
        const double ref = oracle::prohorov_brute_force(a, b);
        CHECK(std::fabs(prohorov_distance(to_measure(a), to_measure(b)) - ref) <= 1e-12);
    }
}

TEST_CASE("Prohorov distance to a point mass, including uniform components") {
    // mu = 0.9 delta_0 + 0.1 U[0, 1] against delta_0: mu(d > e) = 0.1 (1 - e) <= e iff e >= 1/11.
    Measure mu;
    mu.atoms.push_back(Measure::Atom{{0.0}, 0.9});
    mu.uniforms.push_back(Measure::Uniform{0.0, 1.0, 0.1});
    CHECK(prohorov_to_dirac(mu, {0.0}) == doctest::Approx(1.0 / 11.0).epsilon(1e-12));
    // The max-flow / discretized path brackets the same value.
    const ProhorovResult r = prohorov(mu, Measure::dirac({0.0}));
    CHECK(std::fabs(r.value - 1.0 / 11.0) <= r.error_bound + 1e-9);
}

TEST_CASE("type samples avoid breakpoints") {
    const TypeSample s = make_type_sample(TypeSpace{0.0, 1.0}, {0.5}, 1.0 / 4096.0, 16);
    CHECK(s.points.size() >= 16);
    for (double t : s.points) CHECK(t != 0.5);
    CHECK(s.exceptions == std::vector<double>{0.5});
}

TEST_CASE("BNE checks: second-price reference profile and a non-equilibrium") {
    const BayesGame g = second_price_example_game();
    const BneReport ok = check_bne(g, second_price_reference_profile(), 1e-10);
    CHECK(ok.is_eps_bne);
    // Bidding 0 throughout is not a best response to the reference profile.
    Profile bad = second_price_reference_profile();
    bad[0] = StepStrategy::constant(1.0, 2.0, 0);
    const BneReport no = check_bne(g, bad, 1e-10);
    CHECK_FALSE(no.is_eps_bne);
    // The best gap at value v is max(V(1), V(2)) with V(1) = (v-1)/4 and V(2) = (v-1)/2 + (v-2)/4.
    CHECK(no.gaps[0] == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("dominance audit on the coordination game") {
    const BayesGame g = coordination_game();
    const DominanceVerdict one = dominance_audit(g, 0, 1, 0.5);
    CHECK(one.kind == DominanceKind::WeaklyDominated);
    REQUIRE(one.dominating.has_value());
    CHECK(one.dominating->weight_of(0) == doctest::Approx(1.0));
    CHECK(dominance_audit(g, 0, 0, 0.5).kind == DominanceKind::UndominatedOnFamily);
    CHECK_FALSE(check_admissibility(g, coordination_profile(1)).admissible);
    CHECK(check_admissibility(g, coordination_profile(0)).admissible);
}

TEST_CASE("perfection certificate: completely mixed sequence approaching an equilibrium") {
    const BayesGame g = coordination_game();
    const Profile zero = coordination_profile(0);
    const auto cert = check_perfection(g, zero, canonical_sequence(g, zero, {4, 8, 16, 32, 64, 128, 256}));
    CHECK(cert.certified);
    for (std::size_t k = 1; k < cert.levels.size(); ++k) CHECK(cert.levels[k].rho_sup <= cert.levels[k - 1].rho_sup + 1e-12);
    const Profile one = coordination_profile(1);
    const auto bad = check_perfection(g, one, canonical_sequence(g, one, {4, 8, 16}));
    CHECK_FALSE(bad.certified);
    CHECK(bad.witness_player.has_value());
}

TEST_CASE("perfection certificate rejects sequences that are not completely mixed") {
    const BayesGame g = coordination_game();
    const Profile zero = coordination_profile(0);
    std::vector<SequenceLevel> seq{{2, to_behavioral(zero)}, {4, to_behavioral(zero)}};
    const auto cert = check_perfection(g, zero, seq);
    CHECK_FALSE(cert.certified);
    CHECK_FALSE(cert.levels.front().completely_mixed);
}

TEST_CASE("certificate rule: shrinking violation neighbourhoods are accepted, stationary ones are not") {
    PerfectionSettings ps;
    auto make = [&](const std::vector<double>& radii) {
        PerfectionCertificate c;
        for (std::size_t k = 0; k < radii.size(); ++k) {
            PerfectionLevel l;
            l.level = 1 << (k + 2);
            l.rho_sup = 0.001;
            l.violation_radius = radii[k];
            if (radii[k] > 0) {
                l.witness_player = 0;
                l.witness_type = 0.5 + radii[k];
            }
            c.levels.push_back(l);
        }
        finalize_certificate(c, ps);
        return c;
    };
    CHECK(make({0.2, 0.1, 0.05, 0.025}).certified);
    CHECK(make({0.1, 0.0, 0.0}).certified);
    CHECK_FALSE(make({0.2, 0.2, 0.2, 0.2}).certified);
    CHECK_FALSE(make({0.4, 0.3, 0.28, 0.27}).certified);

    PerfectionLevel rec;
    record_type(rec, 1, 0.3, 0.002, 0.5, {0.25}, 0.0, 1.0, ps);
    CHECK(rec.witness_player == 1);
    CHECK(rec.violation_radius == doctest::Approx(0.05));
    CHECK(rec.rho_sup == doctest::Approx(0.002));
}

TEST_CASE("completely mixed test") {
    BehavioralStrategy s{{0.0, 1.0}, {MixedAction{{{0, 0.5}, {1, 0.5}}}}};
    CHECK(completely_mixed(s, 2));
    CHECK_FALSE(completely_mixed(s, 3));
}
