#include <doctest.h>

#include "monoeq/lattice_order.hpp"

#include <random>

using namespace monoeq;

TEST_CASE("chain lattice: join and meet are max and min") {
    const FiniteLattice L = FiniteLattice::chain({-1.0, 0.0, 2.5, 7.0});
    CHECK(L.is_chain());
    CHECK(L.size() == 4);
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) {
            CHECK(L.join(a, b) == std::max(a, b));
            CHECK(L.meet(a, b) == std::min(a, b));
            CHECK(L.leq(a, b) == (a <= b));
        }
    CHECK(L.bottom() == 0);
    CHECK(L.top() == 3);
    CHECK(L.distance(1, 3) == doctest::Approx(7.0));
    CHECK_THROWS_AS(FiniteLattice::chain({0.0, 0.0}), OrderError);
}

TEST_CASE("product lattice on {0,1}^2") {
    const FiniteLattice L = FiniteLattice::product({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    CHECK_FALSE(L.is_chain());
    CHECK(L.join(1, 2) == 3);
    CHECK(L.meet(1, 2) == 0);
    CHECK_FALSE(L.leq(1, 2));
    CHECK_FALSE(L.leq(2, 1));
    CHECK(L.bottom() == 0);
    CHECK(L.top() == 3);
    CHECK(L.maximal_chains().size() == 2);
    CHECK(L.join_of({0, 1, 2}) == 3);
    CHECK(L.index_of(PosetElement{1, 0}) == std::optional<std::size_t>(2));
    CHECK_FALSE(L.index_of(PosetElement{2, 0}).has_value());
}

TEST_CASE("sets that are not lattices are rejected") {
    // Two incomparable maximal elements and no top.
    const std::vector<PosetElement> v{{0, 0}, {0, 1}, {1, 0}};
    const LatticeVerdict verdict = is_lattice(v);
    CHECK_FALSE(verdict.is_lattice);
    CHECK(verdict.witness.has_value());
    CHECK_THROWS_AS(FiniteLattice::product(v), OrderError);
    CHECK(is_lattice(std::vector<PosetElement>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}).is_lattice);
}

TEST_CASE("explicit order: diamond and a non-antisymmetric relation") {
    const std::vector<PosetElement> e{{0}, {1}, {2}, {3}};
    // 0 <= 1, 2 <= 3 with 1 and 2 incomparable.
    std::vector<std::vector<bool>> leq(4, std::vector<bool>(4, false));
    for (int a = 0; a < 4; ++a) leq[a][a] = true;
    leq[0][1] = leq[0][2] = leq[0][3] = leq[1][3] = leq[2][3] = true;
    const FiniteLattice L = FiniteLattice::explicit_order(e, leq);
    CHECK(L.join(1, 2) == 3);
    CHECK(L.meet(1, 2) == 0);
    auto bad = leq;
    bad[1][0] = true;
    CHECK_THROWS_AS(FiniteLattice::explicit_order(e, bad), OrderError);
}

TEST_CASE("rational parsing and conversions") {
    CHECK(parse_rational("3/4") == Rational(3, 4));
    CHECK(parse_rational("-2") == Rational(-2));
    CHECK(parse_rational("0.125") == Rational(1, 8));
    CHECK_THROWS(parse_rational("abc"));
    CHECK(rational_from_double(0.875) == Rational(7, 8));
    CHECK(to_string(PosetElement{1, 2}) == "(1,2)");
}

TEST_CASE("vector join and meet agree with coordinatewise max and min") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        std::vector<double> x{u(rng), u(rng), u(rng)}, y{u(rng), u(rng), u(rng)};
        const auto j = join(x, y), m = meet(x, y);
        for (int c = 0; c < 3; ++c) {
            CHECK(j[c] == std::max(x[c], y[c]));
            CHECK(m[c] == std::min(x[c], y[c]));
        }
        CHECK(product_leq(m, x));
        CHECK(product_leq(x, j));
    }
}

TEST_CASE("endogenous order on nonincreasing vectors") {
    const RenyOrderSpec spec{1, 0.5};
    // First coordinate and the alpha-adjusted second coordinate both increase.
    CHECK(reny_leq({0.9, 0.6}, {0.5, 0.3}, spec));
    CHECK_FALSE(reny_leq({0.5, 0.3}, {0.9, 0.6}, spec));
    // Second coordinate falls relative to alpha * first: not comparable upwards.
    CHECK_FALSE(reny_leq({0.9, 0.1}, {0.5, 0.3}, spec));
}
