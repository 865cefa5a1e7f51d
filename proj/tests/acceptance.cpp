// Acceptance suite: one PASS/FAIL line per criterion, with the measured quantities.

#include "monoeq/conditions.hpp"
#include "monoeq/scenarios.hpp"
#include "monoeq/solver.hpp"
#include "monoeq/verification.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <functional>
#include <limits>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace monoeq;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(int id, const std::string& title, double time_limit_s, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << " [exception: " << e.what() << "]";
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (time_limit_s > 0 && dt > time_limit_s) {
        o.pass = false;
        o.detail << " [runtime " << dt << " s exceeds " << time_limit_s << " s]";
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d: %s (%.2f s)%s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), dt, o.detail.str().c_str());
    std::fflush(stdout);
}

StepStrategy step(std::vector<double> cuts, std::vector<int> actions) { return StepStrategy{cuts, actions}; }

double max_gap(const BneReport& r) { return *std::max_element(r.gaps.begin(), r.gaps.end()); }

std::vector<int> powers_of_two(int from, int to) {
    std::vector<int> out;
    for (int m = from; m <= to; m *= 2) out.push_back(m);
    return out;
}

// Mass of `action` under a behavioral strategy integrated over [a, b] (uniform types).
double integrated_weight(const BehavioralStrategy& s, int action, double a, double b) {
    double total = 0.0;
    for (std::size_t k = 0; k < s.cells.size(); ++k) {
        const double lo = std::max(a, s.cuts[k]), hi = std::min(b, s.cuts[k + 1]);
        if (hi > lo) total += (hi - lo) * s.cells[k].weight_of(action);
    }
    return total;
}
double integrated_moment(const BehavioralStrategy& s, int action, double a, double b) {
    double total = 0.0;
    for (std::size_t k = 0; k < s.cells.size(); ++k) {
        const double lo = std::max(a, s.cuts[k]), hi = std::min(b, s.cuts[k + 1]);
        if (hi > lo) total += 0.5 * (hi * hi - lo * lo) * s.cells[k].weight_of(action);
    }
    return total;
}

// ---------------------------------------------------------------------------

void criterion1() {
    criterion(1, "interim payoff differences of the single-crossing game", 10.0, [](Outcome& o) {
        const BayesGame g = single_crossing_game();
        IntegrationOptions exact;
        exact.method = IntegrationOptions::Method::Exact;
        double err = 0.0;
        for (int a = 0; a < 20; ++a)
            for (int b = 0; b < 20; ++b) {
                const double x = (a + 0.5) / 20.0, t = (b + 0.5) / 20.0;
                const BehavioralProfile opp{BehavioralStrategy::from_step(step({0.0, x, 1.0}, {0, 1})),
                                            BehavioralStrategy::from_step(step({0.0, x, 1.0}, {0, 1}))};
                std::string m1, m2;
                const auto v1 = interim_payoffs(g, 0, t, opp, exact, &m1);
                const auto v2 = interim_payoffs(g, 1, t, opp, exact, &m2);
                o.require(m1 == "exact" && m2 == "exact", "exact integration path used");
                err = std::max(err, std::fabs(v1[1] - v1[0] - (7.0 / 4.0 - 2.0 * x) * (1.0 + x / 6.0 - 2.0 * t / 3.0)));
                err = std::max(err, std::fabs(v2[1] - v2[0] - (10.0 * x - 8.0)));
            }
        o.detail << " max closed-form error " << err;
        o.require(err <= 1e-8, "closed forms within 1e-8");
        double worst_z = 0.0;
        std::uint64_t seed = 17;
        for (double x : {0.25, 0.6, 0.9})
            for (double t : {0.1, 0.7})
                for (int a = 0; a < 2; ++a) {
                    const BehavioralProfile opp{BehavioralStrategy::from_step(step({0.0, 1.0}, {0})),
                                                BehavioralStrategy::from_step(step({0.0, x, 1.0}, {0, 1}))};
                    const double v = interim_payoff(g, 0, a, t, opp, exact).value;
                    const McEstimate mc = mc_interim_oracle(g, 0, a, t, opp, 100000, seed++);
                    worst_z = std::max(worst_z, std::fabs(mc.mean - v) / mc.stderr_);
                }
        o.detail << "; worst Monte Carlo z-score " << worst_z;
        o.require(worst_z <= 4.0, "Monte Carlo within 4 sigma");
    });
}

void criterion2() {
    criterion(2, "monotone equilibrium of the single-crossing game and uniqueness scan", 60.0, [](Outcome& o) {
        const BayesGame g = single_crossing_game();
        SolveSettings st;
        st.grid_log2 = 12;
        const EquilibriumResult eq = find_monotone_equilibrium(g, st);
        const auto b1 = eq.profile[0].merged().breakpoints(), b2 = eq.profile[1].merged().breakpoints();
        o.require(eq.converged, "solver converged");
        o.require(b1.size() == 1 && b2.size() == 1, "one cutoff per player");
        if (b1.size() == 1 && b2.size() == 1) {
            o.detail << " cutoffs (" << b1[0] << ", " << b2[0] << ")";
            o.require(std::fabs(b1[0] - 0.8) <= 1e-4 && std::fabs(b2[0] - 0.875) <= 1e-4, "cutoffs within 1e-4 of (4/5, 7/8)");
        }
        const UniquenessVerdict u = uniqueness_scan(g, 64, 1e-9, 257);
        o.detail << "; scan: " << u.minimal_components << " residual-minimal component(s), min residual " << u.min_residual;
        o.require(u.minimal_components == 1, "exactly one residual-minimal cell");
        if (!u.minimal.empty())
            o.require(std::fabs(u.minimal.front()[0] - 0.8) < 0.05 && std::fabs(u.minimal.front()[1] - 0.875) < 0.05,
                      "minimal cell at the equilibrium");
    });
}

void criterion3() {
    criterion(3, "perfect equilibrium of the single-crossing game", 0.0, [](Outcome& o) {
        const BayesGame g = single_crossing_game();
        const double r = (-173.0 + std::sqrt(34889.0)) / 80.0;
        const double quad = -31.0 / 120.0 + 173.0 / 120.0 * r + r * r / 3.0;
        o.detail << " quadratic residual " << quad;
        o.require(std::fabs(quad) <= 1e-12, "cutoff solves the quadratic within 1e-12");
        o.require(std::fabs(single_crossing_perfect_cutoff() - r) <= 1e-15, "library cutoff equals the closed form");
        const Profile gstar{step({0.0, 0.2, 1.0}, {1, 0}), step({0.0, r, 1.0}, {1, 0})};
        const double gap = max_gap(check_bne(g, gstar, 1e-8));
        o.detail << "; BNE gap " << gap;
        o.require(gap <= 1e-8, "BNE gap <= 1e-8");
        IntegrationOptions exact;
        exact.method = IntegrationOptions::Method::Exact;
        double cf = 0.0;
        const BehavioralProfile gb = to_behavioral(gstar);
        for (int k = 0; k <= 100; ++k) {
            const double t = k / 100.0;
            const auto v = interim_payoffs(g, 0, t, gb, exact);
            cf = std::max(cf, std::fabs(v[1] - v[0] - 4.0 / 3.0 * (t - 0.2) * (0.125 - r)));
        }
        o.detail << "; closed-form difference error " << cf;
        o.require(cf <= 1e-10, "closed-form difference within 1e-10");
        std::vector<int> levels{5};
        for (int k : powers_of_two(8, 1024)) levels.push_back(k);
        const auto cert = check_perfection(g, gstar, make_sequence(levels, single_crossing_sequence_level));
        o.detail << "; perfection: " << cert.verdict;
        o.require(cert.certified, "certified with the sequence up to k = 1024");
    });
}

void criterion4() {
    criterion(4, "non-existence behaviour of the single-crossing game", 0.0, [](Outcome& o) {
        const BayesGame g = single_crossing_game();
        SolveSettings st;
        const PerfectResult pr = find_perfect_monotone_equilibrium(g, st, false);
        o.detail << " perfect search: " << pr.status;
        o.require(pr.status == "non-convergence", "perfect search reports non-convergence");
        const Profile s{step({0.0, 0.8, 1.0}, {0, 1}), step({0.0, 0.875, 1.0}, {0, 1})};
        const std::vector<int> levels = powers_of_two(2, 1024);
        const auto seq = canonical_sequence(g, s, levels);
        const auto cert = check_perfection(g, s, seq);
        o.require(!cert.certified, "canonical trembles do not certify the monotone equilibrium");
        bool every = cert.levels.size() == levels.size();
        for (const auto& l : cert.levels) every = every && l.witness_player >= 0;
        o.require(every, "a witness type at every level");
        // Sign analysis: with X = int_0^{7/8} P(2) - int_{7/8}^1 P(1) and Y the first moments, the gain
        // V1(2) - V1(1) equals (41/24 - 4/3 t1) X + 2/3 Y and, for X >= 0, falls in t1.
        double identity = 0.0;
        bool decreasing = true, all_nonneg = true;
        for (const auto& [m, prof] : seq) {
            const BehavioralStrategy& g2 = prof[1];
            const double X = integrated_weight(g2, 1, 0.0, 0.875) - integrated_weight(g2, 0, 0.875, 1.0);
            const double Y = integrated_moment(g2, 1, 0.0, 0.875) - integrated_moment(g2, 0, 0.875, 1.0);
            all_nonneg = all_nonneg && X >= 0.0;
            double prev = std::numeric_limits<double>::infinity();
            for (int k = 0; k <= 64; ++k) {
                const double t = k / 64.0;
                const auto v = interim_payoffs(g, 0, t, prof);
                const double d = v[1] - v[0];
                identity = std::max(identity, std::fabs(d - ((41.0 / 24.0 - 4.0 / 3.0 * t) * X + 2.0 / 3.0 * Y)));
                if (X >= 0.0 && d > prev + 1e-12) decreasing = false;
                prev = d;
            }
        }
        o.detail << "; decomposition error " << identity << "; witness of last level: player "
                 << cert.levels.back().witness_player << " at t = " << cert.levels.back().witness_type;
        o.require(identity <= 1e-10, "gain decomposition reproduced");
        o.require(all_nonneg && decreasing, "X >= 0 and the gain decreases in the own type");
    });
}

void criterion5() {
    criterion(5, "two-dimensional example", 0.0, [](Outcome& o) {
        const BayesGame g = two_dimensional_game();
        const auto reps = check_player_conditions(g, 0, cutoff_family(g, 0), uniform_grid(0.0, 1.0, 33),
                                                  {"idc", "quasi-supermodular", "supermodular"});
        bool idc = false, qsm = false, sm_fails = false;
        double witness = std::nan("");
        for (const auto& r : reps) {
            if (r.condition == "increasing-differences") idc = r.holds;
            if (r.condition == "quasi-supermodular") qsm = r.holds;
            if (r.condition == "supermodular") {
                sm_fails = !r.holds;
                if (r.witness && !r.witness->opponent_cutoffs.empty()) witness = r.witness->opponent_cutoffs[0];
            }
        }
        o.detail << " IDC " << (idc ? "holds" : "fails") << ", quasi-supermodular " << (qsm ? "holds" : "fails")
                 << ", supermodular " << (sm_fails ? "fails" : "holds") << " (opponent cutoff " << witness << ")";
        o.require(idc && qsm && sm_fails && witness > 0.875, "condition verdicts with witness above 7/8");
        SolveSettings st;
        const EquilibriumResult eq = find_monotone_equilibrium(g, st);
        const StepStrategy s1 = eq.profile[0].merged(), s2 = eq.profile[1].merged();
        const bool shape = s1.actions == std::vector<int>{0, 2, 3} && s2.actions == std::vector<int>{0, 1};
        o.require(eq.converged && shape, "profile shape (0,0) / (1,0) / (1,1) and 1 / 2");
        if (shape) {
            o.detail << "; cutoffs " << s1.cuts[1] << ", " << s1.cuts[2] << ", " << s2.cuts[1];
            o.require(std::fabs(s1.cuts[1] - 0.5) <= 1e-4 && std::fabs(s1.cuts[2] - 0.8) <= 1e-4 &&
                          std::fabs(s2.cuts[1] - 0.875) <= 1e-4,
                      "cutoffs within 1e-4");
        }
        const PerfectResult pr = find_perfect_monotone_equilibrium(g, st, false);
        o.detail << "; perfect search: " << pr.status;
        o.require(pr.status == "non-convergence", "perfect search reports non-convergence");
    });
}

void criterion6() {
    criterion(6, "first-price example with nine bids", 0.0, [](Outcome& o) {
        const BayesGame gq = first_price_example_game(true);
        const BayesGame g = first_price_example_game(false);
        o.require(gq.lattice(0).size() == 10 && gq.lattice(0).value(0) < 0.0, "grid {Q, 0, ..., 8}");
        const Profile refq = first_price_reference_profile(true), ref = first_price_reference_profile(false);
        const double gap_q = max_gap(check_bne(gq, refq, 1e-10)), gap = max_gap(check_bne(g, ref, 1e-10));
        o.detail << " BNE gaps " << gap_q << " (with Q), " << gap;
        o.require(gap_q <= 1e-10 && gap <= 1e-10, "reference profile BNE gap <= 1e-10");
        std::vector<int> levels{3};
        for (int m : powers_of_two(4, 1024)) levels.push_back(m);
        const auto cert =
            check_perfection(g, ref, make_sequence(levels, [&](int m) { return first_price_sequence_level(ref, m); }));
        o.detail << "; perfection: " << cert.verdict;
        o.require(cert.certified, "certified with the sequence");
        double terr = 0.0;
        bool brackets = true;
        for (int m : {10, 100, 1000}) {
            const double x2 = 8.0 - 5.0 / (16.0 * m - 8.0), x1 = 3.0 + 6.0 / (8.0 * m - 5.0);
            terr = std::max({terr, std::fabs(first_price_threshold_bidder2(m) - x2), std::fabs(first_price_threshold_bidder1(m) - x1)});
            // Independent sign check of the interim gains on either side of the thresholds.
            const BehavioralProfile seq = first_price_sequence_level(ref, m);
            auto gain2 = [&](double v) { const auto u = interim_payoffs(g, 1, v, seq); return u[4] - u[3]; };
            auto gain1 = [&](double v) { const auto u = interim_payoffs(g, 0, v, seq); return u[3] - u[1]; };
            brackets = brackets && gain2(x2 - 1e-7) < 0.0 && gain2(x2 + 1e-7) > 0.0;
            brackets = brackets && gain1(x1 - 1e-7) < 0.0 && gain1(x1 + 1e-7) > 0.0;
        }
        o.detail << "; threshold error " << terr;
        o.require(terr <= 1e-8, "thresholds within 1e-8");
        o.require(brackets, "interim gains change sign at the thresholds");
        const Profile intro = first_price_intro_profile(false);
        const double igap = max_gap(check_bne(g, intro, 1e-10));
        const auto icert = check_perfection(g, intro, canonical_sequence(g, intro, powers_of_two(2, 1024)));
        const int bid5 = 5;
        const DominanceVerdict dv = dominance_audit(g, 0, bid5, 2.5);
        bool weakly_by_zero = true, strict = false;
        for (std::size_t b = 0; b < g.lattice(1).size(); ++b) {
            const BehavioralProfile opp{BehavioralStrategy::from_step(intro[0]),
                                        BehavioralStrategy::from_step(StepStrategy::constant(7.0, 8.0, static_cast<int>(b)))};
            const auto v = interim_payoffs(g, 0, 2.5, opp);
            weakly_by_zero = weakly_by_zero && v[0] >= v[bid5] - 1e-12;
            strict = strict || v[0] > v[bid5] + 1e-12;
        }
        o.detail << "; intro profile: gap " << igap << ", " << icert.verdict << ", bid 5 " << to_string(dv.kind);
        o.require(igap <= 1e-10, "intro profile passes the BNE check");
        o.require(!icert.certified, "intro profile fails the perfection check");
        o.require(dv.kind == DominanceKind::WeaklyDominated && weakly_by_zero && strict, "bid 5 weakly dominated by bid 0");
    });
}

void criterion7() {
    criterion(7, "second-price example", 0.0, [](Outcome& o) {
        const BayesGame g = second_price_example_game();
        const Profile ref = second_price_reference_profile();
        std::vector<int> levels;
        for (int m = 3; m <= 64; ++m) levels.push_back(m);
        for (int m : powers_of_two(128, 1024)) levels.push_back(m);
        const auto cert =
            check_perfection(g, ref, make_sequence(levels, [&](int m) { return second_price_sequence_level(ref, m); }));
        o.detail << " perfection over " << levels.size() << " levels: " << cert.verdict;
        o.require(cert.certified, "certified for every tested m >= 3");
        double err = 0.0;
        const BehavioralProfile rb = to_behavioral(ref);
        for (int k = 0; k <= 100; ++k) {
            const double v = 1.0 + k / 100.0;
            for (int i = 0; i < 2; ++i) {
                const auto u = interim_payoffs(g, i, v, rb);
                err = std::max({err, std::fabs(u[0]), std::fabs(u[1] - (v - 1.0) / 4.0),
                                std::fabs(u[2] - ((v - 1.0) / 2.0 + (v - 2.0) / 4.0))});
            }
        }
        o.detail << "; closed-form error " << err;
        o.require(err <= 1e-10, "closed-form interim payoffs within 1e-10");
        const Profile triv = second_price_trivial_profile();
        const double tgap = max_gap(check_bne(g, triv, 1e-10));
        bool dominated = true;
        for (double v : {1.1, 1.5, 1.9}) dominated = dominated && dominance_audit(g, 0, 0, v).kind == DominanceKind::WeaklyDominated;
        o.detail << "; trivial profile gap " << tgap;
        o.require(tgap <= 1e-10, "trivial profile passes the BNE check");
        o.require(dominated, "bid 0 weakly dominated");
        o.require(!check_admissibility(g, triv).admissible, "trivial profile inadmissible");
    });
}

void criterion8() {
    criterion(8, "supermodular coordination game", 0.0, [](Outcome& o) {
        const BayesGame g = coordination_game();
        SolveSettings st;
        const EquilibriumResult low = find_monotone_equilibrium(g, st, InitKind::ExtremalLow);
        const EquilibriumResult high = find_monotone_equilibrium(g, st, InitKind::ExtremalHigh);
        o.require(low.converged && high.converged, "both extremal iterations converge");
        o.require(low.profile[0].merged().actions == std::vector<int>{0} && low.profile[1].merged().actions == std::vector<int>{0},
                  "low start reaches all-0");
        o.require(high.profile[0].merged().actions == std::vector<int>{1} && high.profile[1].merged().actions == std::vector<int>{1},
                  "high start reaches all-1");
        const Profile zero = coordination_profile(0);
        std::vector<int> levels;
        for (int m = 3; m <= 1024; ++m) levels.push_back(m);
        const auto cert =
            check_perfection(g, zero, make_sequence(levels, [&](int m) { return coordination_sequence_level(zero, m); }));
        o.detail << " all-0 over m = 3..1024: " << cert.verdict;
        o.require(cert.certified, "all-0 certified");
        const AdmissibilityReport adm = check_admissibility(g, coordination_profile(1));
        o.detail << "; all-1 " << (adm.admissible ? "admissible" : "inadmissible");
        o.require(!adm.admissible, "all-1 inadmissible");
    });
}

void criterion9() {
    criterion(9, "generalized first-price auction double limit", 600.0, [](Outcome& o) {
        const GeneralizedAuction a = uniform_first_price_auction(2);
        SolveSettings st;
        const AuctionSolveResult res = solve_generalized_auction(a, st);
        o.detail << " status " << res.status << "; final level residual " << res.residual;
        const AuctionLevel& last = res.levels.back();
        o.require(last.converged && last.m == st.m_schedule.back() && last.grid_log2 == st.bid_grid_log2.back(),
                  "finest level (step 2^-8, m = 1024) converged");
        // Quitting and bidding zero both never win; the quit action counts as bid 0 in the distance.
        double sup = 0.0;
        for (int k = 0; k < 512; ++k) {
            const double v = (k + 0.5) / 512.0;
            for (const auto& b : res.bids) sup = std::max(sup, std::fabs(std::max(0.0, b.bid_at(v)) - v / 2.0));
        }
        o.detail << "; sup distance to v/2 " << sup;
        o.require(sup <= 0.02, "bid function within 0.02 of v/2");
        std::vector<double> ties, pooling;
        for (const auto& l : res.levels)
            if (l.m == st.m_schedule.back()) {
                ties.push_back(l.tie_probability);
                pooling.push_back(l.pooling_mass);
            }
        bool decreasing = !ties.empty();
        for (std::size_t k = 1; k < ties.size(); ++k) decreasing = decreasing && ties[k] <= ties[k - 1] + 1e-12;
        o.detail << "; tie probability along the grid schedule:";
        for (double t : ties) o.detail << " " << t;
        o.detail << "; pooling mass:";
        for (double p : pooling) o.detail << " " << p;
        bool pooling_decreasing = !pooling.empty();
        for (std::size_t k = 1; k < pooling.size(); ++k) pooling_decreasing = pooling_decreasing && pooling[k] < pooling[k - 1];
        o.require(decreasing, "tie probability nonincreasing along the grid schedule");
        o.require(pooling_decreasing, "same-bin pooling mass strictly decreasing along the grid schedule");
        o.require(!ties.empty() && ties.back() < 1e-3, "final tie probability below 1e-3");
    });
}

void criterion10() {
    criterion(10, "metric and implication property suites", 0.0, [](Outcome& o) {
        std::mt19937_64 rng(10);
        double worst = 0.0, axiom = 0.0;
        for (int rep = 0; rep < 1000; ++rep) {
            const int dim = 1 + rep % 2;
            const auto a = oracle::random_measure(rng, 5, dim, 6), b = oracle::random_measure(rng, 5, dim, 6),
                       c = oracle::random_measure(rng, 5, dim, 6);
            auto M = [](const oracle::FiniteMeasure& m) {
                Measure out;
                for (std::size_t k = 0; k < m.points.size(); ++k) out.atoms.push_back(Measure::Atom{m.points[k], m.mass[k]});
                return out;
            };
            const double ab = prohorov_distance(M(a), M(b));
            worst = std::max(worst, std::fabs(ab - oracle::prohorov_brute_force(a, b)));
            const double ba = prohorov_distance(M(b), M(a)), ac = prohorov_distance(M(a), M(c)),
                         cb = prohorov_distance(M(c), M(b)), aa = prohorov_distance(M(a), M(a));
            axiom = std::max({axiom, std::fabs(ab - ba), aa, std::max(0.0, ab - ac - cb), std::max(0.0, -ab), std::max(0.0, ab - 1.0)});
        }
        o.detail << " Prohorov: max deviation from brute force " << worst << ", max axiom violation " << axiom;
        o.require(worst <= 1e-12 && axiom <= 1e-12, "Prohorov agreement and axioms");

        // Certified profiles are epsilon-equilibria and admissible.
        struct Case {
            std::string name;
            BayesGame game;
            Profile profile;
            std::vector<SequenceLevel> seq;
        };
        std::vector<Case> cases;
        {
            const Profile p = single_crossing_perfect_profile();
            std::vector<int> lv{5};
            for (int k : powers_of_two(8, 1024)) lv.push_back(k);
            cases.push_back({"single-crossing perfect", single_crossing_game(), p, make_sequence(lv, single_crossing_sequence_level)});
        }
        {
            const Profile p = first_price_reference_profile(false);
            cases.push_back({"first-price reference", first_price_example_game(false), p,
                             make_sequence(powers_of_two(4, 1024), [p](int m) { return first_price_sequence_level(p, m); })});
        }
        {
            const Profile p = second_price_reference_profile();
            cases.push_back({"second-price reference", second_price_example_game(), p,
                             make_sequence(powers_of_two(4, 1024), [p](int m) { return second_price_sequence_level(p, m); })});
        }
        {
            const Profile p = coordination_profile(0);
            const BayesGame g = coordination_game();
            cases.push_back({"coordination all-0 (canonical)", g, p, canonical_sequence(g, p, powers_of_two(4, 1024))});
        }
        int certified = 0;
        bool lemma = true;
        for (const auto& c : cases) {
            const auto cert = check_perfection(c.game, c.profile, c.seq);
            if (!cert.certified) continue;
            ++certified;
            const bool bne = check_bne(c.game, c.profile, 1e-8).is_eps_bne;
            const bool adm = check_admissibility(c.game, c.profile).admissible;
            if (!bne || !adm) {
                lemma = false;
                o.detail << " [" << c.name << ": bne " << bne << ", admissible " << adm << "]";
            }
        }
        o.detail << "; certified profiles " << certified << "/" << cases.size();
        o.require(certified == static_cast<int>(cases.size()), "every suite profile certified");
        o.require(lemma, "certified profiles are epsilon-equilibria and admissible");

        // Implications on random functions: supermodular => quasi-supermodular, IDC => SCC.
        const FiniteLattice sq = FiniteLattice::product({{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}, {2, 0}, {2, 1}, {2, 2}});
        const FiniteLattice chain = FiniteLattice::chain({0.0, 1.0, 2.0});
        const std::vector<double> types = uniform_grid(0.0, 1.0, 6);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        int sm_true = 0, idc_true = 0;
        bool sm_impl = true, idc_impl = true;
        for (int rep = 0; rep < 1000; ++rep) {
            std::vector<double> h(9);
            if (rep % 2 == 0) {
                // Supermodular by construction: separable part plus a product of increasing maps.
                const double f0 = u(rng), f1 = u(rng), f2 = u(rng), g0 = u(rng), g1 = u(rng), g2 = u(rng);
                const double p1 = std::fabs(u(rng)), p2 = p1 + std::fabs(u(rng)), q1 = std::fabs(u(rng)), q2 = q1 + std::fabs(u(rng));
                const double fa[3] = {f0, f1, f2}, ga[3] = {g0, g1, g2}, pa[3] = {0.0, p1, p2}, qa[3] = {0.0, q1, q2};
                for (int x = 0; x < 3; ++x)
                    for (int y = 0; y < 3; ++y) h[static_cast<std::size_t>(3 * x + y)] = fa[x] + ga[y] + pa[x] * qa[y];
            } else {
                for (double& v : h) v = u(rng);
            }
            const auto hf = [&](int k) { return h[static_cast<std::size_t>(k)]; };
            const bool sm = check_supermodular(hf, sq).holds;
            sm_true += sm;
            if (sm && !check_quasi_supermodular(hf, sq).holds) sm_impl = false;

            std::vector<std::vector<double>> tab(3, std::vector<double>(types.size()));
            if (rep % 2 == 0) {
                const double base[3] = {u(rng), u(rng), u(rng)};
                const double phi1 = std::fabs(u(rng)), phi2 = phi1 + std::fabs(u(rng));
                const double phi[3] = {0.0, phi1, phi2};
                const double shift = u(rng), slope = std::fabs(u(rng)) + 0.1;
                for (int a = 0; a < 3; ++a)
                    for (std::size_t t = 0; t < types.size(); ++t) tab[a][t] = base[a] + phi[a] * (slope * types[t] + shift);
            } else {
                for (auto& row : tab)
                    for (double& v : row) v = u(rng);
            }
            const auto at = [&](int a, double t) {
                for (std::size_t k = 0; k < types.size(); ++k)
                    if (std::fabs(types[k] - t) < 1e-12) return tab[static_cast<std::size_t>(a)][k];
                return std::nan("");
            };
            const bool idc = check_increasing_differences(at, chain, types).holds;
            idc_true += idc;
            if (idc && !check_single_crossing(at, chain, types).holds) idc_impl = false;
        }
        o.detail << "; supermodular cases " << sm_true << "/1000, IDC cases " << idc_true << "/1000";
        o.require(sm_impl, "supermodular implies quasi-supermodular");
        o.require(idc_impl, "increasing differences implies single crossing");
        o.require(sm_true >= 400 && idc_true >= 400, "implication antecedent exercised");
    });
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> only;
    for (int k = 1; k < argc; ++k) only.push_back(std::atoi(argv[k]));
    const std::vector<std::function<void()>> all{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                 criterion6, criterion7, criterion8, criterion9, criterion10};
    for (std::size_t k = 0; k < all.size(); ++k)
        if (only.empty() || std::find(only.begin(), only.end(), static_cast<int>(k + 1)) != only.end()) all[k]();
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
