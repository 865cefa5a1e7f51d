#include "monoeq/scenarios.hpp"

#include "monoeq/conditions.hpp"
#include "monoeq/perturbation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

namespace monoeq {

// ---------------------------------------------------------------------------
// Polynomial payoff tables

namespace {

double eval_terms(const std::vector<PolyTerm>& terms, const std::vector<double>& t) {
    double s = 0.0;
    for (const auto& term : terms) {
        double v = term.coef;
        for (std::size_t k = 0; k < term.powers.size(); ++k)
            for (int p = 0; p < term.powers[k]; ++p) v *= t[k];
        s += v;
    }
    return s;
}

}  // namespace

BayesGame build_polynomial_table_game(const std::string& name, const std::vector<TypeSpace>& boxes,
                                      const std::vector<FiniteLattice>& lattices,
                                      const std::vector<PayoffEntry>& entries) {
    const int n = static_cast<int>(boxes.size());
    if (n < 1 || lattices.size() != boxes.size()) throw ModelError("one lattice per type box is required");
    using Key = std::pair<int, std::vector<int>>;
    auto table = std::make_shared<std::map<Key, std::vector<PayoffPiece>>>();
    int degree = 0;
    double bound = 0.0;
    std::vector<std::vector<double>> kinks(n);
    for (const auto& e : entries) {
        if (e.player < 0 || e.player >= n) throw ModelError("payoff entry names an unknown player");
        if (static_cast<int>(e.actions.size()) != n) throw ModelError("payoff entry needs one action per player");
        for (int i = 0; i < n; ++i)
            if (e.actions[i] < 0 || e.actions[i] >= static_cast<int>(lattices[i].size()))
                throw ModelError("payoff entry action index out of range");
        if (e.pieces.empty()) throw ModelError("payoff entry without pieces");
        for (std::size_t k = 0; k + 1 < e.pieces.size(); ++k)
            if (!(e.pieces[k].upto < e.pieces[k + 1].upto)) throw ModelError("payoff pieces must have increasing bounds");
        double piece_bound = 0.0;
        for (const auto& piece : e.pieces) {
            const double u = piece.upto;
            if (std::isfinite(u) && u > boxes[e.player].lo && u < boxes[e.player].hi) kinks[e.player].push_back(u);
            double b = 0.0;
            for (const auto& term : piece.terms) {
                if (term.powers.size() > static_cast<std::size_t>(n)) throw ModelError("term has too many powers");
                double v = std::fabs(term.coef);
                for (std::size_t k = 0; k < term.powers.size(); ++k) {
                    if (term.powers[k] < 0) throw ModelError("negative power in payoff term");
                    if (static_cast<int>(k) != e.player) degree = std::max(degree, term.powers[k]);
                    v *= std::pow(std::max(std::fabs(boxes[k].lo), std::fabs(boxes[k].hi)), term.powers[k]);
                }
                b += v;
            }
            piece_bound = std::max(piece_bound, b);
        }
        bound = std::max(bound, piece_bound);
        if (!table->emplace(Key{e.player, e.actions}, e.pieces).second)
            throw ModelError("duplicate payoff entry");
    }
    for (auto& k : kinks) {
        std::sort(k.begin(), k.end());
        k.erase(std::unique(k.begin(), k.end()), k.end());
    }
    BayesGame g;
    g.name = name;
    g.n = n;
    g.types = boxes;
    g.density = JointDensity::independent_uniform(boxes);
    for (const auto& L : lattices) g.actions.push_back(ActionSpace::finite(L));
    g.payoff = [table](int i, const std::vector<int>& a, const std::vector<double>& t) {
        const auto it = table->find(Key{i, a});
        if (it == table->end()) return 0.0;
        for (const auto& piece : it->second)
            if (t[static_cast<std::size_t>(i)] <= piece.upto) return eval_terms(piece.terms, t);
        return eval_terms(it->second.back().terms, t);
    };
    g.bound = std::max(bound, 1e-12);
    g.opponent_degree = degree;
    g.kinks = kinks;
    g.validate();
    return g;
}

// ---------------------------------------------------------------------------
// Named games

namespace {

PayoffEntry entry(std::vector<int> actions, int player, std::vector<PolyTerm> terms) {
    return PayoffEntry{std::move(actions), player, {PayoffPiece{std::numeric_limits<double>::infinity(), std::move(terms)}}};
}

PayoffEntry entry_split(std::vector<int> actions, int player, double at, std::vector<PolyTerm> below,
                        std::vector<PolyTerm> above) {
    return PayoffEntry{std::move(actions), player,
                       {PayoffPiece{at, std::move(below)},
                        PayoffPiece{std::numeric_limits<double>::infinity(), std::move(above)}}};
}

PolyTerm c(double v) { return PolyTerm{v, {0, 0}}; }
PolyTerm t1(double v) { return PolyTerm{v, {1, 0}}; }
PolyTerm t2(double v) { return PolyTerm{v, {0, 1}}; }

StepStrategy step(std::vector<double> cuts, std::vector<int> actions) {
    StepStrategy s{std::move(cuts), std::move(actions)};
    s.validate();
    return s;
}

BehavioralStrategy behavioral(std::vector<double> cuts, std::vector<MixedAction> cells) {
    return BehavioralStrategy{std::move(cuts), std::move(cells)};
}

// Index of a bid value in a chain lattice.
int bid_index(const BayesGame& g, int i, double bid) {
    const auto idx = g.lattice(i).index_of_real({bid});
    if (!idx) throw ModelError("bid not on the grid");
    return static_cast<int>(*idx);
}

}  // namespace

BayesGame single_crossing_game() {
    const FiniteLattice L = FiniteLattice::chain({1.0, 2.0});
    std::vector<PayoffEntry> e;
    // Player 1 (first index: own action).
    e.push_back(entry({0, 0}, 0, {c(5.0 / 2.0), t1(-4.0 / 3.0)}));
    e.push_back(entry({0, 1}, 0, {c(1.0 / 2.0), t2(1.0 / 2.0)}));
    e.push_back(entry({1, 0}, 0, {c(55.0 / 24.0), t2(-1.0 / 6.0), t1(-7.0 / 6.0)}));
    e.push_back(entry({1, 1}, 0, {c(2.0), t2(1.0), t1(-7.0 / 6.0)}));
    // Player 2: type-free.
    e.push_back(entry({0, 0}, 1, {c(-1.0)}));
    e.push_back(entry({0, 1}, 1, {c(1.0)}));
    e.push_back(entry({1, 0}, 1, {c(7.0)}));
    e.push_back(entry({1, 1}, 1, {c(-1.0)}));
    return build_polynomial_table_game("single-crossing", {{0.0, 1.0}, {0.0, 1.0}}, {L, L}, e);
}

Profile single_crossing_monotone_profile() {
    return {step({0.0, 0.8, 1.0}, {0, 1}), step({0.0, 0.875, 1.0}, {0, 1})};
}

double single_crossing_perfect_cutoff() { return (-173.0 + std::sqrt(34889.0)) / 80.0; }

Profile single_crossing_perfect_profile() {
    const double r = single_crossing_perfect_cutoff();
    return {step({0.0, 0.2, 1.0}, {1, 0}), step({0.0, r, 1.0}, {1, 0})};
}

BehavioralProfile single_crossing_sequence_level(int k) {
    if (k < 5) throw ModelError("the sequence is defined for k >= 5");
    const double q = 1.0 / k;
    const double r = single_crossing_perfect_cutoff();
    BehavioralStrategy g1 = behavioral({0.0, 0.2, 1.0}, {MixedAction{{{0, 4.0 * q}, {1, 1.0 - 4.0 * q}}},
                                                         MixedAction{{{0, 1.0 - q}, {1, q}}}});
    BehavioralStrategy g2 =
        behavioral({0.0, r, 1.0}, {MixedAction{{{0, q}, {1, 1.0 - q}}}, MixedAction{{{0, 1.0 - q}, {1, q}}}});
    return {g1, g2};
}

double single_crossing_diff1(double x2, double t1v) {
    return (7.0 / 4.0 - 2.0 * x2) * (1.0 + x2 / 6.0 - 2.0 * t1v / 3.0);
}

double single_crossing_diff2(double x1) { return 10.0 * x1 - 8.0; }

BayesGame two_dimensional_game() {
    const FiniteLattice L1 = FiniteLattice::product({PosetElement{0, 0}, PosetElement{0, 1}, PosetElement{1, 0},
                                                     PosetElement{1, 1}});
    const FiniteLattice L2 = FiniteLattice::chain({1.0, 2.0});
    std::vector<PayoffEntry> e;
    e.push_back(entry({0, 0}, 0, {c(2.0)}));
    e.push_back(entry({0, 1}, 0, {t2(-0.5)}));
    e.push_back(entry({1, 0}, 0, {c(41.0 / 24.0), t2(1.0 / 6.0)}));
    e.push_back(entry({1, 1}, 0, {c(2.0), t2(-1.0)}));
    e.push_back(entry_split({2, 0}, 0, 0.5, {c(-7.0)}, {c(7.0)}));
    e.push_back(entry_split({2, 1}, 0, 0.5, {c(-7.0)}, {c(7.0)}));
    e.push_back(entry_split({3, 0}, 0, 0.5, {c(-29.0 / 4.0)}, {c(27.0 / 4.0)}));
    e.push_back(entry_split({3, 1}, 0, 0.5, {c(-21.0 / 4.0)}, {c(35.0 / 4.0)}));
    for (int a1 = 0; a1 < 3; ++a1) {
        e.push_back(entry({a1, 0}, 1, {c(-1.0)}));
        e.push_back(entry({a1, 1}, 1, {c(1.0)}));
    }
    e.push_back(entry({3, 0}, 1, {c(7.0)}));
    e.push_back(entry({3, 1}, 1, {c(-1.0)}));
    return build_polynomial_table_game("two-dimensional", {{0.0, 1.0}, {0.0, 1.0}}, {L1, L2}, e);
}

Profile two_dimensional_profile() {
    return {step({0.0, 0.5, 0.8, 1.0}, {0, 2, 3}), step({0.0, 0.875, 1.0}, {0, 1})};
}

BayesGame first_price_example_game(bool with_quit) {
    std::vector<double> grid;
    if (with_quit) grid.push_back(-1.0);
    for (int b = 0; b <= 8; ++b) grid.push_back(b);
    GeneralizedAuction a = build_first_price(2, JointDensity::independent_uniform({{0.0, 1.0}, {0.0, 1.0}}),
                                             {{0.0, 5.0}, {7.0, 8.0}}, {8.0, 8.0}, -1.0);
    a.name = with_quit ? "first-price-example-with-quit" : "first-price-example";
    BayesGame g = to_bayes_game(a, {grid, grid});
    g.name = a.name;
    return g;
}

Profile first_price_reference_profile(bool with_quit) {
    const BayesGame g = first_price_example_game(with_quit);
    return {step({0.0, 1.5, 3.0, 5.0}, {bid_index(g, 0, 0), bid_index(g, 0, 1), bid_index(g, 0, 3)}),
            StepStrategy::constant(7.0, 8.0, bid_index(g, 1, 3))};
}

Profile first_price_intro_profile(bool with_quit) {
    const BayesGame g = first_price_example_game(with_quit);
    return {StepStrategy::constant(0.0, 5.0, bid_index(g, 0, 5)), StepStrategy::constant(7.0, 8.0, bid_index(g, 1, 6))};
}

namespace {

// (1 - 1/m) on the played action; `rest` spread evenly over the other listed actions.
MixedAction tremble(int played, const std::vector<int>& support, double rest_each, double m) {
    MixedAction mix;
    for (int a : support) mix.atoms.emplace_back(a, a == played ? 1.0 - 1.0 / m : rest_each);
    return mix;
}

BehavioralProfile tremble_profile(const Profile& profile, const std::vector<std::vector<int>>& supports,
                                  const std::function<double(int m)>& rest_each, int m) {
    BehavioralProfile out;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        BehavioralStrategy b;
        b.cuts = profile[i].cuts;
        for (int a : profile[i].actions) {
            if (std::find(supports[i].begin(), supports[i].end(), a) == supports[i].end())
                throw ModelError("played action outside the tremble support");
            b.cells.push_back(tremble(a, supports[i], rest_each(m), m));
        }
        out.push_back(std::move(b));
    }
    return out;
}

std::vector<int> non_quit_indices(const BayesGame& g, int i) {
    std::vector<int> out;
    for (std::size_t k = 0; k < g.lattice(i).size(); ++k)
        if (g.lattice(i).value(k) >= 0.0) out.push_back(static_cast<int>(k));
    return out;
}

}  // namespace

BehavioralProfile first_price_sequence_level(const Profile& profile, int m) {
    if (m < 1) throw ModelError("level must be positive");
    // Action indices refer to the grid {0,...,8} without a quit bid.
    const BayesGame g = first_price_example_game(false);
    std::vector<std::vector<int>> supports{non_quit_indices(g, 0), non_quit_indices(g, 1)};
    return tremble_profile(profile, supports, [](int mm) { return 1.0 / (8.0 * mm); }, m);
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0) == (fhi < 0)) return std::numeric_limits<double>::quiet_NaN();
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (mid == lo && mid == hi) break;
    }
    return 0.5 * (lo + hi);
}

double first_price_threshold_bidder2(int m) {
    const BayesGame g = first_price_example_game(false);
    const BehavioralProfile seq = first_price_sequence_level(first_price_reference_profile(false), m);
    return bisect_root(
        [&](double v) {
            const auto vals = interim_payoffs(g, 1, v, seq);
            return vals[4] - vals[3];
        },
        7.0, 8.0);
}

double first_price_threshold_bidder1(int m) {
    const BayesGame g = first_price_example_game(false);
    const BehavioralProfile seq = first_price_sequence_level(first_price_reference_profile(false), m);
    return bisect_root(
        [&](double v) {
            const auto vals = interim_payoffs(g, 0, v, seq);
            return vals[3] - vals[1];
        },
        3.0, 5.0);
}

BayesGame second_price_example_game() {
    BayesGame g = build_second_price_game({0.0, 1.0, 2.0}, {{1.0, 2.0}, {1.0, 2.0}});
    g.name = "second-price-example";
    return g;
}

Profile second_price_reference_profile() {
    const StepStrategy s = step({1.0, 1.5, 2.0}, {1, 2});
    return {s, s};
}

Profile second_price_trivial_profile() {
    return {StepStrategy::constant(1.0, 2.0, 0), StepStrategy::constant(1.0, 2.0, 2)};
}

BehavioralProfile second_price_sequence_level(const Profile& profile, int m) {
    if (m < 3) throw ModelError("the sequence is defined for m >= 3");
    return tremble_profile(profile, {{0, 1, 2}, {0, 1, 2}}, [](int mm) { return 1.0 / mm; }, m);
}

BayesGame coordination_game() {
    const FiniteLattice L = FiniteLattice::chain({0.0, 1.0});
    std::vector<PayoffEntry> e{entry({0, 0}, 0, {c(1.0)}), entry({0, 0}, 1, {c(1.0)})};
    return build_polynomial_table_game("coordination", {{0.0, 1.0}, {0.0, 1.0}}, {L, L}, e);
}

Profile coordination_profile(int action) {
    return {StepStrategy::constant(0.0, 1.0, action), StepStrategy::constant(0.0, 1.0, action)};
}

BehavioralProfile coordination_sequence_level(const Profile& profile, int m) {
    if (m < 2) throw ModelError("the sequence is defined for m >= 2");
    return tremble_profile(profile, {{0, 1}, {0, 1}}, [](int mm) { return 1.0 / mm; }, m);
}

GeneralizedAuction uniform_first_price_auction(int n) {
    std::vector<TypeSpace> boxes(static_cast<std::size_t>(n), TypeSpace{0.0, 1.0});
    GeneralizedAuction a = build_first_price(n, JointDensity::independent_uniform(boxes), {}, {}, -1.0);
    a.name = "uniform-first-price";
    return a;
}

std::vector<SequenceLevel> make_sequence(const std::vector<int>& levels,
                                         const std::function<BehavioralProfile(int)>& level_profile) {
    std::vector<SequenceLevel> out;
    for (int m : levels) out.emplace_back(m, level_profile(m));
    return out;
}

// ---------------------------------------------------------------------------
// Golden checks

namespace {

struct CheckList {
    std::string scenario;
    const ScenarioOptions* opts;
    std::vector<GoldenCheck> out;

    void add(const std::string& name, double value, double pinned, double tol, const std::string& detail = "") {
        GoldenCheck g;
        g.scenario = scenario;
        g.name = name;
        g.value = value;
        const auto it = opts->pinned_overrides.find(scenario + "/" + name);
        g.pinned = it != opts->pinned_overrides.end() ? it->second : pinned;
        g.tol = tol;
        g.passed = std::isfinite(value) && std::fabs(value - g.pinned) <= tol;
        g.detail = detail;
        out.push_back(std::move(g));
    }
    void flag(const std::string& name, bool value, const std::string& detail = "") {
        add(name, value ? 1.0 : 0.0, 1.0, 0.0, detail);
    }
};

std::vector<int> levels_up_to(int first, int m_max) {
    std::vector<int> out;
    for (int m = first; m <= m_max; m *= 2) out.push_back(m);
    return out;
}

double max_gap(const BneReport& r) { return *std::max_element(r.gaps.begin(), r.gaps.end()); }

SolveSettings solver_settings(const ScenarioOptions& o) {
    SolveSettings st;
    st.grid_log2 = o.grid_log2;
    st.seed = o.seed;
    std::vector<int> sched;
    for (int m : st.m_schedule)
        if (m <= o.m_max) sched.push_back(m);
    if (sched.empty()) sched.push_back(std::max(2, o.m_max));
    st.m_schedule = sched;
    return st;
}

std::string join_doubles(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(10);
    for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ", " : "") << v[k];
    return os.str();
}

const ConditionReport& find_report(const std::vector<ConditionReport>& reps, const std::string& name) {
    const std::string full = name == "scc" ? "single-crossing" : name == "idc" ? "increasing-differences" : name;
    for (const auto& r : reps)
        if (r.condition == full) return r;
    throw ModelError("condition report missing: " + name);
}

// u_i as a function on the joint action lattice of a two-player chain game at fixed types.
ConditionReport joint_supermodularity(const BayesGame& g, int i, const std::vector<double>& t) {
    std::vector<PosetElement> elems;
    std::vector<std::vector<int>> idx;
    for (std::size_t a = 0; a < g.lattice(0).size(); ++a)
        for (std::size_t b = 0; b < g.lattice(1).size(); ++b) {
            elems.push_back(PosetElement(std::vector<Rational>{rational_from_double(g.lattice(0).value(a)),
                                                               rational_from_double(g.lattice(1).value(b))}));
            idx.push_back({static_cast<int>(a), static_cast<int>(b)});
        }
    const FiniteLattice L = FiniteLattice::product(elems);
    return check_supermodular([&](int k) { return g.payoff(i, idx[static_cast<std::size_t>(k)], t); }, L);
}

void single_crossing_checks(CheckList& cl) {
    const BayesGame g = single_crossing_game();
    const ScenarioOptions& o = *cl.opts;
    IntegrationOptions exact;
    exact.method = IntegrationOptions::Method::Exact;
    // Interim differences against cutoff opponents.
    double err = 0.0;
    for (int a = 0; a < 20; ++a)
        for (int b = 0; b < 20; ++b) {
            const double x = (a + 0.5) / 20.0, t = (b + 0.5) / 20.0;
            const BehavioralProfile opp{BehavioralStrategy::from_step(step({0.0, x, 1.0}, {0, 1})),
                                        BehavioralStrategy::from_step(step({0.0, x, 1.0}, {0, 1}))};
            const auto v1 = interim_payoffs(g, 0, t, opp, exact);
            const auto v2 = interim_payoffs(g, 1, t, opp, exact);
            err = std::max(err, std::fabs(v1[1] - v1[0] - single_crossing_diff1(x, t)));
            err = std::max(err, std::fabs(v2[1] - v2[0] - single_crossing_diff2(x)));
        }
    cl.add("interim-difference-max-error", err, 0.0, 1e-8, "20x20 grid of (cutoff, type)");

    const OpponentFamily fam = cutoff_family(g, 0);
    const auto reps = check_player_conditions(g, 0, fam, uniform_grid(0.0, 1.0, 33), {"scc", "idc"});
    const auto& idc = find_report(reps, "idc");
    cl.flag("single-crossing-holds", find_report(reps, "scc").holds);
    cl.flag("increasing-differences-fails", !idc.holds,
            idc.witness ? "opponent cutoffs " + join_doubles(idc.witness->opponent_cutoffs) : "");

    const SolveSettings st = solver_settings(o);
    const EquilibriumResult eq = find_monotone_equilibrium(g, st);
    const auto b1 = eq.profile[0].merged().breakpoints(), b2 = eq.profile[1].merged().breakpoints();
    cl.add("monotone-cutoff-player1", b1.size() == 1 ? b1[0] : std::nan(""), 0.8, 1e-4, eq.status);
    cl.add("monotone-cutoff-player2", b2.size() == 1 ? b2[0] : std::nan(""), 0.875, 1e-4, eq.status);

    const double r = single_crossing_perfect_cutoff();
    cl.add("perfect-cutoff-quadratic-residual", -31.0 / 120.0 + 173.0 / 120.0 * r + r * r / 3.0, 0.0, 1e-12);
    const Profile gstar = single_crossing_perfect_profile();
    cl.add("perfect-profile-bne-gap", max_gap(check_bne(g, gstar, 1e-8)), 0.0, 1e-8);
    double cf = 0.0;
    const BehavioralProfile gb = to_behavioral(gstar);
    for (int k = 0; k <= 64; ++k) {
        const double t = k / 64.0;
        const auto v = interim_payoffs(g, 0, t, gb, exact);
        cf = std::max(cf, std::fabs(v[1] - v[0] - 4.0 / 3.0 * (t - 0.2) * (0.125 - r)));
    }
    cl.add("perfect-profile-difference-max-error", cf, 0.0, 1e-10);
    const auto cert = check_perfection(g, gstar, make_sequence(levels_up_to(8, o.m_max), single_crossing_sequence_level));
    cl.flag("perfect-profile-certified", cert.certified, cert.verdict);

    const PerfectResult pr = find_perfect_monotone_equilibrium(g, st, false);
    cl.flag("perfect-search-non-convergence", pr.status == "non-convergence", pr.status + ": " + pr.note);
    const auto canon = check_perfection(g, single_crossing_monotone_profile(),
                                        canonical_sequence(g, single_crossing_monotone_profile(), levels_up_to(2, o.m_max)));
    bool every = !canon.certified;
    for (const auto& lvl : canon.levels) every = every && lvl.witness_player >= 0;
    cl.flag("monotone-profile-fails-every-level", every, canon.verdict);
}

void two_dimensional_checks(CheckList& cl) {
    const BayesGame g = two_dimensional_game();
    const OpponentFamily fam = cutoff_family(g, 0);
    const auto reps = check_player_conditions(g, 0, fam, uniform_grid(0.0, 1.0, 33),
                                              {"idc", "quasi-supermodular", "supermodular"});
    const auto& sm = find_report(reps, "supermodular");
    cl.flag("increasing-differences-holds", find_report(reps, "idc").holds);
    cl.flag("quasi-supermodular-holds", find_report(reps, "quasi-supermodular").holds);
    const bool witness_high = sm.witness && !sm.witness->opponent_cutoffs.empty() &&
                              sm.witness->opponent_cutoffs[0] > 0.875;
    cl.flag("supermodular-fails-above-7/8", !sm.holds && witness_high,
            sm.witness ? "opponent cutoff " + join_doubles(sm.witness->opponent_cutoffs) : "");

    const SolveSettings st = solver_settings(*cl.opts);
    const EquilibriumResult eq = find_monotone_equilibrium(g, st);
    const StepStrategy s1 = eq.profile[0].merged(), s2 = eq.profile[1].merged();
    const bool shape = s1.actions == std::vector<int>{0, 2, 3} && s2.actions == std::vector<int>{0, 1};
    cl.add("profile-cutoff-low", shape ? s1.cuts[1] : std::nan(""), 0.5, 1e-4, eq.status);
    cl.add("profile-cutoff-high", shape ? s1.cuts[2] : std::nan(""), 0.8, 1e-4, eq.status);
    cl.add("profile-cutoff-player2", shape ? s2.cuts[1] : std::nan(""), 0.875, 1e-4, eq.status);
    cl.add("reference-profile-bne-gap", max_gap(check_bne(g, two_dimensional_profile(), 1e-9)), 0.0, 1e-9);

    const PerfectResult pr = find_perfect_monotone_equilibrium(g, st, false);
    cl.flag("perfect-search-non-convergence", pr.status == "non-convergence", pr.status + ": " + pr.note);
}

void first_price_checks(CheckList& cl) {
    const ScenarioOptions& o = *cl.opts;
    const BayesGame gq = first_price_example_game(true);
    cl.add("reference-bne-gap-with-quit", max_gap(check_bne(gq, first_price_reference_profile(true), 1e-10)), 0.0,
           1e-10);
    const BayesGame g = first_price_example_game(false);
    const Profile ref = first_price_reference_profile(false);
    cl.add("reference-bne-gap", max_gap(check_bne(g, ref, 1e-10)), 0.0, 1e-10);
    std::vector<int> levels{3};
    for (int m : levels_up_to(4, o.m_max)) levels.push_back(m);
    const auto cert = check_perfection(g, ref, make_sequence(levels, [&](int m) { return first_price_sequence_level(ref, m); }));
    cl.flag("reference-certified", cert.certified, cert.verdict);
    for (int m : {10, 100, 1000}) {
        cl.add("threshold-bidder2-m" + std::to_string(m), first_price_threshold_bidder2(m), 8.0 - 5.0 / (16.0 * m - 8.0),
               1e-8);
        cl.add("threshold-bidder1-m" + std::to_string(m), first_price_threshold_bidder1(m), 3.0 + 6.0 / (8.0 * m - 5.0),
               1e-8);
    }
    cl.flag("not-supermodular", !joint_supermodularity(g, 0, {4.0, 7.5}).holds);
}

void intro_checks(CheckList& cl) {
    const ScenarioOptions& o = *cl.opts;
    const BayesGame g = first_price_example_game(false);
    const Profile p = first_price_intro_profile(false);
    cl.add("bne-gap", max_gap(check_bne(g, p, 1e-10)), 0.0, 1e-10);
    const auto cert = check_perfection(g, p, canonical_sequence(g, p, levels_up_to(2, o.m_max)));
    cl.flag("perfection-fails", !cert.certified, cert.verdict);
    const DominanceVerdict dv = dominance_audit(g, 0, bid_index(g, 0, 5), 2.5);
    cl.flag("bid5-weakly-dominated", dv.kind == DominanceKind::WeaklyDominated, to_string(dv.kind));
    // The pure bid 0 does weakly better against every constant opponent bid.
    bool dominated_by_zero = true, strict = false;
    for (std::size_t b = 0; b < g.lattice(1).size(); ++b) {
        const BehavioralProfile opp{BehavioralStrategy::from_step(p[0]),
                                    BehavioralStrategy::from_step(StepStrategy::constant(7.0, 8.0, static_cast<int>(b)))};
        const auto v = interim_payoffs(g, 0, 2.5, opp);
        dominated_by_zero = dominated_by_zero && v[0] >= v[5] - 1e-12;
        strict = strict || v[0] > v[5] + 1e-12;
    }
    cl.flag("bid0-weakly-beats-bid5", dominated_by_zero && strict);
}

void second_price_checks(CheckList& cl) {
    const ScenarioOptions& o = *cl.opts;
    const BayesGame g = second_price_example_game();
    const Profile ref = second_price_reference_profile();
    cl.add("reference-bne-gap", max_gap(check_bne(g, ref, 1e-10)), 0.0, 1e-10);
    std::vector<int> levels{3};
    for (int m : levels_up_to(4, o.m_max)) levels.push_back(m);
    const auto cert =
        check_perfection(g, ref, make_sequence(levels, [&](int m) { return second_price_sequence_level(ref, m); }));
    cl.flag("reference-certified", cert.certified, cert.verdict);
    double err = 0.0;
    const BehavioralProfile rb = to_behavioral(ref);
    for (int k = 0; k <= 32; ++k) {
        const double v = 1.0 + k / 32.0;
        const auto vals = interim_payoffs(g, 1, v, rb);
        err = std::max({err, std::fabs(vals[0]), std::fabs(vals[1] - (v - 1.0) / 4.0),
                        std::fabs(vals[2] - ((v - 1.0) / 2.0 + (v - 2.0) / 4.0))});
    }
    cl.add("interim-closed-form-max-error", err, 0.0, 1e-10);
    const Profile triv = second_price_trivial_profile();
    cl.add("trivial-bne-gap", max_gap(check_bne(g, triv, 1e-10)), 0.0, 1e-10);
    const DominanceVerdict dv = dominance_audit(g, 0, 0, 1.5);
    cl.flag("trivial-bid0-weakly-dominated", dv.kind == DominanceKind::WeaklyDominated, to_string(dv.kind));
    cl.flag("not-supermodular", !joint_supermodularity(g, 0, {1.5, 1.5}).holds);
}

void coordination_checks(CheckList& cl) {
    const ScenarioOptions& o = *cl.opts;
    const BayesGame g = coordination_game();
    const SolveSettings st = solver_settings(o);
    const EquilibriumResult low = find_monotone_equilibrium(g, st, InitKind::ExtremalLow);
    const EquilibriumResult high = find_monotone_equilibrium(g, st, InitKind::ExtremalHigh);
    auto constant_action = [](const EquilibriumResult& r) {
        const StepStrategy a = r.profile[0].merged(), b = r.profile[1].merged();
        if (a.cells() != 1 || b.cells() != 1 || a.actions[0] != b.actions[0]) return -1.0;
        return static_cast<double>(a.actions[0]);
    };
    cl.add("low-start-equilibrium-action", constant_action(low), 0.0, 0.0, low.status);
    cl.add("high-start-equilibrium-action", constant_action(high), 1.0, 0.0, high.status);
    const Profile zero = coordination_profile(0), one = coordination_profile(1);
    std::vector<int> levels{3};
    for (int m : levels_up_to(4, o.m_max)) levels.push_back(m);
    const auto cert =
        check_perfection(g, zero, make_sequence(levels, [&](int m) { return coordination_sequence_level(zero, m); }));
    cl.flag("all-zero-certified", cert.certified, cert.verdict);
    const AdmissibilityReport adm = check_admissibility(g, one);
    cl.flag("all-one-inadmissible", !adm.admissible);
    cl.flag("supermodular", joint_supermodularity(g, 0, {0.5, 0.5}).holds && joint_supermodularity(g, 1, {0.5, 0.5}).holds);
}

void uniform_auction_checks(CheckList& cl) {
    const ScenarioOptions& o = *cl.opts;
    SolveSettings st;
    st.seed = o.seed;
    std::vector<int> sched;
    for (int m : st.m_schedule)
        if (m <= o.m_max) sched.push_back(m);
    if (!sched.empty()) st.m_schedule = sched;
    const AuctionSolveResult res = solve_generalized_auction(uniform_first_price_auction(2), st);
    double sup = 0.0;
    for (int k = 0; k < 512; ++k) {
        const double v = (k + 0.5) / 512.0;
        // Quitting and bidding 0 both never win; quit counts as bid 0.
        for (const auto& b : res.bids) sup = std::max(sup, std::fabs(std::max(0.0, b.bid_at(v)) - v / 2.0));
    }
    cl.add("bid-function-sup-distance", sup, 0.0, 0.02, res.status);
    double last_tie = std::nan("");
    if (!res.levels.empty()) last_tie = res.levels.back().tie_probability;
    cl.add("final-tie-probability", last_tie, 0.0, 1e-3);
}

const std::vector<std::pair<std::string, std::string>>& registry() {
    static const std::vector<std::pair<std::string, std::string>> r{
        {"exam-scc", "two binary players: single crossing without increasing differences"},
        {"exam-2", "two-dimensional actions: increasing differences without supermodularity"},
        {"intro", "first-price auction with the imperfect constant profile (5, 6)"},
        {"exam-1st", "first-price auction with values U[0,5] and U[7,8]"},
        {"exam-2nd", "second-price auction with values U[1,2]"},
        {"exam-super", "coordination game with two extremal equilibria"},
        {"fp-uniform", "generalized first-price auction with iid uniform values (double limit)"},
    };
    return r;
}

}  // namespace

std::vector<std::string> scenario_names() {
    std::vector<std::string> out;
    for (const auto& [name, desc] : registry()) out.push_back(name);
    return out;
}

std::string scenario_description(const std::string& name) {
    const auto canon = canonical_scenario(name);
    for (const auto& [n, desc] : registry())
        if (canon && n == *canon) return desc;
    throw ModelError("unknown scenario: " + name);
}

std::optional<std::string> canonical_scenario(const std::string& name) {
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
    for (const auto& [n, desc] : registry())
        if (n == lower) return n;
    return std::nullopt;
}

std::vector<GoldenCheck> reproduce_scenario(const std::string& name, const ScenarioOptions& options) {
    const auto canon = canonical_scenario(name);
    if (!canon) throw ModelError("unknown scenario: " + name);
    CheckList cl{*canon, &options, {}};
    if (*canon == "exam-scc") single_crossing_checks(cl);
    else if (*canon == "exam-2") two_dimensional_checks(cl);
    else if (*canon == "intro") intro_checks(cl);
    else if (*canon == "exam-1st") first_price_checks(cl);
    else if (*canon == "exam-2nd") second_price_checks(cl);
    else if (*canon == "exam-super") coordination_checks(cl);
    else if (*canon == "fp-uniform") uniform_auction_checks(cl);
    return cl.out;
}

}  // namespace monoeq
