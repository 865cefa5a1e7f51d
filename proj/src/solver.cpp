#include "monoeq/solver.hpp"

#include "monoeq/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <deque>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

namespace monoeq {

void SolveSettings::validate() const {
    if (grid_log2 < 1 || grid_log2 > 20) throw SolverError("grid_log2 must lie in [1, 20]");
    if (!(breakpoint_tol > 0) || !(br_tol > 0) || !(tol > 0) || !(residual_tol > 0))
        throw SolverError("solver tolerances must be positive");
    if (!(damping > 0 && damping <= 1)) throw SolverError("damping must lie in (0, 1]");
    if (max_iterations < 1) throw SolverError("max_iterations must be positive");
    if (max_newton_vars < 0 || auction_newton_vars < 0) throw SolverError("Newton variable caps must be nonnegative");
    if (m_schedule.empty()) throw SolverError("the m schedule must not be empty");
    for (std::size_t k = 0; k < m_schedule.size(); ++k) {
        if (m_schedule[k] < 2) throw SolverError("perturbation levels must be at least 2");
        if (k > 0 && m_schedule[k] <= m_schedule[k - 1]) throw SolverError("the m schedule must be strictly increasing");
    }
    for (std::size_t k = 0; k < bid_grid_log2.size(); ++k) {
        if (bid_grid_log2[k] < 0 || bid_grid_log2[k] > 20) throw SolverError("bid grid exponents must lie in [0, 20]");
        if (k > 0 && bid_grid_log2[k] <= bid_grid_log2[k - 1])
            throw SolverError("the bid-grid schedule must be strictly refining");
    }
    if (!(limit_factor > 0) || limit_levels < 1) throw SolverError("limit detection parameters must be positive");
}

// ---------------------------------------------------------------------------
// Cutoff representation

std::vector<double> strategy_cutoffs(const StepStrategy& s, const FiniteLattice& L, const TypeSpace& box) {
    s.validate();
    std::vector<double> c(L.size(), box.hi);
    for (std::size_t a = 0; a < L.size(); ++a)
        for (std::size_t k = 0; k < s.cells(); ++k)
            if (L.leq(a, static_cast<std::size_t>(s.actions[k]))) {
                c[a] = s.cuts[k];
                break;
            }
    return c;
}

StepStrategy strategy_from_cutoffs(const std::vector<double>& c, const FiniteLattice& L, const TypeSpace& box) {
    if (c.size() != L.size()) throw SolverError("cutoff vector does not match the action lattice");
    std::vector<double> pts{box.lo};
    for (double x : c)
        if (x > box.lo && x < box.hi) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    StepStrategy s;
    for (double p : pts) {
        std::vector<std::size_t> set{L.bottom()};
        for (std::size_t a = 0; a < L.size(); ++a)
            if (c[a] <= p && c[a] < box.hi) set.push_back(a);
        s.cuts.push_back(p);
        s.actions.push_back(static_cast<int>(L.join_of(set)));
    }
    s.cuts.push_back(box.hi);
    return s.merged();
}

Profile extremal_profile(const BayesGame& game, bool high) {
    Profile p;
    for (int i = 0; i < game.n; ++i) {
        const FiniteLattice& L = game.lattice(i);
        p.push_back(StepStrategy::constant(game.types[i].lo, game.types[i].hi,
                                           static_cast<int>(high ? L.top() : L.bottom())));
    }
    return p;
}

// ---------------------------------------------------------------------------
// Best-response step

namespace {

int selected_action(const FiniteLattice& L, const std::vector<double>& v, double tol) {
    return select_maximal(L, best_response_from_values(v, tol).actions);
}

double gap_of(const std::vector<double>& v, int a) {
    return *std::max_element(v.begin(), v.end()) - v[static_cast<std::size_t>(a)];
}

double breakpoint_offset(const TypeSpace& box, const SolveSettings& st) {
    return std::max(10.0 * st.breakpoint_tol, 1e-13 * box.width());
}

// Gap of `s` at the grid types and on both sides of each breakpoint.
double strategy_gap(const TypeSpace& box, const ValueEvaluator& f, const StepStrategy& s, const SolveSettings& st) {
    const int N = 1 << st.grid_log2;
    const double h = box.width() / N;
    double res = 0.0;
    for (int j = 0; j <= N; ++j) {
        const double t = j == N ? box.hi : box.lo + j * h;
        res = std::max(res, gap_of(f(t), s.eval(t)));
    }
    const double eta = breakpoint_offset(box, st);
    for (double c : s.breakpoints())
        for (double x : {c - eta, c + eta})
            if (x >= box.lo && x <= box.hi) res = std::max(res, gap_of(f(x), s.eval(x)));
    return res;
}

std::string describe_violation(const FiniteLattice& L, double t1, int a1, double t2, int a2) {
    std::ostringstream os;
    os << "best-response selection is not monotone: action " << a1 << " (";
    for (double x : L.coords(a1)) os << x << ' ';
    os << ") at type " << t1 << " is not below action " << a2 << " (";
    for (double x : L.coords(a2)) os << x << ' ';
    os << ") at type " << t2;
    return os.str();
}

}  // namespace

MonotoneBrResult monotone_br_from_evaluator(const FiniteLattice& L, const TypeSpace& box, const ValueEvaluator& f,
                                            const SolveSettings& st, const StepStrategy* current) {
    const int N = 1 << st.grid_log2;
    const double h = box.width() / N;
    auto point = [&](int j) { return j == N ? box.hi : box.lo + j * h; };
    MonotoneBrResult out;
    std::vector<int> sel(N + 1);
    for (int j = 0; j <= N; ++j) {
        const std::vector<double> v = f(point(j));
        sel[j] = selected_action(L, v, st.br_tol);
        if (current) out.residual = std::max(out.residual, gap_of(v, current->eval(point(j))));
    }
    if (current) {
        const double eta = breakpoint_offset(box, st);
        for (double c : current->breakpoints())
            for (double x : {c - eta, c + eta})
                if (x >= box.lo && x <= box.hi) out.residual = std::max(out.residual, gap_of(f(x), current->eval(x)));
    }
    for (int j = 0; j < N; ++j)
        if (!L.leq(sel[j], sel[j + 1])) {
            out.witness = describe_violation(L, point(j), sel[j], point(j + 1), sel[j + 1]);
            return out;
        }
    StepStrategy s;
    s.cuts.push_back(box.lo);
    s.actions.push_back(sel[0]);
    auto sel_at = [&](double t) { return selected_action(L, f(t), st.br_tol); };
    for (int j = 0; j < N; ++j) {
        if (sel[j] == sel[j + 1]) continue;
        double l = point(j);
        int al = sel[j];
        const double r = point(j + 1);
        const int ar = sel[j + 1];
        while (al != ar) {
            double lo = l, hi = r;
            int ahi = ar;
            for (int guard = 0; guard < 200 && hi - lo > st.breakpoint_tol; ++guard) {
                const double mid = 0.5 * (lo + hi);
                const int am = sel_at(mid);
                if (am == al) {
                    lo = mid;
                } else {
                    hi = mid;
                    ahi = am;
                }
            }
            if (!L.leq(al, ahi)) {
                out.witness = describe_violation(L, lo, al, hi, ahi);
                return out;
            }
            if (hi > s.cuts.back() && hi < box.hi) {
                s.cuts.push_back(hi);
                s.actions.push_back(ahi);
            } else {
                s.actions.back() = ahi;
            }
            l = hi;
            al = ahi;
        }
    }
    s.cuts.push_back(box.hi);
    out.strategy = s.merged();
    return out;
}

MonotoneBrResult monotone_br_step(const BayesGame& game, int i, const Profile& profile, const SolveSettings& st,
                                  const StepStrategy* current) {
    st.validate();
    if (i < 0 || i >= game.n) throw SolverError("player index out of range");
    const ValueEvaluator f = base_evaluators(game, st.integration)(i, profile);
    return monotone_br_from_evaluator(game.lattice(i), game.types[i], f, st, current);
}

EvaluatorFactory base_evaluators(const BayesGame& game, const IntegrationOptions& opts) {
    auto g = std::make_shared<const BayesGame>(game);
    IntegrationOptions o = opts;
    o.estimate_residual = false;
    return [g, o](int i, const Profile& p) -> ValueEvaluator {
        auto beh = std::make_shared<const BehavioralProfile>(to_behavioral(p));
        return [g, beh, i, o](double t) { return interim_payoffs(*g, i, t, *beh, o); };
    };
}

EvaluatorFactory perturbed_evaluators(const BayesGame& game, const PerturbationScheme& scheme,
                                      const IntegrationOptions& opts) {
    scheme.validate();
    auto g = std::make_shared<const BayesGame>(game);
    IntegrationOptions o = opts;
    o.estimate_residual = false;
    return [g, scheme, o](int i, const Profile& p) -> ValueEvaluator {
        auto emb = std::make_shared<const BehavioralProfile>(embed_profile(*g, p, scheme));
        return [g, emb, scheme, i, o](double t) { return perturbed_interim_from_embedded(*g, scheme, i, t, *emb, o); };
    };
}

double profile_residual(const std::vector<FiniteLattice>& lattices, const std::vector<TypeSpace>& boxes,
                        const EvaluatorFactory& factory, const Profile& profile, const SolveSettings& st,
                        std::vector<double>* per_player) {
    if (lattices.size() != boxes.size() || profile.size() != boxes.size())
        throw SolverError("profile, lattices and type boxes must have one entry per player");
    double res = 0.0;
    if (per_player) per_player->assign(boxes.size(), 0.0);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const double g = strategy_gap(boxes[i], factory(static_cast<int>(i), profile), profile[i], st);
        if (per_player) (*per_player)[i] = g;
        res = std::max(res, g);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Newton refinement of the indifference conditions at the breakpoints

namespace {

struct NewtonVar {
    std::size_t player;
    std::size_t cut;   // index into cuts (interior)
    int left;
    int right;
};

// Removes cells whose width is not positive (cuts crossed by a Newton step); a vanished interior
// cell leaves one cut between its neighbours at the midpoint of the crossed pair.
Profile collapse_cells(Profile p, const std::vector<TypeSpace>& boxes) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        StepStrategy& s = p[i];
        const double lo = boxes[i].lo, hi = boxes[i].hi, floor = 1e-12 * boxes[i].width();
        for (double& c : s.cuts) c = std::clamp(c, lo, hi);
        bool changed = true;
        while (changed && s.cells() > 1) {
            changed = false;
            for (std::size_t k = 0; k < s.cells(); ++k) {
                if (s.cuts[k + 1] - s.cuts[k] > floor) continue;
                if (k == 0) {
                    s.cuts.erase(s.cuts.begin() + 1);
                } else if (k + 1 == s.cells()) {
                    s.cuts.erase(s.cuts.end() - 2);
                } else {
                    const double mid = 0.5 * (s.cuts[k] + s.cuts[k + 1]);
                    s.cuts[k] = mid;
                    s.cuts.erase(s.cuts.begin() + static_cast<std::ptrdiff_t>(k) + 1);
                }
                s.actions.erase(s.actions.begin() + static_cast<std::ptrdiff_t>(k));
                s.cuts.front() = lo;
                s.cuts.back() = hi;
                changed = true;
                break;
            }
        }
        s = s.merged();
    }
    return p;
}

// Levenberg-Marquardt on the indifference conditions at fixed support.  When an undamped step
// would cross cuts, the crossed profile is returned through `collapsed` for a restart with the
// reduced support.
std::optional<Profile> newton_core(const std::vector<FiniteLattice>& lattices, const std::vector<TypeSpace>& boxes,
                                   const EvaluatorFactory& factory, const Profile& start, const SolveSettings& st,
                                   int max_vars, std::optional<Profile>* collapsed) {
    Profile base;
    for (const auto& s : start) base.push_back(s.merged());
    // Breakpoints at payoff discontinuities (the gap changes sign with a jump
    // across the cut) have no indifference condition and stay fixed.
    std::vector<NewtonVar> vars;
    std::vector<std::optional<ValueEvaluator>> fs0(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        for (std::size_t k = 1; k + 1 < base[i].cuts.size(); ++k) {
            const NewtonVar var{i, k, base[i].actions[k - 1], base[i].actions[k]};
            const double c = base[i].cuts[k];
            const double eta = std::max(10.0 * st.breakpoint_tol, 1e-9 * boxes[i].width());
            if (!fs0[i]) fs0[i] = factory(static_cast<int>(i), base);
            const std::vector<double> vl = (*fs0[i])(std::max(boxes[i].lo, c - eta)),
                                      vr = (*fs0[i])(std::min(boxes[i].hi, c + eta));
            const double gl = vl[static_cast<std::size_t>(var.right)] - vl[static_cast<std::size_t>(var.left)];
            const double gr = vr[static_cast<std::size_t>(var.right)] - vr[static_cast<std::size_t>(var.left)];
            const bool jump = gl < 0.0 && gr > 0.0 && std::min(-gl, gr) > 1e-6;
            if (!jump) vars.push_back(var);
        }
    }
    const int nv = static_cast<int>(vars.size());
    if (nv == 0 || nv > max_vars) return std::nullopt;
    Eigen::VectorXd x(nv);
    for (int k = 0; k < nv; ++k) x[k] = base[vars[k].player].cuts[vars[k].cut];

    auto assemble = [&](const Eigen::VectorXd& y) -> std::optional<Profile> {
        Profile p = base;
        for (int k = 0; k < nv; ++k) p[vars[k].player].cuts[vars[k].cut] = y[k];
        for (std::size_t i = 0; i < p.size(); ++i)
            for (std::size_t k = 1; k < p[i].cuts.size(); ++k)
                if (!(p[i].cuts[k] > p[i].cuts[k - 1])) return std::nullopt;
        return p;
    };
    auto residual = [&](const Profile& p) {
        Eigen::VectorXd g(nv);
        std::vector<std::optional<ValueEvaluator>> fs(p.size());
        for (int k = 0; k < nv; ++k) {
            const std::size_t i = vars[k].player;
            if (!fs[i]) fs[i] = factory(static_cast<int>(i), p);
            const std::vector<double> v = (*fs[i])(p[i].cuts[vars[k].cut]);
            g[k] = v[static_cast<std::size_t>(vars[k].right)] - v[static_cast<std::size_t>(vars[k].left)];
        }
        return g;
    };

    Profile cur = *assemble(x);
    Eigen::VectorXd g = residual(cur);
    double mu = 1e-8;
    for (int iter = 0; iter < 50 && g.lpNorm<Eigen::Infinity>() > 1e-14; ++iter) {
        Eigen::MatrixXd J(nv, nv);
        for (int j = 0; j < nv; ++j) {
            const double step = 1e-7 * std::max(1.0, std::fabs(x[j]));
            Eigen::VectorXd y = x;
            y[j] += step;
            auto p = assemble(y);
            double sgn = 1.0;
            if (!p) {
                y[j] = x[j] - step;
                p = assemble(y);
                sgn = -1.0;
            }
            if (!p) return std::nullopt;
            J.col(j) = (residual(*p) - g) / (sgn * step);
        }
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd Jtg = J.transpose() * g;
        bool accepted = false;
        for (int tries = 0; tries < 12 && !accepted; ++tries) {
            Eigen::MatrixXd A = JtJ;
            for (int k = 0; k < nv; ++k) A(k, k) += mu * std::max(JtJ(k, k), 1e-30);
            const Eigen::VectorXd delta = A.ldlt().solve(-Jtg);
            if (!delta.allFinite()) {
                mu *= 10.0;
                continue;
            }
            Eigen::VectorXd y = x + delta;
            auto p = assemble(y);
            if (!p && tries == 0 && collapsed && iter > 0) {
                Profile crossed = base;
                for (int k = 0; k < nv; ++k) crossed[vars[k].player].cuts[vars[k].cut] = y[k];
                *collapsed = collapse_cells(crossed, boxes);
                return std::nullopt;
            }
            if (p) {
                for (std::size_t i = 0; i < p->size(); ++i)
                    if ((*p)[i].cuts[1] <= boxes[i].lo || (*p)[i].cuts[(*p)[i].cuts.size() - 2] >= boxes[i].hi) p.reset();
            }
            if (p) {
                const Eigen::VectorXd gy = residual(*p);
                if (gy.norm() < g.norm()) {
                    x = y;
                    g = gy;
                    cur = *p;
                    mu = std::max(mu / 10.0, 1e-12);
                    accepted = true;
                    continue;
                }
            }
            mu *= 10.0;
        }
        if (!accepted) break;
    }
    if (profile_residual(lattices, boxes, factory, cur, st) <= st.residual_tol) return cur;
    return std::nullopt;
}

std::optional<Profile> newton_polish(const std::vector<FiniteLattice>& lattices, const std::vector<TypeSpace>& boxes,
                                     const EvaluatorFactory& factory, const Profile& start, const SolveSettings& st,
                                     int max_vars) {
    Profile cur = start;
    for (int round = 0; round < 8; ++round) {
        std::optional<Profile> collapsed;
        if (auto p = newton_core(lattices, boxes, factory, cur, st, max_vars, &collapsed)) return p;
        if (!collapsed) return std::nullopt;
        cur = *collapsed;
    }
    return std::nullopt;
}

std::vector<double> flatten(const std::vector<std::vector<double>>& C) {
    std::vector<double> out;
    for (const auto& c : C) out.insert(out.end(), c.begin(), c.end());
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Damped cutoff dynamics

EquilibriumResult solve_cutoff_dynamics(const std::vector<FiniteLattice>& lattices, const std::vector<TypeSpace>& boxes,
                                        const EvaluatorFactory& factory, const Profile& init,
                                        const SolveSettings& st) {
    st.validate();
    const std::size_t n = lattices.size();
    if (boxes.size() != n || init.size() != n) throw SolverError("init profile, lattices and boxes must agree in size");
    std::vector<std::vector<double>> C(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_monotone(init[i], lattices[i])) throw SolverError("initial profile must be monotone");
        C[i] = strategy_cutoffs(init[i], lattices[i], boxes[i]);
    }
    auto build = [&](const std::vector<std::vector<double>>& state) {
        Profile p;
        for (std::size_t i = 0; i < n; ++i) p.push_back(strategy_from_cutoffs(state[i], lattices[i], boxes[i]));
        return p;
    };

    EquilibriumResult best;
    best.residual = std::numeric_limits<double>::infinity();
    double lambda = st.damping;
    std::vector<std::vector<int>> last_sign(n);
    for (std::size_t i = 0; i < n; ++i) last_sign[i].assign(lattices[i].size(), 0);
    int since_flip = 0, last_flip = -1000000, last_newton = -1000000;
    std::deque<std::vector<std::vector<double>>> window;   // recent cutoff states
    int newton_wait = 10;      // iterations between Newton attempts; doubles after each failure
    int small_step_since = -1; // first iteration at which damping reached its floor
    std::vector<IterationRecord> trace;

    auto finish = [&](EquilibriumResult r, int it) {
        r.iterations = it;
        r.trace = trace;
        return r;
    };

    for (int it = 0; it < st.max_iterations; ++it) {
        const Profile prof = build(C);
        for (std::size_t i = 0; i < n; ++i) C[i] = strategy_cutoffs(prof[i], lattices[i], boxes[i]);

        std::vector<MonotoneBrResult> brs(n);
        std::vector<double> pres(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            brs[i] = monotone_br_from_evaluator(lattices[i], boxes[i], factory(static_cast<int>(i), prof), st, &prof[i]);
            pres[i] = brs[i].residual;
        }
        const double residual = *std::max_element(pres.begin(), pres.end());
        IterationRecord rec;
        rec.iteration = it;
        rec.cutoffs = flatten(C);
        rec.residual = residual;
        rec.damping = lambda;
        rec.step = "br";
        if (residual < best.residual) {
            best.profile = prof;
            best.residual = residual;
            best.player_residuals = pres;
        }
        if (residual <= st.residual_tol) {
            trace.push_back(rec);
            EquilibriumResult r = best;
            r.profile = prof;
            r.residual = residual;
            r.player_residuals = pres;
            r.converged = true;
            r.status = "converged";
            return finish(r, it);
        }
        for (std::size_t i = 0; i < n; ++i)
            if (brs[i].witness) {
                trace.push_back(rec);
                EquilibriumResult r;
                r.profile = prof;
                r.residual = residual;
                r.player_residuals = pres;
                r.status = "idc-violation";
                r.witness = "player " + std::to_string(i) + ": " + *brs[i].witness;
                return finish(r, it);
            }

        const bool recent_flip = it - last_flip < 10;
        if (st.newton_polish && it - last_newton >= newton_wait && (recent_flip || it >= 50)) {
            last_newton = it;
            newton_wait = std::min(2 * newton_wait, 640);
            // Under heavy damping the iterates circle the fixed point; their average is a
            // better Newton start than the latest iterate.
            Profile start = prof;
            if (lambda < 0.05 && window.size() >= 8) {
                std::vector<std::vector<double>> avg = window.front();
                for (std::size_t q = 1; q < window.size(); ++q)
                    for (std::size_t i = 0; i < n; ++i)
                        for (std::size_t a = 0; a < avg[i].size(); ++a) avg[i][a] += window[q][i][a];
                for (auto& c : avg)
                    for (double& x : c) x /= static_cast<double>(window.size());
                start = build(avg);
            }
            if (auto polished = newton_polish(lattices, boxes, factory, start, st, st.max_newton_vars)) {
                std::vector<double> pp;
                const double r2 = profile_residual(lattices, boxes, factory, *polished, st, &pp);
                trace.push_back(rec);
                IterationRecord nrec;
                nrec.iteration = it;
                std::vector<std::vector<double>> Cn(n);
                for (std::size_t i = 0; i < n; ++i) Cn[i] = strategy_cutoffs((*polished)[i], lattices[i], boxes[i]);
                nrec.cutoffs = flatten(Cn);
                nrec.residual = r2;
                nrec.damping = lambda;
                nrec.step = "newton";
                trace.push_back(nrec);
                EquilibriumResult r;
                r.profile = *polished;
                r.residual = r2;
                r.player_residuals = pp;
                r.converged = true;
                r.status = "converged";
                return finish(r, it + 1);
            }
        }

        double movement = 0.0;
        bool flip = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> target;
            if (st.sequential && i > 0) {
                const Profile cur = build(C);
                MonotoneBrResult br =
                    monotone_br_from_evaluator(lattices[i], boxes[i], factory(static_cast<int>(i), cur), st);
                if (br.witness) {
                    trace.push_back(rec);
                    EquilibriumResult r;
                    r.profile = prof;
                    r.residual = residual;
                    r.player_residuals = pres;
                    r.status = "idc-violation";
                    r.witness = "player " + std::to_string(i) + ": " + *br.witness;
                    return finish(r, it);
                }
                target = strategy_cutoffs(*br.strategy, lattices[i], boxes[i]);
            } else {
                target = strategy_cutoffs(*brs[i].strategy, lattices[i], boxes[i]);
            }
            for (std::size_t a = 0; a < target.size(); ++a) {
                const double d = target[a] - C[i][a];
                const int sgn = std::fabs(d) > 100.0 * st.breakpoint_tol ? (d > 0 ? 1 : -1) : 0;
                if (sgn != 0 && last_sign[i][a] != 0 && sgn != last_sign[i][a]) flip = true;
                if (sgn != 0) last_sign[i][a] = sgn;
                C[i][a] += lambda * d;
                movement = std::max(movement, std::fabs(lambda * d));
            }
        }
        rec.movement = movement;
        window.push_back(C);
        if (window.size() > 64) window.pop_front();
        trace.push_back(rec);
        if (flip) last_flip = it;
        if (st.adaptive_damping) {
            if (flip) {
                lambda = std::max(0.5 * lambda, 1e-6);
                since_flip = 0;
            } else if (++since_flip >= 5) {
                lambda = std::min(1.5 * lambda, st.damping);
                since_flip = 0;
            }
        }
        // Persistent oscillation at the damping floor: the dynamics cycle.
        if (lambda <= 1e-3 && flip) {
            if (small_step_since < 0) small_step_since = it;
            if (it - small_step_since >= 200) {
                // Last chance: Newton from the current iterate, the average of the recent
                // iterates, and the best profile seen so far.
                if (st.newton_polish) {
                    std::vector<Profile> starts{build(C), best.profile};
                    if (!window.empty()) {
                        std::vector<std::vector<double>> avg = window.front();
                        for (std::size_t q = 1; q < window.size(); ++q)
                            for (std::size_t i = 0; i < n; ++i)
                                for (std::size_t a = 0; a < avg[i].size(); ++a) avg[i][a] += window[q][i][a];
                        for (auto& c : avg)
                            for (double& x : c) x /= static_cast<double>(window.size());
                        starts.push_back(build(avg));
                    }
                    for (const Profile& start : starts)
                        if (auto polished = newton_polish(lattices, boxes, factory, start, st, st.max_newton_vars)) {
                            std::vector<double> pp;
                            EquilibriumResult r;
                            r.profile = *polished;
                            r.residual = profile_residual(lattices, boxes, factory, *polished, st, &pp);
                            r.player_residuals = pp;
                            r.converged = true;
                            r.status = "converged";
                            IterationRecord nrec;
                            nrec.iteration = it;
                            std::vector<std::vector<double>> Cn(n);
                            for (std::size_t i = 0; i < n; ++i)
                                Cn[i] = strategy_cutoffs((*polished)[i], lattices[i], boxes[i]);
                            nrec.cutoffs = flatten(Cn);
                            nrec.residual = r.residual;
                            nrec.damping = lambda;
                            nrec.step = "newton";
                            trace.push_back(nrec);
                            return finish(r, it + 1);
                        }
                }
                EquilibriumResult r = best;
                r.status = "cycling";
                r.witness = "cutoffs keep oscillating with damping " + std::to_string(lambda) +
                            "; best residual " + std::to_string(best.residual);
                return finish(r, it + 1);
            }
        }
        if (movement <= st.tol && !(st.newton_polish && it - last_newton >= newton_wait)) {
            EquilibriumResult r = best;
            r.status = "stalled";
            r.witness = "cutoffs stationary while the best-response residual stays at " + std::to_string(residual);
            return finish(r, it + 1);
        }
    }
    EquilibriumResult r = best;
    r.status = st.max_iterations - last_flip < 50 ? "cycling" : "max-iterations";
    return finish(r, st.max_iterations);
}

// ---------------------------------------------------------------------------
// Finite games

namespace {

void require_finite(const BayesGame& game) {
    game.validate();
    for (int i = 0; i < game.n; ++i)
        if (game.actions[i].mode != ActionMode::FiniteLattice)
            throw SolverError("finite action spaces are required (discretize intervals or use the auction path)");
}

std::vector<FiniteLattice> lattices_of(const BayesGame& game) {
    std::vector<FiniteLattice> out;
    for (int i = 0; i < game.n; ++i) out.push_back(game.lattice(i));
    return out;
}

Profile initial_profile(const BayesGame& game, InitKind init, const Profile* custom) {
    switch (init) {
        case InitKind::ExtremalLow: return extremal_profile(game, false);
        case InitKind::ExtremalHigh: return extremal_profile(game, true);
        case InitKind::Custom:
            if (!custom) throw SolverError("custom initialization requires a profile");
            if (static_cast<int>(custom->size()) != game.n) throw SolverError("custom profile size mismatch");
            return *custom;
    }
    throw SolverError("unknown initialization");
}

double cutoff_distance(const BayesGame& game, const Profile& a, const Profile& b) {
    double d = 0.0;
    for (int i = 0; i < game.n; ++i) {
        const auto ca = strategy_cutoffs(a[i], game.lattice(i), game.types[i]);
        const auto cb = strategy_cutoffs(b[i], game.lattice(i), game.types[i]);
        for (std::size_t k = 0; k < ca.size(); ++k) d = std::max(d, std::fabs(ca[k] - cb[k]));
    }
    return d;
}

}  // namespace

EquilibriumResult find_monotone_equilibrium(const BayesGame& game, const SolveSettings& settings, InitKind init,
                                            const Profile* custom) {
    require_finite(game);
    return solve_cutoff_dynamics(lattices_of(game), game.types, base_evaluators(game, settings.integration),
                                 initial_profile(game, init, custom), settings);
}

EquilibriumResult find_perturbed_equilibrium(const BayesGame& game, int m, const SolveSettings& settings,
                                             InitKind init, const Profile* custom) {
    require_finite(game);
    PerturbationScheme scheme;
    scheme.m = m;
    scheme.weights = settings.tremble_weights;
    return solve_cutoff_dynamics(lattices_of(game), game.types, perturbed_evaluators(game, scheme, settings.integration),
                                 initial_profile(game, init, custom), settings);
}

PerfectResult find_perfect_monotone_equilibrium(const BayesGame& game, const SolveSettings& settings,
                                                bool track_high) {
    require_finite(game);
    settings.validate();
    PerfectResult out;
    double step = 0.0;
    for (int i = 0; i < game.n; ++i) step = std::max(step, settings.grid_step(game.types[i].width()));
    const double threshold = settings.limit_factor * step;
    int stable = 0;
    for (int m : settings.m_schedule) {
        PerfectLevel lvl;
        lvl.m = m;
        lvl.low = find_perturbed_equilibrium(game, m, settings, InitKind::ExtremalLow);
        if (track_high) lvl.high = find_perturbed_equilibrium(game, m, settings, InitKind::ExtremalHigh);
        if (!lvl.low.converged) {
            out.levels.push_back(lvl);
            out.equilibrium = lvl.low;
            out.status = "non-convergence";
            std::ostringstream os;
            os << "perturbed game at m = " << m << " not solved (" << lvl.low.status << ")";
            if (lvl.low.witness) os << ": " << *lvl.low.witness;
            out.note = os.str();
            return out;
        }
        if (!out.levels.empty()) {
            lvl.cutoff_change = cutoff_distance(game, lvl.low.profile, out.levels.back().low.profile);
            stable = lvl.cutoff_change <= threshold ? stable + 1 : 0;
        }
        out.levels.push_back(lvl);
    }
    out.limit_detected = stable >= settings.limit_levels;
    Profile limit;
    for (const auto& s : out.levels.back().low.profile) limit.push_back(s.merged());
    out.equilibrium.profile = limit;
    out.equilibrium.residual = profile_residual(lattices_of(game), game.types,
                                                base_evaluators(game, settings.integration), limit, settings,
                                                &out.equilibrium.player_residuals);
    out.equilibrium.iterations = out.levels.back().low.iterations;
    out.equilibrium.trace = out.levels.back().low.trace;
    std::ostringstream note;
    if (track_high && out.levels.back().high) {
        const auto& hi = *out.levels.back().high;
        if (!hi.converged) note << "extremal-high solve at the final level did not converge (" << hi.status << "); ";
        else if (cutoff_distance(game, hi.profile, limit) > threshold)
            note << "extremal-high and extremal-low limits differ by "
                 << cutoff_distance(game, hi.profile, limit) << "; ";
    }
    if (!out.limit_detected) {
        out.status = "no-limit";
        note << "cutoffs did not stabilise within " << threshold << " over " << settings.limit_levels << " levels";
        out.note = note.str();
        out.equilibrium.status = out.status;
        return out;
    }
    std::vector<SequenceLevel> seq;
    for (const auto& lvl : out.levels) {
        PerturbationScheme scheme;
        scheme.m = lvl.m;
        scheme.weights = settings.tremble_weights;
        seq.emplace_back(lvl.m, embed_profile(game, lvl.low.profile, scheme));
    }
    PerfectionSettings ps;
    ps.grid_step = step;
    ps.integration = settings.integration;
    out.certificate = check_perfection(game, limit, seq, ps);
    out.converged = out.certificate->certified;
    out.status = out.converged ? "converged" : "not-certified";
    note << "limit detected by cutoff stabilisation (change <= " << threshold << " for " << settings.limit_levels
         << " consecutive levels); " << out.certificate->verdict;
    out.note = note.str();
    out.equilibrium.converged = out.converged;
    out.equilibrium.status = out.status;
    return out;
}

// ---------------------------------------------------------------------------
// Auctions

std::vector<double> offset_bid_grid(double bbar, int log2_step, double offset, double quit) {
    if (!(bbar > 0)) throw SolverError("bid bound must be positive");
    if (log2_step < 0 || log2_step > 24) throw SolverError("bid grid exponent out of range");
    const double h = std::ldexp(bbar, -log2_step);
    if (offset < 0 || offset >= h) throw SolverError("bid grid offset must lie in [0, step)");
    if (!(quit < 0)) throw SolverError("the quit action must lie below zero");
    std::vector<double> g{quit};
    for (long j = 0;; ++j) {
        const double b = static_cast<double>(j) * h + offset;
        if (b > bbar * (1.0 + 1e-15)) break;
        g.push_back(std::min(b, bbar));
    }
    return g;
}

std::vector<BidStrategy> bid_strategies(const Profile& p, const std::vector<std::vector<double>>& grids) {
    if (p.size() != grids.size()) throw SolverError("one bid grid per player is required");
    std::vector<BidStrategy> out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        BidStrategy b;
        b.cuts = p[i].cuts;
        for (int a : p[i].actions) b.bids.push_back(grids[i].at(static_cast<std::size_t>(a)));
        out.push_back(b);
    }
    return out;
}

namespace {

struct BidDistribution {
    std::vector<std::pair<double, double>> atoms;
    double uniform_weight = 0.0;
    double uniform_lo = 0.0;
    double uniform_hi = 0.0;
};

std::vector<double> cell_masses(const Marginal& mg, const std::vector<double>& cuts) {
    std::vector<double> out;
    if (mg.uniform()) {
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) out.push_back((cuts[k + 1] - cuts[k]) / (mg.hi - mg.lo));
        return out;
    }
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        out.push_back(gauss_integrate([&](double t) { return mg.density(t); }, cuts[k], cuts[k + 1], 32));
        total += out.back();
    }
    for (double& x : out) x /= total;
    return out;
}

// Bid distribution of a bid strategy; m = 0 means no tremble.
BidDistribution bid_distribution(const GeneralizedAuction& a, int j, const BidStrategy& s, const Marginal& mg, int m) {
    BidDistribution d;
    const double keep = m > 0 ? 1.0 - 1.0 / m : 1.0;
    const std::vector<double> mass = cell_masses(mg, s.cuts);
    std::map<double, double> acc;
    for (std::size_t k = 0; k < s.bids.size(); ++k) acc[s.bids[k]] += keep * mass[k];
    if (m > 0) {
        acc[a.quit] += 0.5 / m;
        d.uniform_weight = 0.5 / m;
        d.uniform_lo = 0.0;
        d.uniform_hi = a.bbar[static_cast<std::size_t>(j)];
    }
    for (const auto& [b, p] : acc) d.atoms.emplace_back(b, p);
    return d;
}

// E[D(b) * share * 1{i wins}] against independent opponent bid distributions.
double expected_win_weight(const GeneralizedAuction& a, int i, double b, const std::vector<BidDistribution>& d) {
    if (a.is_quit(b)) return 0.0;
    std::vector<double> bids(static_cast<std::size_t>(a.n), 0.0);
    bids[static_cast<std::size_t>(i)] = b;
    std::function<double(int)> rec = [&](int j) -> double {
        if (j == a.n) return win_weight(a, i, bids);
        if (j == i) return rec(j + 1);
        const BidDistribution& dj = d[static_cast<std::size_t>(j)];
        double s = 0.0;
        for (const auto& [x, p] : dj.atoms) {
            if (p <= 0 || (!a.is_quit(x) && x > b + a.tie_tol)) continue;
            bids[static_cast<std::size_t>(j)] = x;
            s += p * rec(j + 1);
        }
        if (dj.uniform_weight > 0) {
            const double top = std::min(b, dj.uniform_hi);
            if (top > dj.uniform_lo)
                s += dj.uniform_weight / (dj.uniform_hi - dj.uniform_lo) *
                     gauss_integrate(
                         [&](double x) {
                             bids[static_cast<std::size_t>(j)] = x;
                             return rec(j + 1);
                         },
                         dj.uniform_lo, top, 16);
        }
        return s;
    };
    return rec(0);
}

bool fast_path(const GeneralizedAuction& a) { return a.private_values && a.value_density().independent(); }

// Values of every grid bid for player i at value v, scaled by the own-tremble factor.
std::vector<double> grid_values(const GeneralizedAuction& a, int i, double v, const std::vector<double>& grid,
                                const std::vector<double>& ew, double keep, const std::vector<double>& vref) {
    std::vector<double> vv = vref;
    vv[static_cast<std::size_t>(i)] = v;
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double b = grid[k];
        if (a.is_quit(b)) continue;
        out[k] = keep * ((a.W(i, b, vv) - a.C(i, b)) * ew[k] - a.Phi(i, b));
    }
    return out;
}

struct AuctionContext {
    GeneralizedAuction auction;
    std::vector<std::vector<double>> grids;
    std::vector<TypeSpace> boxes;
    std::vector<Marginal> marginals;
    std::vector<double> vref;
};

EvaluatorFactory auction_factory(std::shared_ptr<const AuctionContext> ctx, int m) {
    const bool fast = fast_path(ctx->auction);
    return [ctx, m, fast](int i, const Profile& p) -> ValueEvaluator {
        const GeneralizedAuction& a = ctx->auction;
        const std::vector<BidStrategy> bs = bid_strategies(p, ctx->grids);
        const double keep = 1.0 - 1.0 / m;
        if (fast) {
            std::vector<BidDistribution> d(static_cast<std::size_t>(a.n));
            for (int j = 0; j < a.n; ++j)
                if (j != i) d[static_cast<std::size_t>(j)] = bid_distribution(a, j, bs[static_cast<std::size_t>(j)],
                                                                              ctx->marginals[static_cast<std::size_t>(j)], m);
            auto ew = std::make_shared<std::vector<double>>();
            for (double b : ctx->grids[static_cast<std::size_t>(i)]) ew->push_back(expected_win_weight(a, i, b, d));
            return [ctx, i, ew, keep](double v) {
                return grid_values(ctx->auction, i, v, ctx->grids[static_cast<std::size_t>(i)], *ew, keep, ctx->vref);
            };
        }
        auto others = std::make_shared<const std::vector<BidStrategy>>(bs);
        return [ctx, i, m, others](double v) {
            std::vector<double> out;
            for (double b : ctx->grids[static_cast<std::size_t>(i)])
                out.push_back(auction_interim_expansion(ctx->auction, m, i, b, v, *others).value);
            return out;
        };
    };
}

std::shared_ptr<AuctionContext> make_context(const GeneralizedAuction& auction,
                                             const std::vector<std::vector<double>>& grids) {
    auto ctx = std::make_shared<AuctionContext>();
    ctx->auction = auction;
    ctx->grids = grids;
    ctx->boxes = auction.value_boxes();
    const JointDensity vd = auction.value_density();
    for (int j = 0; j < auction.n; ++j) {
        ctx->vref.push_back(ctx->boxes[static_cast<std::size_t>(j)].lo);
        if (vd.independent()) ctx->marginals.push_back(vd.marginal(static_cast<std::size_t>(j)));
    }
    return ctx;
}

// Probability that at least two players share the highest key above Q.
double top_coincidence(const GeneralizedAuction& a, const std::vector<BidStrategy>& bids,
                       const std::function<long long(double)>& key) {
    const JointDensity vd = a.value_density();
    std::vector<std::map<long long, double>> dist(static_cast<std::size_t>(a.n));
    std::set<long long> keys;
    for (int j = 0; j < a.n; ++j) {
        const auto mass = cell_masses(vd.marginal(static_cast<std::size_t>(j)), bids[static_cast<std::size_t>(j)].cuts);
        for (std::size_t k = 0; k < mass.size(); ++k) {
            const double b = bids[static_cast<std::size_t>(j)].bids[k];
            if (a.is_quit(b)) continue;
            dist[static_cast<std::size_t>(j)][key(b)] += mass[k];
            keys.insert(key(b));
        }
    }
    double total = 0.0;
    std::vector<double> below(static_cast<std::size_t>(a.n));
    for (int j = 0; j < a.n; ++j) {
        double nq = 0.0;
        for (const auto& kv : dist[static_cast<std::size_t>(j)]) nq += kv.second;
        below[static_cast<std::size_t>(j)] = 1.0 - nq;  // quit mass lies below every key
    }
    for (long long x : keys) {
        double all_le = 1.0, all_lt = 1.0, one_eq = 0.0;
        std::vector<double> eq(static_cast<std::size_t>(a.n));
        for (int j = 0; j < a.n; ++j) {
            auto it = dist[static_cast<std::size_t>(j)].find(x);
            eq[static_cast<std::size_t>(j)] = it == dist[static_cast<std::size_t>(j)].end() ? 0.0 : it->second;
            all_le *= below[static_cast<std::size_t>(j)] + eq[static_cast<std::size_t>(j)];
            all_lt *= below[static_cast<std::size_t>(j)];
        }
        for (int j = 0; j < a.n; ++j) {
            double prod = eq[static_cast<std::size_t>(j)];
            for (int k = 0; k < a.n; ++k)
                if (k != j) prod *= below[static_cast<std::size_t>(k)];
            one_eq += prod;
        }
        total += std::max(0.0, all_le - all_lt - one_eq);
        for (int j = 0; j < a.n; ++j) below[static_cast<std::size_t>(j)] += eq[static_cast<std::size_t>(j)];
    }
    return total;
}

double bid_function_distance(const std::vector<BidStrategy>& x, const std::vector<BidStrategy>& y,
                             const std::vector<TypeSpace>& boxes) {
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (int k = 0; k < 512; ++k) {
            const double v = boxes[i].lo + boxes[i].width() * (2.0 * k + 1.0) / 1024.0;
            // Quit (Q < 0) and bid 0 never win and cost nothing; both count as 0.
            d = std::max(d, std::fabs(std::max(0.0, x[i].bid_at(v)) - std::max(0.0, y[i].bid_at(v))));
        }
    return d;
}

Profile map_profile(const Profile& p, const std::vector<std::vector<double>>& from,
                    const std::vector<std::vector<double>>& to) {
    Profile out = p;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (int& a : out[i].actions) {
            const double b = from[i][static_cast<std::size_t>(a)];
            std::size_t best = 0;
            for (std::size_t k = 0; k < to[i].size(); ++k)
                if (std::fabs(to[i][k] - b) < std::fabs(to[i][best] - b)) best = k;
            a = static_cast<int>(best);
        }
    for (auto& s : out) s = s.merged();
    return out;
}

// Coarse-to-fine warm start: map to the nearest bids, then split every cell whose upper
// neighbour skips grid bids into equal pieces carrying the skipped bids, so the start uses the
// full fine-grid support.
Profile refine_profile(const Profile& p, const std::vector<std::vector<double>>& from,
                       const std::vector<std::vector<double>>& to, double quit) {
    Profile out = map_profile(p, from, to);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const StepStrategy& s = out[i];
        StepStrategy r;
        r.cuts.push_back(s.cuts.front());
        for (std::size_t k = 0; k < s.cells(); ++k) {
            const int a = s.actions[k];
            const int skip = k + 1 < s.cells() && to[i][static_cast<std::size_t>(a)] != quit ? s.actions[k + 1] - a : 1;
            const double lo = s.cuts[k], w = (s.cuts[k + 1] - lo) / std::max(skip, 1);
            for (int q = 0; q < std::max(skip, 1); ++q) {
                r.actions.push_back(a + q);
                r.cuts.push_back(q + 1 == std::max(skip, 1) ? s.cuts[k + 1] : lo + (q + 1) * w);
            }
        }
        out[i] = r;
    }
    return out;
}

}  // namespace

double auction_tie_probability(const GeneralizedAuction& a, const std::vector<BidStrategy>& bids) {
    if (!a.value_density().independent()) return simulate(a, bids, 20000, 7).tie_frequency;
    const double unit = std::max(a.tie_tol, 1e-15);
    return top_coincidence(a, bids, [unit](double b) { return std::llround(b / unit); });
}

double auction_pooling_mass(const GeneralizedAuction& a, const std::vector<BidStrategy>& bids, double bin) {
    if (!(bin > 0)) throw SolverError("pooling bin must be positive");
    if (!a.value_density().independent()) return std::numeric_limits<double>::quiet_NaN();
    return top_coincidence(a, bids, [bin](double b) { return static_cast<long long>(std::floor(b / bin + 1e-9)); });
}

EquilibriumResult solve_auction_level(const GeneralizedAuction& auction, int m,
                                      const std::vector<std::vector<double>>& grids, const SolveSettings& settings,
                                      const Profile* warm) {
    auction.validate();
    if (m < 2) throw SolverError("perturbation level must be at least 2");
    if (static_cast<int>(grids.size()) != auction.n) throw SolverError("one bid grid per player is required");
    auto ctx = make_context(auction, grids);
    std::vector<FiniteLattice> lattices;
    for (const auto& g : grids) lattices.push_back(FiniteLattice::chain(g));
    Profile init;
    if (warm) {
        if (static_cast<int>(warm->size()) != auction.n) throw SolverError("warm profile size mismatch");
        init = *warm;
    } else {
        for (int i = 0; i < auction.n; ++i)
            init.push_back(StepStrategy::constant(ctx->boxes[static_cast<std::size_t>(i)].lo,
                                                  ctx->boxes[static_cast<std::size_t>(i)].hi, 0));
    }
    SolveSettings st = settings;
    st.max_newton_vars = settings.auction_newton_vars;
    return solve_cutoff_dynamics(lattices, ctx->boxes, auction_factory(ctx, m), init, st);
}

namespace {

PerfectionCertificate auction_certificate(const GeneralizedAuction& a, const std::vector<std::vector<double>>& grids,
                                          const Profile& limit, const std::vector<std::pair<int, Profile>>& seq,
                                          const SolveSettings& settings) {
    auto ctx = make_context(a, grids);
    PerfectionSettings ps;
    PerfectionCertificate cert;
    std::vector<TypeSample> samples;
    for (int i = 0; i < a.n; ++i) {
        const TypeSpace& box = ctx->boxes[static_cast<std::size_t>(i)];
        samples.push_back(make_type_sample(box, limit[static_cast<std::size_t>(i)].breakpoints(),
                                           settings.grid_step(box.width()), ps.base_points));
    }
    cert.sample = samples.front().description + " (final bid grid)";
    for (const auto& [m, prof] : seq) {
        PerfectionLevel rec;
        rec.level = m;
        const EvaluatorFactory factory = auction_factory(ctx, m);
        const std::vector<BidStrategy> bs = bid_strategies(prof, grids);
        for (int i = 0; i < a.n; ++i) {
            const auto& grid = grids[static_cast<std::size_t>(i)];
            const ValueEvaluator f = factory(i, prof);
            const auto bps = limit[static_cast<std::size_t>(i)].breakpoints();
            for (double v : samples[static_cast<std::size_t>(i)].points) {
                const double target = grid[static_cast<std::size_t>(limit[static_cast<std::size_t>(i)].eval(v))];
                const BidMixture mix =
                    perturb_action_auction(bs[static_cast<std::size_t>(i)].bid_at(v), m, a.bbar[static_cast<std::size_t>(i)], a.quit);
                const double rho = prohorov_to_dirac(Measure::from_bid_mixture(mix), {target});
                const BestResponseSet br = best_response_from_values(f(v), ps.payoff_tol);
                double d = std::numeric_limits<double>::infinity();
                for (int b : br.actions) d = std::min(d, std::fabs(grid[static_cast<std::size_t>(b)] - target));
                record_type(rec, i, v, rho, d, bps, ctx->boxes[static_cast<std::size_t>(i)].lo,
                            ctx->boxes[static_cast<std::size_t>(i)].hi, ps);
            }
        }
        cert.levels.push_back(rec);
    }
    finalize_certificate(cert, ps);
    return cert;
}

}  // namespace

AuctionSolveResult solve_generalized_auction(const GeneralizedAuction& auction, const SolveSettings& settings) {
    auction.validate();
    settings.validate();
    if (auction.n > 4) throw SolverError("generalized auctions are supported for at most four bidders");
    const AuctionAssumptionReport a3 = validate_auction_assumptions(auction);
    if (!a3.holds()) {
        std::ostringstream os;
        os << "auction violates the generalized-auction assumptions:";
        for (const auto& it : a3.items)
            if (!it.holds) os << " item " << it.item << " (" << it.witness << ")";
        throw SolverError(os.str());
    }
    const int n = auction.n;
    const std::vector<TypeSpace> boxes = auction.value_boxes();
    std::vector<std::vector<std::vector<double>>> schedule;
    std::vector<double> steps;
    if (!settings.fixed_bid_grids.empty()) {
        if (static_cast<int>(settings.fixed_bid_grids.size()) != n) throw SolverError("one fixed bid grid per player is required");
        schedule.push_back(settings.fixed_bid_grids);
        double h = std::numeric_limits<double>::infinity();
        for (const auto& g : settings.fixed_bid_grids)
            for (std::size_t k = 1; k < g.size(); ++k) h = std::min(h, g[k] - g[k - 1]);
        steps.push_back(h);
    } else {
        if (settings.bid_grid_log2.empty()) throw SolverError("the bid-grid schedule must not be empty");
        double hmin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i)
            hmin = std::min(hmin, std::ldexp(auction.bbar[static_cast<std::size_t>(i)], -settings.bid_grid_log2.back()));
        const double eps = hmin / (2.0 * n);
        for (int k : settings.bid_grid_log2) {
            std::vector<std::vector<double>> grids;
            double h = std::numeric_limits<double>::infinity();
            for (int i = 0; i < n; ++i) {
                grids.push_back(offset_bid_grid(auction.bbar[static_cast<std::size_t>(i)], k, i * eps, auction.quit));
                h = std::min(h, std::ldexp(auction.bbar[static_cast<std::size_t>(i)], -k));
            }
            schedule.push_back(grids);
            steps.push_back(h);
        }
    }
    AuctionSolveResult out;
    std::vector<std::optional<Profile>> previous_m(schedule.size());
    std::vector<std::pair<int, Profile>> final_grid_sequence;
    std::optional<std::vector<BidStrategy>> previous_final;
    bool all_converged = true, inner_ok = true, ties_ok = true;
    int outer_stable = 0;
    std::ostringstream problems;
    for (int m : settings.m_schedule) {
        std::optional<Profile> prev_k;
        std::optional<std::vector<BidStrategy>> prev_bids;
        std::vector<double> inner_changes;
        double prev_tie = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < schedule.size(); ++k) {
            // Start candidates in order: the previous grid at this m mapped to the nearest bids, the
            // same grid at the previous m, the previous grid with skipped bids filled in, and a cold
            // start.  Only converged levels seed warm starts, since the profile of a cycling level
            // sits on the cycle and tends to pull the next level onto it.
            std::vector<std::optional<Profile>> starts;
            if (prev_k) starts.emplace_back(map_profile(*prev_k, schedule[k - 1], schedule[k]));
            if (previous_m[k]) starts.emplace_back(*previous_m[k]);
            if (prev_k) starts.emplace_back(refine_profile(*prev_k, schedule[k - 1], schedule[k], auction.quit));
            starts.emplace_back(std::nullopt);
            EquilibriumResult res;
            for (std::size_t s = 0; s < starts.size(); ++s) {
                EquilibriumResult attempt =
                    solve_auction_level(auction, m, schedule[k], settings, starts[s] ? &*starts[s] : nullptr);
                if (s == 0 || attempt.converged || attempt.residual < res.residual) res = std::move(attempt);
                if (res.converged) break;
            }
            AuctionLevel lvl;
            lvl.m = m;
            lvl.grid_log2 = settings.fixed_bid_grids.empty() ? settings.bid_grid_log2[k] : -1;
            lvl.converged = res.converged;
            lvl.residual = res.residual;
            lvl.iterations = res.iterations;
            const std::vector<BidStrategy> bids = bid_strategies(res.profile, schedule[k]);
            lvl.tie_probability = auction_tie_probability(auction, bids);
            lvl.pooling_mass = auction_pooling_mass(auction, bids, steps[k]);
            if (prev_bids) {
                lvl.cutoff_change = bid_function_distance(bids, *prev_bids, boxes);
                inner_changes.push_back(lvl.cutoff_change / steps[k]);
            }
            if (!res.converged) {
                all_converged = false;
                problems << "level (m=" << m << ", step=" << steps[k] << ") " << res.status << "; ";
            }
            if (lvl.tie_probability > prev_tie + 1e-12) ties_ok = false;
            prev_tie = lvl.tie_probability;
            out.levels.push_back(lvl);
            if (res.converged) previous_m[k] = res.profile;
            else previous_m[k].reset();
            if (res.converged) prev_k = res.profile;
            else if (k > 0 && prev_k) prev_k = map_profile(*prev_k, schedule[k - 1], schedule[k]);
            else prev_k.reset();
            prev_bids = bids;
            if (k + 1 == schedule.size()) {
                final_grid_sequence.emplace_back(m, res.profile);
                out.profile = res.profile;
                out.residual = res.residual;
            }
        }
        if (m == settings.m_schedule.back()) {
            const std::size_t need = std::min<std::size_t>(static_cast<std::size_t>(settings.limit_levels), inner_changes.size());
            for (std::size_t q = inner_changes.size() - need; q < inner_changes.size(); ++q)
                if (inner_changes[q] > settings.limit_factor) inner_ok = false;
        }
        if (previous_final) {
            const double change = bid_function_distance(*prev_bids, *previous_final, boxes);
            out.outer_changes.push_back(change);
            outer_stable = change <= settings.limit_factor * steps.back() ? outer_stable + 1 : 0;
        }
        previous_final = prev_bids;
    }
    out.grids = schedule.back();
    out.bids = bid_strategies(out.profile, out.grids);
    const int outer_need = std::min<int>(settings.limit_levels, static_cast<int>(settings.m_schedule.size()) - 1);
    out.limit_detected = inner_ok && outer_stable >= outer_need;
    out.converged = all_converged && out.limit_detected && ties_ok;
    if (!all_converged) out.status = "level-non-convergence: " + problems.str();
    else if (!out.limit_detected) out.status = "no-limit";
    else if (!ties_ok) out.status = "tie-probability-not-vanishing";
    else out.status = "converged";
    if (settings.auction_certificate && fast_path(auction))
        out.certificate = auction_certificate(auction, out.grids, out.profile, final_grid_sequence, settings);
    return out;
}

// ---------------------------------------------------------------------------
// Uniqueness scan

UniquenessVerdict uniqueness_scan(const BayesGame& game, int grid_points, double tol, int type_points) {
    require_finite(game);
    if (grid_points < 1 || type_points < 1) throw SolverError("scan grids must have at least one point");
    const int n = game.n;
    // Per player: candidate strategies from nondecreasing cutoff tuples on the grid.
    std::vector<std::vector<StepStrategy>> cands(static_cast<std::size_t>(n));
    std::vector<std::vector<std::vector<int>>> cand_index(static_cast<std::size_t>(n));
    std::vector<std::vector<std::vector<double>>> cand_cut(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const FiniteLattice& L = game.lattice(i);
        if (!L.is_chain() || L.size() > 3)
            throw SolverError("dimensionality too high: the scan needs chains with at most two free cutoffs per player");
        std::vector<std::size_t> order(L.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return L.less(x, y); });
        const TypeSpace& box = game.types[static_cast<std::size_t>(i)];
        const int free = static_cast<int>(L.size()) - 1;
        std::vector<int> idx(static_cast<std::size_t>(free), 0);
        while (true) {
            bool ordered = true;
            for (int q = 1; q < free; ++q)
                if (idx[q] < idx[q - 1]) ordered = false;
            if (ordered) {
                std::vector<double> c(L.size(), box.lo);
                std::vector<double> cut;
                for (int q = 0; q < free; ++q) {
                    const double x = box.lo + box.width() * idx[q] / grid_points;
                    c[order[static_cast<std::size_t>(q) + 1]] = x;
                    cut.push_back(x);
                }
                cands[static_cast<std::size_t>(i)].push_back(strategy_from_cutoffs(c, L, box));
                cand_index[static_cast<std::size_t>(i)].push_back(idx);
                cand_cut[static_cast<std::size_t>(i)].push_back(cut);
            }
            int q = 0;
            while (q < free && ++idx[q] > grid_points) idx[q++] = 0;
            if (q == free) break;
        }
    }
    std::size_t total = 1;
    for (const auto& c : cands) total *= c.size();
    if (total > 2000000) throw SolverError("dimensionality too high: more than 2e6 cutoff tuples");

    auto decode = [&](std::size_t code) {
        std::vector<std::size_t> d(static_cast<std::size_t>(n));
        for (int i = n - 1; i >= 0; --i) {
            d[static_cast<std::size_t>(i)] = code % cands[static_cast<std::size_t>(i)].size();
            code /= cands[static_cast<std::size_t>(i)].size();
        }
        return d;
    };
    std::vector<double> residual(total, 0.0);
    IntegrationOptions opts;
    opts.estimate_residual = false;
    for (int i = 0; i < n; ++i) {
        const TypeSpace& box = game.types[static_cast<std::size_t>(i)];
        std::vector<double> ts;
        for (int k = 0; k < type_points; ++k) ts.push_back(box.lo + box.width() * (2.0 * k + 1.0) / (2.0 * type_points));
        // Value tables depend only on the opponents' candidates.
        std::map<std::vector<std::size_t>, std::vector<std::vector<double>>> tables;
        for (std::size_t code = 0; code < total; ++code) {
            std::vector<std::size_t> d = decode(code);
            std::vector<std::size_t> others = d;
            others[static_cast<std::size_t>(i)] = 0;
            auto it = tables.find(others);
            if (it == tables.end()) {
                Profile p;
                for (int j = 0; j < n; ++j) p.push_back(cands[static_cast<std::size_t>(j)][others[static_cast<std::size_t>(j)]]);
                const BehavioralProfile beh = to_behavioral(p);
                std::vector<std::vector<double>> tab;
                for (double t : ts) tab.push_back(interim_payoffs(game, i, t, beh, opts));
                it = tables.emplace(others, std::move(tab)).first;
            }
            const StepStrategy& own = cands[static_cast<std::size_t>(i)][d[static_cast<std::size_t>(i)]];
            double g = 0.0;
            for (std::size_t k = 0; k < ts.size(); ++k) g = std::max(g, gap_of(it->second[k], own.eval(ts[k])));
            residual[code] = std::max(residual[code], g);
        }
    }
    UniquenessVerdict out;
    out.min_residual = *std::min_element(residual.begin(), residual.end());
    std::vector<std::vector<int>> minimal_idx;
    for (std::size_t code = 0; code < total; ++code) {
        const auto d = decode(code);
        std::vector<double> tuple;
        std::vector<int> index;
        for (int i = 0; i < n; ++i) {
            const auto& c = cand_cut[static_cast<std::size_t>(i)][d[static_cast<std::size_t>(i)]];
            tuple.insert(tuple.end(), c.begin(), c.end());
            const auto& ix = cand_index[static_cast<std::size_t>(i)][d[static_cast<std::size_t>(i)]];
            index.insert(index.end(), ix.begin(), ix.end());
        }
        std::vector<double> row = tuple;
        row.push_back(residual[code]);
        out.heatmap.push_back(row);
        if (residual[code] < tol) out.near_zero.push_back(tuple);
        if (residual[code] <= out.min_residual + tol) {
            out.minimal.push_back(tuple);
            minimal_idx.push_back(index);
        }
    }
    // Connected components of the minimal set (Chebyshev adjacency on grid indices).
    std::set<std::vector<int>> remaining(minimal_idx.begin(), minimal_idx.end());
    while (!remaining.empty()) {
        ++out.minimal_components;
        std::vector<std::vector<int>> stack{*remaining.begin()};
        remaining.erase(remaining.begin());
        while (!stack.empty()) {
            const std::vector<int> cur = stack.back();
            stack.pop_back();
            const std::size_t D = cur.size();
            std::size_t combos = 1;
            for (std::size_t q = 0; q < D; ++q) combos *= 3;
            for (std::size_t c = 0; c < combos; ++c) {
                std::vector<int> nb = cur;
                std::size_t code = c;
                for (std::size_t q = 0; q < D; ++q) {
                    nb[q] += static_cast<int>(code % 3) - 1;
                    code /= 3;
                }
                auto it = remaining.find(nb);
                if (it != remaining.end()) {
                    stack.push_back(nb);
                    remaining.erase(it);
                }
            }
        }
    }
    return out;
}

}  // namespace monoeq
