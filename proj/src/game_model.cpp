#include "monoeq/game_model.hpp"

#include "monoeq/quadrature.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace monoeq {

double Marginal::density(double t) const {
    if (t < lo || t > hi) return 0.0;
    if (uniform()) return 1.0 / (hi - lo);
    return pdf(t);
}

JointDensity JointDensity::independent_uniform(const std::vector<TypeSpace>& boxes) {
    JointDensity d;
    d.structure_ = DensityStructure::IndependentUniform;
    d.boxes_ = boxes;
    double b = 1.0;
    for (const auto& box : boxes) {
        if (!(box.lo < box.hi)) throw ModelError("type box must satisfy lo < hi");
        d.marginals_.push_back(Marginal{box.lo, box.hi, {}, 1.0 / (box.hi - box.lo), {}});
        b /= (box.hi - box.lo);
    }
    d.bound_ = b;
    return d;
}

JointDensity JointDensity::independent(std::vector<Marginal> marginals) {
    JointDensity d;
    bool all_uniform = true;
    double b = 1.0;
    for (auto& m : marginals) {
        if (!(m.lo < m.hi)) throw ModelError("marginal support must satisfy lo < hi");
        d.boxes_.push_back(TypeSpace{m.lo, m.hi});
        if (!m.uniform()) {
            all_uniform = false;
            std::vector<double> pts{m.lo, m.hi};
            pts.insert(pts.end(), m.kinks.begin(), m.kinks.end());
            std::sort(pts.begin(), pts.end());
            double mass = 0.0, sup = 0.0;
            for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
                if (pts[k + 1] <= pts[k]) continue;
                mass += gauss_integrate(m.pdf, pts[k], pts[k + 1], 32);
                for (int s = 0; s <= 64; ++s) {
                    double v = m.pdf(pts[k] + (pts[k + 1] - pts[k]) * s / 64.0);
                    if (v < 0) throw ModelError("marginal density is negative");
                    sup = std::max(sup, v);
                }
            }
            if (std::fabs(mass - 1.0) > 1e-6) throw ModelError("marginal density does not integrate to one");
            if (m.bound <= 0) m.bound = sup;
            b *= m.bound;
        } else {
            m.bound = 1.0 / (m.hi - m.lo);
            b *= m.bound;
        }
    }
    d.structure_ = all_uniform ? DensityStructure::IndependentUniform : DensityStructure::IndependentMarginals;
    d.marginals_ = std::move(marginals);
    d.bound_ = b;
    return d;
}

JointDensity JointDensity::general(const std::vector<TypeSpace>& boxes,
                                   std::function<double(const std::vector<double>&)> f, double bound) {
    if (boxes.empty() || boxes.size() > 4) throw ModelError("general densities support 1 to 4 players");
    JointDensity d;
    d.structure_ = DensityStructure::General;
    d.boxes_ = boxes;
    for (const auto& box : boxes) {
        if (!(box.lo < box.hi)) throw ModelError("type box must satisfy lo < hi");
        d.marginals_.push_back(Marginal{box.lo, box.hi, {}, 0.0, {}});
    }
    const int order = boxes.size() <= 3 ? 32 : 16;
    const GaussRule& r = gauss_legendre(order);
    const std::size_t n = boxes.size();
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> t(n);
    double total = 0.0;
    while (true) {
        double w = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            double h = 0.5 * boxes[k].width();
            t[k] = boxes[k].lo + h * (1.0 + r.nodes[idx[k]]);
            w *= h * r.weights[idx[k]];
        }
        double v = f(t);
        if (v < 0) throw ModelError("joint density is negative");
        if (v > bound * (1.0 + 1e-9)) throw ModelError("joint density exceeds its declared bound");
        total += w * v;
        std::size_t k = 0;
        while (k < n && ++idx[k] == static_cast<std::size_t>(order)) idx[k++] = 0;
        if (k == n) break;
    }
    if (!(total > 0)) throw ModelError("joint density has zero mass");
    d.joint_ = std::move(f);
    d.norm_ = total;
    d.bound_ = bound / total;
    return d;
}

double JointDensity::operator()(const std::vector<double>& t) const {
    if (t.size() != boxes_.size()) throw ModelError("type profile dimension mismatch");
    for (std::size_t k = 0; k < t.size(); ++k)
        if (t[k] < boxes_[k].lo || t[k] > boxes_[k].hi) return 0.0;
    if (structure_ == DensityStructure::General) return joint_(t) / norm_;
    double v = 1.0;
    for (std::size_t k = 0; k < t.size(); ++k) v *= marginals_[k].density(t[k]);
    return v;
}

ActionSpace ActionSpace::finite(FiniteLattice L) {
    ActionSpace a;
    a.mode = ActionMode::FiniteLattice;
    a.lattice = std::move(L);
    return a;
}

ActionSpace ActionSpace::chain(const std::vector<double>& values) { return finite(FiniteLattice::chain(values)); }

ActionSpace ActionSpace::interval(double lo, double hi) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw ModelError("invalid action interval");
    ActionSpace a;
    a.mode = ActionMode::Interval;
    a.lo = lo;
    a.hi = hi;
    return a;
}

ActionSpace ActionSpace::interval_with_quit(double quit, double hi) {
    if (!(quit < 0)) throw ModelError("quit action must be strictly below zero");
    ActionSpace a = interval(0.0, hi);
    a.mode = ActionMode::IntervalWithQuit;
    a.quit = quit;
    return a;
}

std::size_t ActionSpace::size() const {
    if (mode != ActionMode::FiniteLattice) throw ModelError("action space is not finite");
    return lattice.size();
}

ActionSpace ActionSpace::discretize(int intervals) const {
    if (mode == ActionMode::FiniteLattice) return *this;
    if (intervals < 1) throw ModelError("grid must have at least one interval");
    std::vector<double> v;
    if (mode == ActionMode::IntervalWithQuit) v.push_back(quit);
    for (int k = 0; k <= intervals; ++k) v.push_back(lo + (hi - lo) * k / intervals);
    return chain(v);
}

void BayesGame::validate() const {
    if (n < 2) throw ModelError("a game needs at least two players");
    if (static_cast<int>(types.size()) != n || static_cast<int>(actions.size()) != n)
        throw ModelError("per-player type/action spaces missing");
    if (static_cast<int>(density.players()) != n) throw ModelError("density dimension does not match players");
    for (int i = 0; i < n; ++i) {
        if (!(types[i].lo < types[i].hi)) throw ModelError("type box must satisfy lo < hi");
        if (std::fabs(density.box(i).lo - types[i].lo) > 1e-12 || std::fabs(density.box(i).hi - types[i].hi) > 1e-12)
            throw ModelError("density support does not match type space");
        if (actions[i].mode != ActionMode::FiniteLattice)
            throw ModelError("game evaluation requires finite action spaces (discretize intervals first)");
        if (actions[i].lattice.size() == 0) throw ModelError("empty action space");
    }
    if (!payoff) throw ModelError("payoff function missing");
    if (!kinks.empty() && static_cast<int>(kinks.size()) != n) throw ModelError("kink lists must be per player");
}

StepStrategy StepStrategy::constant(double lo, double hi, int action) { return StepStrategy{{lo, hi}, {action}}; }

void StepStrategy::validate() const {
    if (actions.empty() || cuts.size() != actions.size() + 1) throw ModelError("malformed step strategy");
    for (std::size_t k = 1; k < cuts.size(); ++k)
        if (!(cuts[k] > cuts[k - 1])) throw ModelError("strategy cuts must be strictly increasing");
}

int StepStrategy::eval(double t) const {
    const double tol = 1e-12 * std::max(1.0, std::fabs(cuts.back()));
    if (t < cuts.front() - tol || t > cuts.back() + tol) throw ModelError("type outside the type space");
    auto it = std::upper_bound(cuts.begin(), cuts.end(), t);
    std::size_t k = static_cast<std::size_t>(it - cuts.begin());
    if (k == 0) k = 1;
    if (k > actions.size()) k = actions.size();
    return actions[k - 1];
}

std::vector<double> StepStrategy::breakpoints() const {
    if (cuts.size() < 3) return {};
    return std::vector<double>(cuts.begin() + 1, cuts.end() - 1);
}

StepStrategy StepStrategy::merged() const {
    StepStrategy out;
    out.cuts.push_back(cuts.front());
    for (std::size_t k = 0; k < actions.size(); ++k) {
        if (!out.actions.empty() && out.actions.back() == actions[k]) {
            out.cuts.back() = cuts[k + 1];
        } else {
            out.actions.push_back(actions[k]);
            out.cuts.push_back(cuts[k + 1]);
        }
    }
    return out;
}

int eval_strategy(const StepStrategy& s, double t) { return s.eval(t); }

bool is_monotone(const StepStrategy& s, const FiniteLattice& L) {
    for (std::size_t k = 1; k < s.actions.size(); ++k)
        if (!L.leq(s.actions[k - 1], s.actions[k])) return false;
    return true;
}

double MixedAction::weight_of(int a) const {
    double w = 0.0;
    for (const auto& [b, p] : atoms)
        if (b == a) w += p;
    return w;
}

void MixedAction::validate(std::size_t action_count) const {
    double s = 0.0;
    for (const auto& [a, p] : atoms) {
        if (a < 0 || static_cast<std::size_t>(a) >= action_count) throw ModelError("mixture atom outside action space");
        if (p < 0) throw ModelError("negative mixture weight");
        s += p;
    }
    if (std::fabs(s - 1.0) > 1e-12) throw ModelError("mixture weights do not sum to one");
}

BehavioralStrategy BehavioralStrategy::from_step(const StepStrategy& s) {
    BehavioralStrategy b;
    b.cuts = s.cuts;
    for (int a : s.actions) b.cells.push_back(MixedAction::pure(a));
    return b;
}

std::size_t BehavioralStrategy::cell_index(double t) const {
    auto it = std::upper_bound(cuts.begin(), cuts.end(), t);
    std::size_t k = static_cast<std::size_t>(it - cuts.begin());
    if (k == 0) k = 1;
    if (k > cells.size()) k = cells.size();
    return k - 1;
}

const MixedAction& BehavioralStrategy::at(double t) const { return cells[cell_index(t)]; }

void BehavioralStrategy::validate(std::size_t action_count) const {
    if (cells.empty() || cuts.size() != cells.size() + 1) throw ModelError("malformed behavioral strategy");
    for (std::size_t k = 1; k < cuts.size(); ++k)
        if (!(cuts[k] > cuts[k - 1])) throw ModelError("strategy cuts must be strictly increasing");
    for (const auto& c : cells) c.validate(action_count);
}

BehavioralProfile to_behavioral(const Profile& p) {
    BehavioralProfile out;
    for (const auto& s : p) out.push_back(BehavioralStrategy::from_step(s));
    return out;
}

namespace {

struct QPoint {
    double t;
    double w;
    const MixedAction* mix;
};

std::vector<QPoint> opponent_points(const BayesGame& game, int j, const BehavioralStrategy& s, int order) {
    const TypeSpace& box = game.types[j];
    std::vector<double> pts = s.cuts;
    if (!game.kinks.empty()) pts.insert(pts.end(), game.kinks[j].begin(), game.kinks[j].end());
    const Marginal& mg = game.density.marginal(j);
    pts.insert(pts.end(), mg.kinks.begin(), mg.kinks.end());
    pts.push_back(box.lo);
    pts.push_back(box.hi);
    std::sort(pts.begin(), pts.end());
    const GaussRule& r = gauss_legendre(order);
    std::vector<QPoint> out;
    const bool indep = game.density.independent();
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        double a = std::max(pts[k], box.lo), b = std::min(pts[k + 1], box.hi);
        if (!(b > a)) continue;
        const MixedAction* mix = &s.at(0.5 * (a + b));
        double h = 0.5 * (b - a), c = 0.5 * (a + b);
        for (std::size_t q = 0; q < r.nodes.size(); ++q) {
            double t = c + h * r.nodes[q];
            double w = h * r.weights[q];
            if (indep) w *= mg.density(t);
            out.push_back(QPoint{t, w, mix});
        }
    }
    return out;
}

std::vector<double> integrate_all(const BayesGame& game, int i, double t_i, const BehavioralProfile& others,
                                  int order) {
    const int n = game.n;
    const std::size_t na = game.actions[i].lattice.size();
    std::vector<std::vector<QPoint>> pts(n);
    for (int j = 0; j < n; ++j)
        if (j != i) pts[j] = opponent_points(game, j, others[j], order);
    std::vector<double> V(na, 0.0);
    std::vector<int> a(n, 0);
    std::vector<double> t(n, 0.0);
    t[i] = t_i;
    const bool indep = game.density.independent();
    double mass = 0.0;
    std::vector<const MixedAction*> mix(n, nullptr);
    auto walk = [&](auto&& self, int j, double w) -> void {
        if (j == n) {
            double ww = w;
            if (!indep) ww *= game.density(t);
            if (ww == 0.0) return;
            mass += ww;
            auto leaf = [&](auto&& leaf_self, int k, double p) -> void {
                if (k == n) {
                    for (std::size_t ai = 0; ai < na; ++ai) {
                        a[i] = static_cast<int>(ai);
                        V[ai] += ww * p * game.payoff(i, a, t);
                    }
                    return;
                }
                if (k == i) {
                    leaf_self(leaf_self, k + 1, p);
                    return;
                }
                for (const auto& [b, pb] : mix[k]->atoms) {
                    if (pb == 0.0) continue;
                    a[k] = b;
                    leaf_self(leaf_self, k + 1, p * pb);
                }
            };
            leaf(leaf, 0, 1.0);
            return;
        }
        if (j == i) {
            self(self, j + 1, w);
            return;
        }
        for (const auto& q : pts[j]) {
            t[j] = q.t;
            mix[j] = q.mix;
            self(self, j + 1, w * q.w);
        }
    };
    walk(walk, 0, 1.0);
    if (!indep) {
        if (!(mass > 0)) throw ModelError("conditional type distribution has zero mass at this type");
        for (double& v : V) v /= mass;
    }
    return V;
}

bool exact_path_available(const BayesGame& game, int i) {
    if (game.opponent_degree < 0) return false;
    if (game.density.structure() == DensityStructure::IndependentUniform) return true;
    if (game.density.structure() == DensityStructure::IndependentMarginals) {
        for (int j = 0; j < game.n; ++j)
            if (j != i && !game.density.marginal(j).uniform()) return false;
        return true;
    }
    return false;
}

void check_inputs(const BayesGame& game, int i, double t_i, const BehavioralProfile& others) {
    if (i < 0 || i >= game.n) throw ModelError("player index out of range");
    if (static_cast<int>(others.size()) != game.n) throw ModelError("profile must list a strategy per player");
    const TypeSpace& box = game.types[i];
    if (t_i < box.lo - 1e-12 || t_i > box.hi + 1e-12) throw ModelError("type outside the type space");
    for (int j = 0; j < game.n; ++j) {
        if (j == i) continue;
        const auto& s = others[j];
        if (s.cells.empty() || s.cuts.size() != s.cells.size() + 1) throw ModelError("malformed opponent strategy");
    }
}

}  // namespace

std::vector<double> interim_payoffs(const BayesGame& game, int i, double t_i, const BehavioralProfile& others,
                                    const IntegrationOptions& opts, std::string* method, double* residual) {
    check_inputs(game, i, t_i, others);
    bool exact = false;
    if (opts.method == IntegrationOptions::Method::Exact) {
        if (!exact_path_available(game, i))
            throw ModelError("exact integration requires polynomial payoffs and uniform opponent densities");
        exact = true;
    } else if (opts.method == IntegrationOptions::Method::Auto) {
        exact = exact_path_available(game, i);
    }
    if (exact) {
        int order = std::max(1, (game.opponent_degree + 2) / 2);
        if (method) *method = "exact";
        if (residual) *residual = 0.0;
        return integrate_all(game, i, t_i, others, order);
    }
    auto V = integrate_all(game, i, t_i, others, opts.order);
    if (method) *method = "quadrature";
    if (residual) {
        *residual = 0.0;
        if (opts.estimate_residual) {
            auto W = integrate_all(game, i, t_i, others, std::max(1, opts.order / 2));
            for (std::size_t k = 0; k < V.size(); ++k) *residual = std::max(*residual, std::fabs(V[k] - W[k]));
        }
    }
    return V;
}

InterimValue interim_payoff(const BayesGame& game, int i, int a_i, double t_i, const BehavioralProfile& others,
                            const IntegrationOptions& opts) {
    if (a_i < 0 || static_cast<std::size_t>(a_i) >= game.actions[i].lattice.size())
        throw ModelError("action outside the action space");
    InterimValue out;
    auto V = interim_payoffs(game, i, t_i, others, opts, &out.method, &out.residual);
    out.value = V[a_i];
    return out;
}

InterimValue interim_payoff_mixed(const BayesGame& game, int i, const MixedAction& sigma, double t_i,
                                  const BehavioralProfile& others, const IntegrationOptions& opts) {
    sigma.validate(game.actions[i].lattice.size());
    InterimValue out;
    auto V = interim_payoffs(game, i, t_i, others, opts, &out.method, &out.residual);
    for (const auto& [a, p] : sigma.atoms) out.value += p * V[a];
    return out;
}

McEstimate mc_interim_oracle(const BayesGame& game, int i, int a_i, double t_i, const BehavioralProfile& others,
                             std::size_t samples, std::uint64_t seed) {
    check_inputs(game, i, t_i, others);
    if (samples == 0) throw ModelError("at least one sample is required");
    std::mt19937_64 rng(seed);
    auto unif = [&] { return unit_from_bits(rng()); };
    const int n = game.n;
    std::vector<double> t(n);
    std::vector<int> a(n);
    t[i] = t_i;
    a[i] = a_i;
    double mean = 0.0, m2 = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        if (game.density.independent()) {
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const Marginal& mg = game.density.marginal(j);
                if (mg.uniform()) {
                    t[j] = mg.lo + (mg.hi - mg.lo) * unif();
                } else {
                    for (int tries = 0;; ++tries) {
                        if (tries > 1000000) throw ModelError("rejection sampler failed");
                        double x = mg.lo + (mg.hi - mg.lo) * unif();
                        if (unif() * mg.bound <= mg.pdf(x)) {
                            t[j] = x;
                            break;
                        }
                    }
                }
            }
        } else {
            const double bound = game.density.bound();
            for (int tries = 0;; ++tries) {
                if (tries > 1000000) throw ModelError("rejection sampler failed on a degenerate conditional");
                for (int j = 0; j < n; ++j)
                    if (j != i) t[j] = game.types[j].lo + game.types[j].width() * unif();
                if (unif() * bound <= game.density(t)) break;
            }
        }
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const MixedAction& mix = others[j].at(t[j]);
            double u = unif(), acc = 0.0;
            a[j] = mix.atoms.back().first;
            for (const auto& [b, p] : mix.atoms) {
                acc += p;
                if (u < acc) {
                    a[j] = b;
                    break;
                }
            }
        }
        double x = game.payoff(i, a, t);
        double delta = x - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (x - mean);
    }
    McEstimate est;
    est.mean = mean;
    est.stderr_ = samples > 1 ? std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples)) : 0.0;
    return est;
}

BestResponseSet best_response_from_values(const std::vector<double>& values, double tol) {
    BestResponseSet br;
    br.values = values;
    br.max_value = -std::numeric_limits<double>::infinity();
    for (double v : values) br.max_value = std::max(br.max_value, v);
    for (std::size_t k = 0; k < values.size(); ++k)
        if (values[k] >= br.max_value - tol) br.actions.push_back(static_cast<int>(k));
    return br;
}

BestResponseSet best_response_set(const BayesGame& game, int i, double t_i, const BehavioralProfile& others,
                                  double tol, const IntegrationOptions& opts) {
    IntegrationOptions o = opts;
    o.estimate_residual = false;
    return best_response_from_values(interim_payoffs(game, i, t_i, others, o), tol);
}

int select_maximal(const FiniteLattice& L, const std::vector<int>& set) {
    if (set.empty()) throw ModelError("empty best-response set");
    std::vector<std::size_t> s(set.begin(), set.end());
    std::size_t j = L.join_of(s);
    if (std::find(set.begin(), set.end(), static_cast<int>(j)) != set.end()) return static_cast<int>(j);
    // Highest-index maximal element.
    for (auto it = set.rbegin(); it != set.rend(); ++it) {
        bool maximal = true;
        for (int b : set)
            if (L.less(static_cast<std::size_t>(*it), static_cast<std::size_t>(b))) maximal = false;
        if (maximal) return *it;
    }
    return set.back();
}

IntervalMaximizer best_response_interval(const std::function<double(double)>& f, double lo, double hi, double tol,
                                         double value_tol, int max_intervals) {
    IntervalMaximizer out;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int nint = 16;; nint *= 2) {
        std::vector<double> vals(nint + 1);
        double best = -std::numeric_limits<double>::infinity();
        for (int k = 0; k <= nint; ++k) {
            vals[k] = f(lo + (hi - lo) * k / nint);
            best = std::max(best, vals[k]);
        }
        out.maximizers.clear();
        for (int k = 0; k <= nint; ++k)
            if (vals[k] >= best - value_tol) out.maximizers.push_back(lo + (hi - lo) * k / nint);
        out.max_value = best;
        out.intervals = nint;
        double top = out.maximizers.back();
        if (!std::isnan(prev) && std::fabs(top - prev) < tol) {
            out.approximate = (hi - lo) / nint > tol;
            break;
        }
        if (nint >= max_intervals) break;
        prev = top;
    }
    // Polish every grid maximizer by Brent's method on its two neighbouring cells; a grid point is
    // kept when the polished point is not better (maxima on the boundary or on flat stretches).
    const double h = (hi - lo) / out.intervals;
    std::vector<std::pair<double, double>> cand;
    for (double x : out.maximizers) {
        const auto r = boost::math::tools::brent_find_minima([&](double y) { return -f(y); }, std::max(lo, x - h),
                                                             std::min(hi, x + h), std::numeric_limits<double>::digits / 2);
        const double fx = f(x);
        cand.emplace_back(-r.second > fx ? r.first : x, std::max(fx, -r.second));
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : cand) best = std::max(best, c.second);
    out.maximizers.clear();
    for (const auto& c : cand)
        if (c.second >= best - value_tol && (out.maximizers.empty() || c.first - out.maximizers.back() > tol))
            out.maximizers.push_back(c.first);
    out.max_value = best;
    out.approximate = false;
    return out;
}

}  // namespace monoeq
