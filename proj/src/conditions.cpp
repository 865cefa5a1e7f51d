#include "monoeq/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace monoeq {

std::vector<double> uniform_grid(double lo, double hi, int points) {
    if (points < 1) return {};
    if (points == 1) return {lo};
    std::vector<double> g(points);
    for (int k = 0; k < points; ++k) g[k] = lo + (hi - lo) * k / (points - 1);
    return g;
}

namespace {

std::string grid_label(const std::vector<double>& types) {
    std::ostringstream os;
    if (types.empty()) return "empty type grid";
    os << types.size() << " types in [" << types.front() << ", " << types.back() << "]";
    return os.str();
}

std::vector<double> sorted_copy(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

ConditionReport check_single_crossing(const ActionTypeFn& h, const FiniteLattice& L, const std::vector<double>& types,
                                      double tol) {
    ConditionReport r;
    r.condition = "single-crossing";
    r.tol = tol;
    const auto ys = sorted_copy(types);
    r.grid = grid_label(ys) + ", " + std::to_string(L.size()) + " actions";
    const std::size_t na = L.size();
    std::vector<std::vector<double>> H(na, std::vector<double>(ys.size()));
    for (std::size_t a = 0; a < na; ++a)
        for (std::size_t k = 0; k < ys.size(); ++k) H[a][k] = h(static_cast<int>(a), ys[k]);
    for (std::size_t x = 0; x < na; ++x) {
        for (std::size_t xp = 0; xp < na; ++xp) {
            if (!L.less(x, xp)) continue;
            std::optional<std::size_t> weak_from, strict_from;
            for (std::size_t k = 0; k < ys.size(); ++k) {
                const double d = H[xp][k] - H[x][k];
                ++r.checks;
                if (weak_from && d < -tol) {
                    r.holds = false;
                    const double d0 = H[xp][*weak_from] - H[x][*weak_from];
                    r.witness = ConditionWitness{L.coords(x), L.coords(xp), ys[*weak_from], ys[k], {d0, d},
                                                 "h(x',y)-h(x,y) >= 0 but h(x',y')-h(x,y') < 0", "", {}};
                    return r;
                }
                if (strict_from && d <= tol) {
                    r.holds = false;
                    const double d0 = H[xp][*strict_from] - H[x][*strict_from];
                    r.witness = ConditionWitness{L.coords(x), L.coords(xp), ys[*strict_from], ys[k], {d0, d},
                                                 "h(x',y)-h(x,y) > 0 but h(x',y')-h(x,y') <= 0", "", {}};
                    return r;
                }
                if (!weak_from && d >= -tol) weak_from = k;
                if (!strict_from && d > tol) strict_from = k;
            }
        }
    }
    return r;
}

ConditionReport check_increasing_differences(const ActionTypeFn& h, const FiniteLattice& L,
                                             const std::vector<double>& types, double tol) {
    ConditionReport r;
    r.condition = "increasing-differences";
    r.tol = tol;
    const auto ys = sorted_copy(types);
    r.grid = grid_label(ys) + ", " + std::to_string(L.size()) + " actions";
    const std::size_t na = L.size();
    std::vector<std::vector<double>> H(na, std::vector<double>(ys.size()));
    for (std::size_t a = 0; a < na; ++a)
        for (std::size_t k = 0; k < ys.size(); ++k) H[a][k] = h(static_cast<int>(a), ys[k]);
    for (std::size_t x = 0; x < na; ++x) {
        for (std::size_t xp = 0; xp < na; ++xp) {
            if (!L.less(x, xp)) continue;
            std::size_t arg = 0;
            double run = -INFINITY;
            for (std::size_t k = 0; k < ys.size(); ++k) {
                const double d = H[xp][k] - H[x][k];
                ++r.checks;
                if (k > 0 && d < run - tol) {
                    r.holds = false;
                    r.witness = ConditionWitness{L.coords(x), L.coords(xp), ys[arg], ys[k], {run, d},
                                                 "h(x',y')-h(x,y') < h(x',y)-h(x,y)", "", {}};
                    return r;
                }
                if (d > run) {
                    run = d;
                    arg = k;
                }
            }
        }
    }
    return r;
}

ConditionReport check_supermodular(const LatticeFn& h, const FiniteLattice& L, double tol) {
    ConditionReport r;
    r.condition = "supermodular";
    r.tol = tol;
    r.grid = std::to_string(L.size()) + "-element lattice";
    const std::size_t na = L.size();
    std::vector<double> H(na);
    for (std::size_t a = 0; a < na; ++a) H[a] = h(static_cast<int>(a));
    for (std::size_t x = 0; x < na; ++x)
        for (std::size_t xp = x + 1; xp < na; ++xp) {
            ++r.checks;
            const std::size_t j = L.join(x, xp), m = L.meet(x, xp);
            if (H[j] + H[m] < H[x] + H[xp] - tol) {
                r.holds = false;
                r.witness = ConditionWitness{L.coords(x), L.coords(xp), std::nullopt, std::nullopt,
                                             {H[j], H[m], H[x], H[xp]},
                                             "h(x v x') + h(x ^ x') < h(x) + h(x')", "", {}};
                return r;
            }
        }
    return r;
}

ConditionReport check_quasi_supermodular(const LatticeFn& h, const FiniteLattice& L, double tol) {
    ConditionReport r;
    r.condition = "quasi-supermodular";
    r.tol = tol;
    r.grid = std::to_string(L.size()) + "-element lattice";
    const std::size_t na = L.size();
    std::vector<double> H(na);
    for (std::size_t a = 0; a < na; ++a) H[a] = h(static_cast<int>(a));
    for (std::size_t x = 0; x < na; ++x)
        for (std::size_t xp = 0; xp < na; ++xp) {
            if (x == xp) continue;
            ++r.checks;
            const std::size_t j = L.join(x, xp), m = L.meet(x, xp);
            const double prem = H[xp] - H[m], concl = H[j] - H[x];
            if (prem >= -tol && concl < -tol) {
                r.holds = false;
                r.witness = ConditionWitness{L.coords(x), L.coords(xp), std::nullopt, std::nullopt,
                                             {H[xp], H[m], H[j], H[x]},
                                             "h(x') >= h(x ^ x') but h(x v x') < h(x)", "", {}};
                return r;
            }
            if (prem > tol && concl <= tol) {
                r.holds = false;
                r.witness = ConditionWitness{L.coords(x), L.coords(xp), std::nullopt, std::nullopt,
                                             {H[xp], H[m], H[j], H[x]},
                                             "h(x') > h(x ^ x') but h(x v x') <= h(x)", "", {}};
                return r;
            }
        }
    return r;
}

ConditionReport check_affiliated(const PointDensityFn& f, const std::vector<std::vector<double>>& grid, double tol) {
    ConditionReport r;
    r.condition = "affiliated";
    r.tol = tol;
    const std::size_t dim = grid.size();
    std::ostringstream os;
    os << "product grid";
    for (const auto& g : grid) os << ' ' << g.size();
    r.grid = os.str();
    // Enumerate grid points.
    std::vector<std::vector<double>> pts;
    std::vector<std::size_t> idx(dim, 0);
    if (dim == 0) return r;
    for (const auto& g : grid)
        if (g.empty()) return r;
    while (true) {
        std::vector<double> p(dim);
        for (std::size_t d = 0; d < dim; ++d) p[d] = grid[d][idx[d]];
        pts.push_back(std::move(p));
        std::size_t d = 0;
        while (d < dim && ++idx[d] == grid[d].size()) idx[d++] = 0;
        if (d == dim) break;
    }
    std::vector<double> F(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) F[k] = f(pts[k]);
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            const auto hi = join(pts[a], pts[b]);
            const auto lo = meet(pts[a], pts[b]);
            if (hi == pts[a] || hi == pts[b]) continue;  // comparable: equality
            ++r.checks;
            const double lhs = f(hi) * f(lo), rhs = F[a] * F[b];
            if (lhs < rhs - tol) {
                r.holds = false;
                r.witness = ConditionWitness{pts[a], pts[b], std::nullopt, std::nullopt, {lhs, rhs},
                                             "f(t v t') f(t ^ t') < f(t) f(t')", "", {}};
                return r;
            }
        }
    return r;
}

namespace {

struct ChainStrategy {
    StepStrategy strategy;
    std::vector<double> cutoffs;
    std::string label;
};

// Dyadic rank of x in [lo, hi]: level at which it first appears (endpoints last).
int dyadic_rank(double x, double lo, double hi, int level) {
    if (x == lo || x == hi) return level + 1;
    for (int l = 1; l <= level; ++l) {
        double s = (x - lo) / (hi - lo) * std::ldexp(1.0, l);
        if (std::fabs(s - std::round(s)) < 1e-9) return l;
    }
    return level + 1;
}

std::vector<ChainStrategy> chain_strategies(const FiniteLattice& L, const TypeSpace& box, int level) {
    std::vector<double> pts;
    const int npts = (1 << level) + 1;
    for (int k = 0; k < npts; ++k) pts.push_back(box.lo + box.width() * k / (npts - 1));
    struct Cand {
        int rank;
        std::vector<double> cut;
        StepStrategy s;
    };
    std::vector<Cand> cands;
    std::set<std::pair<std::vector<double>, std::vector<int>>> seen;
    for (const auto& chain : L.maximal_chains()) {
        const std::size_t K = chain.size();
        if (K == 1) {
            StepStrategy s = StepStrategy::constant(box.lo, box.hi, static_cast<int>(chain[0]));
            if (seen.insert({s.cuts, s.actions}).second) cands.push_back({level + 1, {}, s});
            continue;
        }
        std::vector<std::size_t> ix(K - 1, 0);
        while (true) {
            std::vector<double> cut(K - 1);
            int rank = 0;
            for (std::size_t k = 0; k + 1 < K; ++k) {
                cut[k] = pts[ix[k]];
                rank = std::max(rank, dyadic_rank(cut[k], box.lo, box.hi, level));
            }
            StepStrategy s;
            s.cuts.push_back(box.lo);
            for (std::size_t k = 0; k < K; ++k) {
                double a = k == 0 ? box.lo : cut[k - 1];
                double b = k + 1 == K ? box.hi : cut[k];
                if (b > a) {
                    s.actions.push_back(static_cast<int>(chain[k]));
                    s.cuts.push_back(b);
                }
            }
            s = s.merged();
            if (seen.insert({s.cuts, s.actions}).second) cands.push_back({rank, cut, s});
            // Next nondecreasing index tuple.
            std::size_t k = K - 1;
            while (k > 0 && ix[k - 1] + 1 == pts.size()) --k;
            if (k == 0) break;
            ++ix[k - 1];
            for (std::size_t q = k; q + 1 < K; ++q) ix[q] = ix[k - 1];
        }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.rank < b.rank; });
    std::vector<ChainStrategy> out;
    for (auto& c : cands) {
        std::ostringstream os;
        os << "cutoffs(";
        for (std::size_t k = 0; k < c.s.cuts.size(); ++k) os << (k ? "," : "") << c.s.cuts[k];
        os << ") actions(";
        for (std::size_t k = 0; k < c.s.actions.size(); ++k) os << (k ? "," : "") << to_string(L.elements()[c.s.actions[k]]);
        os << ")";
        out.push_back(ChainStrategy{c.s, c.s.breakpoints(), os.str()});
    }
    return out;
}

}  // namespace

OpponentFamily cutoff_family(const BayesGame& game, int player, int max_level, std::size_t cap) {
    const int n = game.n;
    std::vector<std::vector<ChainStrategy>> per(n);
    int used_level = 0;
    for (int level = 1; level <= max_level; ++level) {
        std::vector<std::vector<ChainStrategy>> trial(n);
        std::size_t total = 1;
        for (int j = 0; j < n; ++j) {
            if (j == player) continue;
            trial[j] = chain_strategies(game.lattice(j), game.types[j], level);
            total *= trial[j].size();
        }
        if (level > 1 && total > cap) break;
        per = std::move(trial);
        used_level = level;
        if (total > cap) break;
    }
    OpponentFamily fam;
    std::ostringstream os;
    os << "monotone step strategies along maximal action chains with cutoffs on the dyadic grid of level "
       << used_level;
    std::vector<std::size_t> idx(n, 0);
    while (true) {
        BehavioralProfile prof(n);
        std::string label;
        std::vector<double> cuts;
        for (int j = 0; j < n; ++j) {
            if (j == player) {
                prof[j] = BehavioralStrategy::from_step(StepStrategy::constant(game.types[j].lo, game.types[j].hi, 0));
                continue;
            }
            const auto& cs = per[j][idx[j]];
            prof[j] = BehavioralStrategy::from_step(cs.strategy);
            label += (label.empty() ? "" : "; ") + std::string("player ") + std::to_string(j + 1) + " " + cs.label;
            cuts.insert(cuts.end(), cs.cutoffs.begin(), cs.cutoffs.end());
        }
        fam.profiles.push_back(std::move(prof));
        fam.labels.push_back(label);
        fam.cutoffs.push_back(cuts);
        if (fam.profiles.size() >= cap) break;
        int j = 0;
        while (j < n && (j == player || ++idx[j] == per[j].size())) {
            if (j != player) idx[j] = 0;
            ++j;
        }
        if (j == n) break;
    }
    os << " (" << fam.profiles.size() << " members)";
    fam.description = os.str();
    return fam;
}

OpponentFamily explicit_cutoff_family(const BayesGame& game, int player, const std::vector<double>& cutoffs) {
    OpponentFamily fam;
    const int n = game.n;
    for (double x : cutoffs) {
        BehavioralProfile prof(n);
        std::string label;
        for (int j = 0; j < n; ++j) {
            const auto& box = game.types[j];
            if (j == player) {
                prof[j] = BehavioralStrategy::from_step(StepStrategy::constant(box.lo, box.hi, 0));
                continue;
            }
            const auto& L = game.lattice(j);
            StepStrategy s;
            if (x <= box.lo) s = StepStrategy::constant(box.lo, box.hi, static_cast<int>(L.top()));
            else if (x >= box.hi) s = StepStrategy::constant(box.lo, box.hi, static_cast<int>(L.bottom()));
            else s = StepStrategy{{box.lo, x, box.hi}, {static_cast<int>(L.bottom()), static_cast<int>(L.top())}};
            prof[j] = BehavioralStrategy::from_step(s);
            label += (label.empty() ? "" : "; ") + std::string("player ") + std::to_string(j + 1) + " cutoff " +
                     std::to_string(x);
        }
        fam.profiles.push_back(std::move(prof));
        fam.labels.push_back(label);
        fam.cutoffs.push_back({x});
    }
    fam.description = "explicit bottom/top cutoff strategies (" + std::to_string(cutoffs.size()) + " members)";
    return fam;
}

std::vector<ConditionReport> check_player_conditions(const BayesGame& game, int player, const OpponentFamily& family,
                                                     const std::vector<double>& types_in,
                                                     const std::vector<std::string>& which, double tol) {
    const auto& L = game.lattice(player);
    const auto types = sorted_copy(types_in);
    std::map<std::string, ConditionReport> acc;
    for (const auto& c : which) {
        if (c != "scc" && c != "idc" && c != "supermodular" && c != "quasi-supermodular")
            throw ModelError("unknown condition '" + c + "'");
        ConditionReport r;
        r.condition = c == "scc" ? "single-crossing" : c == "idc" ? "increasing-differences" : c;
        r.tol = tol;
        r.family = family.description;
        r.grid = grid_label(types) + ", " + std::to_string(L.size()) + " actions";
        acc[c] = r;
    }
    IntegrationOptions opts;
    opts.estimate_residual = false;
    for (std::size_t f = 0; f < family.profiles.size(); ++f) {
        std::vector<std::vector<double>> table;
        table.reserve(types.size());
        for (double t : types) table.push_back(interim_payoffs(game, player, t, family.profiles[f], opts));
        auto h = [&](int a, double t) {
            auto it = std::lower_bound(types.begin(), types.end(), t);
            return table[static_cast<std::size_t>(it - types.begin())][a];
        };
        for (auto& [key, rep] : acc) {
            if (!rep.holds) continue;
            ConditionReport sub;
            if (key == "scc") sub = check_single_crossing(h, L, types, tol);
            else if (key == "idc") sub = check_increasing_differences(h, L, types, tol);
            else {
                for (std::size_t k = 0; k < types.size(); ++k) {
                    auto g = [&](int a) { return table[k][a]; };
                    sub = key == "supermodular" ? check_supermodular(g, L, tol) : check_quasi_supermodular(g, L, tol);
                    if (!sub.holds) {
                        sub.witness->y = types[k];
                        break;
                    }
                    rep.checks += sub.checks;
                }
            }
            rep.checks += sub.checks;
            if (!sub.holds) {
                rep.holds = false;
                rep.witness = sub.witness;
                rep.witness->context = family.labels[f];
                rep.witness->opponent_cutoffs = family.cutoffs[f];
            }
        }
    }
    std::vector<ConditionReport> out;
    for (const auto& c : which) out.push_back(acc[c]);
    return out;
}

}  // namespace monoeq
