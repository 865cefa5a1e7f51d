#include "monoeq/perturbation.hpp"

#include "monoeq/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace monoeq {

void PerturbationScheme::validate() const {
    if (m < 2) throw PerturbationError("perturbation level m must be at least 2");
    for (const auto& w : weights) {
        if (w.empty()) continue;
        double s = 0.0;
        for (double x : w) {
            if (x < 0) throw PerturbationError("tremble weights must be nonnegative");
            s += x;
        }
        if (std::fabs(s - 1.0) > 1e-12) throw PerturbationError("tremble weights must sum to one");
    }
}

std::vector<double> PerturbationScheme::weights_for(int player, std::size_t action_count) const {
    if (player >= 0 && static_cast<std::size_t>(player) < weights.size() && !weights[player].empty()) {
        if (weights[player].size() != action_count)
            throw PerturbationError("tremble weight vector size does not match the action set");
        return weights[player];
    }
    return std::vector<double>(action_count, 1.0 / static_cast<double>(action_count));
}

MixedAction perturb_action_finite(int a, std::size_t action_count, int m, const std::vector<double>& weights) {
    if (m < 2) throw PerturbationError("perturbation level m must be at least 2");
    if (a < 0 || static_cast<std::size_t>(a) >= action_count) throw PerturbationError("action outside the action set");
    std::vector<double> w = weights;
    if (w.empty()) w.assign(action_count, 1.0 / static_cast<double>(action_count));
    if (w.size() != action_count) throw PerturbationError("tremble weight vector size does not match the action set");
    const double inv = 1.0 / static_cast<double>(m);
    MixedAction out;
    for (std::size_t k = 0; k < action_count; ++k) {
        double p = w[k] * inv;
        if (static_cast<int>(k) == a) p += 1.0 - inv;
        if (p > 0) out.atoms.emplace_back(static_cast<int>(k), p);
    }
    return out;
}

MixedAction perturb_mixture_finite(const MixedAction& sigma, std::size_t action_count, int m,
                                   const std::vector<double>& weights) {
    std::vector<double> mass(action_count, 0.0);
    for (const auto& [a, p] : sigma.atoms) {
        MixedAction t = perturb_action_finite(a, action_count, m, weights);
        for (const auto& [k, q] : t.atoms) mass[k] += p * q;
    }
    MixedAction out;
    for (std::size_t k = 0; k < action_count; ++k)
        if (mass[k] > 0) out.atoms.emplace_back(static_cast<int>(k), mass[k]);
    return out;
}

double BidMixture::total() const {
    double s = uniform_weight;
    for (const auto& [b, p] : atoms) s += p;
    return s;
}

BidMixture perturb_action_auction(double b, int m, double bbar, double quit) {
    if (m < 2) throw PerturbationError("perturbation level m must be at least 2");
    if (!(bbar > 0)) throw PerturbationError("bid cap must be positive");
    const bool is_quit = b <= quit + 1e-12;
    if (!is_quit && (b < -1e-12 || b > bbar + 1e-12)) throw PerturbationError("bid outside {Q} U [0, bbar]");
    const double inv = 1.0 / static_cast<double>(m);
    BidMixture mix;
    if (is_quit) {
        mix.atoms.emplace_back(quit, 1.0 - inv + 0.5 * inv);
    } else {
        mix.atoms.emplace_back(b, 1.0 - inv);
        mix.atoms.emplace_back(quit, 0.5 * inv);
    }
    mix.uniform_weight = 0.5 * inv;
    mix.uniform_lo = 0.0;
    mix.uniform_hi = bbar;
    return mix;
}

double perturbed_payoff(const PerturbedGame& pg, int i, const std::vector<int>& a, const std::vector<double>& t) {
    if (!pg.game) throw PerturbationError("finite perturbed payoff requires a base game");
    const BayesGame& g = *pg.game;
    pg.scheme.validate();
    if (static_cast<int>(a.size()) != g.n) throw PerturbationError("action profile size mismatch");
    std::vector<MixedAction> mix;
    for (int j = 0; j < g.n; ++j) {
        const std::size_t sz = g.actions[j].size();
        mix.push_back(perturb_action_finite(a[j], sz, pg.scheme.m, pg.scheme.weights_for(j, sz)));
    }
    std::vector<int> k(g.n);
    double total = 0.0;
    std::function<void(int, double)> rec = [&](int j, double w) {
        if (j == g.n) {
            total += w * g.payoff(i, k, t);
            return;
        }
        for (const auto& [b, p] : mix[j].atoms) {
            k[j] = b;
            rec(j + 1, w * p);
        }
    };
    rec(0, 1.0);
    return total;
}

namespace {

// Integrates u_i over the uniform components of the players listed in `uni`
// (nested), with piece boundaries at every bid already determined.
double integrate_uniform(const GeneralizedAuction& a, int i, std::vector<double>& b, std::vector<char>& known,
                         const std::vector<int>& uni, std::size_t idx, const std::vector<double>& v, int order) {
    if (idx == uni.size()) return ex_post_payoff_player(a, i, b, v);
    const int j = uni[idx];
    const double hi = a.bbar[j];
    std::vector<double> pts{0.0, hi};
    for (int k = 0; k < a.n; ++k)
        if (known[k] && !a.is_quit(b[k]) && b[k] > 0.0 && b[k] < hi) pts.push_back(b[k]);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const GaussRule& r = gauss_legendre(order);
    double total = 0.0;
    known[j] = 1;
    for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
        const double h = 0.5 * (pts[p + 1] - pts[p]);
        if (h <= 0) continue;
        const double c = 0.5 * (pts[p + 1] + pts[p]);
        for (std::size_t q = 0; q < r.nodes.size(); ++q) {
            b[j] = c + h * r.nodes[q];
            total += h * r.weights[q] / hi * integrate_uniform(a, i, b, known, uni, idx + 1, v, order);
        }
    }
    known[j] = 0;
    return total;
}

struct VNode {
    double v;
    double w;    // quadrature weight times marginal density (independent case)
    double bid;  // bid of the strategy cell (strategy role only)
};

std::vector<VNode> value_nodes(const GeneralizedAuction& a, const JointDensity& vd, int j, const BidStrategy* s,
                               int order) {
    const ValueScale& sc = a.scales[j];
    const bool one_node = a.private_values && vd.structure() == DensityStructure::IndependentUniform;
    std::vector<VNode> out;
    std::vector<std::pair<std::pair<double, double>, double>> cells;  // ((lo,hi), bid)
    if (s) {
        for (std::size_t k = 0; k < s->bids.size(); ++k) {
            const double lo = std::max(sc.lo, s->cuts[k]), hi = std::min(sc.hi, s->cuts[k + 1]);
            if (hi > lo) cells.push_back({{lo, hi}, s->bids[k]});
        }
    } else {
        cells.push_back({{sc.lo, sc.hi}, 0.0});
    }
    const GaussRule& r = gauss_legendre(one_node ? 1 : order);
    const Marginal* mg = vd.independent() ? &vd.marginal(j) : nullptr;
    for (const auto& [iv, bid] : cells) {
        const double h = 0.5 * (iv.second - iv.first), c = 0.5 * (iv.second + iv.first);
        for (std::size_t q = 0; q < r.nodes.size(); ++q) {
            const double x = c + h * r.nodes[q];
            double w = h * r.weights[q];
            if (mg) w *= mg->density(x);
            out.push_back(VNode{x, w, bid});
        }
    }
    return out;
}

double partition_value(const GeneralizedAuction& a, const JointDensity& vd, int i, double b_i, double v_i,
                       const std::vector<BidStrategy>& others, const std::string& roles, int order) {
    const int n = a.n;
    std::vector<std::vector<VNode>> nodes(n);
    std::vector<int> uni;
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        nodes[j] = value_nodes(a, vd, j, roles[j] == 'S' ? &others[j] : nullptr, order);
        if (roles[j] == 'U') uni.push_back(j);
    }
    std::vector<double> v(n), b(n);
    std::vector<char> known(n, 0);
    v[i] = v_i;
    b[i] = b_i;
    known[i] = 1;
    double num = 0.0, den = 0.0;
    std::function<void(int, double)> rec = [&](int j, double w) {
        if (j == n) {
            double wt = w;
            if (!vd.independent()) wt *= vd(v);
            if (wt == 0.0) return;
            num += wt * integrate_uniform(a, i, b, known, uni, 0, v, order);
            den += wt;
            return;
        }
        if (j == i) {
            rec(j + 1, w);
            return;
        }
        for (const VNode& nd : nodes[j]) {
            v[j] = nd.v;
            if (roles[j] == 'S') {
                b[j] = nd.bid;
                known[j] = 1;
            } else if (roles[j] == 'Q') {
                b[j] = a.quit;
                known[j] = 1;
            } else {
                known[j] = 0;
            }
            rec(j + 1, w * nd.w);
        }
    };
    rec(0, 1.0);
    if (!(den > 0)) throw PerturbationError("opponent values have zero conditional mass");
    return num / den;
}

}  // namespace

double perturbed_auction_payoff(const PerturbedGame& pg, int i, const std::vector<double>& b,
                                const std::vector<double>& v, int order) {
    if (!pg.auction) throw PerturbationError("auction perturbed payoff requires an auction");
    const GeneralizedAuction& a = *pg.auction;
    const int n = a.n;
    const int m = pg.scheme.m;
    if (m < 2) throw PerturbationError("perturbation level m must be at least 2");
    if (static_cast<int>(b.size()) != n || static_cast<int>(v.size()) != n)
        throw PerturbationError("bid/value profile size mismatch");
    std::vector<BidMixture> mix;
    for (int j = 0; j < n; ++j) mix.push_back(perturb_action_auction(b[j], m, a.bbar[j], a.quit));
    // Enumerate atom choices / uniform component per player.
    std::vector<double> bb(n);
    std::vector<char> known(n, 0);
    std::vector<int> uni;
    double total = 0.0;
    std::function<void(int, double)> rec = [&](int j, double w) {
        if (j == n) {
            total += w * integrate_uniform(a, i, bb, known, uni, 0, v, order);
            return;
        }
        for (const auto& [bid, p] : mix[j].atoms) {
            bb[j] = bid;
            known[j] = 1;
            rec(j + 1, w * p);
        }
        known[j] = 0;
        uni.push_back(j);
        rec(j + 1, w * mix[j].uniform_weight);
        uni.pop_back();
    };
    rec(0, 1.0);
    return total;
}

BayesGame make_perturbed_game(const BayesGame& base, const PerturbationScheme& scheme) {
    scheme.validate();
    BayesGame g = base;
    std::ostringstream os;
    os << base.name << " perturbed m=" << scheme.m;
    g.name = os.str();
    PerturbedGame pg{base, std::nullopt, scheme};
    g.payoff = [pg](int i, const std::vector<int>& a, const std::vector<double>& t) {
        return perturbed_payoff(pg, i, a, t);
    };
    return g;
}

BehavioralStrategy embed_behavioral(const BehavioralStrategy& g, std::size_t action_count,
                                    const PerturbationScheme& scheme, int player) {
    if (scheme.mode != PerturbationMode::FiniteDense)
        throw PerturbationError("behavioral embedding is defined for finite action sets");
    scheme.validate();
    const std::vector<double> w = scheme.weights_for(player, action_count);
    BehavioralStrategy out;
    out.cuts = g.cuts;
    for (const auto& c : g.cells) out.cells.push_back(perturb_mixture_finite(c, action_count, scheme.m, w));
    return out;
}

BehavioralStrategy embed_strategy(const StepStrategy& g, std::size_t action_count, const PerturbationScheme& scheme,
                                  int player) {
    return embed_behavioral(BehavioralStrategy::from_step(g), action_count, scheme, player);
}

BehavioralProfile embed_profile(const BayesGame& game, const Profile& profile, const PerturbationScheme& scheme) {
    BehavioralProfile out;
    for (int j = 0; j < game.n; ++j) out.push_back(embed_strategy(profile[j], game.actions[j].size(), scheme, j));
    return out;
}

std::vector<double> perturbed_interim_from_embedded(const BayesGame& game, const PerturbationScheme& scheme, int i,
                                                    double t_i, const BehavioralProfile& embedded_others,
                                                    const IntegrationOptions& opts) {
    const std::vector<double> base = interim_payoffs(game, i, t_i, embedded_others, opts);
    const std::vector<double> w = scheme.weights_for(i, base.size());
    const double inv = 1.0 / static_cast<double>(scheme.m);
    double spread = 0.0;
    for (std::size_t k = 0; k < base.size(); ++k) spread += w[k] * base[k];
    std::vector<double> out(base.size());
    for (std::size_t k = 0; k < base.size(); ++k) out[k] = (1.0 - inv) * base[k] + inv * spread;
    return out;
}

std::vector<double> perturbed_interim_payoffs(const BayesGame& game, const PerturbationScheme& scheme, int i,
                                              double t_i, const BehavioralProfile& others,
                                              const IntegrationOptions& opts) {
    BehavioralProfile emb(game.n);
    for (int j = 0; j < game.n; ++j) {
        if (j == i) {
            emb[j] = others.size() > static_cast<std::size_t>(j) ? others[j] : BehavioralStrategy{};
            continue;
        }
        emb[j] = embed_behavioral(others[j], game.actions[j].size(), scheme, j);
    }
    return perturbed_interim_from_embedded(game, scheme, i, t_i, emb, opts);
}

double auction_tremble_value(const GeneralizedAuction& a, int m, int i, double b_i, double v_i,
                             const std::vector<BidStrategy>& others, std::vector<ExpansionTerm>* terms, int order) {
    if (a.n > 4) throw PerturbationError("the partition expansion supports at most four players");
    if (m < 2) throw PerturbationError("perturbation level m must be at least 2");
    if (static_cast<int>(others.size()) != a.n) throw PerturbationError("one bid strategy per player is required");
    const JointDensity vd = a.value_density();
    const double inv = 1.0 / static_cast<double>(m);
    std::vector<int> opp;
    for (int j = 0; j < a.n; ++j)
        if (j != i) opp.push_back(j);
    const std::size_t combos = static_cast<std::size_t>(std::pow(3, opp.size()) + 0.5);
    double total = 0.0;
    for (std::size_t c = 0; c < combos; ++c) {
        std::string roles(a.n, '-');
        std::size_t code = c;
        int s_count = 0;
        for (int j : opp) {
            const int r = static_cast<int>(code % 3);
            code /= 3;
            roles[j] = r == 0 ? 'S' : (r == 1 ? 'U' : 'Q');
            if (r == 0) ++s_count;
        }
        const int other_count = static_cast<int>(opp.size()) - s_count;
        const double weight = std::pow(1.0 - inv, s_count) * std::pow(0.5 * inv, other_count);
        const double val = partition_value(a, vd, i, b_i, v_i, others, roles, order);
        total += weight * val;
        if (terms) terms->push_back(ExpansionTerm{roles, weight * (1.0 - inv), val});
    }
    return total;
}

AuctionExpansion auction_interim_expansion(const GeneralizedAuction& a, int m, int i, double b_i, double v_i,
                                           const std::vector<BidStrategy>& others, int order) {
    AuctionExpansion out;
    const double inv = 1.0 / static_cast<double>(m);
    out.tremble_value = a.is_quit(b_i) ? 0.0 : auction_tremble_value(a, m, i, b_i, v_i, others, &out.terms, order);
    // Residual: (1/2m)(1/bbar_i) * integral of V_i(bhat; perturbed others) over [0, bbar_i].
    std::vector<double> pts{0.0, a.bbar[i]};
    for (int j = 0; j < a.n; ++j) {
        if (j == i) continue;
        for (double bid : others[j].bids)
            if (bid > 0.0 && bid < a.bbar[i]) pts.push_back(bid);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const GaussRule& r = gauss_legendre(order);
    double integral = 0.0;
    for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
        const double h = 0.5 * (pts[p + 1] - pts[p]), c = 0.5 * (pts[p + 1] + pts[p]);
        if (h <= 0) continue;
        for (std::size_t q = 0; q < r.nodes.size(); ++q)
            integral += h * r.weights[q] * auction_tremble_value(a, m, i, c + h * r.nodes[q], v_i, others, nullptr, order);
    }
    out.residual = 0.5 * inv / a.bbar[i] * integral;
    out.value = (1.0 - inv) * out.tremble_value + out.residual;
    return out;
}

}  // namespace monoeq
