#include "monoeq/verification.hpp"

#include "monoeq/quadrature.hpp"
#include "monoeq/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <sstream>

namespace monoeq {

// ---------------------------------------------------------------------------
// Measures

Measure Measure::from_mixed(const MixedAction& sigma, const FiniteLattice& L) {
    Measure m;
    for (const auto& [a, p] : sigma.atoms) {
        if (a < 0 || static_cast<std::size_t>(a) >= L.size()) throw VerificationError("mixed action outside lattice");
        m.atoms.push_back(Atom{L.coords(a), p});
    }
    return m;
}

Measure Measure::from_bid_mixture(const BidMixture& mix) {
    Measure m;
    for (const auto& [b, p] : mix.atoms) m.atoms.push_back(Atom{{b}, p});
    if (mix.uniform_weight > 0) m.uniforms.push_back(Uniform{mix.uniform_lo, mix.uniform_hi, mix.uniform_weight});
    return m;
}

double Measure::total() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.p;
    for (const auto& u : uniforms) s += u.weight;
    return s;
}

Measure Measure::discretized(int points) const {
    Measure m;
    m.atoms = atoms;
    for (const auto& u : uniforms) {
        const double h = (u.hi - u.lo) / points;
        for (int k = 0; k < points; ++k) m.atoms.push_back(Atom{{u.lo + (k + 0.5) * h}, u.weight / points});
    }
    return m;
}

namespace {

double euclid(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw VerificationError("measure supports have different dimensions");
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
    return std::sqrt(s);
}

// Merges coincident atoms and drops zero masses.
std::vector<Measure::Atom> support(const Measure& m) {
    std::map<std::vector<double>, double> acc;
    for (const auto& a : m.atoms)
        if (a.p > 0) acc[a.x] += a.p;
    std::vector<Measure::Atom> out;
    for (const auto& [x, p] : acc) out.push_back(Measure::Atom{x, p});
    return out;
}

// Dinic max-flow on a bipartite network with double capacities.
class MaxFlow {
public:
    explicit MaxFlow(int n) : g_(n), level_(n), it_(n) {}
    void add_edge(int u, int v, double cap) {
        g_[u].push_back(Edge{v, static_cast<int>(g_[v].size()), cap});
        g_[v].push_back(Edge{u, static_cast<int>(g_[u].size()) - 1, 0.0});
    }
    double run(int s, int t) {
        double flow = 0.0;
        while (bfs(s, t)) {
            std::fill(it_.begin(), it_.end(), 0);
            while (true) {
                const double f = dfs(s, t, std::numeric_limits<double>::infinity());
                if (f <= 1e-18) break;
                flow += f;
            }
        }
        return flow;
    }

private:
    struct Edge {
        int to;
        int rev;
        double cap;
    };
    bool bfs(int s, int t) {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<int> q;
        level_[s] = 0;
        q.push(s);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (const Edge& e : g_[u])
                if (e.cap > 1e-18 && level_[e.to] < 0) {
                    level_[e.to] = level_[u] + 1;
                    q.push(e.to);
                }
        }
        return level_[t] >= 0;
    }
    double dfs(int u, int t, double f) {
        if (u == t) return f;
        for (int& k = it_[u]; k < static_cast<int>(g_[u].size()); ++k) {
            Edge& e = g_[u][k];
            if (e.cap > 1e-18 && level_[e.to] == level_[u] + 1) {
                const double d = dfs(e.to, t, std::min(f, e.cap));
                if (d > 1e-18) {
                    e.cap -= d;
                    g_[e.to][e.rev].cap += d;
                    return d;
                }
            }
        }
        return 0.0;
    }
    std::vector<std::vector<Edge>> g_;
    std::vector<int> level_;
    std::vector<int> it_;
};

// max_B mu(B) - nu(N_k(B)) by subset enumeration (|supp mu|, |supp nu| <= 16).
double gap_subsets(const std::vector<Measure::Atom>& mu, const std::vector<Measure::Atom>& nu,
                   const std::vector<std::vector<double>>& D, double dk) {
    const std::size_t p = mu.size(), q = nu.size();
    std::vector<std::uint32_t> mask(p, 0);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < q; ++j)
            if (D[i][j] <= dk) mask[i] |= (1u << j);
    std::vector<double> nu_mass(std::size_t{1} << q, 0.0);
    for (std::size_t s = 1; s < nu_mass.size(); ++s) {
        const int low = __builtin_ctz(static_cast<unsigned>(s));
        nu_mass[s] = nu_mass[s & (s - 1)] + nu[low].p;
    }
    std::vector<std::uint32_t> nb(std::size_t{1} << p, 0);
    std::vector<double> mu_mass(std::size_t{1} << p, 0.0);
    double best = 0.0;
    for (std::size_t s = 1; s < nb.size(); ++s) {
        const int low = __builtin_ctz(static_cast<unsigned>(s));
        nb[s] = nb[s & (s - 1)] | mask[low];
        mu_mass[s] = mu_mass[s & (s - 1)] + mu[low].p;
        best = std::max(best, mu_mass[s] - nu_mass[nb[s]]);
    }
    return best;
}

// Same quantity via max-flow: 1 - F_k (total mass of mu minus the max flow).
double gap_flow(const std::vector<Measure::Atom>& mu, const std::vector<Measure::Atom>& nu,
                const std::vector<std::vector<double>>& D, double dk) {
    const int p = static_cast<int>(mu.size()), q = static_cast<int>(nu.size());
    MaxFlow mf(p + q + 2);
    const int s = p + q, t = p + q + 1;
    double total = 0.0;
    for (int i = 0; i < p; ++i) {
        mf.add_edge(s, i, mu[i].p);
        total += mu[i].p;
    }
    for (int j = 0; j < q; ++j) mf.add_edge(p + j, t, nu[j].p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j)
            if (D[i][j] <= dk) mf.add_edge(i, p + j, 4.0);
    return std::max(0.0, total - mf.run(s, t));
}

}  // namespace

double prohorov_to_dirac(const Measure& mu, const std::vector<double>& a) {
    // Tail T(eps) = mu(d(x, a) >= eps); rho = inf{eps : T(eps) <= eps}.
    if (mu.uniforms.empty()) {
        std::vector<std::pair<double, double>> dist;
        for (const auto& at : mu.atoms)
            if (at.p > 0) dist.emplace_back(euclid(at.x, a), at.p);
        std::sort(dist.begin(), dist.end());
        // On (d_k, d_{k+1}] the tail equals the mass strictly beyond d_k.
        double tail = 0.0;
        for (const auto& d : dist) tail += d.second;
        double best = std::numeric_limits<double>::infinity();
        double level = 0.0;
        std::size_t k = 0;
        while (true) {
            while (k < dist.size() && dist[k].first <= level) tail -= dist[k++].second;
            best = std::min(best, std::max(level, std::max(0.0, tail)));
            if (k == dist.size()) break;
            level = dist[k].first;
        }
        return best;
    }
    if (a.size() != 1) throw VerificationError("uniform components require a one-dimensional action space");
    auto tail = [&](double eps) {
        double t = 0.0;
        for (const auto& at : mu.atoms)
            if (euclid(at.x, a) >= eps) t += at.p;
        for (const auto& u : mu.uniforms) {
            const double inside = std::max(0.0, std::min(u.hi, a[0] + eps) - std::max(u.lo, a[0] - eps));
            t += u.weight * (1.0 - inside / (u.hi - u.lo));
        }
        return t;
    };
    double lo = 0.0, hi = 1.0;
    if (tail(0.0) <= 0.0) return 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (tail(mid) <= mid) hi = mid;
        else lo = mid;
    }
    return hi;
}

ProhorovResult prohorov(const Measure& mu_in, const Measure& nu_in, int uniform_points) {
    ProhorovResult res;
    auto single_dirac = [](const Measure& m) -> std::optional<std::vector<double>> {
        auto s = support(m);
        if (m.uniforms.empty() && s.size() == 1) return s[0].x;
        return std::nullopt;
    };
    if (auto a = single_dirac(nu_in)) {
        res.value = prohorov_to_dirac(mu_in, *a);
        res.method = "dirac-tail";
        return res;
    }
    if (auto a = single_dirac(mu_in)) {
        res.value = prohorov_to_dirac(nu_in, *a);
        res.method = "dirac-tail";
        return res;
    }
    double err = 0.0;
    for (const auto* m : {&mu_in, &nu_in})
        for (const auto& u : m->uniforms) err = std::max(err, (u.hi - u.lo) / (2.0 * uniform_points));
    const Measure mu_d = mu_in.discretized(uniform_points), nu_d = nu_in.discretized(uniform_points);
    const auto mu = support(mu_d), nu = support(nu_d);
    if (mu.empty() || nu.empty()) throw VerificationError("measures must have positive mass");
    std::vector<std::vector<double>> D(mu.size(), std::vector<double>(nu.size()));
    std::vector<double> levels{0.0};
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = 0; j < nu.size(); ++j) {
            D[i][j] = euclid(mu[i].x, nu[j].x);
            levels.push_back(D[i][j]);
        }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    std::vector<std::vector<double>> Dt(nu.size(), std::vector<double>(mu.size()));
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = 0; j < nu.size(); ++j) Dt[j][i] = D[i][j];

    const bool small = mu.size() <= 16 && nu.size() <= 16;
    auto gap = [&](double dk) {
        if (small) return std::max(gap_subsets(mu, nu, D, dk), gap_subsets(nu, mu, Dt, dk));
        return std::max(gap_flow(mu, nu, D, dk), gap_flow(nu, mu, Dt, dk));
    };
    double best = std::numeric_limits<double>::infinity();
    if (small) {
        for (double dk : levels) {
            if (dk >= best) break;
            best = std::min(best, std::max(dk, gap(dk)));
        }
        res.method = "subset-enumeration";
    } else {
        // max(d_k, G_k) is unimodal: d_k increases while G_k does not.
        std::size_t lo = 0, hi = levels.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (gap(levels[mid]) <= levels[mid]) hi = mid;
            else lo = mid + 1;
        }
        best = levels[lo];
        if (lo > 0) best = std::min(best, std::max(levels[lo - 1], gap(levels[lo - 1])));
        res.method = "max-flow";
    }
    res.value = best;
    res.error_bound = err;
    return res;
}

double prohorov_distance(const Measure& mu, const Measure& nu) { return prohorov(mu, nu).value; }

double prohorov_distance(const MixedAction& mu, const MixedAction& nu, const FiniteLattice& L) {
    return prohorov_distance(Measure::from_mixed(mu, L), Measure::from_mixed(nu, L));
}

// ---------------------------------------------------------------------------
// Type samples and equilibrium checks

TypeSample make_type_sample(const TypeSpace& box, const std::vector<double>& breakpoints, double grid_step,
                            int base_points) {
    TypeSample s;
    if (grid_step <= 0) grid_step = box.width() / 4096.0;
    std::vector<double> pts;
    for (int j = 0; j < base_points; ++j)
        pts.push_back(box.lo + box.width() * (2.0 * j + 1.0) / (2.0 * base_points));
    for (double b : breakpoints) {
        if (b < box.lo || b > box.hi) continue;
        s.exceptions.push_back(b);
        for (double x : {b - grid_step, b + grid_step})
            if (x >= box.lo && x <= box.hi) pts.push_back(x);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    for (double x : pts) {
        bool excluded = false;
        for (double e : s.exceptions)
            if (std::fabs(x - e) <= 1e-12) excluded = true;
        if (!excluded) s.points.push_back(x);
    }
    std::ostringstream os;
    os << base_points << " midpoint low-discrepancy points + breakpoints +/- " << grid_step << " ("
       << s.points.size() << " types, " << s.exceptions.size() << " excluded breakpoints)";
    s.description = os.str();
    return s;
}

BneReport check_bne_behavioral(const BayesGame& game, const Profile& profile, const BehavioralProfile& opponents,
                               double tol, double grid_step, const IntegrationOptions& opts) {
    if (static_cast<int>(profile.size()) != game.n) throw VerificationError("profile size mismatch");
    BneReport rep;
    rep.tol = tol;
    rep.gaps.assign(game.n, 0.0);
    rep.witness_types.assign(game.n, 0.0);
    std::ostringstream desc;
    for (int i = 0; i < game.n; ++i) {
        profile[i].validate();
        const double step = grid_step > 0 ? grid_step : game.types[i].width() / 4096.0;
        const TypeSample sample = make_type_sample(game.types[i], profile[i].breakpoints(), step);
        if (i == 0) desc << sample.description;
        for (double t : sample.points) {
            const std::vector<double> v = interim_payoffs(game, i, t, opponents, opts);
            const double best = *std::max_element(v.begin(), v.end());
            const double gap = best - v[profile[i].eval(t)];
            if (gap > rep.gaps[i]) {
                rep.gaps[i] = gap;
                rep.witness_types[i] = t;
            }
        }
    }
    rep.sample = desc.str();
    rep.is_eps_bne = std::all_of(rep.gaps.begin(), rep.gaps.end(), [&](double g) { return g <= tol; });
    return rep;
}

BneReport check_bne(const BayesGame& game, const Profile& profile, double tol, double grid_step,
                    const IntegrationOptions& opts) {
    return check_bne_behavioral(game, profile, to_behavioral(profile), tol, grid_step, opts);
}

// ---------------------------------------------------------------------------
// Perfection

bool completely_mixed(const BehavioralStrategy& s, std::size_t action_count, std::string* offending) {
    for (std::size_t c = 0; c < s.cells.size(); ++c) {
        for (std::size_t a = 0; a < action_count; ++a) {
            if (!(s.cells[c].weight_of(static_cast<int>(a)) > 0)) {
                if (offending) {
                    std::ostringstream os;
                    os << "cell " << c << " [" << s.cuts[c] << ", " << s.cuts[c + 1] << ") gives action " << a
                       << " zero probability";
                    *offending = os.str();
                }
                return false;
            }
        }
    }
    return true;
}

std::vector<SequenceLevel> canonical_sequence(const BayesGame& game, const Profile& profile,
                                              const std::vector<int>& levels,
                                              const std::vector<std::vector<double>>& weights) {
    std::vector<SequenceLevel> seq;
    for (int m : levels) {
        PerturbationScheme scheme;
        scheme.m = m;
        scheme.weights = weights;
        seq.emplace_back(m, embed_profile(game, profile, scheme));
    }
    return seq;
}

void finalize_certificate(PerfectionCertificate& cert, const PerfectionSettings& st) {
    cert.rho_tol = st.rho_tol;
    cert.br_tol = st.br_tol;
    cert.decay_ratio = st.decay_ratio;
    if (cert.levels.empty()) throw VerificationError("perfection check needs at least one sequence level");
    for (const auto& lv : cert.levels) {
        if (!lv.completely_mixed) {
            cert.certified = false;
            cert.failed_level = lv.level;
            cert.verdict = "failed at level " + std::to_string(lv.level) + ": sequence not completely mixed (" +
                           lv.note + ")";
            return;
        }
    }
    const PerfectionLevel& last = cert.levels.back();
    // Convergence of the sequence: the Prohorov sup never increases and ends within tolerance.
    bool rho_monotone = true;
    for (std::size_t k = 1; k < cert.levels.size(); ++k)
        if (cert.levels[k].rho_sup > cert.levels[k - 1].rho_sup + 1e-12) rho_monotone = false;
    if (!rho_monotone || last.rho_sup > st.rho_tol) {
        cert.certified = false;
        cert.failed_level = last.level;
        cert.witness_player = last.rho_witness_player;
        cert.witness_type = last.rho_witness_type;
        std::ostringstream os;
        os << "failed at level " << last.level << ": Prohorov sup " << last.rho_sup << " (tol " << st.rho_tol << ")"
           << (rho_monotone ? "" : ", increasing along the sequence") << ", witness player " << last.rho_witness_player
           << " at type " << last.rho_witness_type;
        cert.verdict = os.str();
        return;
    }
    bool ok = last.violation_radius <= 0.0;
    std::string mode = "no violations on the sample at the final level";
    if (!ok) {
        // The best-response condition is a pointwise limit for almost every
        // type: remaining violations must sit in a neighbourhood of the breakpoints whose radius
        // shrinks geometrically over the last levels.
        const std::size_t L = cert.levels.size();
        const std::size_t need = static_cast<std::size_t>(std::max(2, st.trend_levels));
        if (L >= need) {
            bool shrinking = true;
            for (std::size_t k = L - need + 1; k < L; ++k) {
                const double prev = cert.levels[k - 1].violation_radius, cur = cert.levels[k].violation_radius;
                if (!(prev > 0) || !(cur <= st.decay_ratio * prev)) shrinking = false;
            }
            if (shrinking && last.violation_radius <= st.radius_tol) {
                ok = true;
                std::ostringstream os;
                os << "violations confined within " << last.violation_radius
                   << " of the breakpoints, radius shrinking by <= " << st.decay_ratio << " per level over the last "
                   << need << " levels";
                mode = os.str();
            }
        }
    }
    cert.certified = ok;
    if (ok) {
        cert.verdict = "certified-to-tolerance (" + mode + ")";
        cert.failed_level.reset();
        cert.witness_player.reset();
        cert.witness_type.reset();
        return;
    }
    cert.failed_level = last.level;
    if (last.witness_player >= 0) {
        cert.witness_player = last.witness_player;
        cert.witness_type = last.witness_type;
    }
    std::ostringstream os;
    os << "failed at level " << last.level << ": best-response distance sup " << last.br_sup << " (tol "
       << st.br_tol << ")";
    if (last.witness_player >= 0)
        os << ", witness player " << last.witness_player << " at type " << last.witness_type;
    os << ", violation radius " << last.violation_radius;
    cert.verdict = os.str();
}

void record_type(PerfectionLevel& rec, int player, double t, double rho, double d, const std::vector<double>& breakpoints,
                 double lo, double hi, const PerfectionSettings& st) {
    if (rho > rec.rho_sup || rec.rho_witness_player < 0) {
        rec.rho_witness_player = player;
        rec.rho_witness_type = t;
    }
    rec.rho_sup = std::max(rec.rho_sup, rho);
    rec.br_sup = std::max(rec.br_sup, d);
    if (!(d > st.br_tol)) return;
    // Violations are measured against the nearest breakpoint or type-box endpoint.
    double radius = std::min(std::fabs(t - lo), std::fabs(hi - t));
    for (double e : breakpoints) radius = std::min(radius, std::fabs(t - e));
    if (radius > rec.violation_radius || rec.witness_player < 0) {
        rec.violation_radius = std::max(rec.violation_radius, radius);
        rec.witness_player = player;
        rec.witness_type = t;
    }
}

PerfectionCertificate check_perfection(const BayesGame& game, const Profile& profile,
                                       const std::vector<SequenceLevel>& sequence, const PerfectionSettings& st) {
    if (sequence.empty()) throw VerificationError("perfection check needs at least one sequence level");
    PerfectionCertificate cert;
    std::vector<TypeSample> samples;
    for (int i = 0; i < game.n; ++i) {
        profile[i].validate();
        const double step = st.grid_step > 0 ? st.grid_step : game.types[i].width() / 4096.0;
        samples.push_back(make_type_sample(game.types[i], profile[i].breakpoints(), step, st.base_points));
    }
    cert.sample = samples.front().description;
    for (const auto& [level, seq] : sequence) {
        PerfectionLevel rec;
        rec.level = level;
        if (static_cast<int>(seq.size()) != game.n) throw VerificationError("sequence profile size mismatch");
        for (int i = 0; i < game.n && rec.completely_mixed; ++i) {
            std::string off;
            if (!completely_mixed(seq[i], game.actions[i].size(), &off)) {
                rec.completely_mixed = false;
                rec.note = "player " + std::to_string(i) + ": " + off;
            }
        }
        if (rec.completely_mixed) {
            for (int i = 0; i < game.n; ++i) {
                const FiniteLattice& L = game.lattice(i);
                const std::vector<double> bps = profile[i].breakpoints();
                for (double t : samples[i].points) {
                    const int a = profile[i].eval(t);
                    const double rho = prohorov_to_dirac(Measure::from_mixed(seq[i].at(t), L), L.coords(a));
                    const std::vector<double> v = interim_payoffs(game, i, t, seq, st.integration);
                    const BestResponseSet br = best_response_from_values(v, st.payoff_tol);
                    double d = std::numeric_limits<double>::infinity();
                    for (int b : br.actions) d = std::min(d, L.distance(a, b));
                    record_type(rec, i, t, rho, d, bps, game.types[i].lo, game.types[i].hi, st);
                }
            }
        }
        cert.levels.push_back(rec);
        if (!rec.completely_mixed) break;
    }
    finalize_certificate(cert, st);
    return cert;
}

// ---------------------------------------------------------------------------
// Dominance

std::string to_string(DominanceKind k) {
    switch (k) {
        case DominanceKind::StrictlyDominated: return "strictly-dominated";
        case DominanceKind::WeaklyDominated: return "weakly-dominated";
        case DominanceKind::UndominatedOnFamily: return "undominated-on-family";
        case DominanceKind::LimitUndominated: return "limit-undominated";
    }
    return "unknown";
}

OpponentProfileFamily constant_profile_family(const BayesGame& game, int i) {
    OpponentProfileFamily fam;
    fam.description = "all constant pure opponent profiles";
    std::vector<int> idx(game.n, 0);
    while (true) {
        BehavioralProfile p(game.n);
        std::ostringstream label;
        label << "(";
        for (int j = 0; j < game.n; ++j) {
            if (j == i) {
                p[j] = BehavioralStrategy::from_step(StepStrategy::constant(game.types[j].lo, game.types[j].hi, 0));
                continue;
            }
            p[j] = BehavioralStrategy::from_step(StepStrategy::constant(game.types[j].lo, game.types[j].hi, idx[j]));
            label << (label.tellp() > 1 ? ", " : "") << "player " << j << " plays " << idx[j];
        }
        label << ")";
        fam.profiles.push_back(std::move(p));
        fam.labels.push_back(label.str());
        int j = 0;
        while (j < game.n) {
            if (j == i) {
                ++j;
                continue;
            }
            if (++idx[j] < static_cast<int>(game.actions[j].size())) break;
            idx[j++] = 0;
        }
        if (j == game.n) break;
    }
    return fam;
}

DominanceVerdict dominance_audit(const BayesGame& game, int i, int a_i, double t_i, const OpponentProfileFamily* family,
                                 double tol, const IntegrationOptions& opts) {
    OpponentProfileFamily own;
    if (!family) {
        own = constant_profile_family(game, i);
        family = &own;
    }
    const std::size_t K = game.actions[i].size();
    if (a_i < 0 || static_cast<std::size_t>(a_i) >= K) throw VerificationError("audited action outside action set");
    const std::size_t S = family->profiles.size();
    std::vector<std::vector<double>> V(K, std::vector<double>(S));
    for (std::size_t s = 0; s < S; ++s) {
        const std::vector<double> v = interim_payoffs(game, i, t_i, family->profiles[s], opts);
        for (std::size_t a = 0; a < K; ++a) V[a][s] = v[a];
    }
    DominanceVerdict out;
    out.player = i;
    out.action = a_i;
    out.type = t_i;
    out.family = family->description;

    auto mixture = [&](const std::vector<double>& x) {
        MixedAction m;
        double total = 0.0;
        for (std::size_t a = 0; a < K; ++a) total += std::max(0.0, x[a]);
        for (std::size_t a = 0; a < K; ++a)
            if (x[a] > 1e-12) m.atoms.emplace_back(static_cast<int>(a), x[a] / total);
        return m;
    };

    // Strict dominance: max s with sum_a p_a V(a, s) - s - slack_s = V(a_i, s).
    {
        const std::size_t nv = K + 2 + S;
        std::vector<std::vector<double>> A;
        std::vector<double> b;
        for (std::size_t s = 0; s < S; ++s) {
            std::vector<double> row(nv, 0.0);
            for (std::size_t a = 0; a < K; ++a) row[a] = V[a][s];
            row[K] = -1.0;
            row[K + 1] = 1.0;
            row[K + 2 + s] = -1.0;
            A.push_back(row);
            b.push_back(V[a_i][s]);
        }
        std::vector<double> row(nv, 0.0);
        for (std::size_t a = 0; a < K; ++a) row[a] = 1.0;
        A.push_back(row);
        b.push_back(1.0);
        std::vector<double> c(nv, 0.0);
        c[K] = 1.0;
        c[K + 1] = -1.0;
        const LpResult r = simplex_maximize(A, b, c);
        if (r.status == LpResult::Status::Optimal && r.objective > tol) {
            out.kind = DominanceKind::StrictlyDominated;
            out.dominating = mixture(r.x);
            out.margin = r.objective;
            out.strict_witness = family->labels.front();
            return out;
        }
    }
    // Weak dominance: max sum_s e_s with sum_a p_a V(a, s) - e_s = V(a_i, s).
    {
        const std::size_t nv = K + S;
        std::vector<std::vector<double>> A;
        std::vector<double> b;
        for (std::size_t s = 0; s < S; ++s) {
            std::vector<double> row(nv, 0.0);
            for (std::size_t a = 0; a < K; ++a) row[a] = V[a][s];
            row[K + s] = -1.0;
            A.push_back(row);
            b.push_back(V[a_i][s]);
        }
        std::vector<double> row(nv, 0.0);
        for (std::size_t a = 0; a < K; ++a) row[a] = 1.0;
        A.push_back(row);
        b.push_back(1.0);
        std::vector<double> c(nv, 0.0);
        for (std::size_t s = 0; s < S; ++s) c[K + s] = 1.0;
        const LpResult r = simplex_maximize(A, b, c);
        if (r.status == LpResult::Status::Infeasible) throw VerificationError("dominance LP reported infeasibility");
        if (r.status == LpResult::Status::Optimal && r.objective > tol) {
            out.kind = DominanceKind::WeaklyDominated;
            out.dominating = mixture(r.x);
            out.margin = r.objective;
            std::size_t best = 0;
            for (std::size_t s = 0; s < S; ++s)
                if (r.x[K + s] > r.x[K + best]) best = s;
            out.strict_witness = family->labels[best];
            return out;
        }
    }
    out.kind = DominanceKind::UndominatedOnFamily;
    return out;
}

AdmissibilityReport check_admissibility(const BayesGame& game, const Profile& profile, int sample_points, double tol) {
    AdmissibilityReport rep;
    for (int i = 0; i < game.n; ++i) {
        const OpponentProfileFamily fam = constant_profile_family(game, i);
        rep.family = fam.description;
        const TypeSample sample = make_type_sample(game.types[i], profile[i].breakpoints(), 0.0, sample_points);
        if (i == 0) rep.sample = sample.description;
        for (double t : sample.points) {
            const DominanceVerdict v = dominance_audit(game, i, profile[i].eval(t), t, &fam, tol);
            ++rep.checked;
            if (v.kind == DominanceKind::StrictlyDominated || v.kind == DominanceKind::WeaklyDominated) {
                rep.admissible = false;
                rep.failures.push_back(AdmissibilityFailure{i, t, v});
            }
        }
    }
    return rep;
}

AdmissibilityReport check_limit_admissibility(const BayesGame& game, const Profile& profile,
                                              const std::vector<double>& radii, int sample_points, double tol) {
    AdmissibilityReport rep;
    for (int i = 0; i < game.n; ++i) {
        const FiniteLattice& L = game.lattice(i);
        const OpponentProfileFamily fam = constant_profile_family(game, i);
        rep.family = fam.description;
        const TypeSample sample = make_type_sample(game.types[i], profile[i].breakpoints(), 0.0, sample_points);
        if (i == 0) rep.sample = sample.description;
        for (double t : sample.points) {
            const int a = profile[i].eval(t);
            std::vector<char> undominated(L.size(), 0), known(L.size(), 0);
            for (double r : radii) {
                bool found = false;
                std::vector<std::size_t> order;
                for (std::size_t b = 0; b < L.size(); ++b)
                    if (L.distance(a, b) <= r + 1e-15) order.push_back(b);
                std::sort(order.begin(), order.end(),
                          [&](std::size_t x, std::size_t y) { return L.distance(a, x) < L.distance(a, y); });
                for (std::size_t b : order) {
                    if (!known[b]) {
                        const DominanceVerdict v = dominance_audit(game, i, static_cast<int>(b), t, &fam, tol);
                        undominated[b] = v.kind == DominanceKind::UndominatedOnFamily;
                        known[b] = 1;
                    }
                    if (undominated[b]) {
                        found = true;
                        break;
                    }
                }
                ++rep.checked;
                if (!found) {
                    rep.admissible = false;
                    DominanceVerdict v = dominance_audit(game, i, a, t, &fam, tol);
                    rep.failures.push_back(AdmissibilityFailure{i, t, v});
                    break;
                }
            }
        }
    }
    return rep;
}

}  // namespace monoeq
