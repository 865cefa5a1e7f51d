#include "monoeq/auctions.hpp"

#include "monoeq/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

namespace monoeq {

namespace {

constexpr double kCheckTol = 1e-9;

std::string vec_str(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(10);
    os << "(";
    for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ", " : "") << v[k];
    os << ")";
    return os.str();
}

// Cartesian product of per-coordinate grids, visited in lexicographic order.
template <class F>
void for_each_point(const std::vector<std::vector<double>>& grids, F&& f) {
    const std::size_t n = grids.size();
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k)
        if (grids[k].empty()) return;
    while (true) {
        for (std::size_t k = 0; k < n; ++k) x[k] = grids[k][idx[k]];
        if (!f(x)) return;
        std::size_t k = 0;
        while (k < n && ++idx[k] == grids[k].size()) idx[k++] = 0;
        if (k == n) return;
    }
}

std::vector<double> linspace(double lo, double hi, int points) {
    std::vector<double> g;
    if (points <= 1) return {lo};
    for (int k = 0; k < points; ++k) g.push_back(lo + (hi - lo) * k / (points - 1));
    return g;
}

double demand(const GeneralizedAuction& a, int i, const std::vector<double>& b) {
    return a.D_player ? a.D_player(i, b) : a.D(b);
}

void check_bid(const GeneralizedAuction& a, int i, double b) {
    if (a.is_quit(b)) return;
    if (b < -a.tie_tol || b > a.bbar[i] + a.tie_tol) {
        std::ostringstream os;
        os << "bid " << b << " of player " << i << " is outside {Q} U [0, " << a.bbar[i] << "]";
        throw AuctionError(os.str());
    }
}

}  // namespace

void GeneralizedAuction::validate() const {
    if (n < 1) throw AuctionError("auction needs at least one player");
    if (static_cast<int>(bbar.size()) != n) throw AuctionError("bbar must have one entry per player");
    for (double b : bbar)
        if (!(b > 0)) throw AuctionError("bid caps must be positive");
    if (!(quit < 0)) throw AuctionError("quit value Q must be negative");
    if (!W || !C || !Phi || !D) throw AuctionError("auction evaluators W, C, Phi, D are required");
    if (static_cast<int>(scales.size()) != n) throw AuctionError("scales must have one entry per player");
    for (const auto& s : scales)
        if (!(s.lo < s.hi)) throw AuctionError("value scale must satisfy lo < hi");
    if (static_cast<int>(density.players()) != n) throw AuctionError("density dimension must equal n");
    for (int i = 0; i < n; ++i) {
        const TypeSpace& box = density.box(i);
        if (std::fabs(box.lo) > 1e-12 || std::fabs(box.hi - 1.0) > 1e-12)
            throw AuctionError("auction densities are defined on the unit box [0,1]^n");
        if (std::fabs(C(i, 0.0)) > 1e-12) throw AuctionError("C_i(0) must be 0");
        if (std::fabs(Phi(i, 0.0)) > 1e-12) throw AuctionError("Phi_i(0) must be 0");
    }
}

std::vector<TypeSpace> GeneralizedAuction::value_boxes() const {
    std::vector<TypeSpace> boxes;
    for (const auto& s : scales) boxes.push_back(TypeSpace{s.lo, s.hi});
    return boxes;
}

JointDensity GeneralizedAuction::value_density() const {
    switch (density.structure()) {
        case DensityStructure::IndependentUniform:
            return JointDensity::independent_uniform(value_boxes());
        case DensityStructure::IndependentMarginals: {
            std::vector<Marginal> ms;
            for (int i = 0; i < n; ++i) {
                const Marginal& m = density.marginal(i);
                const ValueScale s = scales[i];
                Marginal mv{s.lo, s.hi, {}, 0.0, {}};
                if (!m.uniform()) {
                    auto pdf = m.pdf;
                    const double w = s.hi - s.lo;
                    mv.pdf = [pdf, s, w](double v) { return pdf(s.to_type(v)) / w; };
                    mv.bound = m.bound / w;
                    for (double k : m.kinks) mv.kinks.push_back(s.to_value(k));
                }
                ms.push_back(mv);
            }
            return JointDensity::independent(std::move(ms));
        }
        case DensityStructure::General: {
            JointDensity t_density = density;
            std::vector<ValueScale> sc = scales;
            auto f = [t_density, sc](const std::vector<double>& v) {
                std::vector<double> t(v.size());
                for (std::size_t k = 0; k < v.size(); ++k) t[k] = sc[k].to_type(v[k]);
                return t_density(t);
            };
            return JointDensity::general(value_boxes(), f, density.bound());
        }
    }
    throw AuctionError("unknown density structure");
}

AuctionOutcome resolve_outcome(const GeneralizedAuction& a, const std::vector<double>& b, const std::vector<double>& v) {
    if (static_cast<int>(b.size()) != a.n || static_cast<int>(v.size()) != a.n)
        throw AuctionError("bid and value profiles must have n entries");
    for (int i = 0; i < a.n; ++i) check_bid(a, i, b[i]);
    AuctionOutcome out;
    out.payments.assign(a.n, 0.0);
    out.payoffs.assign(a.n, 0.0);
    double top = a.quit;
    for (int i = 0; i < a.n; ++i)
        if (!a.is_quit(b[i])) top = std::max(top, b[i]);
    if (!a.is_quit(top))
        for (int i = 0; i < a.n; ++i)
            if (!a.is_quit(b[i]) && b[i] >= top - a.tie_tol) out.winners.push_back(i);
    out.tie = out.winners.size() >= 2;
    const double share = out.winners.empty() ? 0.0 : 1.0 / static_cast<double>(out.winners.size());
    for (int i = 0; i < a.n; ++i) {
        if (a.is_quit(b[i])) continue;
        const bool wins = std::find(out.winners.begin(), out.winners.end(), i) != out.winners.end();
        const double fee = a.Phi(i, b[i]);
        double pay = fee, pay_off = -fee;
        if (wins) {
            const double d = demand(a, i, b);
            pay += a.C(i, b[i]) * d * share;
            pay_off += (a.W(i, b[i], v) - a.C(i, b[i])) * d * share;
        }
        out.payments[i] = pay;
        out.payoffs[i] = pay_off;
    }
    return out;
}

std::vector<double> ex_post_payoff(const GeneralizedAuction& a, const std::vector<double>& b,
                                   const std::vector<double>& v) {
    return resolve_outcome(a, b, v).payoffs;
}

double ex_post_payoff_player(const GeneralizedAuction& a, int i, const std::vector<double>& b,
                             const std::vector<double>& v) {
    check_bid(a, i, b[i]);
    if (a.is_quit(b[i])) return 0.0;
    int ties = 0;
    for (int j = 0; j < a.n; ++j) {
        if (j == i) continue;
        if (a.is_quit(b[j])) continue;
        if (b[j] > b[i] + a.tie_tol) return -a.Phi(i, b[i]);
        if (b[j] >= b[i] - a.tie_tol) ++ties;
    }
    const double share = 1.0 / static_cast<double>(ties + 1);
    return (a.W(i, b[i], v) - a.C(i, b[i])) * demand(a, i, b) * share - a.Phi(i, b[i]);
}

double win_weight(const GeneralizedAuction& a, int i, const std::vector<double>& b) {
    if (a.is_quit(b[i])) return 0.0;
    int ties = 0;
    for (int j = 0; j < a.n; ++j) {
        if (j == i || a.is_quit(b[j])) continue;
        if (b[j] > b[i] + a.tie_tol) return 0.0;
        if (b[j] >= b[i] - a.tie_tol) ++ties;
    }
    return demand(a, i, b) / static_cast<double>(ties + 1);
}

GeneralizedAuction build_first_price(int n, JointDensity density, std::vector<ValueScale> scales,
                                     std::vector<double> bbar, double quit) {
    GeneralizedAuction a;
    a.name = "first-price";
    a.n = n;
    a.quit = quit;
    a.scales = scales.empty() ? std::vector<ValueScale>(n) : std::move(scales);
    if (bbar.empty())
        for (const auto& s : a.scales) bbar.push_back(std::max(s.hi, 1e-12));
    a.bbar = std::move(bbar);
    a.W = [](int i, double, const std::vector<double>& v) { return v[i]; };
    a.C = [](int, double b) { return b; };
    a.Phi = [](int, double) { return 0.0; };
    a.D = [](const std::vector<double>&) { return 1.0; };
    a.density = std::move(density);
    a.private_values = true;
    a.validate();
    return a;
}

GeneralizedAuction build_all_pay(int n, std::function<double(int, double, const std::vector<double>&)> w,
                                 JointDensity density, std::vector<double> bbar, double quit, bool private_values) {
    GeneralizedAuction a;
    a.name = "all-pay";
    a.n = n;
    a.quit = quit;
    a.scales = std::vector<ValueScale>(n);
    a.bbar = bbar.empty() ? std::vector<double>(n, 1.0) : std::move(bbar);
    a.W = w;
    a.C = [](int, double) { return 0.0; };
    a.Phi = [](int, double b) { return b; };
    a.D = [](const std::vector<double>&) { return 1.0; };
    a.density = std::move(density);
    a.private_values = private_values;
    a.validate();

    // Grid validation of the all-pay prize conditions.
    const std::vector<double> vg = linspace(0.0, 1.0, n <= 3 ? 5 : 3);
    for (int i = 0; i < n; ++i) {
        const std::vector<double> bg = linspace(0.0, a.bbar[i], 9);
        std::vector<std::vector<double>> grids(n, vg);
        std::string failure;
        for_each_point(grids, [&](const std::vector<double>& v) {
            for (std::size_t kb = 0; kb < bg.size(); ++kb) {
                const double b = bg[kb];
                const double base = w(i, b, v);
                if (!(base > 0)) {
                    failure = "prize w_i must be positive; w=" + std::to_string(base) + " at b=" + std::to_string(b) +
                              ", v=" + vec_str(v);
                    return false;
                }
                for (int j = 0; j < n; ++j) {
                    if (v[j] >= 1.0) continue;
                    std::vector<double> up = v;
                    up[j] = std::min(1.0, v[j] + 1.0 / (vg.size() - 1));
                    const double diff = w(i, b, up) - base;
                    if (j == i ? !(diff > kCheckTol) : diff < -kCheckTol) {
                        failure = std::string(j == i ? "prize must be strictly increasing in own value"
                                                     : "prize must be increasing in opponent values") +
                                  " at b=" + std::to_string(b) + ", v=" + vec_str(v) + " -> " + vec_str(up);
                        return false;
                    }
                    if (kb + 1 < bg.size()) {
                        const double bh = bg[kb + 1];
                        const double gain_lo = w(i, bh, v) - base;
                        const double gain_hi = w(i, bh, up) - w(i, b, up);
                        if (gain_hi < gain_lo - kCheckTol) {
                            failure = "prize must have increasing differences in (bid, values) at b=" +
                                      std::to_string(b) + " -> " + std::to_string(bh) + ", v=" + vec_str(v) +
                                      " -> " + vec_str(up);
                            return false;
                        }
                    }
                }
                if (kb + 1 < bg.size()) {
                    const double bh = bg[kb + 1];
                    if (!(w(i, bh, v) - bh < base - b - kCheckTol)) {
                        failure = "prize minus bid must be strictly decreasing in the bid at b=" + std::to_string(b) +
                                  " -> " + std::to_string(bh) + ", v=" + vec_str(v);
                        return false;
                    }
                }
            }
            return true;
        });
        if (!failure.empty()) throw AuctionError("all-pay prize violates its assumption for player " +
                                                 std::to_string(i) + ": " + failure);
    }
    return a;
}

GeneralizedAuction build_bertrand(int n, std::function<double(const std::vector<double>&)> D_hat,
                                  std::vector<double> pbar, JointDensity density, double quit) {
    if (static_cast<int>(pbar.size()) != n) throw AuctionError("pbar must have one entry per firm");
    // Validate: demand decreasing in every price and p_i * D_hat increasing in own price.
    std::vector<std::vector<double>> grids;
    for (int i = 0; i < n; ++i) grids.push_back(linspace(0.0, pbar[i], n <= 3 ? 9 : 5));
    std::string failure;
    for_each_point(grids, [&](const std::vector<double>& p) {
        const double d = D_hat(p);
        if (!(d > 0)) {
            failure = "demand must be positive at p=" + vec_str(p);
            return false;
        }
        for (int i = 0; i < n; ++i) {
            if (p[i] >= pbar[i]) continue;
            std::vector<double> up = p;
            up[i] = std::min(pbar[i], p[i] + pbar[i] / (grids[i].size() - 1));
            const double du = D_hat(up);
            if (du > d + kCheckTol) {
                failure = "demand must be decreasing in prices at p=" + vec_str(p) + " -> " + vec_str(up);
                return false;
            }
            if (up[i] * du < p[i] * d - kCheckTol) {
                failure = "own revenue p_i * D must be increasing in p_i (relative inelasticity) at p=" + vec_str(p) +
                          " -> " + vec_str(up);
                return false;
            }
        }
        return true;
    });
    if (!failure.empty()) throw AuctionError("Bertrand demand rejected: " + failure);

    GeneralizedAuction a;
    a.name = "bertrand";
    a.n = n;
    a.quit = quit;
    a.bbar = pbar;
    a.scales = std::vector<ValueScale>(n);
    a.W = [pbar](int i, double, const std::vector<double>& v) { return pbar[i] + v[i] - 1.0; };
    a.C = [](int, double b) { return b; };
    a.Phi = [](int, double) { return 0.0; };
    a.D = [pbar, D_hat](const std::vector<double>& b) {
        std::vector<double> p(b.size());
        for (std::size_t k = 0; k < b.size(); ++k) p[k] = pbar[k] - b[k];
        return D_hat(p);
    };
    a.density = std::move(density);
    a.private_values = true;
    a.validate();
    return a;
}

bool AuctionAssumptionReport::holds() const {
    return std::all_of(items.begin(), items.end(), [](const AssumptionItem& it) { return it.holds; });
}

AuctionAssumptionReport validate_auction_assumptions(const GeneralizedAuction& a, int value_points, int bid_points) {
    a.validate();
    const int n = a.n;
    const double tol = kCheckTol;
    const double eps = 1e-7;  // continuity probe
    const double cont_tol = 1e-4;
    AuctionAssumptionReport rep;
    {
        std::ostringstream os;
        os << value_points << " points per value axis, " << bid_points << " bids per player plus Q, continuity probe "
           << eps;
        rep.grid = os.str();
    }
    std::vector<std::vector<double>> vgrid(n);
    for (int i = 0; i < n; ++i) vgrid[i] = linspace(a.scales[i].lo, a.scales[i].hi, value_points);
    std::vector<std::vector<double>> bgrid(n);
    for (int i = 0; i < n; ++i) bgrid[i] = linspace(0.0, a.bbar[i], bid_points);

    auto item = [&](int k, std::string statement) {
        AssumptionItem it;
        it.item = k;
        it.statement = std::move(statement);
        rep.items.push_back(it);
        return rep.items.size() - 1;
    };
    auto fail = [&](std::size_t idx, std::string w) {
        if (rep.items[idx].holds) {
            rep.items[idx].holds = false;
            rep.items[idx].witness = std::move(w);
        }
    };

    // (1) W continuous, strictly increasing in v_i, increasing in v_-i, positive for v_i > 0.
    const std::size_t i1 = item(1, "W_i continuous, strictly increasing in v_i, increasing in v_-i, W_i > 0 for v_i > 0");
    for (int i = 0; i < n && rep.items[i1].holds; ++i) {
        for (double b : bgrid[i]) {
            for_each_point(vgrid, [&](const std::vector<double>& v) {
                const double w0 = a.W(i, b, v);
                if (v[i] > a.scales[i].lo + 1e-15 && v[i] > 0 && !(w0 > 0)) {
                    fail(i1, "W_" + std::to_string(i) + "=" + std::to_string(w0) + " <= 0 at b=" + std::to_string(b) +
                                 ", v=" + vec_str(v));
                    return false;
                }
                for (int j = 0; j < n; ++j) {
                    auto it = std::upper_bound(vgrid[j].begin(), vgrid[j].end(), v[j]);
                    if (it == vgrid[j].end()) continue;
                    std::vector<double> up = v;
                    up[j] = *it;
                    const double d = a.W(i, b, up) - w0;
                    if (j == i ? !(d > tol) : d < -tol) {
                        fail(i1, "W_" + std::to_string(i) + " not " +
                                     (j == i ? "strictly increasing in own value" : "increasing in opponent value") +
                                     " at b=" + std::to_string(b) + ", v=" + vec_str(v) + " -> " + vec_str(up));
                        return false;
                    }
                    std::vector<double> near = v;
                    near[j] += eps;
                    if (std::fabs(a.W(i, b, near) - w0) > cont_tol) {
                        fail(i1, "W_" + std::to_string(i) + " jumps at v=" + vec_str(v) + ", b=" + std::to_string(b));
                        return false;
                    }
                }
                return true;
            });
            if (!rep.items[i1].holds) break;
        }
    }

    // (2) C and Phi increasing and continuous with C(0) = Phi(0) = 0.
    const std::size_t i2 = item(2, "C_i and Phi_i increasing and continuous with C_i(0) = Phi_i(0) = 0");
    for (int i = 0; i < n; ++i) {
        if (std::fabs(a.C(i, 0.0)) > tol || std::fabs(a.Phi(i, 0.0)) > tol)
            fail(i2, "C_i(0) or Phi_i(0) nonzero for player " + std::to_string(i));
        for (std::size_t k = 0; k + 1 < bgrid[i].size(); ++k) {
            const double b = bgrid[i][k], bh = bgrid[i][k + 1];
            if (a.C(i, bh) < a.C(i, b) - tol)
                fail(i2, "C_" + std::to_string(i) + " decreases on [" + std::to_string(b) + ", " + std::to_string(bh) + "]");
            if (a.Phi(i, bh) < a.Phi(i, b) - tol)
                fail(i2,
                     "Phi_" + std::to_string(i) + " decreases on [" + std::to_string(b) + ", " + std::to_string(bh) + "]");
            if (std::fabs(a.C(i, b + eps) - a.C(i, b)) > cont_tol || std::fabs(a.Phi(i, b + eps) - a.Phi(i, b)) > cont_tol)
                fail(i2, "C_i or Phi_i jumps at b=" + std::to_string(b));
        }
    }

    // (3) D positive, continuous, increasing in b.
    const std::size_t i3 = item(3, "D positive, continuous and increasing in b");
    for_each_point(bgrid, [&](const std::vector<double>& b) {
        for (int i = 0; i < n; ++i) {
            const double d0 = demand(a, i, b);
            if (!(d0 > 0)) {
                fail(i3, "D <= 0 at b=" + vec_str(b));
                return false;
            }
            for (int j = 0; j < n; ++j) {
                auto it = std::upper_bound(bgrid[j].begin(), bgrid[j].end(), b[j]);
                if (it == bgrid[j].end()) continue;
                std::vector<double> up = b;
                up[j] = *it;
                if (demand(a, i, up) < d0 - tol) {
                    fail(i3, "D decreases from b=" + vec_str(b) + " to " + vec_str(up));
                    return false;
                }
                std::vector<double> near = b;
                near[j] += eps;
                if (std::fabs(demand(a, i, near) - d0) > cont_tol) {
                    fail(i3, "D jumps at b=" + vec_str(b));
                    return false;
                }
            }
        }
        return true;
    });

    // (4) W(b_H, v) - W(b_L, v) increasing in v.
    const std::size_t i4 = item(4, "W_i(b_H, v) - W_i(b_L, v) increasing in v for b_H > b_L");
    for (int i = 0; i < n && rep.items[i4].holds; ++i) {
        for (std::size_t k = 0; k + 1 < bgrid[i].size() && rep.items[i4].holds; ++k) {
            const double bl = bgrid[i][k], bh = bgrid[i][k + 1];
            for_each_point(vgrid, [&](const std::vector<double>& v) {
                const double g0 = a.W(i, bh, v) - a.W(i, bl, v);
                for (int j = 0; j < n; ++j) {
                    auto it = std::upper_bound(vgrid[j].begin(), vgrid[j].end(), v[j]);
                    if (it == vgrid[j].end()) continue;
                    std::vector<double> up = v;
                    up[j] = *it;
                    if (a.W(i, bh, up) - a.W(i, bl, up) < g0 - tol) {
                        fail(i4, "bid gain of W_" + std::to_string(i) + " decreases in v from " + vec_str(v) + " to " +
                                     vec_str(up) + " for bids " + std::to_string(bl) + " -> " + std::to_string(bh));
                        return false;
                    }
                }
                return true;
            });
        }
    }

    // (5) sign of W - C independent of v_-i.
    const std::size_t i5 = item(5, "sign of W_i - C_i independent of v_-i");
    for (int i = 0; i < n && rep.items[i5].holds; ++i) {
        for (double b : bgrid[i]) {
            for (double vi : vgrid[i]) {
                std::vector<std::vector<double>> section = vgrid;
                section[i] = {vi};
                int sign = 2;
                std::vector<double> first;
                for_each_point(section, [&](const std::vector<double>& v) {
                    const double x = a.W(i, b, v) - a.C(i, b);
                    const int s = x > tol ? 1 : (x < -tol ? -1 : 0);
                    if (sign == 2) {
                        sign = s;
                        first = v;
                    } else if (s != sign) {
                        fail(i5, "sign of W_" + std::to_string(i) + " - C_" + std::to_string(i) + " at b=" +
                                     std::to_string(b) + " changes between v=" + vec_str(first) + " and v=" + vec_str(v));
                        return false;
                    }
                    return true;
                });
                if (!rep.items[i5].holds) break;
            }
            if (!rep.items[i5].holds) break;
        }
    }

    // (6) (W - C) D - Phi strictly decreasing in own bid.
    const std::size_t i6 = item(6, "(W_i - C_i) D - Phi_i strictly decreasing in b_i");
    for (int i = 0; i < n && rep.items[i6].holds; ++i) {
        std::vector<std::vector<double>> others(n);
        for (int j = 0; j < n; ++j) {
            if (j == i) {
                others[j] = {0.0};
                continue;
            }
            others[j] = bgrid[j];
            others[j].insert(others[j].begin(), a.quit);
        }
        for_each_point(vgrid, [&](const std::vector<double>& v) {
            for_each_point(others, [&](const std::vector<double>& bo) {
                std::vector<double> b = bo;
                double prev = 0.0;
                for (std::size_t k = 0; k < bgrid[i].size(); ++k) {
                    b[i] = bgrid[i][k];
                    const double val = (a.W(i, b[i], v) - a.C(i, b[i])) * demand(a, i, b) - a.Phi(i, b[i]);
                    if (k > 0 && !(val < prev - tol)) {
                        fail(i6, "winner payoff of player " + std::to_string(i) + " not strictly decreasing at bids " +
                                     std::to_string(bgrid[i][k - 1]) + " -> " + std::to_string(b[i]) + ", v=" + vec_str(v) +
                                     ", b=" + vec_str(b));
                        return false;
                    }
                    prev = val;
                }
                return true;
            });
            return rep.items[i6].holds;
        });
    }
    return rep;
}

double BidStrategy::bid_at(double v) const {
    if (bids.empty() || cuts.size() != bids.size() + 1) throw AuctionError("malformed bid strategy");
    if (v < cuts.front() - 1e-12 || v > cuts.back() + 1e-12) throw AuctionError("value outside bid strategy domain");
    auto it = std::upper_bound(cuts.begin() + 1, cuts.end() - 1, v);
    return bids[static_cast<std::size_t>(it - (cuts.begin() + 1))];
}

SimulationStats simulate(const GeneralizedAuction& a, const std::vector<BidStrategy>& profile, std::size_t draws,
                         std::uint64_t seed, std::vector<SimulationRow>* rows) {
    a.validate();
    if (draws == 0) throw AuctionError("at least one draw is required");
    if (static_cast<int>(profile.size()) != a.n) throw AuctionError("profile must have one bid strategy per player");
    std::mt19937_64 rng(seed);
    auto unif = [&] { return unit_from_bits(rng()); };
    const int n = a.n;
    std::vector<double> t(n), v(n), b(n);
    SimulationStats st;
    st.draws = draws;
    st.payoff_means.assign(n, 0.0);
    double rev_mean = 0.0, rev_m2 = 0.0;
    std::size_t efficient = 0, ties = 0;
    for (std::size_t d = 0; d < draws; ++d) {
        if (a.density.independent()) {
            for (int j = 0; j < n; ++j) {
                const Marginal& mg = a.density.marginal(j);
                if (mg.uniform()) {
                    t[j] = unif();
                } else {
                    for (int tries = 0;; ++tries) {
                        if (tries > 1000000) throw AuctionError("value sampler failed");
                        const double x = unif();
                        if (unif() * mg.bound <= mg.pdf(x)) {
                            t[j] = x;
                            break;
                        }
                    }
                }
            }
        } else {
            for (int tries = 0;; ++tries) {
                if (tries > 1000000) throw AuctionError("value sampler failed");
                for (int j = 0; j < n; ++j) t[j] = unif();
                if (unif() * a.density.bound() <= a.density(t)) break;
            }
        }
        for (int j = 0; j < n; ++j) {
            v[j] = a.scales[j].to_value(t[j]);
            b[j] = profile[j].bid_at(v[j]);
        }
        const AuctionOutcome out = resolve_outcome(a, b, v);
        int winner = -1;
        if (!out.winners.empty()) {
            const std::size_t pick = out.winners.size() == 1
                                         ? 0
                                         : std::min(out.winners.size() - 1,
                                                    static_cast<std::size_t>(unif() * out.winners.size()));
            winner = out.winners[pick];
        }
        if (out.tie) ++ties;
        double revenue = 0.0;
        std::vector<double> realized(n, 0.0);
        for (int j = 0; j < n; ++j) {
            if (a.is_quit(b[j])) continue;
            const double fee = a.Phi(j, b[j]);
            revenue += fee;
            realized[j] = -fee;
            if (j == winner) {
                const double dq = demand(a, j, b);
                revenue += a.C(j, b[j]) * dq;
                realized[j] += (a.W(j, b[j], v) - a.C(j, b[j])) * dq;
            }
        }
        if (winner >= 0) {
            const double vmax = *std::max_element(v.begin(), v.end());
            if (v[winner] >= vmax - 1e-12) ++efficient;
        }
        const double delta = revenue - rev_mean;
        rev_mean += delta / static_cast<double>(d + 1);
        rev_m2 += delta * (revenue - rev_mean);
        for (int j = 0; j < n; ++j) st.payoff_means[j] += (realized[j] - st.payoff_means[j]) / static_cast<double>(d + 1);
        if (rows) rows->push_back(SimulationRow{d, b, v, winner, winner >= 0 ? b[winner] : 0.0, realized});
    }
    st.revenue_mean = rev_mean;
    st.revenue_ci = draws > 1 ? 1.96 * std::sqrt(rev_m2 / static_cast<double>(draws - 1) / static_cast<double>(draws)) : 0.0;
    st.efficiency_rate = static_cast<double>(efficient) / static_cast<double>(draws);
    st.tie_frequency = static_cast<double>(ties) / static_cast<double>(draws);
    return st;
}

BayesGame to_bayes_game(const GeneralizedAuction& a, const std::vector<std::vector<double>>& grids) {
    a.validate();
    if (static_cast<int>(grids.size()) != a.n) throw AuctionError("one bid grid per player is required");
    BayesGame g;
    g.name = a.name;
    g.n = a.n;
    g.types = a.value_boxes();
    g.density = a.value_density();
    for (int i = 0; i < a.n; ++i) {
        for (double b : grids[i]) check_bid(a, i, b);
        g.actions.push_back(ActionSpace::chain(grids[i]));
    }
    auto auction = std::make_shared<GeneralizedAuction>(a);
    auto gr = std::make_shared<std::vector<std::vector<double>>>(grids);
    g.payoff = [auction, gr](int i, const std::vector<int>& idx, const std::vector<double>& t) {
        std::vector<double> b(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) b[k] = (*gr)[k][idx[k]];
        return ex_post_payoff_player(*auction, i, b, t);
    };
    // Payoff bound from the grid corners.
    double bound = 0.0;
    std::vector<std::vector<double>> corners;
    for (int i = 0; i < a.n; ++i) corners.push_back({a.scales[i].lo, a.scales[i].hi});
    for (int i = 0; i < a.n; ++i) {
        for_each_point(corners, [&](const std::vector<double>& v) {
            for (double b : grids[i]) {
                if (a.is_quit(b)) continue;
                std::vector<double> prof(a.n, a.quit);
                prof[i] = b;
                bound = std::max(bound, std::fabs((a.W(i, b, v) - a.C(i, b)) * demand(a, i, prof)) +
                                            std::fabs(a.Phi(i, b)));
            }
            return true;
        });
    }
    g.bound = bound;
    g.smoothness = Smoothness::PiecewiseWithTies;
    g.opponent_degree = a.private_values ? 0 : -1;
    g.kinks.assign(a.n, {});
    g.validate();
    return g;
}

BayesGame build_second_price_game(const std::vector<double>& bids, const std::vector<TypeSpace>& boxes) {
    if (boxes.size() < 2) throw AuctionError("second-price auction needs at least two bidders");
    BayesGame g;
    g.name = "second-price";
    g.n = static_cast<int>(boxes.size());
    g.types = boxes;
    g.density = JointDensity::independent_uniform(boxes);
    for (int i = 0; i < g.n; ++i) g.actions.push_back(ActionSpace::chain(bids));
    g.payoff = [bids](int i, const std::vector<int>& idx, const std::vector<double>& t) {
        const double bi = bids[idx[i]];
        int ties = 1;
        double price = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < idx.size(); ++j) {
            if (static_cast<int>(j) == i) continue;
            const double bj = bids[idx[j]];
            if (bj > bi) return 0.0;
            if (bj == bi) ++ties;
            price = std::max(price, bj);
        }
        return (t[i] - price) / static_cast<double>(ties);
    };
    double vmax = 0.0;
    for (const auto& b : boxes) vmax = std::max({vmax, std::fabs(b.lo), std::fabs(b.hi)});
    double bmax = 0.0;
    for (double b : bids) bmax = std::max(bmax, std::fabs(b));
    g.bound = vmax + bmax;
    g.smoothness = Smoothness::PiecewiseWithTies;
    g.opponent_degree = 0;
    g.kinks.assign(g.n, {});
    g.validate();
    return g;
}

}  // namespace monoeq
