#include "monoeq/lattice_order.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace monoeq {

PosetElement::PosetElement(std::initializer_list<long long> c) {
    for (long long v : c) coords.emplace_back(v);
}

std::vector<double> PosetElement::to_real() const {
    std::vector<double> out;
    out.reserve(coords.size());
    for (const auto& q : coords) out.push_back(boost::rational_cast<double>(q));
    return out;
}

std::string to_string(const PosetElement& x) {
    std::ostringstream os;
    os << '(';
    for (std::size_t k = 0; k < x.coords.size(); ++k) {
        if (k) os << ',';
        const auto& q = x.coords[k];
        os << q.numerator();
        if (q.denominator() != 1) os << '/' << q.denominator();
    }
    os << ')';
    return os.str();
}

Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            long long num = std::stoll(s.substr(0, slash));
            long long den = std::stoll(s.substr(slash + 1));
            if (den == 0) throw OrderError("zero denominator in rational '" + s + "'");
            return Rational(num, den);
        }
        if (s.find('.') != std::string::npos || s.find('e') != std::string::npos)
            return rational_from_double(std::stod(s));
        return Rational(std::stoll(s));
    } catch (const std::invalid_argument&) {
        throw OrderError("cannot parse rational '" + s + "'");
    }
}

Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw OrderError("non-finite coordinate");
    // Exact for dyadic values with modest exponents; otherwise a close
    // continued-fraction approximation with bounded denominator.
    long long den = 1;
    double y = x;
    for (int k = 0; k < 40 && y != std::floor(y); ++k) {
        y *= 2.0;
        den *= 2;
    }
    if (y == std::floor(y) && std::fabs(y) < 9e15) return Rational(static_cast<long long>(y), den);
    long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int it = 0; it < 30; ++it) {
        double a = std::floor(r);
        long long ai = static_cast<long long>(a);
        long long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > 1000000000LL) break;
        h0 = h1; h1 = h2; k0 = k1; k1 = k2;
        if (std::fabs(r - a) < 1e-15) break;
        r = 1.0 / (r - a);
    }
    return Rational(h1, k1);
}

static void require_same_dim(std::size_t a, std::size_t b) {
    if (a != b) throw OrderError("dimension mismatch");
    if (a == 0) throw OrderError("empty element");
}

bool product_leq(const PosetElement& x, const PosetElement& y) {
    require_same_dim(x.dim(), y.dim());
    for (std::size_t k = 0; k < x.dim(); ++k)
        if (x.coords[k] > y.coords[k]) return false;
    return true;
}

bool product_leq(const std::vector<double>& x, const std::vector<double>& y, double tol) {
    require_same_dim(x.size(), y.size());
    for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k] > y[k] + tol) return false;
    return true;
}

PosetElement join(const PosetElement& x, const PosetElement& y) {
    require_same_dim(x.dim(), y.dim());
    PosetElement z = x;
    for (std::size_t k = 0; k < x.dim(); ++k) z.coords[k] = std::max(x.coords[k], y.coords[k]);
    return z;
}

PosetElement meet(const PosetElement& x, const PosetElement& y) {
    require_same_dim(x.dim(), y.dim());
    PosetElement z = x;
    for (std::size_t k = 0; k < x.dim(); ++k) z.coords[k] = std::min(x.coords[k], y.coords[k]);
    return z;
}

std::vector<double> join(const std::vector<double>& x, const std::vector<double>& y) {
    require_same_dim(x.size(), y.size());
    std::vector<double> z(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) z[k] = std::max(x[k], y[k]);
    return z;
}

std::vector<double> meet(const std::vector<double>& x, const std::vector<double>& y) {
    require_same_dim(x.size(), y.size());
    std::vector<double> z(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) z[k] = std::min(x[k], y[k]);
    return z;
}

namespace {

std::vector<std::vector<bool>> product_relation(const std::vector<PosetElement>& e) {
    std::vector<std::vector<bool>> leq(e.size(), std::vector<bool>(e.size(), false));
    for (std::size_t a = 0; a < e.size(); ++a)
        for (std::size_t b = 0; b < e.size(); ++b) leq[a][b] = product_leq(e[a], e[b]);
    return leq;
}

// Least upper bound (or greatest lower bound when `upper` is false) under an
// explicit relation; nullopt when it does not exist in the set.
std::optional<std::size_t> extremal_bound(const std::vector<std::vector<bool>>& leq, std::size_t a,
                                          std::size_t b, bool upper) {
    const std::size_t n = leq.size();
    std::vector<std::size_t> bounds;
    for (std::size_t c = 0; c < n; ++c) {
        bool ok = upper ? (leq[a][c] && leq[b][c]) : (leq[c][a] && leq[c][b]);
        if (ok) bounds.push_back(c);
    }
    for (std::size_t c : bounds) {
        bool best = true;
        for (std::size_t d : bounds) {
            if (upper ? !leq[c][d] : !leq[d][c]) {
                best = false;
                break;
            }
        }
        if (best) return c;
    }
    return std::nullopt;
}

}  // namespace

LatticeVerdict is_lattice(const std::vector<PosetElement>& elements, const std::vector<std::vector<bool>>& leq) {
    LatticeVerdict v;
    const std::size_t n = elements.size();
    if (leq.size() != n) throw OrderError("relation size does not match element count");
    for (const auto& row : leq)
        if (row.size() != n) throw OrderError("relation is not square");
    for (std::size_t a = 0; a < n; ++a) {
        if (!leq[a][a]) {
            v.is_lattice = false;
            v.witness = {a, a};
            v.reason = "relation is not reflexive";
            return v;
        }
        for (std::size_t b = 0; b < n; ++b) {
            if (a != b && leq[a][b] && leq[b][a]) {
                v.is_lattice = false;
                v.witness = {a, b};
                v.reason = "relation is not antisymmetric";
                return v;
            }
            for (std::size_t c = 0; c < n; ++c) {
                if (leq[a][b] && leq[b][c] && !leq[a][c]) {
                    v.is_lattice = false;
                    v.witness = {a, c};
                    v.reason = "relation is not transitive";
                    return v;
                }
            }
        }
    }
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (!extremal_bound(leq, a, b, true)) {
                v.is_lattice = false;
                v.witness = {a, b};
                v.reason = "join missing";
                return v;
            }
            if (!extremal_bound(leq, a, b, false)) {
                v.is_lattice = false;
                v.witness = {a, b};
                v.reason = "meet missing";
                return v;
            }
        }
    }
    return v;
}

LatticeVerdict is_lattice(const std::vector<PosetElement>& elements) {
    for (const auto& e : elements) require_same_dim(e.dim(), elements.front().dim());
    return is_lattice(elements, product_relation(elements));
}

FiniteLattice FiniteLattice::product(std::vector<PosetElement> elements) {
    if (elements.empty()) throw OrderError("empty lattice");
    for (const auto& e : elements) require_same_dim(e.dim(), elements.front().dim());
    std::vector<PosetElement> sorted = elements;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw OrderError("duplicate element");
    FiniteLattice L;
    L.mode_ = OrderMode::Product;
    L.elements_ = std::move(elements);
    const std::size_t n = L.elements_.size();
    L.leq_ = product_relation(L.elements_);
    std::map<PosetElement, std::size_t> index;
    for (std::size_t k = 0; k < n; ++k) index[L.elements_[k]] = k;
    L.join_.assign(n, std::vector<std::size_t>(n));
    L.meet_.assign(n, std::vector<std::size_t>(n));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            auto j = index.find(monoeq::join(L.elements_[a], L.elements_[b]));
            auto m = index.find(monoeq::meet(L.elements_[a], L.elements_[b]));
            if (j == index.end())
                throw OrderError("not a lattice: join of " + to_string(L.elements_[a]) + " and " +
                                 to_string(L.elements_[b]) + " is absent");
            if (m == index.end())
                throw OrderError("not a lattice: meet of " + to_string(L.elements_[a]) + " and " +
                                 to_string(L.elements_[b]) + " is absent");
            L.join_[a][b] = j->second;
            L.meet_[a][b] = m->second;
        }
    }
    L.build_tables();
    return L;
}

FiniteLattice FiniteLattice::explicit_order(std::vector<PosetElement> elements, std::vector<std::vector<bool>> leq) {
    if (elements.empty()) throw OrderError("empty lattice");
    auto verdict = is_lattice(elements, leq);
    if (!verdict.is_lattice) {
        const auto [a, b] = *verdict.witness;
        throw OrderError("not a lattice (" + verdict.reason + "): " + to_string(elements[a]) + ", " +
                         to_string(elements[b]));
    }
    FiniteLattice L;
    L.mode_ = OrderMode::Explicit;
    L.elements_ = std::move(elements);
    L.leq_ = std::move(leq);
    const std::size_t n = L.elements_.size();
    L.join_.assign(n, std::vector<std::size_t>(n));
    L.meet_.assign(n, std::vector<std::size_t>(n));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            L.join_[a][b] = *extremal_bound(L.leq_, a, b, true);
            L.meet_[a][b] = *extremal_bound(L.leq_, a, b, false);
        }
    L.build_tables();
    return L;
}

FiniteLattice FiniteLattice::chain(const std::vector<double>& values) {
    if (values.empty()) throw OrderError("empty lattice");
    for (std::size_t k = 1; k < values.size(); ++k)
        if (!(values[k] > values[k - 1])) throw OrderError("chain values must be strictly increasing");
    FiniteLattice L;
    L.mode_ = OrderMode::Product;
    L.chain_ = true;
    const std::size_t n = values.size();
    L.elements_.reserve(n);
    for (double v : values) L.elements_.push_back(PosetElement(std::vector<Rational>{rational_from_double(v)}));
    L.leq_.assign(n, std::vector<bool>(n, false));
    L.join_.assign(n, std::vector<std::size_t>(n));
    L.meet_.assign(n, std::vector<std::size_t>(n));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            L.leq_[a][b] = a <= b;
            L.join_[a][b] = std::max(a, b);
            L.meet_[a][b] = std::min(a, b);
        }
    L.real_.reserve(n);
    for (double v : values) L.real_.push_back({v});
    L.bottom_ = 0;
    L.top_ = n - 1;
    return L;
}

FiniteLattice FiniteLattice::reny(std::vector<PosetElement> elements, const RenyOrderSpec& spec) {
    const std::size_t n = elements.size();
    std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            leq[a][b] = reny_leq(elements[b].to_real(), elements[a].to_real(), spec);
    FiniteLattice L = explicit_order(std::move(elements), std::move(leq));
    L.mode_ = OrderMode::Reny;
    return L;
}

void FiniteLattice::build_tables() {
    const std::size_t n = elements_.size();
    real_.clear();
    for (const auto& e : elements_) real_.push_back(e.to_real());
    std::size_t bot = 0, top = 0;
    for (std::size_t k = 1; k < n; ++k) {
        bot = meet_[bot][k];
        top = join_[top][k];
    }
    bottom_ = bot;
    top_ = top;
    chain_ = true;
    for (std::size_t a = 0; a < n && chain_; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (!leq_[a][b] && !leq_[b][a]) {
                chain_ = false;
                break;
            }
}

std::size_t FiniteLattice::join_of(const std::vector<std::size_t>& set) const {
    if (set.empty()) return bottom_;
    std::size_t j = set.front();
    for (std::size_t a : set) j = join_[j][a];
    return j;
}

std::optional<std::size_t> FiniteLattice::index_of(const PosetElement& e) const {
    for (std::size_t k = 0; k < elements_.size(); ++k)
        if (elements_[k] == e) return k;
    return std::nullopt;
}

std::optional<std::size_t> FiniteLattice::index_of_real(const std::vector<double>& x, double tol) const {
    for (std::size_t k = 0; k < real_.size(); ++k) {
        if (real_[k].size() != x.size()) continue;
        bool eq = true;
        for (std::size_t d = 0; d < x.size(); ++d)
            if (std::fabs(real_[k][d] - x[d]) > tol) eq = false;
        if (eq) return k;
    }
    return std::nullopt;
}

double FiniteLattice::distance(std::size_t a, std::size_t b) const {
    double s = 0.0;
    for (std::size_t d = 0; d < real_[a].size(); ++d) {
        double diff = real_[a][d] - real_[b][d];
        s += diff * diff;
    }
    return std::sqrt(s);
}

std::vector<std::vector<std::size_t>> FiniteLattice::maximal_chains() const {
    const std::size_t n = size();
    // Covering relation: a < b with nothing strictly between.
    std::vector<std::vector<std::size_t>> covers(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (!less(a, b)) continue;
            bool cover = true;
            for (std::size_t c = 0; c < n && cover; ++c)
                if (less(a, c) && less(c, b)) cover = false;
            if (cover) covers[a].push_back(b);
        }
    std::vector<std::vector<std::size_t>> chains;
    std::vector<std::size_t> path{bottom_};
    auto rec = [&](auto&& self, std::size_t a) -> void {
        if (covers[a].empty()) {
            chains.push_back(path);
            return;
        }
        for (std::size_t b : covers[a]) {
            path.push_back(b);
            self(self, b);
            path.pop_back();
        }
    };
    rec(rec, bottom_);
    return chains;
}

bool reny_leq(const std::vector<double>& t_prime, const std::vector<double>& t, const RenyOrderSpec& spec,
              double tol) {
    if (t_prime.size() != t.size()) throw OrderError("length mismatch");
    if (t.empty()) throw OrderError("empty type vector");
    if (spec.alpha < 0) throw OrderError("alpha must be nonnegative");
    for (const auto* v : {&t_prime, &t}) {
        for (std::size_t k = 0; k < v->size(); ++k) {
            if ((*v)[k] < -tol || (*v)[k] > 1.0 + tol) throw OrderError("type entries must lie in [0,1]");
            if (k > 0 && (*v)[k] > (*v)[k - 1] + tol) throw OrderError("type vector must be nonincreasing");
        }
    }
    if (t_prime[0] < t[0] - tol) return false;
    double sp = t_prime[0], s = t[0];
    for (std::size_t k = 1; k < t.size(); ++k) {
        if (t_prime[k] - spec.alpha * sp < t[k] - spec.alpha * s - tol) return false;
        sp += t_prime[k];
        s += t[k];
    }
    return true;
}

}  // namespace monoeq
