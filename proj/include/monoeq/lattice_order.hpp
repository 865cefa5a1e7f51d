#pragma once

#include <boost/rational.hpp>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace monoeq {

using Rational = boost::rational<long long>;

class OrderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A point of a partially ordered set.  Explicit finite lattices keep exact
// rational coordinates so comparisons are tie-free.
struct PosetElement {
    std::vector<Rational> coords;

    PosetElement() = default;
    explicit PosetElement(std::vector<Rational> c) : coords(std::move(c)) {}
    PosetElement(std::initializer_list<long long> c);

    std::size_t dim() const { return coords.size(); }
    std::vector<double> to_real() const;
    bool operator==(const PosetElement& o) const { return coords == o.coords; }
    bool operator<(const PosetElement& o) const { return coords < o.coords; }
};

std::string to_string(const PosetElement& x);
Rational parse_rational(const std::string& s);
Rational rational_from_double(double x);

// Coordinatewise (product) order.
bool product_leq(const PosetElement& x, const PosetElement& y);
bool product_leq(const std::vector<double>& x, const std::vector<double>& y, double tol = 1e-12);

PosetElement join(const PosetElement& x, const PosetElement& y);
PosetElement meet(const PosetElement& x, const PosetElement& y);
std::vector<double> join(const std::vector<double>& x, const std::vector<double>& y);
std::vector<double> meet(const std::vector<double>& x, const std::vector<double>& y);

enum class OrderMode { Product, Explicit, Reny };

struct LatticeVerdict {
    bool is_lattice = true;
    std::optional<std::pair<std::size_t, std::size_t>> witness;
    std::string reason;
};

// Checks that leq is a partial order on the elements and that every pair has a
// join and a meet inside the set.
LatticeVerdict is_lattice(const std::vector<PosetElement>& elements,
                          const std::vector<std::vector<bool>>& leq);
LatticeVerdict is_lattice(const std::vector<PosetElement>& elements);  // product order

struct RenyOrderSpec {
    int m = 1;
    double alpha = 0.0;
};

// A finite lattice with precomputed order, join and meet tables.  Elements are
// addressed by index; real coordinates are cached for payoff evaluation.
class FiniteLattice {
public:
    FiniteLattice() = default;

    static FiniteLattice product(std::vector<PosetElement> elements);
    static FiniteLattice explicit_order(std::vector<PosetElement> elements,
                                        std::vector<std::vector<bool>> leq);
    // Totally ordered set of real numbers; values must be strictly increasing.
    static FiniteLattice chain(const std::vector<double>& values);
    // Finite set of type-like vectors under the endogenous order below.
    static FiniteLattice reny(std::vector<PosetElement> elements, const RenyOrderSpec& spec);

    std::size_t size() const { return real_.size(); }
    OrderMode mode() const { return mode_; }
    bool is_chain() const { return chain_; }
    const std::vector<double>& coords(std::size_t k) const { return real_[k]; }
    double value(std::size_t k) const { return real_[k][0]; }
    const std::vector<PosetElement>& elements() const { return elements_; }

    bool leq(std::size_t a, std::size_t b) const { return leq_[a][b]; }
    bool less(std::size_t a, std::size_t b) const { return a != b && leq_[a][b]; }
    std::size_t join(std::size_t a, std::size_t b) const { return join_[a][b]; }
    std::size_t meet(std::size_t a, std::size_t b) const { return meet_[a][b]; }
    std::size_t bottom() const { return bottom_; }
    std::size_t top() const { return top_; }

    std::size_t join_of(const std::vector<std::size_t>& set) const;
    std::optional<std::size_t> index_of(const PosetElement& e) const;
    std::optional<std::size_t> index_of_real(const std::vector<double>& x, double tol = 1e-12) const;
    double distance(std::size_t a, std::size_t b) const;  // Euclidean metric on coordinates
    std::vector<std::vector<std::size_t>> maximal_chains() const;

private:
    void build_tables();

    OrderMode mode_ = OrderMode::Product;
    bool chain_ = false;
    std::vector<PosetElement> elements_;
    std::vector<std::vector<double>> real_;
    std::vector<std::vector<bool>> leq_;
    std::vector<std::vector<std::size_t>> join_;
    std::vector<std::vector<std::size_t>> meet_;
    std::size_t bottom_ = 0;
    std::size_t top_ = 0;
};

// Endogenous order on nonincreasing unit-vectors: t' >= t iff t'_1 >= t_1 and
// t'_k - alpha * sum_{j<k} t'_j >= t_k - alpha * sum_{j<k} t_j for k >= 2.
// Returns true iff t <= t_prime in that order.
bool reny_leq(const std::vector<double>& t_prime, const std::vector<double>& t, const RenyOrderSpec& spec,
              double tol = 1e-12);

}  // namespace monoeq
