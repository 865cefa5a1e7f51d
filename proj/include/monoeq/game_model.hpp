#pragma once

#include "monoeq/lattice_order.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace monoeq {

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One-dimensional ordered type space [lo, hi] of a player.
struct TypeSpace {
    double lo = 0.0;
    double hi = 1.0;
    double width() const { return hi - lo; }
};

// Marginal density on [lo, hi]; an empty pdf means uniform.
struct Marginal {
    double lo = 0.0;
    double hi = 1.0;
    std::function<double(double)> pdf;
    double bound = 0.0;          // declared sup of pdf (needed for rejection sampling)
    std::vector<double> kinks;   // points where pdf is not smooth
    bool uniform() const { return !pdf; }
    double density(double t) const;
};

enum class DensityStructure { IndependentUniform, IndependentMarginals, General };

class JointDensity {
public:
    JointDensity() = default;
    static JointDensity independent_uniform(const std::vector<TypeSpace>& boxes);
    static JointDensity independent(std::vector<Marginal> marginals);
    // General density on the product box; normalized by tensor quadrature at
    // construction.  `bound` is the declared sup of the unnormalized f.
    static JointDensity general(const std::vector<TypeSpace>& boxes,
                                std::function<double(const std::vector<double>&)> f, double bound);

    DensityStructure structure() const { return structure_; }
    bool independent() const { return structure_ != DensityStructure::General; }
    std::size_t players() const { return boxes_.size(); }
    const TypeSpace& box(std::size_t i) const { return boxes_[i]; }
    const Marginal& marginal(std::size_t i) const { return marginals_[i]; }
    double normalization() const { return norm_; }
    double bound() const { return bound_; }  // sup of the normalized density
    double operator()(const std::vector<double>& t) const;

private:
    DensityStructure structure_ = DensityStructure::IndependentUniform;
    std::vector<TypeSpace> boxes_;
    std::vector<Marginal> marginals_;
    std::function<double(const std::vector<double>&)> joint_;
    double norm_ = 1.0;
    double bound_ = 1.0;
};

enum class ActionMode { FiniteLattice, Interval, IntervalWithQuit };

struct ActionSpace {
    ActionMode mode = ActionMode::FiniteLattice;
    FiniteLattice lattice;   // finite mode
    double lo = 0.0;         // interval modes
    double hi = 1.0;
    double quit = -1.0;      // quit action value (interval-with-quit)

    static ActionSpace finite(FiniteLattice L);
    static ActionSpace chain(const std::vector<double>& values);
    static ActionSpace interval(double lo, double hi);
    static ActionSpace interval_with_quit(double quit, double hi);
    std::size_t size() const;  // finite mode only
    // Dyadic grid of an interval space (plus the quit action when present).
    ActionSpace discretize(int intervals) const;
};

enum class Smoothness { Continuous, PiecewiseWithTies };

// Ex-post payoff u_i(a, t) with actions given as lattice indices.
using PayoffFn = std::function<double(int player, const std::vector<int>& actions, const std::vector<double>& types)>;

struct BayesGame {
    std::string name;
    int n = 0;
    std::vector<TypeSpace> types;
    std::vector<ActionSpace> actions;
    JointDensity density;
    PayoffFn payoff;
    double bound = 0.0;                 // declared |u| bound M
    Smoothness smoothness = Smoothness::Continuous;
    // Polynomial degree of each payoff in every opponent type on each strategy
    // cell (-1: not polynomial).  Enables the exact integration path.
    int opponent_degree = -1;
    std::vector<std::vector<double>> kinks;  // per player: type points where payoffs break

    void validate() const;
    const FiniteLattice& lattice(int i) const { return actions[i].lattice; }
};

// Step strategy: cells [cuts[k], cuts[k+1]) with action actions[k]; the last
// cell is closed.  Monotone strategies additionally have nondecreasing actions.
struct StepStrategy {
    std::vector<double> cuts;   // size K+1, strictly increasing
    std::vector<int> actions;   // size K

    static StepStrategy constant(double lo, double hi, int action);
    int eval(double t) const;
    std::size_t cells() const { return actions.size(); }
    std::vector<double> breakpoints() const;  // interior cuts
    void validate() const;
    StepStrategy merged() const;              // joins adjacent cells with equal actions
};

int eval_strategy(const StepStrategy& s, double t);
bool is_monotone(const StepStrategy& s, const FiniteLattice& L);

struct MixedAction {
    std::vector<std::pair<int, double>> atoms;

    static MixedAction pure(int a) { return MixedAction{{{a, 1.0}}}; }
    double weight_of(int a) const;
    void validate(std::size_t action_count) const;
};

struct BehavioralStrategy {
    std::vector<double> cuts;
    std::vector<MixedAction> cells;

    static BehavioralStrategy from_step(const StepStrategy& s);
    const MixedAction& at(double t) const;
    std::size_t cell_index(double t) const;
    void validate(std::size_t action_count) const;
};

using Profile = std::vector<StepStrategy>;
using BehavioralProfile = std::vector<BehavioralStrategy>;
BehavioralProfile to_behavioral(const Profile& p);

struct IntegrationOptions {
    enum class Method { Auto, Exact, Quadrature } method = Method::Auto;
    int order = 32;                  // Gauss-Legendre points per axis and cell
    bool estimate_residual = true;   // compare against a half-order rule
};

struct InterimValue {
    double value = 0.0;
    std::string method;   // "exact" or "quadrature"
    double residual = 0.0;
};

// V_i(a_i, t_i; g_{-i}); entry i of `others` is ignored.
InterimValue interim_payoff(const BayesGame& game, int i, int a_i, double t_i, const BehavioralProfile& others,
                            const IntegrationOptions& opts = {});
// Interim payoffs of every own action at t_i in a single pass.
std::vector<double> interim_payoffs(const BayesGame& game, int i, double t_i, const BehavioralProfile& others,
                                    const IntegrationOptions& opts = {}, std::string* method = nullptr,
                                    double* residual = nullptr);
InterimValue interim_payoff_mixed(const BayesGame& game, int i, const MixedAction& sigma, double t_i,
                                  const BehavioralProfile& others, const IntegrationOptions& opts = {});

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
};
McEstimate mc_interim_oracle(const BayesGame& game, int i, int a_i, double t_i, const BehavioralProfile& others,
                             std::size_t samples, std::uint64_t seed);

struct BestResponseSet {
    std::vector<int> actions;     // ascending indices
    std::vector<double> values;   // interim payoff of every own action
    double max_value = 0.0;
};
BestResponseSet best_response_set(const BayesGame& game, int i, double t_i, const BehavioralProfile& others,
                                  double tol = 1e-10, const IntegrationOptions& opts = {});
BestResponseSet best_response_from_values(const std::vector<double>& values, double tol);

// Maximal element of a best-response set: the join when it belongs to the set,
// otherwise the highest-index maximal element.
int select_maximal(const FiniteLattice& L, const std::vector<int>& set);

// Maximizers of a function on an interval: a dyadic grid is refined until the
// top maximizer moves by less than `tol`, then every grid maximizer is polished
// by Brent's method on its neighbouring cells.
struct IntervalMaximizer {
    std::vector<double> maximizers;
    double max_value = 0.0;
    int intervals = 0;      // final grid size
    bool approximate = true;
};
IntervalMaximizer best_response_interval(const std::function<double(double)>& f, double lo, double hi,
                                         double tol = 1e-6, double value_tol = 1e-10, int max_intervals = 1 << 16);

}  // namespace monoeq
