#pragma once

#include "monoeq/game_model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace monoeq {

// Re-evaluable counterexample to a grid-certified condition.
struct ConditionWitness {
    std::vector<double> x;        // lower action (or type point for affiliation)
    std::vector<double> x_prime;  // higher / second action
    std::optional<double> y;      // lower type
    std::optional<double> y_prime;
    std::vector<double> values;   // evaluated quantities entering the violated inequality
    std::string inequality;       // human-readable statement of what failed
    std::string context;          // e.g. the opponent profile under which it failed
    std::vector<double> opponent_cutoffs;
};

struct ConditionReport {
    std::string condition;
    bool holds = true;
    std::optional<ConditionWitness> witness;
    std::string grid;
    double tol = 1e-9;
    std::string family;   // tested opponent family, when composed with interim payoffs
    std::size_t checks = 0;

    std::string verdict() const { return holds ? "holds-on-grid" : "fails"; }
};

using ActionTypeFn = std::function<double(int action, double type)>;
using LatticeFn = std::function<double(int action)>;
using PointDensityFn = std::function<double(const std::vector<double>&)>;

// h(x', y) - h(x, y) >= (>) 0 implies h(x', y') - h(x, y') >= (>) 0 for x < x', y < y'.
ConditionReport check_single_crossing(const ActionTypeFn& h, const FiniteLattice& actions,
                                      const std::vector<double>& types, double tol = 1e-9);
// h(x', y') - h(x, y') >= h(x', y) - h(x, y) - tol for x < x', y < y'.
ConditionReport check_increasing_differences(const ActionTypeFn& h, const FiniteLattice& actions,
                                             const std::vector<double>& types, double tol = 1e-9);
ConditionReport check_supermodular(const LatticeFn& h, const FiniteLattice& L, double tol = 1e-9);
ConditionReport check_quasi_supermodular(const LatticeFn& h, const FiniteLattice& L, double tol = 1e-9);
// f(t v t') f(t ^ t') >= f(t) f(t') - tol on the product grid.
ConditionReport check_affiliated(const PointDensityFn& f, const std::vector<std::vector<double>>& grid,
                                 double tol = 1e-9);

// Family of opponent profiles used to test conditions that quantify over all
// monotone opponent strategies.
struct OpponentFamily {
    std::string description;
    std::vector<BehavioralProfile> profiles;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> cutoffs;  // flattened opponent cutoffs per member
};

// Monotone step strategies of every opponent along each maximal chain of its
// action lattice, with cutoffs on a dyadic grid (coarse points first, constant
// strategies last).  The dyadic level is the largest keeping the family within
// `cap` members.
OpponentFamily cutoff_family(const BayesGame& game, int player, int max_level = 5, std::size_t cap = 64);
// Family built from explicit opponent cutoff lists for binary-chain opponents.
OpponentFamily explicit_cutoff_family(const BayesGame& game, int player, const std::vector<double>& cutoffs);

// Composes the checkers with the interim payoff V_i(., .; g_{-i}) for every
// member of the family.  `which` lists any of "scc", "idc", "supermodular",
// "quasi-supermodular".
std::vector<ConditionReport> check_player_conditions(const BayesGame& game, int player, const OpponentFamily& family,
                                                     const std::vector<double>& types,
                                                     const std::vector<std::string>& which, double tol = 1e-9);

std::vector<double> uniform_grid(double lo, double hi, int points);

}  // namespace monoeq
