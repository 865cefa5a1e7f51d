#pragma once

#include "monoeq/auctions.hpp"
#include "monoeq/game_model.hpp"
#include "monoeq/solver.hpp"
#include "monoeq/verification.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace monoeq {

// ---------------------------------------------------------------------------
// Payoff registry: polynomial payoff tables, piecewise in the player's own type.

// coef * prod_k t_k^powers[k]
struct PolyTerm {
    double coef = 0.0;
    std::vector<int> powers;
};

// A piece applies when the player's own type is <= upto (first match wins; the
// last piece should use +infinity).
struct PayoffPiece {
    double upto = std::numeric_limits<double>::infinity();
    std::vector<PolyTerm> terms;
};

struct PayoffEntry {
    std::vector<int> actions;   // action index per player
    int player = 0;
    std::vector<PayoffPiece> pieces;
};

// Finite game whose payoffs are polynomials in types; unlisted entries are 0.
BayesGame build_polynomial_table_game(const std::string& name, const std::vector<TypeSpace>& boxes,
                                      const std::vector<FiniteLattice>& lattices,
                                      const std::vector<PayoffEntry>& entries);

// ---------------------------------------------------------------------------
// Named games and reference profiles.

// Two players, binary chains {1, 2}: single crossing holds, increasing differences fails.
BayesGame single_crossing_game();
Profile single_crossing_monotone_profile();          // cutoffs 4/5 and 7/8
double single_crossing_perfect_cutoff();             // r = (-173 + sqrt(34889)) / 80
Profile single_crossing_perfect_profile();           // plays 2 below 1/5 and below r
// The completely mixed sequence approaching the perfect profile at level k >= 5.
BehavioralProfile single_crossing_sequence_level(int k);
// Closed forms of V(2) - V(1) against a cutoff opponent (player 2 plays 1 below x2).
double single_crossing_diff1(double x2, double t1);
double single_crossing_diff2(double x1);

// Player 1 on the product lattice {0,1}^2, player 2 on {1, 2}.
BayesGame two_dimensional_game();
Profile two_dimensional_profile();                   // cutoffs 1/2, 4/5 and 7/8

// First-price auction, values U[0,5] and U[7,8], bids {0,...,8} (optionally a quit bid below 0).
BayesGame first_price_example_game(bool with_quit = false);
Profile first_price_reference_profile(bool with_quit = false);   // cutoffs 3/2, 3; constant 3
Profile first_price_intro_profile(bool with_quit = false);       // constant bids 5 and 6
// (1 - 1/m) on the played bid and 1/(8m) on each other bid of {0,...,8}.
// Indices refer to the grid without a quit bid.
BehavioralProfile first_price_sequence_level(const Profile& profile, int m);
// Bidder 2's threshold where bid 4 starts beating bid 3 against bidder 1's level-m strategy,
// and bidder 1's threshold where bid 3 starts beating bid 1 against bidder 2's.
double first_price_threshold_bidder2(int m);
double first_price_threshold_bidder1(int m);

// Second-price auction, values U[1,2], bids {0, 1, 2}.
BayesGame second_price_example_game();
Profile second_price_reference_profile();            // bid 1 below 3/2, 2 above
Profile second_price_trivial_profile();              // constant bids 0 and 2
BehavioralProfile second_price_sequence_level(const Profile& profile, int m);

// Coordination game with binary actions and type-free payoffs.
BayesGame coordination_game();
Profile coordination_profile(int action);            // both players play `action`
// (1 - 1/m) on the played action and 1/m on the other one.
BehavioralProfile coordination_sequence_level(const Profile& profile, int m);

// Symmetric first-price auction with iid U[0,1] values and quit action -1.
GeneralizedAuction uniform_first_price_auction(int n = 2);

std::vector<SequenceLevel> make_sequence(const std::vector<int>& levels,
                                         const std::function<BehavioralProfile(int)>& level_profile);

// Root of f on [lo, hi] by bisection; requires a sign change (NaN otherwise).
double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14);

// ---------------------------------------------------------------------------
// Golden checks used by the reproduction driver.

struct GoldenCheck {
    std::string scenario;
    std::string name;
    double value = 0.0;
    double pinned = 0.0;
    double tol = 0.0;
    bool passed = false;
    std::string detail;
};

struct ScenarioOptions {
    int m_max = 1024;          // largest perturbation level
    int grid_log2 = 12;        // solver type grid
    std::uint64_t seed = 1;
    std::map<std::string, double> pinned_overrides;   // "scenario/check" -> pinned value
};

std::vector<std::string> scenario_names();
std::string scenario_description(const std::string& name);
// Canonical lower-case scenario name, or nullopt when unknown ("exam-SCC" and "exam-scc" agree).
std::optional<std::string> canonical_scenario(const std::string& name);
std::vector<GoldenCheck> reproduce_scenario(const std::string& name, const ScenarioOptions& options = {});

}  // namespace monoeq
