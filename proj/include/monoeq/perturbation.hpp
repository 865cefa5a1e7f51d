#pragma once

#include "monoeq/auctions.hpp"
#include "monoeq/game_model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace monoeq {

class PerturbationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PerturbationMode { FiniteDense, AuctionUniformQuit };

struct PerturbationScheme {
    PerturbationMode mode = PerturbationMode::FiniteDense;
    int m = 2;
    // Finite mode: per-player weights over the action set (empty: uniform).
    std::vector<std::vector<double>> weights;

    void validate() const;
    std::vector<double> weights_for(int player, std::size_t action_count) const;
};

// (1 - 1/m) delta_a + (1/m) sum_k w_k delta_k.
MixedAction perturb_action_finite(int a, std::size_t action_count, int m, const std::vector<double>& weights = {});
// Applies the tremble to every atom of a mixture (linear extension).
MixedAction perturb_mixture_finite(const MixedAction& sigma, std::size_t action_count, int m,
                                   const std::vector<double>& weights = {});

// Mixture of finitely many bid atoms (the quit action is an atom at Q) and a
// uniform component on [uniform_lo, uniform_hi].
struct BidMixture {
    std::vector<std::pair<double, double>> atoms;  // (bid, probability)
    double uniform_weight = 0.0;
    double uniform_lo = 0.0;
    double uniform_hi = 0.0;
    double total() const;
};

// (1 - 1/m) delta_b + (1/2m) U[0, bbar] + (1/2m) delta_Q.
BidMixture perturb_action_auction(double b, int m, double bbar, double quit);

// Base game (finite actions) or generalized auction together with a scheme.
struct PerturbedGame {
    std::optional<BayesGame> game;
    std::optional<GeneralizedAuction> auction;
    PerturbationScheme scheme;
};

// u_i^m(a, t) = u_i(perturbed a, t): finite games sum over the product of
// perturbed mixtures; action indices refer to the base game's lattices.
double perturbed_payoff(const PerturbedGame& pg, int i, const std::vector<int>& a, const std::vector<double>& t);
// Auction mode: bids and values in value units; uniform components are
// integrated by piecewise Gauss-Legendre quadrature split at the other bids.
double perturbed_auction_payoff(const PerturbedGame& pg, int i, const std::vector<double>& b,
                                const std::vector<double>& v, int order = 16);

// The perturbed game as a stand-alone finite game (brute-force payoffs).
BayesGame make_perturbed_game(const BayesGame& base, const PerturbationScheme& scheme);

BehavioralStrategy embed_strategy(const StepStrategy& g, std::size_t action_count, const PerturbationScheme& scheme,
                                  int player = 0);
BehavioralStrategy embed_behavioral(const BehavioralStrategy& g, std::size_t action_count,
                                    const PerturbationScheme& scheme, int player = 0);
BehavioralProfile embed_profile(const BayesGame& game, const Profile& profile, const PerturbationScheme& scheme);

// Interim payoffs of every own action in the perturbed game against opponents
// playing `others` in it: V_i^m(a) = sum_k ã^m(a)(k) V_i(k; embedded others).
std::vector<double> perturbed_interim_payoffs(const BayesGame& game, const PerturbationScheme& scheme, int i,
                                              double t_i, const BehavioralProfile& others,
                                              const IntegrationOptions& opts = {});
// Same, but `embedded_others` are already the perturbed opponent strategies.
std::vector<double> perturbed_interim_from_embedded(const BayesGame& game, const PerturbationScheme& scheme, int i,
                                                    double t_i, const BehavioralProfile& embedded_others,
                                                    const IntegrationOptions& opts = {});

struct ExpansionTerm {
    std::string roles;     // per opponent: 'U' uniform, 'Q' quit, 'S' strategy ('-' for the player itself)
    double weight = 0.0;   // (1-1/m)^{|S|+1} (1/2m)^{|U|+|Q|}
    double value = 0.0;    // conditional expected payoff given the partition
    double contribution() const { return weight * value; }
};

struct AuctionExpansion {
    double value = 0.0;        // V_i^m(b_i, v_i; alpha_-i)
    double tremble_value = 0.0;  // V_i(b_i, v_i; perturbed alpha_-i)
    double residual = 0.0;     // R_i^m, independent of b_i
    std::vector<ExpansionTerm> terms;
};

// Opponents play bid strategies (entry i ignored).  n <= 4.
AuctionExpansion auction_interim_expansion(const GeneralizedAuction& auction, int m, int i, double b_i, double v_i,
                                           const std::vector<BidStrategy>& others, int order = 16);
// V_i(b_i, v_i; perturbed alpha_-i), i.e. the partition sum without the own tremble.
double auction_tremble_value(const GeneralizedAuction& auction, int m, int i, double b_i, double v_i,
                             const std::vector<BidStrategy>& others, std::vector<ExpansionTerm>* terms = nullptr,
                             int order = 16);

}  // namespace monoeq
