#pragma once

#include "monoeq/game_model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace monoeq {

class AuctionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Affine map between normalized types t in [0,1] and values v in [lo, hi].
struct ValueScale {
    double lo = 0.0;
    double hi = 1.0;
    double to_value(double t) const { return lo + (hi - lo) * t; }
    double to_type(double v) const { return (v - lo) / (hi - lo); }
};

// Winner payoff (W_i - C_i) * D * P_i - Phi_i with uniform tie-breaking among the
// highest bids above the quit action Q.  Values passed to W are in value units.
struct GeneralizedAuction {
    std::string name;
    int n = 2;
    std::vector<double> bbar;
    double quit = -1.0;
    std::function<double(int i, double b_i, const std::vector<double>& v)> W;
    std::function<double(int i, double b_i)> C;
    std::function<double(int i, double b_i)> Phi;
    std::function<double(const std::vector<double>& b)> D;
    // Experimental per-player demand slot; when set it replaces D for player i.
    std::function<double(int i, const std::vector<double>& b)> D_player;
    JointDensity density;            // over normalized types [0,1]^n
    std::vector<ValueScale> scales;  // per player value range
    bool private_values = false;     // W_i depends on v_i only
    double tie_tol = 1e-12;

    void validate() const;
    bool is_quit(double b) const { return b <= quit + tie_tol; }
    JointDensity value_density() const;  // the same density in value units
    std::vector<TypeSpace> value_boxes() const;
};

struct AuctionOutcome {
    std::vector<int> winners;
    std::vector<double> payments;   // expected payments under the tie lottery
    std::vector<double> payoffs;    // expected payoffs under the tie lottery
    bool tie = false;
};

AuctionOutcome resolve_outcome(const GeneralizedAuction& a, const std::vector<double>& b, const std::vector<double>& v);
std::vector<double> ex_post_payoff(const GeneralizedAuction& a, const std::vector<double>& b,
                                   const std::vector<double>& v);
double ex_post_payoff_player(const GeneralizedAuction& a, int i, const std::vector<double>& b,
                             const std::vector<double>& v);
// D(b) times i's share of the tie lottery when i is among the highest bidders
// above Q, zero otherwise; the payoff of a non-quit bid is (W - C) * this - Phi.
double win_weight(const GeneralizedAuction& a, int i, const std::vector<double>& b);

GeneralizedAuction build_first_price(int n, JointDensity density, std::vector<ValueScale> scales = {},
                                     std::vector<double> bbar = {}, double quit = -1.0);
// w(i, b_i, v) with v in value units; Assumption-4-type conditions are validated
// on a grid and violations raise AuctionError with a witness.
GeneralizedAuction build_all_pay(int n, std::function<double(int, double, const std::vector<double>&)> w,
                                 JointDensity density, std::vector<double> bbar = {}, double quit = -1.0,
                                 bool private_values = false);
// Price competition: D_hat(p) total demand at price vector p, pbar the price caps,
// density over costs c in [0,1]^n (v = 1 - c).
GeneralizedAuction build_bertrand(int n, std::function<double(const std::vector<double>&)> D_hat,
                                  std::vector<double> pbar, JointDensity density, double quit = -1.0);

struct AssumptionItem {
    int item = 0;
    std::string statement;
    bool holds = true;
    std::string witness;
};

struct AuctionAssumptionReport {
    std::vector<AssumptionItem> items;
    std::string grid;
    bool holds() const;
};

AuctionAssumptionReport validate_auction_assumptions(const GeneralizedAuction& a, int value_points = 5, int bid_points = 9);

// Bid function over values: cells [cuts[k], cuts[k+1]) bid bids[k].
struct BidStrategy {
    std::vector<double> cuts;
    std::vector<double> bids;
    double bid_at(double v) const;
    static BidStrategy constant(double lo, double hi, double b) { return BidStrategy{{lo, hi}, {b}}; }
};

struct SimulationRow {
    std::size_t draw = 0;
    std::vector<double> bids;
    std::vector<double> values;
    int winner = -1;
    double price = 0.0;
    std::vector<double> payoffs;
};

struct SimulationStats {
    std::size_t draws = 0;
    double revenue_mean = 0.0;
    double revenue_ci = 0.0;   // half-width of the 95% interval
    double efficiency_rate = 0.0;
    double tie_frequency = 0.0;
    std::vector<double> payoff_means;
};

SimulationStats simulate(const GeneralizedAuction& a, const std::vector<BidStrategy>& profile, std::size_t draws,
                         std::uint64_t seed, std::vector<SimulationRow>* rows = nullptr);

// Finite Bayesian game on explicit bid grids (quit included iff listed).
// Types of the resulting game are values in value units.
BayesGame to_bayes_game(const GeneralizedAuction& a, const std::vector<std::vector<double>>& grids);

// Second-price auction with a finite bid set: the winner pays the highest
// competing bid, ties split uniformly.
BayesGame build_second_price_game(const std::vector<double>& bids, const std::vector<TypeSpace>& boxes);

}  // namespace monoeq
