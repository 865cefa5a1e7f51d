#pragma once

#include "monoeq/auctions.hpp"
#include "monoeq/game_model.hpp"
#include "monoeq/perturbation.hpp"
#include "monoeq/verification.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace monoeq {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolveSettings {
    int grid_log2 = 12;              // type grid of 2^grid_log2 cells for best responses
    double breakpoint_tol = 1e-12;   // bisection precision of best-response breakpoints
    double br_tol = 1e-10;           // payoff slack defining the best-response set
    double tol = 1e-12;              // cutoff movement regarded as stationary
    double residual_tol = 1e-8;      // best-response residual accepted as equilibrium
    double damping = 0.5;
    bool adaptive_damping = true;
    bool sequential = false;         // Gauss-Seidel instead of Jacobi updates
    bool newton_polish = true;       // Newton refinement of indifference conditions
    int max_newton_vars = 32;
    int max_iterations = 2000;
    std::vector<int> m_schedule{2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
    std::vector<int> bid_grid_log2{2, 3, 4, 5, 6, 7, 8};  // auction bid-grid steps 2^-k (relative to bbar)
    double limit_factor = 10.0;      // limit detection: cutoffs within factor * grid step
    int limit_levels = 3;            // ... for this many consecutive levels
    std::uint64_t seed = 1;
    IntegrationOptions integration;
    std::vector<std::vector<double>> tremble_weights;  // per player, empty = uniform
    // Auctions: fixed per-player bid grids replacing the dyadic schedule.
    std::vector<std::vector<double>> fixed_bid_grids;
    int auction_newton_vars = 512;   // Newton variable cap for auction levels
    bool auction_certificate = true;

    void validate() const;
    double grid_step(double width) const { return width / static_cast<double>(1 << grid_log2); }
};

enum class InitKind { ExtremalLow, ExtremalHigh, Custom };

struct IterationRecord {
    int iteration = 0;
    std::vector<double> cutoffs;   // flattened raw cutoff state
    double movement = 0.0;
    double residual = 0.0;
    double damping = 0.0;
    std::string step;              // "br" or "newton"
};

struct UniquenessVerdict {
    std::vector<std::vector<double>> near_zero;   // cutoff tuples with residual < tol
    std::vector<std::vector<double>> minimal;     // residual-minimal tuples
    std::size_t minimal_components = 0;           // connected components of the minimal set
    double min_residual = 0.0;
    std::vector<std::vector<double>> heatmap;     // rows: tuple..., residual
};

struct EquilibriumResult {
    Profile profile;
    bool converged = false;
    std::string status;            // converged | max-iterations | cycling | idc-violation
    double residual = 0.0;         // sup over players and sampled types of the best-response gap
    std::vector<double> player_residuals;
    int iterations = 0;
    std::vector<IterationRecord> trace;
    std::optional<std::string> witness;
    std::optional<UniquenessVerdict> uniqueness;
};

// Evaluator of all own-action interim values at a type, prepared for a fixed
// opponent profile.
using ValueEvaluator = std::function<std::vector<double>(double t)>;
using EvaluatorFactory = std::function<ValueEvaluator(int i, const Profile& profile)>;

struct MonotoneBrResult {
    std::optional<StepStrategy> strategy;
    std::optional<std::string> witness;     // set when the raw selection is not monotone
    double residual = 0.0;                  // gap of `current` (when given) on the grid
};

MonotoneBrResult monotone_br_step(const BayesGame& game, int i, const Profile& profile, const SolveSettings& settings,
                                  const StepStrategy* current = nullptr);
MonotoneBrResult monotone_br_from_evaluator(const FiniteLattice& L, const TypeSpace& box, const ValueEvaluator& f,
                                            const SolveSettings& settings, const StepStrategy* current = nullptr);

// Cutoff representation of monotone strategies: c_a = inf{t : s(t) >= a}, hi meaning never.
std::vector<double> strategy_cutoffs(const StepStrategy& s, const FiniteLattice& L, const TypeSpace& box);
StepStrategy strategy_from_cutoffs(const std::vector<double>& c, const FiniteLattice& L, const TypeSpace& box);

Profile extremal_profile(const BayesGame& game, bool high);

// Generic engine over per-player lattices and an evaluator factory.
EquilibriumResult solve_cutoff_dynamics(const std::vector<FiniteLattice>& lattices, const std::vector<TypeSpace>& boxes,
                                        const EvaluatorFactory& factory, const Profile& init,
                                        const SolveSettings& settings);
// Sup over players and grid types (plus points next to every breakpoint) of the best-response gap.
double profile_residual(const std::vector<FiniteLattice>& lattices, const std::vector<TypeSpace>& boxes,
                        const EvaluatorFactory& factory, const Profile& profile, const SolveSettings& settings,
                        std::vector<double>* per_player = nullptr);

EvaluatorFactory base_evaluators(const BayesGame& game, const IntegrationOptions& opts = {});
EvaluatorFactory perturbed_evaluators(const BayesGame& game, const PerturbationScheme& scheme,
                                      const IntegrationOptions& opts = {});

EquilibriumResult find_monotone_equilibrium(const BayesGame& game, const SolveSettings& settings,
                                            InitKind init = InitKind::ExtremalLow,
                                            const Profile* custom = nullptr);
// Equilibrium of the perturbed game G^m.
EquilibriumResult find_perturbed_equilibrium(const BayesGame& game, int m, const SolveSettings& settings,
                                             InitKind init = InitKind::ExtremalLow, const Profile* custom = nullptr);

struct PerfectLevel {
    int m = 0;
    EquilibriumResult low;
    std::optional<EquilibriumResult> high;
    double cutoff_change = 0.0;   // sup distance of cutoffs to the previous level
};

struct PerfectResult {
    EquilibriumResult equilibrium;   // limit profile (last level) and its base-game residual
    std::optional<PerfectionCertificate> certificate;
    std::vector<PerfectLevel> levels;
    bool limit_detected = false;
    bool converged = false;
    std::string status;
    std::string note;
};

PerfectResult find_perfect_monotone_equilibrium(const BayesGame& game, const SolveSettings& settings,
                                                bool track_high = true);

// Auction double limit.
struct AuctionLevel {
    int m = 0;
    int grid_log2 = 0;
    bool converged = false;
    double residual = 0.0;
    double tie_probability = 0.0;     // P(two or more highest bids tie above Q)
    double pooling_mass = 0.0;        // P(highest bids fall in the same grid bin)
    double cutoff_change = 0.0;       // sup change of the bid function vs the previous level
    int iterations = 0;
};

struct AuctionSolveResult {
    std::vector<double> outer_changes;  // final-grid bid-function change between consecutive m
    std::vector<BidStrategy> bids;    // limit bid functions in value units
    std::vector<std::vector<double>> grids;  // final bid grids
    Profile profile;                  // final level profile (indices into grids)
    std::vector<AuctionLevel> levels;
    bool converged = false;
    bool limit_detected = false;
    std::string status;
    double residual = 0.0;
    std::optional<PerfectionCertificate> certificate;
};

// Player-offset dyadic bid grid: {Q} and j*h + offset within [0, bbar].
std::vector<double> offset_bid_grid(double bbar, int log2_step, double offset, double quit);
double auction_tie_probability(const GeneralizedAuction& a, const std::vector<BidStrategy>& bids);
double auction_pooling_mass(const GeneralizedAuction& a, const std::vector<BidStrategy>& bids, double bin);
std::vector<BidStrategy> bid_strategies(const Profile& p, const std::vector<std::vector<double>>& grids);

AuctionSolveResult solve_generalized_auction(const GeneralizedAuction& auction, const SolveSettings& settings);
// Equilibrium of the finite-grid perturbed auction game G^{mk}.
EquilibriumResult solve_auction_level(const GeneralizedAuction& auction, int m,
                                      const std::vector<std::vector<double>>& grids, const SolveSettings& settings,
                                      const Profile* warm = nullptr);

// Exhaustive scan of cutoff tuples (chains with at most two free cutoffs per player).
UniquenessVerdict uniqueness_scan(const BayesGame& game, int grid_points, double tol = 1e-9, int type_points = 257);

}  // namespace monoeq
