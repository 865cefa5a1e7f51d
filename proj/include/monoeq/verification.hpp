#pragma once

#include "monoeq/game_model.hpp"
#include "monoeq/perturbation.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace monoeq {

class VerificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Probability measure on a Euclidean action space: finitely many atoms plus
// optional one-dimensional uniform components.
struct Measure {
    struct Atom {
        std::vector<double> x;
        double p = 0.0;
    };
    struct Uniform {
        double lo = 0.0;
        double hi = 0.0;
        double weight = 0.0;
    };
    std::vector<Atom> atoms;
    std::vector<Uniform> uniforms;

    static Measure dirac(std::vector<double> x) { return Measure{{Atom{std::move(x), 1.0}}, {}}; }
    static Measure from_mixed(const MixedAction& sigma, const FiniteLattice& L);
    static Measure from_bid_mixture(const BidMixture& mix);
    double total() const;
    // Uniform components replaced by `points` midpoint atoms each.
    Measure discretized(int points = 256) const;
};

struct ProhorovResult {
    double value = 0.0;
    double error_bound = 0.0;   // discretization bracket half-width (0 for finite supports)
    std::string method;         // "subset-enumeration", "max-flow", "dirac-tail"
};

ProhorovResult prohorov(const Measure& mu, const Measure& nu, int uniform_points = 256);
double prohorov_distance(const Measure& mu, const Measure& nu);
double prohorov_distance(const MixedAction& mu, const MixedAction& nu, const FiniteLattice& L);
// rho(mu, delta_a) = inf{eps : mu(d(x, a) > eps) <= eps}; exact with uniform components.
double prohorov_to_dirac(const Measure& mu, const std::vector<double>& a);

// Deterministic type sample: cell midpoints of a uniform partition plus every
// strategy breakpoint shifted by one grid step; breakpoints themselves are the
// excluded null set.
struct TypeSample {
    std::vector<double> points;
    std::vector<double> exceptions;
    std::string description;
};
TypeSample make_type_sample(const TypeSpace& box, const std::vector<double>& breakpoints, double grid_step,
                            int base_points = 512);

struct BneReport {
    std::vector<double> gaps;            // per player sup of the best-response gap
    std::vector<double> witness_types;   // type attaining the sup
    double tol = 0.0;
    bool is_eps_bne = false;
    std::string sample;
};

// `grid_step` defaults to width / 4096 per player.
BneReport check_bne(const BayesGame& game, const Profile& profile, double tol, double grid_step = 0.0,
                    const IntegrationOptions& opts = {});
// Same with behavioral opponents and a pure own strategy per player.
BneReport check_bne_behavioral(const BayesGame& game, const Profile& profile, const BehavioralProfile& opponents,
                               double tol, double grid_step = 0.0, const IntegrationOptions& opts = {});

struct PerfectionLevel {
    int level = 0;
    bool completely_mixed = true;
    double rho_sup = 0.0;
    double br_sup = 0.0;
    int witness_player = -1;
    double witness_type = 0.0;     // type attaining the violation radius
    double violation_radius = 0.0; // sup distance from a type violating the best-response condition to the
                                   // nearest breakpoint or endpoint (0: none)
    int rho_witness_player = -1;   // type attaining rho_sup
    double rho_witness_type = 0.0;
    std::string note;
};

struct PerfectionCertificate {
    std::vector<PerfectionLevel> levels;
    std::string sample;
    double rho_tol = 0.01;
    double br_tol = 1e-9;
    double decay_ratio = 0.75;
    bool certified = false;
    std::string verdict;           // "certified-to-tolerance" or "failed at level m ..."
    std::optional<int> failed_level;
    std::optional<int> witness_player;
    std::optional<double> witness_type;
};

struct PerfectionSettings {
    double rho_tol = 0.01;
    double br_tol = 1e-9;          // tolerance on d(g_i(t), BR_i)
    double payoff_tol = 1e-10;     // payoff slack defining the best-response set
    double grid_step = 0.0;        // default width / 4096
    int base_points = 512;
    // The sequence must approach the profile: rho_sup never increases across
    // levels and ends below rho_tol.  The best-response condition is a
    // pointwise limit for almost every type:
    // when the final level still shows violations, they must sit in a
    // neighbourhood of the breakpoints whose radius shrinks by at least
    // `decay_ratio` per level over the last `trend_levels` levels and ends
    // below `radius_tol`.
    double decay_ratio = 0.75;
    int trend_levels = 3;
    double radius_tol = 0.05;
    IntegrationOptions integration;
};

using SequenceLevel = std::pair<int, BehavioralProfile>;

PerfectionCertificate check_perfection(const BayesGame& game, const Profile& profile,
                                       const std::vector<SequenceLevel>& sequence,
                                       const PerfectionSettings& settings = {});
// Sets `certified`, `verdict` and the witness fields from the recorded levels.
void finalize_certificate(PerfectionCertificate& cert, const PerfectionSettings& settings);
// Accumulates one sampled type into a level record.  The Prohorov distance feeds
// rho_sup; a type violates the best-response condition when its distance to the
// best-response set exceeds br_tol, and its violation radius is the distance to
// the nearest breakpoint or box endpoint.
void record_type(PerfectionLevel& rec, int player, double t, double rho, double d,
                 const std::vector<double>& breakpoints, double lo, double hi, const PerfectionSettings& settings);
// Canonical sequence: every player's strategy embedded with the uniform tremble at each level.
std::vector<SequenceLevel> canonical_sequence(const BayesGame& game, const Profile& profile,
                                              const std::vector<int>& levels,
                                              const std::vector<std::vector<double>>& weights = {});
bool completely_mixed(const BehavioralStrategy& s, std::size_t action_count, std::string* offending = nullptr);

enum class DominanceKind { StrictlyDominated, WeaklyDominated, UndominatedOnFamily, LimitUndominated };
std::string to_string(DominanceKind k);

struct OpponentProfileFamily {
    std::string description;
    std::vector<BehavioralProfile> profiles;
    std::vector<std::string> labels;
};
// All constant pure opponent profiles (entry i unused).
OpponentProfileFamily constant_profile_family(const BayesGame& game, int i);

struct DominanceVerdict {
    int player = 0;
    int action = 0;
    double type = 0.0;
    DominanceKind kind = DominanceKind::UndominatedOnFamily;
    std::optional<MixedAction> dominating;
    std::optional<std::string> strict_witness;   // opponent profile label with a strict gain
    double margin = 0.0;                         // strict margin or total weak gain
    std::string family;
};

DominanceVerdict dominance_audit(const BayesGame& game, int i, int a_i, double t_i,
                                 const OpponentProfileFamily* family = nullptr, double tol = 1e-9,
                                 const IntegrationOptions& opts = {});

struct AdmissibilityFailure {
    int player = 0;
    double type = 0.0;
    DominanceVerdict verdict;
};

struct AdmissibilityReport {
    bool admissible = true;
    std::vector<AdmissibilityFailure> failures;
    std::size_t checked = 0;
    std::string family;
    std::string sample;
};

AdmissibilityReport check_admissibility(const BayesGame& game, const Profile& profile, int sample_points = 64,
                                        double tol = 1e-9);
// Limit admissibility on a discretized action chain: at every sampled type an
// undominated action exists within each radius of the played action.
AdmissibilityReport check_limit_admissibility(const BayesGame& game, const Profile& profile,
                                              const std::vector<double>& radii, int sample_points = 32,
                                              double tol = 1e-9);

}  // namespace monoeq
