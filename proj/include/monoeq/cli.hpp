#pragma once

#include "monoeq/auctions.hpp"
#include "monoeq/game_model.hpp"
#include "monoeq/solver.hpp"
#include "monoeq/verification.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace monoeq {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNonConvergence = 3, kExitVerification = 4 };

struct ConditionSettings {
    std::vector<std::string> which{"scc", "idc", "supermodular", "quasi-supermodular", "affiliated"};
    std::vector<int> players;      // empty: all players
    int type_points = 33;
    int max_level = 5;             // dyadic level of the opponent cutoff family
    double tol = 1e-9;
};

struct VerifySettings {
    PerfectionSettings perfection;
    std::vector<int> levels;                 // empty: powers of two from 2 up to m_max
    std::string sequence = "canonical";      // "canonical" or "scenario" (hand-built sequence of a named scenario)
    bool admissibility = true;
    double bne_tol = 1e-8;
};

// Parsed schema-1 run configuration.
struct RunConfig {
    std::optional<std::string> scenario;
    std::optional<BayesGame> game;
    std::optional<GeneralizedAuction> auction;
    SolveSettings solver;
    std::string init = "low";                // "low", "high" or "both"
    bool track_high = true;
    ConditionSettings conditions;
    VerifySettings verify;
    std::optional<std::string> reference;    // named reference profile of the scenario
    std::optional<nlohmann::json> profile;   // inline profile
    std::string output;
    std::uint64_t seed = 1;
    int m_max = 1024;
    std::map<std::string, double> pinned;    // reproduction pinned-value overrides
};

// Throws ConfigError on schema violations (unknown keys, wrong types, bad values).
RunConfig parse_run_config(const nlohmann::json& j);
BayesGame parse_game(const nlohmann::json& j);
GeneralizedAuction parse_auction(const nlohmann::json& j);
// Profile JSON: [{"cuts": [...], "actions": [...]}, ...] with action indices.
Profile parse_profile(const nlohmann::json& j, const BayesGame& game);
// Sequence JSON: {"levels": [{"m": k, "profile": [{"cuts": [...], "cells": [[[a, p], ...], ...]}, ...]}, ...]}.
std::vector<SequenceLevel> parse_sequence(const nlohmann::json& j, const BayesGame& game);

nlohmann::json profile_to_json(const Profile& p, const BayesGame* game = nullptr);
nlohmann::json certificate_to_json(const PerfectionCertificate& c);
nlohmann::json equilibrium_to_json(const EquilibriumResult& r, const BayesGame* game = nullptr);

// Entry point of the command-line tool; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace monoeq
