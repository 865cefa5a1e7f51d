#include <doctest.h>

#include "monoeq/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace monoeq;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "monoeq");
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content) {
    const auto dir = std::filesystem::temp_directory_path() / "monoeq_cli_tests";
    std::filesystem::create_directories(dir);
    const auto path = dir / name;
    std::ofstream(path) << content;
    return path.string();
}

}  // namespace

TEST_CASE("configuration errors exit with code 2") {
    CHECK(run({"solve", "--config", temp_file("unknown.json", R"({"schema": 1, "bogus": 2})")}).code == kExitConfig);
    CHECK(run({"solve", "--config", temp_file("schema.json", R"({"schema": 2})")}).code == kExitConfig);
    CHECK(run({"solve", "--config", temp_file("broken.json", "{")}).code == kExitConfig);
    CHECK(run({"solve", "--scenario", "no-such-scenario"}).code == kExitConfig);
    CHECK(run({"solve"}).code == kExitConfig);
    CHECK(run({"frobnicate"}).code == kExitConfig);
    const Run nested = run({"solve", "--config", temp_file("nested.json", R"({"schema": 1, "solver": {"dampng": 0.5}})")});
    CHECK(nested.code == kExitConfig);
    CHECK(nested.err.find("dampng") != std::string::npos);
}

TEST_CASE("schema parsing of an explicit polynomial game") {
    const nlohmann::json j = nlohmann::json::parse(R"({
        "schema": 1,
        "game": {"kind": "polynomial_table", "types": [[0, 1], [0, 1]],
                 "actions": [{"chain": [0, 1]}, {"chain": [0, 1]}],
                 "payoffs": [{"player": 0, "actions": [0, 0], "terms": [["1"]]},
                             {"player": 1, "actions": [0, 0], "terms": [[1]]}]},
        "solver": {"grid_log2": 8, "init": "both"},
        "m_max": 64
    })");
    const RunConfig c = parse_run_config(j);
    REQUIRE(c.game.has_value());
    CHECK(c.game->n == 2);
    CHECK(c.solver.grid_log2 == 8);
    CHECK(c.init == "both");
    CHECK(c.m_max == 64);
    CHECK(c.game->payoff(0, {0, 0}, {0.3, 0.4}) == doctest::Approx(1.0));
    CHECK(c.game->payoff(0, {1, 0}, {0.3, 0.4}) == 0.0);
}

TEST_CASE("solve finds both coordination equilibria and writes deterministic output") {
    const auto dir = (std::filesystem::temp_directory_path() / "monoeq_cli_solve").string();
    const Run a = run({"solve", "--scenario", "exam-super", "--json", "--out", dir, "--grid", "8"});
    CHECK(a.code == kExitOk);
    const auto j = nlohmann::json::parse(a.out);
    REQUIRE(j["equilibria"].size() == 2);
    CHECK(j["equilibria"][0]["profile"][0]["actions"][0] == 0);
    CHECK(j["equilibria"][1]["profile"][0]["actions"][0] == 1);
    CHECK(std::filesystem::exists(std::filesystem::path(dir) / "equilibrium.json"));
    CHECK(std::filesystem::exists(std::filesystem::path(dir) / "trace_low.csv"));
    const Run b = run({"solve", "--scenario", "exam-super", "--json", "--grid", "8"});
    CHECK(a.out == b.out);
}

TEST_CASE("verify: certified profiles exit 0, inadmissible or imperfect ones exit 4") {
    CHECK(run({"verify", "--scenario", "exam-2nd", "--m-max", "256"}).code == kExitOk);
    const Run one = run({"verify", "--scenario", "exam-super", "--reference", "all-one", "--m-max", "64"});
    CHECK(one.code == kExitVerification);
    CHECK(one.out.find("inadmissible") != std::string::npos);
    CHECK(run({"verify", "--scenario", "intro", "--m-max", "64"}).code == kExitVerification);
    CHECK(run({"verify", "--scenario", "exam-super", "--reference", "nobody"}).code == kExitConfig);
}

TEST_CASE("verify accepts profile and sequence files") {
    const std::string prof = temp_file("zero.json", R"([{"cuts": [0, 1], "actions": [0]}, {"cuts": [0, 1], "actions": [0]}])");
    const std::string seq = temp_file("seq.json", R"({"levels": [
        {"m": 4, "profile": [{"cuts": [0, 1], "cells": [[[0, 0.75], [1, 0.25]]]}, {"cuts": [0, 1], "cells": [[[0, 0.75], [1, 0.25]]]}]},
        {"m": 8, "profile": [{"cuts": [0, 1], "cells": [[[0, 0.875], [1, 0.125]]]}, {"cuts": [0, 1], "cells": [[[0, 0.875], [1, 0.125]]]}]},
        {"m": 16, "profile": [{"cuts": [0, 1], "cells": [[[0, 0.9375], [1, 0.0625]]]}, {"cuts": [0, 1], "cells": [[[0, 0.9375], [1, 0.0625]]]}]},
        {"m": 256, "profile": [{"cuts": [0, 1], "cells": [[[0, 0.99609375], [1, 0.00390625]]]}, {"cuts": [0, 1], "cells": [[[0, 0.99609375], [1, 0.00390625]]]}]}
    ]})");
    CHECK(run({"verify", "--scenario", "exam-super", "--profile", prof, "--sequence", seq}).code == kExitOk);
    const std::string bad = temp_file("bad.json", R"([{"cuts": [0, 1], "actions": [7]}, {"cuts": [0, 1], "actions": [0]}])");
    CHECK(run({"verify", "--scenario", "exam-super", "--profile", bad}).code == kExitConfig);
}

TEST_CASE("check-conditions reports failing conditions with exit code 4") {
    const Run r = run({"check-conditions", "--scenario", "exam-scc", "--json"});
    CHECK(r.code == kExitVerification);
    const auto j = nlohmann::json::parse(r.out);
    bool idc_fails = false;
    for (const auto& rep : j["reports"])
        if (rep["player"] == 0 && rep["condition"] == "increasing-differences") idc_fails = rep["verdict"] == "fails";
    CHECK(idc_fails);
    const std::string cfg = temp_file("scc_only.json", R"({"schema": 1, "scenario": "exam-scc",
        "conditions": {"which": ["scc"], "type_points": 9}})");
    CHECK(run({"check-conditions", "--config", cfg}).code == kExitOk);
}

TEST_CASE("solve-perfect exit codes") {
    CHECK(run({"solve-perfect", "--scenario", "exam-super", "--m-max", "64", "--grid", "8"}).code == kExitOk);
    CHECK(run({"solve-perfect", "--scenario", "exam-scc", "--m-max", "8", "--grid", "8"}).code == kExitNonConvergence);
}

TEST_CASE("interim export") {
    const Run r = run({"interim", "--scenario", "exam-2nd", "--quiet"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.empty());
    const Run s = run({"interim", "--scenario", "exam-2nd"});
    CHECK(s.out.rfind("player,action,type,value,method,residual\n", 0) == 0);
}

TEST_CASE("reproduce-paper: pass, and a pinned-value override produces a diff") {
    CHECK(run({"reproduce-paper", "--scenario", "exam-super", "--quiet"}).code == kExitOk);
    const std::string cfg = temp_file("pinned.json", R"({"schema": 1, "scenario": "exam-super",
        "pinned": {"exam-super/low-start-equilibrium-action": 1}})");
    const Run r = run({"reproduce-paper", "--config", cfg, "--quiet"});
    CHECK(r.code == kExitVerification);
    CHECK(r.err.find("low-start-equilibrium-action") != std::string::npos);
}
