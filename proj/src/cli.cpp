#include "monoeq/cli.hpp"

#include "monoeq/conditions.hpp"
#include "monoeq/scenarios.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

namespace monoeq {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Schema helpers

namespace {

void allow_keys(const json& j, const std::set<std::string>& keys, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [k, v] : j.items())
        if (!keys.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

const json& require(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    return j.at(key);
}

double as_number(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        try {
            const Rational r = parse_rational(v.get<std::string>());
            return boost::rational_cast<double>(r);
        } catch (const std::exception&) {
        }
    }
    throw ConfigError(where + ": expected a number or a rational string");
}

int as_int(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
    return v.get<int>();
}

bool as_bool(const json& v, const std::string& where) {
    if (!v.is_boolean()) throw ConfigError(where + ": expected a boolean");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string()) throw ConfigError(where + ": expected a string");
    return v.get<std::string>();
}

std::vector<double> as_numbers(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array");
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(as_number(v[k], where + "[" + std::to_string(k) + "]"));
    return out;
}

std::vector<int> as_ints(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array");
    std::vector<int> out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(as_int(v[k], where + "[" + std::to_string(k) + "]"));
    return out;
}

std::vector<TypeSpace> as_boxes(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a nonempty array of [lo, hi]");
    std::vector<TypeSpace> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const auto b = as_numbers(v[k], where + "[" + std::to_string(k) + "]");
        if (b.size() != 2 || !(b[0] < b[1])) throw ConfigError(where + ": each box must be [lo, hi] with lo < hi");
        out.push_back(TypeSpace{b[0], b[1]});
    }
    return out;
}

PosetElement as_element(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a coordinate array");
    std::vector<Rational> c;
    for (const auto& x : v) {
        if (x.is_number_integer()) c.emplace_back(x.get<long long>());
        else if (x.is_string()) c.push_back(parse_rational(x.get<std::string>()));
        else if (x.is_number()) c.push_back(rational_from_double(x.get<double>()));
        else throw ConfigError(where + ": coordinates must be numbers or rational strings");
    }
    return PosetElement(c);
}

FiniteLattice as_lattice(const json& v, const std::string& where) {
    allow_keys(v, {"chain", "product", "explicit", "reny_alpha", "reny_m"}, where);
    try {
        if (v.contains("chain")) return FiniteLattice::chain(as_numbers(v.at("chain"), where + ".chain"));
        std::vector<PosetElement> elems;
        const json& list = v.contains("product") ? v.at("product") : v.contains("explicit") ? v.at("explicit").at("elements")
                                                                                            : json();
        if (!list.is_array()) throw ConfigError(where + ": one of chain, product or explicit is required");
        for (std::size_t k = 0; k < list.size(); ++k) elems.push_back(as_element(list[k], where));
        if (v.contains("product")) {
            if (v.contains("reny_alpha")) {
                RenyOrderSpec spec;
                spec.alpha = as_number(v.at("reny_alpha"), where + ".reny_alpha");
                if (v.contains("reny_m")) spec.m = as_int(v.at("reny_m"), where + ".reny_m");
                return FiniteLattice::reny(elems, spec);
            }
            return FiniteLattice::product(elems);
        }
        const json& ex = v.at("explicit");
        allow_keys(ex, {"elements", "leq"}, where + ".explicit");
        const json& leq = require(ex, "leq", where + ".explicit");
        std::vector<std::vector<bool>> rel(elems.size(), std::vector<bool>(elems.size(), false));
        if (!leq.is_array() || leq.size() != elems.size()) throw ConfigError(where + ": leq must be a square matrix");
        for (std::size_t a = 0; a < elems.size(); ++a) {
            if (!leq[a].is_array() || leq[a].size() != elems.size()) throw ConfigError(where + ": leq must be square");
            for (std::size_t b = 0; b < elems.size(); ++b) rel[a][b] = as_bool(leq[a][b], where + ".leq");
        }
        return FiniteLattice::explicit_order(elems, rel);
    } catch (const OrderError& e) {
        throw ConfigError(where + ": " + e.what());
    } catch (const json::exception& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

std::vector<PolyTerm> as_terms(const json& v, int n, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array of [coef, powers...]");
    std::vector<PolyTerm> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const std::string w = where + "[" + std::to_string(k) + "]";
        if (!v[k].is_array() || v[k].empty() || static_cast<int>(v[k].size()) > n + 1)
            throw ConfigError(w + ": a term is [coef, power_1, ..., power_n]");
        PolyTerm t;
        t.coef = as_number(v[k][0], w);
        t.powers.assign(static_cast<std::size_t>(n), 0);
        for (std::size_t p = 1; p < v[k].size(); ++p) t.powers[p - 1] = as_int(v[k][p], w);
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<double> as_grid_with_quit(const json& j, const std::string& where, std::optional<double> quit) {
    std::vector<double> g = as_numbers(require(j, "bids", where), where + ".bids");
    if (quit) g.insert(g.begin(), *quit);
    return g;
}

}  // namespace

BayesGame parse_game(const json& j) {
    const std::string where = "game";
    if (!j.is_object()) throw ConfigError("game: expected an object");
    const std::string kind = as_string(require(j, "kind", where), where + ".kind");
    try {
        if (kind == "polynomial_table") {
            allow_keys(j, {"kind", "name", "types", "actions", "payoffs"}, where);
            const auto boxes = as_boxes(require(j, "types", where), where + ".types");
            const int n = static_cast<int>(boxes.size());
            const json& acts = require(j, "actions", where);
            if (!acts.is_array() || static_cast<int>(acts.size()) != n)
                throw ConfigError(where + ".actions: one action lattice per player is required");
            std::vector<FiniteLattice> lattices;
            for (int i = 0; i < n; ++i) lattices.push_back(as_lattice(acts[i], where + ".actions[" + std::to_string(i) + "]"));
            std::vector<PayoffEntry> entries;
            const json& pay = require(j, "payoffs", where);
            if (!pay.is_array()) throw ConfigError(where + ".payoffs: expected an array");
            for (std::size_t k = 0; k < pay.size(); ++k) {
                const std::string w = where + ".payoffs[" + std::to_string(k) + "]";
                allow_keys(pay[k], {"player", "actions", "terms", "pieces"}, w);
                PayoffEntry e;
                e.player = as_int(require(pay[k], "player", w), w + ".player");
                e.actions = as_ints(require(pay[k], "actions", w), w + ".actions");
                if (pay[k].contains("terms") == pay[k].contains("pieces"))
                    throw ConfigError(w + ": exactly one of terms or pieces is required");
                if (pay[k].contains("terms")) {
                    e.pieces.push_back(PayoffPiece{std::numeric_limits<double>::infinity(),
                                                   as_terms(pay[k].at("terms"), n, w + ".terms")});
                } else {
                    const json& pieces = pay[k].at("pieces");
                    if (!pieces.is_array() || pieces.empty()) throw ConfigError(w + ".pieces: expected a nonempty array");
                    for (std::size_t p = 0; p < pieces.size(); ++p) {
                        const std::string wp = w + ".pieces[" + std::to_string(p) + "]";
                        allow_keys(pieces[p], {"upto", "terms"}, wp);
                        PayoffPiece piece;
                        if (pieces[p].contains("upto") && !pieces[p].at("upto").is_null())
                            piece.upto = as_number(pieces[p].at("upto"), wp + ".upto");
                        piece.terms = as_terms(require(pieces[p], "terms", wp), n, wp + ".terms");
                        e.pieces.push_back(std::move(piece));
                    }
                }
                entries.push_back(std::move(e));
            }
            const std::string name = j.contains("name") ? as_string(j.at("name"), where + ".name") : "table-game";
            return build_polynomial_table_game(name, boxes, lattices, entries);
        }
        if (kind == "first_price" || kind == "second_price") {
            allow_keys(j, {"kind", "name", "values", "bids", "quit"}, where);
            const auto boxes = as_boxes(require(j, "values", where), where + ".values");
            std::optional<double> quit;
            if (j.contains("quit")) quit = as_number(j.at("quit"), where + ".quit");
            const std::vector<double> grid = as_grid_with_quit(j, where, quit);
            if (kind == "second_price") {
                if (quit) throw ConfigError(where + ": the second-price form has no quit bid");
                BayesGame g = build_second_price_game(grid, boxes);
                if (j.contains("name")) g.name = as_string(j.at("name"), where + ".name");
                return g;
            }
            const int n = static_cast<int>(boxes.size());
            std::vector<ValueScale> scales;
            double top = 0.0;
            for (const auto& b : boxes) scales.push_back(ValueScale{b.lo, b.hi});
            for (double b : grid) top = std::max(top, b);
            std::vector<TypeSpace> unit(static_cast<std::size_t>(n), TypeSpace{0.0, 1.0});
            const double q = quit.value_or(std::min(-1.0, *std::min_element(grid.begin(), grid.end()) - 1.0));
            GeneralizedAuction a = build_first_price(n, JointDensity::independent_uniform(unit), scales,
                                                     std::vector<double>(static_cast<std::size_t>(n), top), q);
            BayesGame g = to_bayes_game(a, std::vector<std::vector<double>>(static_cast<std::size_t>(n), grid));
            g.name = j.contains("name") ? as_string(j.at("name"), where + ".name") : "first-price";
            return g;
        }
    } catch (const ModelError& e) {
        throw ConfigError(where + ": " + e.what());
    } catch (const AuctionError& e) {
        throw ConfigError(where + ": " + e.what());
    }
    throw ConfigError(where + ".kind: unknown game form '" + kind + "' (polynomial_table, first_price, second_price)");
}

GeneralizedAuction parse_auction(const json& j) {
    const std::string where = "auction";
    allow_keys(j, {"kind", "n", "values", "bbar", "quit"}, where);
    const std::string kind = as_string(require(j, "kind", where), where + ".kind");
    const int n = as_int(require(j, "n", where), where + ".n");
    if (n < 2 || n > 4) throw ConfigError(where + ".n: between 2 and 4 bidders are supported");
    std::vector<ValueScale> scales(static_cast<std::size_t>(n));
    if (j.contains("values")) {
        const auto boxes = as_boxes(j.at("values"), where + ".values");
        if (static_cast<int>(boxes.size()) != n) throw ConfigError(where + ".values: one range per bidder");
        for (int i = 0; i < n; ++i) scales[static_cast<std::size_t>(i)] = ValueScale{boxes[i].lo, boxes[i].hi};
    }
    std::vector<double> bbar;
    if (j.contains("bbar")) bbar = as_numbers(j.at("bbar"), where + ".bbar");
    const double quit = j.contains("quit") ? as_number(j.at("quit"), where + ".quit") : -1.0;
    const JointDensity density =
        JointDensity::independent_uniform(std::vector<TypeSpace>(static_cast<std::size_t>(n), TypeSpace{0.0, 1.0}));
    try {
        if (kind == "first_price") return build_first_price(n, density, scales, bbar, quit);
        if (kind == "all_pay") {
            if (j.contains("values")) throw ConfigError(where + ": the all-pay form uses values in [0, 1]");
            return build_all_pay(
                n, [](int i, double, const std::vector<double>& v) { return v[static_cast<std::size_t>(i)]; }, density,
                bbar, quit, true);
        }
    } catch (const AuctionError& e) {
        throw ConfigError(where + ": " + e.what());
    }
    throw ConfigError(where + ".kind: unknown auction form '" + kind + "' (first_price, all_pay)");
}

Profile parse_profile(const json& j, const BayesGame& game) {
    if (!j.is_array() || static_cast<int>(j.size()) != game.n) throw ConfigError("profile: one strategy per player");
    Profile p;
    for (int i = 0; i < game.n; ++i) {
        const std::string w = "profile[" + std::to_string(i) + "]";
        allow_keys(j[i], {"cuts", "actions"}, w);
        StepStrategy s{as_numbers(require(j[i], "cuts", w), w + ".cuts"), as_ints(require(j[i], "actions", w), w + ".actions")};
        try {
            s.validate();
        } catch (const std::exception& e) {
            throw ConfigError(w + ": " + e.what());
        }
        for (int a : s.actions)
            if (a < 0 || a >= static_cast<int>(game.lattice(i).size())) throw ConfigError(w + ": action index out of range");
        if (std::fabs(s.cuts.front() - game.types[i].lo) > 1e-12 || std::fabs(s.cuts.back() - game.types[i].hi) > 1e-12)
            throw ConfigError(w + ": cuts must span the type space");
        p.push_back(std::move(s));
    }
    return p;
}

std::vector<SequenceLevel> parse_sequence(const json& j, const BayesGame& game) {
    allow_keys(j, {"levels"}, "sequence");
    const json& levels = require(j, "levels", "sequence");
    if (!levels.is_array() || levels.empty()) throw ConfigError("sequence.levels: expected a nonempty array");
    std::vector<SequenceLevel> out;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const std::string w = "sequence.levels[" + std::to_string(k) + "]";
        allow_keys(levels[k], {"m", "profile"}, w);
        const int m = as_int(require(levels[k], "m", w), w + ".m");
        const json& prof = require(levels[k], "profile", w);
        if (!prof.is_array() || static_cast<int>(prof.size()) != game.n) throw ConfigError(w + ".profile: one strategy per player");
        BehavioralProfile bp;
        for (int i = 0; i < game.n; ++i) {
            const std::string wi = w + ".profile[" + std::to_string(i) + "]";
            allow_keys(prof[i], {"cuts", "cells"}, wi);
            BehavioralStrategy b;
            b.cuts = as_numbers(require(prof[i], "cuts", wi), wi + ".cuts");
            const json& cells = require(prof[i], "cells", wi);
            if (!cells.is_array()) throw ConfigError(wi + ".cells: expected an array");
            for (const auto& cell : cells) {
                MixedAction mix;
                if (!cell.is_array()) throw ConfigError(wi + ".cells: each cell is a list of [action, probability]");
                for (const auto& atom : cell) {
                    if (!atom.is_array() || atom.size() != 2) throw ConfigError(wi + ".cells: atoms are [action, probability]");
                    mix.atoms.emplace_back(as_int(atom[0], wi), as_number(atom[1], wi));
                }
                b.cells.push_back(std::move(mix));
            }
            try {
                b.validate(game.lattice(i).size());
            } catch (const std::exception& e) {
                throw ConfigError(wi + ": " + e.what());
            }
            bp.push_back(std::move(b));
        }
        out.emplace_back(m, std::move(bp));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Run configuration

RunConfig parse_run_config(const json& j) {
    allow_keys(j, {"schema", "scenario", "game", "auction", "solver", "verification", "conditions", "reference", "profile",
                   "output", "seed", "m_max", "pinned"},
               "config");
    if (!j.contains("schema") || !j.at("schema").is_number_integer() || j.at("schema").get<int>() != 1)
        throw ConfigError("config: \"schema\": 1 is required");
    RunConfig c;
    const int sources = static_cast<int>(j.contains("scenario")) + static_cast<int>(j.contains("game")) +
                        static_cast<int>(j.contains("auction"));
    if (sources > 1) throw ConfigError("config: give at most one of scenario, game and auction");
    if (j.contains("scenario")) {
        const std::string s = as_string(j.at("scenario"), "scenario");
        const auto canon = canonical_scenario(s);
        if (!canon) throw ConfigError("scenario: unknown scenario '" + s + "'");
        c.scenario = *canon;
    }
    if (j.contains("game")) c.game = parse_game(j.at("game"));
    if (j.contains("auction")) c.auction = parse_auction(j.at("auction"));
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed: expected a nonnegative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("m_max")) c.m_max = as_int(j.at("m_max"), "m_max");
    if (j.contains("output")) c.output = as_string(j.at("output"), "output");
    if (j.contains("reference")) c.reference = as_string(j.at("reference"), "reference");
    if (j.contains("profile")) c.profile = j.at("profile");
    if (j.contains("pinned")) {
        const json& p = j.at("pinned");
        if (!p.is_object()) throw ConfigError("pinned: expected an object of \"scenario/check\": value");
        for (const auto& [k, v] : p.items()) c.pinned[k] = as_number(v, "pinned." + k);
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        const std::string w = "solver";
        allow_keys(s, {"grid_log2", "breakpoint_tol", "br_tol", "tol", "residual_tol", "damping", "adaptive_damping",
                       "sequential", "newton_polish", "max_newton_vars", "max_iterations", "m_schedule", "bid_grid_log2",
                       "limit_factor", "limit_levels", "init", "track_high", "integration", "integration_order",
                       "fixed_bid_grids", "auction_newton_vars", "auction_certificate", "tremble_weights"},
                   w);
        SolveSettings& st = c.solver;
        if (s.contains("grid_log2")) st.grid_log2 = as_int(s.at("grid_log2"), w + ".grid_log2");
        if (s.contains("breakpoint_tol")) st.breakpoint_tol = as_number(s.at("breakpoint_tol"), w + ".breakpoint_tol");
        if (s.contains("br_tol")) st.br_tol = as_number(s.at("br_tol"), w + ".br_tol");
        if (s.contains("tol")) st.tol = as_number(s.at("tol"), w + ".tol");
        if (s.contains("residual_tol")) st.residual_tol = as_number(s.at("residual_tol"), w + ".residual_tol");
        if (s.contains("damping")) st.damping = as_number(s.at("damping"), w + ".damping");
        if (s.contains("adaptive_damping")) st.adaptive_damping = as_bool(s.at("adaptive_damping"), w + ".adaptive_damping");
        if (s.contains("sequential")) st.sequential = as_bool(s.at("sequential"), w + ".sequential");
        if (s.contains("newton_polish")) st.newton_polish = as_bool(s.at("newton_polish"), w + ".newton_polish");
        if (s.contains("max_newton_vars")) st.max_newton_vars = as_int(s.at("max_newton_vars"), w + ".max_newton_vars");
        if (s.contains("auction_newton_vars"))
            st.auction_newton_vars = as_int(s.at("auction_newton_vars"), w + ".auction_newton_vars");
        if (s.contains("max_iterations")) st.max_iterations = as_int(s.at("max_iterations"), w + ".max_iterations");
        if (s.contains("m_schedule")) st.m_schedule = as_ints(s.at("m_schedule"), w + ".m_schedule");
        if (s.contains("bid_grid_log2")) st.bid_grid_log2 = as_ints(s.at("bid_grid_log2"), w + ".bid_grid_log2");
        if (s.contains("limit_factor")) st.limit_factor = as_number(s.at("limit_factor"), w + ".limit_factor");
        if (s.contains("limit_levels")) st.limit_levels = as_int(s.at("limit_levels"), w + ".limit_levels");
        if (s.contains("auction_certificate"))
            st.auction_certificate = as_bool(s.at("auction_certificate"), w + ".auction_certificate");
        if (s.contains("integration_order")) st.integration.order = as_int(s.at("integration_order"), w + ".integration_order");
        if (s.contains("integration")) {
            const std::string m = as_string(s.at("integration"), w + ".integration");
            if (m == "auto") st.integration.method = IntegrationOptions::Method::Auto;
            else if (m == "exact") st.integration.method = IntegrationOptions::Method::Exact;
            else if (m == "quadrature") st.integration.method = IntegrationOptions::Method::Quadrature;
            else throw ConfigError(w + ".integration: expected auto, exact or quadrature");
        }
        if (s.contains("fixed_bid_grids")) {
            const json& g = s.at("fixed_bid_grids");
            if (!g.is_array()) throw ConfigError(w + ".fixed_bid_grids: expected an array of grids");
            for (std::size_t k = 0; k < g.size(); ++k)
                st.fixed_bid_grids.push_back(as_numbers(g[k], w + ".fixed_bid_grids[" + std::to_string(k) + "]"));
        }
        if (s.contains("tremble_weights")) {
            const json& g = s.at("tremble_weights");
            if (!g.is_array()) throw ConfigError(w + ".tremble_weights: expected an array per player");
            for (std::size_t k = 0; k < g.size(); ++k)
                st.tremble_weights.push_back(as_numbers(g[k], w + ".tremble_weights[" + std::to_string(k) + "]"));
        }
        if (s.contains("init")) {
            c.init = as_string(s.at("init"), w + ".init");
            if (c.init != "low" && c.init != "high" && c.init != "both")
                throw ConfigError(w + ".init: expected low, high or both");
        }
        if (s.contains("track_high")) c.track_high = as_bool(s.at("track_high"), w + ".track_high");
    }
    if (j.contains("verification")) {
        const json& v = j.at("verification");
        const std::string w = "verification";
        allow_keys(v, {"rho_tol", "br_tol", "payoff_tol", "levels", "sequence", "admissibility", "bne_tol", "decay_ratio",
                       "trend_levels", "radius_tol", "base_points"},
                   w);
        PerfectionSettings& ps = c.verify.perfection;
        if (v.contains("rho_tol")) ps.rho_tol = as_number(v.at("rho_tol"), w + ".rho_tol");
        if (v.contains("br_tol")) ps.br_tol = as_number(v.at("br_tol"), w + ".br_tol");
        if (v.contains("payoff_tol")) ps.payoff_tol = as_number(v.at("payoff_tol"), w + ".payoff_tol");
        if (v.contains("decay_ratio")) ps.decay_ratio = as_number(v.at("decay_ratio"), w + ".decay_ratio");
        if (v.contains("trend_levels")) ps.trend_levels = as_int(v.at("trend_levels"), w + ".trend_levels");
        if (v.contains("radius_tol")) ps.radius_tol = as_number(v.at("radius_tol"), w + ".radius_tol");
        if (v.contains("base_points")) ps.base_points = as_int(v.at("base_points"), w + ".base_points");
        if (v.contains("levels")) c.verify.levels = as_ints(v.at("levels"), w + ".levels");
        if (v.contains("sequence")) {
            c.verify.sequence = as_string(v.at("sequence"), w + ".sequence");
            if (c.verify.sequence != "canonical" && c.verify.sequence != "scenario")
                throw ConfigError(w + ".sequence: expected canonical or scenario");
        }
        if (v.contains("admissibility")) c.verify.admissibility = as_bool(v.at("admissibility"), w + ".admissibility");
        if (v.contains("bne_tol")) c.verify.bne_tol = as_number(v.at("bne_tol"), w + ".bne_tol");
    }
    if (j.contains("conditions")) {
        const json& v = j.at("conditions");
        const std::string w = "conditions";
        allow_keys(v, {"which", "players", "type_points", "max_level", "tol"}, w);
        if (v.contains("which")) {
            c.conditions.which.clear();
            for (const auto& x : v.at("which")) {
                const std::string s = as_string(x, w + ".which");
                static const std::set<std::string> ok{"scc", "idc", "supermodular", "quasi-supermodular", "affiliated"};
                if (!ok.count(s)) throw ConfigError(w + ".which: unknown condition '" + s + "'");
                c.conditions.which.push_back(s);
            }
        }
        if (v.contains("players")) c.conditions.players = as_ints(v.at("players"), w + ".players");
        if (v.contains("type_points")) c.conditions.type_points = as_int(v.at("type_points"), w + ".type_points");
        if (v.contains("max_level")) c.conditions.max_level = as_int(v.at("max_level"), w + ".max_level");
        if (v.contains("tol")) c.conditions.tol = as_number(v.at("tol"), w + ".tol");
        if (c.conditions.type_points < 2) throw ConfigError(w + ".type_points: at least 2 points");
    }
    try {
        c.solver.validate();
    } catch (const SolverError& e) {
        throw ConfigError(std::string("solver: ") + e.what());
    }
    if (c.m_max < 2) throw ConfigError("m_max: must be at least 2");
    return c;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

json jnum(double x) {
    if (std::isfinite(x)) return x;
    return num(x);
}

json action_label(const BayesGame* g, int i, int a) {
    if (!g) return a;
    const auto& L = g->lattice(i);
    if (L.is_chain()) return jnum(L.value(static_cast<std::size_t>(a)));
    json c = json::array();
    for (double x : L.coords(static_cast<std::size_t>(a))) c.push_back(jnum(x));
    return c;
}

json witness_to_json(const ConditionWitness& w) {
    json j;
    auto arr = [](const std::vector<double>& v) {
        json a = json::array();
        for (double x : v) a.push_back(jnum(x));
        return a;
    };
    j["x"] = arr(w.x);
    j["x_prime"] = arr(w.x_prime);
    if (w.y) j["y"] = jnum(*w.y);
    if (w.y_prime) j["y_prime"] = jnum(*w.y_prime);
    j["values"] = arr(w.values);
    j["inequality"] = w.inequality;
    j["context"] = w.context;
    j["opponent_cutoffs"] = arr(w.opponent_cutoffs);
    return j;
}

json report_to_json(const ConditionReport& r, int player) {
    json j;
    if (player >= 0) j["player"] = player;
    j["condition"] = r.condition;
    j["verdict"] = r.verdict();
    j["grid"] = r.grid;
    j["family"] = r.family;
    j["tol"] = jnum(r.tol);
    j["checks"] = r.checks;
    if (r.witness) j["witness"] = witness_to_json(*r.witness);
    return j;
}

}  // namespace

json profile_to_json(const Profile& p, const BayesGame* game) {
    json out = json::array();
    for (std::size_t i = 0; i < p.size(); ++i) {
        json s;
        json cuts = json::array(), acts = json::array(), labels = json::array();
        for (double c : p[i].cuts) cuts.push_back(jnum(c));
        for (int a : p[i].actions) {
            acts.push_back(a);
            labels.push_back(action_label(game, static_cast<int>(i), a));
        }
        s["cuts"] = cuts;
        s["actions"] = acts;
        if (game) s["action_values"] = labels;
        out.push_back(s);
    }
    return out;
}

json certificate_to_json(const PerfectionCertificate& c) {
    json j;
    j["certified"] = c.certified;
    j["verdict"] = c.verdict;
    j["sample"] = c.sample;
    j["rho_tol"] = jnum(c.rho_tol);
    j["br_tol"] = jnum(c.br_tol);
    j["decay_ratio"] = jnum(c.decay_ratio);
    if (c.failed_level) j["failed_level"] = *c.failed_level;
    if (c.witness_player) j["witness_player"] = *c.witness_player;
    if (c.witness_type) j["witness_type"] = jnum(*c.witness_type);
    json levels = json::array();
    for (const auto& l : c.levels) {
        json lj;
        lj["level"] = l.level;
        lj["completely_mixed"] = l.completely_mixed;
        lj["rho_sup"] = jnum(l.rho_sup);
        lj["br_sup"] = jnum(l.br_sup);
        lj["violation_radius"] = jnum(l.violation_radius);
        if (l.witness_player >= 0) {
            lj["witness_player"] = l.witness_player;
            lj["witness_type"] = jnum(l.witness_type);
        }
        if (!l.note.empty()) lj["note"] = l.note;
        levels.push_back(lj);
    }
    j["levels"] = levels;
    return j;
}

json equilibrium_to_json(const EquilibriumResult& r, const BayesGame* game) {
    json j;
    j["status"] = r.status;
    j["converged"] = r.converged;
    j["residual"] = jnum(r.residual);
    json pr = json::array();
    for (double x : r.player_residuals) pr.push_back(jnum(x));
    j["player_residuals"] = pr;
    j["iterations"] = r.iterations;
    Profile merged;
    for (const auto& s : r.profile) merged.push_back(s.merged());
    j["profile"] = profile_to_json(merged, game);
    if (r.witness) j["witness"] = *r.witness;
    return j;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

struct Options {
    std::string command;
    std::string config_path;
    std::string scenario;
    std::string out_dir;
    std::string profile_path;
    std::string sequence_path;
    std::string reference;
    std::optional<std::uint64_t> seed;
    std::optional<int> m_max;
    std::optional<int> grid;
    bool json_out = false;
    bool quiet = false;
};

struct Context {
    RunConfig cfg;
    Options opt;
    std::ostream* out;
    std::ostream* err;
    std::string out_dir;
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void write_file(const Context& ctx, const std::string& name, const std::string& content) {
    if (ctx.out_dir.empty()) return;
    std::filesystem::create_directories(ctx.out_dir);
    std::ofstream f(std::filesystem::path(ctx.out_dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + name + " in " + ctx.out_dir);
    f << content;
}

void emit(const Context& ctx, const json& result, const std::string& file, const std::string& text) {
    write_file(ctx, file, result.dump(2) + "\n");
    if (ctx.opt.quiet) return;
    if (ctx.opt.json_out) *ctx.out << result.dump(2) << "\n";
    else *ctx.out << text;
}

// Scenario setup: game or auction, named reference profiles and their hand-built tremble sequences.
struct ScenarioSetup {
    std::optional<BayesGame> game;
    std::optional<GeneralizedAuction> auction;
    std::vector<std::pair<std::string, Profile>> references;   // first entry is the default
    std::map<std::string, std::function<BehavioralProfile(int)>> scenario_sequences;   // per reference name
    int scenario_first_level = 3;
    std::string default_sequence = "canonical";
    std::string default_init = "low";
};

ScenarioSetup scenario_setup(const std::string& name) {
    ScenarioSetup s;
    if (name == "exam-scc") {
        s.game = single_crossing_game();
        s.references = {{"monotone", single_crossing_monotone_profile()}, {"perfect", single_crossing_perfect_profile()}};
        s.scenario_sequences["perfect"] = single_crossing_sequence_level;
        s.scenario_first_level = 8;
    } else if (name == "exam-2") {
        s.game = two_dimensional_game();
        s.references = {{"monotone", two_dimensional_profile()}};
    } else if (name == "intro") {
        s.game = first_price_example_game(false);
        s.references = {{"intro", first_price_intro_profile(false)}, {"reference", first_price_reference_profile(false)}};
        const Profile ref = first_price_reference_profile(false);
        s.scenario_sequences["reference"] = [ref](int m) { return first_price_sequence_level(ref, m); };
    } else if (name == "exam-1st") {
        s.game = first_price_example_game(false);
        const Profile ref = first_price_reference_profile(false);
        s.references = {{"reference", ref}, {"intro", first_price_intro_profile(false)}};
        s.scenario_sequences["reference"] = [ref](int m) { return first_price_sequence_level(ref, m); };
        s.default_sequence = "scenario";
    } else if (name == "exam-2nd") {
        s.game = second_price_example_game();
        const Profile ref = second_price_reference_profile();
        s.references = {{"reference", ref}, {"trivial", second_price_trivial_profile()}};
        s.scenario_sequences["reference"] = [ref](int m) { return second_price_sequence_level(ref, m); };
        s.default_sequence = "scenario";
    } else if (name == "exam-super") {
        s.game = coordination_game();
        const Profile zero = coordination_profile(0), one = coordination_profile(1);
        s.references = {{"all-zero", zero}, {"all-one", one}};
        s.scenario_sequences["all-zero"] = [zero](int m) { return coordination_sequence_level(zero, m); };
        s.scenario_sequences["all-one"] = [one](int m) { return coordination_sequence_level(one, m); };
        s.default_sequence = "scenario";
        s.default_init = "both";
    } else if (name == "fp-uniform") {
        s.auction = uniform_first_price_auction(2);
    }
    return s;
}

std::vector<int> m_levels(int first, int m_max) {
    std::vector<int> out;
    if (first > 0 && first <= m_max && (first & (first - 1)) != 0) out.push_back(first);
    for (int m = 2; m <= m_max; m *= 2)
        if (m >= first) out.push_back(m);
    return out;
}

Context make_context(const Options& opt, std::ostream& out, std::ostream& err) {
    Context ctx;
    ctx.opt = opt;
    ctx.out = &out;
    ctx.err = &err;
    if (!opt.config_path.empty()) ctx.cfg = parse_run_config(read_json_file(opt.config_path));
    if (!opt.scenario.empty()) {
        const auto canon = canonical_scenario(opt.scenario);
        if (!canon) throw ConfigError("unknown scenario '" + opt.scenario + "'");
        if (ctx.cfg.game || ctx.cfg.auction) throw ConfigError("--scenario conflicts with the game given in the config");
        ctx.cfg.scenario = *canon;
    }
    if (opt.seed) ctx.cfg.seed = *opt.seed;
    if (opt.m_max) {
        if (*opt.m_max < 2) throw ConfigError("--m-max must be at least 2");
        ctx.cfg.m_max = *opt.m_max;
    }
    if (opt.grid) {
        if (*opt.grid < 1 || *opt.grid > 20) throw ConfigError("--grid must lie in [1, 20]");
        ctx.cfg.solver.grid_log2 = *opt.grid;
    }
    if (!opt.reference.empty()) ctx.cfg.reference = opt.reference;
    ctx.cfg.solver.seed = ctx.cfg.seed;
    std::vector<int> sched;
    for (int m : ctx.cfg.solver.m_schedule)
        if (m <= ctx.cfg.m_max) sched.push_back(m);
    if (sched.empty()) throw ConfigError("no perturbation level below --m-max");
    ctx.cfg.solver.m_schedule = sched;
    ctx.out_dir = !opt.out_dir.empty() ? opt.out_dir : ctx.cfg.output;
    return ctx;
}

// Resolves the configured game (scenario or explicit).
struct Resolved {
    std::optional<BayesGame> game;
    std::optional<GeneralizedAuction> auction;
    ScenarioSetup setup;
    std::string label;
};

Resolved resolve(const Context& ctx) {
    Resolved r;
    if (ctx.cfg.scenario) {
        r.setup = scenario_setup(*ctx.cfg.scenario);
        r.game = r.setup.game;
        r.auction = r.setup.auction;
        r.label = *ctx.cfg.scenario;
    } else if (ctx.cfg.game) {
        r.game = ctx.cfg.game;
        r.label = ctx.cfg.game->name;
    } else if (ctx.cfg.auction) {
        r.auction = ctx.cfg.auction;
        r.label = ctx.cfg.auction->name;
    } else {
        throw ConfigError("no game: give --scenario or a config with scenario, game or auction");
    }
    return r;
}

std::string csv_row(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) s += ',';
        s += cells[k];
    }
    return s + "\n";
}

std::string trace_csv(const EquilibriumResult& r) {
    std::string s = "iteration,step,damping,movement,residual,cutoffs\n";
    for (const auto& rec : r.trace) {
        std::string cuts;
        for (std::size_t k = 0; k < rec.cutoffs.size(); ++k) cuts += (k ? " " : "") + num(rec.cutoffs[k]);
        s += csv_row({std::to_string(rec.iteration), rec.step, num(rec.damping), num(rec.movement), num(rec.residual), cuts});
    }
    return s;
}

std::string profile_text(const Profile& p, const BayesGame& g) {
    std::ostringstream os;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const StepStrategy s = p[i].merged();
        os << "  player " << i << ":";
        for (std::size_t k = 0; k < s.cells(); ++k) {
            os << " [" << num(s.cuts[k]) << ", " << num(s.cuts[k + 1]) << ") -> ";
            const auto& L = g.lattice(static_cast<int>(i));
            if (L.is_chain()) os << num(L.value(static_cast<std::size_t>(s.actions[k])));
            else os << to_string(L.elements()[static_cast<std::size_t>(s.actions[k])]);
        }
        os << "\n";
    }
    return os.str();
}

int cmd_check_conditions(const Context& ctx) {
    const Resolved r = resolve(ctx);
    json result;
    result["command"] = "check-conditions";
    result["game"] = r.label;
    std::ostringstream text;
    bool all = true;
    if (r.auction) {
        const AuctionAssumptionReport rep = validate_auction_assumptions(*r.auction);
        json items = json::array();
        for (const auto& it : rep.items) {
            items.push_back({{"item", it.item}, {"statement", it.statement}, {"holds", it.holds}, {"witness", it.witness}});
            text << "item " << it.item << ": " << (it.holds ? "holds" : "fails") << "  " << it.statement
                 << (it.witness.empty() ? "" : "  witness: " + it.witness) << "\n";
        }
        result["auction_conditions"] = items;
        result["grid"] = rep.grid;
        all = rep.holds();
    } else {
        const BayesGame& g = *r.game;
        const ConditionSettings& cs = ctx.cfg.conditions;
        std::vector<int> players = cs.players;
        if (players.empty())
            for (int i = 0; i < g.n; ++i) players.push_back(i);
        std::vector<std::string> per;
        bool affil = false;
        for (const auto& w : cs.which) {
            if (w == "affiliated") affil = true;
            else per.push_back(w);
        }
        json reports = json::array();
        for (int i : players) {
            if (i < 0 || i >= g.n) throw ConfigError("conditions.players: unknown player " + std::to_string(i));
            if (per.empty()) break;
            const OpponentFamily fam = cutoff_family(g, i, cs.max_level);
            const auto reps = check_player_conditions(g, i, fam, uniform_grid(g.types[i].lo, g.types[i].hi, cs.type_points),
                                                      per, cs.tol);
            for (const auto& rep : reps) {
                reports.push_back(report_to_json(rep, i));
                all = all && rep.holds;
                text << "player " << i << "  " << rep.condition << ": " << rep.verdict();
                if (rep.witness) {
                    text << "  witness: " << rep.witness->inequality;
                    if (!rep.witness->opponent_cutoffs.empty()) {
                        text << " (opponent cutoffs";
                        for (double x : rep.witness->opponent_cutoffs) text << " " << num(x);
                        text << ")";
                    }
                }
                text << "\n";
            }
        }
        if (affil) {
            const int pts = g.n <= 2 ? cs.type_points : std::min(cs.type_points, 9);
            std::vector<std::vector<double>> grid;
            for (int i = 0; i < g.n; ++i) grid.push_back(uniform_grid(g.types[i].lo, g.types[i].hi, pts));
            const JointDensity& d = g.density;
            const ConditionReport rep = check_affiliated([&d](const std::vector<double>& t) { return d(t); }, grid, cs.tol);
            reports.push_back(report_to_json(rep, -1));
            all = all && rep.holds;
            text << "types  " << rep.condition << ": " << rep.verdict() << "\n";
        }
        result["reports"] = reports;
    }
    result["all_hold"] = all;
    emit(ctx, result, "conditions.json", text.str());
    return all ? kExitOk : kExitVerification;
}

int cmd_solve(const Context& ctx) {
    const Resolved r = resolve(ctx);
    json result;
    result["command"] = "solve";
    result["game"] = r.label;
    std::ostringstream text;
    bool ok = true;
    if (r.auction) {
        const AuctionSolveResult res = solve_generalized_auction(*r.auction, ctx.cfg.solver);
        result["status"] = res.status;
        result["converged"] = res.converged;
        result["limit_detected"] = res.limit_detected;
        result["residual"] = jnum(res.residual);
        json bids = json::array();
        for (const auto& b : res.bids) {
            json bj;
            json cuts = json::array(), bv = json::array();
            for (double c : b.cuts) cuts.push_back(jnum(c));
            for (double x : b.bids) bv.push_back(jnum(x));
            bj["cuts"] = cuts;
            bj["bids"] = bv;
            bids.push_back(bj);
        }
        result["bids"] = bids;
        std::string csv = "m,grid_log2,converged,residual,tie_probability,pooling_mass,cutoff_change,iterations\n";
        json levels = json::array();
        for (const auto& l : res.levels) {
            csv += csv_row({std::to_string(l.m), std::to_string(l.grid_log2), l.converged ? "1" : "0", num(l.residual),
                            num(l.tie_probability), num(l.pooling_mass), num(l.cutoff_change), std::to_string(l.iterations)});
            levels.push_back({{"m", l.m},
                              {"grid_log2", l.grid_log2},
                              {"converged", l.converged},
                              {"residual", jnum(l.residual)},
                              {"tie_probability", jnum(l.tie_probability)},
                              {"pooling_mass", jnum(l.pooling_mass)},
                              {"cutoff_change", jnum(l.cutoff_change)}});
        }
        result["levels"] = levels;
        if (res.certificate) result["certificate"] = certificate_to_json(*res.certificate);
        write_file(ctx, "auction_levels.csv", csv);
        text << "status: " << res.status << "\n";
        for (std::size_t i = 0; i < res.bids.size(); ++i) {
            text << "  bidder " << i << ":";
            for (std::size_t k = 0; k < res.bids[i].bids.size() && k < 16; ++k)
                text << " [" << num(res.bids[i].cuts[k]) << ") " << num(res.bids[i].bids[k]);
            if (res.bids[i].bids.size() > 16) text << " ... (" << res.bids[i].bids.size() << " cells)";
            text << "\n";
        }
        ok = res.converged;
    } else {
        const BayesGame& g = *r.game;
        std::string init = ctx.cfg.init;
        if (ctx.cfg.scenario && init == "low") init = r.setup.default_init;
        std::vector<std::pair<std::string, InitKind>> runs;
        if (init == "low" || init == "both") runs.emplace_back("low", InitKind::ExtremalLow);
        if (init == "high" || init == "both") runs.emplace_back("high", InitKind::ExtremalHigh);
        json eqs = json::array();
        for (const auto& [label, kind] : runs) {
            const EquilibriumResult eq = find_monotone_equilibrium(g, ctx.cfg.solver, kind);
            json ej = equilibrium_to_json(eq, &g);
            ej["init"] = label;
            eqs.push_back(ej);
            write_file(ctx, "trace_" + label + ".csv", trace_csv(eq));
            text << "start " << label << ": " << eq.status << " (residual " << num(eq.residual) << ", "
                 << eq.iterations << " iterations)\n"
                 << profile_text(eq.profile, g);
            if (eq.witness) text << "  witness: " << *eq.witness << "\n";
            ok = ok && eq.converged;
        }
        result["equilibria"] = eqs;
    }
    emit(ctx, result, "equilibrium.json", text.str());
    return ok ? kExitOk : kExitNonConvergence;
}

int cmd_solve_perfect(const Context& ctx) {
    const Resolved r = resolve(ctx);
    if (!r.game) throw ConfigError("solve-perfect needs a finite game; use solve for auctions");
    const BayesGame& g = *r.game;
    const PerfectResult pr = find_perfect_monotone_equilibrium(g, ctx.cfg.solver, ctx.cfg.track_high);
    json result;
    result["command"] = "solve-perfect";
    result["game"] = r.label;
    result["status"] = pr.status;
    result["converged"] = pr.converged;
    result["limit_detected"] = pr.limit_detected;
    result["note"] = pr.note;
    result["equilibrium"] = equilibrium_to_json(pr.equilibrium, &g);
    if (pr.certificate) result["certificate"] = certificate_to_json(*pr.certificate);
    json levels = json::array();
    std::string csv = "m,low_status,low_residual,high_status,high_residual,cutoff_change\n";
    for (const auto& l : pr.levels) {
        json lj{{"m", l.m}, {"cutoff_change", jnum(l.cutoff_change)}, {"low", equilibrium_to_json(l.low, &g)}};
        if (l.high) lj["high"] = equilibrium_to_json(*l.high, &g);
        levels.push_back(lj);
        csv += csv_row({std::to_string(l.m), l.low.status, num(l.low.residual), l.high ? l.high->status : "",
                        l.high ? num(l.high->residual) : "", num(l.cutoff_change)});
        write_file(ctx, "trace_m" + std::to_string(l.m) + ".csv", trace_csv(l.low));
    }
    result["levels"] = levels;
    write_file(ctx, "perfect_levels.csv", csv);
    std::ostringstream text;
    text << "status: " << pr.status << "\n";
    if (!pr.note.empty()) text << "note: " << pr.note << "\n";
    if (pr.status != "non-convergence") text << profile_text(pr.equilibrium.profile, g);
    if (pr.certificate) text << "certificate: " << pr.certificate->verdict << "\n";
    emit(ctx, result, "perfect.json", text.str());
    if (pr.status == "converged") return kExitOk;
    if (pr.status == "not-certified") return kExitVerification;
    return kExitNonConvergence;
}

int cmd_verify(const Context& ctx) {
    const Resolved r = resolve(ctx);
    if (!r.game) throw ConfigError("verify needs a finite game");
    const BayesGame& g = *r.game;
    Profile profile;
    std::string ref_name;
    if (!ctx.opt.profile_path.empty()) {
        const json pj = read_json_file(ctx.opt.profile_path);
        profile = parse_profile(pj.is_object() && pj.contains("profile") ? pj.at("profile") : pj, g);
        ref_name = ctx.opt.profile_path;
    } else if (ctx.cfg.profile) {
        profile = parse_profile(*ctx.cfg.profile, g);
        ref_name = "config";
    } else {
        if (r.setup.references.empty()) throw ConfigError("verify needs a profile (--profile or config \"profile\")");
        ref_name = ctx.cfg.reference.value_or(r.setup.references.front().first);
        bool found = false;
        for (const auto& [n, p] : r.setup.references)
            if (n == ref_name) {
                profile = p;
                found = true;
            }
        if (!found) throw ConfigError("unknown reference profile '" + ref_name + "' for scenario " + r.label);
    }
    std::vector<SequenceLevel> seq;
    std::string seq_label;
    if (!ctx.opt.sequence_path.empty()) {
        seq = parse_sequence(read_json_file(ctx.opt.sequence_path), g);
        seq_label = ctx.opt.sequence_path;
    } else {
        std::string kind = ctx.cfg.verify.sequence;
        const bool explicit_kind = ctx.opt.config_path.empty() ? false : kind != "canonical";
        const auto it = r.setup.scenario_sequences.find(ref_name);
        if (!explicit_kind && ctx.cfg.scenario && it != r.setup.scenario_sequences.end() && ctx.opt.profile_path.empty() &&
            !ctx.cfg.profile && (r.setup.default_sequence == "scenario" || ctx.cfg.reference))
            kind = "scenario";
        if (kind == "scenario") {
            if (it == r.setup.scenario_sequences.end())
                throw ConfigError("no scenario sequence is registered for this profile; use the canonical sequence");
            const std::vector<int> levels = ctx.cfg.verify.levels.empty() ? m_levels(r.setup.scenario_first_level, ctx.cfg.m_max)
                                                                           : ctx.cfg.verify.levels;
            seq = make_sequence(levels, it->second);
            seq_label = "scenario";
        } else {
            const std::vector<int> levels = ctx.cfg.verify.levels.empty() ? m_levels(2, ctx.cfg.m_max) : ctx.cfg.verify.levels;
            seq = canonical_sequence(g, profile, levels, ctx.cfg.solver.tremble_weights);
            seq_label = "canonical";
        }
    }
    const BneReport bne = check_bne(g, profile, ctx.cfg.verify.bne_tol);
    const PerfectionCertificate cert = check_perfection(g, profile, seq, ctx.cfg.verify.perfection);
    json result;
    result["command"] = "verify";
    result["game"] = r.label;
    result["profile_source"] = ref_name;
    result["profile"] = profile_to_json(profile, &g);
    result["sequence"] = seq_label;
    json gaps = json::array(), wt = json::array();
    for (double x : bne.gaps) gaps.push_back(jnum(x));
    for (double x : bne.witness_types) wt.push_back(jnum(x));
    result["bne"] = {{"is_eps_bne", bne.is_eps_bne}, {"tol", jnum(bne.tol)}, {"gaps", gaps}, {"witness_types", wt},
                     {"sample", bne.sample}};
    result["perfection"] = certificate_to_json(cert);
    std::ostringstream text;
    text << "profile: " << ref_name << "\n" << profile_text(profile, g);
    text << "epsilon-BNE (tol " << num(bne.tol) << "): " << (bne.is_eps_bne ? "yes" : "no") << ", gaps";
    for (double x : bne.gaps) text << " " << num(x);
    text << "\nperfection (" << seq_label << " sequence): " << cert.verdict << "\n";
    bool admissible = true;
    if (ctx.cfg.verify.admissibility) {
        const AdmissibilityReport adm = check_admissibility(g, profile);
        admissible = adm.admissible;
        json fails = json::array();
        for (const auto& f : adm.failures) {
            json fj{{"player", f.player}, {"type", jnum(f.type)}, {"kind", to_string(f.verdict.kind)},
                    {"action", f.verdict.action}, {"margin", jnum(f.verdict.margin)}};
            if (f.verdict.dominating) {
                json mix = json::array();
                for (const auto& [a, p] : f.verdict.dominating->atoms) mix.push_back({a, jnum(p)});
                fj["dominating"] = mix;
            }
            if (f.verdict.strict_witness) fj["strict_witness"] = *f.verdict.strict_witness;
            fails.push_back(fj);
        }
        result["admissibility"] = {{"admissible", adm.admissible}, {"checked", adm.checked}, {"family", adm.family},
                                   {"sample", adm.sample}, {"failures", fails}};
        text << "admissibility: " << (adm.admissible ? "admissible" : "inadmissible");
        if (!adm.failures.empty()) {
            const auto& f = adm.failures.front();
            text << " (player " << f.player << " at type " << num(f.type) << ": action " << f.verdict.action << " "
                 << to_string(f.verdict.kind) << ")";
        }
        text << "\n";
    }
    std::string csv = "level,completely_mixed,rho_sup,br_sup,violation_radius\n";
    for (const auto& l : cert.levels)
        csv += csv_row({std::to_string(l.level), l.completely_mixed ? "1" : "0", num(l.rho_sup), num(l.br_sup),
                        num(l.violation_radius)});
    write_file(ctx, "perfection_levels.csv", csv);
    const bool ok = bne.is_eps_bne && cert.certified && admissible;
    result["verified"] = ok;
    emit(ctx, result, "verification.json", text.str());
    return ok ? kExitOk : kExitVerification;
}

int cmd_interim(const Context& ctx) {
    const Resolved r = resolve(ctx);
    if (!r.game) throw ConfigError("interim needs a finite game");
    const BayesGame& g = *r.game;
    Profile profile;
    if (!ctx.opt.profile_path.empty()) {
        const json pj = read_json_file(ctx.opt.profile_path);
        profile = parse_profile(pj.is_object() && pj.contains("profile") ? pj.at("profile") : pj, g);
    } else if (ctx.cfg.profile) {
        profile = parse_profile(*ctx.cfg.profile, g);
    } else if (!r.setup.references.empty()) {
        const std::string name = ctx.cfg.reference.value_or(r.setup.references.front().first);
        for (const auto& [n, p] : r.setup.references)
            if (n == name) profile = p;
        if (profile.empty()) throw ConfigError("unknown reference profile '" + name + "'");
    } else {
        throw ConfigError("interim needs a profile");
    }
    const BehavioralProfile bp = to_behavioral(profile);
    std::string csv = "player,action,type,value,method,residual\n";
    for (int i = 0; i < g.n; ++i) {
        for (double t : uniform_grid(g.types[i].lo, g.types[i].hi, ctx.cfg.conditions.type_points)) {
            std::string method;
            double residual = 0.0;
            const auto v = interim_payoffs(g, i, t, bp, ctx.cfg.solver.integration, &method, &residual);
            for (std::size_t a = 0; a < v.size(); ++a)
                csv += csv_row({std::to_string(i), std::to_string(a), num(t), num(v[a]), method, num(residual)});
        }
    }
    write_file(ctx, "interim.csv", csv);
    if (!ctx.opt.quiet) *ctx.out << csv;
    return kExitOk;
}

int cmd_reproduce(const Context& ctx) {
    std::vector<std::string> names;
    if (ctx.cfg.scenario) names.push_back(*ctx.cfg.scenario);
    else names = scenario_names();
    ScenarioOptions so;
    so.m_max = ctx.cfg.m_max;
    so.grid_log2 = ctx.cfg.solver.grid_log2;
    so.seed = ctx.cfg.seed;
    so.pinned_overrides = ctx.cfg.pinned;
    json rows = json::array();
    std::string csv = "scenario,check,value,pinned,tol,status\n";
    std::ostringstream text, diff;
    std::size_t failed = 0, total = 0;
    for (const auto& n : names) {
        for (const auto& c : reproduce_scenario(n, so)) {
            ++total;
            rows.push_back({{"scenario", c.scenario}, {"check", c.name}, {"value", jnum(c.value)}, {"pinned", jnum(c.pinned)},
                            {"tol", jnum(c.tol)}, {"passed", c.passed}, {"detail", c.detail}});
            csv += csv_row({c.scenario, c.name, num(c.value), num(c.pinned), num(c.tol), c.passed ? "pass" : "fail"});
            text << (c.passed ? "pass  " : "FAIL  ") << c.scenario << "  " << c.name << "  value " << num(c.value)
                 << "  pinned " << num(c.pinned) << "\n";
            if (!c.passed) {
                ++failed;
                diff << "- " << c.scenario << "/" << c.name << ": pinned " << num(c.pinned) << " (tol " << num(c.tol)
                     << ")\n+ " << c.scenario << "/" << c.name << ": value  " << num(c.value)
                     << (c.detail.empty() ? "" : "  [" + c.detail + "]") << "\n";
            }
        }
    }
    text << (total - failed) << "/" << total << " checks pass\n";
    json result{{"command", "reproduce-paper"}, {"checks", rows}, {"passed", total - failed}, {"failed", failed}};
    write_file(ctx, "reproduce.csv", csv);
    emit(ctx, result, "reproduce.json", text.str());
    if (failed) {
        *ctx.err << diff.str();
        return kExitVerification;
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Monotone and perfect monotone equilibria of Bayesian games"};
    app.require_subcommand(1);
    Options opt;
    std::uint64_t seed = 0;
    int m_max = 0, grid = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "run configuration (JSON, schema 1)");
        sub->add_option("--scenario", opt.scenario, "named scenario");
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--m-max", m_max, "largest perturbation level");
        sub->add_option("--grid", grid, "solver type grid exponent (2^N cells)");
        sub->add_flag("--json", opt.json_out, "print JSON instead of text");
        sub->add_flag("--quiet", opt.quiet, "print nothing");
    };
    CLI::App* cc = app.add_subcommand("check-conditions", "check order conditions on the configured family");
    CLI::App* sv = app.add_subcommand("solve", "compute a monotone equilibrium");
    CLI::App* sp = app.add_subcommand("solve-perfect", "search for a perfect monotone equilibrium");
    CLI::App* vf = app.add_subcommand("verify", "certify a profile (equilibrium, perfection, admissibility)");
    CLI::App* im = app.add_subcommand("interim", "export interim payoffs of a profile as CSV");
    CLI::App* rp = app.add_subcommand("reproduce-paper", "run every named scenario against pinned values");
    for (CLI::App* s : {cc, sv, sp, vf, im, rp}) add_common(s);
    for (CLI::App* s : {vf, im}) {
        s->add_option("--profile", opt.profile_path, "profile JSON file");
        s->add_option("--reference", opt.reference, "named reference profile of the scenario");
    }
    vf->add_option("--sequence", opt.sequence_path, "sequence JSON file");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();  // program name
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    for (CLI::App* s : app.get_subcommands()) opt.command = s->get_name();
    if (seed != 0 || (std::find(args.begin(), args.end(), "--seed") != args.end())) opt.seed = seed;
    if (m_max != 0) opt.m_max = m_max;
    if (grid != 0) opt.grid = grid;

    try {
        const Context ctx = make_context(opt, out, err);
        if (opt.command == "check-conditions") return cmd_check_conditions(ctx);
        if (opt.command == "solve") return cmd_solve(ctx);
        if (opt.command == "solve-perfect") return cmd_solve_perfect(ctx);
        if (opt.command == "verify") return cmd_verify(ctx);
        if (opt.command == "interim") return cmd_interim(ctx);
        if (opt.command == "reproduce-paper") return cmd_reproduce(ctx);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}

}  // namespace monoeq
