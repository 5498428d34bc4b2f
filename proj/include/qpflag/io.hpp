#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qpflag/controlsets.hpp"
#include "qpflag/tree.hpp"

namespace qpflag {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

/// "num/den", "num", or a bare JSON integer.
inline std::pair<std::int64_t, std::int64_t> parse_rational(const json& j, const std::string& where) {
    if (j.is_number_integer()) return {j.get<std::int64_t>(), 1};
    if (!j.is_string())
        throw std::invalid_argument(where + ": expected an integer or a rational string");
    std::string s = j.get<std::string>();
    std::size_t slash = s.find('/');
    try {
        if (slash == std::string::npos) return {std::stoll(s), 1};
        std::int64_t num = std::stoll(s.substr(0, slash));
        std::int64_t den = std::stoll(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return {num, den};
    } catch (const std::exception&) {
        throw std::invalid_argument(where + ": malformed rational \"" + s + "\"");
    }
}

/// Array-of-arrays of rationals, square.
inline std::vector<std::pair<std::int64_t, std::int64_t>> parse_matrix_entries(const json& j,
                                                                               int n,
                                                                               const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw std::invalid_argument(where + ": expected " + std::to_string(n) + " rows");
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    for (int r = 0; r < n; ++r) {
        if (!j[r].is_array() || static_cast<int>(j[r].size()) != n)
            throw std::invalid_argument(where + ": row " + std::to_string(r) + " must have " +
                                        std::to_string(n) + " entries");
        for (int c = 0; c < n; ++c)
            out.push_back(parse_rational(j[r][c], where + "[" + std::to_string(r) + "][" +
                                                      std::to_string(c) + "]"));
    }
    return out;
}

inline Matrix matrix_from_json(const PAdicContext& ctx, const json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument(where + ": expected a square matrix");
    int n = static_cast<int>(j.size());
    return Matrix::from_rationals(ctx, n, parse_matrix_entries(j, n, where));
}

inline json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.dim(); ++i) {
        json row = json::array();
        for (int j2 = 0; j2 < m.dim(); ++j2) row.push_back(m.at(i, j2).to_string());
        rows.push_back(row);
    }
    return rows;
}

inline std::string flag_to_string(const Flag& f) {
    auto coords = [](const std::vector<PAdic>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ":";
            s += v[i].to_string();
        }
        return s + "]";
    };
    if (f.dim() == 2) return coords(f.line());
    return "(" + coords(f.line()) + ", " + coords(f.coplane()) + ")";
}

/// Semigroup spec from JSON: {p, precision, group, generators, max_word_len}
/// plus the optional tuning fields. `base` supplies defaults so command-line
/// flags can pre-fill values the file omits.
inline SemigroupSpec spec_from_json(const json& j, SemigroupSpec base = {}) {
    if (!j.is_object()) throw std::invalid_argument("spec: expected a JSON object");
    SemigroupSpec s = base;
    if (j.contains("p")) {
        if (!j["p"].is_number_integer()) throw std::invalid_argument("spec.p: expected an integer");
        s.p = j["p"].get<std::int64_t>();
    }
    if (j.contains("precision")) {
        if (!j["precision"].is_number_integer())
            throw std::invalid_argument("spec.precision: expected an integer");
        s.level = j["precision"].get<int>();
    }
    if (j.contains("group")) {
        std::string g = j["group"].is_string() ? j["group"].get<std::string>() : "";
        if (g == "SL2")
            s.group = 2;
        else if (g == "SL3")
            s.group = 3;
        else
            throw std::invalid_argument("spec.group: expected \"SL2\" or \"SL3\"");
    }
    if (j.contains("max_word_len")) {
        if (!j["max_word_len"].is_number_integer())
            throw std::invalid_argument("spec.max_word_len: expected an integer");
        s.max_word_len = j["max_word_len"].get<int>();
    }
    if (j.contains("margin")) s.margin = j["margin"].get<int>();
    if (j.contains("node_cap")) s.node_cap = j["node_cap"].get<int>();
    if (j.contains("random_seeds")) s.random_seeds = j["random_seeds"].get<int>();
    if (j.contains("witness_cap")) s.witness_cap = j["witness_cap"].get<int>();
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("generators")) {
        if (!j["generators"].is_array() || j["generators"].empty())
            throw std::invalid_argument("spec.generators: expected a nonempty array");
        s.generators.clear();
        for (std::size_t i = 0; i < j["generators"].size(); ++i)
            s.generators.push_back(parse_matrix_entries(j["generators"][i], s.group,
                                                        "spec.generators[" + std::to_string(i) + "]"));
    }
    return s;
}

inline json spec_to_json(const SemigroupSpec& s) {
    json j;
    j["p"] = s.p;
    j["precision"] = s.level;
    j["group"] = s.group == 2 ? "SL2" : "SL3";
    j["max_word_len"] = s.max_word_len;
    j["margin"] = s.margin;
    j["node_cap"] = s.node_cap;
    j["random_seeds"] = s.random_seeds;
    j["witness_cap"] = s.witness_cap;
    j["seed"] = s.seed;
    json gens = json::array();
    for (const auto& g : s.generators) {
        int n = s.group;
        json rows = json::array();
        for (int r = 0; r < n; ++r) {
            json row = json::array();
            for (int c = 0; c < n; ++c) {
                auto [num, den] = g[static_cast<std::size_t>(r) * n + c];
                row.push_back(den == 1 ? std::to_string(num)
                                       : std::to_string(num) + "/" + std::to_string(den));
            }
            rows.push_back(row);
        }
        gens.push_back(rows);
    }
    j["generators"] = gens;
    return j;
}

inline json ratio_to_json(const Ratio& r) {
    if (r.den == 1) return r.num;
    return std::to_string(r.num) + "/" + std::to_string(r.den);
}

inline json report_to_json(const ControlSetReport& rep, const SemigroupSpec& spec) {
    json j;
    j["format_version"] = kFormatVersion;
    j["seed"] = spec.seed;
    j["spec"] = spec_to_json(spec);
    j["node_count"] = rep.node_count;
    j["excluded_count"] = rep.excluded_count;
    j["elliptic_only"] = rep.elliptic_only;
    if (rep.elliptic_only)
        j["classification"] = "no hyperbolic witness; semigroup classifies as open subgroup";

    json sets = json::array();
    for (const ControlSetEntry& e : rep.sets) {
        json s;
        s["id"] = e.id;
        json nodes = json::array();
        for (const FlagKey& k : e.nodes) nodes.push_back(k.to_string());
        s["nodes"] = nodes;
        json core = json::array();
        for (const FlagKey& k : e.core) core.push_back(k.to_string());
        s["transitivity_core"] = core;
        s["is_invariant"] = e.is_invariant;
        s["is_sink"] = e.is_sink;
        s["contains_attractor"] = e.contains_attractor;
        json labels = json::array();
        for (const WeylElement& w : e.labels) labels.push_back(w.to_string());
        s["w_labels"] = labels;
        sets.push_back(s);
    }
    j["control_sets"] = sets;
    if (rep.invariant_id)
        j["invariant_id"] = *rep.invariant_id;
    else
        j["invariant_id"] = nullptr;

    json wits = json::array();
    for (const ReportWitness& w : rep.witnesses) {
        json wj;
        wj["word"] = detail::word_name(w.word);
        json vals = json::array();
        for (const Ratio& r : w.valuations) vals.push_back(ratio_to_json(r));
        wj["valuations"] = vals;
        wits.push_back(wj);
    }
    j["witnesses"] = wits;

    json ws = json::array();
    for (const WeylElement& w : rep.weyl_subgroup) ws.push_back(w.to_string());
    j["weyl_subgroup"] = ws;
    json cosets = json::array();
    for (const auto& coset : rep.cosets) {
        json c = json::array();
        for (const WeylElement& w : coset) c.push_back(w.to_string());
        cosets.push_back(c);
    }
    j["cosets"] = cosets;

    json verdicts;
    verdicts["consistent"] = rep.consistent;
    verdicts["labels_complete"] = rep.labels_complete;
    json issues = json::array();
    for (const VerdictIssue& v : rep.issues) issues.push_back(json{{"kind", v.kind}, {"detail", v.detail}});
    verdicts["issues"] = issues;
    j["verdicts"] = verdicts;
    j["warnings"] = rep.warnings;
    return j;
}

/// DOT rendering of the orbit graph: nodes in canonical order, edges labeled
/// by generator index, invariant-set nodes doubly circled. Byte stable.
inline std::string emit_dot(const OrbitGraph& g, const std::vector<FlagKey>& invariant_nodes) {
    std::set<FlagKey> inv(invariant_nodes.begin(), invariant_nodes.end());
    std::string s;
    s += "digraph orbit {\n";
    s += "  // format_version " + std::to_string(kFormatVersion) + "\n";
    s += "  rankdir=LR;\n";
    s += "  node [shape=ellipse];\n";
    for (const FlagKey& k : g.nodes) {
        s += "  \"" + k.to_string() + "\"";
        if (inv.count(k)) s += " [peripheries=2]";
        s += ";\n";
    }
    for (std::size_t v = 0; v < g.nodes.size(); ++v)
        for (std::size_t gi = 0; gi < g.targets[v].size(); ++gi) {
            int t = g.targets[v][gi];
            if (t < 0) continue;
            s += "  \"" + g.nodes[v].to_string() + "\" -> \"" +
                 g.nodes[static_cast<std::size_t>(t)].to_string() + "\" [label=\"g" +
                 std::to_string(gi) + "\"];\n";
        }
    s += "}\n";
    return s;
}

/// DOT rendering of a tree ball, for inspection: vertices named by their
/// Hermite triple, undirected edges written once from the lesser endpoint.
inline std::string emit_tree_dot(const PAdicContext& ctx, const TreeVertex& center, int radius) {
    std::vector<TreeVertex> ball = tree_ball(ctx, center, radius);
    std::set<TreeVertex> inside(ball.begin(), ball.end());
    std::string s;
    s += "graph ball {\n";
    s += "  // format_version " + std::to_string(kFormatVersion) + "\n";
    s += "  node [shape=point];\n";
    std::vector<TreeVertex> sorted = ball;
    std::sort(sorted.begin(), sorted.end());
    for (const TreeVertex& v : sorted) {
        s += "  \"" + v.to_string() + "\"";
        if (v == center) s += " [shape=circle, label=\"o\"]";
        s += ";\n";
    }
    for (const TreeVertex& v : sorted)
        for (const TreeVertex& w : tree_neighbors(ctx, v))
            if (inside.count(w) && v < w)
                s += "  \"" + v.to_string() + "\" -- \"" + w.to_string() + "\";\n";
    s += "}\n";
    return s;
}

} // namespace qpflag
