#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qpflag/flag.hpp"

namespace qpflag {

/// A finitely generated sub-semigroup of SL_n(Q_p) together with the level
/// at which its action on the flag space is discretized. Generators are kept
/// as exact rational entries so the spec is context free; matrices are built
/// at working precision level + margin.
struct SemigroupSpec {
    int group = 2;  // matrix size, 2 or 3
    std::int64_t p = 5;
    int level = 1;
    int max_word_len = 4;
    std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> generators;  // row major rationals

    // Configuration beyond the core fields, all with safe defaults.
    int margin = 8;           // extra working digits on top of the level
    int node_cap = 20000;     // hard cap on the orbit graph size
    int random_seeds = 200;   // extra random seed flags for group = 3
    int witness_cap = 8;      // stop the hyperbolic search after this many
    std::uint64_t seed = 0;   // RNG seed for the random flags
};

inline void validate_spec(const SemigroupSpec& s) {
    if (s.group != 2 && s.group != 3)
        throw std::invalid_argument("spec.group: must be 2 or 3");
    if (s.p < 2 || !detail::is_prime_u64(static_cast<std::uint64_t>(s.p)))
        throw std::invalid_argument("spec.p: must be a prime");
    if (s.level < 1) throw std::invalid_argument("spec.level: must be at least 1");
    if (s.margin < 1) throw std::invalid_argument("spec.margin: must be at least 1");
    if (s.max_word_len < 1) throw std::invalid_argument("spec.max_word_len: must be at least 1");
    if (s.node_cap < 1) throw std::invalid_argument("spec.node_cap: must be positive");
    if (s.random_seeds < 0) throw std::invalid_argument("spec.random_seeds: must not be negative");
    if (s.witness_cap < 1) throw std::invalid_argument("spec.witness_cap: must be positive");
    if (s.generators.empty()) throw std::invalid_argument("spec.generators: list must not be empty");
    for (std::size_t i = 0; i < s.generators.size(); ++i) {
        if (static_cast<int>(s.generators[i].size()) != s.group * s.group)
            throw std::invalid_argument("spec.generators[" + std::to_string(i) +
                                        "]: entry count does not match the group size");
        for (const auto& [num, den] : s.generators[i])
            if (den == 0)
                throw std::invalid_argument("spec.generators[" + std::to_string(i) +
                                            "]: zero denominator");
    }
    PAdicContext{s.p, s.level + s.margin};  // validates the precision bound
}

inline PAdicContext working_context(const SemigroupSpec& s) {
    return PAdicContext{s.p, s.level + s.margin};
}

inline std::vector<Matrix> build_generators(const SemigroupSpec& s) {
    validate_spec(s);
    PAdicContext ctx = working_context(s);
    std::vector<Matrix> out;
    for (std::size_t i = 0; i < s.generators.size(); ++i) {
        Matrix g = Matrix::from_rationals(ctx, s.group, s.generators[i]);
        if (!g.is_special())
            throw std::invalid_argument("spec.generators[" + std::to_string(i) +
                                        "]: determinant is not 1");
        out.push_back(std::move(g));
    }
    return out;
}

/// A product of generators with pairwise distinct eigenvalue valuations,
/// not all zero: the element whose fixed flags organize the control sets.
struct Witness {
    std::vector<int> word;  // generator indices, leftmost factor first
    Matrix element;
    SpectralData spectrum;
};

/// Length-lex enumeration of generator words, deduplicated at working
/// precision, filtered to regular hyperbolic spectra. An empty result is a
/// legitimate outcome: the semigroup then sits inside a bounded subgroup.
inline std::vector<Witness> find_regular_hyperbolic(const std::vector<Matrix>& gens,
                                                    int max_word_len, int witness_cap) {
    std::vector<Witness> out;
    std::vector<Matrix> seen;
    std::vector<std::pair<std::vector<int>, Matrix>> frontier;
    frontier.emplace_back(std::vector<int>{}, Matrix::identity(gens.front().context(), gens.front().dim()));
    for (int len = 1; len <= max_word_len && static_cast<int>(out.size()) < witness_cap; ++len) {
        std::vector<std::pair<std::vector<int>, Matrix>> next;
        for (const auto& [word, m] : frontier) {
            for (std::size_t gi = 0; gi < gens.size(); ++gi) {
                std::vector<int> w = word;
                w.push_back(static_cast<int>(gi));
                Matrix prod = m * gens[gi];
                bool dup = false;
                for (const Matrix& s : seen)
                    if (s == prod) {
                        dup = true;
                        break;
                    }
                if (dup) continue;  // a repeated product spans a repeated subtree
                seen.push_back(prod);
                next.emplace_back(w, prod);
                SpectralData sd = spectral_valuations(prod);
                if (sd.regular && sd.hyperbolic && static_cast<int>(out.size()) < witness_cap)
                    out.push_back(Witness{w, prod, sd});
            }
        }
        frontier = std::move(next);
    }
    return out;
}

inline std::vector<Witness> find_regular_hyperbolic(const SemigroupSpec& spec) {
    return find_regular_hyperbolic(build_generators(spec), spec.max_word_len, spec.witness_cap);
}

/// Level-N action graph: one node per canonical flag key, one labeled edge
/// per generator. Nodes whose image cannot be certified at the level are
/// excluded and reported; edges into excluded nodes are dropped (-1).
struct OrbitGraph {
    int group = 2;
    std::int64_t p = 5;
    int level = 1;
    int generator_count = 0;
    std::vector<FlagKey> nodes;             // sorted ascending
    std::vector<std::vector<int>> targets;  // [node][generator] -> node index, -1 if dropped
    std::vector<FlagKey> excluded;
    int dropped_edges = 0;
    std::vector<std::string> warnings;

    int find_node(const FlagKey& k) const {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), k);
        if (it == nodes.end() || !(*it == k)) return -1;
        return static_cast<int>(it - nodes.begin());
    }
};

namespace detail {

inline std::optional<FlagKey> edge_key(const PAdicContext& ctx, const Matrix& g,
                                       const FlagKey& from, int level) {
    try {
        return act(g, lift_key(ctx, from)).level_key(level);
    } catch (const PrecisionExhausted&) {
        return std::nullopt;
    }
}

} // namespace detail

inline OrbitGraph build_orbit_graph(const SemigroupSpec& spec, const std::vector<Matrix>& gens,
                                    const std::vector<Witness>& witnesses) {
    PAdicContext ctx = working_context(spec);
    OrbitGraph g;
    g.group = spec.group;
    g.p = spec.p;
    g.level = spec.level;
    g.generator_count = static_cast<int>(gens.size());

    std::set<FlagKey> visited;
    std::vector<FlagKey> queue;
    auto push = [&](const FlagKey& k) {
        if (visited.insert(k).second) {
            if (static_cast<int>(visited.size()) > spec.node_cap)
                throw CapExceeded("build_orbit_graph: orbit closure exceeded the node cap");
            queue.push_back(k);
        }
    };

    if (spec.group == 2) {
        std::uint64_t count = ctx.pow(spec.level) + ctx.pow(spec.level - 1);  // p^N + p^(N-1)
        if (count > static_cast<std::uint64_t>(spec.node_cap))
            throw CapExceeded("build_orbit_graph: the exhaustive level flag set exceeds the node cap");
        for (const FlagKey& k : enumerate_level_flags(ctx, spec.level)) push(k);
    } else {
        for (const Witness& w : witnesses) {
            for (const auto& [we, flag] : fixed_flags(w.element)) {
                (void)we;
                try {
                    push(flag.level_key(spec.level));
                } catch (const PrecisionExhausted&) {
                    g.warnings.push_back("seed flag of witness dropped: coordinates undetermined at the level");
                }
            }
        }
        std::mt19937_64 rng(spec.seed);
        for (int i = 0; i < spec.random_seeds; ++i) {
            try {
                push(Flag::from_columns(random_unimodular(ctx, 3, spec.level, rng)).level_key(spec.level));
            } catch (const PrecisionExhausted&) {
                g.warnings.push_back("random seed flag dropped: coordinates undetermined at the level");
            }
        }
    }

    // Breadth-first closure under the generators. Images that cannot be
    // certified leave a gap; the source node is excluded afterwards.
    std::map<FlagKey, std::vector<std::optional<FlagKey>>> out_edges;
    std::set<FlagKey> bad;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        FlagKey from = queue[head];
        std::vector<std::optional<FlagKey>> row;
        for (const Matrix& gen : gens) {
            std::optional<FlagKey> to = detail::edge_key(ctx, gen, from, spec.level);
            if (to)
                push(*to);
            else
                bad.insert(from);
            row.push_back(std::move(to));
        }
        out_edges.emplace(std::move(from), std::move(row));
    }

    for (const auto& [k, row] : out_edges) {
        (void)row;
        if (bad.count(k))
            g.excluded.push_back(k);
        else
            g.nodes.push_back(k);
    }
    if (!g.excluded.empty())
        g.warnings.push_back(std::to_string(g.excluded.size()) +
                             " node(s) excluded: action undetermined at the level");

    g.targets.assign(g.nodes.size(), std::vector<int>(gens.size(), -1));
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const auto& row = out_edges.at(g.nodes[i]);
        for (std::size_t gi = 0; gi < row.size(); ++gi) {
            if (!row[gi]) continue;
            int t = g.find_node(*row[gi]);
            if (t < 0)
                ++g.dropped_edges;  // the image node was excluded
            else
                g.targets[i][gi] = t;
        }
    }
    if (g.dropped_edges > 0)
        g.warnings.push_back(std::to_string(g.dropped_edges) +
                             " edge(s) dropped: image node excluded; reachability statements ignore them");
    return g;
}

inline OrbitGraph build_orbit_graph(const SemigroupSpec& spec) {
    std::vector<Matrix> gens = build_generators(spec);
    std::vector<Witness> witnesses =
        spec.group == 3 ? find_regular_hyperbolic(gens, spec.max_word_len, spec.witness_cap)
                        : std::vector<Witness>{};
    return build_orbit_graph(spec, gens, witnesses);
}

/// Strongly connected components in a deterministic order (sorted by their
/// smallest node index), plus which of them are cyclic and which are sinks.
struct SccAnalysis {
    std::vector<std::vector<int>> components;  // node lists, sorted
    std::vector<int> component_of;
    std::vector<bool> cyclic;  // at least one internal edge
    std::vector<bool> sink;    // no certified edge leaves the component
};

inline SccAnalysis analyze_sccs(const OrbitGraph& g) {
    int n = static_cast<int>(g.nodes.size());
    SccAnalysis a;
    a.component_of.assign(n, -1);

    // Iterative Tarjan.
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int counter = 0;
    struct Frame {
        int v;
        std::size_t next_edge;
    };
    std::vector<std::vector<int>> raw_components;
    for (int start = 0; start < n; ++start) {
        if (index[start] >= 0) continue;
        std::vector<Frame> call{{start, 0}};
        index[start] = low[start] = counter++;
        stack.push_back(start);
        on_stack[start] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.next_edge < g.targets[f.v].size()) {
                int w = g.targets[f.v][f.next_edge++];
                if (w < 0) continue;
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back(Frame{w, 0});
                } else if (on_stack[w] && index[w] < low[f.v]) {
                    low[f.v] = index[w];
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    std::vector<int> comp;
                    while (true) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp.push_back(w);
                        if (w == f.v) break;
                    }
                    std::sort(comp.begin(), comp.end());
                    raw_components.push_back(std::move(comp));
                }
                int v = f.v;
                call.pop_back();
                if (!call.empty() && low[v] < low[call.back().v]) low[call.back().v] = low[v];
            }
        }
    }

    std::sort(raw_components.begin(), raw_components.end(),
              [](const std::vector<int>& x, const std::vector<int>& y) { return x.front() < y.front(); });
    a.components = std::move(raw_components);
    for (std::size_t c = 0; c < a.components.size(); ++c)
        for (int v : a.components[c]) a.component_of[v] = static_cast<int>(c);

    a.cyclic.assign(a.components.size(), false);
    a.sink.assign(a.components.size(), true);
    for (int v = 0; v < n; ++v)
        for (int t : g.targets[v]) {
            if (t < 0) continue;
            int cv = a.component_of[v], ct = a.component_of[t];
            if (cv == ct)
                a.cyclic[cv] = true;
            else
                a.sink[cv] = false;
        }
    return a;
}

/// The control sets of the level-N action: cyclic SCCs, as node index sets.
inline std::vector<std::vector<int>> control_sets(const OrbitGraph& g) {
    SccAnalysis a = analyze_sccs(g);
    std::vector<std::vector<int>> out;
    for (std::size_t c = 0; c < a.components.size(); ++c)
        if (a.cyclic[c]) out.push_back(a.components[c]);
    return out;
}

/// Set of transitivity inside one control set: the members with at least one
/// incoming edge from within the set. For a genuine cyclic SCC this is the
/// whole set; the function verifies rather than assumes it.
struct TransitivityCore {
    std::vector<int> core;
    std::vector<int> full;
};

inline TransitivityCore transitivity_core(const OrbitGraph& g, const std::vector<int>& set) {
    std::set<int> members(set.begin(), set.end());
    std::set<int> has_internal_in;
    for (int v : set)
        for (int t : g.targets[v])
            if (t >= 0 && members.count(t)) has_internal_in.insert(t);
    TransitivityCore out;
    out.full = set;
    out.core.assign(has_internal_in.begin(), has_internal_in.end());
    return out;
}

/// The invariant control set: the unique sink among the attractor-containing
/// cyclic SCCs. Finite truncation manufactures spurious sinks out of exactly
/// fixed repelling and saddle flags, so sinks holding no attractor are
/// reported as artifacts rather than candidates; with that filter the
/// uniqueness claim is exactly what gets checked.
inline int invariant_control_set(const OrbitGraph& g, const SccAnalysis& scc,
                                 const std::vector<int>& attractor_nodes) {
    std::set<int> attractor_comps;
    for (int v : attractor_nodes)
        if (v >= 0) attractor_comps.insert(scc.component_of[v]);
    std::vector<int> candidates;
    for (int c : attractor_comps)
        if (scc.cyclic[static_cast<std::size_t>(c)] && scc.sink[static_cast<std::size_t>(c)])
            candidates.push_back(c);
    std::sort(candidates.begin(), candidates.end());
    if (candidates.empty())
        throw NoSink("invariant_control_set: no attractor lies in a sink control set");
    if (candidates.size() > 1) {
        std::string msg = "invariant_control_set: attractors split across sinks";
        for (int c : candidates) {
            msg += " {";
            for (std::size_t i = 0; i < scc.components[c].size() && i < 4; ++i) {
                if (i) msg += ",";
                msg += g.nodes[scc.components[c][i]].to_string();
            }
            msg += "}";
        }
        throw MultipleSinks(msg);
    }
    return candidates.front();
}

struct ControlSetEntry {
    int id = 0;
    std::vector<FlagKey> nodes;
    std::vector<FlagKey> core;  // set of transitivity
    bool is_invariant = false;
    bool is_sink = false;
    bool contains_attractor = false;
    std::vector<WeylElement> labels;  // all w with D_w = this set
};

struct VerdictIssue {
    std::string kind;
    std::string detail;
};

struct ReportWitness {
    std::vector<int> word;
    std::vector<Ratio> valuations;
};

struct ControlSetReport {
    int group = 2;
    std::int64_t p = 5;
    int level = 1;
    std::size_t node_count = 0;
    std::size_t excluded_count = 0;
    bool elliptic_only = false;  // no regular hyperbolic witness found
    std::vector<ControlSetEntry> sets;
    std::optional<int> invariant_id;  // index into `sets`
    std::vector<ReportWitness> witnesses;
    std::vector<WeylElement> weyl_subgroup;        // W(S), sorted
    std::vector<std::vector<WeylElement>> cosets;  // right cosets W(S)\W
    bool consistent = true;
    bool labels_complete = false;
    std::vector<VerdictIssue> issues;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string word_name(const std::vector<int>& word) {
    std::string s;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i) s += ".";
        s += "g" + std::to_string(word[i]);
    }
    return s.empty() ? "e" : s;
}

} // namespace detail

/// The labeling stage: locate every fixed flag b(h, w) of every witness in
/// the graph, attach the w-labels to control sets, determine the invariant
/// set, read off W(S) and the coset partition, and verify the advertised
/// identities. Disagreements become verdict issues, never silent repairs.
inline ControlSetReport label_and_weyl(const OrbitGraph& g, const std::vector<Witness>& witnesses) {
    ControlSetReport rep;
    rep.group = g.group;
    rep.p = g.p;
    rep.level = g.level;
    rep.node_count = g.nodes.size();
    rep.excluded_count = g.excluded.size();
    rep.warnings = g.warnings;

    SccAnalysis scc = analyze_sccs(g);

    // Control-set entries, in deterministic component order.
    std::vector<int> comp_to_set(scc.components.size(), -1);
    for (std::size_t c = 0; c < scc.components.size(); ++c) {
        if (!scc.cyclic[c]) continue;
        ControlSetEntry e;
        e.id = static_cast<int>(rep.sets.size());
        for (int v : scc.components[c]) e.nodes.push_back(g.nodes[v]);
        TransitivityCore core = transitivity_core(g, scc.components[c]);
        for (int v : core.core) e.core.push_back(g.nodes[v]);
        e.is_sink = scc.sink[c];
        comp_to_set[c] = e.id;
        rep.sets.push_back(std::move(e));
    }

    for (const Witness& w : witnesses)
        rep.witnesses.push_back(ReportWitness{w.word, w.spectrum.valuations});

    if (witnesses.empty()) {
        rep.elliptic_only = true;
        return rep;
    }

    // Fixed flags per witness, reduced to the level.
    PAdicContext ctx = witnesses.front().element.context();
    std::vector<WeylElement> group_elems = enumerate_group(g.group);
    // label_of[wi][w index] = control-set id or -1
    std::vector<std::vector<int>> label_of(witnesses.size(),
                                           std::vector<int>(group_elems.size(), -1));
    std::vector<int> attractor_nodes;
    for (std::size_t wi = 0; wi < witnesses.size(); ++wi) {
        std::vector<std::pair<WeylElement, Flag>> fixed;
        try {
            fixed = fixed_flags(witnesses[wi].element);
        } catch (const Error& e) {
            rep.issues.push_back({"witness_degenerate",
                                  "witness " + detail::word_name(witnesses[wi].word) + ": " + e.what()});
            rep.consistent = false;
            continue;
        }
        for (const auto& [w, flag] : fixed) {
            std::size_t widx =
                std::lower_bound(group_elems.begin(), group_elems.end(), w) - group_elems.begin();
            int node = -1;
            try {
                node = g.find_node(flag.level_key(g.level));
            } catch (const PrecisionExhausted&) {
                rep.warnings.push_back("fixed flag of witness " + detail::word_name(witnesses[wi].word) +
                                       " at w=" + w.to_string() + " undetermined at the level");
                continue;
            }
            if (node < 0) {
                rep.warnings.push_back("fixed flag of witness " + detail::word_name(witnesses[wi].word) +
                                       " at w=" + w.to_string() + " is not a graph node");
                continue;
            }
            if (w.is_identity()) attractor_nodes.push_back(node);
            int set_id = comp_to_set[scc.component_of[node]];
            if (set_id < 0) {
                rep.warnings.push_back("fixed flag of witness " + detail::word_name(witnesses[wi].word) +
                                       " at w=" + w.to_string() + " is transient at this level");
                continue;
            }
            label_of[wi][widx] = set_id;
        }
    }

    // Witness agreement, then one label per w.
    std::vector<int> label(group_elems.size(), -1);
    for (std::size_t k = 0; k < group_elems.size(); ++k) {
        for (std::size_t wi = 0; wi < witnesses.size(); ++wi) {
            int l = label_of[wi][k];
            if (l < 0) continue;
            if (label[k] < 0) {
                label[k] = l;
            } else if (label[k] != l) {
                rep.issues.push_back(
                    {"witness_disagreement",
                     "w=" + group_elems[k].to_string() + ": witness " +
                         detail::word_name(witnesses[wi].word) + " labels control set " +
                         std::to_string(l) + ", an earlier witness labeled " + std::to_string(label[k])});
                rep.consistent = false;
            }
        }
    }
    rep.labels_complete = true;
    for (std::size_t k = 0; k < group_elems.size(); ++k) {
        if (label[k] < 0) {
            rep.labels_complete = false;
            rep.issues.push_back({"unlabeled", "w=" + group_elems[k].to_string() +
                                                   " received no control-set label from any witness"});
        } else {
            rep.sets[label[k]].labels.push_back(group_elems[k]);
        }
    }

    // Invariant set from the attractors. A zero or multiple sink count is
    // recorded as a verdict so the rest of the report still comes out.
    for (int v : attractor_nodes) {
        int sid = comp_to_set[scc.component_of[v]];
        if (sid >= 0) rep.sets[sid].contains_attractor = true;
    }
    for (const ControlSetEntry& e : rep.sets)
        if (e.is_sink && !e.contains_attractor)
            rep.warnings.push_back("control set " + std::to_string(e.id) +
                                   " is a sink without attractors: truncation artifact of exactly "
                                   "fixed non-attracting flags");
    int inv_set = -1;
    try {
        int inv_comp = invariant_control_set(g, scc, attractor_nodes);
        inv_set = comp_to_set[inv_comp];
        rep.invariant_id = inv_set;
        rep.sets[inv_set].is_invariant = true;
    } catch (const NoSink& e) {
        rep.issues.push_back({"no_sink", e.what()});
        rep.consistent = false;
    } catch (const MultipleSinks& e) {
        rep.issues.push_back({"multiple_sinks", e.what()});
        rep.consistent = false;
    }

    // W(S) = labels attached to the invariant set.
    if (inv_set >= 0)
        for (std::size_t k = 0; k < group_elems.size(); ++k)
            if (label[k] == inv_set) rep.weyl_subgroup.push_back(group_elems[k]);

    if (inv_set >= 0 && rep.labels_complete && rep.consistent) {
        // Subgroup closure.
        std::set<WeylElement> ws(rep.weyl_subgroup.begin(), rep.weyl_subgroup.end());
        bool closed = !ws.empty();
        for (const WeylElement& x : rep.weyl_subgroup) {
            if (!ws.count(x.inverse())) closed = false;
            for (const WeylElement& y : rep.weyl_subgroup)
                if (!ws.count(x * y)) closed = false;
        }
        if (!closed) {
            rep.issues.push_back({"not_subgroup", "W(S) is not closed under the group operations"});
            rep.consistent = false;
        }

        // Generated by its simple reflections.
        std::vector<WeylElement> simples;
        for (int i = 1; i < g.group; ++i) {
            WeylElement r = WeylElement::generator(g.group, i);
            if (ws.count(r)) simples.push_back(r);
        }
        std::vector<WeylElement> generated = subgroup_generated(g.group, simples);
        std::vector<WeylElement> wsorted = rep.weyl_subgroup;
        std::sort(wsorted.begin(), wsorted.end());
        std::sort(generated.begin(), generated.end());
        if (generated != wsorted) {
            rep.issues.push_back({"not_standard",
                                  "W(S) is not generated by its simple reflections"});
            rep.consistent = false;
        }

        // Label partition = right cosets W(S)w.
        for (std::size_t i = 0; i < group_elems.size() && rep.consistent; ++i)
            for (std::size_t j = 0; j < group_elems.size(); ++j) {
                bool same_label = label[i] == label[j];
                bool same_coset = ws.count(group_elems[i] * group_elems[j].inverse()) > 0;
                if (same_label != same_coset) {
                    rep.issues.push_back(
                        {"coset_mismatch", "pair (" + group_elems[i].to_string() + ", " +
                                               group_elems[j].to_string() +
                                               "): label partition disagrees with the right cosets"});
                    rep.consistent = false;
                    break;
                }
            }
    }

    if (!rep.weyl_subgroup.empty()) rep.cosets = right_coset_partition(g.group, rep.weyl_subgroup);
    return rep;
}

/// End-to-end pipeline: validate, search witnesses, build the graph, label.
/// NoSink / MultipleSinks propagate to the caller; an all-elliptic semigroup
/// returns a report with elliptic_only set instead of failing.
inline ControlSetReport analyze_semigroup(const SemigroupSpec& spec) {
    std::vector<Matrix> gens = build_generators(spec);
    std::vector<Witness> witnesses = find_regular_hyperbolic(gens, spec.max_word_len, spec.witness_cap);
    OrbitGraph graph = build_orbit_graph(spec, gens, witnesses);
    return label_and_weyl(graph, witnesses);
}

} // namespace qpflag
