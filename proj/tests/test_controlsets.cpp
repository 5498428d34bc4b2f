#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "qpflag/controlsets.hpp"

using namespace qpflag;

namespace {

using Gen = std::vector<std::pair<std::int64_t, std::int64_t>>;

const Gen kStretch = {{5, 1}, {0, 1}, {0, 1}, {1, 5}};     // diag(5, 1/5)
const Gen kShrink = {{1, 5}, {0, 1}, {0, 1}, {5, 1}};      // diag(1/5, 5)
const Gen kRotation = {{0, 1}, {1, 1}, {-1, 1}, {0, 1}};   // [[0,1],[-1,0]]
const Gen kTwisted = {{0, 1}, {1, 5}, {-5, 1}, {0, 1}};    // [[0,1/5],[-5,0]]

SemigroupSpec sl2_spec(std::vector<Gen> gens, int level = 1, int word_len = 3) {
    SemigroupSpec s;
    s.group = 2;
    s.p = 5;
    s.level = level;
    s.max_word_len = word_len;
    s.generators = std::move(gens);
    return s;
}

std::vector<std::string> node_names(const std::vector<FlagKey>& keys) {
    std::vector<std::string> out;
    for (const FlagKey& k : keys) out.push_back(k.to_string());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> label_names(const ControlSetEntry& e) {
    std::vector<std::string> out;
    for (const WeylElement& w : e.labels) out.push_back(w.to_string());
    std::sort(out.begin(), out.end());
    return out;
}

const ControlSetEntry& set_with_nodes(const ControlSetReport& rep,
                                      const std::vector<std::string>& names) {
    for (const ControlSetEntry& e : rep.sets)
        if (node_names(e.nodes) == names) return e;
    FAIL("no control set with nodes " + names.front());
    return rep.sets.front();
}

bool has_issue(const ControlSetReport& rep, const std::string& kind) {
    for (const VerdictIssue& i : rep.issues)
        if (i.kind == kind) return true;
    return false;
}

} // namespace

TEST_CASE("single contracting generator produces the two-set picture") {
    ControlSetReport rep = analyze_semigroup(sl2_spec({kStretch}));

    CHECK(rep.group == 2);
    CHECK(rep.p == 5);
    CHECK(rep.level == 1);
    CHECK(rep.node_count == 6);
    CHECK(rep.excluded_count == 0);
    CHECK_FALSE(rep.elliptic_only);

    REQUIRE(rep.sets.size() == 2);
    const ControlSetEntry& inv = set_with_nodes(rep, {"[0:1]"});
    const ControlSetEntry& other = set_with_nodes(rep, {"[1:0]"});

    CHECK(inv.is_invariant);
    CHECK(inv.is_sink);
    CHECK(inv.contains_attractor);
    CHECK(node_names(inv.core) == node_names(inv.nodes));
    CHECK(label_names(inv) == std::vector<std::string>{"e"});

    CHECK_FALSE(other.is_invariant);
    CHECK(other.is_sink);
    CHECK_FALSE(other.contains_attractor);
    CHECK(label_names(other) == std::vector<std::string>{"r1"});

    REQUIRE(rep.invariant_id.has_value());
    CHECK(rep.sets[*rep.invariant_id].nodes == inv.nodes);

    REQUIRE(rep.weyl_subgroup.size() == 1);
    CHECK(rep.weyl_subgroup[0].is_identity());
    REQUIRE(rep.cosets.size() == 2);
    CHECK(rep.cosets[0].size() == 1);
    CHECK(rep.cosets[1].size() == 1);

    CHECK(rep.consistent);
    CHECK(rep.labels_complete);
    CHECK(rep.issues.empty());

    // The second sink is exactly fixed at every precision, so it survives
    // truncation; the report points that out rather than hiding it.
    bool warned = false;
    for (const std::string& w : rep.warnings)
        if (w.find("sink without attractors") != std::string::npos) warned = true;
    CHECK(warned);

    // Witnesses are the powers of the generator, in length order.
    REQUIRE(rep.witnesses.size() == 3);
    for (std::size_t k = 0; k < rep.witnesses.size(); ++k) {
        CHECK(rep.witnesses[k].word == std::vector<int>(k + 1, 0));
        REQUIRE(rep.witnesses[k].valuations.size() == 2);
        CHECK(rep.witnesses[k].valuations[0].num == -static_cast<std::int64_t>(k + 1));
        CHECK(rep.witnesses[k].valuations[0].den == 1);
        CHECK(rep.witnesses[k].valuations[1].num == static_cast<std::int64_t>(k + 1));
    }
}

TEST_CASE("orbit graph and component analysis expose the raw structure") {
    SemigroupSpec spec = sl2_spec({kStretch});
    OrbitGraph graph = build_orbit_graph(spec);

    REQUIRE(graph.nodes.size() == 6);
    CHECK(graph.generator_count == 1);
    CHECK(graph.excluded.empty());
    CHECK(graph.dropped_edges == 0);
    CHECK(std::is_sorted(graph.nodes.begin(), graph.nodes.end()));

    int at_zero_one = graph.find_node(FlagKey{2, {0, 1}, {}});
    int at_one_zero = graph.find_node(FlagKey{2, {1, 0}, {}});
    int at_one_two = graph.find_node(FlagKey{2, {1, 2}, {}});
    REQUIRE(at_zero_one >= 0);
    REQUIRE(at_one_zero >= 0);
    REQUIRE(at_one_two >= 0);

    // Fixed ends loop, everything else falls into the contracting end.
    CHECK(graph.targets[at_zero_one][0] == at_zero_one);
    CHECK(graph.targets[at_one_zero][0] == at_one_zero);
    CHECK(graph.targets[at_one_two][0] == at_zero_one);

    SccAnalysis scc = analyze_sccs(graph);
    REQUIRE(scc.components.size() == 6);
    int cyclic = 0, sinks = 0;
    for (std::size_t c = 0; c < scc.components.size(); ++c) {
        if (scc.cyclic[c]) ++cyclic;
        if (scc.cyclic[c] && scc.sink[c]) ++sinks;
    }
    CHECK(cyclic == 2);
    CHECK(sinks == 2);

    TransitivityCore core = transitivity_core(graph, {at_zero_one});
    CHECK(core.core == std::vector<int>{at_zero_one});
    CHECK(core.full == std::vector<int>{at_zero_one});

    int comp = invariant_control_set(graph, scc, {at_zero_one});
    CHECK(scc.components[comp] == std::vector<int>{at_zero_one});

    CHECK_THROWS_AS(invariant_control_set(graph, scc, {at_zero_one, at_one_zero}),
                    MultipleSinks);
    CHECK_THROWS_AS(invariant_control_set(graph, scc, {at_one_two}), NoSink);
}

TEST_CASE("adding a rotation merges both ends into one invariant set") {
    ControlSetReport rep = analyze_semigroup(sl2_spec({kStretch, kRotation}));

    CHECK(rep.node_count == 6);
    CHECK_FALSE(rep.elliptic_only);
    REQUIRE(rep.sets.size() == 4);

    const ControlSetEntry& inv = set_with_nodes(rep, {"[0:1]", "[1:0]"});
    CHECK(inv.is_invariant);
    CHECK(inv.is_sink);
    CHECK(inv.contains_attractor);
    CHECK(label_names(inv) == std::vector<std::string>{"e", "r1"});
    CHECK(node_names(inv.core) == node_names(inv.nodes));

    int sink_count = 0;
    for (const ControlSetEntry& e : rep.sets) {
        if (e.is_sink) ++sink_count;
        if (!e.is_invariant) CHECK(e.labels.empty());
    }
    CHECK(sink_count == 1);

    // The rotation pairs residues into two-cycles away from the ends.
    CHECK(set_with_nodes(rep, {"[1:1]", "[1:4]"}).nodes.size() == 2);
    CHECK(set_with_nodes(rep, {"[1:2]"}).nodes.size() == 1);
    CHECK(set_with_nodes(rep, {"[1:3]"}).nodes.size() == 1);

    // Both chambers label the invariant set, so the subgroup is everything
    // and the coset partition collapses.
    REQUIRE(rep.weyl_subgroup.size() == 2);
    REQUIRE(rep.cosets.size() == 1);
    CHECK(rep.cosets[0].size() == 2);
    CHECK(rep.consistent);
    CHECK(rep.labels_complete);
}

TEST_CASE("bounded generators only become hyperbolic in products") {
    std::vector<Gen> gens = {kRotation, kTwisted};

    SECTION("words of length one stay elliptic") {
        ControlSetReport rep = analyze_semigroup(sl2_spec(gens, 1, 1));
        CHECK(rep.elliptic_only);
        CHECK(rep.witnesses.empty());
        CHECK_FALSE(rep.invariant_id.has_value());
        CHECK(rep.weyl_subgroup.empty());
        CHECK(rep.cosets.empty());
        CHECK(rep.consistent);
        CHECK_FALSE(rep.labels_complete);
        // The cyclic structure of the graph is still reported.
        CHECK(rep.sets.size() == 4);
        for (const ControlSetEntry& e : rep.sets) CHECK(e.labels.empty());
    }

    SECTION("length two finds the translating product") {
        ControlSetReport rep = analyze_semigroup(sl2_spec(gens, 1, 2));
        CHECK_FALSE(rep.elliptic_only);
        REQUIRE_FALSE(rep.witnesses.empty());
        CHECK(rep.witnesses[0].word == std::vector<int>{0, 1});
        CHECK(rep.witnesses[0].valuations[0].num == -1);
        CHECK(rep.witnesses[0].valuations[1].num == 1);

        const ControlSetEntry& inv = set_with_nodes(rep, {"[0:1]", "[1:0]"});
        CHECK(inv.is_invariant);
        CHECK(label_names(inv) == std::vector<std::string>{"e", "r1"});
        CHECK(rep.weyl_subgroup.size() == 2);
        CHECK(rep.cosets.size() == 1);
        CHECK(rep.consistent);
        CHECK(rep.labels_complete);
    }
}

TEST_CASE("regular diagonal in the rank two group isolates six chambers") {
    SemigroupSpec spec;
    spec.group = 3;
    spec.p = 5;
    spec.level = 1;
    spec.max_word_len = 2;
    spec.witness_cap = 4;
    spec.generators = {{{1, 5}, {0, 1}, {0, 1},
                        {0, 1}, {1, 1}, {0, 1},
                        {0, 1}, {0, 1}, {5, 1}}};

    ControlSetReport rep = analyze_semigroup(spec);

    CHECK_FALSE(rep.elliptic_only);
    CHECK(rep.node_count >= 6);
    REQUIRE(rep.sets.size() == 6);

    std::set<std::string> labeled;
    for (const ControlSetEntry& e : rep.sets) {
        CHECK(e.nodes.size() == 1);
        CHECK(e.is_sink);
        REQUIRE(e.labels.size() == 1);
        labeled.insert(e.labels[0].to_string());
    }
    CHECK(labeled.size() == 6);

    REQUIRE(rep.invariant_id.has_value());
    const ControlSetEntry& inv = rep.sets[*rep.invariant_id];
    CHECK(node_names(inv.nodes) == std::vector<std::string>{"[1:0:0|0:0:1]"});
    CHECK(label_names(inv) == std::vector<std::string>{"e"});

    REQUIRE(rep.weyl_subgroup.size() == 1);
    CHECK(rep.weyl_subgroup[0].is_identity());
    CHECK(rep.cosets.size() == 6);
    for (const auto& coset : rep.cosets) CHECK(coset.size() == 1);

    CHECK(rep.consistent);
    CHECK(rep.labels_complete);
    CHECK(rep.issues.empty());
}

TEST_CASE("identity generator pins every node as its own control set") {
    Gen identity = {{1, 1}, {0, 1}, {0, 1}, {1, 1}};
    ControlSetReport rep = analyze_semigroup(sl2_spec({identity}));

    CHECK(rep.elliptic_only);
    CHECK(rep.witnesses.empty());
    CHECK(rep.node_count == 6);
    REQUIRE(rep.sets.size() == 6);
    for (const ControlSetEntry& e : rep.sets) {
        CHECK(e.nodes.size() == 1);
        CHECK(e.is_sink);
    }
    CHECK(rep.consistent);
}

TEST_CASE("opposite contractions are reported as an inconsistent semigroup") {
    ControlSetReport rep = analyze_semigroup(sl2_spec({kStretch, kShrink}, 1, 2));

    CHECK_FALSE(rep.elliptic_only);
    CHECK_FALSE(rep.consistent);
    CHECK_FALSE(rep.invariant_id.has_value());
    CHECK(has_issue(rep, "multiple_sinks"));
    CHECK(has_issue(rep, "witness_disagreement"));
    CHECK(rep.weyl_subgroup.empty());
    CHECK(rep.cosets.empty());

    // Both ends are genuine sinks with an attractor each.
    int attracting_sinks = 0;
    for (const ControlSetEntry& e : rep.sets)
        if (e.is_sink && e.contains_attractor) ++attracting_sinks;
    CHECK(attracting_sinks == 2);
}

TEST_CASE("deeper level refines the invariant set consistently") {
    ControlSetReport coarse = analyze_semigroup(sl2_spec({kStretch}, 1));
    ControlSetReport fine = analyze_semigroup(sl2_spec({kStretch}, 2));

    CHECK(fine.node_count == 30);
    REQUIRE(coarse.invariant_id.has_value());
    REQUIRE(fine.invariant_id.has_value());

    const ControlSetEntry& inv1 = coarse.sets[*coarse.invariant_id];
    const ControlSetEntry& inv2 = fine.sets[*fine.invariant_id];
    CHECK(node_names(inv2.nodes) == std::vector<std::string>{"[0:1]"});

    // Every node of the level 2 invariant set reduces into the level 1 one.
    PAdicContext ctx{5, 10};
    std::set<std::string> coarse_names;
    for (const FlagKey& k : inv1.nodes) coarse_names.insert(k.to_string());
    for (const FlagKey& k : inv2.nodes) {
        Flag lifted = lift_key(ctx, k);
        CHECK(coarse_names.count(lifted.level_key(1).to_string()) == 1);
    }

    CHECK(node_names(inv1.nodes) == std::vector<std::string>{"[0:1]"});
    CHECK(fine.weyl_subgroup.size() == 1);
    CHECK(fine.consistent);
}

TEST_CASE("conjugating the generators relabels nodes but keeps the shape") {
    // u diag(5,1/5) u^-1 for the unipotent u = [[1,1],[0,1]].
    Gen conjugated = {{5, 1}, {-24, 5}, {0, 1}, {1, 5}};
    ControlSetReport rep = analyze_semigroup(sl2_spec({conjugated}));

    REQUIRE(rep.sets.size() == 2);
    REQUIRE(rep.invariant_id.has_value());
    const ControlSetEntry& inv = rep.sets[*rep.invariant_id];
    CHECK(node_names(inv.nodes) == std::vector<std::string>{"[1:1]"});
    CHECK(label_names(inv) == std::vector<std::string>{"e"});

    const ControlSetEntry& other = set_with_nodes(rep, {"[1:0]"});
    CHECK(label_names(other) == std::vector<std::string>{"r1"});

    REQUIRE(rep.weyl_subgroup.size() == 1);
    CHECK(rep.weyl_subgroup[0].is_identity());
    CHECK(rep.cosets.size() == 2);
    CHECK(rep.consistent);
}

TEST_CASE("witness search respects length order and regularity") {
    PAdicContext ctx{5, 9};
    Matrix stretch = Matrix::from_rationals(ctx, 2, kStretch);
    Matrix rot = Matrix::from_rationals(ctx, 2, kRotation);

    std::vector<Witness> powers = find_regular_hyperbolic({stretch}, 3, 8);
    REQUIRE(powers.size() == 3);
    for (std::size_t k = 0; k < powers.size(); ++k) {
        CHECK(powers[k].word.size() == k + 1);
        CHECK(powers[k].spectrum.regular);
        CHECK(powers[k].spectrum.hyperbolic);
    }

    CHECK(find_regular_hyperbolic({rot}, 4, 8).empty());

    std::vector<Witness> capped = find_regular_hyperbolic({stretch}, 6, 2);
    CHECK(capped.size() == 2);
}

TEST_CASE("spec validation names the offending field") {
    auto expect_reject = [](SemigroupSpec s, const std::string& needle) {
        try {
            validate_spec(s);
            FAIL("expected rejection mentioning " + needle);
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    SemigroupSpec base = sl2_spec({kStretch});
    validate_spec(base);

    SemigroupSpec s = base;
    s.group = 4;
    expect_reject(s, "spec.group");

    s = base;
    s.p = 6;
    expect_reject(s, "spec.p");

    s = base;
    s.level = 0;
    expect_reject(s, "spec.level");

    s = base;
    s.max_word_len = 0;
    expect_reject(s, "spec.max_word_len");

    s = base;
    s.generators.clear();
    expect_reject(s, "spec.generators");

    s = base;
    s.generators[0].pop_back();
    expect_reject(s, "spec.generators[0]");

    s = base;
    s.generators[0][1] = {1, 0};
    expect_reject(s, "spec.generators[0]");

    // Non-unit determinant is caught when the matrices are built.
    s = base;
    s.generators[0] = {{5, 1}, {0, 1}, {0, 1}, {1, 1}};
    CHECK_THROWS_AS(build_generators(s), std::invalid_argument);

    s = base;
    s.node_cap = 3;
    CHECK_THROWS_AS(analyze_semigroup(s), CapExceeded);
}
