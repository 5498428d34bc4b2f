#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qpflag/io.hpp"

namespace qpflag {
namespace cli {

namespace detail {

inline json parse_json_text(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::exception&) {
        throw std::invalid_argument(where + ": malformed JSON");
    }
}

inline json read_json_file(const std::string& path, const std::string& where) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument(where + ": cannot open \"" + path + "\"");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_json_text(buf.str(), where);
}

inline void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("--out: cannot write \"" + out_path + "\"");
    out << text << "\n";
}

inline std::pair<std::int64_t, std::int64_t> parse_rational_str(const std::string& s,
                                                                const std::string& where) {
    return parse_rational(json(s), where);
}

inline std::vector<PAdic> parse_vector(const PAdicContext& ctx, const std::string& text,
                                       int n, const std::string& where) {
    std::vector<PAdic> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        auto [num, den] = parse_rational_str(part, where);
        out.push_back(PAdic::from_rational(ctx, num, den));
    }
    if (static_cast<int>(out.size()) != n)
        throw std::invalid_argument(where + ": expected " + std::to_string(n) +
                                    " comma-separated coordinates");
    return out;
}

inline json base_report(std::uint64_t seed) {
    json j;
    j["format_version"] = kFormatVersion;
    j["seed"] = seed;
    return j;
}

struct PadicArgs {
    std::int64_t p = 5;
    int precision = 6;
    std::string op = "add";
    std::string a, b;
    std::string out;
};

inline int run_padic(const PadicArgs& args) {
    PAdicContext ctx{args.p, args.precision};
    PAdic a = PAdic::parse(ctx, args.a);
    json j = base_report(0);
    j["p"] = args.p;
    j["precision"] = args.precision;
    j["op"] = args.op;
    j["a"] = a.to_string();
    PAdic r = a;
    if (args.op == "add" || args.op == "sub" || args.op == "mul" || args.op == "div") {
        if (args.b.empty()) throw std::invalid_argument("--b: required for a binary op");
        PAdic b = PAdic::parse(ctx, args.b);
        j["b"] = b.to_string();
        if (args.op == "add") r = a + b;
        if (args.op == "sub") r = a - b;
        if (args.op == "mul") r = a * b;
        if (args.op == "div") r = a / b;
    } else if (args.op == "invert") {
        r = invert(a);
    } else if (args.op == "norm") {
        r = a;
    } else {
        throw std::invalid_argument("--op: unknown operation \"" + args.op + "\"");
    }
    j["result"] = r.to_string();
    if (!r.is_zero()) {
        j["valuation"] = r.valuation();
        j["digits"] = r.digits();
    }
    PAdic::Norm nm = r.norm();
    j["norm"] = std::to_string(nm.num) + "/" + std::to_string(nm.den);
    write_output(j.dump(2), args.out);
    return 0;
}

struct WeylArgs {
    int n = 3;
    std::string element;
    std::string cosets;  // comma-separated simple-reflection indices
    std::string out;
};

inline int run_weyl(const WeylArgs& args) {
    json j = base_report(0);
    j["n"] = args.n;
    std::vector<WeylElement> all = enumerate_group(args.n);
    j["order"] = all.size();
    json hist;
    for (const auto& [len, count] : length_histogram(args.n)) hist[std::to_string(len)] = count;
    j["length_histogram"] = hist;
    j["longest"] = longest_element(args.n).to_string();
    if (!args.element.empty()) {
        WeylElement w = WeylElement::parse(args.n, args.element);
        json e;
        e["word"] = w.to_string();
        e["length"] = w.length();
        e["inverse"] = w.inverse().to_string();
        json ol = json::array();
        for (int x : w.one_line()) ol.push_back(x);
        e["one_line"] = ol;
        j["element"] = e;
    }
    if (!args.cosets.empty()) {
        std::vector<int> J;
        std::stringstream ss(args.cosets);
        std::string part;
        while (std::getline(ss, part, ',')) {
            try {
                J.push_back(std::stoi(part));
            } catch (const std::exception&) {
                throw std::invalid_argument("--cosets: malformed index \"" + part + "\"");
            }
        }
        json cs = json::array();
        for (const SpecialCoset& c : cosets(args.n, J)) {
            json cj;
            cj["representative"] = c.representative.to_string();
            json mem = json::array();
            for (const WeylElement& w : c.members) mem.push_back(w.to_string());
            cj["members"] = mem;
            cs.push_back(cj);
        }
        j["cosets"] = cs;
    }
    write_output(j.dump(2), args.out);
    return 0;
}

struct TreeArgs {
    std::int64_t p = 5;
    int precision = 12;
    std::string matrix;
    int radius = 2;
    std::string vertex;  // "a,d,bv,bc"
    std::string out;
    std::string dot;
};

inline TreeVertex parse_vertex(const std::string& text) {
    if (text.empty()) return TreeVertex::base();
    std::vector<std::int64_t> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            parts.push_back(std::stoll(part));
        } catch (const std::exception&) {
            throw std::invalid_argument("--vertex: malformed integer \"" + part + "\"");
        }
    }
    if (parts.size() != 4)
        throw std::invalid_argument("--vertex: expected \"a,d,bv,bc\"");
    TreeVertex v;
    v.a = parts[0];
    v.d = parts[1];
    v.bv = parts[2];
    v.bc = static_cast<std::uint64_t>(parts[3]);
    if (v.a < 0 || v.d < 0 || (v.a != 0 && v.d != 0))
        throw std::invalid_argument("--vertex: needs min(a, d) = 0");
    return v;
}

inline int run_tree_classify(const TreeArgs& args) {
    PAdicContext ctx{args.p, args.precision};
    Matrix g = matrix_from_json(ctx, detail::parse_json_text(args.matrix, "--matrix"), "--matrix");
    IsometryClassification c = classify_isometry(g);
    json j = base_report(0);
    j["p"] = args.p;
    j["precision"] = args.precision;
    j["type"] = to_string(c.type);
    j["translation_length"] = c.translation_length;
    j["vertex"] = c.vertex.to_string();
    if (c.type == IsometryType::Hyperbolic) {
        json ends = json::array();
        for (const auto& dir : c.ends) {
            json d = json::array();
            for (const PAdic& x : dir) d.push_back(x.to_string());
            ends.push_back(d);
        }
        j["ends"] = ends;
    }
    write_output(j.dump(2), args.out);
    return 0;
}

inline int run_tree_ball(const TreeArgs& args) {
    PAdicContext ctx{args.p, args.precision};
    TreeVertex center = parse_vertex(args.vertex);
    std::vector<TreeVertex> ball = tree_ball(ctx, center, args.radius);
    json j = base_report(0);
    j["p"] = args.p;
    j["center"] = center.to_string();
    j["radius"] = args.radius;
    j["count"] = ball.size();
    json vs = json::array();
    for (const TreeVertex& v : ball) vs.push_back(v.to_string());
    j["vertices"] = vs;
    write_output(j.dump(2), args.out);
    if (!args.dot.empty()) write_output(emit_tree_dot(ctx, center, args.radius), args.dot);
    return 0;
}

struct DecompArgs {
    std::int64_t p = 5;
    int precision = 12;
    std::string matrix;
    std::string kind = "cartan";
    std::string out;
};

inline int run_decomp(const DecompArgs& args) {
    PAdicContext ctx{args.p, args.precision};
    Matrix g = matrix_from_json(ctx, detail::parse_json_text(args.matrix, "--matrix"), "--matrix");
    json j = base_report(0);
    j["p"] = args.p;
    j["precision"] = args.precision;
    j["kind"] = args.kind;
    if (args.kind == "iwasawa") {
        IwasawaFactors f = iwasawa(g);
        j["k"] = matrix_to_json(f.k);
        j["t"] = matrix_to_json(f.t);
        j["u"] = matrix_to_json(f.u);
    } else if (args.kind == "cartan") {
        CartanFactors f = cartan(g);
        j["k1"] = matrix_to_json(f.k1);
        j["a"] = matrix_to_json(f.a);
        j["k2"] = matrix_to_json(f.k2);
        j["exponents"] = f.exponents;
    } else if (args.kind == "bruhat") {
        j["position"] = bruhat_position(g).to_string();
    } else if (args.kind == "spectral") {
        SpectralData sd = spectral_valuations(g);
        json vals = json::array();
        for (const Ratio& r : sd.valuations) vals.push_back(ratio_to_json(r));
        j["valuations"] = vals;
        j["regular"] = sd.regular;
        j["hyperbolic"] = sd.hyperbolic;
    } else {
        throw std::invalid_argument("--kind: unknown decomposition \"" + args.kind + "\"");
    }
    write_output(j.dump(2), args.out);
    return 0;
}

struct FlagArgs {
    std::int64_t p = 5;
    std::string group = "SL2";
    int level = 1;
    int margin = 8;
    int samples = 500;
    std::uint64_t seed = 0;
    std::string matrix;
    std::string start_line;
    std::string start_plane;
    int max_steps = 60;
    std::string out;
};

inline int group_size(const std::string& g, const std::string& where) {
    if (g == "SL2") return 2;
    if (g == "SL3") return 3;
    throw std::invalid_argument(where + ": expected \"SL2\" or \"SL3\"");
}

inline int run_flag_census(const FlagArgs& args) {
    int n = group_size(args.group, "--group");
    PAdicContext ctx{args.p, args.level + args.margin};
    CensusResult census = open_cell_census(ctx, n, args.level, args.samples, args.seed);
    json j = base_report(args.seed);
    j["p"] = args.p;
    j["group"] = args.group;
    j["precision"] = args.level;
    json counts;
    for (const auto& [w, c] : census.counts) counts[w.to_string()] = c;
    j["counts"] = counts;
    j["ambiguous"] = census.ambiguous;
    j["total"] = census.total;
    write_output(j.dump(2), args.out);
    return 0;
}

inline int run_flag_iterate(const FlagArgs& args) {
    int n = group_size(args.group, "--group");
    PAdicContext ctx{args.p, args.level + args.margin};
    Matrix g = matrix_from_json(ctx, detail::parse_json_text(args.matrix, "--matrix"), "--matrix");
    if (g.dim() != n) throw std::invalid_argument("--matrix: size does not match --group");
    if (args.start_line.empty()) throw std::invalid_argument("--start-line: required");
    std::vector<PAdic> line = parse_vector(ctx, args.start_line, n, "--start-line");
    Flag start = [&] {
        if (n == 2) return Flag::line_only(line);
        if (args.start_plane.empty())
            throw std::invalid_argument("--start-plane: required for SL3");
        return Flag::full(line, parse_vector(ctx, args.start_plane, 3, "--start-plane"));
    }();
    IterationReport rep = iterate_to_limit(g, start, args.level, args.max_steps);
    json j = base_report(args.seed);
    j["p"] = args.p;
    j["group"] = args.group;
    j["precision"] = args.level;
    j["stabilized"] = rep.stabilized;
    if (rep.stabilized) {
        j["settled_at"] = rep.settled_at;
        j["limit"] = rep.limit.to_string();
    }
    json traj = json::array();
    for (const FlagKey& k : rep.trajectory) traj.push_back(k.to_string());
    j["trajectory"] = traj;
    write_output(j.dump(2), args.out);
    return 0;
}

struct ControlArgs {
    std::int64_t p = 5;
    int precision = 1;
    std::string group = "SL2";
    std::string gens_path;
    std::string spec_path;
    int max_word_len = 4;
    int margin = 8;
    int node_cap = 20000;
    int random_seeds = 200;
    int witness_cap = 8;
    std::uint64_t seed = 0;
    std::string out;
    std::string dot;
};

inline int run_control_sets(const ControlArgs& args) {
    SemigroupSpec spec;
    spec.p = args.p;
    spec.level = args.precision;
    spec.group = group_size(args.group, "--group");
    spec.max_word_len = args.max_word_len;
    spec.margin = args.margin;
    spec.node_cap = args.node_cap;
    spec.random_seeds = args.random_seeds;
    spec.witness_cap = args.witness_cap;
    spec.seed = args.seed;
    if (!args.spec_path.empty())
        spec = spec_from_json(read_json_file(args.spec_path, "--spec"), spec);
    if (!args.gens_path.empty())
        spec = spec_from_json(read_json_file(args.gens_path, "--gens"), spec);
    if (spec.generators.empty())
        throw std::invalid_argument("spec.generators: none provided (use --gens or --spec)");

    std::vector<Matrix> gens = build_generators(spec);
    std::vector<Witness> witnesses = find_regular_hyperbolic(gens, spec.max_word_len, spec.witness_cap);
    OrbitGraph graph = build_orbit_graph(spec, gens, witnesses);
    ControlSetReport rep = label_and_weyl(graph, witnesses);
    write_output(report_to_json(rep, spec).dump(2), args.out);
    if (!args.dot.empty()) {
        std::vector<FlagKey> inv;
        if (rep.invariant_id) inv = rep.sets[static_cast<std::size_t>(*rep.invariant_id)].nodes;
        write_output(emit_dot(graph, inv), args.dot);
    }
    return rep.consistent ? 0 : 2;
}

} // namespace detail

/// Entry point shared by the binary and the integration tests.
inline int run(int argc, const char* const* argv) {
    CLI::App app{"p-adic flag dynamics toolkit"};
    app.require_subcommand(1);

    detail::PadicArgs pa;
    CLI::App* padic = app.add_subcommand("padic", "arithmetic in a truncated p-adic context");
    padic->add_option("--p", pa.p, "prime");
    padic->add_option("--precision", pa.precision, "significant digits");
    padic->add_option("--op", pa.op, "add | sub | mul | div | invert | norm");
    padic->add_option("--a", pa.a, "first operand")->required();
    padic->add_option("--b", pa.b, "second operand");
    padic->add_option("--out", pa.out, "output path");

    detail::WeylArgs wa;
    CLI::App* weyl = app.add_subcommand("weyl", "symmetric-group Weyl data");
    weyl->add_option("--n", wa.n, "rank (2 or 3)");
    weyl->add_option("--element", wa.element, "word \"r1.r2\" or one-line \"[2,1,3]\"");
    weyl->add_option("--cosets", wa.cosets, "simple reflections generating the parabolic, e.g. \"1\"");
    weyl->add_option("--out", wa.out, "output path");

    detail::TreeArgs ta;
    CLI::App* tree = app.add_subcommand("tree", "Bruhat-Tits tree of SL2(Q_p)");
    tree->require_subcommand(1);
    CLI::App* tclassify = tree->add_subcommand("classify", "elliptic/hyperbolic classification");
    tclassify->add_option("--p", ta.p, "prime");
    tclassify->add_option("--precision", ta.precision, "working digits");
    tclassify->add_option("--matrix", ta.matrix, "JSON matrix")->required();
    tclassify->add_option("--out", ta.out, "output path");
    CLI::App* tball = tree->add_subcommand("ball", "enumerate a combinatorial ball");
    tball->add_option("--p", ta.p, "prime");
    tball->add_option("--precision", ta.precision, "working digits");
    tball->add_option("--radius", ta.radius, "ball radius");
    tball->add_option("--vertex", ta.vertex, "center \"a,d,bv,bc\" (default: base)");
    tball->add_option("--out", ta.out, "output path");
    tball->add_option("--dot", ta.dot, "also write a DOT rendering here");

    detail::DecompArgs da;
    CLI::App* decomp = app.add_subcommand("decomp", "matrix decompositions and spectra");
    decomp->add_option("--p", da.p, "prime");
    decomp->add_option("--precision", da.precision, "working digits");
    decomp->add_option("--matrix", da.matrix, "JSON matrix")->required();
    decomp->add_option("--kind", da.kind, "iwasawa | cartan | bruhat | spectral");
    decomp->add_option("--out", da.out, "output path");

    detail::FlagArgs fa;
    CLI::App* flag = app.add_subcommand("flag", "flag space census and orbits");
    flag->require_subcommand(1);
    CLI::App* fcensus = flag->add_subcommand("census", "relative positions against the standard flag");
    fcensus->add_option("--p", fa.p, "prime");
    fcensus->add_option("--group", fa.group, "SL2 | SL3");
    fcensus->add_option("--precision", fa.level, "level");
    fcensus->add_option("--margin", fa.margin, "extra working digits");
    fcensus->add_option("--samples", fa.samples, "sample count (SL3)");
    fcensus->add_option("--seed", fa.seed, "RNG seed");
    fcensus->add_option("--out", fa.out, "output path");
    CLI::App* fiterate = flag->add_subcommand("iterate", "forward orbit of a flag");
    fiterate->add_option("--p", fa.p, "prime");
    fiterate->add_option("--group", fa.group, "SL2 | SL3");
    fiterate->add_option("--precision", fa.level, "level");
    fiterate->add_option("--margin", fa.margin, "extra working digits");
    fiterate->add_option("--matrix", fa.matrix, "JSON matrix")->required();
    fiterate->add_option("--start-line", fa.start_line, "line coordinates \"x,y\" or \"x,y,z\"");
    fiterate->add_option("--start-plane", fa.start_plane, "plane covector \"a,b,c\" (SL3)");
    fiterate->add_option("--max-steps", fa.max_steps, "iteration budget");
    fiterate->add_option("--out", fa.out, "output path");

    detail::ControlArgs ca;
    CLI::App* control = app.add_subcommand("control-sets", "control sets of a semigroup action");
    control->add_option("--p", ca.p, "prime");
    control->add_option("--precision", ca.precision, "level");
    control->add_option("--group", ca.group, "SL2 | SL3");
    control->add_option("--gens", ca.gens_path, "JSON file with {generators: [...]}");
    control->add_option("--spec", ca.spec_path, "JSON file with a full spec");
    control->add_option("--max-word-len", ca.max_word_len, "hyperbolic search depth");
    control->add_option("--margin", ca.margin, "extra working digits");
    control->add_option("--node-cap", ca.node_cap, "orbit graph size cap");
    control->add_option("--random-seeds", ca.random_seeds, "random seed flags (SL3)");
    control->add_option("--witness-cap", ca.witness_cap, "max witnesses kept");
    control->add_option("--seed", ca.seed, "RNG seed");
    control->add_option("--out", ca.out, "report path");
    control->add_option("--dot", ca.dot, "orbit graph DOT path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (padic->parsed()) return detail::run_padic(pa);
        if (weyl->parsed()) return detail::run_weyl(wa);
        if (tree->parsed()) {
            if (tclassify->parsed()) return detail::run_tree_classify(ta);
            return detail::run_tree_ball(ta);
        }
        if (decomp->parsed()) return detail::run_decomp(da);
        if (flag->parsed()) {
            if (fcensus->parsed()) return detail::run_flag_census(fa);
            return detail::run_flag_iterate(fa);
        }
        if (control->parsed()) return detail::run_control_sets(ca);
    } catch (const MultipleSinks& e) {
        std::cerr << "verdict: " << e.what() << "\n";
        return 2;
    } catch (const NoSink& e) {
        std::cerr << "verdict: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const PrecisionExhausted& e) {
        std::cerr << "precision error: " << e.what() << " (raise --precision or --margin)\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace cli
} // namespace qpflag
