// Runs the whole control-set pipeline on a one-generator semigroup in SL2(Q_5)
// and prints the resulting decomposition of the projective line at level 1.

#include <iostream>

#include "qpflag/controlsets.hpp"
#include "qpflag/io.hpp"

int main() {
    using namespace qpflag;

    SemigroupSpec spec;
    spec.group = 2;
    spec.p = 5;
    spec.level = 1;
    spec.max_word_len = 3;
    spec.generators = {{{5, 1}, {0, 1}, {0, 1}, {1, 5}}};

    ControlSetReport rep = analyze_semigroup(spec);

    std::cout << "nodes at level " << rep.level << ": " << rep.node_count << "\n";
    for (const ControlSetEntry& cs : rep.sets) {
        std::cout << "control set " << cs.id << (cs.is_invariant ? " (invariant)" : "") << ":";
        for (const FlagKey& k : cs.nodes) std::cout << " " << k.to_string();
        std::cout << "\n";
    }
    std::cout << "Weyl labels on the invariant set:";
    for (const WeylElement& w : rep.weyl_subgroup) std::cout << " " << w.to_string();
    std::cout << "\n" << report_to_json(rep, spec).dump(2) << "\n";
    return rep.consistent ? 0 : 2;
}
