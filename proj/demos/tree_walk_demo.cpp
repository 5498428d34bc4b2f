// Classifies a few isometries of the Bruhat-Tits tree of SL2(Q_5) and shows
// how a hyperbolic element marches vertices along its axis.

#include <iostream>

#include "qpflag/tree.hpp"

int main() {
    using namespace qpflag;

    PAdicContext ctx{5, 12};
    auto show = [&](const char* name, const Matrix& g) {
        IsometryClassification c = classify_isometry(g);
        std::cout << name << ": " << to_string(c.type)
                  << ", translation length " << c.translation_length
                  << ", vertex " << c.vertex.to_string() << "\n";
    };

    show("diag(5, 1/5)", Matrix::from_rationals(ctx, 2, {{5, 1}, {0, 1}, {0, 1}, {1, 5}}));
    show("rotation", Matrix::from_rationals(ctx, 2, {{0, 1}, {1, 1}, {-1, 1}, {0, 1}}));
    show("unipotent", Matrix::from_rationals(ctx, 2, {{1, 1}, {1, 1}, {0, 1}, {1, 1}}));

    Matrix g = Matrix::from_rationals(ctx, 2, {{5, 1}, {0, 1}, {0, 1}, {1, 5}});
    TreeRay ray{TreeVertex::base(), {PAdic::from_integer(ctx, 1), PAdic::zero(ctx)}};
    RayDynamics dyn = ray_dynamics(g, ray);
    std::cout << "ray toward the repelling end [1:0]: nested = "
              << (dyn.nested ? "yes" : "no") << ", overlap grows by " << dyn.rate
              << " per application\n";

    for (int k = 0; k < 4; ++k) {
        TreeVertex v = ray_vertex(ctx, ray, k);
        std::cout << "  v_" << k << " = " << v.to_string()
                  << "  ->  " << tree_act(g, v).to_string() << "\n";
    }
    return 0;
}
