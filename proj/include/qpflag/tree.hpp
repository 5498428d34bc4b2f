#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "qpflag/decomp.hpp"

namespace qpflag {

/// Vertex of the lattice-class tree for GL_2(Q_p), stored in Hermite form:
/// the class of the lattice spanned by the columns of
///
///     [ p^a  b ]        b = bc * p^bv,  bc = 0 encodes b = 0,
///     [ 0  p^d ]        min(a, d) = 0,  p does not divide bc,
///                       bv < a and bc < p^(a - bv) when bc != 0.
///
/// The base vertex (class of Z_p^2) is a = d = 0, b = 0.
struct TreeVertex {
    std::int64_t a = 0;
    std::int64_t d = 0;
    std::int64_t bv = 0;
    std::uint64_t bc = 0;

    static TreeVertex base() { return TreeVertex{}; }

    friend bool operator==(const TreeVertex& x, const TreeVertex& y) {
        if (x.a != y.a || x.d != y.d) return false;
        if (x.bc == 0 && y.bc == 0) return true;
        return x.bc == y.bc && x.bv == y.bv;
    }
    friend bool operator!=(const TreeVertex& x, const TreeVertex& y) { return !(x == y); }
    friend bool operator<(const TreeVertex& x, const TreeVertex& y) {
        if (x.a != y.a) return x.a < y.a;
        if (x.d != y.d) return x.d < y.d;
        bool xz = x.bc == 0, yz = y.bc == 0;
        if (xz != yz) return xz;
        if (xz) return false;
        if (x.bv != y.bv) return x.bv < y.bv;
        return x.bc < y.bc;
    }

    std::string to_string() const {
        std::string b = bc == 0 ? "0" : std::to_string(bc) + "*p^" + std::to_string(bv);
        return "(" + std::to_string(a) + ", " + std::to_string(d) + ", " + b + ")";
    }
};

/// Hermite spanning matrix of the canonical representative.
inline Matrix lattice_matrix(const PAdicContext& ctx, const TreeVertex& v) {
    Matrix h(ctx, 2);
    h.at(0, 0) = PAdic::from_integer(ctx, 1).shift(v.a);
    h.at(1, 1) = PAdic::from_integer(ctx, 1).shift(v.d);
    if (v.bc != 0)
        h.at(0, 1) = PAdic::from_integer(ctx, static_cast<std::int64_t>(v.bc)).shift(v.bv);
    return h;
}

/// Canonical vertex of the lattice spanned by the columns of `m`.
/// Throws std::invalid_argument when the columns are dependent at the
/// working precision, PrecisionExhausted when the Hermite digits of the
/// off-diagonal entry are not determined.
inline TreeVertex vertex_from_spanning(const Matrix& m) {
    if (m.dim() != 2) throw std::invalid_argument("vertex_from_spanning: need a 2x2 matrix");
    const PAdicContext& ctx = m.context();
    PAdic x = m.at(0, 0), y = m.at(0, 1), z0 = m.at(1, 0), z1 = m.at(1, 1);

    // Column operations put the bottom row in the form (0, z).
    if (z1.is_zero() && z0.is_zero()) {
        throw std::invalid_argument("vertex_from_spanning: columns are dependent at the working precision");
    }
    if (z1.is_zero() || (!z0.is_zero() && z0.valuation() < z1.valuation())) {
        std::swap(x, y);
        std::swap(z0, z1);
    }
    if (!z0.is_zero()) {
        PAdic c = z0 / z1;
        try {
            x = x - c * y;
        } catch (const PrecisionExhausted&) {
            // The eliminated corner cancelled completely: the diagonal entry
            // is zero at working precision, so the columns look dependent.
            throw std::invalid_argument(
                "vertex_from_spanning: columns are dependent at the working precision");
        }
    }
    if (x.is_zero())
        throw std::invalid_argument("vertex_from_spanning: columns are dependent at the working precision");

    std::int64_t av = x.valuation();
    std::int64_t dv = z1.valuation();
    PAdic b = y.is_zero() ? y : y / z1.shift(-dv);  // divide out the unit of z

    std::int64_t drop = av < dv ? av : dv;
    TreeVertex v;
    v.a = av - drop;
    v.d = dv - drop;
    if (!b.is_zero()) b = b.shift(-drop);

    if (!b.is_zero() && b.valuation() < v.a) {
        std::int64_t need = v.a - b.valuation();
        if (b.precision() < need)
            throw PrecisionExhausted("vertex_from_spanning: off-diagonal digits undetermined");
        v.bv = b.valuation();
        v.bc = b.unit_mod(static_cast<int>(need));
    }
    return v;
}

/// Image vertex g . [L].
inline TreeVertex tree_act(const Matrix& g, const TreeVertex& v) {
    return vertex_from_spanning(g * lattice_matrix(g.context(), v));
}

/// Combinatorial distance: the gap between the two elementary divisors of
/// the pair of lattices.
inline std::int64_t tree_distance(const PAdicContext& ctx, const TreeVertex& u, const TreeVertex& v) {
    Matrix rel = lattice_matrix(ctx, u).inverse() * lattice_matrix(ctx, v);
    CartanFactors f = cartan(rel);
    return f.exponents[1] - f.exponents[0];
}

/// The p + 1 neighbours, one per line in L/pL: with basis (f1, f2) they are
/// span(f1 + t f2, p f2) for t = 0..p-1 followed by span(f2, p f1).
inline std::vector<TreeVertex> tree_neighbors(const PAdicContext& ctx, const TreeVertex& v) {
    Matrix h = lattice_matrix(ctx, v);
    std::vector<TreeVertex> out;
    for (std::int64_t t = 0; t < ctx.p; ++t) {
        Matrix m(ctx, 2);
        PAdic tt = PAdic::from_integer(ctx, t);
        for (int r = 0; r < 2; ++r) {
            m.at(r, 0) = h.at(r, 0) + tt * h.at(r, 1);
            m.at(r, 1) = h.at(r, 1).shift(1);
        }
        out.push_back(vertex_from_spanning(m));
    }
    Matrix m(ctx, 2);
    for (int r = 0; r < 2; ++r) {
        m.at(r, 0) = h.at(r, 1);
        m.at(r, 1) = h.at(r, 0).shift(1);
    }
    out.push_back(vertex_from_spanning(m));
    return out;
}

/// Closed ball, breadth first from the center, deduplicated and listed in
/// a deterministic order (sorted within each shell).
inline std::vector<TreeVertex> tree_ball(const PAdicContext& ctx, const TreeVertex& center, int radius) {
    if (radius < 0) throw std::invalid_argument("tree_ball: negative radius");
    std::vector<TreeVertex> out{center};
    std::set<TreeVertex> seen{center};
    std::vector<TreeVertex> shell{center};
    for (int r = 0; r < radius; ++r) {
        std::set<TreeVertex> next;
        for (const TreeVertex& v : shell)
            for (const TreeVertex& w : tree_neighbors(ctx, v))
                if (!seen.count(w)) next.insert(w);
        shell.assign(next.begin(), next.end());
        for (const TreeVertex& w : shell) {
            seen.insert(w);
            out.push_back(w);
        }
    }
    return out;
}

enum class IsometryType { Elliptic, Hyperbolic };

inline const char* to_string(IsometryType t) {
    return t == IsometryType::Elliptic ? "elliptic" : "hyperbolic";
}

/// For an elliptic element `vertex` is a fixed vertex; for a hyperbolic one
/// it lies on the translation axis and `ends` holds primitive direction
/// vectors of the attracting and repelling fixed ends, in that order.
struct IsometryClassification {
    IsometryType type = IsometryType::Elliptic;
    std::int64_t translation_length = 0;
    TreeVertex vertex;
    std::vector<std::vector<PAdic>> ends;
};

/// Unit-determinant 2x2 elements act on the tree; the valuation of the trace
/// separates the two kinds. Elliptic: fixed vertex = midpoint of the segment
/// from the base to its image. Hyperbolic: translation length -2 v(tr), axis
/// vertex spanned by the eigenvectors.
inline IsometryClassification classify_isometry(const Matrix& g) {
    if (g.dim() != 2) throw std::invalid_argument("classify_isometry: need a 2x2 matrix");
    const PAdicContext& ctx = g.context();
    PAdic det = g.determinant();
    if (det.is_zero() || det.valuation() != 0)
        throw std::invalid_argument("classify_isometry: determinant must be a unit");

    IsometryClassification out;
    PAdic tr = g.trace();
    if (tr.is_zero() || tr.valuation() >= 0) {
        out.type = IsometryType::Elliptic;
        out.translation_length = 0;
        CartanFactors f = cartan(g);
        std::int64_t gap = f.exponents[1] - f.exponents[0];
        if (gap % 2 != 0) throw Error("classify_isometry: odd displacement for a unit determinant");
        if (gap == 0) {
            out.vertex = TreeVertex::base();
        } else {
            Matrix half(ctx, 2);
            half.at(0, 0) = PAdic::from_integer(ctx, 1);
            half.at(1, 1) = PAdic::from_integer(ctx, 1).shift(gap / 2);
            out.vertex = vertex_from_spanning(f.k1 * half);
        }
        if (tree_act(g, out.vertex) != out.vertex)
            throw Error("classify_isometry: computed midpoint is not fixed");
        return out;
    }

    out.type = IsometryType::Hyperbolic;
    out.translation_length = -2 * tr.valuation();
    out.ends = eigenbasis(g);
    Matrix span(ctx, 2);
    for (int r = 0; r < 2; ++r) {
        span.at(r, 0) = out.ends[0][r];
        span.at(r, 1) = out.ends[1][r];
    }
    out.vertex = vertex_from_spanning(span);
    if (tree_distance(ctx, out.vertex, tree_act(g, out.vertex)) != out.translation_length)
        throw Error("classify_isometry: axis vertex displacement mismatch");
    return out;
}

/// Geodesic ray: origin vertex plus a direction vector whose line is the end.
struct TreeRay {
    TreeVertex origin;
    std::vector<PAdic> direction;
};

/// k-th vertex along the ray: the class of Z_p u + p^k L, where u is an
/// L-primitive vector spanning the direction line.
inline TreeVertex ray_vertex(const PAdicContext& ctx, const TreeRay& ray, int k) {
    if (k < 0) throw std::invalid_argument("ray_vertex: negative index");
    if (ray.direction.size() != 2) throw std::invalid_argument("ray_vertex: direction must have 2 coordinates");
    Matrix h = lattice_matrix(ctx, ray.origin);
    // Coordinates of the direction in the lattice basis.
    Matrix hi = h.inverse();
    PAdic c0 = hi.at(0, 0) * ray.direction[0] + hi.at(0, 1) * ray.direction[1];
    PAdic c1 = hi.at(1, 0) * ray.direction[0] + hi.at(1, 1) * ray.direction[1];
    if (c0.is_zero() && c1.is_zero())
        throw std::invalid_argument("ray_vertex: zero direction");
    std::int64_t mv = c0.is_zero() ? c1.valuation()
                    : c1.is_zero() ? c0.valuation()
                                   : std::min(c0.valuation(), c1.valuation());
    if (!c0.is_zero()) c0 = c0.shift(-mv);
    if (!c1.is_zero()) c1 = c1.shift(-mv);
    // Complete the primitive coordinate vector to a Z_p-basis of the lattice.
    int e = (!c0.is_zero() && c0.valuation() == 0) ? 1 : 0;
    Matrix span(ctx, 2);
    span.at(0, 0) = h.at(0, 0) * c0 + h.at(0, 1) * c1;
    span.at(1, 0) = h.at(1, 0) * c0 + h.at(1, 1) * c1;
    span.at(0, 1) = h.at(0, e).shift(k);
    span.at(1, 1) = h.at(1, e).shift(k);
    return vertex_from_spanning(span);
}

/// Image of a ray: the origin moves as a vertex, the direction as a vector.
inline TreeRay tree_act(const Matrix& g, const TreeRay& ray) {
    if (ray.direction.size() != 2)
        throw std::invalid_argument("tree_act: ray direction must have 2 coordinates");
    TreeRay out;
    out.origin = tree_act(g, ray.origin);
    out.direction.assign(2, PAdic::zero(g.context()));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.direction[i] = detail::add_entries(out.direction[i],
                                                   g.at(i, j) * ray.direction[j]);
    return out;
}

struct RayDynamics {
    bool nested = false;   // g^k(ray) strictly increasing, verified to the depth
    std::int64_t rate = 0; // d(origin, g . origin), the overlap growth per step
};

/// Nesting of a ray under a hyperbolic element. A ray into the repelling
/// fixed end is swallowed by its own image, g(r) ⊋ r, so the iterates form a
/// strictly increasing family; the overlap grows by d(x0, g·x0) per step.
/// Directions that visibly differ from the repelling eigendirection are
/// rejected; a cross product cancelling below precision counts as equal.
inline RayDynamics ray_dynamics(const Matrix& g, const TreeRay& ray, int depth = 8) {
    const PAdicContext& ctx = g.context();
    IsometryClassification cls = classify_isometry(g);
    if (cls.type != IsometryType::Hyperbolic)
        throw std::invalid_argument("ray_dynamics: element is not hyperbolic");
    if (depth < 0) throw std::invalid_argument("ray_dynamics: negative depth");

    const std::vector<PAdic>& rep = cls.ends[1];
    PAdic cross = detail::sub_entries(ray.direction[0] * rep[1], ray.direction[1] * rep[0]);
    if (!cross.is_zero())
        throw InvalidRay("ray_dynamics: ray does not point to the repelling fixed end");

    RayDynamics out;
    TreeVertex v0 = ray_vertex(ctx, ray, 0);
    out.rate = tree_distance(ctx, v0, tree_act(g, v0));
    out.nested = true;
    if (depth > 0 && tree_act(g, v0) == ray_vertex(ctx, ray, static_cast<int>(out.rate)))
        out.nested = false;  // image slid along the ray: nested the wrong way
    for (int k = 0; k < depth && out.nested; ++k) {
        TreeVertex target = ray_vertex(ctx, ray, k);
        TreeVertex moved = tree_act(g, ray_vertex(ctx, ray, k + static_cast<int>(out.rate)));
        if (moved != target) out.nested = false;
    }
    return out;
}

/// Two direction vectors span the same line exactly when their rays share a
/// tail, i.e. they define the same end of the tree.
inline bool same_end(const std::vector<PAdic>& u, const std::vector<PAdic>& w) {
    if (u.size() != 2 || w.size() != 2)
        throw std::invalid_argument("same_end: directions must have 2 coordinates");
    PAdic cross = u[0] * w[1] - u[1] * w[0];
    return cross.is_zero();
}

} // namespace qpflag
