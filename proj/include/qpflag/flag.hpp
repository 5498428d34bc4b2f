#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "qpflag/decomp.hpp"
#include "qpflag/tree.hpp"

namespace qpflag {

namespace detail {

/// First coordinate of valuation zero becomes exactly 1, everything else
/// lands in Z_p. The all-zero vector is rejected.
inline std::vector<PAdic> canonicalize_coords(std::vector<PAdic> v) {
    bool any = false;
    std::int64_t mv = 0;
    for (const PAdic& x : v)
        if (!x.is_zero()) {
            if (!any || x.valuation() < mv) mv = x.valuation();
            any = true;
        }
    if (!any) throw std::invalid_argument("flag coordinates: zero vector");
    for (PAdic& x : v)
        if (!x.is_zero()) x = x.shift(-mv);
    for (const PAdic& x : v)
        if (!x.is_zero() && x.valuation() == 0) {
            PAdic c = invert(x);
            for (PAdic& y : v)
                if (!y.is_zero()) y = y * c;
            break;
        }
    return v;
}

} // namespace detail

/// Identity of a flag at a finite level: canonical coordinates reduced
/// mod p^level, stored as plain integers.
struct FlagKey {
    int n = 2;
    std::vector<std::uint64_t> line;
    std::vector<std::uint64_t> coplane;  // empty when n = 2

    friend bool operator==(const FlagKey& x, const FlagKey& y) {
        return x.n == y.n && x.line == y.line && x.coplane == y.coplane;
    }
    friend bool operator!=(const FlagKey& x, const FlagKey& y) { return !(x == y); }
    friend bool operator<(const FlagKey& x, const FlagKey& y) {
        if (x.n != y.n) return x.n < y.n;
        if (x.line != y.line) return x.line < y.line;
        return x.coplane < y.coplane;
    }

    std::string to_string() const {
        auto join = [](const std::vector<std::uint64_t>& v) {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) s += ":";
                s += std::to_string(v[i]);
            }
            return s;
        };
        std::string s = "[" + join(line);
        if (!coplane.empty()) s += "|" + join(coplane);
        s += "]";
        return s;
    }
};

/// Point of the flag space: a line for n = 2, an incident (line, plane) pair
/// for n = 3. The plane is stored through its defining covector. Coordinates
/// are kept canonical at the working precision of their context.
class Flag {
public:
    static Flag line_only(std::vector<PAdic> v) {
        if (v.size() != 2) throw std::invalid_argument("Flag: a line flag needs 2 coordinates");
        Flag f;
        f.n_ = 2;
        f.line_ = detail::canonicalize_coords(std::move(v));
        return f;
    }

    static Flag full(std::vector<PAdic> line, std::vector<PAdic> coplane) {
        Flag f = unchecked_full(std::move(line), std::move(coplane));
        // Incidence: the pairing must vanish up to the carried precision.
        try {
            PAdic s = PAdic::zero(f.line_[0].context());
            for (int i = 0; i < 3; ++i) s = s + f.line_[i] * f.coplane_[i];
            if (!s.is_zero())
                throw std::invalid_argument("Flag: line does not lie on the plane");
        } catch (const PrecisionExhausted&) {
            // Cancelled below one digit: incident as far as the data can tell.
        }
        return f;
    }

    /// Same as full() but skips the incidence check. For data that is only
    /// meaningful modulo a level, e.g. lifted keys, where the pairing
    /// vanishes modulo p^level without vanishing at working precision.
    static Flag unchecked_full(std::vector<PAdic> line, std::vector<PAdic> coplane) {
        if (line.size() != 3 || coplane.size() != 3)
            throw std::invalid_argument("Flag: a full flag needs 3 + 3 coordinates");
        Flag f;
        f.n_ = 3;
        f.line_ = detail::canonicalize_coords(std::move(line));
        f.coplane_ = detail::canonicalize_coords(std::move(coplane));
        return f;
    }

    /// Flag spanned by the leading columns of an invertible matrix: the line
    /// of the first column and, for n = 3, the plane of the first two.
    static Flag from_columns(const Matrix& g) {
        std::vector<PAdic> c0, c1;
        for (int r = 0; r < g.dim(); ++r) {
            c0.push_back(g.at(r, 0));
            if (g.dim() == 3) c1.push_back(g.at(r, 1));
        }
        if (g.dim() == 2) return line_only(std::move(c0));
        std::vector<PAdic> phi = cross(c0, c1);
        return full(std::move(c0), std::move(phi));
    }

    static std::vector<PAdic> cross(const std::vector<PAdic>& u, const std::vector<PAdic>& v) {
        return {detail::sub_entries(u[1] * v[2], u[2] * v[1]),
                detail::sub_entries(u[2] * v[0], u[0] * v[2]),
                detail::sub_entries(u[0] * v[1], u[1] * v[0])};
    }

    int dim() const { return n_; }
    const std::vector<PAdic>& line() const { return line_; }
    const std::vector<PAdic>& coplane() const { return coplane_; }
    const PAdicContext& context() const { return line_[0].context(); }

    /// Canonical coordinates reduced mod p^level. Throws PrecisionExhausted
    /// when a coordinate is not determined to that absolute precision.
    FlagKey level_key(int level) const {
        FlagKey k;
        k.n = n_;
        k.line = reduce_coords(line_, level);
        if (n_ == 3) k.coplane = reduce_coords(coplane_, level);
        return k;
    }

private:
    static std::vector<std::uint64_t> reduce_coords(const std::vector<PAdic>& v, int level) {
        std::vector<std::uint64_t> out;
        for (const PAdic& x : v) {
            if (x.is_zero() || x.valuation() >= level) {
                out.push_back(0);
                continue;
            }
            std::int64_t vv = x.valuation();
            int need = static_cast<int>(level - vv);
            if (x.precision() < need)
                throw PrecisionExhausted("level_key: coordinate undetermined at the requested level");
            std::uint64_t m = x.unit_mod(need);
            const PAdicContext& ctx = x.context();
            for (std::int64_t i = 0; i < vv; ++i) m *= static_cast<std::uint64_t>(ctx.p);
            out.push_back(m);
        }
        return out;
    }

    int n_ = 2;
    std::vector<PAdic> line_;
    std::vector<PAdic> coplane_;
};

/// The standard coordinate flag: line of e_1 (and plane of e_1, e_2).
inline Flag standard_flag(const PAdicContext& ctx, int n) {
    PAdic one = PAdic::from_integer(ctx, 1), zero = PAdic::zero(ctx);
    if (n == 2) return Flag::line_only({one, zero});
    if (n == 3) return Flag::full({one, zero, zero}, {zero, zero, one});
    throw std::invalid_argument("standard_flag: n must be 2 or 3");
}

/// Exact integral representative of a level key.
inline Flag lift_key(const PAdicContext& ctx, const FlagKey& key) {
    auto lift = [&](const std::vector<std::uint64_t>& v) {
        std::vector<PAdic> out;
        for (std::uint64_t c : v) out.push_back(PAdic::from_integer(ctx, static_cast<std::int64_t>(c)));
        return out;
    };
    if (key.n == 2) return Flag::line_only(lift(key.line));
    return Flag::unchecked_full(lift(key.line), lift(key.coplane));
}

/// g moves the line by the matrix and the plane by the adjugate transpose
/// (the projective inverse transpose, with no division by the determinant).
inline Flag act(const Matrix& g, const Flag& f) {
    if (g.dim() != f.dim()) throw std::invalid_argument("act: dimension mismatch");
    auto apply = [&](const Matrix& m, const std::vector<PAdic>& v) {
        std::vector<PAdic> out;
        for (int i = 0; i < m.dim(); ++i) {
            PAdic s = PAdic::zero(m.context());
            for (int j = 0; j < m.dim(); ++j)
                s = detail::add_entries(s, m.at(i, j) * v[j]);
            out.push_back(s);
        }
        return out;
    };
    if (f.dim() == 2) return Flag::line_only(apply(g, f.line()));
    return Flag::unchecked_full(apply(g, f.line()), apply(g.adjugate().transpose(), f.coplane()));
}

/// All level keys, in enumeration order: lines [1 : t] for t mod p^level,
/// then [s : 1] for s in p Z mod p^level. Only n = 2 is enumerable at
/// realistic sizes.
inline std::vector<FlagKey> enumerate_level_flags(const PAdicContext& ctx, int level) {
    if (level < 1 || level > ctx.precision)
        throw std::invalid_argument("enumerate_level_flags: level must be within the context precision");
    std::uint64_t m = ctx.pow(level);
    std::vector<FlagKey> out;
    for (std::uint64_t t = 0; t < m; ++t) out.push_back(FlagKey{2, {1, t}, {}});
    for (std::uint64_t s = 0; s < m / static_cast<std::uint64_t>(ctx.p); ++s)
        out.push_back(FlagKey{2, {s * static_cast<std::uint64_t>(ctx.p), 1}, {}});
    return out;
}

namespace detail {

/// Exact p-adic valuation of an integer; returns `cap` for zero.
inline int int_valuation(__int128 x, std::int64_t p, int cap) {
    if (x < 0) x = -x;
    if (x == 0) return cap;
    int v = 0;
    while (x % p == 0 && v < cap) {
        x /= p;
        ++v;
    }
    return v;
}

/// Rank of an integer matrix at two thresholds: exact (over Q) and at level
/// (a minor counts only if its valuation is < level). Entries must be small
/// enough that 3x3 minors fit in __int128.
struct TwoRanks {
    int exact = 0;
    int at_level = 0;
};

inline TwoRanks integer_ranks(const std::vector<std::vector<__int128>>& cols, int rows,
                              std::int64_t p, int level) {
    int nc = static_cast<int>(cols.size());
    TwoRanks r;
    auto consider = [&](__int128 minor, int size) {
        if (minor == 0) return;
        if (size > r.exact) r.exact = size;
        if (int_valuation(minor, p, level) < level && size > r.at_level) r.at_level = size;
    };
    for (int c = 0; c < nc; ++c)
        for (int i = 0; i < rows; ++i) consider(cols[c][i], 1);
    for (int c1 = 0; c1 < nc; ++c1)
        for (int c2 = c1 + 1; c2 < nc; ++c2)
            for (int i = 0; i < rows; ++i)
                for (int j = i + 1; j < rows; ++j)
                    consider(cols[c1][i] * cols[c2][j] - cols[c1][j] * cols[c2][i], 2);
    if (rows >= 3) {
        for (int c1 = 0; c1 < nc; ++c1)
            for (int c2 = c1 + 1; c2 < nc; ++c2)
                for (int c3 = c2 + 1; c3 < nc; ++c3) {
                    __int128 det = cols[c1][0] * (cols[c2][1] * cols[c3][2] - cols[c2][2] * cols[c3][1])
                                 - cols[c2][0] * (cols[c1][1] * cols[c3][2] - cols[c1][2] * cols[c3][1])
                                 + cols[c3][0] * (cols[c1][1] * cols[c2][2] - cols[c1][2] * cols[c2][1]);
                    consider(det, 3);
                }
    }
    return r;
}

/// Integer spanning columns of the i-th subspace of the lifted flag.
/// The plane is spanned by the cross products of its covector with the
/// coordinate vectors, never by the stored line, so the columns are exactly
/// coplanar even though the lifted pair is incident only modulo p^level.
inline std::vector<std::vector<__int128>> subspace_columns(const FlagKey& key, int i) {
    std::vector<std::vector<__int128>> cols;
    if (i >= 1) {
        std::vector<__int128> c(key.line.begin(), key.line.end());
        cols.push_back(c);
    }
    if (i >= 2 && key.n == 3) {
        // Spanned by the cross products of the covector with the coordinate
        // vectors: exactly coplanar. The stored line is deliberately left
        // out; it lies on the plane only modulo p^level, and mixing it in
        // would make the exact rank disagree with the level rank every time.
        cols.clear();
        std::vector<__int128> phi(key.coplane.begin(), key.coplane.end());
        cols.push_back({0, -phi[2], phi[1]});
        cols.push_back({phi[2], 0, -phi[0]});
        cols.push_back({-phi[1], phi[0], 0});
    }
    return cols;
}

} // namespace detail

/// The Weyl element measuring the relative position of two flags, at a
/// finite level: ranks are taken on exact integral lifts, and a rank that
/// differs between exact arithmetic and the level threshold raises
/// RankAmbiguous instead of guessing.
inline WeylElement relative_position(const Flag& a, const Flag& b, int level) {
    if (a.dim() != b.dim()) throw std::invalid_argument("relative_position: dimension mismatch");
    const PAdicContext& ctx = a.context();
    int n = a.dim();
    if (level < 1) throw std::invalid_argument("relative_position: level must be positive");
    // 3x3 minors of level-sized entries must fit in __int128.
    {
        long double bound = 1.0L;
        for (int i = 0; i < level; ++i) bound *= static_cast<long double>(ctx.p);
        if (bound > 1.0e12L)
            throw std::invalid_argument("relative_position: level too deep for exact minor evaluation");
    }
    FlagKey ka = a.level_key(level), kb = b.level_key(level);

    // d[i][j] = dim(V_i of a  intersect  V_j of b), from the rank of the
    // union of spanning columns.
    std::vector<std::vector<int>> d(n + 1, std::vector<int>(n + 1, 0));
    for (int i = 1; i < n; ++i)
        for (int j = 1; j < n; ++j) {
            std::vector<std::vector<__int128>> cols = detail::subspace_columns(ka, i);
            for (auto& c : detail::subspace_columns(kb, j)) cols.push_back(std::move(c));
            detail::TwoRanks r = detail::integer_ranks(cols, n, ctx.p, level);
            if (r.exact != r.at_level)
                throw RankAmbiguous("relative_position: rank of V_" + std::to_string(i) + " + V_" +
                                    std::to_string(j) + " is not determined at this level");
            int rank = r.at_level > n ? n : r.at_level;
            d[i][j] = i + j - rank;
        }
    for (int i = 0; i <= n; ++i) d[n][i] = i, d[i][n] = i;

    std::vector<int> one_line(n, 0);
    for (int j = 1; j <= n; ++j)
        for (int i = 1; i <= n; ++i)
            if (d[i][j] - d[i - 1][j] - d[i][j - 1] + d[i - 1][j - 1] == 1) {
                one_line[j - 1] = i;
                break;
            }
    return WeylElement(std::move(one_line));
}

/// Census of relative positions against the standard flag. Exhaustive over
/// all level keys for n = 2; for n = 3 it draws `samples` Haar-style random
/// flags (column flags of uniformly random unimodular integral matrices).
struct CensusResult {
    std::map<WeylElement, std::int64_t> counts;
    std::int64_t ambiguous = 0;
    std::int64_t total = 0;
};

inline Matrix random_unimodular(const PAdicContext& ctx, int n, int level, std::mt19937_64& rng) {
    std::uint64_t m = ctx.pow(level);
    std::uniform_int_distribution<std::uint64_t> dist(0, m - 1);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<std::int64_t> e(static_cast<std::size_t>(n) * n);
        for (auto& x : e) x = static_cast<std::int64_t>(dist(rng));
        // Determinant mod p decides invertibility over Z_p.
        auto at = [&](int i, int j) { return e[static_cast<std::size_t>(i) * n + j] % ctx.p; };
        std::int64_t det;
        if (n == 2)
            det = at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
        else
            det = at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1))
                - at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0))
                + at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
        if (det % ctx.p == 0) continue;
        std::vector<PAdic> entries;
        for (std::int64_t x : e) entries.push_back(PAdic::from_integer(ctx, x));
        return Matrix(ctx, n, std::move(entries));
    }
    throw Error("random_unimodular: rejection sampling failed");
}

inline CensusResult open_cell_census(const PAdicContext& ctx, int n, int level,
                                     int samples, std::uint64_t seed) {
    CensusResult out;
    Flag std_flag = standard_flag(ctx, n);
    auto tally = [&](const Flag& f) {
        ++out.total;
        try {
            WeylElement w = relative_position(std_flag, f, level);
            ++out.counts[w];
        } catch (const RankAmbiguous&) {
            ++out.ambiguous;
        }
    };
    if (n == 2) {
        for (const FlagKey& k : enumerate_level_flags(ctx, level)) tally(lift_key(ctx, k));
    } else if (n == 3) {
        std::mt19937_64 rng(seed);
        for (int s = 0; s < samples; ++s) tally(Flag::from_columns(random_unimodular(ctx, 3, level, rng)));
    } else {
        throw std::invalid_argument("open_cell_census: n must be 2 or 3");
    }
    return out;
}

/// Fixed flags of a regular element: one for each Weyl element w, spanned by
/// the eigenvectors in the order picked by w. The identity names the
/// attracting flag (eigenvalues of largest norm first).
inline std::vector<std::pair<WeylElement, Flag>> fixed_flags(const Matrix& h) {
    int n = h.dim();
    std::vector<std::vector<PAdic>> basis = eigenbasis(h);
    std::vector<std::pair<WeylElement, Flag>> out;
    for (const WeylElement& w : enumerate_group(n)) {
        const std::vector<PAdic>& u1 = basis[static_cast<std::size_t>(w.apply(1)) - 1];
        if (n == 2) {
            out.emplace_back(w, Flag::line_only(u1));
        } else {
            const std::vector<PAdic>& u2 = basis[static_cast<std::size_t>(w.apply(2)) - 1];
            out.emplace_back(w, Flag::full(u1, Flag::cross(u1, u2)));
        }
    }
    return out;
}

inline Flag attracting_flag(const Matrix& h) {
    std::vector<std::vector<PAdic>> basis = eigenbasis(h);
    if (h.dim() == 2) return Flag::line_only(basis[0]);
    return Flag::full(basis[0], Flag::cross(basis[0], basis[1]));
}

/// Forward orbit of a flag under repeated action, watched at a finite level.
/// The flag itself is iterated at full working precision; only the recorded
/// keys are truncated. Stabilized means the last `tail` keys agree.
struct IterationReport {
    bool stabilized = false;
    int settled_at = 0;  // index of the first key of the constant tail
    FlagKey limit;       // meaningful when stabilized
    std::vector<FlagKey> trajectory;
};

inline IterationReport iterate_to_limit(const Matrix& h, const Flag& start, int level,
                                        int max_steps, int tail = 3) {
    if (tail < 2) throw std::invalid_argument("iterate_to_limit: tail must be at least 2");
    IterationReport rep;
    Flag f = start;
    rep.trajectory.push_back(f.level_key(level));
    int run = 1;
    for (int k = 1; k <= max_steps; ++k) {
        f = act(h, f);
        FlagKey key = f.level_key(level);
        if (key == rep.trajectory.back())
            ++run;
        else
            run = 1;
        rep.trajectory.push_back(key);
        if (run >= tail) {
            rep.stabilized = true;
            rep.settled_at = k - run + 1;
            rep.limit = key;
            return rep;
        }
    }
    return rep;
}

/// The boundary of the tree is the projective line: a ray converges to the
/// end spanned by its direction vector.
inline Flag end_flag(const TreeRay& ray) { return Flag::line_only(ray.direction); }

/// Inverse of end_flag up to choice of origin: the base-origin ray into the
/// line of a P^1 point.
inline TreeRay flag_ray(const Flag& f) {
    if (f.dim() != 2) throw std::invalid_argument("flag_ray: needs a projective line point");
    return TreeRay{TreeVertex::base(), f.line()};
}

} // namespace qpflag
