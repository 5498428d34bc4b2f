#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "qpflag/padic.hpp"
#include "qpflag/weyl.hpp"

namespace qpflag {

/// Small exact rational, used for spectral data (slopes m/k).
struct Ratio {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Ratio() = default;
    Ratio(std::int64_t n, std::int64_t d) : num(n), den(d) {
        if (den == 0) throw DivisionByZero("Ratio: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    friend bool operator==(const Ratio& a, const Ratio& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(const Ratio& a, const Ratio& b) { return !(a == b); }
    friend bool operator<(const Ratio& a, const Ratio& b) {
        return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
    }
    bool is_integer() const { return den == 1; }
};

namespace detail {

/// Entry accumulation for matrix algebra. A sum whose digits all cancel below
/// the shared window is indistinguishable from zero at the working precision;
/// at the matrix level that is recorded as exact zero rather than an error,
/// matching how products reproduce zero entries of their factors.
inline PAdic add_entries(const PAdic& a, const PAdic& b) {
    try {
        return a + b;
    } catch (const PrecisionExhausted&) {
        return PAdic::zero(a.context());
    }
}

inline PAdic sub_entries(const PAdic& a, const PAdic& b) { return add_entries(a, -b); }

} // namespace detail

/// Square matrix over one p-adic context, row major, immutable in spirit:
/// the mutating helpers below are private to the factorization routines.
class Matrix {
public:
    Matrix() = default;
    Matrix(const PAdicContext& ctx, int n)
        : ctx_(ctx), n_(n), a_(static_cast<std::size_t>(n) * n, PAdic::zero(ctx)) {
        if (n < 1) throw std::invalid_argument("Matrix: dimension must be positive");
    }
    Matrix(const PAdicContext& ctx, int n, std::vector<PAdic> entries)
        : ctx_(ctx), n_(n), a_(std::move(entries)) {
        if (static_cast<int>(a_.size()) != n * n)
            throw std::invalid_argument("Matrix: entry count does not match dimension");
        for (const PAdic& x : a_)
            if (x.context() != ctx_) throw ContextMismatch("Matrix: mixed contexts");
    }

    static Matrix identity(const PAdicContext& ctx, int n) {
        Matrix m(ctx, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = PAdic::from_integer(ctx, 1);
        return m;
    }

    /// Entries given row major as (num, den) rationals.
    static Matrix from_rationals(const PAdicContext& ctx, int n,
                                 const std::vector<std::pair<std::int64_t, std::int64_t>>& rows) {
        std::vector<PAdic> e;
        e.reserve(rows.size());
        for (auto [num, den] : rows) e.push_back(PAdic::from_rational(ctx, num, den));
        return Matrix(ctx, n, std::move(e));
    }

    const PAdicContext& context() const { return ctx_; }
    int dim() const { return n_; }
    const PAdic& at(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    PAdic& at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    friend Matrix operator*(const Matrix& x, const Matrix& y) {
        if (x.n_ != y.n_) throw std::invalid_argument("Matrix: dimension mismatch");
        Matrix r(x.ctx_, x.n_);
        for (int i = 0; i < x.n_; ++i)
            for (int j = 0; j < x.n_; ++j) {
                PAdic s = PAdic::zero(x.ctx_);
                for (int k = 0; k < x.n_; ++k)
                    s = detail::add_entries(s, x.at(i, k) * y.at(k, j));
                r.at(i, j) = s;
            }
        return r;
    }

    friend bool operator==(const Matrix& x, const Matrix& y) {
        if (x.n_ != y.n_) return false;
        for (std::size_t i = 0; i < x.a_.size(); ++i)
            if (x.a_[i] != y.a_[i]) return false;
        return true;
    }

    Matrix transpose() const {
        Matrix r(ctx_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) r.at(i, j) = at(j, i);
        return r;
    }

    Matrix power(int k) const {
        if (k < 0) throw std::invalid_argument("Matrix: negative power");
        Matrix r = identity(ctx_, n_);
        for (int i = 0; i < k; ++i) r = r * *this;
        return r;
    }

    /// Leibniz expansion in a fixed term order (n <= 3 in this library).
    PAdic determinant() const {
        if (n_ == 1) return at(0, 0);
        if (n_ == 2)
            return detail::sub_entries(at(0, 0) * at(1, 1), at(0, 1) * at(1, 0));
        if (n_ == 3) {
            PAdic s = at(0, 0) * at(1, 1) * at(2, 2);
            s = detail::sub_entries(s, at(0, 0) * at(1, 2) * at(2, 1));
            s = detail::sub_entries(s, at(0, 1) * at(1, 0) * at(2, 2));
            s = detail::add_entries(s, at(0, 1) * at(1, 2) * at(2, 0));
            s = detail::add_entries(s, at(0, 2) * at(1, 0) * at(2, 1));
            s = detail::sub_entries(s, at(0, 2) * at(1, 1) * at(2, 0));
            return s;
        }
        throw std::invalid_argument("determinant: only n <= 3 supported");
    }

    PAdic trace() const {
        PAdic s = PAdic::zero(ctx_);
        for (int i = 0; i < n_; ++i) s = detail::add_entries(s, at(i, i));
        return s;
    }

    /// det(g) * g^{-1}, polynomial in the entries.
    Matrix adjugate() const {
        Matrix r(ctx_, n_);
        if (n_ == 1) {
            r.at(0, 0) = PAdic::from_integer(ctx_, 1);
            return r;
        }
        if (n_ == 2) {
            r.at(0, 0) = at(1, 1);
            r.at(0, 1) = -at(0, 1);
            r.at(1, 0) = -at(1, 0);
            r.at(1, 1) = at(0, 0);
            return r;
        }
        if (n_ == 3) {
            auto minor2 = [&](int r0, int r1, int c0, int c1) {
                return detail::sub_entries(at(r0, c0) * at(r1, c1), at(r0, c1) * at(r1, c0));
            };
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    int r0 = (j + 1) % 3 < (j + 2) % 3 ? (j + 1) % 3 : (j + 2) % 3;
                    int r1 = (j + 1) % 3 < (j + 2) % 3 ? (j + 2) % 3 : (j + 1) % 3;
                    int c0 = (i + 1) % 3 < (i + 2) % 3 ? (i + 1) % 3 : (i + 2) % 3;
                    int c1 = (i + 1) % 3 < (i + 2) % 3 ? (i + 2) % 3 : (i + 1) % 3;
                    PAdic m = minor2(r0, r1, c0, c1);
                    if ((i + j) % 2 == 1) m = -m;
                    r.at(i, j) = m;
                }
            return r;
        }
        throw std::invalid_argument("adjugate: only n <= 3 supported");
    }

    Matrix inverse() const {
        PAdic d = determinant();
        if (d.is_zero()) throw DivisionByZero("inverse: zero determinant");
        PAdic di = invert(d);
        Matrix adj = adjugate();
        for (PAdic& x : adj.a_) x = x * di;
        return adj;
    }

    bool is_integral() const {
        for (const PAdic& x : a_)
            if (!x.is_zero() && x.valuation() < 0) return false;
        return true;
    }

    /// Unit determinant and integral entries: an element of GL_n(Z_p).
    bool is_unit_integral() const {
        if (!is_integral()) return false;
        PAdic d = determinant();
        return !d.is_zero() && d.valuation() == 0;
    }

    /// det = 1 at the carried precision.
    bool is_special() const {
        return determinant() == PAdic::from_integer(ctx_, 1);
    }

private:
    PAdicContext ctx_{};
    int n_ = 0;
    std::vector<PAdic> a_;
};

/// g = k * t * u with k in GL_n(Z_p), t diagonal, u upper unitriangular.
struct IwasawaFactors {
    Matrix k, t, u;
};

/// g = k1 * a * k2 with k1, k2 in GL_n(Z_p) and a = diag(p^m1, ..., p^mn),
/// m1 <= ... <= mn.
struct CartanFactors {
    Matrix k1, a, k2;
    std::vector<std::int64_t> exponents;
};

namespace detail {

/// Valuation for pivot comparisons; exact zero sorts last.
inline bool better_pivot(const PAdic& cand, bool have, std::int64_t best_v) {
    if (cand.is_zero()) return false;
    return !have || cand.valuation() < best_v;
}

} // namespace detail

/// Column-by-column elimination from the left by GL_n(Z_p) row operations.
/// At each column the minimal-valuation entry on or below the diagonal is
/// the pivot (ties resolved by lowest row index), so every multiplier is
/// integral and everything peeled off lands in the K factor.
inline IwasawaFactors iwasawa(const Matrix& g) {
    const PAdicContext& ctx = g.context();
    int n = g.dim();
    Matrix m = g;
    Matrix k = Matrix::identity(ctx, n);

    for (int j = 0; j < n; ++j) {
        int piv = -1;
        std::int64_t best = 0;
        for (int i = j; i < n; ++i)
            if (detail::better_pivot(m.at(i, j), piv >= 0, best)) {
                piv = i;
                best = m.at(i, j).valuation();
            }
        if (piv < 0) throw Error("iwasawa: matrix is singular at the working precision");
        if (piv != j) {
            for (int l = 0; l < n; ++l) std::swap(m.at(piv, l), m.at(j, l));
            for (int l = 0; l < n; ++l) std::swap(k.at(l, piv), k.at(l, j));
        }
        for (int i = j + 1; i < n; ++i) {
            if (m.at(i, j).is_zero()) continue;
            PAdic c = m.at(i, j) / m.at(j, j);
            m.at(i, j) = PAdic::zero(ctx);
            for (int l = j + 1; l < n; ++l) m.at(i, l) = m.at(i, l) - c * m.at(j, l);
            // Inverse of the shear goes into k: column j gains c * column i.
            for (int l = 0; l < n; ++l) k.at(l, j) = k.at(l, j) + c * k.at(l, i);
        }
    }

    IwasawaFactors f{Matrix(ctx, n), Matrix(ctx, n), Matrix::identity(ctx, n)};
    f.k = k;
    for (int i = 0; i < n; ++i) {
        // Push the pivot's unit part into k so t is an exact power of p.
        std::int64_t v = m.at(i, i).valuation();
        PAdic unit = m.at(i, i).shift(-v);
        for (int l = 0; l < n; ++l) f.k.at(l, i) = f.k.at(l, i) * unit;
        f.t.at(i, i) = PAdic::from_integer(ctx, 1).shift(v);
        for (int j = i + 1; j < n; ++j) f.u.at(i, j) = m.at(i, j) / m.at(i, i);
    }
    return f;
}

/// Smith elimination over Z_p with both-sided GL_n(Z_p) operations; the
/// global minimal-valuation entry pivots each step (ties: lowest row, then
/// column), so the diagonal exponents come out sorted.
inline CartanFactors cartan(const Matrix& g) {
    const PAdicContext& ctx = g.context();
    int n = g.dim();
    Matrix m = g;
    Matrix k1 = Matrix::identity(ctx, n);
    Matrix k2 = Matrix::identity(ctx, n);

    for (int d = 0; d < n; ++d) {
        int pi = -1, pj = -1;
        std::int64_t best = 0;
        for (int i = d; i < n; ++i)
            for (int j = d; j < n; ++j)
                if (detail::better_pivot(m.at(i, j), pi >= 0, best)) {
                    pi = i;
                    pj = j;
                    best = m.at(i, j).valuation();
                }
        if (pi < 0) throw Error("cartan: matrix is singular at the working precision");
        if (pi != d) {
            for (int l = 0; l < n; ++l) std::swap(m.at(pi, l), m.at(d, l));
            for (int l = 0; l < n; ++l) std::swap(k1.at(l, pi), k1.at(l, d));
        }
        if (pj != d) {
            for (int l = 0; l < n; ++l) std::swap(m.at(l, pj), m.at(l, d));
            for (int l = 0; l < n; ++l) std::swap(k2.at(pj, l), k2.at(d, l));
        }
        // Normalize the pivot to an exact power of p.
        PAdic unit = m.at(d, d).shift(-best);
        PAdic ui = invert(unit);
        for (int l = d; l < n; ++l) m.at(d, l) = m.at(d, l) * ui;
        for (int l = 0; l < n; ++l) k1.at(l, d) = k1.at(l, d) * unit;
        for (int i = d + 1; i < n; ++i) {
            if (m.at(i, d).is_zero()) continue;
            PAdic c = m.at(i, d).shift(-best);
            m.at(i, d) = PAdic::zero(ctx);
            for (int l = d + 1; l < n; ++l) m.at(i, l) = m.at(i, l) - c * m.at(d, l);
            for (int l = 0; l < n; ++l) k1.at(l, d) = k1.at(l, d) + c * k1.at(l, i);
        }
        for (int j = d + 1; j < n; ++j) {
            if (m.at(d, j).is_zero()) continue;
            PAdic c = m.at(d, j).shift(-best);
            // Column d is already zero away from the pivot, so the column
            // operation only clears this one entry.
            m.at(d, j) = PAdic::zero(ctx);
            for (int l = 0; l < n; ++l) k2.at(d, l) = k2.at(d, l) + c * k2.at(j, l);
        }
    }

    CartanFactors f{k1, m, k2, {}};
    for (int i = 0; i < n; ++i) {
        const PAdic& di = m.at(i, i);
        if (di.is_zero()) throw Error("cartan: zero diagonal after elimination");
        f.exponents.push_back(di.valuation());
    }
    for (int i = 0; i + 1 < n; ++i)
        if (f.exponents[i] > f.exponents[i + 1])
            throw Error("cartan: exponents came out unsorted");
    PAdic det = g.determinant();
    std::int64_t sum = std::accumulate(f.exponents.begin(), f.exponents.end(), std::int64_t{0});
    if (det.is_zero() || det.valuation() != sum)
        throw Error("cartan: exponent sum does not match the determinant valuation");
    return f;
}

/// Pivot permutation of the Bruhat cell B w B containing g, found by Gaussian
/// elimination restricted to upper-triangular row and column operations.
inline WeylElement bruhat_position(const Matrix& g) {
    const PAdicContext& ctx = g.context();
    int n = g.dim();
    Matrix m = g;
    std::vector<bool> used(n, false);
    std::vector<int> one_line(n, 0);

    try {
        for (int j = 0; j < n; ++j) {
            int piv = -1;
            for (int i = n - 1; i >= 0; --i)
                if (!used[i] && !m.at(i, j).is_zero()) {
                    piv = i;
                    break;
                }
            if (piv < 0) throw Error("bruhat_position: matrix is singular at the working precision");
            used[piv] = true;
            one_line[j] = piv + 1;
            for (int r = 0; r < piv; ++r) {
                if (used[r] || m.at(r, j).is_zero()) continue;
                PAdic c = m.at(r, j) / m.at(piv, j);
                m.at(r, j) = PAdic::zero(ctx);
                for (int l = j + 1; l < n; ++l) m.at(r, l) = m.at(r, l) - c * m.at(piv, l);
            }
            for (int l = j + 1; l < n; ++l) {
                if (m.at(piv, l).is_zero()) continue;
                PAdic c = m.at(piv, l) / m.at(piv, j);
                m.at(piv, l) = PAdic::zero(ctx);
                for (int r = 0; r < n; ++r) {
                    if (r == piv || m.at(r, j).is_zero()) continue;
                    m.at(r, l) = m.at(r, l) - c * m.at(r, j);
                }
            }
        }
    } catch (const PrecisionExhausted& e) {
        throw RankAmbiguous(std::string("bruhat_position: ") + e.what());
    }
    return WeylElement(std::move(one_line));
}

/// Characteristic polynomial coefficients, constant term first.
inline std::vector<PAdic> characteristic_polynomial(const Matrix& g) {
    const PAdicContext& ctx = g.context();
    int n = g.dim();
    PAdic one = PAdic::from_integer(ctx, 1);
    if (n == 2) return {g.determinant(), -g.trace(), one};
    if (n == 3) {
        PAdic m2 = PAdic::zero(ctx);
        for (int i = 0; i < 3; ++i) {
            int a = (i + 1) % 3, b = (i + 2) % 3;
            int r0 = a < b ? a : b, r1 = a < b ? b : a;
            m2 = detail::add_entries(
                m2, detail::sub_entries(g.at(r0, r0) * g.at(r1, r1), g.at(r0, r1) * g.at(r1, r0)));
        }
        return {-g.determinant(), m2, -g.trace(), one};
    }
    throw std::invalid_argument("characteristic_polynomial: only n in {2,3}");
}

struct SpectralData {
    std::vector<Ratio> valuations;  // sorted increasing, with multiplicity
    bool regular = false;           // pairwise distinct
    bool hyperbolic = false;        // not all zero
};

/// Eigenvalue valuations from the lower convex hull of (i, v(c_i)).
/// A segment of slope s and horizontal length L contributes L roots of
/// valuation -s.
inline SpectralData spectral_valuations_of_poly(const std::vector<PAdic>& c) {
    int n = static_cast<int>(c.size()) - 1;
    std::vector<std::pair<int, std::int64_t>> pts;
    for (int i = 0; i <= n; ++i)
        if (!c[i].is_zero()) pts.emplace_back(i, c[i].valuation());
    if (pts.empty() || pts.front().first != 0 || pts.back().first != n)
        throw Error("spectral_valuations: degenerate characteristic polynomial");

    // Lower convex hull, left to right.
    std::vector<std::pair<int, std::int64_t>> hull;
    for (const auto& pt : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            // Drop b if it lies on or above segment a..pt.
            __int128 lhs = static_cast<__int128>(b.second - a.second) * (pt.first - a.first);
            __int128 rhs = static_cast<__int128>(pt.second - a.second) * (b.first - a.first);
            if (lhs >= rhs)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(pt);
    }

    SpectralData out;
    for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
        int len = hull[s + 1].first - hull[s].first;
        Ratio val(-(hull[s + 1].second - hull[s].second), len);
        for (int i = 0; i < len; ++i) out.valuations.push_back(val);
    }
    std::sort(out.valuations.begin(), out.valuations.end());
    out.regular = true;
    for (std::size_t i = 0; i + 1 < out.valuations.size(); ++i)
        if (out.valuations[i] == out.valuations[i + 1]) out.regular = false;
    for (const Ratio& r : out.valuations)
        if (r.num != 0) out.hyperbolic = true;
    return out;
}

inline SpectralData spectral_valuations(const Matrix& g) {
    return spectral_valuations_of_poly(characteristic_polynomial(g));
}

/// cartan(g^kmax).exponents / kmax, the finite-horizon growth-rate vector
/// approximating the spectral valuations. Larger kmax sharpens the estimate
/// but costs precision: every extra power multiplies entries whose relative
/// precision is capped by the context, so pick the context precision with
/// kmax * |valuation spread| headroom.
inline std::vector<Ratio> limit_cartan_rate(const Matrix& g, int kmax) {
    if (kmax < 1) throw std::invalid_argument("limit_cartan_rate: kmax must be positive");
    CartanFactors f = cartan(g.power(kmax));
    std::vector<Ratio> out;
    for (std::int64_t e : f.exponents) out.emplace_back(e, kmax);
    return out;
}

/// Newton-lift the unique root of the polynomial with the given valuation.
/// Requires the Newton polygon of `c` to have a length-1 segment at that
/// slope; the scaled reduction then has a simple nonzero root mod p.
inline PAdic hensel_root(const std::vector<PAdic>& c, std::int64_t valuation) {
    if (c.empty()) throw std::invalid_argument("hensel_root: empty polynomial");
    const PAdicContext& ctx = c.front().context();
    int n = static_cast<int>(c.size()) - 1;

    // Substitute x = p^m y and clear the minimal valuation.
    std::vector<PAdic> d(c.size(), PAdic::zero(ctx));
    bool any = false;
    std::int64_t mu = 0;
    for (int i = 0; i <= n; ++i) {
        if (c[i].is_zero()) continue;
        d[i] = c[i].shift(valuation * i);
        if (!any || d[i].valuation() < mu) mu = d[i].valuation();
        any = true;
    }
    if (!any) throw Error("hensel_root: zero polynomial");
    for (int i = 0; i <= n; ++i)
        if (!d[i].is_zero()) d[i] = d[i].shift(-mu);

    auto eval = [&](const std::vector<PAdic>& poly, const PAdic& x) {
        PAdic s = PAdic::zero(ctx);
        for (int i = static_cast<int>(poly.size()) - 1; i >= 0; --i) s = s * x + poly[i];
        return s;
    };
    std::vector<PAdic> dd;
    for (int i = 1; i <= n; ++i) dd.push_back(PAdic::from_integer(ctx, i) * d[i]);

    // Simple nonzero root of the reduction mod p.
    const auto P = static_cast<std::uint64_t>(ctx.p);
    auto res = [](const PAdic& x) -> std::uint64_t {
        if (x.is_zero() || x.valuation() > 0) return 0;
        return static_cast<std::uint64_t>(x.residue());
    };
    std::int64_t y0 = 0;
    for (std::int64_t y = 1; y < ctx.p; ++y) {
        const auto yy = static_cast<std::uint64_t>(y);
        std::uint64_t fy = 0, fpy = 0;
        for (int i = n; i >= 0; --i) fy = (detail::mulmod_u64(fy, yy, P) + res(d[i])) % P;
        for (int i = n - 1; i >= 0; --i) fpy = (detail::mulmod_u64(fpy, yy, P) + res(dd[i])) % P;
        if (fy == 0 && fpy != 0) {
            y0 = y;
            break;
        }
    }
    if (y0 == 0) throw Error("hensel_root: no simple residue root; slope is not a length-1 segment");

    PAdic y = PAdic::from_integer(ctx, y0);
    for (int it = 0; it < 64; ++it) {
        PAdic fy = PAdic::zero(ctx);
        try {
            fy = eval(d, y);
        } catch (const PrecisionExhausted&) {
            break;  // value vanished to working precision: converged
        }
        if (fy.is_zero()) break;
        PAdic step = fy / eval(dd, y);
        PAdic next = y;
        try {
            next = y - step;
        } catch (const PrecisionExhausted&) {
            break;
        }
        if (next == y) {
            y = next;
            break;
        }
        y = next;
    }
    return y.shift(valuation);
}

/// Eigenvalues of a regular matrix, sorted by increasing valuation, each
/// Hensel-lifted from its Newton-polygon slope.
inline std::vector<PAdic> eigenvalues(const Matrix& g) {
    std::vector<PAdic> c = characteristic_polynomial(g);
    SpectralData sd = spectral_valuations_of_poly(c);
    if (!sd.regular)
        throw NotRegular("eigenvalues: spectral valuations are not pairwise distinct");
    std::vector<PAdic> out;
    for (const Ratio& r : sd.valuations) out.push_back(hensel_root(c, r.num));
    return out;
}

/// Kernel vector of (g - lambda I) for a simple eigenvalue, chosen among the
/// closed-form candidates as the one with the most primitive (smallest
/// minimal-valuation) coordinates; candidates that cancel below precision
/// are skipped.
inline std::vector<PAdic> eigenvector(const Matrix& g, const PAdic& lambda) {
    const PAdicContext& ctx = g.context();
    int n = g.dim();
    std::vector<std::vector<PAdic>> candidates;
    if (n == 2) {
        candidates.push_back({g.at(0, 1), detail::sub_entries(lambda, g.at(0, 0))});
        candidates.push_back({detail::sub_entries(lambda, g.at(1, 1)), g.at(1, 0)});
    } else if (n == 3) {
        Matrix m = g;
        for (int i = 0; i < 3; ++i) m.at(i, i) = detail::sub_entries(g.at(i, i), lambda);
        auto cross = [&](int r, int s) {
            std::vector<PAdic> v(3, PAdic::zero(ctx));
            v[0] = detail::sub_entries(m.at(r, 1) * m.at(s, 2), m.at(r, 2) * m.at(s, 1));
            v[1] = detail::sub_entries(m.at(r, 2) * m.at(s, 0), m.at(r, 0) * m.at(s, 2));
            v[2] = detail::sub_entries(m.at(r, 0) * m.at(s, 1), m.at(r, 1) * m.at(s, 0));
            return v;
        };
        for (auto [r, s] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}})
            candidates.push_back(cross(r, s));
    } else {
        throw std::invalid_argument("eigenvector: only n in {2,3}");
    }

    int best = -1;
    std::int64_t best_v = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        bool nonzero = false;
        std::int64_t mv = 0;
        for (const PAdic& x : candidates[i])
            if (!x.is_zero()) {
                if (!nonzero || x.valuation() < mv) mv = x.valuation();
                nonzero = true;
            }
        if (!nonzero) continue;
        if (best < 0 || mv < best_v) {
            best = static_cast<int>(i);
            best_v = mv;
        }
    }
    if (best < 0)
        throw PrecisionExhausted("eigenvector: every kernel candidate cancelled below precision");
    return candidates[best];
}

/// Eigenbasis of a regular matrix, columns ordered by increasing eigenvalue
/// valuation (equivalently decreasing norm: attracting direction first).
inline std::vector<std::vector<PAdic>> eigenbasis(const Matrix& g) {
    std::vector<std::vector<PAdic>> basis;
    for (const PAdic& lambda : eigenvalues(g)) basis.push_back(eigenvector(g, lambda));
    return basis;
}

} // namespace qpflag
