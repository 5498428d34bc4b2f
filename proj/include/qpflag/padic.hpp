#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qpflag/errors.hpp"

namespace qpflag {

namespace detail {

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

/// Inverse of a modulo m (gcd(a, m) = 1), by extended Euclid.
inline std::uint64_t invmod_u64(std::uint64_t a, std::uint64_t m) {
    std::int64_t t = 0, newt = 1;
    std::int64_t r = static_cast<std::int64_t>(m), newr = static_cast<std::int64_t>(a % m);
    while (newr != 0) {
        std::int64_t q = r / newr;
        std::int64_t tmp = t - q * newt;
        t = newt;
        newt = tmp;
        tmp = r - q * newr;
        r = newr;
        newr = tmp;
    }
    if (r != 1) throw DivisionByZero("invmod: argument shares a factor with the modulus");
    if (t < 0) t += static_cast<std::int64_t>(m);
    return static_cast<std::uint64_t>(t);
}

inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

} // namespace detail

/// Fixed base-p working environment: all values in one context carry at most
/// `precision` significant base-p digits. p^precision must fit in 63 bits.
struct PAdicContext {
    std::int64_t p = 0;
    int precision = 0;

    PAdicContext() = default;
    PAdicContext(std::int64_t prime, int prec) : p(prime), precision(prec) {
        if (!detail::is_prime_u64(static_cast<std::uint64_t>(prime)))
            throw std::invalid_argument("PAdicContext: p must be a prime >= 2");
        if (prec < 1)
            throw std::invalid_argument("PAdicContext: precision must be >= 1");
        long double pw = 1;
        for (int i = 0; i < prec; ++i) {
            pw *= static_cast<long double>(prime);
            if (pw > 4.0e18L)
                throw std::invalid_argument("PAdicContext: p^precision exceeds 62 bits");
        }
    }

    bool operator==(const PAdicContext& o) const { return p == o.p && precision == o.precision; }
    bool operator!=(const PAdicContext& o) const { return !(*this == o); }

    /// p^k for 0 <= k <= precision.
    std::uint64_t pow(int k) const {
        std::uint64_t r = 1;
        for (int i = 0; i < k; ++i) r *= static_cast<std::uint64_t>(p);
        return r;
    }
};

/// Truncated element of Q_p with capped relative precision: the value is
/// p^v * unit where the unit is known modulo p^prec (1 <= prec <= context
/// precision, unit not divisible by p). Exact zero is its own state with
/// valuation +infinity. Immutable after construction.
class PAdic {
public:
    PAdic() = default;

    static PAdic zero(const PAdicContext& ctx) {
        PAdic x;
        x.ctx_ = ctx;
        x.zero_ = true;
        return x;
    }

    static PAdic from_integer(const PAdicContext& ctx, std::int64_t n) {
        return from_rational(ctx, n, 1);
    }

    static PAdic from_rational(const PAdicContext& ctx, std::int64_t num, std::int64_t den) {
        if (den == 0) throw DivisionByZero("from_rational: zero denominator");
        if (num == 0) return zero(ctx);
        std::int64_t v = 0;
        std::uint64_t un = static_cast<std::uint64_t>(num < 0 ? -num : num);
        std::uint64_t ud = static_cast<std::uint64_t>(den < 0 ? -den : den);
        const std::uint64_t up = static_cast<std::uint64_t>(ctx.p);
        while (un % up == 0) { un /= up; ++v; }
        while (ud % up == 0) { ud /= up; --v; }
        const std::uint64_t m = ctx.pow(ctx.precision);
        std::uint64_t u = detail::mulmod_u64(un % m, detail::invmod_u64(ud % m, m), m);
        if ((num < 0) != (den < 0)) u = m - u;
        return make(ctx, v, u, ctx.precision);
    }

    const PAdicContext& context() const { return ctx_; }
    bool is_zero() const { return zero_; }

    /// Valuation of a nonzero value. Zero has valuation +infinity; asking for
    /// it as an integer is a logic error.
    std::int64_t valuation() const {
        if (zero_) throw std::logic_error("valuation: exact zero has valuation +infinity");
        return v_;
    }

    /// Number of significant digits carried (1..context precision).
    int precision() const {
        if (zero_) return ctx_.precision;
        return prec_;
    }

    /// Unit part modulo p^min(precision(), k).
    std::uint64_t unit_mod(int k) const {
        if (zero_) return 0;
        int kk = k < prec_ ? k : prec_;
        return unit_ % ctx_.pow(kk);
    }

    /// Base-p digits of the unit part, least significant first, one per
    /// carried significant digit.
    std::vector<int> digits() const {
        std::vector<int> d;
        if (zero_) return d;
        std::uint64_t u = unit_;
        for (int i = 0; i < prec_; ++i) {
            d.push_back(static_cast<int>(u % static_cast<std::uint64_t>(ctx_.p)));
            u /= static_cast<std::uint64_t>(ctx_.p);
        }
        return d;
    }

    /// The norm |x| = p^(-v) as an exact rational (num, den); |0| = 0.
    struct Norm {
        std::int64_t num = 0;
        std::int64_t den = 1;
    };
    Norm norm() const {
        if (zero_) return {0, 1};
        Norm n{1, 1};
        std::int64_t k = v_ >= 0 ? v_ : -v_;
        std::int64_t* side = v_ >= 0 ? &n.den : &n.num;
        for (std::int64_t i = 0; i < k; ++i) {
            if (*side > std::numeric_limits<std::int64_t>::max() / ctx_.p)
                throw std::overflow_error("norm: p^|v| exceeds 63 bits");
            *side *= ctx_.p;
        }
        return n;
    }

    /// Image in the residue field Z/p. Defined for valuation >= 0 (and zero).
    std::int64_t residue() const {
        if (zero_) return 0;
        if (v_ < 0) throw std::domain_error("residue: negative valuation, not in Z_p");
        if (v_ > 0) return 0;
        return static_cast<std::int64_t>(unit_ % static_cast<std::uint64_t>(ctx_.p));
    }

    friend PAdic operator+(const PAdic& x, const PAdic& y) {
        check_ctx(x, y);
        if (x.zero_) return y;
        if (y.zero_) return x;
        const PAdic& a = (x.v_ <= y.v_) ? x : y;
        const PAdic& b = (x.v_ <= y.v_) ? y : x;
        // Absolute precision of the sum: min over operands of v + prec.
        std::int64_t abs_prec = std::min(a.v_ + a.prec_, b.v_ + b.prec_);
        int rel = static_cast<int>(abs_prec - a.v_);
        if (rel <= 0)
            throw PrecisionExhausted("add: operands share no overlapping digit range");
        std::int64_t shift = b.v_ - a.v_;
        const std::uint64_t m = a.ctx_.pow(rel);
        std::uint64_t s = a.unit_ % m;
        if (shift < rel) {
            std::uint64_t t = detail::mulmod_u64(b.unit_ % m, a.ctx_.pow(static_cast<int>(shift)), m);
            s = (s + t) % m;
        }
        if (s == 0)
            throw PrecisionExhausted("add: cancellation below one significant digit");
        int k = 0;
        std::uint64_t u = s;
        while (u % static_cast<std::uint64_t>(a.ctx_.p) == 0) { u /= static_cast<std::uint64_t>(a.ctx_.p); ++k; }
        return make(a.ctx_, a.v_ + k, u, rel - k);
    }

    friend PAdic operator-(const PAdic& x) {
        if (x.zero_) return x;
        std::uint64_t m = x.ctx_.pow(x.prec_);
        return make(x.ctx_, x.v_, m - x.unit_, x.prec_);
    }

    friend PAdic operator-(const PAdic& x, const PAdic& y) { return x + (-y); }

    friend PAdic operator*(const PAdic& x, const PAdic& y) {
        check_ctx(x, y);
        if (x.zero_ || y.zero_) return zero(x.ctx_);
        int prec = std::min(x.prec_, y.prec_);
        std::uint64_t m = x.ctx_.pow(prec);
        return make(x.ctx_, x.v_ + y.v_, detail::mulmod_u64(x.unit_ % m, y.unit_ % m, m), prec);
    }

    friend PAdic operator/(const PAdic& x, const PAdic& y) { return x * invert(y); }

    friend PAdic invert(const PAdic& x) {
        if (x.zero_) throw DivisionByZero("invert: exact zero");
        std::uint64_t m = x.ctx_.pow(x.prec_);
        return make(x.ctx_, -x.v_, detail::invmod_u64(x.unit_, m), x.prec_);
    }

    /// Multiply by p^k (exact valuation shift).
    PAdic shift(std::int64_t k) const {
        if (zero_) return *this;
        return make(ctx_, v_ + k, unit_, prec_);
    }

    /// Equality at the shared precision: same valuation and the unit parts
    /// agree on every digit both sides carry.
    friend bool operator==(const PAdic& x, const PAdic& y) {
        check_ctx(x, y);
        if (x.zero_ || y.zero_) return x.zero_ && y.zero_;
        if (x.v_ != y.v_) return false;
        int k = std::min(x.prec_, y.prec_);
        std::uint64_t m = x.ctx_.pow(k);
        return x.unit_ % m == y.unit_ % m;
    }
    friend bool operator!=(const PAdic& x, const PAdic& y) { return !(x == y); }

    /// Textual form "p^v * (d0 + d1*p + d2*p^2 + ...)"; exact zero is "0".
    std::string to_string() const {
        if (zero_) return "0";
        std::ostringstream os;
        os << ctx_.p << "^" << v_ << " * (";
        std::vector<int> d = digits();
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (i) os << " + ";
            os << d[i];
            if (i == 1) os << "*" << ctx_.p;
            if (i > 1) os << "*" << ctx_.p << "^" << i;
        }
        os << ")";
        return os.str();
    }

    /// Accepts the to_string() form, plain integers ("-42") and rationals
    /// ("num/den"). Round-trips to_string() exactly, including the carried
    /// precision.
    static PAdic parse(const PAdicContext& ctx, const std::string& text);

private:
    static void check_ctx(const PAdic& x, const PAdic& y) {
        if (x.ctx_ != y.ctx_)
            throw ContextMismatch("operands come from different p-adic contexts");
    }

    static PAdic make(const PAdicContext& ctx, std::int64_t v, std::uint64_t unit, int prec) {
        if (prec > ctx.precision) prec = ctx.precision;
        if (prec < 1) throw PrecisionExhausted("no significant digits left");
        std::uint64_t m = ctx.pow(prec);
        unit %= m;
        // The constructor keeps the unit a genuine unit; callers strip powers
        // of p into the valuation before getting here.
        if (unit == 0 || unit % static_cast<std::uint64_t>(ctx.p) == 0)
            throw std::logic_error("PAdic: non-unit mantissa");
        PAdic x;
        x.ctx_ = ctx;
        x.zero_ = false;
        x.v_ = v;
        x.unit_ = unit;
        x.prec_ = prec;
        return x;
    }

    PAdicContext ctx_{};
    bool zero_ = true;
    std::int64_t v_ = 0;
    std::uint64_t unit_ = 0;
    int prec_ = 0;

    friend class PAdicParserAccess;
};

class PAdicParserAccess {
public:
    static PAdic make(const PAdicContext& ctx, std::int64_t v, std::uint64_t unit, int prec) {
        std::uint64_t u = unit;
        std::int64_t vv = v;
        while (u != 0 && u % static_cast<std::uint64_t>(ctx.p) == 0) { u /= static_cast<std::uint64_t>(ctx.p); ++vv; }
        if (u == 0) throw std::invalid_argument("p-adic literal: zero mantissa");
        PAdic x;
        x.ctx_ = ctx;
        x.zero_ = false;
        x.v_ = vv;
        x.unit_ = u % ctx.pow(prec);
        x.prec_ = prec;
        return x;
    }
};

inline PAdic PAdic::parse(const PAdicContext& ctx, const std::string& text) {
    std::string s;
    for (char c : text)
        if (c != ' ') s.push_back(c);
    if (s.empty()) throw std::invalid_argument("p-adic literal: empty string");
    if (s == "0") return PAdic::zero(ctx);

    auto parse_ll = [](const std::string& t) {
        std::size_t pos = 0;
        long long r = std::stoll(t, &pos);
        if (pos != t.size()) throw std::invalid_argument("p-adic literal: trailing characters in '" + t + "'");
        return r;
    };

    std::size_t star = s.find("*(");
    if (star != std::string::npos && s.back() == ')') {
        // "p^v*(d0+d1*p+...)" with blanks already stripped.
        std::size_t caret = s.find('^');
        if (caret == std::string::npos || caret > star)
            throw std::invalid_argument("p-adic literal: missing exponent in '" + text + "'");
        long long base = parse_ll(s.substr(0, caret));
        if (base != ctx.p) throw std::invalid_argument("p-adic literal: base does not match the context prime");
        long long v = parse_ll(s.substr(caret + 1, star - caret - 1));
        std::string body = s.substr(star + 2, s.size() - star - 3);
        std::uint64_t unit = 0;
        int ndigits = 0;
        std::size_t pos = 0;
        while (pos < body.size()) {
            std::size_t plus = body.find('+', pos);
            std::string term = body.substr(pos, plus == std::string::npos ? std::string::npos : plus - pos);
            pos = plus == std::string::npos ? body.size() : plus + 1;
            std::size_t mul = term.find('*');
            long long digit = parse_ll(mul == std::string::npos ? term : term.substr(0, mul));
            int expo = 0;
            if (mul != std::string::npos) {
                std::string rest = term.substr(mul + 1);
                std::size_t c2 = rest.find('^');
                long long b = parse_ll(c2 == std::string::npos ? rest : rest.substr(0, c2));
                if (b != ctx.p) throw std::invalid_argument("p-adic literal: digit term base mismatch");
                expo = c2 == std::string::npos ? 1 : static_cast<int>(parse_ll(rest.substr(c2 + 1)));
            }
            if (digit < 0 || digit >= ctx.p) throw std::invalid_argument("p-adic literal: digit out of range");
            if (expo != ndigits) throw std::invalid_argument("p-adic literal: digit exponents must be consecutive");
            if (ndigits >= ctx.precision) throw std::invalid_argument("p-adic literal: more digits than the context precision");
            unit += static_cast<std::uint64_t>(digit) * ctx.pow(expo);
            ++ndigits;
        }
        if (ndigits == 0) throw std::invalid_argument("p-adic literal: empty digit list");
        return PAdicParserAccess::make(ctx, v, unit, ndigits);
    }

    std::size_t slash = s.find('/');
    if (slash != std::string::npos)
        return PAdic::from_rational(ctx, parse_ll(s.substr(0, slash)), parse_ll(s.substr(slash + 1)));
    return PAdic::from_integer(ctx, parse_ll(s));
}

} // namespace qpflag
