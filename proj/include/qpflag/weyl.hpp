#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qpflag/errors.hpp"

namespace qpflag {

/// Coxeter matrix of the finite reflection group acting on the flag data.
/// Only the symmetric-group series is instantiated here: m_ii = 1,
/// m_ij = 3 for |i-j| = 1 and 2 otherwise.
struct CoxeterMatrix {
    int rank = 0;                       // number of generators (n-1 for S_n)
    std::vector<std::vector<int>> m;

    static CoxeterMatrix type_a(int n) {
        if (n < 2) throw std::invalid_argument("CoxeterMatrix: need n >= 2");
        CoxeterMatrix c;
        c.rank = n - 1;
        c.m.assign(c.rank, std::vector<int>(c.rank, 2));
        for (int i = 0; i < c.rank; ++i) {
            c.m[i][i] = 1;
            if (i + 1 < c.rank) c.m[i][i + 1] = c.m[i + 1][i] = 3;
        }
        return c;
    }
};

/// Element of the symmetric group S_n in one-line notation (1-based values).
/// Immutable; the canonical reduced word is the lexicographically smallest
/// one and is recomputed on demand (n is tiny here).
class WeylElement {
public:
    WeylElement() = default;
    explicit WeylElement(std::vector<int> one_line) : perm_(std::move(one_line)) {
        validate();
    }

    static WeylElement identity(int n) {
        std::vector<int> p(n);
        std::iota(p.begin(), p.end(), 1);
        return WeylElement(std::move(p));
    }

    /// The adjacent transposition r_i swapping i and i+1 (1 <= i <= n-1).
    static WeylElement generator(int n, int i) {
        if (i < 1 || i >= n) throw std::invalid_argument("generator: index out of range");
        WeylElement w = identity(n);
        std::swap(w.perm_[i - 1], w.perm_[i]);
        return w;
    }

    int degree() const { return static_cast<int>(perm_.size()); }
    int apply(int x) const { return perm_[x - 1]; }
    const std::vector<int>& one_line() const { return perm_; }

    bool is_identity() const {
        for (int i = 0; i < degree(); ++i)
            if (perm_[i] != i + 1) return false;
        return true;
    }

    /// Composition of functions: (a*b)(x) = a(b(x)).
    friend WeylElement operator*(const WeylElement& a, const WeylElement& b) {
        if (a.degree() != b.degree())
            throw std::invalid_argument("WeylElement: mixed degrees");
        std::vector<int> p(a.degree());
        for (int i = 0; i < a.degree(); ++i) p[i] = a.perm_[b.perm_[i] - 1];
        return WeylElement(std::move(p));
    }

    WeylElement inverse() const {
        std::vector<int> p(degree());
        for (int i = 0; i < degree(); ++i) p[perm_[i] - 1] = i + 1;
        return WeylElement(std::move(p));
    }

    /// Coxeter length = inversion count of the one-line form.
    int length() const {
        int n = degree(), inv = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (perm_[i] > perm_[j]) ++inv;
        return inv;
    }

    /// Generators r_i with length(r_i * w) < length(w).
    std::vector<int> left_descents() const {
        std::vector<int> d;
        for (int i = 1; i < degree(); ++i)
            if ((generator(degree(), i) * *this).length() < length()) d.push_back(i);
        return d;
    }

    /// Lexicographically smallest reduced word, as generator indices.
    std::vector<int> word() const {
        std::vector<int> out;
        WeylElement w = *this;
        while (!w.is_identity()) {
            std::vector<int> d = w.left_descents();
            out.push_back(d.front());
            w = generator(degree(), d.front()) * w;
        }
        return out;
    }

    /// "e" for the identity, otherwise "r1.r2.r1" style.
    std::string to_string() const {
        std::vector<int> ww = word();
        if (ww.empty()) return "e";
        std::ostringstream os;
        for (std::size_t i = 0; i < ww.size(); ++i) {
            if (i) os << ".";
            os << "r" << ww[i];
        }
        return os.str();
    }

    /// Accepts "e", reduced words "r1.r2", and one-line "[3,2,1]".
    static WeylElement parse(int n, const std::string& text);

    friend bool operator==(const WeylElement& a, const WeylElement& b) {
        return a.perm_ == b.perm_;
    }
    friend bool operator!=(const WeylElement& a, const WeylElement& b) { return !(a == b); }

    /// Enumeration order: by length, then by lexicographic reduced word.
    friend bool operator<(const WeylElement& a, const WeylElement& b) {
        int la = a.length(), lb = b.length();
        if (la != lb) return la < lb;
        return a.word() < b.word();
    }

private:
    void validate() const {
        int n = degree();
        if (n < 1) throw std::invalid_argument("WeylElement: empty one-line form");
        std::vector<bool> seen(n, false);
        for (int x : perm_) {
            if (x < 1 || x > n || seen[x - 1])
                throw std::invalid_argument("WeylElement: not a permutation");
            seen[x - 1] = true;
        }
    }

    std::vector<int> perm_;
};

inline WeylElement WeylElement::parse(int n, const std::string& text) {
    std::string s;
    for (char c : text)
        if (c != ' ') s.push_back(c);
    if (s.empty()) throw std::invalid_argument("WeylElement: empty string");
    if (s == "e" || s == "1") return identity(n);
    if (s.front() == '[') {
        if (s.back() != ']') throw std::invalid_argument("WeylElement: unterminated one-line form");
        std::vector<int> p;
        std::istringstream is(s.substr(1, s.size() - 2));
        std::string tok;
        while (std::getline(is, tok, ',')) p.push_back(std::stoi(tok));
        if (static_cast<int>(p.size()) != n)
            throw std::invalid_argument("WeylElement: one-line length does not match n");
        return WeylElement(std::move(p));
    }
    WeylElement w = identity(n);
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, '.')) {
        if (tok.size() < 2 || tok[0] != 'r')
            throw std::invalid_argument("WeylElement: bad word letter '" + tok + "'");
        w = w * generator(n, std::stoi(tok.substr(1)));
    }
    return w;
}

/// All of S_n sorted by (length, lexicographic reduced word).
inline std::vector<WeylElement> enumerate_group(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 1);
    std::vector<WeylElement> all;
    do {
        all.emplace_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    std::sort(all.begin(), all.end());
    return all;
}

inline std::map<int, int> length_histogram(int n) {
    std::map<int, int> h;
    for (const WeylElement& w : enumerate_group(n)) ++h[w.length()];
    return h;
}

/// The order-reversing permutation, the unique element of maximal length
/// n(n-1)/2. It conjugates each r_i to r_{n-i}.
inline WeylElement longest_element(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = n - i;
    return WeylElement(std::move(p));
}

/// Closure of a generating set under multiplication.
inline std::vector<WeylElement> subgroup_generated(int n, const std::vector<WeylElement>& gens) {
    std::set<std::vector<int>> seen;
    std::vector<WeylElement> frontier{WeylElement::identity(n)}, out;
    seen.insert(WeylElement::identity(n).one_line());
    while (!frontier.empty()) {
        std::vector<WeylElement> next;
        for (const WeylElement& w : frontier) {
            out.push_back(w);
            for (const WeylElement& g : gens) {
                WeylElement x = w * g;
                if (seen.insert(x.one_line()).second) next.push_back(x);
            }
        }
        frontier = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Standard subgroup W(J) generated by {r_j : j in J}.
inline std::vector<WeylElement> standard_subgroup(int n, const std::vector<int>& J) {
    std::vector<WeylElement> gens;
    for (int j : J) gens.push_back(WeylElement::generator(n, j));
    return subgroup_generated(n, gens);
}

struct SpecialCoset {
    std::vector<int> J;                   // generating indices of W(J)
    WeylElement representative;           // unique minimal-length member
    std::vector<WeylElement> members;     // sorted by enumeration order
};

/// Left cosets w W(J), listed in enumeration order of their representatives.
inline std::vector<SpecialCoset> cosets(int n, const std::vector<int>& J) {
    std::vector<WeylElement> sub = standard_subgroup(n, J);
    std::set<std::vector<int>> assigned;
    std::vector<SpecialCoset> out;
    for (const WeylElement& w : enumerate_group(n)) {
        if (assigned.count(w.one_line())) continue;
        SpecialCoset c;
        c.J = J;
        std::sort(c.J.begin(), c.J.end());
        for (const WeylElement& h : sub) {
            WeylElement x = w * h;
            assigned.insert(x.one_line());
            c.members.push_back(x);
        }
        std::sort(c.members.begin(), c.members.end());
        c.representative = c.members.front();
        out.push_back(std::move(c));
    }
    return out;
}

/// Right cosets H w of an arbitrary subgroup, each sorted, listed by their
/// minimal member. This is the partition the control-set labels must match.
inline std::vector<std::vector<WeylElement>>
right_coset_partition(int n, const std::vector<WeylElement>& subgroup) {
    std::set<std::vector<int>> assigned;
    std::vector<std::vector<WeylElement>> out;
    for (const WeylElement& w : enumerate_group(n)) {
        if (assigned.count(w.one_line())) continue;
        std::vector<WeylElement> coset;
        for (const WeylElement& h : subgroup) {
            WeylElement x = h * w;
            if (assigned.insert(x.one_line()).second) coset.push_back(x);
        }
        std::sort(coset.begin(), coset.end());
        out.push_back(std::move(coset));
    }
    return out;
}

/// The chamber complex of S_n: chambers are group elements, the panels of
/// cotype i are the right cosets W({i})w, so w1 and w2 are i-adjacent exactly
/// when w1 = r_i w2. The group acts on chambers from the right, preserving
/// vertex types.
struct CoxeterComplex {
    int n = 0;
    std::vector<WeylElement> chambers;                 // enumeration order
    struct Vertex {
        int type;                                      // i in 1..n-1 (cotype complement)
        std::vector<int> chambers;                     // sorted chamber ids
    };
    std::vector<Vertex> vertices;
    std::vector<std::vector<int>> chamber_vertices;    // [chamber][type-1] -> vertex id
    std::vector<std::vector<int>> adjacent;            // [chamber][i-1] -> id of r_i * w

    int chamber_index(const WeylElement& w) const {
        for (std::size_t i = 0; i < chambers.size(); ++i)
            if (chambers[i] == w) return static_cast<int>(i);
        throw std::logic_error("chamber_index: element not found");
    }

    /// Right action w -> w*g on chambers; a type-preserving automorphism.
    std::vector<int> act(const WeylElement& g) const {
        std::vector<int> image(chambers.size());
        for (std::size_t i = 0; i < chambers.size(); ++i)
            image[i] = chamber_index(chambers[i] * g);
        return image;
    }
};

inline CoxeterComplex coxeter_complex(int n) {
    CoxeterComplex cx;
    cx.n = n;
    cx.chambers = enumerate_group(n);
    int nc = static_cast<int>(cx.chambers.size());
    cx.chamber_vertices.assign(nc, std::vector<int>(n - 1, -1));
    cx.adjacent.assign(nc, std::vector<int>(n - 1, -1));

    for (int i = 1; i < n; ++i) {
        // Vertices of type i: right cosets of W(I \ {i}).
        std::vector<int> J;
        for (int j = 1; j < n; ++j)
            if (j != i) J.push_back(j);
        std::vector<WeylElement> sub = standard_subgroup(n, J);
        std::set<std::vector<int>> assigned;
        for (int c = 0; c < nc; ++c) {
            if (assigned.count(cx.chambers[c].one_line())) continue;
            CoxeterComplex::Vertex v;
            v.type = i;
            for (const WeylElement& h : sub) {
                WeylElement x = h * cx.chambers[c];
                assigned.insert(x.one_line());
                v.chambers.push_back(cx.chamber_index(x));
            }
            std::sort(v.chambers.begin(), v.chambers.end());
            int vid = static_cast<int>(cx.vertices.size());
            cx.vertices.push_back(v);
            for (int cc : cx.vertices[vid].chambers) cx.chamber_vertices[cc][i - 1] = vid;
        }
    }
    for (int c = 0; c < nc; ++c)
        for (int i = 1; i < n; ++i)
            cx.adjacent[c][i - 1] = cx.chamber_index(WeylElement::generator(n, i) * cx.chambers[c]);
    return cx;
}

} // namespace qpflag
