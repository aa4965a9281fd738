#pragma once

// Polynomials in the fixed variable universe {s, eta, theta} with exact
// coefficients. The coefficient ring K is either Rational (plain kernel
// algebra) or LinExpr (LMI assembly, where coefficients are affine in the
// Gram-matrix unknowns).
//
// theta exists only transiently inside composition/positivity integrals;
// stored operator kernels never contain it.

#include "pistab/linexpr.hpp"
#include "pistab/rational.hpp"

#include <array>
#include <map>
#include <sstream>
#include <string>

namespace pistab {

enum class Var : int { s = 0, eta = 1, theta = 2 };

inline const char* var_name(Var v) {
    switch (v) {
        case Var::s: return "s";
        case Var::eta: return "eta";
        case Var::theta: return "theta";
    }
    return "?";
}

using Exp3 = std::array<int, 3>;

// Graded lexicographic order with s < eta < theta: lower total degree first;
// within a grade, smaller exponents of the later variables first (so the
// canonical sequence runs 1, s, eta, s^2, s*eta, eta^2, ...).
struct GrlexLess {
    bool operator()(const Exp3& a, const Exp3& b) const {
        int ga = a[0] + a[1] + a[2];
        int gb = b[0] + b[1] + b[2];
        if (ga != gb) return ga < gb;
        if (a[2] != b[2]) return a[2] < b[2];
        if (a[1] != b[1]) return a[1] < b[1];
        return a[0] < b[0];
    }
};

inline bool coeff_is_zero(const Rational& c) { return c == 0; }
inline bool coeff_is_zero(const LinExpr& c) { return c.is_zero(); }

template <class K>
class Poly {
  public:
    using TermMap = std::map<Exp3, K, GrlexLess>;

    Poly() = default;
    explicit Poly(K c) {
        if (!coeff_is_zero(c)) terms_[{0, 0, 0}] = std::move(c);
    }

    static Poly constant(K c) { return Poly(std::move(c)); }
    static Poly variable(Var v) { return monomial(K(Rational(1)), exp_of(v, 1)); }
    static Poly monomial(K c, Exp3 e) {
        Poly p;
        if (e[0] < 0 || e[1] < 0 || e[2] < 0) throw Error("negative exponent");
        if (!coeff_is_zero(c)) p.terms_[e] = std::move(c);
        return p;
    }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Exp3{0, 0, 0});
    }
    K constant_value() const {
        if (terms_.empty()) return K(Rational(0));
        if (!is_constant()) throw Error("constant_value() on non-constant polynomial");
        return terms_.begin()->second;
    }

    bool contains(Var v) const {
        for (const auto& [e, c] : terms_)
            if (e[static_cast<int>(v)] > 0) return true;
        return false;
    }

    // -1 for the zero polynomial.
    int degree(Var v) const {
        int d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, e[static_cast<int>(v)]);
        return d;
    }
    int total_degree() const {
        int d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2]);
        return d;
    }

    Poly& operator+=(const Poly& o) {
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        for (const auto& [e, c] : o.terms_) sub_term(e, c);
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    Poly operator-() const {
        Poly p;
        for (const auto& [e, c] : terms_) p.terms_[e] = -c;
        return p;
    }

    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly p;
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                Exp3 e{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]};
                p.add_term(e, ca * cb);
            }
        return p;
    }

    Poly scaled(const Rational& c) const {
        Poly p;
        if (c == 0) return p;
        for (const auto& [e, k] : terms_) p.terms_[e] = k * K(c);
        return p;
    }

    Poly derivative(Var v) const {
        int vi = static_cast<int>(v);
        Poly p;
        for (const auto& [e, c] : terms_) {
            if (e[vi] == 0) continue;
            Exp3 d = e;
            d[vi] -= 1;
            p.add_term(d, c * K(rat(e[vi])));
        }
        return p;
    }

    Poly antiderivative(Var v) const {
        int vi = static_cast<int>(v);
        Poly p;
        for (const auto& [e, c] : terms_) {
            Exp3 d = e;
            d[vi] += 1;
            p.add_term(d, c * K(rat(1, d[vi])));
        }
        return p;
    }

    // Simultaneous substitution; variables absent from the map are kept.
    Poly substitute(const std::map<Var, Poly<Rational>>& bindings) const {
        Poly result;
        for (const auto& [e, c] : terms_) {
            Poly<Rational> factor(Rational(1));
            Exp3 kept{0, 0, 0};
            for (int vi = 0; vi < 3; ++vi) {
                if (e[vi] == 0) continue;
                auto it = bindings.find(static_cast<Var>(vi));
                if (it == bindings.end()) {
                    kept[vi] = e[vi];
                } else {
                    factor = factor * pow_of(it->second, e[vi]);
                }
            }
            for (const auto& [ef, cf] : factor.terms()) {
                Exp3 eo{kept[0] + ef[0], kept[1] + ef[1], kept[2] + ef[2]};
                result.add_term(eo, c * K(cf));
            }
        }
        return result;
    }

    // Exact definite integral over `v`; bounds are polynomials in the other
    // variables (or constants) and must not contain `v`.
    Poly integrate(Var v, const Poly<Rational>& lower, const Poly<Rational>& upper) const {
        if (lower.contains(v) || upper.contains(v))
            throw Error(std::string("integration bound contains the integration variable ") + var_name(v));
        Poly anti = antiderivative(v);
        std::map<Var, Poly<Rational>> hi{{v, upper}}, lo{{v, lower}};
        return anti.substitute(hi) - anti.substitute(lo);
    }

    K evaluate(const std::map<Var, Rational>& point) const {
        K acc(Rational(0));
        for (const auto& [e, c] : terms_) {
            Rational m(1);
            for (int vi = 0; vi < 3; ++vi) {
                if (e[vi] == 0) continue;
                auto it = point.find(static_cast<Var>(vi));
                if (it == point.end())
                    throw Error(std::string("unbound variable ") + var_name(static_cast<Var>(vi)) +
                                " in evaluate");
                for (int k = 0; k < e[vi]; ++k) m *= it->second;
            }
            acc += c * K(m);
        }
        return acc;
    }

    bool operator==(const Poly& o) const { return terms_ == o.terms_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }

  private:
    static Exp3 exp_of(Var v, int e) {
        Exp3 x{0, 0, 0};
        x[static_cast<int>(v)] = e;
        return x;
    }
    static Poly<Rational> pow_of(const Poly<Rational>& p, int e) {
        Poly<Rational> r(Rational(1));
        for (int k = 0; k < e; ++k) r = r * p;
        return r;
    }
    void add_term(const Exp3& e, const K& c) {
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            if (!coeff_is_zero(c)) terms_[e] = c;
            return;
        }
        it->second += c;
        if (coeff_is_zero(it->second)) terms_.erase(it);
    }
    void sub_term(const Exp3& e, const K& c) {
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            if (!coeff_is_zero(c)) {
                K neg(Rational(0));
                neg -= c;
                terms_[e] = std::move(neg);
            }
            return;
        }
        it->second -= c;
        if (coeff_is_zero(it->second)) terms_.erase(it);
    }

    TermMap terms_;
};

using PolyQ = Poly<Rational>;
using PolyA = Poly<LinExpr>;

inline PolyA to_affine(const PolyQ& p) {
    PolyA r;
    for (const auto& [e, c] : p.terms()) r += PolyA::monomial(LinExpr(c), e);
    return r;
}

double evaluate_double(const PolyQ& p, double s, double eta = 0.0, double theta = 0.0);

std::string to_string(const PolyQ& p);

}  // namespace pistab
