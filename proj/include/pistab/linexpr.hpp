#pragma once

// Affine forms  c0 + sum_k c_k * x_k  over SDP unknowns, with exact rational
// coefficients. The LMI assembly runs the whole operator pipeline on
// polynomials whose coefficients are LinExpr, so every monomial coefficient
// of the final operator identity is one affine equality row.
//
// Products are guarded: at most one factor may depend on unknowns. The
// assembly only ever multiplies an affine operator by a constant one, so a
// quadratic product indicates a programming error, not user input.

#include "pistab/rational.hpp"

#include <map>

namespace pistab {

class LinExpr {
  public:
    LinExpr() : constant_(0) {}
    LinExpr(const Rational& c) : constant_(c) {}  // NOLINT: implicit by design
    LinExpr(long c) : constant_(rat(c)) {}        // NOLINT

    static LinExpr variable(int id, const Rational& coeff = Rational(1)) {
        LinExpr e;
        if (coeff != 0) e.coeffs_[id] = coeff;
        return e;
    }

    bool is_constant() const { return coeffs_.empty(); }
    bool is_zero() const { return constant_ == 0 && coeffs_.empty(); }
    const Rational& constant() const { return constant_; }
    const std::map<int, Rational>& coefficients() const { return coeffs_; }

    LinExpr& operator+=(const LinExpr& o) {
        constant_ += o.constant_;
        for (const auto& [id, c] : o.coeffs_) add_coeff(id, c);
        return *this;
    }
    LinExpr& operator-=(const LinExpr& o) {
        constant_ -= o.constant_;
        for (const auto& [id, c] : o.coeffs_) add_coeff(id, -c);
        return *this;
    }
    friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
    friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
    LinExpr operator-() const {
        LinExpr e;
        e.constant_ = -constant_;
        for (const auto& [id, c] : coeffs_) e.coeffs_[id] = -c;
        return e;
    }

    LinExpr& operator*=(const Rational& c) {
        if (c == 0) {
            constant_ = 0;
            coeffs_.clear();
            return *this;
        }
        constant_ *= c;
        for (auto& [id, v] : coeffs_) v *= c;
        return *this;
    }
    LinExpr& operator/=(const Rational& c) {
        if (c == 0) throw Error("affine form divided by zero");
        constant_ /= c;
        for (auto& [id, v] : coeffs_) v /= c;
        return *this;
    }

    friend LinExpr operator*(const LinExpr& a, const LinExpr& b) {
        if (!a.is_constant() && !b.is_constant())
            throw Error("product of two non-constant affine forms (assembly would become quadratic)");
        if (a.is_constant()) {
            LinExpr r = b;
            r *= a.constant_;
            return r;
        }
        LinExpr r = a;
        r *= b.constant_;
        return r;
    }

    bool operator==(const LinExpr& o) const { return constant_ == o.constant_ && coeffs_ == o.coeffs_; }

  private:
    void add_coeff(int id, const Rational& c) {
        auto it = coeffs_.find(id);
        if (it == coeffs_.end()) {
            if (c != 0) coeffs_[id] = c;
            return;
        }
        it->second += c;
        if (it->second == 0) coeffs_.erase(it);
    }

    Rational constant_;
    std::map<int, Rational> coeffs_;
};

}  // namespace pistab
