#pragma once

// Dense matrices of Poly<K>. Zero-row/zero-column shapes are first-class:
// they carry the empty signal blocks of degenerate interconnections and must
// flow through every operation.

#include "pistab/poly.hpp"

#include <vector>

namespace pistab {

template <class K>
class PolyMat {
  public:
    PolyMat() : rows_(0), cols_(0) {}
    PolyMat(int rows, int cols) : rows_(rows), cols_(cols), e_(static_cast<size_t>(rows) * cols) {
        if (rows < 0 || cols < 0) throw DimensionError("negative matrix dimension");
    }

    static PolyMat identity(int n) {
        PolyMat m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = Poly<K>(K(Rational(1)));
        return m;
    }
    static PolyMat from_rational(const RatMat& r) {
        PolyMat m(r.rows(), r.cols());
        for (int i = 0; i < r.rows(); ++i)
            for (int j = 0; j < r.cols(); ++j)
                if (r.at(i, j) != 0) m.at(i, j) = Poly<K>(K(r.at(i, j)));
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Poly<K>& at(int i, int j) {
        check_index(i, j);
        return e_[static_cast<size_t>(i) * cols_ + j];
    }
    const Poly<K>& at(int i, int j) const {
        check_index(i, j);
        return e_[static_cast<size_t>(i) * cols_ + j];
    }

    PolyMat& operator+=(const PolyMat& o) {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("polynomial matrix sum shape mismatch");
        for (size_t k = 0; k < e_.size(); ++k) e_[k] += o.e_[k];
        return *this;
    }
    PolyMat& operator-=(const PolyMat& o) {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw DimensionError("polynomial matrix difference shape mismatch");
        for (size_t k = 0; k < e_.size(); ++k) e_[k] -= o.e_[k];
        return *this;
    }
    friend PolyMat operator+(PolyMat a, const PolyMat& b) { return a += b; }
    friend PolyMat operator-(PolyMat a, const PolyMat& b) { return a -= b; }
    PolyMat operator-() const {
        PolyMat m(rows_, cols_);
        for (size_t k = 0; k < e_.size(); ++k) m.e_[k] = -e_[k];
        return m;
    }

    friend PolyMat operator*(const PolyMat& a, const PolyMat& b) {
        if (a.cols_ != b.rows_) throw DimensionError("polynomial matrix product shape mismatch");
        PolyMat m(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                const Poly<K>& aik = a.at(i, k);
                if (aik.is_zero()) continue;
                for (int j = 0; j < b.cols_; ++j) {
                    if (b.at(k, j).is_zero()) continue;
                    m.at(i, j) += aik * b.at(k, j);
                }
            }
        return m;
    }

    PolyMat scaled(const Rational& c) const {
        PolyMat m(rows_, cols_);
        for (size_t k = 0; k < e_.size(); ++k) m.e_[k] = e_[k].scaled(c);
        return m;
    }

    PolyMat transpose() const {
        PolyMat m(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) m.at(j, i) = at(i, j);
        return m;
    }

    PolyMat substitute(const std::map<Var, Poly<Rational>>& bindings) const {
        PolyMat m(rows_, cols_);
        for (size_t k = 0; k < e_.size(); ++k) m.e_[k] = e_[k].substitute(bindings);
        return m;
    }

    PolyMat integrate(Var v, const Poly<Rational>& lower, const Poly<Rational>& upper) const {
        PolyMat m(rows_, cols_);
        for (size_t k = 0; k < e_.size(); ++k) m.e_[k] = e_[k].integrate(v, lower, upper);
        return m;
    }

    bool contains(Var v) const {
        for (const auto& p : e_)
            if (p.contains(v)) return true;
        return false;
    }
    bool is_zero() const {
        for (const auto& p : e_)
            if (!p.is_zero()) return false;
        return true;
    }
    int degree(Var v) const {
        int d = -1;
        for (const auto& p : e_) d = std::max(d, p.degree(v));
        return d;
    }
    int total_degree() const {
        int d = -1;
        for (const auto& p : e_) d = std::max(d, p.total_degree());
        return d;
    }

    bool operator==(const PolyMat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_; }
    bool operator!=(const PolyMat& o) const { return !(*this == o); }

  private:
    void check_index(int i, int j) const {
        if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw DimensionError("matrix index out of range");
    }
    int rows_, cols_;
    std::vector<Poly<K>> e_;
};

using PolyMatQ = PolyMat<Rational>;
using PolyMatA = PolyMat<LinExpr>;

template <class K>
PolyMat<K> hcat(const PolyMat<K>& l, const PolyMat<K>& r) {
    if (l.rows() != r.rows()) throw DimensionError("hcat row mismatch");
    PolyMat<K> m(l.rows(), l.cols() + r.cols());
    for (int i = 0; i < l.rows(); ++i) {
        for (int j = 0; j < l.cols(); ++j) m.at(i, j) = l.at(i, j);
        for (int j = 0; j < r.cols(); ++j) m.at(i, l.cols() + j) = r.at(i, j);
    }
    return m;
}

template <class K>
PolyMat<K> vcat(const PolyMat<K>& t, const PolyMat<K>& b) {
    if (t.cols() != b.cols()) throw DimensionError("vcat column mismatch");
    PolyMat<K> m(t.rows() + b.rows(), t.cols());
    for (int i = 0; i < t.rows(); ++i)
        for (int j = 0; j < t.cols(); ++j) m.at(i, j) = t.at(i, j);
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) m.at(t.rows() + i, j) = b.at(i, j);
    return m;
}

inline PolyMatA to_affine(const PolyMatQ& p) {
    PolyMatA m(p.rows(), p.cols());
    for (int i = 0; i < p.rows(); ++i)
        for (int j = 0; j < p.cols(); ++j) m.at(i, j) = to_affine(p.at(i, j));
    return m;
}

// Exact evaluation of a fully-bound matrix.
inline RatMat evaluate(const PolyMatQ& p, const std::map<Var, Rational>& point) {
    RatMat r(p.rows(), p.cols());
    for (int i = 0; i < p.rows(); ++i)
        for (int j = 0; j < p.cols(); ++j) r.at(i, j) = p.at(i, j).evaluate(point);
    return r;
}

}  // namespace pistab
