#pragma once

// Exact rational scalars (GMP mpq) and small dense rational matrices.
// All symbolic kernel algebra runs on these; doubles appear only at the
// solver boundary.

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pistab {

using Rational = mpq_class;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionError : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};
struct ValidationError : Error {
    using Error::Error;
};
struct SolverError : Error {
    using Error::Error;
};

inline Rational rat(long num, long den = 1) {
    if (den == 0) throw Error("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// Accepts integers ("7"), fractions ("-2/3") and decimals ("0.25", "1.5e-3"),
// all converted exactly.
Rational rational_from_string(std::string_view text);

// Exact conversion; every finite double is a dyadic rational.
Rational rational_from_double(double x);

inline double to_double(const Rational& q) { return q.get_d(); }

std::string to_string(const Rational& q);

// Dense row-major rational matrix. 0xk shapes are legal and represent the
// empty blocks written "[ ]" in problem data.
class RatMat {
  public:
    RatMat() : rows_(0), cols_(0) {}
    RatMat(int rows, int cols)
        : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, Rational(0)) {
        if (rows < 0 || cols < 0) throw DimensionError("negative matrix dimension");
    }

    static RatMat identity(int n);
    static RatMat from_rows(std::initializer_list<std::initializer_list<Rational>> rows);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty_shape() const { return rows_ == 0 || cols_ == 0; }

    Rational& at(int i, int j) {
        check_index(i, j);
        return a_[static_cast<size_t>(i) * cols_ + j];
    }
    const Rational& at(int i, int j) const {
        check_index(i, j);
        return a_[static_cast<size_t>(i) * cols_ + j];
    }

    RatMat operator+(const RatMat& o) const;
    RatMat operator-(const RatMat& o) const;
    RatMat operator*(const RatMat& o) const;
    RatMat scaled(const Rational& c) const;
    RatMat transpose() const;

    bool operator==(const RatMat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

    bool is_zero() const;
    bool is_symmetric() const;

  private:
    void check_index(int i, int j) const {
        if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw DimensionError("matrix index out of range");
    }
    int rows_, cols_;
    std::vector<Rational> a_;
};

RatMat hcat(const RatMat& l, const RatMat& r);
RatMat vcat(const RatMat& t, const RatMat& b);

// Exact Gauss-Jordan; throws ValidationError on a singular input.
RatMat inverse(const RatMat& m);

// Exact row rank.
int rank(RatMat m);

// One exact solution of A x = rhs (free variables set to zero); throws
// ValidationError when the system is inconsistent.
RatMat solve_particular(const RatMat& a, const RatMat& rhs);

}  // namespace pistab
