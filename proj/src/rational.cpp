#include "pistab/rational.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace pistab {

namespace {

bool is_digits(std::string_view t) {
    if (t.empty()) return false;
    for (char c : t)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

// "12", "12.5" -> exact rational; exponent applied by the caller.
Rational parse_decimal(std::string_view t) {
    auto dot = t.find('.');
    std::string intpart, fracpart;
    if (dot == std::string_view::npos) {
        intpart = std::string(t);
    } else {
        intpart = std::string(t.substr(0, dot));
        fracpart = std::string(t.substr(dot + 1));
    }
    if (intpart.empty()) intpart = "0";
    if (!is_digits(intpart) || (!fracpart.empty() && !is_digits(fracpart)))
        throw ParseError("invalid numeric literal: '" + std::string(t) + "'");
    mpz_class num(intpart);
    mpz_class den(1);
    for (char c : fracpart) {
        num = num * 10 + (c - '0');
        den *= 10;
    }
    Rational q(num, den);
    q.canonicalize();
    return q;
}

}  // namespace

Rational rational_from_string(std::string_view text) {
    size_t b = 0, e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    std::string_view t = text.substr(b, e - b);
    if (t.empty()) throw ParseError("empty numeric literal");

    bool neg = false;
    if (t[0] == '+' || t[0] == '-') {
        neg = (t[0] == '-');
        t.remove_prefix(1);
    }
    if (t.empty()) throw ParseError("empty numeric literal");

    // fraction form p/q
    if (auto slash = t.find('/'); slash != std::string_view::npos) {
        Rational num = parse_decimal(t.substr(0, slash));
        Rational den = parse_decimal(t.substr(slash + 1));
        if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
        Rational q = num / den;
        return neg ? Rational(-q) : q;
    }

    // decimal with optional exponent
    long exp10 = 0;
    if (auto ep = t.find_first_of("eE"); ep != std::string_view::npos) {
        std::string es(t.substr(ep + 1));
        t = t.substr(0, ep);
        try {
            size_t used = 0;
            exp10 = std::stol(es, &used);
            if (used != es.size()) throw std::invalid_argument(es);
        } catch (const std::exception&) {
            throw ParseError("invalid exponent in '" + std::string(text) + "'");
        }
    }
    Rational q = parse_decimal(t);
    if (exp10 != 0) {
        mpz_class pow10(1);
        for (long i = 0; i < std::labs(exp10); ++i) pow10 *= 10;
        if (exp10 > 0)
            q *= Rational(pow10);
        else
            q /= Rational(pow10);
    }
    return neg ? Rational(-q) : q;
}

Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw Error("non-finite double cannot become a rational");
    Rational q;
    mpq_set_d(q.get_mpq_t(), x);
    return q;
}

std::string to_string(const Rational& q) {
    std::ostringstream os;
    os << q;
    return os.str();
}

RatMat RatMat::identity(int n) {
    RatMat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

RatMat RatMat::from_rows(std::initializer_list<std::initializer_list<Rational>> rows) {
    int r = static_cast<int>(rows.size());
    int c = r == 0 ? 0 : static_cast<int>(rows.begin()->size());
    RatMat m(r, c);
    int i = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != c) throw DimensionError("ragged initializer rows");
        int j = 0;
        for (const auto& v : row) m.at(i, j++) = v;
        ++i;
    }
    return m;
}

RatMat RatMat::operator+(const RatMat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("matrix sum shape mismatch");
    RatMat r(rows_, cols_);
    for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] + o.a_[k];
    return r;
}

RatMat RatMat::operator-(const RatMat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("matrix difference shape mismatch");
    RatMat r(rows_, cols_);
    for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] - o.a_[k];
    return r;
}

RatMat RatMat::operator*(const RatMat& o) const {
    if (cols_ != o.rows_) throw DimensionError("matrix product shape mismatch");
    RatMat r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const Rational& aik = at(i, k);
            if (aik == 0) continue;
            for (int j = 0; j < o.cols_; ++j) r.at(i, j) += aik * o.at(k, j);
        }
    return r;
}

RatMat RatMat::scaled(const Rational& c) const {
    RatMat r(rows_, cols_);
    for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] * c;
    return r;
}

RatMat RatMat::transpose() const {
    RatMat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
}

bool RatMat::is_zero() const {
    for (const auto& v : a_)
        if (v != 0) return false;
    return true;
}

bool RatMat::is_symmetric() const {
    if (rows_ != cols_) return false;
    for (int i = 0; i < rows_; ++i)
        for (int j = i + 1; j < cols_; ++j)
            if (at(i, j) != at(j, i)) return false;
    return true;
}

RatMat hcat(const RatMat& l, const RatMat& r) {
    if (l.rows() != r.rows()) throw DimensionError("hcat row mismatch");
    RatMat m(l.rows(), l.cols() + r.cols());
    for (int i = 0; i < l.rows(); ++i) {
        for (int j = 0; j < l.cols(); ++j) m.at(i, j) = l.at(i, j);
        for (int j = 0; j < r.cols(); ++j) m.at(i, l.cols() + j) = r.at(i, j);
    }
    return m;
}

RatMat vcat(const RatMat& t, const RatMat& b) {
    if (t.cols() != b.cols()) throw DimensionError("vcat column mismatch");
    RatMat m(t.rows() + b.rows(), t.cols());
    for (int i = 0; i < t.rows(); ++i)
        for (int j = 0; j < t.cols(); ++j) m.at(i, j) = t.at(i, j);
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) m.at(t.rows() + i, j) = b.at(i, j);
    return m;
}

RatMat inverse(const RatMat& m) {
    if (m.rows() != m.cols()) throw DimensionError("inverse of non-square matrix");
    int n = m.rows();
    RatMat a = m;
    RatMat inv = RatMat::identity(n);
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r)
            if (a.at(r, col) != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) throw ValidationError("singular matrix");
        if (pivot != col)
            for (int j = 0; j < n; ++j) {
                std::swap(a.at(pivot, j), a.at(col, j));
                std::swap(inv.at(pivot, j), inv.at(col, j));
            }
        Rational p = a.at(col, col);
        for (int j = 0; j < n; ++j) {
            a.at(col, j) /= p;
            inv.at(col, j) /= p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            Rational f = a.at(r, col);
            if (f == 0) continue;
            for (int j = 0; j < n; ++j) {
                a.at(r, j) -= f * a.at(col, j);
                inv.at(r, j) -= f * inv.at(col, j);
            }
        }
    }
    return inv;
}

RatMat solve_particular(const RatMat& a, const RatMat& rhs) {
    if (a.rows() != rhs.rows()) throw DimensionError("solve_particular shape mismatch");
    int m = a.rows(), n = a.cols(), k = rhs.cols();
    RatMat aug = hcat(a, rhs);
    std::vector<int> pivot_col;
    int r = 0;
    for (int col = 0; col < n && r < m; ++col) {
        int pivot = -1;
        for (int i = r; i < m; ++i)
            if (aug.at(i, col) != 0) {
                pivot = i;
                break;
            }
        if (pivot < 0) continue;
        if (pivot != r)
            for (int j = 0; j < n + k; ++j) std::swap(aug.at(pivot, j), aug.at(r, j));
        Rational p = aug.at(r, col);
        for (int j = 0; j < n + k; ++j) aug.at(r, j) /= p;
        for (int i = 0; i < m; ++i) {
            if (i == r) continue;
            Rational f = aug.at(i, col);
            if (f == 0) continue;
            for (int j = 0; j < n + k; ++j) aug.at(i, j) -= f * aug.at(r, j);
        }
        pivot_col.push_back(col);
        ++r;
    }
    for (int i = r; i < m; ++i)
        for (int j = 0; j < k; ++j)
            if (aug.at(i, n + j) != 0) throw ValidationError("inconsistent linear system");
    RatMat x(n, k);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < k; ++j) x.at(pivot_col[i], j) = aug.at(i, n + j);
    return x;
}

int rank(RatMat m) {
    int r = 0;
    for (int col = 0; col < m.cols() && r < m.rows(); ++col) {
        int pivot = -1;
        for (int i = r; i < m.rows(); ++i)
            if (m.at(i, col) != 0) {
                pivot = i;
                break;
            }
        if (pivot < 0) continue;
        if (pivot != r)
            for (int j = 0; j < m.cols(); ++j) std::swap(m.at(pivot, j), m.at(r, j));
        Rational p = m.at(r, col);
        for (int i = r + 1; i < m.rows(); ++i) {
            Rational f = m.at(i, col) / p;
            if (f == 0) continue;
            for (int j = col; j < m.cols(); ++j) m.at(i, j) -= f * m.at(r, j);
        }
        ++r;
    }
    return r;
}

}  // namespace pistab
