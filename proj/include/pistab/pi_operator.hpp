#pragma once

// The six-block partial-integral operator class on R^m x L2^n[a,b]:
//
//   (T [x; z])(s) = [ P x + \int_a^b Q1(s) z(s) ds
//                     Q2(s) x + S(s) z(s) + \int_a^s R1(s,eta) z(eta) deta
//                                         + \int_s^b R2(s,eta) z(eta) deta ]
//
// with polynomial blocks. Composition and adjoint are closed-form polynomial
// identities; everything here is exact.

#include "pistab/polymat.hpp"

#include <string>

namespace pistab {

struct Interval {
    Rational a, b;
    bool operator==(const Interval& o) const { return a == o.a && b == o.b; }
};

template <class K>
struct PiOp {
    Interval iv;
    int m_out = 0, n_out = 0, m_in = 0, n_in = 0;
    PolyMat<K> P, Q1, Q2, S, R1, R2;

    static PiOp zero(Interval iv, int m_out, int n_out, int m_in, int n_in) {
        PiOp op;
        op.iv = iv;
        op.m_out = m_out;
        op.n_out = n_out;
        op.m_in = m_in;
        op.n_in = n_in;
        op.P = PolyMat<K>(m_out, m_in);
        op.Q1 = PolyMat<K>(m_out, n_in);
        op.Q2 = PolyMat<K>(n_out, m_in);
        op.S = PolyMat<K>(n_out, n_in);
        op.R1 = PolyMat<K>(n_out, n_in);
        op.R2 = PolyMat<K>(n_out, n_in);
        return op;
    }

    static PiOp identity(Interval iv, int m, int n) {
        PiOp op = zero(iv, m, n, m, n);
        op.P = PolyMat<K>::identity(m);
        op.S = PolyMat<K>::identity(n);
        return op;
    }

    bool square() const { return m_out == m_in && n_out == n_in; }

    void validate() const {
        if (iv.a >= iv.b) throw ValidationError("operator interval must satisfy a < b");
        auto shape = [](const PolyMat<K>& m, int r, int c, const char* name) {
            if (m.rows() != r || m.cols() != c)
                throw DimensionError(std::string("block ") + name + " has wrong shape");
        };
        shape(P, m_out, m_in, "P");
        shape(Q1, m_out, n_in, "Q1");
        shape(Q2, n_out, m_in, "Q2");
        shape(S, n_out, n_in, "S");
        shape(R1, n_out, n_in, "R1");
        shape(R2, n_out, n_in, "R2");
        if (P.contains(Var::s) || P.contains(Var::eta)) throw ValidationError("P block must be constant");
        for (const auto* m : {&Q1, &Q2, &S})
            if (m->contains(Var::eta)) throw ValidationError("multiplier blocks admit only the variable s");
        for (const auto* m : {&P, &Q1, &Q2, &S, &R1, &R2})
            if (m->contains(Var::theta)) throw ValidationError("theta must not appear in stored kernels");
    }
};

using PiOpQ = PiOp<Rational>;
using PiOpA = PiOp<LinExpr>;

inline PiOpA to_affine(const PiOpQ& op) {
    PiOpA r;
    r.iv = op.iv;
    r.m_out = op.m_out;
    r.n_out = op.n_out;
    r.m_in = op.m_in;
    r.n_in = op.n_in;
    r.P = to_affine(op.P);
    r.Q1 = to_affine(op.Q1);
    r.Q2 = to_affine(op.Q2);
    r.S = to_affine(op.S);
    r.R1 = to_affine(op.R1);
    r.R2 = to_affine(op.R2);
    return r;
}

// A test/state vector col(x, z) with a polynomial L2 part.
struct StateFunction {
    RatMat x;    // m x 1
    PolyMatQ z;  // n x 1, variable s only

    int m() const { return x.rows(); }
    int n() const { return z.rows(); }
};

namespace detail {

template <class K>
void require_same_interval(const PiOp<K>& a, const PiOp<K>& b) {
    if (!(a.iv == b.iv)) throw ValidationError("operators live on different intervals");
}

}  // namespace detail

template <class K>
PiOp<K> pi_add(const PiOp<K>& a, const PiOp<K>& b) {
    detail::require_same_interval(a, b);
    if (a.m_out != b.m_out || a.n_out != b.n_out || a.m_in != b.m_in || a.n_in != b.n_in)
        throw DimensionError("operator sum dimension mismatch");
    PiOp<K> r = a;
    r.P += b.P;
    r.Q1 += b.Q1;
    r.Q2 += b.Q2;
    r.S += b.S;
    r.R1 += b.R1;
    r.R2 += b.R2;
    return r;
}

template <class K>
PiOp<K> pi_scale(const Rational& c, const PiOp<K>& a) {
    PiOp<K> r = a;
    r.P = a.P.scaled(c);
    r.Q1 = a.Q1.scaled(c);
    r.Q2 = a.Q2.scaled(c);
    r.S = a.S.scaled(c);
    r.R1 = a.R1.scaled(c);
    r.R2 = a.R2.scaled(c);
    return r;
}

template <class K>
PiOp<K> pi_adjoint(const PiOp<K>& op) {
    const std::map<Var, PolyQ> swap_se{{Var::s, PolyQ::variable(Var::eta)}, {Var::eta, PolyQ::variable(Var::s)}};
    PiOp<K> r;
    r.iv = op.iv;
    r.m_out = op.m_in;
    r.n_out = op.n_in;
    r.m_in = op.m_out;
    r.n_in = op.n_out;
    r.P = op.P.transpose();
    r.Q1 = op.Q2.transpose();
    r.Q2 = op.Q1.transpose();
    r.S = op.S.transpose();
    r.R1 = op.R2.substitute(swap_se).transpose();
    r.R2 = op.R1.substitute(swap_se).transpose();
    return r;
}

template <class K>
PiOp<K> pi_symmetrize(const PiOp<K>& op) {
    if (!op.square()) throw DimensionError("symmetrize requires a square operator");
    return pi_add(op, pi_adjoint(op));
}

// Composition (outer after inner): every theta integral is evaluated in
// closed form, so the result is again a plain six-block operator.
template <class K>
PiOp<K> pi_compose(const PiOp<K>& outer, const PiOp<K>& inner) {
    detail::require_same_interval(outer, inner);
    if (outer.m_in != inner.m_out || outer.n_in != inner.n_out)
        throw DimensionError("operator composition dimension mismatch");

    const PolyQ pa(outer.iv.a), pb(outer.iv.b);
    const PolyQ ps = PolyQ::variable(Var::s);
    const PolyQ peta = PolyQ::variable(Var::eta);
    const std::map<Var, PolyQ> s_to_eta{{Var::s, peta}};
    const std::map<Var, PolyQ> s_to_theta{{Var::s, PolyQ::variable(Var::theta)}};
    const std::map<Var, PolyQ> eta_to_theta{{Var::eta, PolyQ::variable(Var::theta)}};
    const std::map<Var, PolyQ> swap_se{{Var::s, peta}, {Var::eta, ps}};

    PiOp<K> r = PiOp<K>::zero(outer.iv, outer.m_out, outer.n_out, inner.m_in, inner.n_in);

    // P^ = A P + \int_a^b B1(s) Q2(s) ds
    r.P = outer.P * inner.P + (outer.Q1 * inner.Q2).integrate(Var::s, pa, pb);

    // Q1^(s) = A Q1(s) + B1(s) S(s) + \int_s^b B1(eta) R1(eta,s) deta
    //                               + \int_a^s B1(eta) R2(eta,s) deta
    {
        PolyMat<K> q1_eta = outer.Q1.substitute(s_to_eta);
        r.Q1 = outer.P * inner.Q1 + outer.Q1 * inner.S +
               (q1_eta * inner.R1.substitute(swap_se)).integrate(Var::eta, ps, pb) +
               (q1_eta * inner.R2.substitute(swap_se)).integrate(Var::eta, pa, ps);
    }

    // Q2^(s) = B2(s) P + D(s) Q2(s) + \int_a^s C1(s,eta) Q2(eta) deta
    //                               + \int_s^b C2(s,eta) Q2(eta) deta
    {
        PolyMat<K> q2_eta = inner.Q2.substitute(s_to_eta);
        r.Q2 = outer.Q2 * inner.P + outer.S * inner.Q2 +
               (outer.R1 * q2_eta).integrate(Var::eta, pa, ps) +
               (outer.R2 * q2_eta).integrate(Var::eta, ps, pb);
    }

    // S^(s) = D(s) S(s)
    r.S = outer.S * inner.S;

    // Kernel pieces shared by R1^ and R2^.
    PolyMat<K> b2q1 = outer.Q2 * inner.Q1.substitute(s_to_eta);              // B2(s) Q1(eta)
    PolyMat<K> c1_st = outer.R1.substitute(eta_to_theta);                    // C1(s,theta)
    PolyMat<K> c2_st = outer.R2.substitute(eta_to_theta);                    // C2(s,theta)
    PolyMat<K> r1_te = inner.R1.substitute(s_to_theta);                      // R1(theta,eta)
    PolyMat<K> r2_te = inner.R2.substitute(s_to_theta);                      // R2(theta,eta)
    PolyMat<K> s_eta = inner.S.substitute(s_to_eta);                         // S(eta)

    // R1^(s,eta) = B2(s)Q1(eta) + D(s)R1(s,eta) + C1(s,eta)S(eta)
    //   + \int_a^eta C1(s,th)R2(th,eta) dth + \int_eta^s C1(s,th)R1(th,eta) dth
    //   + \int_s^b C2(s,th)R1(th,eta) dth
    r.R1 = b2q1 + outer.S * inner.R1 + outer.R1 * s_eta +
           (c1_st * r2_te).integrate(Var::theta, pa, peta) +
           (c1_st * r1_te).integrate(Var::theta, peta, ps) +
           (c2_st * r1_te).integrate(Var::theta, ps, pb);

    // R2^(s,eta) = B2(s)Q1(eta) + D(s)R2(s,eta) + C2(s,eta)S(eta)
    //   + \int_a^s C1(s,th)R2(th,eta) dth + \int_s^eta C2(s,th)R2(th,eta) dth
    //   + \int_eta^b C2(s,th)R1(th,eta) dth
    r.R2 = b2q1 + outer.S * inner.R2 + outer.R2 * s_eta +
           (c1_st * r2_te).integrate(Var::theta, pa, ps) +
           (c2_st * r2_te).integrate(Var::theta, ps, peta) +
           (c2_st * r1_te).integrate(Var::theta, peta, pb);

    return r;
}

// Exact application to a polynomial state.
StateFunction pi_apply(const PiOpQ& op, const StateFunction& v);

// <u, T v>_X computed by exact integration.
Rational inner_product(const StateFunction& u, const PiOpQ& op, const StateFunction& v);

// <u, v>_X and the induced squared norm.
Rational state_inner(const StateFunction& u, const StateFunction& v, const Interval& iv);
inline Rational state_norm_sq(const StateFunction& v, const Interval& iv) { return state_inner(v, v, iv); }

}  // namespace pistab
