#include "pistab/pi_operator.hpp"

namespace pistab {

StateFunction pi_apply(const PiOpQ& op, const StateFunction& v) {
    if (v.m() != op.m_in || v.n() != op.n_in) throw DimensionError("pi_apply state dimension mismatch");
    if (v.x.cols() != 1 || v.z.cols() != 1) throw DimensionError("state parts must be column vectors");
    if (v.z.contains(Var::eta) || v.z.contains(Var::theta))
        throw ValidationError("state L21 part must be a polynomial in s only");

    const PolyQ pa(op.iv.a), pb(op.iv.b);
    const PolyQ ps = PolyQ::variable(Var::s);
    const std::map<Var, PolyQ> s_to_eta{{Var::s, PolyQ::variable(Var::eta)}};

    PolyMatQ x_poly = PolyMatQ::from_rational(v.x);
    PolyMatQ z_eta = v.z.substitute(s_to_eta);

    StateFunction out;
    PolyMatQ x_out = op.P * x_poly + (op.Q1 * v.z).integrate(Var::s, pa, pb);
    out.x = evaluate(x_out, {});
    out.z = op.Q2 * x_poly + op.S * v.z + (op.R1 * z_eta).integrate(Var::eta, pa, ps) +
            (op.R2 * z_eta).integrate(Var::eta, ps, pb);
    return out;
}

Rational state_inner(const StateFunction& u, const StateFunction& v, const Interval& iv) {
    if (u.m() != v.m() || u.n() != v.n()) throw DimensionError("state inner product dimension mismatch");
    Rational acc(0);
    for (int i = 0; i < u.m(); ++i) acc += u.x.at(i, 0) * v.x.at(i, 0);
    PolyMatQ prod = u.z.transpose() * v.z;  // 1x1 (or 0x0 when n = 0)
    if (prod.rows() == 1) {
        PolyQ integrated = prod.at(0, 0).integrate(Var::s, PolyQ(iv.a), PolyQ(iv.b));
        acc += integrated.evaluate({});
    }
    return acc;
}

Rational inner_product(const StateFunction& u, const PiOpQ& op, const StateFunction& v) {
    if (u.m() != op.m_out || u.n() != op.n_out) throw DimensionError("inner_product left state mismatch");
    StateFunction w = pi_apply(op, v);
    return state_inner(u, w, op.iv);
}

}  // namespace pistab
