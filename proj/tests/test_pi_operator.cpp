#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pistab/pi_operator.hpp"
#include "pistab/serialize.hpp"
#include "test_util.hpp"

using namespace pistab;
using pistab::testing::Rng;

namespace {

const Interval UNIT{rat(0), rat(1)};

bool states_equal(const StateFunction& a, const StateFunction& b) {
    return a.x == b.x && a.z == b.z;
}

bool ops_equal(const PiOpQ& a, const PiOpQ& b) {
    return a.iv == b.iv && a.m_out == b.m_out && a.n_out == b.n_out && a.m_in == b.m_in &&
           a.n_in == b.n_in && a.P == b.P && a.Q1 == b.Q1 && a.Q2 == b.Q2 && a.S == b.S && a.R1 == b.R1 &&
           a.R2 == b.R2;
}

bool is_self_adjoint(const PiOpQ& op) { return ops_equal(op, pi_adjoint(op)); }

void check_no_theta(const PiOpQ& op) {
    for (const auto* m : {&op.P, &op.Q1, &op.Q2, &op.S, &op.R1, &op.R2}) CHECK(!m->contains(Var::theta));
}

// <u, T v> evaluated purely by nested numeric quadrature of the defining
// formula; independent of the closed-form integration path.
double inner_product_quadrature(const StateFunction& u, const PiOpQ& op, const StateFunction& v) {
    double a = to_double(op.iv.a), b = to_double(op.iv.b);
    auto zs = [&](const PolyMatQ& z, int i, double s) { return evaluate_double(z.at(i, 0), s); };

    double acc = 0.0;
    for (int i = 0; i < op.m_out; ++i) {
        double xi = 0.0;
        for (int j = 0; j < op.m_in; ++j)
            xi += evaluate_double(op.P.at(i, j), 0) * to_double(v.x.at(j, 0));
        for (int j = 0; j < op.n_in; ++j)
            xi += testing::adaptive_simpson(
                [&](double s) { return evaluate_double(op.Q1.at(i, j), s) * zs(v.z, j, s); }, a, b, 1e-12);
        acc += to_double(u.x.at(i, 0)) * xi;
    }
    for (int i = 0; i < op.n_out; ++i) {
        auto tz_i = [&](double s) {
            double val = 0.0;
            for (int j = 0; j < op.m_in; ++j)
                val += evaluate_double(op.Q2.at(i, j), s) * to_double(v.x.at(j, 0));
            for (int j = 0; j < op.n_in; ++j) {
                val += evaluate_double(op.S.at(i, j), s) * zs(v.z, j, s);
                val += testing::adaptive_simpson(
                    [&](double eta) { return evaluate_double(op.R1.at(i, j), s, eta) * zs(v.z, j, eta); }, a,
                    s, 1e-12);
                val += testing::adaptive_simpson(
                    [&](double eta) { return evaluate_double(op.R2.at(i, j), s, eta) * zs(v.z, j, eta); }, s,
                    b, 1e-12);
            }
            return val;
        };
        acc += testing::adaptive_simpson([&](double s) { return zs(u.z, i, s) * tz_i(s); }, a, b, 1e-11);
    }
    return acc;
}

}  // namespace

TEST_CASE("apply: identity and single-block examples") {
    Rng rng(31);
    PiOpQ id = PiOpQ::identity(UNIT, 2, 2);
    for (int trial = 0; trial < 5; ++trial) {
        StateFunction v = testing::rand_state(rng, 2, 2, 3);
        CHECK(states_equal(pi_apply(id, v), v));
    }

    // P=0, Q1=1 on z = s integrates to 1/2.
    PiOpQ q = PiOpQ::zero(UNIT, 1, 1, 1, 1);
    q.Q1.at(0, 0) = PolyQ(rat(1));
    StateFunction v;
    v.x = RatMat(1, 1);
    v.z = PolyMatQ(1, 1);
    v.z.at(0, 0) = PolyQ::variable(Var::s);
    CHECK(pi_apply(q, v).x.at(0, 0) == rat(1, 2));

    // R1 = R2 = 1 applied to z = 1 gives s + (1-s) = 1.
    PiOpQ r = PiOpQ::zero(UNIT, 1, 1, 1, 1);
    r.R1.at(0, 0) = PolyQ(rat(1));
    r.R2.at(0, 0) = PolyQ(rat(1));
    StateFunction ones;
    ones.x = RatMat(1, 1);
    ones.z = PolyMatQ(1, 1);
    ones.z.at(0, 0) = PolyQ(rat(1));
    CHECK(pi_apply(r, ones).z.at(0, 0) == PolyQ(rat(1)));

    StateFunction wrong = testing::rand_state(rng, 3, 1, 1);
    CHECK_THROWS_AS(pi_apply(q, wrong), DimensionError);
}

TEST_CASE("compose: identity and multiplier-only cases") {
    Rng rng(37);
    for (int trial = 0; trial < 10; ++trial) {
        PiOpQ x = testing::rand_piop(rng, UNIT, 2, 1, 1, 2, 2);
        PiOpQ idl = PiOpQ::identity(UNIT, 2, 1);
        PiOpQ idr = PiOpQ::identity(UNIT, 1, 2);
        CHECK(ops_equal(pi_compose(idl, x), x));
        CHECK(ops_equal(pi_compose(x, idr), x));
    }

    // Multiplier-only operands compose to S^ = D(s) S(s), everything else zero.
    PiOpQ d = PiOpQ::zero(UNIT, 1, 1, 1, 1);
    d.S.at(0, 0) = PolyQ::variable(Var::s).scaled(rat(2)) + PolyQ(rat(1));
    PiOpQ s = PiOpQ::zero(UNIT, 1, 1, 1, 1);
    s.S.at(0, 0) = PolyQ::variable(Var::s) + PolyQ(rat(2));
    PiOpQ prod = pi_compose(d, s);
    CHECK(prod.S.at(0, 0) == d.S.at(0, 0) * s.S.at(0, 0));
    CHECK(prod.P.is_zero());
    CHECK(prod.Q1.is_zero());
    CHECK(prod.Q2.is_zero());
    CHECK(prod.R1.is_zero());
    CHECK(prod.R2.is_zero());

    PiOpQ mismatched = PiOpQ::zero({rat(0), rat(2)}, 1, 1, 1, 1);
    CHECK_THROWS_AS(pi_compose(d, mismatched), ValidationError);
}

TEST_CASE("compose agrees with application order on random instances") {
    Rng rng(41);
    int count = 0;
    for (int trial = 0; trial < 50; ++trial) {
        int m0 = 1 + trial % 2, n0 = 1 + (trial / 2) % 2;
        int m1 = 1 + (trial / 4) % 2, n1 = 1 + (trial / 8) % 2;
        int m2 = 1 + (trial / 16) % 2, n2 = 1;
        PiOpQ a = testing::rand_piop(rng, UNIT, m2, n2, m1, n1, 3);
        PiOpQ b = testing::rand_piop(rng, UNIT, m1, n1, m0, n0, 3);
        StateFunction v = testing::rand_state(rng, m0, n0, 3);
        StateFunction direct = pi_apply(a, pi_apply(b, v));
        StateFunction composed = pi_apply(pi_compose(a, b), v);
        CHECK(states_equal(direct, composed));
        check_no_theta(pi_compose(a, b));
        ++count;
    }
    CHECK(count == 50);
}

TEST_CASE("adjoint examples") {
    PiOpQ id = PiOpQ::identity(UNIT, 2, 1);
    CHECK(ops_equal(pi_adjoint(id), id));

    Rng rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        PiOpQ sym = pi_symmetrize(testing::rand_piop(rng, UNIT, 2, 2, 2, 2, 2));
        CHECK(is_self_adjoint(sym));
    }
}

TEST_CASE("adjoint satisfies the inner product identity exactly") {
    Rng rng(47);
    int count = 0;
    for (int trial = 0; trial < 50; ++trial) {
        int m_in = 1 + trial % 2, n_in = 1 + (trial / 2) % 2;
        int m_out = 1 + (trial / 4) % 2, n_out = 1 + (trial / 8) % 2;
        PiOpQ t = testing::rand_piop(rng, UNIT, m_out, n_out, m_in, n_in, 2);
        StateFunction u = testing::rand_state(rng, m_out, n_out, 3);
        StateFunction v = testing::rand_state(rng, m_in, n_in, 3);
        Rational lhs = state_inner(u, pi_apply(t, v), UNIT);
        Rational rhs = state_inner(pi_apply(pi_adjoint(t), u), v, UNIT);
        CHECK(lhs == rhs);
        ++count;
    }
    CHECK(count == 50);
}

TEST_CASE("linear combinations") {
    Rng rng(53);
    PiOpQ a = testing::rand_piop(rng, UNIT, 2, 1, 2, 1, 2);
    PiOpQ zero = pi_add(a, pi_scale(rat(-1), a));
    CHECK(zero.P.is_zero());
    CHECK(zero.Q1.is_zero());
    CHECK(zero.Q2.is_zero());
    CHECK(zero.S.is_zero());
    CHECK(zero.R1.is_zero());
    CHECK(zero.R2.is_zero());

    PiOpQ twice = pi_scale(rat(2), PiOpQ::identity(UNIT, 1, 1));
    StateFunction v = testing::rand_state(rng, 1, 1, 2);
    StateFunction w = pi_apply(twice, v);
    CHECK(w.x.at(0, 0) == v.x.at(0, 0) * 2);
    CHECK(w.z.at(0, 0) == v.z.at(0, 0).scaled(rat(2)));

    PiOpQ square = testing::rand_piop(rng, UNIT, 2, 2, 2, 2, 2);
    CHECK(is_self_adjoint(pi_add(square, pi_adjoint(square))));
}

TEST_CASE("symmetrize") {
    PiOpQ rect = PiOpQ::zero(UNIT, 2, 1, 1, 2);
    PiOpQ zsym = pi_symmetrize(PiOpQ::zero(UNIT, 2, 2, 2, 2));
    CHECK(zsym.P.is_zero());
    CHECK(zsym.S.is_zero());
    CHECK_THROWS_AS(pi_symmetrize(rect), DimensionError);

    // Skew constant part cancels.
    PiOpQ skew = PiOpQ::zero(UNIT, 2, 1, 2, 1);
    skew.P.at(0, 1) = PolyQ(rat(1));
    skew.P.at(1, 0) = PolyQ(rat(-1));
    CHECK(pi_symmetrize(skew).P.is_zero());

    Rng rng(59);
    PiOpQ sym = pi_symmetrize(testing::rand_piop(rng, UNIT, 1, 2, 1, 2, 2));
    CHECK(is_self_adjoint(sym));
}

TEST_CASE("inner product examples") {
    StateFunction v;
    v.x = RatMat(1, 1);
    v.x.at(0, 0) = rat(1);
    v.z = PolyMatQ(1, 1);
    v.z.at(0, 0) = PolyQ(rat(1));
    PiOpQ id = PiOpQ::identity(UNIT, 1, 1);
    CHECK(inner_product(v, id, v) == rat(2));

    PiOpQ zero = PiOpQ::zero(UNIT, 1, 1, 1, 1);
    CHECK(inner_product(v, zero, v) == rat(0));
}

TEST_CASE("inner product matches nested quadrature") {
    Rng rng(61);
    int count = 0;
    for (int trial = 0; trial < 100; ++trial) {
        PiOpQ t = testing::rand_piop(rng, UNIT, 1, 1, 1, 1, 2);
        StateFunction u = testing::rand_state(rng, 1, 1, 2);
        StateFunction v = testing::rand_state(rng, 1, 1, 2);
        double exact = to_double(inner_product(u, t, v));
        double numeric = inner_product_quadrature(u, t, v);
        double scale = std::max(1.0, std::abs(exact));
        CHECK(std::abs(exact - numeric) / scale < 1e-10);
        ++count;
    }
    CHECK(count == 100);
}

TEST_CASE("composition is associative") {
    Rng rng(67);
    for (int trial = 0; trial < 12; ++trial) {
        PiOpQ a = testing::rand_piop(rng, UNIT, 1, 2, 2, 1, 2);
        PiOpQ b = testing::rand_piop(rng, UNIT, 2, 1, 1, 2, 2);
        PiOpQ c = testing::rand_piop(rng, UNIT, 1, 2, 2, 2, 2);
        CHECK(ops_equal(pi_compose(pi_compose(a, b), c), pi_compose(a, pi_compose(b, c))));
    }
}

TEST_CASE("adjoint involution and contravariance") {
    Rng rng(71);
    for (int trial = 0; trial < 25; ++trial) {
        PiOpQ a = testing::rand_piop(rng, UNIT, 2, 1, 1, 2, 2);
        PiOpQ b = testing::rand_piop(rng, UNIT, 1, 2, 2, 1, 2);
        CHECK(ops_equal(pi_adjoint(pi_adjoint(a)), a));
        CHECK(ops_equal(pi_adjoint(pi_compose(a, b)), pi_compose(pi_adjoint(b), pi_adjoint(a))));
    }
}

TEST_CASE("zero-dimensional blocks flow through every operation") {
    PiOpQ a = PiOpQ::zero(UNIT, 1, 0, 0, 1);  // maps L2 only input to R only output
    a.Q1 = PolyMatQ(1, 1);
    a.Q1.at(0, 0) = PolyQ::variable(Var::s);
    a.validate();

    PiOpQ b = PiOpQ::zero(UNIT, 0, 1, 1, 0);
    b.Q2 = PolyMatQ(1, 1);
    b.Q2.at(0, 0) = PolyQ(rat(3));
    b.validate();

    PiOpQ ab = pi_compose(a, b);
    CHECK(ab.m_out == 1);
    CHECK(ab.n_out == 0);
    CHECK(ab.m_in == 1);
    CHECK(ab.n_in == 0);
    // P^ = int_0^1 s * 3 ds = 3/2
    CHECK(ab.P.at(0, 0) == PolyQ(rat(3, 2)));

    StateFunction v;
    v.x = RatMat(1, 1);
    v.x.at(0, 0) = rat(2);
    v.z = PolyMatQ(0, 1);
    StateFunction w = pi_apply(ab, v);
    CHECK(w.x.at(0, 0) == rat(3));
    CHECK(w.z.rows() == 0);

    CHECK(ops_equal(pi_adjoint(pi_adjoint(ab)), ab));
}

TEST_CASE("JSON serialization round-trips exactly") {
    Rng rng(73);
    for (int trial = 0; trial < 10; ++trial) {
        PiOpQ op = testing::rand_piop(rng, {rat(-1, 2), rat(3, 2)}, 2, 1, 1, 2, 3);
        nlohmann::json j = pi_to_json(op);
        PiOpQ back = pi_from_json(j);
        CHECK(ops_equal(op, back));
    }

    PiOpQ empty = PiOpQ::zero(UNIT, 1, 0, 0, 1);
    CHECK(ops_equal(pi_from_json(pi_to_json(empty)), empty));
}
