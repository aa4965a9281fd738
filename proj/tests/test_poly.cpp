#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pistab/poly_parser.hpp"
#include "pistab/polymat.hpp"
#include "test_util.hpp"

using namespace pistab;
using pistab::testing::Rng;

namespace {
const PolyQ S = PolyQ::variable(Var::s);
const PolyQ ETA = PolyQ::variable(Var::eta);
const PolyQ THETA = PolyQ::variable(Var::theta);
}  // namespace

TEST_CASE("rational parsing is exact") {
    CHECK(rational_from_string("0.5") == rat(1, 2));
    CHECK(rational_from_string("-1/3") == rat(-1, 3));
    CHECK(rational_from_string("2") == rat(2));
    CHECK(rational_from_string("1.5e-3") == rat(3, 2000));
    CHECK(rational_from_string("  7/14 ") == rat(1, 2));
    CHECK_THROWS_AS(rational_from_string("1/0"), ParseError);
    CHECK_THROWS_AS(rational_from_string(""), ParseError);
}

TEST_CASE("matrix addition") {
    PolyMatQ a(1, 1), b(1, 1);
    a.at(0, 0) = S;
    b.at(0, 0) = -S;
    CHECK((a + b).is_zero());

    PolyMatQ c(1, 1), d(1, 1);
    c.at(0, 0) = S * ETA;
    d.at(0, 0) = PolyQ(rat(1));
    PolyQ expect = S * ETA + PolyQ(rat(1));
    CHECK((c + d).at(0, 0) == expect);

    PolyMatQ e0(0, 0);
    CHECK((e0 + e0).rows() == 0);
    CHECK((e0 + e0).cols() == 0);

    PolyMatQ wrong(2, 1);
    CHECK_THROWS_AS(a + wrong, DimensionError);
}

TEST_CASE("matrix product") {
    PolyMatQ a(1, 1), b(1, 1);
    a.at(0, 0) = S;
    b.at(0, 0) = ETA;
    CHECK((a * b).at(0, 0) == S * ETA);

    Rng rng(7);
    PolyMatQ m = testing::rand_polymat(rng, 2, 3, {Var::s}, 2);
    CHECK(PolyMatQ::identity(2) * m == m);

    PolyMatQ row(1, 2), col(2, 1);
    row.at(0, 0) = PolyQ(rat(1));
    row.at(0, 1) = S;
    col.at(0, 0) = PolyQ(rat(1));
    col.at(1, 0) = S;
    CHECK((row * col).at(0, 0) == PolyQ(rat(1)) + S * S);

    PolyMatQ bad(3, 1);
    CHECK_THROWS_AS(row * bad, DimensionError);
}

TEST_CASE("definite integrals in closed form") {
    // int_0^1 s ds = 1/2
    PolyQ one_half = S.integrate(Var::s, PolyQ(rat(0)), PolyQ(rat(1)));
    CHECK(one_half == PolyQ(rat(1, 2)));

    // int_eta^s theta dtheta = (s^2 - eta^2)/2
    PolyQ seg = THETA.integrate(Var::theta, ETA, S);
    CHECK(seg == (S * S - ETA * ETA).scaled(rat(1, 2)));

    // int_s^b 1 dtheta on [0,1] = 1 - s   (hand antiderivative)
    PolyQ tail = PolyQ(rat(1)).integrate(Var::theta, S, PolyQ(rat(1)));
    CHECK(tail == PolyQ(rat(1)) - S);

    // bounds containing the integration variable are rejected
    CHECK_THROWS_AS(THETA.integrate(Var::theta, THETA, PolyQ(rat(1))), Error);
}

TEST_CASE("substitution") {
    std::map<Var, PolyQ> swap{{Var::s, ETA}, {Var::eta, S}};
    CHECK((S - ETA).substitute(swap) == ETA - S);

    std::map<Var, PolyQ> s0{{Var::s, PolyQ(rat(0))}};
    CHECK((S * S).substitute(s0).is_zero());

    std::map<Var, PolyQ> eta_s{{Var::eta, S}};
    CHECK((S * ETA).substitute(eta_s) == S * S);
}

TEST_CASE("evaluation") {
    std::map<Var, Rational> pt{{Var::s, rat(1, 2)}, {Var::eta, rat(1, 4)}};
    CHECK((S + ETA).evaluate(pt) == rat(3, 4));

    PolyMatQ empty(0, 0);
    RatMat num = evaluate(empty, {});
    CHECK(num.rows() == 0);
    CHECK(num.cols() == 0);

    PolyQ p = (S * S - S).scaled(rat(1, 2));
    CHECK(p.evaluate({{Var::s, rat(1, 2)}}) == rat(-1, 8));

    CHECK_THROWS_AS((S + ETA).evaluate({{Var::s, rat(1)}}), Error);
}

TEST_CASE("segment additivity of integrals") {
    Rng rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        PolyQ p = testing::rand_poly(rng, {Var::s, Var::eta, Var::theta}, 4);
        PolyQ l(testing::rand_rational(rng)), u(testing::rand_rational(rng)), w(testing::rand_rational(rng));
        PolyQ lhs = p.integrate(Var::theta, l, u) + p.integrate(Var::theta, u, w);
        PolyQ rhs = p.integrate(Var::theta, l, w);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("differentiate-back recovers the integrand") {
    Rng rng(13);
    for (int trial = 0; trial < 60; ++trial) {
        PolyQ p = testing::rand_poly(rng, {Var::s, Var::eta}, 6);
        for (Var v : {Var::s, Var::eta}) {
            CHECK(p.antiderivative(v).derivative(v) == p);
        }
    }
}

TEST_CASE("closed-form integrals match adaptive quadrature") {
    Rng rng(17);
    int checked = 0;
    for (int trial = 0; trial < 110; ++trial) {
        PolyQ p = testing::rand_poly(rng, {Var::s, Var::theta}, 5);
        Rational c1 = testing::rand_rational(rng, 2, 2);
        Rational c2 = c1 + rat(1 + trial % 3);
        PolyQ exact = p.integrate(Var::theta, PolyQ(c1), PolyQ(c2));
        double s_val = 0.37;
        double numeric = testing::adaptive_simpson(
            [&](double th) { return evaluate_double(p, s_val, 0.0, th); }, to_double(c1), to_double(c2),
            1e-13);
        double closed = evaluate_double(exact, s_val);
        double scale = std::max(1.0, std::abs(closed));
        CHECK(std::abs(closed - numeric) / scale < 1e-10);
        ++checked;
    }
    CHECK(checked >= 100);
}

TEST_CASE("ring axioms hold exactly") {
    Rng rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        PolyQ a = testing::rand_poly(rng, {Var::s, Var::eta}, 3);
        PolyQ b = testing::rand_poly(rng, {Var::s, Var::eta}, 3);
        PolyQ c = testing::rand_poly(rng, {Var::s, Var::eta}, 3);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
    }
}

TEST_CASE("polynomial text grammar") {
    PolyQ p = parse_poly("0.5*s^2 - 1/3*s + 2");
    PolyQ expect = (S * S).scaled(rat(1, 2)) - S.scaled(rat(1, 3)) + PolyQ(rat(2));
    CHECK(p == expect);

    CHECK(parse_poly("-s") == -S);
    CHECK(parse_poly("(1 - s)*(1 + s)") == PolyQ(rat(1)) - S * S);
    CHECK(parse_poly("2*s*eta^2") == (S * ETA * ETA).scaled(rat(2)));

    PolyGrammar g;
    g.parameters["lambda"] = rat(9);
    CHECK(parse_poly("lambda", g) == PolyQ(rat(9)));
    CHECK(parse_poly("lambda*s", g) == S.scaled(rat(9)));

    CHECK_THROWS_AS(parse_poly("q + 1"), ParseError);
    CHECK_THROWS_AS(parse_poly("s +"), ParseError);
    CHECK_THROWS_AS(parse_poly("theta"), ParseError);
}

TEST_CASE("printing round-trips through the parser") {
    Rng rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        PolyQ p = testing::rand_poly(rng, {Var::s, Var::eta}, 4);
        CHECK(parse_poly(to_string(p)) == p);
    }
    CHECK(to_string(PolyQ()) == "0");
}

TEST_CASE("exact rational linear algebra") {
    RatMat m = RatMat::from_rows({{rat(1), rat(0)}, {rat(1), rat(1)}});
    RatMat inv = inverse(m);
    CHECK(inv * m == RatMat::identity(2));
    CHECK(rank(m) == 2);

    RatMat sing = RatMat::from_rows({{rat(1), rat(2)}, {rat(2), rat(4)}});
    CHECK(rank(sing) == 1);
    CHECK_THROWS_AS(inverse(sing), ValidationError);
}
