#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pistab/system_model.hpp"
#include "test_util.hpp"

using namespace pistab;
using pistab::testing::Rng;

namespace {

const Interval UNIT{rat(0), rat(1)};

using pistab::testing::column_derivative;
using pistab::testing::direct_dynamics_rhs;

CoupledSystem load_fixture(const std::string& name) {
    return ProblemFile::load(std::string(FIXTURE_DIR) + "/" + name).build();
}

}  // namespace

TEST_CASE("validate: boundary-condition rank checks") {
    CoupledSystem sys = load_fixture("toy_bidirectional.json");
    CHECK(validate(sys).ok);

    // duplicated rows: rank deficient
    CoupledSystem broken = sys;
    broken.pde.Bc = RatMat::from_rows({{rat(1), rat(0), rat(0), rat(0)}, {rat(1), rat(0), rat(0), rat(0)}});
    ValidationReport r1 = validate(broken);
    CHECK(!r1.ok);
    REQUIRE(!r1.failures.empty());
    CHECK(r1.failures[0].find("rank") != std::string::npos);

    // Neumann-Neumann: Bc*Bd = [0 1; 0 1] is singular
    CoupledSystem nn = sys;
    nn.pde.Bc = RatMat::from_rows({{rat(0), rat(0), rat(1), rat(0)}, {rat(0), rat(0), rat(0), rat(1)}});
    RatMat bd = RatMat::from_rows({{rat(1), rat(0)}, {rat(1), rat(1)}, {rat(0), rat(1)}, {rat(0), rat(1)}});
    RatMat prod = nn.pde.Bc * bd;
    CHECK(prod == RatMat::from_rows({{rat(0), rat(1)}, {rat(0), rat(1)}}));
    ValidationReport r2 = validate(nn);
    CHECK(!r2.ok);
    bool mentions_bcbd = false;
    for (const auto& f : r2.failures)
        if (f.find("Bc*Bd") != std::string::npos) mentions_bcbd = true;
    CHECK(mentions_bcbd);
}

TEST_CASE("fundamental maps for Dirichlet-Dirichlet on [0,1]") {
    PDEModel pde;
    pde.iv = UNIT;
    pde.A0 = PolyMatQ(1, 1);
    pde.A1 = PolyMatQ(1, 1);
    pde.A2 = PolyMatQ::identity(1);
    pde.B1 = PolyMatQ(1, 0);
    pde.C1 = RatMat(0, 4);
    pde.Ca = PolyMatQ(0, 1);
    pde.Cb = PolyMatQ(0, 1);
    pde.Bc = boundary_preset("dirichlet-dirichlet", 1);

    FundamentalMaps maps = build_fundamental_maps(pde);

    const PolyQ S = PolyQ::variable(Var::s);
    const PolyQ ETA = PolyQ::variable(Var::eta);
    PolyQ one(rat(1));

    CHECK(maps.Bf.at(0, 0).is_zero());
    CHECK(maps.Bf.at(1, 0) == one - ETA);
    CHECK(maps.Ba.at(0, 0) == -(S * (one - ETA)));
    CHECK(maps.G1.at(0, 0) == -(S * (one - ETA)) + (S - ETA));
    CHECK(maps.G2.at(0, 0) == maps.Ba.at(0, 0));

    // Constant fundamental state reconstructs z = c*s*(s-1)/2.
    PiOpQ recon = reconstruction_operator(maps, UNIT, 0, 1);
    StateFunction v;
    v.x = RatMat(0, 1);
    v.z = PolyMatQ(1, 1);
    v.z.at(0, 0) = PolyQ(rat(3));
    StateFunction w = pi_apply(recon, v);
    PolyQ expect = (S * S - S).scaled(rat(3, 2));
    CHECK(w.z.at(0, 0) == expect);
    CHECK(expect.evaluate({{Var::s, rat(0)}}) == rat(0));
    CHECK(expect.evaluate({{Var::s, rat(1)}}) == rat(0));
    CHECK(expect.derivative(Var::s).derivative(Var::s) == PolyQ(rat(3)));
}

TEST_CASE("Lemma 4 reconstruction identity across boundary presets") {
    Rng rng(101);
    for (const char* preset : {"dirichlet-dirichlet", "dirichlet-neumann", "neumann-dirichlet"}) {
        RatMat bc = boundary_preset(preset, 1);
        PDEModel pde;
        pde.iv = UNIT;
        pde.A0 = PolyMatQ(1, 1);
        pde.A1 = PolyMatQ(1, 1);
        pde.A2 = PolyMatQ::identity(1);
        pde.B1 = PolyMatQ(1, 0);
        pde.C1 = RatMat(0, 4);
        pde.Ca = PolyMatQ(0, 1);
        pde.Cb = PolyMatQ(0, 1);
        pde.Bc = bc;
        FundamentalMaps maps = build_fundamental_maps(pde);
        PiOpQ recon_z = reconstruction_operator(maps, UNIT, 1, 1);
        PiOpQ recon_zs = reconstruction_operator(maps, UNIT, 1, 3);

        for (int trial = 0; trial < 15; ++trial) {
            PolyMatQ z = admissible_polynomial(bc, UNIT, 1, 3 + trial % 4, rng);
            CHECK((bc * boundary_vector(z, UNIT)).is_zero());
            PolyMatQ zs = column_derivative(z);
            PolyMatQ zss = column_derivative(zs);
            StateFunction in;
            in.x = testing::rand_ratmat(rng, 1, 1);
            in.z = zss;
            StateFunction rec = pi_apply(recon_z, in);
            CHECK(rec.x == in.x);
            CHECK(rec.z == z);
            StateFunction recs = pi_apply(recon_zs, in);
            CHECK(recs.z == zs);
        }
    }
}

TEST_CASE("heat actuator fixture: boundary maps and reconstruction") {
    CoupledSystem sys = load_fixture("heat_actuator.json");
    CHECK(sys.n_o() == 1);
    CHECK(sys.n_p() == 1);
    CHECK(sys.link.m_o == 1);
    CHECK(sys.link.p_p == 1);
    CHECK(sys.pde.Bc ==
          RatMat::from_rows({{rat(0), rat(0), rat(1), rat(0)}, {rat(0), rat(1), rat(0), rat(0)}}));
    CHECK(validate(sys).ok);

    FundamentalMaps maps = build_fundamental_maps(sys.pde);
    Rng rng(103);
    PiOpQ recon = reconstruction_operator(maps, UNIT, 1, 1);
    for (int trial = 0; trial < 10; ++trial) {
        PolyMatQ z = admissible_polynomial(sys.pde.Bc, UNIT, 1, 5, rng);
        PolyMatQ zss = column_derivative(column_derivative(z));
        StateFunction in{testing::rand_ratmat(rng, 1, 1), zss};
        CHECK(pi_apply(recon, in).z == z);
    }
}

TEST_CASE("C3 turns the boundary output into a fundamental-state integral") {
    Rng rng(107);
    for (const char* fixture : {"heat_actuator.json", "toy_bidirectional.json"}) {
        CoupledSystem sys = load_fixture(fixture);
        FundamentalMaps maps = build_fundamental_maps(sys.pde);
        for (int trial = 0; trial < 10; ++trial) {
            PolyMatQ z = admissible_polynomial(sys.pde.Bc, UNIT, sys.n_p(), 4 + trial % 3, rng);
            PolyMatQ zss = column_derivative(column_derivative(z));
            RatMat lhs = evaluate((maps.C3 * zss).integrate(Var::s, PolyQ(rat(0)), PolyQ(rat(1))), {});
            RatMat rhs = sys.pde.C1 * boundary_vector(z, UNIT);
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("lifted dynamics: pure ODE degenerates to the closed-loop matrix") {
    CoupledSystem sys = load_fixture("ode_stable.json");
    CHECK(validate(sys).ok);
    FundamentalMaps maps = build_fundamental_maps(sys.pde);
    PiOpQ lifted = lift_dynamics(sys, maps);
    CHECK(lifted.m_out == 1);
    CHECK(lifted.n_out == 0);
    CHECK(lifted.P.at(0, 0) == PolyQ(rat(-1)));
}

TEST_CASE("lifted dynamics agrees with direct evaluation of the model") {
    Rng rng(109);
    for (const char* fixture :
         {"heat_actuator.json", "diffusion_reaction_dd.json", "toy_bidirectional.json"}) {
        CAPTURE(fixture);
        CoupledSystem sys = load_fixture(fixture);
        REQUIRE(validate(sys).ok);
        FundamentalMaps maps = build_fundamental_maps(sys.pde);
        PiOpQ lifted = lift_dynamics(sys, maps);

        for (int trial = 0; trial < 8; ++trial) {
            PolyMatQ z = admissible_polynomial(sys.pde.Bc, UNIT, sys.n_p(), 4 + trial % 3, rng);
            RatMat x = testing::rand_ratmat(rng, sys.n_o(), 1);
            PolyMatQ zss = column_derivative(column_derivative(z));

            StateFunction expected = direct_dynamics_rhs(sys, x, z);
            StateFunction got = pi_apply(lifted, StateFunction{x, zss});
            CHECK(got.x == expected.x);
            CHECK(got.z == expected.z);
        }
    }
}

TEST_CASE("problem files: parameters, presets and errors") {
    ProblemFile pf = ProblemFile::load(std::string(FIXTURE_DIR) + "/diffusion_reaction_dd.json");
    CHECK(pf.params.at("lambda") == rat(9));
    CoupledSystem at9 = pf.build();
    CHECK(at9.pde.A0.at(0, 0) == PolyQ(rat(9)));
    CoupledSystem at12 = pf.build({{"lambda", rat(12)}});
    CHECK(at12.pde.A0.at(0, 0) == PolyQ(rat(12)));
    CHECK_THROWS_AS(pf.build({{"mu", rat(1)}}), ParseError);

    CHECK(boundary_preset("dirichlet-dirichlet", 2).rows() == 4);
    CHECK_THROWS_AS(boundary_preset("free-free", 1), ParseError);
    CHECK_THROWS_AS(ProblemFile::load("/nonexistent/file.json"), ParseError);

    nlohmann::json bad = pf.raw;
    bad.erase("interval");
    CHECK_THROWS_AS(ProblemFile::from_json(bad).build(), ParseError);

    // decimal ODE entries are held exactly
    CHECK(at9.ode.A.at(0, 0) == rational_from_string("-1.2142"));
}
