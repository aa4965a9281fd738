#pragma once

// Data model for the coupled PDE-ODE system
//
//   xdot = A x + B v,          w = C x
//   zdot = A0 z + A1 z_s + A2 z_ss + B1 u
//   y    = C1 z_b + \int_a^b (Ca z + Cb z_s) ds,   Bc z_b = 0
//   [v; u] = L [w; y]
//
// together with the boundary-elimination maps that re-express (z, z_s) in
// terms of the fundamental state z_ss, and the lifted generator as a single
// PI operator acting on (x, z_ss).

#include "pistab/pi_operator.hpp"

#include <json.hpp>

#include <map>
#include <random>
#include <string>
#include <vector>

namespace pistab {

struct ODEModel {
    RatMat A;  // n_o x n_o
    RatMat B;  // n_o x m_o
    RatMat C;  // p_o x n_o
};

struct PDEModel {
    Interval iv;
    PolyMatQ A0, A1, A2;  // n_p x n_p, variable s
    PolyMatQ B1;          // n_p x m_p, variable s
    RatMat C1;            // p_p x 4 n_p
    PolyMatQ Ca, Cb;      // p_p x n_p, variable s
    RatMat Bc;            // 2 n_p x 4 n_p, full row rank

    int n_p() const { return A2.rows(); }
};

struct Interconnection {
    RatMat L;  // (m_o + m_p) x (p_o + p_p)
    int m_o = 0, p_o = 0, m_p = 0, p_p = 0;

    RatMat block(int row_block, int col_block) const;  // L1..L4 per the 2x2 partition
    RatMat L1() const { return block(0, 0); }
    RatMat L2() const { return block(0, 1); }
    RatMat L3() const { return block(1, 0); }
    RatMat L4() const { return block(1, 1); }
};

struct CoupledSystem {
    ODEModel ode;
    PDEModel pde;
    Interconnection link;

    int n_o() const { return ode.A.rows(); }
    int n_p() const { return pde.n_p(); }
    const Interval& interval() const { return pde.iv; }
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> failures;

    void fail(std::string why) {
        ok = false;
        failures.push_back(std::move(why));
    }
};

ValidationReport validate(const CoupledSystem& sys);

struct FundamentalMaps {
    RatMat Bd;                // 4n_p x 2n_p
    PolyMatQ Bf;              // 2n_p x n_p, variable eta
    PolyMatQ Ba;              // n_p x n_p, variables (s, eta)
    PolyMatQ Bb;              // n_p x n_p, variable eta
    PolyMatQ G1, G2, G3, G4;  // n_p x n_p, variables (s, eta)
    PolyMatQ C3;              // p_p x n_p, variable s
};

// Lemma-4 maps; throws ValidationError when Bc*Bd is singular (ill-posed
// boundary conditions).
FundamentalMaps build_fundamental_maps(const PDEModel& pde);

// P_{I,0,0,0,G1,G2} (which=1: reconstructs z) or P_{I,0,0,0,G3,G4}
// (which=3: reconstructs z_s), with an m-dimensional identity pass-through.
PiOpQ reconstruction_operator(const FundamentalMaps& maps, const Interval& iv, int m, int which);

// Lifted generator P_{U,V1,V2,Y,W1,W2} acting on (x, z_ss).
PiOpQ lift_dynamics(const CoupledSystem& sys, const FundamentalMaps& maps);

// col(z(a), z(b), z_s(a), z_s(b)) for a polynomial z.
RatMat boundary_vector(const PolyMatQ& z, const Interval& iv);

// Random polynomial z of the given degree with Bc z_b = 0 exactly: a random
// draw corrected by a cubic whose boundary data cancels the violation.
PolyMatQ admissible_polynomial(const RatMat& Bc, const Interval& iv, int n_p, int degree,
                               std::mt19937_64& rng);

// Named boundary condition presets ("dirichlet-dirichlet", "dirichlet-neumann",
// "neumann-dirichlet") expanded to explicit Bc matrices.
RatMat boundary_preset(const std::string& name, int n_p);

// Problem files: JSON with {interval, params?, ode:{A,B,C}, pde:{A0,A1,A2,B1,
// C1,Ca,Cb,Bc}, link:{L,dims}}. Matrix entries are numbers or polynomial
// grammar strings in s and the declared parameters.
struct ProblemFile {
    nlohmann::json raw;
    std::map<std::string, Rational> params;

    CoupledSystem build(const std::map<std::string, Rational>& overrides = {}) const;

    static ProblemFile load(const std::string& path);
    static ProblemFile from_json(const nlohmann::json& j);
};

}  // namespace pistab
