#pragma once

// Positivity cone, Lyapunov derivative and the feasibility SDP.
//
// An operator belongs to the cone Phi_{d1,d2} when its blocks admit the
// Gram-matrix form below for some T >= 0 partitioned against
// (n_o, q1*n_p, q2*n_p, q2*n_p), with Z1(s) the stacked s-monomials up to
// degree d1 (tensored with I_{n_p}) and Z2(s,eta) the stacked bivariate
// monomials of total degree <= d2:
//
//   P  = T11
//   Q1 = T12 Z1(s) + int_s^b T13 Z2(eta,s) deta + int_a^s T14 Z2(eta,s) deta
//   Q2 = Q1(s)^T
//   S  = Z1(s)^T T22 Z1(s)
//   R1 = Z1(s)^T T23 Z2(s,eta) + Z2(eta,s)^T T42 Z1(eta)
//        + int_s^b   Z2(th,s)^T T33 Z2(th,eta) dth
//        + int_eta^s Z2(th,s)^T T43 Z2(th,eta) dth
//        + int_a^eta Z2(th,s)^T T44 Z2(th,eta) dth
//   R2(s,eta) = R1(eta,s)^T
//
// Every block is affine in the entries of T, which is what lets the
// feasibility test treat T as an SDP variable via coefficient matching.

#include "pistab/sdp.hpp"
#include "pistab/system_model.hpp"

#include <optional>

namespace pistab {

struct MonomialBasis {
    int n_o = 0, n_p = 0;
    int d1 = 0, d2 = 0;
    PolyMatQ Zs;   // (q1*n_p) x n_p, monomials 1..s^d1 (x) I
    PolyMatQ Zsh;  // (q2*n_p) x n_p, bivariate monomials of total degree <= d2 (x) I

    int q1() const { return d1 + 1; }
    int q2() const { return (d2 + 1) * (d2 + 2) / 2; }
    int gram_size() const { return n_o + (q1() + 2 * q2()) * n_p; }
    std::array<int, 4> block_sizes() const { return {n_o, q1() * n_p, q2() * n_p, q2() * n_p}; }

    static MonomialBasis make(int n_o, int n_p, int d1, int d2);
};

// Bivariate monomials (s^i eta^j, i + j <= d2) in the canonical graded
// lexicographic order with s < eta; defines both Zsh and the row ordering of
// every SDP dump.
std::vector<Exp3> bivariate_monomials(int d2);

namespace detail {

template <class K>
PolyMat<K> gram_block(const PolyMat<K>& T, const std::array<int, 4>& sizes, int bi, int bj) {
    int r0 = 0, c0 = 0;
    for (int k = 0; k < bi; ++k) r0 += sizes[k];
    for (int k = 0; k < bj; ++k) c0 += sizes[k];
    PolyMat<K> out(sizes[bi], sizes[bj]);
    for (int i = 0; i < sizes[bi]; ++i)
        for (int j = 0; j < sizes[bj]; ++j) out.at(i, j) = T.at(r0 + i, c0 + j);
    return out;
}

}  // namespace detail

// Theorem-2 parametrization. T is a symmetric gram_size() x gram_size()
// matrix of constants (Rational for numeric use, LinExpr for assembly).
template <class K>
PiOp<K> phi_parametrize(const MonomialBasis& basis, const PolyMat<K>& T, const Interval& iv) {
    if (T.rows() != basis.gram_size() || T.cols() != basis.gram_size())
        throw DimensionError("Gram matrix size disagrees with the monomial basis");
    const auto sizes = basis.block_sizes();
    const PolyQ pa(iv.a), pb(iv.b);
    const PolyQ ps = PolyQ::variable(Var::s);
    const PolyQ peta = PolyQ::variable(Var::eta);
    const PolyQ pth = PolyQ::variable(Var::theta);
    const std::map<Var, PolyQ> swap_se{{Var::s, peta}, {Var::eta, ps}};
    const std::map<Var, PolyQ> s_to_eta{{Var::s, peta}};
    const std::map<Var, PolyQ> to_theta_s{{Var::s, pth}, {Var::eta, ps}};   // Z2(theta, s)
    const std::map<Var, PolyQ> s_to_theta{{Var::s, pth}};                   // Z2(theta, eta)

    PolyMat<K> z1 = [&] {
        if constexpr (std::is_same_v<K, Rational>)
            return basis.Zs;
        else
            return to_affine(basis.Zs);
    }();
    PolyMat<K> z2 = [&] {
        if constexpr (std::is_same_v<K, Rational>)
            return basis.Zsh;
        else
            return to_affine(basis.Zsh);
    }();

    PolyMat<K> z1_eta = z1.substitute(s_to_eta);
    PolyMat<K> z2_es = z2.substitute(swap_se);        // Z2(eta, s)
    PolyMat<K> z2_ts = z2.substitute(to_theta_s);     // Z2(theta, s)
    PolyMat<K> z2_te = z2.substitute(s_to_theta);     // Z2(theta, eta)
    PolyMat<K> z1t = z1.transpose();
    PolyMat<K> z2_est = z2_es.transpose();
    PolyMat<K> z2_tst = z2_ts.transpose();

    auto blk = [&](int i, int j) { return detail::gram_block(T, sizes, i, j); };

    PiOp<K> op = PiOp<K>::zero(iv, basis.n_o, basis.n_p, basis.n_o, basis.n_p);
    op.P = blk(0, 0);
    op.Q1 = blk(0, 1) * z1 + (blk(0, 2) * z2_es).integrate(Var::eta, ps, pb) +
            (blk(0, 3) * z2_es).integrate(Var::eta, pa, ps);
    op.Q2 = op.Q1.transpose();
    op.S = z1t * blk(1, 1) * z1;
    op.R1 = z1t * blk(1, 2) * z2 + z2_est * blk(3, 1) * z1_eta +
            (z2_tst * blk(2, 2) * z2_te).integrate(Var::theta, ps, pb) +
            (z2_tst * blk(3, 2) * z2_te).integrate(Var::theta, peta, ps) +
            (z2_tst * blk(3, 3) * z2_te).integrate(Var::theta, pa, peta);
    op.R2 = z1t * blk(1, 3) * z2 + z2_est * blk(2, 1) * z1_eta +
            (z2_tst * blk(2, 2) * z2_te).integrate(Var::theta, peta, pb) +
            (z2_tst * blk(2, 3) * z2_te).integrate(Var::theta, ps, peta) +
            (z2_tst * blk(3, 3) * z2_te).integrate(Var::theta, pa, ps);
    return op;
}

// Phi(T) + eps * P_{I,0,0,I,0,0}; satisfies the first Theorem-4 constraint by
// construction when T >= 0.
template <class K>
PiOp<K> lyapunov_candidate(const MonomialBasis& basis, const PolyMat<K>& T, const Interval& iv,
                           const Rational& eps) {
    if (eps <= 0) throw Error("lyapunov_candidate needs eps > 0");
    return pi_add(phi_parametrize(basis, T, iv),
                  pi_scale(eps, PiOp<K>::identity(iv, basis.n_o, basis.n_p)));
}

// Symmetrized Lyapunov derivative (I,0,0,0,G1,G2)^* x cand x dyn + adjoint.
template <class K>
PiOp<K> derivative_operator(const PiOp<K>& cand, const PiOp<K>& dyn, const FundamentalMaps& maps) {
    PiOp<K> g12 = PiOp<K>::zero(cand.iv, cand.m_out, cand.n_out, cand.m_out, cand.n_out);
    g12.P = PolyMat<K>::identity(cand.m_out);
    if constexpr (std::is_same_v<K, Rational>) {
        g12.R1 = maps.G1;
        g12.R2 = maps.G2;
    } else {
        g12.R1 = to_affine(maps.G1);
        g12.R2 = to_affine(maps.G2);
    }
    return pi_symmetrize(pi_compose(pi_adjoint(g12), pi_compose(cand, dyn)));
}

// (I,0,0,0,T1,T2) = (I,0,0,0,G1,G2)^* x (I,0,0,0,G1,G2): the squared-norm of
// (x,z) as a quadratic form in (x, z_ss).
PiOpQ norm_equivalence_operator(const FundamentalMaps& maps, const Interval& iv, int n_o);

struct AssemblyOptions {
    int d1 = 2, d2 = 2;
    Rational eps_pos = rat(1, 10000);
    Rational eps_neg = rat(1, 10000);
    // negativity-side basis degrees; -1 = derive from the actual kernel
    // degrees of the derivative operator (never structurally deficient)
    int d1_neg = -1;
    int d2_neg = -1;
};

struct AssembledSdp {
    SDPProblem problem;
    MonomialBasis lyap_basis;
    MonomialBasis neg_basis;
    AssemblyOptions options;  // with resolved d1_neg/d2_neg
};

AssembledSdp assemble_sdp(const CoupledSystem& sys, const AssemblyOptions& opts);

struct StabilityVerdict {
    enum class Status { StableCertified, UnknownInfeasible, SolverFailure };
    Status status = Status::SolverFailure;

    std::optional<PiOpQ> certificate;  // full Lyapunov operator Phi(T)+eps*I
    RatMat T_lyap;                     // certified Gram matrix (exact copy of the solver output)

    // diagnostics
    int d1 = 0, d2 = 0, d1_neg = 0, d2_neg = 0;
    Rational eps_pos, eps_neg;
    double eq_residual = 0.0;
    int iterations = 0;
    std::string solver_detail;

    bool certified() const { return status == Status::StableCertified; }
};

// Assemble-and-solve against the abstract solver contract.
StabilityVerdict solve_stability(const CoupledSystem& sys, const AssemblyOptions& opts,
                                 ConeSolver& solver);

// Sampled certificate check: positivity of the candidate quadratic form and
// negativity of the derivative form on random admissible states.
bool certificate_post_check(const CoupledSystem& sys, const StabilityVerdict& verdict, int samples,
                            std::mt19937_64& rng, std::string* why = nullptr);

}  // namespace pistab
