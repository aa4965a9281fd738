#include "pistab/lmi.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace pistab {

std::vector<Exp3> bivariate_monomials(int d2) {
    std::vector<Exp3> out;
    for (int g = 0; g <= d2; ++g)
        for (int j = 0; j <= g; ++j) out.push_back(Exp3{g - j, j, 0});
    return out;
}

MonomialBasis MonomialBasis::make(int n_o, int n_p, int d1, int d2) {
    if (d1 < 0 || d2 < 0) throw Error("monomial basis degrees must be non-negative");
    MonomialBasis b;
    b.n_o = n_o;
    b.n_p = n_p;
    b.d1 = d1;
    b.d2 = d2;
    b.Zs = PolyMatQ((d1 + 1) * n_p, n_p);
    for (int k = 0; k <= d1; ++k)
        for (int i = 0; i < n_p; ++i)
            b.Zs.at(k * n_p + i, i) = PolyQ::monomial(rat(1), Exp3{k, 0, 0});
    auto monos = bivariate_monomials(d2);
    b.Zsh = PolyMatQ(static_cast<int>(monos.size()) * n_p, n_p);
    for (size_t k = 0; k < monos.size(); ++k)
        for (int i = 0; i < n_p; ++i)
            b.Zsh.at(static_cast<int>(k) * n_p + i, i) = PolyQ::monomial(rat(1), monos[k]);
    return b;
}

PiOpQ norm_equivalence_operator(const FundamentalMaps& maps, const Interval& iv, int n_o) {
    PiOpQ g12 = reconstruction_operator(maps, iv, n_o, 1);
    return pi_compose(pi_adjoint(g12), g12);
}

namespace {

// Symmetric matrix of affine unknowns; entry (i,j), i <= j, is variable
// base + tri_index(i,j).
PolyMatA symmetric_unknowns(int dim, int base) {
    PolyMatA t(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            PolyA cell = PolyA::constant(LinExpr::variable(base + SDPProblem::tri_index(dim, i, j)));
            t.at(i, j) = cell;
            t.at(j, i) = cell;
        }
    return t;
}

struct RowEmitter {
    SDPProblem& problem;
    int neg_var_base;

    void emit(const PolyMatA& block, const std::string& name, bool upper_only) {
        for (int i = 0; i < block.rows(); ++i)
            for (int j = upper_only ? i : 0; j < block.cols(); ++j)
                for (const auto& [exp, coeff] : block.at(i, j).terms()) emit_row(name, i, j, exp, coeff);
    }

    void emit_row(const std::string& name, int i, int j, const Exp3& exp, const LinExpr& coeff) {
        bool touches_neg = false;
        for (const auto& [var, c] : coeff.coefficients())
            if (var >= neg_var_base) touches_neg = true;
        if (!touches_neg) {
            if (coeff.is_zero()) return;
            std::ostringstream os;
            os << "degree deficiency: block " << name << " entry (" << i << "," << j << ") monomial s^"
               << exp[0] << "*eta^" << exp[1]
               << " cannot be produced by the negativity-side basis; raise --d1-neg/--d2-neg";
            throw ValidationError(os.str());
        }
        int row = problem.num_rows();
        for (const auto& [var, c] : coeff.coefficients())
            problem.triplets.push_back({row, var, to_double(c)});
        problem.rhs.push_back(to_double(-coeff.constant()));
        std::ostringstream label;
        label << name << "[" << i << "," << j << "] s^" << exp[0] << " eta^" << exp[1];
        problem.row_labels.push_back(label.str());
    }
};

struct SupportStats {
    int max_min = 0;   // max over monomials of min(deg_s, deg_eta)
    int max_total = 0; // max total degree
};

SupportStats kernel_support(const PolyMatA& m) {
    SupportStats st;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            for (const auto& [exp, coeff] : m.at(i, j).terms()) {
                st.max_min = std::max(st.max_min, std::min(exp[0], exp[1]));
                st.max_total = std::max(st.max_total, exp[0] + exp[1]);
            }
    return st;
}

}  // namespace

AssembledSdp assemble_sdp(const CoupledSystem& sys, const AssemblyOptions& opts) {
    ValidationReport report = validate(sys);
    if (!report.ok) {
        std::string why = "system fails validation:";
        for (const auto& f : report.failures) why += "\n  - " + f;
        throw ValidationError(why);
    }
    if (opts.eps_pos <= 0 || opts.eps_neg <= 0) throw Error("eps values must be positive");

    const Interval& iv = sys.interval();
    const int n_o = sys.n_o(), n_p = sys.n_p();

    FundamentalMaps maps = build_fundamental_maps(sys.pde);
    PiOpQ dyn = lift_dynamics(sys, maps);
    PiOpQ norm_op = norm_equivalence_operator(maps, iv, n_o);

    MonomialBasis lyap_basis = MonomialBasis::make(n_o, n_p, opts.d1, opts.d2);
    const int lyap_dim = lyap_basis.gram_size();
    const int lyap_vars = lyap_dim * (lyap_dim + 1) / 2;

    PolyMatA t_lyap = symmetric_unknowns(lyap_basis.gram_size(), 0);
    PiOpA cand = lyapunov_candidate(lyap_basis, t_lyap, iv, opts.eps_pos);
    PiOpA deriv = derivative_operator(cand, to_affine(dyn), maps);
    PiOpA rhs_op = pi_add(deriv, to_affine(pi_scale(opts.eps_neg, norm_op)));

    // Negativity-side degrees: the paper never fixes them, so derive from the
    // kernel degrees actually present in the derivative operator (plus the
    // configured slack rule) unless the caller pinned them.
    int kmax = 0;
    for (const auto* m : {&dyn.Q1, &dyn.Q2, &dyn.S, &dyn.R1, &dyn.R2})
        kmax = std::max(kmax, m->total_degree());
    SupportStats r_support = kernel_support(rhs_op.R1);
    int deg_q = std::max(rhs_op.Q1.degree(Var::s), 0);
    int deg_s = std::max(rhs_op.S.degree(Var::s), 0);

    int d1n = opts.d1_neg, d2n = opts.d2_neg;
    if (d1n < 0 || d2n < 0) {
        d2n = std::max(opts.d2 + kmax + 1, r_support.max_min);
        d1n = std::max({opts.d1 + kmax + 1, deg_q, (deg_s + 1) / 2, r_support.max_total - d2n});
    }

    MonomialBasis neg_basis = MonomialBasis::make(n_o, n_p, d1n, d2n);
    PolyMatA t_neg = symmetric_unknowns(neg_basis.gram_size(), lyap_vars);
    PiOpA phi_neg = phi_parametrize(neg_basis, t_neg, iv);

    //  Phi(T_neg) + D + eps*(I,0,0,0,T1,T2) = 0, matched coefficient by
    //  coefficient; the mirror blocks Q2/R2 are transposes of emitted ones.
    PiOpA residual = pi_add(phi_neg, rhs_op);

    AssembledSdp out;
    out.lyap_basis = lyap_basis;
    out.neg_basis = neg_basis;
    out.options = opts;
    out.options.d1_neg = d1n;
    out.options.d2_neg = d2n;
    out.problem.blocks.push_back({"T_lyap", lyap_basis.gram_size()});
    out.problem.blocks.push_back({"T_neg", neg_basis.gram_size()});

    RowEmitter emitter{out.problem, lyap_vars};
    emitter.emit(residual.P, "P", true);
    emitter.emit(residual.Q1, "Q1", false);
    emitter.emit(residual.S, "S", true);
    emitter.emit(residual.R1, "R1", false);

    std::stable_sort(out.problem.triplets.begin(), out.problem.triplets.end(),
                     [](const SdpTriplet& a, const SdpTriplet& b) {
                         return a.row != b.row ? a.row < b.row : a.var < b.var;
                     });
    return out;
}

StabilityVerdict solve_stability(const CoupledSystem& sys, const AssemblyOptions& opts,
                                 ConeSolver& solver) {
    AssembledSdp assembled = assemble_sdp(sys, opts);
    StabilityVerdict verdict;
    verdict.d1 = assembled.options.d1;
    verdict.d2 = assembled.options.d2;
    verdict.d1_neg = assembled.options.d1_neg;
    verdict.d2_neg = assembled.options.d2_neg;
    verdict.eps_pos = assembled.options.eps_pos;
    verdict.eps_neg = assembled.options.eps_neg;

    ConeSolveResult result;
    try {
        result = solver.solve(assembled.problem);
    } catch (const std::exception& e) {
        verdict.status = StabilityVerdict::Status::SolverFailure;
        verdict.solver_detail = e.what();
        return verdict;
    }
    verdict.eq_residual = result.eq_residual;
    verdict.iterations = result.iterations;
    verdict.solver_detail = result.detail;

    switch (result.status) {
        case ConeSolveResult::Status::Feasible: {
            const int dim = assembled.lyap_basis.gram_size();
            RatMat t(dim, dim);
            const auto& values = result.blocks.at(0);
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) {
                    double sym = 0.5 * (values[i * dim + j] + values[j * dim + i]);
                    t.at(i, j) = rational_from_double(sym);
                }
            verdict.T_lyap = t;
            verdict.certificate = lyapunov_candidate(assembled.lyap_basis, PolyMatQ::from_rational(t),
                                                     sys.interval(), assembled.options.eps_pos);
            verdict.status = StabilityVerdict::Status::StableCertified;
            break;
        }
        case ConeSolveResult::Status::Infeasible:
        case ConeSolveResult::Status::MaxIters:
            verdict.status = StabilityVerdict::Status::UnknownInfeasible;
            break;
        case ConeSolveResult::Status::Failed:
            verdict.status = StabilityVerdict::Status::SolverFailure;
            break;
    }
    return verdict;
}

bool certificate_post_check(const CoupledSystem& sys, const StabilityVerdict& verdict, int samples,
                            std::mt19937_64& rng, std::string* why) {
    if (!verdict.certified() || !verdict.certificate) {
        if (why) *why = "verdict carries no certificate";
        return false;
    }
    const Interval& iv = sys.interval();
    FundamentalMaps maps = build_fundamental_maps(sys.pde);
    PiOpQ dyn = lift_dynamics(sys, maps);
    const PiOpQ& cand = *verdict.certificate;
    PiOpQ deriv = derivative_operator(cand, dyn, maps);
    PiOpQ recon = reconstruction_operator(maps, iv, sys.n_o(), 1);

    const Rational pos_slack = rat(-1, 1000000);
    const Rational neg_slack = verdict.eps_pos / 2;
    std::uniform_int_distribution<int> deg(3, 5);

    for (int k = 0; k < samples; ++k) {
        StateFunction v;
        v.x = RatMat(sys.n_o(), 1);
        std::uniform_int_distribution<int> num(-3, 3);
        for (int i = 0; i < sys.n_o(); ++i) v.x.at(i, 0) = rat(num(rng), 1 + k % 3);
        v.z = sys.n_p() > 0 ? admissible_polynomial(sys.pde.Bc, iv, sys.n_p(), deg(rng), rng)
                            : PolyMatQ(0, 1);

        Rational vnorm = state_norm_sq(v, iv);
        Rational quad = inner_product(v, cand, v);
        if (quad < pos_slack * vnorm) {
            if (why) {
                std::ostringstream os;
                os << "candidate positivity violated: <v,Pv> = " << to_double(quad)
                   << " for ||v||^2 = " << to_double(vnorm);
                *why = os.str();
            }
            return false;
        }

        // derivative acts on the fundamental state
        StateFunction vss;
        vss.x = v.x;
        vss.z = PolyMatQ(sys.n_p(), 1);
        for (int i = 0; i < sys.n_p(); ++i)
            vss.z.at(i, 0) = v.z.at(i, 0).derivative(Var::s).derivative(Var::s);
        StateFunction vrec = pi_apply(recon, vss);
        Rational full_norm = state_norm_sq(vrec, iv);
        Rational dquad = inner_product(vss, deriv, vss);
        if (dquad > neg_slack * full_norm) {
            if (why) {
                std::ostringstream os;
                os << "derivative negativity violated: <v,Dv> = " << to_double(dquad)
                   << " exceeds slack for ||v||^2 = " << to_double(full_norm);
                *why = os.str();
            }
            return false;
        }
    }
    return true;
}

}  // namespace pistab
