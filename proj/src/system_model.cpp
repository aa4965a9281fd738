#include "pistab/system_model.hpp"

#include "pistab/poly_parser.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace pistab {

RatMat Interconnection::block(int row_block, int col_block) const {
    int r0 = row_block == 0 ? 0 : m_o;
    int nr = row_block == 0 ? m_o : m_p;
    int c0 = col_block == 0 ? 0 : p_o;
    int nc = col_block == 0 ? p_o : p_p;
    RatMat out(nr, nc);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) out.at(i, j) = L.at(r0 + i, c0 + j);
    return out;
}

namespace {

// Boundary-value layout of z_b = col(z(a), z(b), z_s(a), z_s(b)).
PolyMatQ boundary_carrier(const Interval& iv, int n_p, Var v) {
    // col(0, (b - v) I, 0, I), 4n_p x n_p
    PolyMatQ out(4 * n_p, n_p);
    PolyQ bv = PolyQ(iv.b) - PolyQ::variable(v);
    for (int i = 0; i < n_p; ++i) {
        out.at(n_p + i, i) = bv;
        out.at(3 * n_p + i, i) = PolyQ(rat(1));
    }
    return out;
}

RatMat lemma4_bd(const Interval& iv, int n_p) {
    RatMat bd(4 * n_p, 2 * n_p);
    Rational width = iv.b - iv.a;
    for (int i = 0; i < n_p; ++i) {
        bd.at(i, i) = 1;
        bd.at(n_p + i, i) = 1;
        bd.at(n_p + i, n_p + i) = width;
        bd.at(2 * n_p + i, n_p + i) = 1;
        bd.at(3 * n_p + i, n_p + i) = 1;
    }
    return bd;
}

void require_var_only(const PolyMatQ& m, const char* name, bool allow_s, ValidationReport& report) {
    if (!allow_s && m.contains(Var::s)) report.fail(std::string(name) + " must be constant");
    if (m.contains(Var::eta) || m.contains(Var::theta))
        report.fail(std::string(name) + " admits only the spatial variable s");
}

}  // namespace

ValidationReport validate(const CoupledSystem& sys) {
    ValidationReport report;
    const int n_o = sys.n_o(), n_p = sys.n_p();
    const auto& ode = sys.ode;
    const auto& pde = sys.pde;
    const auto& link = sys.link;

    if (!(pde.iv.a < pde.iv.b)) report.fail("interval must satisfy a < b");
    if (ode.A.rows() != ode.A.cols()) report.fail("A must be square");
    if (ode.B.rows() != n_o) report.fail("B row count differs from the ODE state dimension");
    if (ode.C.cols() != n_o) report.fail("C column count differs from the ODE state dimension");

    auto expect = [&](int got_r, int got_c, int r, int c, const char* name) {
        if (got_r != r || got_c != c) {
            std::ostringstream os;
            os << name << " has shape " << got_r << "x" << got_c << ", expected " << r << "x" << c;
            report.fail(os.str());
        }
    };
    expect(pde.A0.rows(), pde.A0.cols(), n_p, n_p, "A0");
    expect(pde.A1.rows(), pde.A1.cols(), n_p, n_p, "A1");
    expect(pde.A2.rows(), pde.A2.cols(), n_p, n_p, "A2");
    expect(pde.B1.rows(), pde.B1.cols(), n_p, link.m_p, "B1");
    expect(pde.C1.rows(), pde.C1.cols(), link.p_p, 4 * n_p, "C1");
    expect(pde.Ca.rows(), pde.Ca.cols(), link.p_p, n_p, "Ca");
    expect(pde.Cb.rows(), pde.Cb.cols(), link.p_p, n_p, "Cb");
    expect(pde.Bc.rows(), pde.Bc.cols(), 2 * n_p, 4 * n_p, "Bc");
    expect(ode.B.rows(), ode.B.cols(), n_o, link.m_o, "B");
    expect(ode.C.rows(), ode.C.cols(), link.p_o, n_o, "C");
    expect(link.L.rows(), link.L.cols(), link.m_o + link.m_p, link.p_o + link.p_p, "L");

    for (const auto* mp : {&pde.A0, &pde.A1, &pde.A2, &pde.B1, &pde.Ca, &pde.Cb}) {
        static const char* names[] = {"A0", "A1", "A2", "B1", "Ca", "Cb"};
        size_t idx = (mp == &pde.A0)   ? 0
                     : (mp == &pde.A1) ? 1
                     : (mp == &pde.A2) ? 2
                     : (mp == &pde.B1) ? 3
                     : (mp == &pde.Ca) ? 4
                                       : 5;
        require_var_only(*mp, names[idx], true, report);
    }

    if (!report.ok) return report;  // rank checks need consistent shapes

    if (rank(pde.Bc) != 2 * n_p) report.fail("Bc is rank deficient (needs full row rank 2*n_p)");
    if (rank(link.L) != link.m_o + link.m_p) report.fail("L is rank deficient (needs full row rank)");

    RatMat bcbd = pde.Bc * lemma4_bd(pde.iv, n_p);
    if (rank(bcbd) != 2 * n_p)
        report.fail("Bc*Bd is singular: boundary conditions are ill-posed for the fundamental map");
    return report;
}

FundamentalMaps build_fundamental_maps(const PDEModel& pde) {
    const int n_p = pde.n_p();
    const Interval& iv = pde.iv;
    FundamentalMaps maps;
    maps.Bd = lemma4_bd(iv, n_p);

    RatMat bcbd = pde.Bc * maps.Bd;
    RatMat bcbd_inv;
    try {
        bcbd_inv = inverse(bcbd);
    } catch (const ValidationError&) {
        throw ValidationError("Bc*Bd is singular: ill-posed boundary conditions");
    }

    // Bf(eta) = (Bc Bd)^-1 Bc col(0, (b-eta)I, 0, I)
    maps.Bf = PolyMatQ::from_rational(bcbd_inv * pde.Bc) * boundary_carrier(iv, n_p, Var::eta);

    // Ba(s,eta) = -[I (s-a)I] Bf(eta),  Bb(eta) = -[0 I] Bf(eta)
    PolyMatQ selector_a(n_p, 2 * n_p), selector_b(n_p, 2 * n_p);
    PolyQ s_minus_a = PolyQ::variable(Var::s) - PolyQ(iv.a);
    for (int i = 0; i < n_p; ++i) {
        selector_a.at(i, i) = PolyQ(rat(1));
        selector_a.at(i, n_p + i) = s_minus_a;
        selector_b.at(i, n_p + i) = PolyQ(rat(1));
    }
    maps.Ba = -(selector_a * maps.Bf);
    maps.Bb = -(selector_b * maps.Bf);

    PolyMatQ smne_identity(n_p, n_p);
    PolyQ s_minus_eta = PolyQ::variable(Var::s) - PolyQ::variable(Var::eta);
    for (int i = 0; i < n_p; ++i) smne_identity.at(i, i) = s_minus_eta;
    maps.G1 = maps.Ba + smne_identity;
    maps.G2 = maps.Ba;
    maps.G3 = maps.Bb + PolyMatQ::identity(n_p);
    maps.G4 = maps.Bb;

    // C3(s) = -C1 Bd Bf(s) + C1 col(0, (b-s)I, 0, I)
    std::map<Var, PolyQ> eta_to_s{{Var::eta, PolyQ::variable(Var::s)}};
    PolyMatQ c1p = PolyMatQ::from_rational(pde.C1);
    maps.C3 = -(c1p * PolyMatQ::from_rational(maps.Bd) * maps.Bf.substitute(eta_to_s)) +
              c1p * boundary_carrier(iv, n_p, Var::s);
    return maps;
}

PiOpQ reconstruction_operator(const FundamentalMaps& maps, const Interval& iv, int m, int which) {
    int n_p = maps.G1.rows();
    PiOpQ op = PiOpQ::zero(iv, m, n_p, m, n_p);
    op.P = PolyMatQ::identity(m);
    if (which == 1) {
        op.R1 = maps.G1;
        op.R2 = maps.G2;
    } else if (which == 3) {
        op.R1 = maps.G3;
        op.R2 = maps.G4;
    } else {
        throw Error("reconstruction_operator expects which = 1 or 3");
    }
    return op;
}

PiOpQ lift_dynamics(const CoupledSystem& sys, const FundamentalMaps& maps) {
    const int n_o = sys.n_o(), n_p = sys.n_p();
    const Interval& iv = sys.interval();
    const auto& ode = sys.ode;
    const auto& pde = sys.pde;

    PolyMatQ B = PolyMatQ::from_rational(ode.B);
    PolyMatQ C = PolyMatQ::from_rational(ode.C);
    PolyMatQ L1 = PolyMatQ::from_rational(sys.link.L1());
    PolyMatQ L2 = PolyMatQ::from_rational(sys.link.L2());
    PolyMatQ L3 = PolyMatQ::from_rational(sys.link.L3());
    PolyMatQ L4 = PolyMatQ::from_rational(sys.link.L4());

    std::map<Var, PolyQ> s_to_eta{{Var::s, PolyQ::variable(Var::eta)}};
    PolyMatQ b1_l4 = pde.B1 * L4;  // n_p x p_p, variable s

    // Factor collecting the terms that act on z (multipliers plus the
    // separable kernels produced by the in-domain feedback of y).
    auto feedback_factor = [&](const PolyMatQ& cz, const PolyMatQ& multiplier, bool with_x) {
        PiOpQ f = PiOpQ::zero(iv, n_o, n_p, n_o, n_p);
        f.P = with_x ? PolyMatQ::from_rational(ode.A) + B * L1 * C : PolyMatQ(n_o, n_o);
        f.Q1 = B * L2 * cz;
        if (with_x) f.Q2 = pde.B1 * L3 * C;
        f.S = multiplier;
        PolyMatQ kernel = b1_l4 * cz.substitute(s_to_eta);  // B1(s) L4 Cz(eta)
        f.R1 = kernel;
        f.R2 = kernel;
        return f;
    };

    PiOpQ f1 = feedback_factor(pde.Ca, pde.A0, true);
    PiOpQ f2 = feedback_factor(pde.Cb, pde.A1, false);
    PiOpQ f3 = feedback_factor(maps.C3, pde.A2, false);

    PiOpQ g12 = reconstruction_operator(maps, iv, n_o, 1);
    PiOpQ g34 = reconstruction_operator(maps, iv, n_o, 3);

    PiOpQ lifted = pi_add(pi_add(pi_compose(f1, g12), pi_compose(f2, g34)), f3);
    lifted.validate();
    return lifted;
}

RatMat boundary_vector(const PolyMatQ& z, const Interval& iv) {
    if (z.cols() != 1) throw DimensionError("boundary_vector expects a column polynomial");
    int n_p = z.rows();
    PolyMatQ zs(n_p, 1);
    for (int i = 0; i < n_p; ++i) zs.at(i, 0) = z.at(i, 0).derivative(Var::s);
    RatMat out(4 * n_p, 1);
    std::map<Var, Rational> at_a{{Var::s, iv.a}}, at_b{{Var::s, iv.b}};
    for (int i = 0; i < n_p; ++i) {
        out.at(i, 0) = z.at(i, 0).evaluate(at_a);
        out.at(n_p + i, 0) = z.at(i, 0).evaluate(at_b);
        out.at(2 * n_p + i, 0) = zs.at(i, 0).evaluate(at_a);
        out.at(3 * n_p + i, 0) = zs.at(i, 0).evaluate(at_b);
    }
    return out;
}

PolyMatQ admissible_polynomial(const RatMat& Bc, const Interval& iv, int n_p, int degree,
                               std::mt19937_64& rng) {
    if (degree < 3) throw Error("admissible sampler needs degree >= 3 for the cubic correction");
    std::uniform_int_distribution<int> num(-4, 4);
    std::uniform_int_distribution<int> den(1, 3);
    PolyMatQ z(n_p, 1);
    for (int i = 0; i < n_p; ++i) {
        PolyQ p;
        for (int d = 0; d <= degree; ++d)
            p += PolyQ::monomial(rat(num(rng), den(rng)), Exp3{d, 0, 0});
        z.at(i, 0) = p;
    }

    // Cubic correction: coefficients c (4 per component) with the boundary
    // map M c = q_b; solve Bc M c = Bc z_b exactly and subtract.
    RatMat zb = boundary_vector(z, iv);
    RatMat target = Bc * zb;
    if (target.is_zero()) return z;

    RatMat M(4 * n_p, 4 * n_p);
    Rational a = iv.a, b = iv.b;
    auto fill = [&](int block, int comp, const Rational& c0, const Rational& c1, const Rational& c2,
                    const Rational& c3) {
        M.at(block * n_p + comp, 4 * comp + 0) = c0;
        M.at(block * n_p + comp, 4 * comp + 1) = c1;
        M.at(block * n_p + comp, 4 * comp + 2) = c2;
        M.at(block * n_p + comp, 4 * comp + 3) = c3;
    };
    for (int comp = 0; comp < n_p; ++comp) {
        fill(0, comp, rat(1), a, a * a, a * a * a);
        fill(1, comp, rat(1), b, b * b, b * b * b);
        fill(2, comp, rat(0), rat(1), 2 * a, 3 * a * a);
        fill(3, comp, rat(0), rat(1), 2 * b, 3 * b * b);
    }
    RatMat coeffs = solve_particular(Bc * M, target);
    for (int comp = 0; comp < n_p; ++comp) {
        PolyQ correction;
        for (int d = 0; d < 4; ++d)
            correction += PolyQ::monomial(coeffs.at(4 * comp + d, 0), Exp3{d, 0, 0});
        z.at(comp, 0) -= correction;
    }
    return z;
}

RatMat boundary_preset(const std::string& name, int n_p) {
    RatMat bc(2 * n_p, 4 * n_p);
    auto put_block = [&](int row_block, int col_block) {
        for (int i = 0; i < n_p; ++i) bc.at(row_block * n_p + i, col_block * n_p + i) = 1;
    };
    if (name == "dirichlet-dirichlet") {
        put_block(0, 0);  // z(a) = 0
        put_block(1, 1);  // z(b) = 0
    } else if (name == "dirichlet-neumann") {
        put_block(0, 0);  // z(a) = 0
        put_block(1, 3);  // z_s(b) = 0
    } else if (name == "neumann-dirichlet") {
        put_block(0, 2);  // z_s(a) = 0
        put_block(1, 1);  // z(b) = 0
    } else {
        throw ParseError("unknown boundary preset '" + name + "'");
    }
    return bc;
}

namespace {

using nlohmann::json;

// Decimal JSON numbers are recovered from their shortest round-trip token so
// that entries like -1.2142 become the exact rational -6071/5000.
Rational json_number(const json& cell) {
    if (cell.is_number_integer()) return rat(cell.get<long>());
    return rational_from_string(cell.dump());
}

Rational json_scalar(const json& cell, const PolyGrammar& grammar, const char* where) {
    if (cell.is_number()) return json_number(cell);
    if (cell.is_string()) {
        PolyQ p = parse_poly(cell.get<std::string>(), grammar);
        if (!p.is_constant())
            throw ParseError(std::string(where) + ": entry must be a constant, got '" +
                             cell.get<std::string>() + "'");
        return p.constant_value();
    }
    throw ParseError(std::string(where) + ": entries must be numbers or strings");
}

// An empty array stands for any matrix with a zero dimension.
bool empty_matrix_shorthand(const json& j, int rows, int cols) {
    return (rows == 0 || cols == 0) && j.is_array() &&
           (j.empty() || std::all_of(j.begin(), j.end(), [](const json& row) {
               return row.is_array() && row.empty();
           }));
}

RatMat parse_const_matrix(const json& j, int rows, int cols, const PolyGrammar& grammar,
                          const char* where) {
    if (!j.is_array()) throw ParseError(std::string(where) + " must be an array of rows");
    if (empty_matrix_shorthand(j, rows, cols)) return RatMat(rows, cols);
    if (static_cast<int>(j.size()) != rows)
        throw ParseError(std::string(where) + ": expected " + std::to_string(rows) + " rows");
    RatMat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const json& row = j[i];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw ParseError(std::string(where) + ": row " + std::to_string(i) + " must have " +
                             std::to_string(cols) + " entries");
        for (int c = 0; c < cols; ++c) m.at(i, c) = json_scalar(row[c], grammar, where);
    }
    return m;
}

PolyMatQ parse_poly_matrix(const json& j, int rows, int cols, const PolyGrammar& grammar,
                           const char* where) {
    if (!j.is_array()) throw ParseError(std::string(where) + " must be an array of rows");
    if (empty_matrix_shorthand(j, rows, cols)) return PolyMatQ(rows, cols);
    if (static_cast<int>(j.size()) != rows)
        throw ParseError(std::string(where) + ": expected " + std::to_string(rows) + " rows");
    PolyMatQ m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const json& row = j[i];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw ParseError(std::string(where) + ": row " + std::to_string(i) + " must have " +
                             std::to_string(cols) + " entries");
        for (int c = 0; c < cols; ++c) {
            const json& cell = row[c];
            if (cell.is_number()) {
                m.at(i, c) = PolyQ(json_number(cell));
            } else if (cell.is_string()) {
                PolyQ p = parse_poly(cell.get<std::string>(), grammar);
                if (p.contains(Var::eta))
                    throw ParseError(std::string(where) + ": problem entries admit only the variable s");
                m.at(i, c) = p;
            } else {
                throw ParseError(std::string(where) + ": entries must be numbers or strings");
            }
        }
    }
    return m;
}

int matrix_rows(const json& j) { return j.is_array() ? static_cast<int>(j.size()) : 0; }
int matrix_cols(const json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) return 0;
    return static_cast<int>(j[0].size());
}

}  // namespace

ProblemFile ProblemFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open problem file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("problem file '" + path + "' is not valid JSON: " + e.what());
    }
    return from_json(j);
}

ProblemFile ProblemFile::from_json(const json& j) {
    ProblemFile pf;
    pf.raw = j;
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw ParseError("params must be an object of name -> value");
        for (const auto& [name, value] : j["params"].items()) {
            if (value.is_number())
                pf.params[name] = json_number(value);
            else if (value.is_string())
                pf.params[name] = rational_from_string(value.get<std::string>());
            else
                throw ParseError("parameter '" + name + "' must be numeric");
        }
    }
    return pf;
}

CoupledSystem ProblemFile::build(const std::map<std::string, Rational>& overrides) const {
    const json& j = raw;
    for (const auto& kv : overrides)
        if (!params.count(kv.first)) throw ParseError("unknown parameter '" + kv.first + "'");

    PolyGrammar grammar;
    grammar.variables = {{"s", Var::s}};
    for (const auto& [name, value] : params) grammar.parameters[name] = value;
    for (const auto& [name, value] : overrides) grammar.parameters[name] = value;

    if (!j.contains("interval") || !j["interval"].is_array() || j["interval"].size() != 2)
        throw ParseError("problem file needs interval: [a, b]");
    Interval iv;
    iv.a = json_scalar(j["interval"][0], grammar, "interval");
    iv.b = json_scalar(j["interval"][1], grammar, "interval");
    if (!(iv.a < iv.b)) throw ParseError("interval must satisfy a < b");

    if (!j.contains("ode") || !j.contains("pde") || !j.contains("link"))
        throw ParseError("problem file needs ode, pde and link sections");
    const json& jo = j["ode"];
    const json& jp = j["pde"];
    const json& jl = j["link"];

    if (!jl.contains("dims")) throw ParseError("link needs dims: {mo, po, mp, pp}");
    Interconnection link;
    link.m_o = jl["dims"].value("mo", 0);
    link.p_o = jl["dims"].value("po", 0);
    link.m_p = jl["dims"].value("mp", 0);
    link.p_p = jl["dims"].value("pp", 0);
    if (link.m_o < 0 || link.p_o < 0 || link.m_p < 0 || link.p_p < 0)
        throw ParseError("link dims must be non-negative");
    link.L = parse_const_matrix(jl.value("L", json::array()), link.m_o + link.m_p, link.p_o + link.p_p,
                                grammar, "link.L");

    int n_o = matrix_rows(jo.value("A", json::array()));
    ODEModel ode;
    ode.A = parse_const_matrix(jo.value("A", json::array()), n_o, n_o, grammar, "ode.A");
    ode.B = parse_const_matrix(jo.value("B", json::array()), n_o, link.m_o, grammar, "ode.B");
    ode.C = parse_const_matrix(jo.value("C", json::array()), link.p_o, n_o, grammar, "ode.C");

    if (!jp.contains("A2")) throw ParseError("pde needs A2 (second-order coefficient)");
    int n_p = matrix_rows(jp["A2"]);
    if (n_p > 0 && matrix_cols(jp["A2"]) != n_p) throw ParseError("pde.A2 must be square");

    PDEModel pde;
    pde.iv = iv;
    pde.A0 = parse_poly_matrix(jp.value("A0", json::array()), n_p, n_p, grammar, "pde.A0");
    pde.A1 = parse_poly_matrix(jp.value("A1", json::array()), n_p, n_p, grammar, "pde.A1");
    pde.A2 = parse_poly_matrix(jp["A2"], n_p, n_p, grammar, "pde.A2");
    pde.B1 = parse_poly_matrix(jp.value("B1", json::array()), n_p, link.m_p, grammar, "pde.B1");
    pde.C1 = parse_const_matrix(jp.value("C1", json::array()), link.p_p, 4 * n_p, grammar, "pde.C1");
    pde.Ca = parse_poly_matrix(jp.value("Ca", json::array()), link.p_p, n_p, grammar, "pde.Ca");
    pde.Cb = parse_poly_matrix(jp.value("Cb", json::array()), link.p_p, n_p, grammar, "pde.Cb");

    const json& jbc = jp.value("Bc", json());
    if (jbc.is_string()) {
        pde.Bc = boundary_preset(jbc.get<std::string>(), n_p);
    } else if (jbc.is_array()) {
        pde.Bc = parse_const_matrix(jbc, 2 * n_p, 4 * n_p, grammar, "pde.Bc");
    } else if (n_p == 0) {
        pde.Bc = RatMat(0, 0);
    } else {
        throw ParseError("pde.Bc must be a preset name or an explicit 2n x 4n matrix");
    }

    CoupledSystem sys{std::move(ode), std::move(pde), std::move(link)};
    return sys;
}

}  // namespace pistab
