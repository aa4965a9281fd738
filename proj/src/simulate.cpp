#include "pistab/simulate.hpp"

#include <cmath>

namespace pistab {

namespace {

Eigen::MatrixXd to_eigen(const RatMat& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out(i, j) = to_double(m.at(i, j));
    return out;
}

Eigen::MatrixXd eval_at(const PolyMatQ& m, double s) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out(i, j) = evaluate_double(m.at(i, j), s);
    return out;
}

}  // namespace

double Discretization::leading_eigenvalue_real() const {
    if (system.rows() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> eig(system, false);
    return eig.eigenvalues().real().maxCoeff();
}

Eigen::MatrixXd Discretization::pde_block() const {
    return system.bottomRightCorner(n_interior * n_p, n_interior * n_p);
}

Discretization semidiscretize(const CoupledSystem& sys, int n_interior) {
    if (n_interior < 8 && sys.n_p() > 0) throw Error("semidiscretize needs at least 8 interior nodes");
    ValidationReport report = validate(sys);
    if (!report.ok) {
        std::string why = "system fails validation:";
        for (const auto& f : report.failures) why += "\n  - " + f;
        throw ValidationError(why);
    }

    const int n_o = sys.n_o(), n_p = sys.n_p();
    const int N = sys.n_p() > 0 ? n_interior : 0;
    const double a = to_double(sys.interval().a), b = to_double(sys.interval().b);
    const double h = (b - a) / (N + 1);

    Discretization d;
    d.n_interior = N;
    d.h = h;
    d.n_o = n_o;
    d.n_p = n_p;
    d.grid.resize(N);
    for (int i = 0; i < N; ++i) d.grid[i] = a + (i + 1) * h;

    const int nz = N * n_p;
    const int dim = n_o + nz;

    Eigen::MatrixXd A = to_eigen(sys.ode.A);
    Eigen::MatrixXd B = to_eigen(sys.ode.B);
    Eigen::MatrixXd C = to_eigen(sys.ode.C);
    Eigen::MatrixXd L1 = to_eigen(sys.link.L1());
    Eigen::MatrixXd L2 = to_eigen(sys.link.L2());
    Eigen::MatrixXd L3 = to_eigen(sys.link.L3());
    Eigen::MatrixXd L4 = to_eigen(sys.link.L4());
    Eigen::MatrixXd C1 = to_eigen(sys.pde.C1);

    // Boundary elimination: Bc zb_hat = 0 with one-sided second-order
    // derivative stencils. zb_hat depends linearly on (z_a, z_b) and the
    // first/last interior values.
    Eigen::MatrixXd boundary_map = Eigen::MatrixXd::Zero(2 * n_p, nz);
    // zb_hat = E0 * col(z_a, z_b) + F0 * z_int
    Eigen::MatrixXd E0 = Eigen::MatrixXd::Zero(4 * n_p, 2 * n_p);
    Eigen::MatrixXd F0 = Eigen::MatrixXd::Zero(4 * n_p, nz);
    if (n_p > 0) {
        auto I = Eigen::MatrixXd::Identity(n_p, n_p);
        E0.block(0, 0, n_p, n_p) = I;                                // z(a)
        E0.block(n_p, n_p, n_p, n_p) = I;                            // z(b)
        E0.block(2 * n_p, 0, n_p, n_p) = -3.0 / (2 * h) * I;         // z_s(a)
        F0.block(2 * n_p, 0, n_p, n_p) = 4.0 / (2 * h) * I;          //   4 z_1
        F0.block(2 * n_p, n_p, n_p, n_p) = -1.0 / (2 * h) * I;       //  -z_2
        E0.block(3 * n_p, n_p, n_p, n_p) = 3.0 / (2 * h) * I;        // z_s(b)
        F0.block(3 * n_p, nz - n_p, n_p, n_p) = -4.0 / (2 * h) * I;  //  -4 z_{N-1}
        F0.block(3 * n_p, nz - 2 * n_p, n_p, n_p) = 1.0 / (2 * h) * I;
        Eigen::MatrixXd Bc = to_eigen(sys.pde.Bc);
        Eigen::MatrixXd lhs = Bc * E0;  // 2n_p x 2n_p
        Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
        if (!lu.isInvertible())
            throw ValidationError("discrete boundary elimination is singular (ill-posed boundary conditions)");
        boundary_map = -lu.solve(Bc * F0);
    }
    d.boundary_map = boundary_map;

    // zb_hat as a function of the interior values only
    Eigen::MatrixXd zb_of_int = E0 * boundary_map + F0;  // 4n_p x nz

    // Trapezoid quadrature of Ca z + Cb z_s over all N+2 nodes; z_s uses
    // central differences inside and the one-sided stencils at the ends.
    const int p_p = sys.link.p_p;
    Eigen::MatrixXd y_of_int = Eigen::MatrixXd::Zero(p_p, nz);
    if (n_p > 0 && p_p > 0) {
        auto node_value = [&](int node) {  // z at node (-1..N) as map from z_int
            Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_p, nz);
            if (node == -1)
                out = boundary_map.topRows(n_p);
            else if (node == N)
                out = boundary_map.bottomRows(n_p);
            else
                out.block(0, node * n_p, n_p, n_p) = Eigen::MatrixXd::Identity(n_p, n_p);
            return out;
        };
        auto node_slope = [&](int node) {
            Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_p, nz);
            if (node == -1)
                out = zb_of_int.block(2 * n_p, 0, n_p, nz);
            else if (node == N)
                out = zb_of_int.block(3 * n_p, 0, n_p, nz);
            else
                out = (node_value(node + 1) - node_value(node - 1)) / (2 * h);
            return out;
        };
        for (int node = -1; node <= N; ++node) {
            double sI = a + (node + 1) * h;
            double weight = (node == -1 || node == N) ? h / 2 : h;
            y_of_int += weight * (eval_at(sys.pde.Ca, sI) * node_value(node) +
                                  eval_at(sys.pde.Cb, sI) * node_slope(node));
        }
        y_of_int += C1 * zb_of_int;
    } else if (n_p > 0) {
        y_of_int = C1 * zb_of_int;  // p_p = 0 leaves a 0 x nz map
    }

    // interconnection: w = C x, y = y_of_int z, u = L3 w + L4 y, v = L1 w + L2 y
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
    M.topLeftCorner(n_o, n_o) = A + B * L1 * C;
    if (nz > 0) {
        M.topRightCorner(n_o, nz) = B * L2 * y_of_int;

        auto node_value = [&](int node) {
            Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_p, nz);
            if (node == -1)
                out = boundary_map.topRows(n_p);
            else if (node == N)
                out = boundary_map.bottomRows(n_p);
            else
                out.block(0, node * n_p, n_p, n_p) = Eigen::MatrixXd::Identity(n_p, n_p);
            return out;
        };
        for (int i = 0; i < N; ++i) {
            double sI = d.grid[i];
            Eigen::MatrixXd zm = node_value(i - 1), z0v = node_value(i), zp = node_value(i + 1);
            Eigen::MatrixXd row = eval_at(sys.pde.A0, sI) * z0v +
                                  eval_at(sys.pde.A1, sI) * (zp - zm) / (2 * h) +
                                  eval_at(sys.pde.A2, sI) * (zp - 2 * z0v + zm) / (h * h);
            Eigen::MatrixXd b1 = eval_at(sys.pde.B1, sI);
            M.block(n_o + i * n_p, n_o, n_p, nz) = row + b1 * L4 * y_of_int;
            M.block(n_o + i * n_p, 0, n_p, n_o) = b1 * L3 * C;
        }
    }
    d.system = M;
    return d;
}

EnergyTrace integrate_energy(const Discretization& d, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& z0, double t_final, double dt) {
    if (dt <= 0) throw Error("time step must be positive");
    if (x0.size() != d.n_o || z0.size() != d.n_interior * d.n_p)
        throw DimensionError("initial data shape mismatch");
    for (int i = 0; i < x0.size(); ++i)
        if (!std::isfinite(x0[i])) throw Error("non-finite initial data");
    for (int i = 0; i < z0.size(); ++i)
        if (!std::isfinite(z0[i])) throw Error("non-finite initial data");

    const int dim = d.system.rows();
    Eigen::VectorXd state(dim);
    state << x0, z0;

    Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(dim, dim) - 0.5 * dt * d.system;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Identity(dim, dim) + 0.5 * dt * d.system;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);

    auto energy = [&](const Eigen::VectorXd& st) {
        double e = st.head(d.n_o).squaredNorm();
        if (d.n_interior > 0) {
            Eigen::VectorXd zint = st.tail(d.n_interior * d.n_p);
            Eigen::VectorXd zb = d.boundary_map * zint;
            // trapezoid over boundary + interior nodes
            e += 0.5 * d.h * zb.head(d.n_p).squaredNorm();
            e += 0.5 * d.h * zb.tail(d.n_p).squaredNorm();
            for (int i = 0; i < d.n_interior; ++i)
                e += d.h * zint.segment(i * d.n_p, d.n_p).squaredNorm();
        }
        return e;
    };

    EnergyTrace trace;
    trace.time.push_back(0.0);
    trace.energy.push_back(energy(state));
    int steps = static_cast<int>(std::ceil(t_final / dt));
    for (int k = 1; k <= steps; ++k) {
        state = lu.solve(rhs * state);
        if (!state.allFinite()) throw SolverError("time integration produced non-finite values");
        trace.time.push_back(k * dt);
        trace.energy.push_back(energy(state));
    }
    return trace;
}

Eigen::VectorXd default_ode_init(const Discretization& d) { return Eigen::VectorXd::Ones(d.n_o); }

Eigen::VectorXd default_pde_init(const Discretization& d, const Interval& iv) {
    Eigen::VectorXd z(d.n_interior * d.n_p);
    double a = to_double(iv.a), b = to_double(iv.b);
    for (int i = 0; i < d.n_interior; ++i) {
        double phase = M_PI * (d.grid[i] - a) / (b - a);
        for (int c = 0; c < d.n_p; ++c) z[i * d.n_p + c] = std::sin(phase);
    }
    return z;
}

}  // namespace pistab
