#pragma once

// Independent finite-difference oracle: method-of-lines semi-discretization
// of the coupled system with boundary conditions eliminated algebraically,
// plus an implicit trapezoidal time stepper and an energy trace.

#include "pistab/system_model.hpp"

#include <Eigen/Dense>

namespace pistab {

struct Discretization {
    int n_interior = 0;  // PDE nodes carried in the state
    double h = 0.0;
    Eigen::VectorXd grid;    // interior node coordinates
    Eigen::MatrixXd system;  // (n_o + N n_p)^2 generator matrix
    // boundary reconstruction z(a), z(b) = boundary_map * z_interior
    Eigen::MatrixXd boundary_map;  // 2 n_p x N n_p
    int n_o = 0, n_p = 0;

    double leading_eigenvalue_real() const;
    // PDE diagonal sub-block (coupling removed); used for spectral checks
    Eigen::MatrixXd pde_block() const;
};

// Central second-order interior stencils; the 2 n_p boundary constraints are
// discretized with one-sided second-order differences and solved for the two
// outermost values. Throws ValidationError when that elimination is singular
// (ill-posed boundary conditions).
Discretization semidiscretize(const CoupledSystem& sys, int n_interior);

struct EnergyTrace {
    std::vector<double> time;
    std::vector<double> energy;  // ||x||^2 + trapezoid(||z||^2)

    double ratio() const { return energy.empty() ? 0.0 : energy.back() / std::max(energy.front(), 1e-300); }
};

// Implicit trapezoidal stepping of the semi-discrete system.
EnergyTrace integrate_energy(const Discretization& d, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& z0, double t_final, double dt);

// Default initial data: unit ODE state, half-period sine bump in each PDE
// component.
Eigen::VectorXd default_ode_init(const Discretization& d);
Eigen::VectorXd default_pde_init(const Discretization& d, const Interval& iv);

}  // namespace pistab
