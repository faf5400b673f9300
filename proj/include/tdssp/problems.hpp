#pragma once

#include "tdssp/integrators.hpp"

// Concrete semi-discrete systems: periodic upwind advection with two
// second-derivative discretizations, a linear projection relaxation model
// (pointwise two-component kinetic toy and its advective PDE variant) with
// closed-form implicit solves, and the smooth scalar ODE used for
// convergence studies.

namespace tdssp {

/// Total variation with periodic wrap: sum_j |u_{j+1} - u_j|.
double total_variation(const VectorXd& u);

/// Grid function as plot-ready CSV rows (j, x_j, u_j) with a schema header.
std::string grid_csv(const VectorXd& u, double dx);

/// Step initial condition sampled at cell centers x_j = (j+1/2)/m:
/// 1 on [1/4, 1/2], 0 elsewhere.
VectorXd step_ic(int m);

/// First-order upwind derivative (1/dx)(u_{j+1} - u_j), periodic.
VectorXd upwind_diff(const VectorXd& u, double dx);
/// Centered second difference (1/dx^2)(u_{j+1} - 2u_j + u_{j-1}), periodic.
VectorXd centered_diff2(const VectorXd& u, double dx);
/// Upwind difference applied twice: (1/dx^2)(u_{j+2} - 2u_{j+1} + u_j).
VectorXd squared_upwind_diff2(const VectorXd& u, double dx);

/// One-way wave equation u_t = u_x on [0,1) with first-order upwind F and a
/// choice of second-derivative discretization.  The centered variant obeys
/// the second-derivative condition with K = 1/sqrt(2); the squared-upwind
/// variant obeys the Taylor-series condition with kappa = 1.  dt_fe = dx.
class AdvectionProblem : public SemiDiscreteSystem {
 public:
  enum class FdotVariant { Centered, SquaredUpwind };

  AdvectionProblem(int m, FdotVariant variant);

  int dim() const override { return m_; }
  double dt_fe() const override { return dx_; }
  double dx() const { return dx_; }
  FdotVariant variant() const { return variant_; }
  double functional(const VectorXd& u) const override {
    return total_variation(u);
  }
  VectorXd f_ex(const VectorXd& u) const override {
    return upwind_diff(u, dx_);
  }
  VectorXd fdot_ex(const VectorXd& u) const override {
    return variant_ == FdotVariant::Centered ? centered_diff2(u, dx_)
                                             : squared_upwind_diff2(u, dx_);
  }

 private:
  int m_;
  double dx_;
  FdotVariant variant_;
};

/// Pointwise equilibrium projection for the two-component relaxation model:
/// conserves u+v and projects onto the line v = slope * u, so G^2 = G.
/// Realized per cell on interleaved (u, v) pairs.
class RelaxationBase : public SemiDiscreteSystem {
 public:
  RelaxationBase(double epsilon, double slope);

  double epsilon() const { return epsilon_; }
  VectorXd project(const VectorXd& u) const;
  VectorXd f_im(const VectorXd& u) const override {
    return (project(u) - u) / epsilon_;
  }
  /// The stiff derivative identity of the relaxation model, enforced by
  /// construction: fdot_im = -f_im.
  VectorXd fdot_im(const VectorXd& u) const override { return -f_im(u); }
  /// Closed form: with mu = (gamma - gamma_dot)/eps,
  /// u = G a + (I - G) a / (1 + mu).
  VectorXd implicit_stage_solve(const VectorXd& a, double gamma,
                                double gamma_dot) const override;
  double stage_solve_conditioning(double gamma,
                                  double gamma_dot) const override {
    return 1.0 + (gamma - gamma_dot) / epsilon_;
  }

 protected:
  double epsilon_;
  double slope_;
};

/// Space-homogeneous relaxation toy: one (u, v) pair, no transport.
/// Optionally adds a smooth nonstiff drift (v, -sin u) so the IMEX engines
/// have a nontrivial explicit part for convergence studies.
class RelaxationODE : public RelaxationBase {
 public:
  RelaxationODE(double epsilon, double slope = 1.0, bool with_drift = false);

  int dim() const override { return 2; }
  /// Sharp l1 forward-Euler bound of the projection term: the (I-G) mode
  /// scales by 1 - dt/eps.
  double dt_fe() const override { return 2.0 * epsilon_; }
  double functional(const VectorXd& u) const override {
    return u.lpNorm<1>();
  }
  VectorXd f_ex(const VectorXd& u) const override;

 private:
  bool with_drift_;
};

/// Two-velocity relaxation PDE on [0,1) periodic: component u advects right,
/// v advects left at unit speed (first-order monotone upwind fluxes, which
/// the global Lax-Friedrichs flux reduces to for this diagonal system);
/// the relaxation term couples them pointwise.  State layout [u; v].
class RelaxationPDE : public RelaxationBase {
 public:
  RelaxationPDE(int m, double epsilon, double slope = 1.0);

  int dim() const override { return 2 * m_; }
  double dt_fe() const override { return dx_; }
  double dx() const { return dx_; }
  int cells() const { return m_; }
  double functional(const VectorXd& u) const override;
  VectorXd f_ex(const VectorXd& u) const override;

  /// Step data in the advected component, zero in the other.
  VectorXd step_initial_state() const;

 private:
  int m_;
  double dx_;
};

/// u' = -u^2 with exact solution u0/(1 + u0 t); fdot = 2u^3 is the flow
/// derivative.  The same operator is exposed to the explicit engines
/// (f_ex/fdot_ex) and to the implicit ones (f_im/fdot_im with a Newton
/// stage solve); it is not an additive splitting.
class RiccatiODE : public SemiDiscreteSystem {
 public:
  explicit RiccatiODE(double u0 = 1.0) : u0_(u0) {}

  int dim() const override { return 1; }
  double dt_fe() const override { return 1.0; }
  double functional(const VectorXd& u) const override {
    return std::abs(u(0));
  }
  VectorXd f_ex(const VectorXd& u) const override;
  VectorXd fdot_ex(const VectorXd& u) const override;
  VectorXd f_im(const VectorXd& u) const override { return f_ex(u); }
  VectorXd fdot_im(const VectorXd& u) const override { return fdot_ex(u); }
  VectorXd implicit_stage_solve(const VectorXd& a, double gamma,
                                double gamma_dot) const override;
  bool has_exact() const override { return true; }
  VectorXd exact(double t) const override;
  VectorXd initial_state() const;

 private:
  double u0_;
};

}  // namespace tdssp
