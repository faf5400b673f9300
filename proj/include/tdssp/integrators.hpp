#pragma once

#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdssp/tableaux.hpp"

// Time-stepping engines for the four method classes over a user-supplied
// semi-discrete system, with convex-functional monitoring.

namespace tdssp {

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(int step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

class StageSolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problem interface.  Explicit two-derivative methods use f_ex/fdot_ex;
/// IMEX and implicit classes additionally use f_im/fdot_im and the
/// problem-owned stage solver for u = a + gamma f_im(u) + gamma_dot fdot_im(u).
class SemiDiscreteSystem {
 public:
  virtual ~SemiDiscreteSystem() = default;

  virtual int dim() const = 0;
  virtual double dt_fe() const = 0;
  virtual double functional(const VectorXd& u) const = 0;

  virtual VectorXd f_ex(const VectorXd& u) const {
    return VectorXd::Zero(u.size());
  }
  virtual VectorXd fdot_ex(const VectorXd& /*u*/) const {
    throw std::logic_error("fdot_ex not provided by this system");
  }
  virtual VectorXd f_im(const VectorXd& u) const {
    return VectorXd::Zero(u.size());
  }
  virtual VectorXd fdot_im(const VectorXd& u) const {
    return VectorXd::Zero(u.size());
  }
  virtual VectorXd implicit_stage_solve(const VectorXd& a, double gamma,
                                        double gamma_dot) const {
    // fixed-point default; adequate when the implicit part is absent or
    // nonstiff.  Stiff problems should supply their own solver.
    VectorXd u = a;
    for (int it = 0; it < 200; ++it) {
      VectorXd next = a + gamma * f_im(u) + gamma_dot * fdot_im(u);
      const double delta = (next - u).lpNorm<Eigen::Infinity>();
      u = std::move(next);
      if (delta <= 1e-15 * (1.0 + u.lpNorm<Eigen::Infinity>())) return u;
    }
    throw StageSolveError(
        "default fixed-point stage solve did not converge; provide "
        "implicit_stage_solve");
  }

  /// Conditioning scale of the stage equation, used by the engines to set
  /// the residual-verification tolerance: the residual as re-evaluated in
  /// floating point carries roundoff amplified by the stiffness of f_im
  /// (for the relaxation model, by (gamma - gamma_dot)/epsilon).
  virtual double stage_solve_conditioning(double /*gamma*/,
                                          double /*gamma_dot*/) const {
    return 1.0;
  }

  /// Exact solution hook; used for convergence references and GLM starting
  /// values where available.
  virtual bool has_exact() const { return false; }
  virtual VectorXd exact(double /*t*/) const {
    throw std::logic_error("exact solution not provided by this system");
  }
};

/// Ring of the k most recent accepted states, oldest first.
class StepHistory {
 public:
  explicit StepHistory(int k) : k_(k) {}

  int k() const { return k_; }
  bool full() const { return static_cast<int>(states_.size()) == k_; }
  void push(VectorXd u) {
    states_.push_back(std::move(u));
    if (static_cast<int>(states_.size()) > k_) states_.pop_front();
  }
  /// Slot l in 1..k holds u^{n+l-k} (slot k is the newest state).
  const VectorXd& slot(int l) const { return states_.at(l - 1); }

 private:
  int k_;
  std::deque<VectorXd> states_;
};

struct MonitorReport {
  std::vector<double> functional;  // index 0 is the initial state
  double max_rise_per_step = 0.0;
  double max_rise_from_initial = 0.0;
  std::string starting_policy = "none";
  int bootstrap_steps = 0;
  bool positive_gamma_dot_warning = false;
};

VectorXd step_explicit(const ButcherTD& m, const SemiDiscreteSystem& sys,
                       const VectorXd& u, double dt);
VectorXd step_implicit_nd(const ImplicitNDMethod& m,
                          const SemiDiscreteSystem& sys, const VectorXd& u,
                          double dt);
VectorXd step_imex_rk(const ImexTDRK& m, const SemiDiscreteSystem& sys,
                      const VectorXd& u, double dt);
VectorXd step_imex_glm(const ImexTDGLM& m, const SemiDiscreteSystem& sys,
                       const StepHistory& hist, double dt);

enum class StartingValues { ExactIfAvailable, Bootstrap };

struct IntegrateResult {
  VectorXd u;
  MonitorReport monitor;
};

/// Drive n_steps steps of a registry method, recording the functional at
/// every step.  GLM methods draw their k starting values from the exact
/// solution when the problem provides one (unless bootstrapping is forced),
/// otherwise from the one-step IMEX method of matching order at the same
/// dt; the chosen policy is recorded in the monitor report.
IntegrateResult integrate(
    const MethodSpec& spec, const SemiDiscreteSystem& sys, const VectorXd& u0,
    double dt, int n_steps,
    StartingValues starting = StartingValues::ExactIfAvailable);

/// MonitorReport as CSV: step, t, functional, rise_from_prev,
/// rise_from_initial (schema comment line first).
std::string monitor_csv(const MonitorReport& rep, double dt);

/// Dense reference solution of u' = f_ex(u) + f_im(u) by classical RK4 with
/// n_sub substeps; used as the convergence reference where no exact solution
/// exists (nonstiff regimes only).
VectorXd rk4_reference(const SemiDiscreteSystem& sys, const VectorXd& u0,
                       double T, int n_sub);

}  // namespace tdssp
