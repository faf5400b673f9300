#include "tdssp/integrators.hpp"

#include <cmath>
#include <sstream>

namespace tdssp {

namespace {

bool finite(const VectorXd& u) { return u.allFinite(); }

void check_stage_residual(const SemiDiscreteSystem& sys, const VectorXd& u,
                          const VectorXd& a, double gamma, double gamma_dot) {
  if (gamma == 0.0 && gamma_dot == 0.0) return;
  const VectorXd res = u - a - gamma * sys.f_im(u) - gamma_dot * sys.fdot_im(u);
  const double tol = 1e-12 * (1.0 + a.lpNorm<Eigen::Infinity>()) *
                     std::max(1.0, sys.stage_solve_conditioning(gamma, gamma_dot));
  if (res.lpNorm<Eigen::Infinity>() > tol) {
    std::ostringstream msg;
    msg << "implicit stage residual " << res.lpNorm<Eigen::Infinity>()
        << " exceeds " << tol;
    throw StageSolveError(msg.str());
  }
}

}  // namespace

VectorXd step_explicit(const ButcherTD& m, const SemiDiscreteSystem& sys,
                       const VectorXd& u, double dt) {
  if (!m.is_explicit())
    throw std::invalid_argument("step_explicit: tableau is not explicit");
  const int s = m.stages();
  std::vector<VectorXd> F(s), Fd(s);
  for (int i = 0; i < s; ++i) {
    VectorXd y = u;
    for (int j = 0; j < i; ++j) {
      if (m.A()(i, j) != 0.0) y += dt * m.A()(i, j) * F[j];
      if (m.Adot()(i, j) != 0.0) y += dt * dt * m.Adot()(i, j) * Fd[j];
    }
    if (!finite(y)) throw BlowUpError(i, "non-finite stage state");
    F[i] = sys.f_ex(y);
    Fd[i] = sys.fdot_ex(y);
  }
  VectorXd out = u;
  for (int j = 0; j < s; ++j) {
    if (m.b()(j) != 0.0) out += dt * m.b()(j) * F[j];
    if (m.bdot()(j) != 0.0) out += dt * dt * m.bdot()(j) * Fd[j];
  }
  return out;
}

VectorXd step_implicit_nd(const ImplicitNDMethod& m,
                          const SemiDiscreteSystem& sys, const VectorXd& u,
                          double dt) {
  const int s = m.stages();
  std::vector<VectorXd> y(s);
  for (int i = 0; i < s; ++i) {
    VectorXd a = m.Re()(i) * u;
    for (int j = 0; j < i; ++j)
      if (m.P()(i, j) != 0.0) a += m.P()(i, j) * y[j];
    const double gamma = dt * m.D()(i);
    const double gamma_dot = dt * dt * m.Ddot()(i);
    y[i] = sys.implicit_stage_solve(a, gamma, gamma_dot);
    check_stage_residual(sys, y[i], a, gamma, gamma_dot);
    if (!finite(y[i])) throw BlowUpError(i, "non-finite stage state");
  }
  return y[s - 1];
}

VectorXd step_imex_rk(const ImexTDRK& m, const SemiDiscreteSystem& sys,
                      const VectorXd& u, double dt) {
  const int s = m.stages();
  std::vector<VectorXd> y(s), fe(s);
  for (int i = 0; i < s; ++i) {
    VectorXd a = m.Re()(i) * u;
    for (int j = 0; j < i; ++j) {
      if (m.P()(i, j) != 0.0) a += m.P()(i, j) * y[j];
      if (m.W()(i, j) != 0.0)
        a += m.W()(i, j) * (y[j] + (dt / m.r()) * fe[j]);
    }
    const double gamma = dt * m.D()(i);
    const double gamma_dot = dt * dt * m.Ddot()(i);
    y[i] = sys.implicit_stage_solve(a, gamma, gamma_dot);
    check_stage_residual(sys, y[i], a, gamma, gamma_dot);
    if (!finite(y[i])) throw BlowUpError(i, "non-finite stage state");
    fe[i] = sys.f_ex(y[i]);
  }
  return y[s - 1];
}

VectorXd step_imex_glm(const ImexTDGLM& m, const SemiDiscreteSystem& sys,
                       const StepHistory& hist, double dt) {
  if (!hist.full() || hist.k() != m.steps())
    throw std::invalid_argument(
        "step_imex_glm: history must hold exactly k states");
  const int s = m.stages();
  const int k = m.steps();
  std::vector<VectorXd> y(s), fe(s);
  for (int i = 0; i < s; ++i) {
    VectorXd a = VectorXd::Zero(sys.dim());
    for (int l = 1; l <= k; ++l)
      if (m.R()(i, l - 1) != 0.0) a += m.R()(i, l - 1) * hist.slot(l);
    for (int j = 0; j < i; ++j) {
      if (m.P()(i, j) != 0.0) a += m.P()(i, j) * y[j];
      if (m.W()(i, j) != 0.0)
        a += m.W()(i, j) * (y[j] + (dt / m.r()) * fe[j]);
    }
    const double gamma = dt * m.D()(i);
    const double gamma_dot = dt * dt * m.Ddot()(i);
    y[i] = sys.implicit_stage_solve(a, gamma, gamma_dot);
    check_stage_residual(sys, y[i], a, gamma, gamma_dot);
    if (!finite(y[i])) throw BlowUpError(i, "non-finite stage state");
    fe[i] = sys.f_ex(y[i]);
  }
  VectorXd out = VectorXd::Zero(sys.dim());
  for (int l = 1; l <= k; ++l)
    if (m.Gamma()(l - 1) != 0.0) out += m.Gamma()(l - 1) * hist.slot(l);
  for (int j = 0; j < s; ++j) {
    if (m.Q()(j) != 0.0) out += m.Q()(j) * y[j];
    if (m.V()(j) != 0.0) out += m.V()(j) * (y[j] + (dt / m.r()) * fe[j]);
  }
  return out;
}

namespace {

bool has_positive_gamma_dot(const MethodSpec& spec, double dt) {
  const VectorXd* dd = nullptr;
  if (const auto* nd = std::get_if<ImplicitNDMethod>(&spec.coefficients))
    dd = &nd->Ddot();
  else if (const auto* rk = std::get_if<ImexTDRK>(&spec.coefficients))
    dd = &rk->Ddot();
  else if (const auto* glm = std::get_if<ImexTDGLM>(&spec.coefficients))
    dd = &glm->Ddot();
  return dd != nullptr && dt * dt * dd->maxCoeff() > 0.0;
}

}  // namespace

IntegrateResult integrate(const MethodSpec& spec,
                          const SemiDiscreteSystem& sys, const VectorXd& u0,
                          double dt, int n_steps, StartingValues starting) {
  if (n_steps < 1)
    throw std::invalid_argument("integrate: n_steps must be >= 1");

  MonitorReport rep;
  rep.positive_gamma_dot_warning = has_positive_gamma_dot(spec, dt);
  const double f0 = sys.functional(u0);
  rep.functional.push_back(f0);

  const auto record = [&](const VectorXd& u, int step) {
    const double f = sys.functional(u);
    if (!std::isfinite(f) || !u.allFinite() || f > 1e10 * std::max(f0, 1.0))
      throw BlowUpError(step, "solution blow-up detected");
    rep.max_rise_per_step =
        std::max(rep.max_rise_per_step, f - rep.functional.back());
    rep.max_rise_from_initial = std::max(rep.max_rise_from_initial, f - f0);
    rep.functional.push_back(f);
  };

  if (const auto* glm = std::get_if<ImexTDGLM>(&spec.coefficients)) {
    const int k = glm->steps();
    StepHistory hist(k);
    hist.push(u0);
    int produced = 0;  // accepted steps beyond u0
    if (k > 1) {
      if (starting == StartingValues::ExactIfAvailable && sys.has_exact()) {
        rep.starting_policy = "exact";
        for (int i = 1; i < k && produced < n_steps; ++i) {
          VectorXd u = sys.exact(i * dt);
          record(u, ++produced - 1);
          hist.push(std::move(u));
          ++rep.bootstrap_steps;
        }
      } else {
        rep.starting_policy =
            spec.order >= 3 ? "bootstrap:imex-rk-p3" : "bootstrap:imex-rk-p2";
        const auto& boot = std::get<ImexTDRK>(
            lookup(spec.order >= 3 ? "imex-rk-p3" : "imex-rk-p2")
                .coefficients);
        VectorXd u = u0;
        for (int i = 1; i < k && produced < n_steps; ++i) {
          u = step_imex_rk(boot, sys, u, dt);
          record(u, ++produced - 1);
          hist.push(u);
          ++rep.bootstrap_steps;
        }
      }
    }
    VectorXd u = u0;
    while (produced < n_steps) {
      u = step_imex_glm(*glm, sys, hist, dt);
      record(u, produced++);
      hist.push(u);
    }
    return {hist.slot(hist.k()), std::move(rep)};
  }

  VectorXd u = u0;
  for (int n = 0; n < n_steps; ++n) {
    if (const auto* td = std::get_if<ButcherTD>(&spec.coefficients))
      u = step_explicit(*td, sys, u, dt);
    else if (const auto* nd = std::get_if<ImplicitNDMethod>(&spec.coefficients))
      u = step_implicit_nd(*nd, sys, u, dt);
    else
      u = step_imex_rk(std::get<ImexTDRK>(spec.coefficients), sys, u, dt);
    record(u, n);
  }
  return {std::move(u), std::move(rep)};
}

VectorXd rk4_reference(const SemiDiscreteSystem& sys, const VectorXd& u0,
                       double T, int n_sub) {
  const double h = T / n_sub;
  const auto rhs = [&](const VectorXd& u) -> VectorXd {
    return sys.f_ex(u) + sys.f_im(u);
  };
  VectorXd u = u0;
  for (int n = 0; n < n_sub; ++n) {
    const VectorXd k1 = rhs(u);
    const VectorXd k2 = rhs(u + 0.5 * h * k1);
    const VectorXd k3 = rhs(u + 0.5 * h * k2);
    const VectorXd k4 = rhs(u + h * k3);
    u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return u;
}

std::string monitor_csv(const MonitorReport& rep, double dt) {
  std::ostringstream out;
  out.precision(17);
  out << "# monitor-csv v1: step,t,functional,rise_from_prev,"
         "rise_from_initial\n";
  out << "# starting_policy=" << rep.starting_policy << "\n";
  for (std::size_t n = 0; n < rep.functional.size(); ++n) {
    const double f = rep.functional[n];
    const double prev = n == 0 ? f : rep.functional[n - 1];
    out << n << "," << n * dt << "," << f << "," << (n == 0 ? 0.0 : f - prev)
        << "," << f - rep.functional.front() << "\n";
  }
  return out.str();
}

}  // namespace tdssp
