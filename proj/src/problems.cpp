#include "tdssp/problems.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tdssp {

double total_variation(const VectorXd& u) {
  const auto n = u.size();
  double tv = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    tv += std::abs(u((j + 1) % n) - u(j));
  return tv;
}

std::string grid_csv(const VectorXd& u, double dx) {
  std::ostringstream out;
  out.precision(17);
  out << "# grid-csv v1: j,x,u\n";
  for (Eigen::Index j = 0; j < u.size(); ++j)
    out << j << "," << (j + 0.5) * dx << "," << u(j) << "\n";
  return out.str();
}

VectorXd step_ic(int m) {
  if (m < 4) throw std::invalid_argument("step_ic: need m >= 4");
  VectorXd u = VectorXd::Zero(m);
  for (int j = 0; j < m; ++j) {
    const double x = (j + 0.5) / m;
    if (x >= 0.25 && x <= 0.5) u(j) = 1.0;
  }
  return u;
}

VectorXd upwind_diff(const VectorXd& u, double dx) {
  const auto n = u.size();
  VectorXd out(n);
  for (Eigen::Index j = 0; j < n; ++j)
    out(j) = (u((j + 1) % n) - u(j)) / dx;
  return out;
}

VectorXd centered_diff2(const VectorXd& u, double dx) {
  const auto n = u.size();
  VectorXd out(n);
  for (Eigen::Index j = 0; j < n; ++j)
    out(j) = (u((j + 1) % n) - 2.0 * u(j) + u((j + n - 1) % n)) / (dx * dx);
  return out;
}

VectorXd squared_upwind_diff2(const VectorXd& u, double dx) {
  const auto n = u.size();
  VectorXd out(n);
  for (Eigen::Index j = 0; j < n; ++j)
    out(j) = (u((j + 2) % n) - 2.0 * u((j + 1) % n) + u(j)) / (dx * dx);
  return out;
}

AdvectionProblem::AdvectionProblem(int m, FdotVariant variant)
    : m_(m), dx_(1.0 / m), variant_(variant) {
  if (m < 4) throw std::invalid_argument("AdvectionProblem: need m >= 4");
}

// ----------------------------------------------------------------------

RelaxationBase::RelaxationBase(double epsilon, double slope)
    : epsilon_(epsilon), slope_(slope) {
  if (epsilon <= 0.0)
    throw std::invalid_argument("relaxation: epsilon must be positive");
  if (std::abs(slope) > 1.0)
    throw std::invalid_argument("relaxation: |slope| must be <= 1");
}

VectorXd RelaxationBase::project(const VectorXd& u) const {
  const auto n = u.size() / 2;
  VectorXd out(u.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    const double mass = (u(j) + u(n + j)) / (1.0 + slope_);
    out(j) = mass;
    out(n + j) = slope_ * mass;
  }
  return out;
}

VectorXd RelaxationBase::implicit_stage_solve(const VectorXd& a, double gamma,
                                              double gamma_dot) const {
  const double mu = (gamma - gamma_dot) / epsilon_;
  if (mu == 0.0) return a;
  const VectorXd ga = project(a);
  return ga + (a - ga) / (1.0 + mu);
}

RelaxationODE::RelaxationODE(double epsilon, double slope, bool with_drift)
    : RelaxationBase(epsilon, slope), with_drift_(with_drift) {}

VectorXd RelaxationODE::f_ex(const VectorXd& u) const {
  VectorXd out = VectorXd::Zero(2);
  if (with_drift_) {
    out(0) = u(1);
    out(1) = -std::sin(u(0));
  }
  return out;
}

RelaxationPDE::RelaxationPDE(int m, double epsilon, double slope)
    : RelaxationBase(epsilon, slope), m_(m), dx_(1.0 / m) {
  if (m < 4) throw std::invalid_argument("RelaxationPDE: need m >= 4");
}

double RelaxationPDE::functional(const VectorXd& u) const {
  return total_variation(u.head(m_)) + total_variation(u.tail(m_));
}

VectorXd RelaxationPDE::f_ex(const VectorXd& u) const {
  VectorXd out(2 * m_);
  for (int j = 0; j < m_; ++j) {
    // component 1 moves right (upwind is the left neighbour)
    out(j) = -(u(j) - u((j + m_ - 1) % m_)) / dx_;
    // component 2 moves left (upwind is the right neighbour)
    out(m_ + j) = (u(m_ + (j + 1) % m_) - u(m_ + j)) / dx_;
  }
  return out;
}

VectorXd RelaxationPDE::step_initial_state() const {
  VectorXd u = VectorXd::Zero(2 * m_);
  u.head(m_) = step_ic(m_);
  return u;
}

// ----------------------------------------------------------------------

VectorXd RiccatiODE::f_ex(const VectorXd& u) const {
  VectorXd out(1);
  out(0) = -u(0) * u(0);
  return out;
}

VectorXd RiccatiODE::fdot_ex(const VectorXd& u) const {
  VectorXd out(1);
  out(0) = 2.0 * u(0) * u(0) * u(0);
  return out;
}

VectorXd RiccatiODE::implicit_stage_solve(const VectorXd& a, double gamma,
                                          double gamma_dot) const {
  // Scalar Newton for u = a + gamma (-u^2) + gamma_dot (2u^3).
  const double a0 = a(0);
  double u = a0;
  for (int it = 0; it < 100; ++it) {
    const double g = u - a0 + gamma * u * u - 2.0 * gamma_dot * u * u * u;
    const double dg = 1.0 + 2.0 * gamma * u - 6.0 * gamma_dot * u * u;
    const double du = g / dg;
    u -= du;
    if (std::abs(du) < 1e-16 * (1.0 + std::abs(u))) break;
  }
  VectorXd out(1);
  out(0) = u;
  return out;
}

VectorXd RiccatiODE::exact(double t) const {
  VectorXd out(1);
  out(0) = u0_ / (1.0 + u0_ * t);
  return out;
}

VectorXd RiccatiODE::initial_state() const {
  VectorXd out(1);
  out(0) = u0_;
  return out;
}

}  // namespace tdssp
