#pragma once

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

#include "tdssp/tableaux.hpp"

// Order-condition residual evaluation for two-derivative Runge-Kutta
// tableaux (p <= 6), IMEX two-derivative tableaux (p <= 3), and IMEX
// two-derivative GLMs (p <= 3).  Condition labels are stable strings in
// order of appearance ("A.p4.3" is the third p=4 condition of the
// single-operator set); two-column source tables are enumerated left column
// top-to-bottom, then the right column.

namespace tdssp {

struct OrderReport {
  int order_requested = 0;
  std::vector<std::pair<std::string, double>> residuals;
  double max_abs_residual = 0.0;
  bool satisfied = false;
  double tolerance = 0.0;
};

/// Residuals of every condition with order <= p (1 <= p <= 6).
/// Counts per order: p1:1, p2:1, p3:2, p4:4, p5:9, p6:16.
OrderReport mdrk_residuals(const ButcherTD& m, int p, double tol = 1e-12);

/// Residuals of the IMEX conditions with order <= p (1 <= p <= 3).
/// Counts per order: p1:2, p2:4, p3:14.
OrderReport imex_mdrk_residuals(const ButcherIMEX& m, int p,
                                double tol = 1e-12);

/// Residuals of the GLM conditions with order <= p (1 <= p <= 3).
/// Counts per order: p1:2, p2:4, p3:14.
OrderReport imex_glm_residuals(const ButcherGLM& m, int p,
                               double tol = 1e-12);

/// Route a registry method through the appropriate condition set (implicit
/// ND methods and explicit tableaux both use the single-operator set).
OrderReport order_check(const MethodSpec& spec, int p, double tol);

/// {method, p, residuals: [{label, value}], max_abs_residual, satisfied}
nlohmann::json order_report_json(const std::string& method,
                                 const OrderReport& report);

}  // namespace tdssp
