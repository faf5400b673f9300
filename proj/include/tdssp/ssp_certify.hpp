#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "tdssp/tableaux.hpp"

// Convex-decomposition feasibility checks for two-derivative methods, the
// bisection driver that certifies maximal coefficients, the sign-condition
// certificates for the implicit/IMEX/GLM classes, and the closed-form
// coefficient formulas of the explicit families.

namespace tdssp {

struct ConditionResult {
  std::string label;
  bool pass = false;
  double worst_entry = 0.0;  // most negative entry of the transformed block
};

struct FeasibilityResult {
  bool feasible = false;
  std::vector<ConditionResult> conditions;
};

/// Transformed nonnegative decomposition weights at a given r: Re = M^{-1}e
/// (per-stage leftover of the previous solution), P the forward-Euler block,
/// Q the second-derivative / Taylor-series block.
struct TransformedWeights {
  VectorXd Re;
  MatrixXd P;
  MatrixXd Q;
};

/// Second-derivative-condition feasibility at scale r:
///   M = I + r S + (r^2/K^2) Sdot,
///   M^{-1} e >= 0,  r M^{-1} S >= 0,  (r^2/K^2) M^{-1} Sdot >= 0
/// entrywise (within -tol).  Throws on singular M (possible only for
/// non-explicit pairs).
FeasibilityResult feasible_sd(const SOPair& so, double K, double r,
                              double tol = 1e-12);

/// Taylor-series-condition feasibility at scale r:
///   M = I + r S + (2 r^2 / kappa^2)(1 - kappa) Sdot,
///   M^{-1} e >= 0,  r M^{-1}(S - (2r/kappa) Sdot) >= 0,
///   (2 r^2/kappa^2) M^{-1} Sdot >= 0.
FeasibilityResult feasible_ts(const SOPair& so, double kappa, double r,
                              double tol = 1e-12);

TransformedWeights transformed_sd(const SOPair& so, double K, double r);
TransformedWeights transformed_ts(const SOPair& so, double kappa, double r);

struct MaxROptions {
  double r_max = 100.0;
  double scan = 1e-3;
  double bisect_tol = 1e-10;
  double entry_tol = 1e-12;
  /// Continue scanning past the feasible prefix looking for detached
  /// feasible points (diagnostic only; the certified value is unchanged).
  bool full_scan_diagnostic = false;
};

struct MaxRResult {
  double r = 0.0;
  /// Set when the diagnostic scan found feasible points beyond the prefix,
  /// i.e. the feasible set is not an interval starting at 0+.
  bool non_prefix_feasibility = false;
};

/// Supremum of the contiguous feasible prefix from 0+: scan r at `scan`
/// steps, then bisect the right edge.  Returns 0 if the first scan point is
/// already infeasible.  Feasibility is not assumed monotone in r.
MaxRResult max_r(const SOPair& so, ConditionClass cls, double param,
                 const MaxROptions& opts = {});

struct Certificate {
  std::string method;
  ConditionClass condition_class = ConditionClass::SD;
  std::optional<double> param;
  /// Certified coefficient; 0 means infeasible at every r.  Ignored when
  /// `unconditional` is set (sign-based classes with no step restriction).
  double certified_r = 0.0;
  bool unconditional = false;
  std::vector<ConditionResult> conditions;
  std::optional<TransformedWeights> transformed;
};

/// Sign certificate for unconditional SSP: Re >= 0, P >= 0, D >= 0,
/// Ddot <= 0.  `unconditional` is set iff all hold.
Certificate sign_certificate_implicit(const ImplicitNDMethod& m);

/// Sign certificate for IMEX RK: Re, P, W, D >= 0 and Ddot <= 0; certified_r
/// is the method's r when the signs hold, else 0.
Certificate sign_certificate_imex(const ImexTDRK& m);

/// Sign certificate for IMEX GLMs: adds R, Gamma, Q, V >= 0.
Certificate sign_certificate_glm(const ImexTDGLM& m);

enum class ClosedFormFamily { TS, TwoStage4p, TwoStage3p, ThreeStage5p };

/// Closed-form coefficient of the named explicit family at parameter K:
/// TS has an explicit formula; 2s4p/2s3p root-find their defining
/// polynomial (smallest positive root); 3s5p solves the coupled system
/// (largest positive root).  Throws if no positive root exists.
double closed_form_C(ClosedFormFamily family, double K);

/// Full certificate for a registry method, using the bisection driver for
/// explicit classes and sign certificates otherwise.  `param` overrides the
/// method's default K/kappa when given.
Certificate certify(const MethodSpec& spec,
                    std::optional<double> param = std::nullopt,
                    const MaxROptions& opts = {});

/// {method, class, param?, certified_r | "unconditional",
///  conditions: [{label, pass, worst_entry}]}
nlohmann::json certificate_json(const Certificate& cert);

}  // namespace tdssp
