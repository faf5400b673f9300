#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <optional>
#include <string>
#include <variant>
#include <vector>

// Method representations for two-derivative SSP time integrators:
// explicit/implicit two-derivative Runge-Kutta, IMEX two-derivative
// Runge-Kutta, and IMEX two-derivative general linear methods, plus the
// registry of all built-in coefficient sets and the conversions between
// the Shu-Osher-type and Butcher forms.

namespace tdssp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kConsistencyTol = 1e-12;

/// Butcher-form two-derivative tableau (A, Adot, b, bdot).
/// Abscissas c = A e and cdot = Adot e are recomputed on construction and
/// never stored independently.
class ButcherTD {
 public:
  ButcherTD(MatrixXd A, MatrixXd Adot, VectorXd b, VectorXd bdot,
            bool is_explicit);

  int stages() const { return static_cast<int>(b_.size()); }
  bool is_explicit() const { return explicit_; }
  const MatrixXd& A() const { return A_; }
  const MatrixXd& Adot() const { return Adot_; }
  const VectorXd& b() const { return b_; }
  const VectorXd& bdot() const { return bdot_; }
  const VectorXd& c() const { return c_; }
  const VectorXd& cdot() const { return cdot_; }

 private:
  MatrixXd A_, Adot_;
  VectorXd b_, bdot_;
  VectorXd c_, cdot_;
  bool explicit_;
};

/// Padded Shu-Osher matrix pair
///   S = [[A, 0], [b^T, 0]],  Sdot = [[Adot, 0], [bdot^T, 0]]
/// of size (s+1) x (s+1); the certification theorems operate on this form.
struct SOPair {
  MatrixXd S;
  MatrixXd Sdot;

  int stages() const { return static_cast<int>(S.rows()) - 1; }
};

SOPair so_pair_from_butcher(const ButcherTD& m);

/// Inverse of so_pair_from_butcher: extract (A, Adot, b, bdot) blocks.
ButcherTD butcher_from_so_pair(const SOPair& so, bool is_explicit);

/// Implicit two-derivative method with negative-derivative structure:
///   u^(i) = re_i u^n + sum_j p_ij u^(j) + dt d_ii G(u^(i)) + dt^2 ddot_ii Gdot(u^(i))
///   u^{n+1} = u^(s).
/// P is strictly lower triangular; D, Ddot are the diagonals.
class ImplicitNDMethod {
 public:
  ImplicitNDMethod(VectorXd Re, MatrixXd P, VectorXd D, VectorXd Ddot);

  int stages() const { return static_cast<int>(Re_.size()); }
  const VectorXd& Re() const { return Re_; }
  const MatrixXd& P() const { return P_; }
  const VectorXd& D() const { return D_; }
  const VectorXd& Ddot() const { return Ddot_; }

 private:
  VectorXd Re_;
  MatrixXd P_;
  VectorXd D_, Ddot_;
};

/// IMEX two-derivative Runge-Kutta method:
///   u^(i) = re_i u^n + sum_j p_ij u^(j) + sum_j w_ij (u^(j) + (dt/r) Fex(u^(j)))
///           + dt d_ii Fim(u^(i)) + dt^2 ddot_ii Fimdot(u^(i)),   u^{n+1} = u^(s).
class ImexTDRK {
 public:
  ImexTDRK(VectorXd Re, MatrixXd P, MatrixXd W, VectorXd D, VectorXd Ddot,
           double r);

  int stages() const { return static_cast<int>(Re_.size()); }
  const VectorXd& Re() const { return Re_; }
  const MatrixXd& P() const { return P_; }
  const MatrixXd& W() const { return W_; }
  const VectorXd& D() const { return D_; }
  const VectorXd& Ddot() const { return Ddot_; }
  double r() const { return r_; }

 private:
  VectorXd Re_;
  MatrixXd P_, W_;
  VectorXd D_, Ddot_;
  double r_;
};

/// k-step s-stage IMEX two-derivative general linear method.  Step slot l
/// (1-based) multiplies u^{n+l-k}, so the last column of R sees u^n.
class ImexTDGLM {
 public:
  ImexTDGLM(int k, MatrixXd R, MatrixXd P, MatrixXd W, VectorXd D,
            VectorXd Ddot, VectorXd Gamma, VectorXd Q, VectorXd V, double r);

  int steps() const { return k_; }
  int stages() const { return static_cast<int>(Q_.size()); }
  const MatrixXd& R() const { return R_; }
  const MatrixXd& P() const { return P_; }
  const MatrixXd& W() const { return W_; }
  const VectorXd& D() const { return D_; }
  const VectorXd& Ddot() const { return Ddot_; }
  const VectorXd& Gamma() const { return Gamma_; }
  const VectorXd& Q() const { return Q_; }
  const VectorXd& V() const { return V_; }
  double r() const { return r_; }

 private:
  int k_;
  MatrixXd R_, P_, W_;
  VectorXd D_, Ddot_, Gamma_, Q_, V_;
  double r_;
};

/// Butcher form of an IMEX two-derivative RK method (conversion target).
struct ButcherIMEX {
  MatrixXd Ahat, A, Adot;
  VectorXd bhat, b, bdot;
  VectorXd chat, c, cdot;  // Ahat e, A e, Adot e

  int stages() const { return static_cast<int>(b.size()); }
};

/// Butcher form of an IMEX two-derivative GLM (conversion target).
/// ell = [1-k, 2-k, ..., 0].
struct ButcherGLM {
  int k = 0;
  MatrixXd T, Ahat, A, Adot;
  VectorXd theta, bhat, b, bdot;
  VectorXd ell;

  int stages() const { return static_cast<int>(b.size()); }
};

ButcherIMEX to_butcher_imex(const ImexTDRK& m);
ButcherGLM to_butcher_glm(const ImexTDGLM& m);

/// Standard Butcher form of an implicit negative-derivative method:
/// A = (I-P)^{-1} D, Adot = (I-P)^{-1} Ddot, b/bdot the last rows.
ButcherTD to_butcher_nd(const ImplicitNDMethod& m);

// ----------------------------------------------------------------------
// Family constructors.  Those built from fixed closed forms carry no
// extra state; the parametric families also report the family parameter r
// produced by their defining root problem.

ButcherTD explicit_taylor();
ButcherTD explicit_2s4p();
ButcherTD explicit_nonssp_2s3p();

struct FamilyTableau {
  ButcherTD tableau;
  double r;  // root of the family's defining scalar problem
};

/// Two-stage third-order family in its closed form; r is the smallest
/// positive root of the family's cubic.  See the registry notes on
/// "td-2s3p": at K = 1/sqrt(2) this cubic's root (~0.4905) disagrees with
/// the certified optimum, and the closed-form b2 map is infeasible for the
/// convex-decomposition certificate at every r.  The registry entry
/// therefore stores a certificate-derived member, while this constructor
/// stays faithful to the closed form.
FamilyTableau explicit_2s3p(double K);

/// Three-stage fifth-order family; r is the largest positive root of the
/// coupled scalar system (quartic in a21 composed with a21(r)).
FamilyTableau explicit_3s5p(double K);

/// Three-stage fourth-order family for the Taylor-series condition.
/// kappa >= 1 uses the fixed-fraction method (C = 1); kappa < 1 uses the
/// rational-in-kappa coefficients (C = 2 kappa / (kappa + 1)).
ButcherTD ts_3s4p(double kappa);

ImplicitNDMethod implicit_nd(int order);  // order in {2,3,4}
ImexTDRK imex_rk(int order);              // order in {2,3}

ImexTDGLM imex_glm_1step_p2();
ImexTDGLM imex_glm_2step_p2();
ImexTDGLM imex_glm_kstep_p2(int k);  // k >= 3, C = (k-2)/(k-1)
ImexTDGLM imex_glm_2step_5stage_p3();

// ----------------------------------------------------------------------
// Registry

enum class ConditionClass { SD, TS, NDImplicit, IMEX, IMEXGLM };

std::string to_string(ConditionClass c);

using MethodCoefficients =
    std::variant<ButcherTD, ImplicitNDMethod, ImexTDRK, ImexTDGLM>;

struct MethodSpec {
  std::string name;
  std::string family;  // "explicit-td", "implicit-nd", "imex-rk", "imex-glm"
  ConditionClass condition_class;
  int order = 0;
  int steps = 1;   // k (1 for one-step classes)
  int stages = 0;  // s
  /// Certification parameter the paper pairs with this method (K or kappa);
  /// absent for sign-condition classes.
  std::optional<double> param;
  /// Reference SSP coefficient quoted for this method, when one exists.
  std::optional<double> reference_ssp_coefficient;
  /// Coefficient the certificate machinery reproduces (set where it differs
  /// from or refines the reference value; see notes).
  std::optional<double> operational_ssp_coefficient;
  bool non_ssp = false;  // experimental comparator, skipped by cert defaults
  std::vector<std::string> notes;
  MethodCoefficients coefficients;

  /// Default tolerance for order-condition checks: 1e-8 for coefficient
  /// sets stored as truncated 15-digit decimal literals, 1e-12 for closed
  /// forms.
  double order_check_tolerance = 1e-12;
};

/// Look up a registry method by identifier.  Throws std::invalid_argument
/// listing the available identifiers if the name is unknown.
const MethodSpec& lookup(const std::string& name);

/// All registry identifiers, in registration order.
const std::vector<std::string>& method_names();

/// JSON export of one registry entry: {name, class, k, s, order,
/// ssp_coefficient?, matrices as row-major arrays of decimal strings}.
/// Coefficients stored as 15-digit decimal literals are exported with those
/// exact digit strings.
nlohmann::json registry_entry_json(const MethodSpec& spec);

}  // namespace tdssp
