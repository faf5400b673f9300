#include "tdssp/ssp_certify.hpp"

#include <cmath>
#include <stdexcept>

#include "tdssp/rootfind.hpp"

namespace tdssp {

namespace {

ConditionResult check_entrywise(const std::string& label, const MatrixXd& M,
                                double tol) {
  const double worst = M.minCoeff();
  return {label, worst >= -tol, worst};
}

MatrixXd inverse_or_throw(const MatrixXd& M) {
  Eigen::FullPivLU<MatrixXd> lu(M);
  if (!lu.isInvertible())
    throw std::invalid_argument(
        "feasibility check: decomposition matrix is singular");
  return lu.inverse();
}

FeasibilityResult pack(std::vector<ConditionResult> conds) {
  FeasibilityResult out;
  out.feasible = true;
  for (const auto& c : conds) out.feasible = out.feasible && c.pass;
  out.conditions = std::move(conds);
  return out;
}

}  // namespace

FeasibilityResult feasible_sd(const SOPair& so, double K, double r,
                              double tol) {
  const int n = static_cast<int>(so.S.rows());
  const double rho = r * r / (K * K);
  const MatrixXd Minv =
      inverse_or_throw(MatrixXd::Identity(n, n) + r * so.S + rho * so.Sdot);
  return pack({check_entrywise("Minv_e", Minv * VectorXd::Ones(n), tol),
               check_entrywise("r_Minv_S", r * (Minv * so.S), tol),
               check_entrywise("rho_Minv_Sdot", rho * (Minv * so.Sdot), tol)});
}

FeasibilityResult feasible_ts(const SOPair& so, double kappa, double r,
                              double tol) {
  const int n = static_cast<int>(so.S.rows());
  const double rho = 2.0 * r * r / (kappa * kappa);
  const MatrixXd Minv = inverse_or_throw(MatrixXd::Identity(n, n) + r * so.S +
                                         rho * (1.0 - kappa) * so.Sdot);
  return pack(
      {check_entrywise("Minv_e", Minv * VectorXd::Ones(n), tol),
       check_entrywise("r_Minv_S_minus",
                       r * (Minv * (so.S - (2.0 * r / kappa) * so.Sdot)), tol),
       check_entrywise("rho_Minv_Sdot", rho * (Minv * so.Sdot), tol)});
}

TransformedWeights transformed_sd(const SOPair& so, double K, double r) {
  const int n = static_cast<int>(so.S.rows());
  const double rho = r * r / (K * K);
  const MatrixXd Minv =
      inverse_or_throw(MatrixXd::Identity(n, n) + r * so.S + rho * so.Sdot);
  return {Minv * VectorXd::Ones(n), r * (Minv * so.S), rho * (Minv * so.Sdot)};
}

TransformedWeights transformed_ts(const SOPair& so, double kappa, double r) {
  const int n = static_cast<int>(so.S.rows());
  const double rho = 2.0 * r * r / (kappa * kappa);
  const MatrixXd Minv = inverse_or_throw(MatrixXd::Identity(n, n) + r * so.S +
                                         rho * (1.0 - kappa) * so.Sdot);
  return {Minv * VectorXd::Ones(n),
          r * (Minv * (so.S - (2.0 * r / kappa) * so.Sdot)),
          rho * (Minv * so.Sdot)};
}

MaxRResult max_r(const SOPair& so, ConditionClass cls, double param,
                 const MaxROptions& opts) {
  if (param <= 0.0)
    throw std::invalid_argument("max_r: parameter must be positive");
  const auto feasible = [&](double r) {
    const auto res = cls == ConditionClass::SD
                         ? feasible_sd(so, param, r, opts.entry_tol)
                         : feasible_ts(so, param, r, opts.entry_tol);
    return res.feasible;
  };
  MaxRResult out;
  double r = opts.scan;
  if (!feasible(r)) {
    if (opts.full_scan_diagnostic) {
      for (double q = 2 * opts.scan; q <= opts.r_max; q += opts.scan)
        if (feasible(q)) {
          out.non_prefix_feasibility = true;
          break;
        }
    }
    return out;
  }
  double last = r;
  for (r += opts.scan; r <= opts.r_max; r += opts.scan) {
    if (!feasible(r)) break;
    last = r;
  }
  double lo = last, hi = std::min(last + opts.scan, opts.r_max);
  while (hi - lo > opts.bisect_tol) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      lo = mid;
    else
      hi = mid;
  }
  out.r = lo;
  if (opts.full_scan_diagnostic) {
    for (double q = hi + opts.scan; q <= opts.r_max; q += opts.scan)
      if (feasible(q)) {
        out.non_prefix_feasibility = true;
        break;
      }
  }
  return out;
}

namespace {

ConditionResult sign_cond(const std::string& label, const MatrixXd& M,
                          bool nonnegative, double tol = 0.0) {
  if (nonnegative) {
    const double worst = M.minCoeff();
    return {label, worst >= -tol, worst};
  }
  const double worstmax = M.maxCoeff();
  return {label, worstmax <= tol, worstmax};
}

Certificate from_sign_conditions(std::vector<ConditionResult> conds,
                                 double r_if_pass, bool unconditional) {
  Certificate cert;
  bool ok = true;
  for (const auto& c : conds) ok = ok && c.pass;
  cert.conditions = std::move(conds);
  if (ok) {
    cert.unconditional = unconditional;
    cert.certified_r = unconditional ? 0.0 : r_if_pass;
  }
  return cert;
}

}  // namespace

Certificate sign_certificate_implicit(const ImplicitNDMethod& m) {
  auto cert = from_sign_conditions(
      {sign_cond("Re>=0", m.Re(), true), sign_cond("P>=0", m.P(), true),
       sign_cond("D>=0", m.D(), true), sign_cond("Ddot<=0", m.Ddot(), false)},
      0.0, /*unconditional=*/true);
  cert.condition_class = ConditionClass::NDImplicit;
  return cert;
}

Certificate sign_certificate_imex(const ImexTDRK& m) {
  auto cert = from_sign_conditions(
      {sign_cond("Re>=0", m.Re(), true), sign_cond("P>=0", m.P(), true),
       sign_cond("W>=0", m.W(), true), sign_cond("D>=0", m.D(), true),
       sign_cond("Ddot<=0", m.Ddot(), false)},
      m.r(), /*unconditional=*/false);
  cert.condition_class = ConditionClass::IMEX;
  return cert;
}

Certificate sign_certificate_glm(const ImexTDGLM& m) {
  auto cert = from_sign_conditions(
      {sign_cond("R>=0", m.R(), true), sign_cond("P>=0", m.P(), true),
       sign_cond("W>=0", m.W(), true), sign_cond("D>=0", m.D(), true),
       sign_cond("Ddot<=0", m.Ddot(), false),
       sign_cond("Gamma>=0", m.Gamma(), true), sign_cond("Q>=0", m.Q(), true),
       sign_cond("V>=0", m.V(), true)},
      m.r(), /*unconditional=*/false);
  cert.condition_class = ConditionClass::IMEXGLM;
  return cert;
}

double closed_form_C(ClosedFormFamily family, double K) {
  if (K <= 0.0)
    throw std::invalid_argument("closed_form_C: parameter must be positive");
  switch (family) {
    case ClosedFormFamily::TS:
      return K * std::sqrt(2.0 + K * K) - K * K;
    case ClosedFormFamily::TwoStage4p: {
      const double K2 = K * K, K4 = K2 * K2;
      const auto poly = [&](double r) {
        return std::pow(r, 4) + 4.0 * K2 * std::pow(r, 3) -
               12.0 * K2 * r * r - 24.0 * K4 * r + 24.0 * K4;
      };
      const auto roots = detail::scan_roots(poly, 1e-6, 10.0, 1e-3, 1e-12);
      if (roots.empty())
        throw std::invalid_argument(
            "closed_form_C: quartic has no positive root");
      return roots.front();
    }
    case ClosedFormFamily::TwoStage3p:
      return explicit_2s3p(K).r;
    case ClosedFormFamily::ThreeStage5p:
      return explicit_3s5p(K).r;
  }
  throw std::invalid_argument("closed_form_C: unknown family");
}

Certificate certify(const MethodSpec& spec, std::optional<double> param,
                    const MaxROptions& opts) {
  Certificate cert;
  cert.method = spec.name;
  cert.condition_class = spec.condition_class;
  switch (spec.condition_class) {
    case ConditionClass::SD:
    case ConditionClass::TS: {
      const double p = param.value_or(spec.param.value_or(1.0));
      cert.param = p;
      const auto& td = std::get<ButcherTD>(spec.coefficients);
      const SOPair so = so_pair_from_butcher(td);
      const auto res = max_r(so, spec.condition_class, p, opts);
      cert.certified_r = res.r;
      if (res.r > 0.0) {
        const auto feas = spec.condition_class == ConditionClass::SD
                              ? feasible_sd(so, p, res.r, opts.entry_tol)
                              : feasible_ts(so, p, res.r, opts.entry_tol);
        if (!feas.feasible)
          throw std::logic_error(
              "certify: bisection edge re-check failed; feasibility is not "
              "a prefix in r");
        cert.conditions = feas.conditions;
        cert.transformed = spec.condition_class == ConditionClass::SD
                               ? transformed_sd(so, p, res.r)
                               : transformed_ts(so, p, res.r);
      } else {
        const auto feas = spec.condition_class == ConditionClass::SD
                              ? feasible_sd(so, p, opts.scan, opts.entry_tol)
                              : feasible_ts(so, p, opts.scan, opts.entry_tol);
        cert.conditions = feas.conditions;
      }
      break;
    }
    case ConditionClass::NDImplicit: {
      auto c = sign_certificate_implicit(
          std::get<ImplicitNDMethod>(spec.coefficients));
      c.method = spec.name;
      return c;
    }
    case ConditionClass::IMEX: {
      auto c = sign_certificate_imex(std::get<ImexTDRK>(spec.coefficients));
      c.method = spec.name;
      return c;
    }
    case ConditionClass::IMEXGLM: {
      auto c = sign_certificate_glm(std::get<ImexTDGLM>(spec.coefficients));
      c.method = spec.name;
      return c;
    }
  }
  return cert;
}

nlohmann::json certificate_json(const Certificate& cert) {
  nlohmann::json j;
  j["method"] = cert.method;
  j["class"] = to_string(cert.condition_class);
  if (cert.param) j["param"] = *cert.param;
  if (cert.unconditional)
    j["certified_r"] = "unconditional";
  else
    j["certified_r"] = cert.certified_r;
  nlohmann::json conds = nlohmann::json::array();
  for (const auto& c : cert.conditions)
    conds.push_back({{"label", c.label},
                     {"pass", c.pass},
                     {"worst_entry", c.worst_entry}});
  j["conditions"] = std::move(conds);
  return j;
}

}  // namespace tdssp
