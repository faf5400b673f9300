#include <doctest.h>

#include <cmath>

#include "tdssp/ssp_certify.hpp"
#include "tdssp/tableaux.hpp"

using namespace tdssp;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_CASE("taylor feasibility brackets the closed form") {
  const auto so = so_pair_from_butcher(explicit_taylor());
  CHECK(feasible_sd(so, kInvSqrt2, 0.61).feasible);
  CHECK_FALSE(feasible_sd(so, kInvSqrt2, 0.63).feasible);
  // small r with nonnegative S, Sdot is always feasible
  CHECK(feasible_sd(so, kInvSqrt2, 1e-8).feasible);
}

TEST_CASE("max_r matches closed forms") {
  const auto so_ts = so_pair_from_butcher(explicit_taylor());
  const auto so_24 = so_pair_from_butcher(explicit_2s4p());
  for (double K : {kInvSqrt2, 1.0}) {
    CAPTURE(K);
    const double r_ts = max_r(so_ts, ConditionClass::SD, K).r;
    CHECK(std::abs(r_ts - closed_form_C(ClosedFormFamily::TS, K)) <= 1e-4);
    const double r_24 = max_r(so_24, ConditionClass::SD, K).r;
    CHECK(std::abs(r_24 - closed_form_C(ClosedFormFamily::TwoStage4p, K)) <=
          1e-4);
  }
  CHECK(closed_form_C(ClosedFormFamily::TS, kInvSqrt2) ==
        doctest::Approx(0.618034).epsilon(1e-6));
  CHECK(closed_form_C(ClosedFormFamily::TwoStage4p, kInvSqrt2) ==
        doctest::Approx(0.67885).epsilon(2e-4));
  // series limit: C -> 1 as K grows
  const double big = closed_form_C(ClosedFormFamily::TS, 100.0);
  CHECK(big > 0.99);
  CHECK(big < 1.0);
}

TEST_CASE("table coefficients reproduced by bisection") {
  const auto so24 = so_pair_from_butcher(explicit_2s4p());
  CHECK(max_r(so24, ConditionClass::SD, kInvSqrt2).r ==
        doctest::Approx(0.6788).epsilon(1e-3));
  const auto fam = explicit_3s5p(kInvSqrt2);
  const auto so35 = so_pair_from_butcher(fam.tableau);
  // the family root and the certificate agree to bisection accuracy
  CHECK(max_r(so35, ConditionClass::SD, kInvSqrt2).r ==
        doctest::Approx(fam.r).epsilon(1e-6));
  // registry 2s3p member certifies at the operational 1.0400
  const auto& spec = lookup("td-2s3p");
  const auto so23 = so_pair_from_butcher(std::get<ButcherTD>(spec.coefficients));
  CHECK(max_r(so23, ConditionClass::SD, kInvSqrt2).r ==
        doctest::Approx(1.040070424995173).epsilon(1e-7));
}

TEST_CASE("non-SSP comparator is infeasible at every r") {
  const auto so = so_pair_from_butcher(explicit_nonssp_2s3p());
  const auto res = max_r(so, ConditionClass::SD, kInvSqrt2,
                         {.r_max = 5.0, .full_scan_diagnostic = true});
  CHECK(res.r == 0.0);
  CHECK_FALSE(res.non_prefix_feasibility);
}

TEST_CASE("TS condition certificates") {
  // ts_3s4p has C = 1 at kappa = 1 (feasible below, infeasible above)
  const auto so = so_pair_from_butcher(ts_3s4p(1.0));
  CHECK(feasible_ts(so, 1.0, 0.99).feasible);
  CHECK_FALSE(feasible_ts(so, 1.0, 1.01).feasible);
  CHECK(max_r(so, ConditionClass::TS, 1.0).r == doctest::Approx(1.0).epsilon(1e-6));
  // C = 2 kappa / (kappa + 1) across the family
  for (double kap : {0.25, 0.5, 0.8}) {
    CAPTURE(kap);
    const auto sok = so_pair_from_butcher(ts_3s4p(kap));
    CHECK(max_r(sok, ConditionClass::TS, kap).r ==
          doctest::Approx(2.0 * kap / (kap + 1.0)).epsilon(1e-6));
  }
  // 2s4p cannot be decomposed over the Taylor-series building block
  const auto so24 = so_pair_from_butcher(explicit_2s4p());
  const double r24 = closed_form_C(ClosedFormFamily::TwoStage4p, kInvSqrt2);
  for (double kap : {0.5, 1.0, 2.0}) {
    CAPTURE(kap);
    CHECK_FALSE(feasible_ts(so24, kap, r24).feasible);
  }
}

TEST_CASE("monotone re-check at half the certified coefficient") {
  for (const auto& name : method_names()) {
    const auto& spec = lookup(name);
    if (spec.non_ssp) continue;
    if (spec.condition_class != ConditionClass::SD &&
        spec.condition_class != ConditionClass::TS)
      continue;
    CAPTURE(name);
    const auto so =
        so_pair_from_butcher(std::get<ButcherTD>(spec.coefficients));
    const double r = max_r(so, spec.condition_class, *spec.param).r;
    REQUIRE(r > 0.0);
    const auto feas = spec.condition_class == ConditionClass::SD
                          ? feasible_sd(so, *spec.param, r / 2.0)
                          : feasible_ts(so, *spec.param, r / 2.0);
    CHECK(feas.feasible);
  }
}

TEST_CASE("sign certificates for implicit methods") {
  for (int p : {2, 3, 4}) {
    CAPTURE(p);
    const auto cert = sign_certificate_implicit(implicit_nd(p));
    CHECK(cert.unconditional);
  }
  // flipped derivative sign must fail the Ddot condition
  VectorXd Re(1), D(1), Dd(1);
  Re << 1.0;
  D << 1.0;
  Dd << 0.5;
  const auto bad =
      sign_certificate_implicit(ImplicitNDMethod(Re, MatrixXd::Zero(1, 1), D, Dd));
  CHECK_FALSE(bad.unconditional);
  bool found = false;
  for (const auto& c : bad.conditions)
    if (c.label == "Ddot<=0") {
      found = true;
      CHECK_FALSE(c.pass);
    }
  CHECK(found);
}

TEST_CASE("sign certificates for IMEX and GLM methods") {
  CHECK(sign_certificate_imex(imex_rk(3)).certified_r ==
        doctest::Approx(0.904402174130635).epsilon(1e-15));
  CHECK(sign_certificate_glm(imex_glm_2step_p2()).certified_r ==
        doctest::Approx(1.5468).epsilon(1e-4));
  CHECK(sign_certificate_glm(imex_glm_kstep_p2(4)).certified_r ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(sign_certificate_glm(imex_glm_kstep_p2(5)).certified_r ==
        doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("2s4p transformed weights reproduce the printed decomposition") {
  const double K = kInvSqrt2;
  const auto so = so_pair_from_butcher(explicit_2s4p());
  const double r = max_r(so, ConditionClass::SD, K).r;
  const auto w = transformed_sd(so, K, r);
  // stage-1 forward-Euler weight r/2 and second-derivative weight r^2/(8K^2)
  CHECK(w.P(1, 0) == doctest::Approx(r / 2.0).epsilon(1e-8));
  CHECK(w.Q(1, 0) == doctest::Approx(r * r / (8.0 * K * K)).epsilon(1e-8));
  // output row of the printed optimal decomposition
  CHECK(w.P(2, 0) ==
        doctest::Approx(r * (1.0 - r * r / (6.0 * K * K))).epsilon(1e-8));
  CHECK(w.Q(2, 0) ==
        doctest::Approx(r * r * (4.0 * K * K - r * r) /
                        (24.0 * std::pow(K, 4)))
            .epsilon(1e-8));
  CHECK(w.Q(2, 1) == doctest::Approx(r * r / (3.0 * K * K)).epsilon(1e-8));
  // leftover u^n weight of stage 1
  CHECK(w.Re(1) ==
        doctest::Approx(1.0 - r / 2.0 - r * r / (8.0 * K * K)).epsilon(1e-8));
}

TEST_CASE("certify dispatch and JSON") {
  const auto cert = certify(lookup("nd-implicit-p4"));
  CHECK(cert.unconditional);
  const auto j = certificate_json(cert);
  CHECK(j["certified_r"] == "unconditional");

  const auto c2 = certify(lookup("td-ts"));
  CHECK(c2.certified_r == doctest::Approx(0.618034).epsilon(1e-5));
  const auto j2 = certificate_json(c2);
  CHECK(j2["certified_r"].get<double>() ==
        doctest::Approx(0.618034).epsilon(1e-5));
  CHECK(j2["conditions"].size() == 3);

  const auto c3 = certify(lookup("imex-glm-kstep-p2"));
  CHECK(c3.certified_r == doctest::Approx(0.5));
}

TEST_CASE("closed_form_C error paths") {
  CHECK_THROWS_AS((void)closed_form_C(ClosedFormFamily::TS, -2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)closed_form_C(ClosedFormFamily::ThreeStage5p, 2.67),
                  std::invalid_argument);
}
