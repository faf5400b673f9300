#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <random>

#include "tdssp/order_conditions.hpp"
#include "tdssp/tableaux.hpp"

using namespace tdssp;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_CASE("registry lookup and identifiers") {
  CHECK(method_names().size() >= 12);
  const auto& ts = lookup("td-ts");
  const auto& td = std::get<ButcherTD>(ts.coefficients);
  CHECK(td.stages() == 1);
  CHECK(td.b()(0) == 1.0);
  CHECK(td.bdot()(0) == 0.5);

  const auto& glm = lookup("imex-glm-2step-5stage-p3");
  CHECK(std::get<ImexTDGLM>(glm.coefficients).r() ==
        doctest::Approx(1.080445742835932).epsilon(1e-15));
  CHECK_THROWS_AS((void)lookup("no-such"), std::invalid_argument);
  CHECK_THROWS_WITH_AS((void)lookup("no-such"),
                       doctest::Contains("available:"),
                       std::invalid_argument);
  // alias for the long identifier
  CHECK(lookup("imex-glm-2step-p3").name == "imex-glm-2step-5stage-p3");
}

TEST_CASE("registry methods satisfy their type invariants") {
  for (const auto& name : method_names()) {
    CAPTURE(name);
    CHECK_NOTHROW((void)lookup(name));  // constructors enforce consistency
  }
}

TEST_CASE("explicit 2s4p tableau") {
  const auto m = explicit_2s4p();
  CHECK(m.A()(1, 0) == 0.5);
  CHECK(m.Adot()(1, 0) == 1.0 / 8.0);
  CHECK(m.c()(0) == 0.0);
  CHECK(m.c()(1) == 0.5);
  CHECK(m.b()(0) == 1.0);
  CHECK(m.bdot()(1) == doctest::Approx(2.0 / 6.0).epsilon(1e-16));
  const auto rep = mdrk_residuals(m, 4);
  CHECK(rep.max_abs_residual < 1e-14);
}

TEST_CASE("explicit 2s3p printed formulas") {
  CHECK_THROWS_AS((void)explicit_2s3p(-1.0), std::invalid_argument);
  const auto fam = explicit_2s3p(kInvSqrt2);
  // a0 = sqrt(2.5) - 1/sqrt(2); cubic root near 0.4905
  const double a0 = std::sqrt(kInvSqrt2 * kInvSqrt2 + 2.0) - kInvSqrt2;
  CHECK(a0 == doctest::Approx(0.874032).epsilon(1e-6));
  CHECK(fam.r == doctest::Approx(0.49051000813169).epsilon(1e-9));
  // every family member is third order
  for (double K : {0.3, 0.7, 1.0, 2.5}) {
    CAPTURE(K);
    const auto f = explicit_2s3p(K);
    CHECK(mdrk_residuals(f.tableau, 3).max_abs_residual < 1e-12);
  }
}

TEST_CASE("registry td-2s3p is third order with operational r 1.0400") {
  const auto& spec = lookup("td-2s3p");
  const auto& td = std::get<ButcherTD>(spec.coefficients);
  CHECK(mdrk_residuals(td, 3).max_abs_residual < 1e-14);
  REQUIRE(spec.operational_ssp_coefficient.has_value());
  CHECK(*spec.operational_ssp_coefficient ==
        doctest::Approx(1.0400).epsilon(1e-4));
  // a = K a0 / r ties the stored tableau to the printed a-formula
  const double a0 = std::sqrt(0.5 + 2.0) - kInvSqrt2;
  CHECK(td.A()(1, 0) ==
        doctest::Approx(kInvSqrt2 * a0 / *spec.operational_ssp_coefficient)
            .epsilon(1e-12));
}

TEST_CASE("explicit 3s5p family") {
  const auto fam = explicit_3s5p(kInvSqrt2);
  CHECK(fam.r == doctest::Approx(0.6746).epsilon(2e-4));
  CHECK(mdrk_residuals(fam.tableau, 5).max_abs_residual < 1e-9);
  // bdot entries sum to 1/2 by construction
  CHECK(fam.tableau.bdot().sum() == doctest::Approx(0.5).epsilon(1e-14));
  for (double K : {0.4, 1.0, 1.7}) {
    CAPTURE(K);
    const auto f = explicit_3s5p(K);
    CHECK(mdrk_residuals(f.tableau, 5).max_abs_residual < 1e-9);
  }
}

TEST_CASE("taylor and non-SSP comparator") {
  const auto ts = explicit_taylor();
  CHECK(ts.b()(0) == 1.0);
  CHECK(ts.bdot()(0) == 0.5);
  const auto bad = explicit_nonssp_2s3p();
  CHECK(bad.b()(0) == doctest::Approx(-1.0 / 3.0));
  CHECK(bad.b()(1) == doctest::Approx(4.0 / 3.0));
  // the comparator is genuinely third order
  CHECK(mdrk_residuals(bad, 3).max_abs_residual < 1e-14);
  CHECK(lookup("td-2s3p-nonssp").non_ssp);
}

TEST_CASE("ts_3s4p branches") {
  const auto hi = ts_3s4p(1.0);  // kappa >= 1 branch, printed fractions
  CHECK(hi.b()(0) == doctest::Approx(17.0 / 48.0).epsilon(1e-16));
  CHECK(hi.b()(1) == doctest::Approx(4.0 / 48.0).epsilon(1e-16));
  CHECK(hi.b()(2) == doctest::Approx(27.0 / 48.0).epsilon(1e-16));
  CHECK(hi.A()(2, 0) == doctest::Approx(14.0 / 27.0).epsilon(1e-16));
  CHECK(hi.A()(2, 1) == doctest::Approx(4.0 / 27.0).epsilon(1e-16));

  // kappa<=1 formulas evaluated at kappa=1 reproduce the printed method
  const auto lo = [] {
    // build through the kappa<1 branch by nudging just below 1
    return ts_3s4p(std::nextafter(1.0, 0.0));
  }();
  CHECK((lo.A() - hi.A()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((lo.b() - hi.b()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((lo.bdot() - hi.bdot()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(lo.A()(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lo.Adot()(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(lo.b()(1) == doctest::Approx(1.0 / 12.0).epsilon(1e-12));

  for (double kap : {0.25, 0.6, 1.0, 3.7}) {
    CAPTURE(kap);
    CHECK(mdrk_residuals(ts_3s4p(kap), 4).max_abs_residual < 1e-12);
  }
}

TEST_CASE("implicit ND methods") {
  CHECK_THROWS_AS((void)implicit_nd(5), std::invalid_argument);
  const auto p2 = implicit_nd(2);
  CHECK(p2.stages() == 1);
  CHECK(p2.Re()(0) == 1.0);
  CHECK(p2.D()(0) == 1.0);
  CHECK(p2.Ddot()(0) == -0.5);
  const auto p3 = implicit_nd(3);
  CHECK(p3.D()(0) == 0.0);
  CHECK(p3.D()(1) == 1.0);
  CHECK(p3.Ddot()(0) == doctest::Approx(-1.0 / 6.0));
  CHECK(p3.Ddot()(1) == doctest::Approx(-1.0 / 3.0));
  CHECK(p3.P()(1, 0) == 1.0);
  const auto p4 = implicit_nd(4);
  CHECK(p4.D()(0) == doctest::Approx(0.660949255604937).epsilon(1e-16));
  CHECK(p4.Ddot()(0) == doctest::Approx(-0.177750705279127).epsilon(1e-16));
  CHECK(p4.Re()(3) == doctest::Approx(0.908233497673956).epsilon(1e-16));
  for (int p : {2, 3, 4}) {
    CAPTURE(p);
    const auto m = implicit_nd(p);
    CHECK(m.D().minCoeff() >= 0.0);
    CHECK(m.Ddot().maxCoeff() <= 0.0);
  }
}

TEST_CASE("imex RK methods") {
  CHECK_THROWS_AS((void)imex_rk(4), std::invalid_argument);
  const auto p2 = imex_rk(2);
  CHECK(p2.r() == 1.0);
  CHECK(p2.Re()(0) == 1.0);
  // stage 2 consistency: r2 + w21 = 0 + 1
  CHECK(p2.Re()(1) + p2.W()(1, 0) == doctest::Approx(1.0));
  CHECK(p2.P()(2, 0) == 0.5);
  CHECK(p2.W()(2, 1) == 0.5);
  const auto p3 = imex_rk(3);
  CHECK(p3.D()(1) == 2.0);
  CHECK(p3.Ddot()(4) == -2.0);
  CHECK(p3.W()(5, 3) == doctest::Approx(0.448630511341543).epsilon(1e-16));
  CHECK(p3.D().minCoeff() >= 0.0);
  CHECK(p3.Ddot().maxCoeff() <= 0.0);
  CHECK(p3.r() == doctest::Approx(0.904402174130635).epsilon(1e-16));
}

TEST_CASE("imex GLM methods") {
  CHECK_THROWS_AS((void)imex_glm_kstep_p2(2), std::invalid_argument);
  const auto k3 = imex_glm_kstep_p2(3);
  CHECK(k3.r() == doctest::Approx(0.5));
  CHECK(k3.Ddot()(0) == doctest::Approx(-2.0));  // -(k-1)
  const auto k5 = imex_glm_kstep_p2(5);
  CHECK(k5.r() == doctest::Approx(0.75));

  const auto two = imex_glm_2step_p2();
  CHECK(two.r() == doctest::Approx(1.5468).epsilon(1e-4));
  CHECK(two.Ddot()(2) ==
        doctest::Approx(-2.0 / (two.V()(2) + two.Q()(2))).epsilon(1e-12));

  const auto p3 = imex_glm_2step_5stage_p3();
  CHECK(p3.steps() == 3);
  CHECK(p3.Gamma().cwiseAbs().maxCoeff() == 0.0);
  CHECK(p3.Q()(4) == doctest::Approx(0.041812814961867).epsilon(1e-16));

  for (const auto* m : {&k3, &k5, &two, &p3}) {
    CHECK(m->D().minCoeff() >= 0.0);
    CHECK(m->Ddot().maxCoeff() <= 0.0);
  }
}

TEST_CASE("SO pair assembly and round trip") {
  const auto ts = explicit_taylor();
  const auto so = so_pair_from_butcher(ts);
  CHECK(so.S(1, 0) == 1.0);
  CHECK(so.Sdot(1, 0) == 0.5);
  CHECK(so.S(0, 1) == 0.0);

  const auto m24 = explicit_2s4p();
  const auto so24 = so_pair_from_butcher(m24);
  CHECK(so24.Sdot(2, 0) == doctest::Approx(1.0 / 6.0));
  CHECK(so24.Sdot(2, 1) == doctest::Approx(2.0 / 6.0));
  CHECK(so24.Sdot(2, 2) == 0.0);

  std::mt19937 rng(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int s = 1 + trial % 4;
    MatrixXd A = MatrixXd::Zero(s, s), Ad = MatrixXd::Zero(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < i; ++j) {
        A(i, j) = dist(rng);
        Ad(i, j) = dist(rng);
      }
    VectorXd b(s), bd(s);
    for (int i = 0; i < s; ++i) {
      b(i) = dist(rng);
      bd(i) = dist(rng);
    }
    const ButcherTD m(A, Ad, b, bd, true);
    const auto rt = butcher_from_so_pair(so_pair_from_butcher(m), true);
    CHECK((rt.A() - m.A()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((rt.Adot() - m.Adot()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((rt.b() - m.b()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((rt.bdot() - m.bdot()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("to_butcher_imex on imex_rk(2) matches the hand solve") {
  const auto conv = to_butcher_imex(imex_rk(2));
  CHECK(conv.bhat(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(conv.bhat(1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(conv.bhat(2) == doctest::Approx(0.0));
  CHECK(conv.b(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(conv.b(1) == doctest::Approx(0.0));
  CHECK(conv.b(2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(conv.bdot.sum() == doctest::Approx(-0.25).epsilon(1e-15));
  // b^T c + bdot^T e = 3/4 - 1/4 = 1/2
  CHECK(conv.b.dot(conv.c) + conv.bdot.sum() ==
        doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("to_butcher_imex with P=W=0 is the diagonal resolvent") {
  VectorXd Re = VectorXd::Ones(3), D(3), Dd(3);
  D << 0.3, 0.1, 0.7;
  Dd << -0.2, 0.0, -0.4;
  const ImexTDRK m(Re, MatrixXd::Zero(3, 3), MatrixXd::Zero(3, 3), D, Dd, 2.0);
  const auto conv = to_butcher_imex(m);
  CHECK(conv.Ahat.cwiseAbs().maxCoeff() == 0.0);
  CHECK((conv.A - MatrixXd(D.asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
  CHECK((conv.Adot - MatrixXd(Dd.asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("to_butcher_glm scalar IMEX Euler example") {
  // k=1, s=1, R=[1], D=[1], P=W=0, Gamma=0, Q=0, V=[1], r=1
  MatrixXd R(1, 1);
  R << 1.0;
  VectorXd D(1), Dd(1), Gamma(1), Q(1), V(1);
  D << 1.0;
  Dd << 0.0;
  Gamma << 0.0;
  Q << 0.0;
  V << 1.0;
  const ImexTDGLM m(1, R, MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 1), D, Dd,
                    Gamma, Q, V, 1.0);
  const auto conv = to_butcher_glm(m);
  CHECK(conv.theta(0) == doctest::Approx(1.0));
  CHECK(conv.bhat(0) == doctest::Approx(1.0));
  CHECK(conv.b(0) == doctest::Approx(1.0));
  CHECK(conv.ell(0) == 0.0);
  const auto rep = imex_glm_residuals(conv, 2);
  CHECK(rep.residuals[0].second == doctest::Approx(0.0));  // p1 conditions
  CHECK(rep.residuals[1].second == doctest::Approx(0.0));
  CHECK(rep.residuals[2].second == doctest::Approx(-0.5));  // first p2 fails
}

TEST_CASE("to_butcher_glm ell vector") {
  const auto conv = to_butcher_glm(imex_glm_2step_p2());
  REQUIRE(conv.ell.size() == 2);
  CHECK(conv.ell(0) == -1.0);
  CHECK(conv.ell(1) == 0.0);
}

TEST_CASE("butcher conversions recompute abscissas consistently") {
  const auto conv = to_butcher_imex(imex_rk(3));
  CHECK((conv.c - conv.A.rowwise().sum()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((conv.chat - conv.Ahat.rowwise().sum()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((conv.cdot - conv.Adot.rowwise().sum()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("registry JSON export preserves printed digits") {
  const auto j = registry_entry_json(lookup("nd-implicit-p4"));
  CHECK(j["matrices"]["D"][0].get<std::string>() == "0.660949255604937");
  CHECK(j["matrices"]["Ddot"][4].get<std::string>() == "-0.218859021269943");
  CHECK(j["matrices"]["Re"][3].get<std::string>() == "0.908233497673956");
  const auto g = registry_entry_json(lookup("imex-glm-2step-5stage-p3"));
  CHECK(g["r"].get<std::string>() == "1.080445742835932");
  CHECK(g["matrices"]["R"][1][0].get<std::string>() == "0.000000000013270");
  CHECK(g["k"] == 3);
  const auto rk = registry_entry_json(lookup("imex-rk-p3"));
  CHECK(rk["matrices"]["W"][5][3].get<std::string>() == "0.448630511341543");
}
