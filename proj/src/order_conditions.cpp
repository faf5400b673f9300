#include "tdssp/order_conditions.hpp"

#include <cmath>
#include <stdexcept>

namespace tdssp {

namespace {

using Vec = Eigen::ArrayXd;

void push(OrderReport& rep, const std::string& label, double lhs, double rhs) {
  rep.residuals.emplace_back(label, lhs - rhs);
}

void finalize(OrderReport& rep, int p, double tol) {
  rep.order_requested = p;
  rep.tolerance = tol;
  rep.max_abs_residual = 0.0;
  for (const auto& [label, v] : rep.residuals)
    rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(v));
  rep.satisfied = rep.max_abs_residual <= tol;
}

}  // namespace

// Conventional typeset listings of the p>=5 conditions for this method
// family are ambiguous in a few rows (inhomogeneous or truncated terms, and
// matrix-vs-Hadamard precedence).  The readings below are pinned by the
// tree-series expansion in tests/test_tree_oracle.cpp, which re-derives
// every condition and maps it onto its rooted tree:
//   - A.p5.4 closes with bdot^T A cdot.
//   - A.p6.6 includes bdot^T(c^2 . Ac) + 2 bdot^T(c . A cdot).
//   - A.p6.7 reads A^2 c^2 in its first two terms.
//   - In A.p6.9/.10/.11/.13 a matrix symbol applies to the whole Hadamard
//     product that follows it, e.g. Adot(c . Ac); in A.p6.16 the product
//     c . Ac . Ac is a plain three-factor Hadamard product.
OrderReport mdrk_residuals(const ButcherTD& m, int p, double tol) {
  if (p < 1 || p > 6)
    throw std::invalid_argument("mdrk_residuals: order must be in 1..6");
  const MatrixXd& A = m.A();
  const MatrixXd& Ad = m.Adot();
  const Vec b = m.b().array(), bd = m.bdot().array();
  const Vec e = Vec::Ones(m.stages());
  const Vec c = m.c().array(), cd = m.cdot().array();
  const auto mA = [&](const Vec& v) -> Vec {
    return (A * v.matrix()).array();
  };
  const auto mAd = [&](const Vec& v) -> Vec {
    return (Ad * v.matrix()).array();
  };
  const auto dot = [](const Vec& u, const Vec& v) { return (u * v).sum(); };

  const Vec c2 = c * c, c3 = c2 * c, c4 = c3 * c, c5 = c4 * c;
  const Vec Ac = mA(c), Acd = mA(cd), Adc = mAd(c), Adcd = mAd(cd);
  const Vec A2c = mA(Ac), A3c = mA(A2c), A2cd = mA(Acd);

  OrderReport rep;
  push(rep, "A.p1.1", dot(b, e), 1.0);
  if (p >= 2) push(rep, "A.p2.1", dot(b, c) + dot(bd, e), 0.5);
  if (p >= 3) {
    push(rep, "A.p3.1", dot(b, c2) + 2 * dot(bd, c), 1.0 / 3.0);
    push(rep, "A.p3.2", dot(b, Ac) + dot(b, cd) + dot(bd, c), 1.0 / 6.0);
  }
  if (p >= 4) {
    push(rep, "A.p4.1", dot(b, c3) + 3 * dot(bd, c2), 0.25);
    push(rep, "A.p4.2",
         dot(b, c * Ac) + dot(b, c * cd) + dot(bd, c2) + dot(bd, Ac) +
             dot(bd, cd),
         1.0 / 8.0);
    push(rep, "A.p4.3", dot(b, mA(c2)) + 2 * dot(b, Adc) + dot(bd, c2),
         1.0 / 12.0);
    push(rep, "A.p4.4",
         dot(b, A2c) + dot(b, Acd) + dot(b, Adc) + dot(bd, Ac) + dot(bd, cd),
         1.0 / 24.0);
  }
  if (p >= 5) {
    push(rep, "A.p5.1", dot(b, c4) + 4 * dot(bd, c3), 0.2);
    push(rep, "A.p5.2",
         dot(b, c2 * Ac) + dot(b, c2 * cd) + dot(bd, c3) +
             2 * dot(bd, c * Ac) + 2 * dot(bd, c * cd),
         1.0 / 10.0);
    push(rep, "A.p5.3",
         dot(b, c * mA(c2)) + 2 * dot(b, c * Adc) + dot(bd, c3) +
             dot(bd, mA(c2)) + 2 * dot(bd, Adc),
         1.0 / 15.0);
    push(rep, "A.p5.4",
         dot(b, c * A2c) + dot(b, c * Acd) + dot(b, c * Adc) +
             dot(bd, c * Ac) + dot(bd, c * cd) + dot(bd, A2c) + dot(bd, Acd) +
             dot(bd, Adc),
         1.0 / 30.0);
    push(rep, "A.p5.5",
         dot(b, Ac * Ac) + 2 * dot(b, cd * Ac) + dot(b, cd * cd) +
             2 * dot(bd, c * Ac) + 2 * dot(bd, c * cd),
         1.0 / 20.0);
    push(rep, "A.p5.6", dot(b, mA(c3)) + 3 * dot(b, mAd(c2)) + dot(bd, c3),
         1.0 / 20.0);
    push(rep, "A.p5.7",
         dot(b, mA(c * Ac)) + dot(b, mA(c * cd)) + dot(b, mAd(c2)) +
             dot(b, mAd(Ac)) + dot(b, mAd(cd)) + dot(bd, c * Ac) +
             dot(bd, c * cd),
         1.0 / 40.0);
    push(rep, "A.p5.8",
         dot(b, mA(mA(c2))) + 2 * dot(b, mA(Adc)) + dot(b, mAd(c2)) +
             dot(bd, mA(c2)) + 2 * dot(bd, Adc),
         1.0 / 60.0);
    push(rep, "A.p5.9",
         dot(b, A3c) + dot(b, A2cd) + dot(b, mA(Adc)) + dot(b, mAd(Ac)) +
             dot(b, mAd(cd)) + dot(bd, A2c) + dot(bd, Acd) + dot(bd, Adc),
         1.0 / 120.0);
  }
  if (p >= 6) {
    push(rep, "A.p6.1", dot(b, c5) + 5 * dot(bd, c4), 1.0 / 6.0);
    push(rep, "A.p6.2",
         dot(b, c3 * Ac) + 3 * dot(bd, c2 * Ac) + dot(bd, c4) +
             dot(b, c3 * cd) + 3 * dot(bd, c2 * cd),
         1.0 / 12.0);
    push(rep, "A.p6.3",
         dot(b, c2 * mA(c2)) + 2 * dot(bd, c * mA(c2)) +
             2 * dot(b, c2 * Adc) + dot(bd, c4) + 4 * dot(bd, c * Adc),
         1.0 / 18.0);
    push(rep, "A.p6.4",
         dot(b, c * mA(c3)) + 3 * dot(b, c * mAd(c2)) + dot(bd, mA(c3)) +
             3 * dot(bd, mAd(c2)) + dot(bd, c4),
         1.0 / 24.0);
    push(rep, "A.p6.5", dot(b, mA(c4)) + 4 * dot(b, mAd(c3)) + dot(bd, c4),
         1.0 / 30.0);
    push(rep, "A.p6.6",
         dot(b, c2 * A2c) + 2 * dot(bd, c * A2c) + dot(b, c2 * Acd) +
             dot(b, c2 * Adc) + dot(bd, c2 * Ac) + 2 * dot(bd, c * Acd) +
             2 * dot(bd, c * Adc) + dot(bd, c2 * cd),
         1.0 / 36.0);
    push(rep, "A.p6.7",
         dot(b, c * mA(mA(c2))) + dot(bd, mA(mA(c2))) + dot(bd, c * mA(c2)) +
             dot(b, c * mAd(c2)) + 2 * dot(b, c * mA(Adc)) +
             dot(bd, mAd(c2)) + 2 * dot(bd, mA(Adc)) + 2 * dot(bd, c * Adc),
         1.0 / 72.0);
    push(rep, "A.p6.8",
         dot(b, mA(mA(c3))) + dot(bd, mA(c3)) + dot(b, mAd(c3)) +
             3 * dot(b, mA(mAd(c2))) + 3 * dot(bd, mAd(c2)),
         1.0 / 120.0);
    push(rep, "A.p6.9",
         dot(b, c * mA(c * Ac)) + dot(bd, mA(c * Ac)) + dot(b, c * mAd(Ac)) +
             dot(b, c * mA(c * cd)) + dot(bd, c2 * Ac) + dot(b, c * mAd(c2)) +
             dot(bd, mAd(Ac)) + dot(bd, mA(c * cd)) + dot(b, c * mAd(cd)) +
             dot(bd, mAd(c2)) + dot(bd, c2 * cd) + dot(bd, mAd(cd)),
         1.0 / 48.0);
    push(rep, "A.p6.10",
         dot(b, mA(c2 * Ac)) + dot(b, mA(c2 * cd)) + dot(bd, c2 * Ac) +
             2 * dot(b, mAd(c * Ac)) + dot(b, mAd(c3)) +
             2 * dot(b, mAd(c * cd)) + dot(bd, c2 * cd),
         1.0 / 60.0);
    push(rep, "A.p6.11",
         dot(b, mA(c * mA(c2))) + dot(bd, c * mA(c2)) + dot(b, mAd(mA(c2))) +
             dot(b, mAd(c3)) + 2 * dot(b, mA(c * Adc)) + 2 * dot(b, mAd(Adc)) +
             2 * dot(bd, c * Adc),
         1.0 / 90.0);
    push(rep, "A.p6.12",
         dot(b, c * A3c) + dot(bd, A3c) + dot(bd, c * A2c) +
             dot(b, c * mAd(Ac)) + dot(b, c * mA(Adc)) + dot(b, c * A2cd) +
             dot(bd, mAd(Ac)) + dot(bd, mA(Adc)) + dot(bd, A2cd) +
             dot(b, c * mAd(cd)) + dot(bd, c * Acd) + dot(bd, c * Adc) +
             dot(bd, mAd(cd)),
         1.0 / 144.0);
    push(rep, "A.p6.13",
         dot(b, mA(c * A2c)) + dot(b, mA(c * Acd)) + dot(b, mA(c * Adc)) +
             dot(b, mAd(c * Ac)) + dot(b, mAd(A2c)) + dot(bd, c * A2c) +
             dot(b, mAd(c * cd)) + dot(b, mAd(Acd)) + dot(bd, c * Acd) +
             dot(b, mAd(Adc)) + dot(bd, c * Adc),
         1.0 / 180.0);
    push(rep, "A.p6.14",
         dot(b, mA(mA(c * Ac))) + dot(b, mA(mA(c * cd))) + dot(b, mA(mAd(c2))) +
             dot(b, mA(mAd(Ac))) + dot(b, mAd(c * Ac)) + dot(bd, mA(c * Ac)) +
             dot(b, mA(mAd(cd))) + dot(b, mAd(c * cd)) + dot(bd, mA(c * cd)) +
             dot(bd, mAd(c2)) + dot(bd, mAd(Ac)) + dot(bd, mAd(cd)),
         1.0 / 240.0);
    push(rep, "A.p6.15",
         dot(b, mA(mA(mA(c2)))) + dot(bd, mA(mA(c2))) + dot(b, mAd(mA(c2))) +
             dot(b, mA(mAd(c2))) + 2 * dot(b, mA(mA(Adc))) +
             dot(bd, mAd(c2)) + 2 * dot(bd, mA(Adc)) + 2 * dot(b, mAd(Adc)),
         1.0 / 360.0);
    push(rep, "A.p6.16",
         dot(b, c * Ac * Ac) + dot(bd, Ac * Ac) + 2 * dot(b, c * cd * Ac) +
             2 * dot(bd, c2 * Ac) + 2 * dot(bd, cd * Ac) +
             2 * dot(bd, c2 * cd) + dot(b, c * cd * cd) + dot(bd, cd * cd),
         1.0 / 24.0);
  }
  finalize(rep, p, tol);
  return rep;
}

OrderReport imex_mdrk_residuals(const ButcherIMEX& m, int p, double tol) {
  if (p < 1 || p > 3)
    throw std::invalid_argument("imex_mdrk_residuals: order must be in 1..3");
  const MatrixXd& Ah = m.Ahat;
  const MatrixXd& A = m.A;
  const Vec bh = m.bhat.array(), b = m.b.array(), bd = m.bdot.array();
  const Vec e = Vec::Ones(m.stages());
  const Vec c = m.c.array(), ch = m.chat.array(), cd = m.cdot.array();
  const auto mA = [&](const Vec& v) -> Vec { return (A * v.matrix()).array(); };
  const auto mAh = [&](const Vec& v) -> Vec {
    return (Ah * v.matrix()).array();
  };
  const auto dot = [](const Vec& u, const Vec& v) { return (u * v).sum(); };

  OrderReport rep;
  push(rep, "B.p1.1", dot(b, e), 1.0);
  push(rep, "B.p1.2", dot(bh, e), 1.0);
  if (p >= 2) {
    push(rep, "B.p2.1", dot(b, c) + dot(bd, e), 0.5);
    push(rep, "B.p2.2", dot(bh, c), 0.5);
    push(rep, "B.p2.3", dot(b, ch), 0.5);
    push(rep, "B.p2.4", dot(bh, ch), 0.5);
  }
  if (p >= 3) {
    push(rep, "B.p3.1", dot(b, mA(c)) + dot(bd, c) + dot(b, cd), 1.0 / 6.0);
    push(rep, "B.p3.2", dot(b, mAh(c)), 1.0 / 6.0);
    push(rep, "B.p3.3", dot(bh, mA(c)) + dot(bh, cd), 1.0 / 6.0);
    push(rep, "B.p3.4", dot(bh, mAh(c)), 1.0 / 6.0);
    push(rep, "B.p3.5", dot(b, c * c) + 2 * dot(bd, c), 1.0 / 3.0);
    push(rep, "B.p3.6", dot(b, ch * ch), 1.0 / 3.0);
    push(rep, "B.p3.7", dot(bh, c * ch), 1.0 / 3.0);
    push(rep, "B.p3.8", dot(b, mA(ch)) + dot(bd, ch), 1.0 / 6.0);
    push(rep, "B.p3.9", dot(b, mAh(ch)), 1.0 / 6.0);
    push(rep, "B.p3.10", dot(bh, mA(ch)), 1.0 / 6.0);
    push(rep, "B.p3.11", dot(bh, mAh(ch)), 1.0 / 6.0);
    push(rep, "B.p3.12", dot(b, c * ch) + dot(bd, ch), 1.0 / 3.0);
    push(rep, "B.p3.13", dot(bh, c * c), 1.0 / 3.0);
    push(rep, "B.p3.14", dot(bh, ch * ch), 1.0 / 3.0);
  }
  finalize(rep, p, tol);
  return rep;
}

OrderReport imex_glm_residuals(const ButcherGLM& m, int p, double tol) {
  if (p < 1 || p > 3)
    throw std::invalid_argument("imex_glm_residuals: order must be in 1..3");
  const Vec th = m.theta.array(), bh = m.bhat.array(), b = m.b.array(),
            bd = m.bdot.array();
  const Vec e = Vec::Ones(m.stages());
  const Vec ell = m.ell.array();
  const auto dot = [](const Vec& u, const Vec& v) { return (u * v).sum(); };
  const Vec Tl = (m.T * m.ell).array();
  const Vec Tl2 = (m.T * (ell * ell).matrix()).array();
  const Vec Tl3 = (m.T * (ell * ell * ell).matrix()).array();
  const Vec che = Tl + (m.Ahat * e.matrix()).array();  // T ell + Ahat e
  const Vec ce = Tl + (m.A * e.matrix()).array();      // T ell + A e
  const Vec Ade = (m.Adot * e.matrix()).array();
  const auto mA = [&](const Vec& v) -> Vec {
    return (m.A * v.matrix()).array();
  };
  const auto mAh = [&](const Vec& v) -> Vec {
    return (m.Ahat * v.matrix()).array();
  };
  const double thl = dot(th, ell), thl2 = dot(th, ell * ell),
               thl3 = dot(th, ell * ell * ell);

  OrderReport rep;
  push(rep, "C.p1.1", thl + dot(bh, e), 1.0);
  push(rep, "C.p1.2", thl + dot(b, e), 1.0);
  if (p >= 2) {
    push(rep, "C.p2.1", 0.5 * thl2 + dot(bh, che), 0.5);
    push(rep, "C.p2.2", 0.5 * thl2 + dot(b, che), 0.5);
    push(rep, "C.p2.3", 0.5 * thl2 + dot(bh, ce), 0.5);
    push(rep, "C.p2.4", 0.5 * thl2 + dot(b, ce) + dot(bd, e), 0.5);
  }
  if (p >= 3) {
    const Vec h = 0.5 * Tl2;
    push(rep, "C.p3.1", thl3 / 6.0 + dot(bh, h + mAh(che)), 1.0 / 6.0);
    push(rep, "C.p3.2", thl3 / 6.0 + dot(bh, h + mAh(ce)), 1.0 / 6.0);
    push(rep, "C.p3.3", thl3 / 6.0 + dot(bh, h + mA(che)), 1.0 / 6.0);
    push(rep, "C.p3.4", thl3 / 6.0 + dot(bh, h + mA(ce) + Ade), 1.0 / 6.0);
    push(rep, "C.p3.5", thl3 / 6.0 + dot(b, h + mAh(che)), 1.0 / 6.0);
    push(rep, "C.p3.6", thl3 / 6.0 + dot(b, h + mAh(ce)), 1.0 / 6.0);
    push(rep, "C.p3.7",
         thl3 / 6.0 + dot(b, h + mA(che)) + dot(bd, che), 1.0 / 6.0);
    push(rep, "C.p3.8",
         thl3 / 6.0 + dot(b, h + mA(ce) + Ade) + dot(bd, ce), 1.0 / 6.0);
    push(rep, "C.p3.9", thl3 / 3.0 + dot(bh, che * che), 1.0 / 3.0);
    push(rep, "C.p3.10", thl3 / 3.0 + dot(bh, che * ce), 1.0 / 3.0);
    push(rep, "C.p3.11", thl3 / 3.0 + dot(bh, ce * ce), 1.0 / 3.0);
    push(rep, "C.p3.12", thl3 / 3.0 + dot(b, che * che), 1.0 / 3.0);
    push(rep, "C.p3.13",
         thl3 / 3.0 + dot(b, ce * che) + dot(bd, che), 1.0 / 3.0);
    push(rep, "C.p3.14",
         thl3 / 3.0 + dot(b, ce * ce) + 2 * dot(bd, ce), 1.0 / 3.0);
  }
  finalize(rep, p, tol);
  return rep;
}

OrderReport order_check(const MethodSpec& spec, int p, double tol) {
  return std::visit(
      [&](const auto& m) -> OrderReport {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ButcherTD>) {
          return mdrk_residuals(m, p, tol);
        } else if constexpr (std::is_same_v<T, ImplicitNDMethod>) {
          return mdrk_residuals(to_butcher_nd(m), p, tol);
        } else if constexpr (std::is_same_v<T, ImexTDRK>) {
          return imex_mdrk_residuals(to_butcher_imex(m), p, tol);
        } else {
          return imex_glm_residuals(to_butcher_glm(m), p, tol);
        }
      },
      spec.coefficients);
}

nlohmann::json order_report_json(const std::string& method,
                                 const OrderReport& report) {
  nlohmann::json j;
  j["method"] = method;
  j["p"] = report.order_requested;
  j["tolerance"] = report.tolerance;
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& [label, value] : report.residuals)
    rs.push_back({{"label", label}, {"value", value}});
  j["residuals"] = std::move(rs);
  j["max_abs_residual"] = report.max_abs_residual;
  j["satisfied"] = report.satisfied;
  return j;
}

}  // namespace tdssp
