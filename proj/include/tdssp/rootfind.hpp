#pragma once

#include <functional>
#include <vector>

// Scan-and-bisect root location for the scalar polynomial problems that
// define the optimal-method families.  Robust against multiple roots; no
// derivative information needed.

namespace tdssp::detail {

/// All sign-change roots of f on [lo, hi], scanned at `step` and bisected to
/// `tol`, in increasing order.  Points where f is exactly zero count as
/// roots.
inline std::vector<double> scan_roots(const std::function<double(double)>& f,
                                      double lo, double hi, double step,
                                      double tol) {
  std::vector<double> roots;
  double x0 = lo, f0 = f(x0);
  if (f0 == 0.0) roots.push_back(x0);
  for (double x1 = lo + step; x0 < hi; x1 += step) {
    if (x1 > hi) x1 = hi;
    const double f1 = f(x1);
    if (f1 == 0.0) {
      roots.push_back(x1);
    } else if (f0 * f1 < 0.0) {
      double a = x0, b = x1, fa = f0;
      while (b - a > tol) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if (fa * fm < 0.0) {
          b = m;
        } else {
          a = m;
          fa = fm;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    if (x1 >= hi) break;
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

}  // namespace tdssp::detail
