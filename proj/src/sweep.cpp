#include "tdssp/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <sstream>
#include <thread>

#include "tdssp/integrators.hpp"
#include "tdssp/problems.hpp"

namespace tdssp {

namespace {

struct RisePair {
  double per_step;
  double from_initial;
};

RisePair measure(const ButcherTD& td, const AdvectionProblem& prob,
                 const VectorXd& u0, double lambda, int steps) {
  const double dt = lambda * prob.dx();
  VectorXd u = u0;
  const double tv0 = prob.functional(u);
  double prev = tv0;
  RisePair out{-1e300, -1e300};
  for (int n = 0; n < steps; ++n) {
    u = step_explicit(td, prob, u, dt);
    const double tv = prob.functional(u);
    if (!std::isfinite(tv) || tv > 1e10 * tv0) {
      // blown up: report as an unbounded rise
      return {1e300, 1e300};
    }
    out.per_step = std::max(out.per_step, tv - prev);
    out.from_initial = std::max(out.from_initial, tv - tv0);
    prev = tv;
  }
  return out;
}

}  // namespace

SweepResult tv_sweep(const MethodSpec& spec, const SweepOptions& opts) {
  const auto* td = std::get_if<ButcherTD>(&spec.coefficients);
  if (td == nullptr || !td->is_explicit())
    throw std::invalid_argument("tv-sweep: method '" + spec.name +
                                "' is not an explicit one-step tableau");
  const int m = static_cast<int>(std::lround(1.0 / opts.dx));
  const auto variant = spec.condition_class == ConditionClass::TS
                           ? AdvectionProblem::FdotVariant::SquaredUpwind
                           : AdvectionProblem::FdotVariant::Centered;
  const AdvectionProblem prob(m, variant);
  const VectorXd u0 = step_ic(m);

  std::vector<double> lambdas;
  for (double lam = opts.lambda_min; lam <= opts.lambda_max + 1e-12;
       lam += opts.lambda_step)
    lambdas.push_back(lam);

  std::vector<RisePair> rises(lambdas.size());
  const int nthreads =
      opts.threads > 0
          ? opts.threads
          : std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= lambdas.size()) return;
      rises[i] = measure(*td, prob, u0, lambdas[i], opts.steps);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SweepResult result;
  result.method = spec.name;
  result.rows.resize(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    result.rows[i] = {lambdas[i], rises[i].per_step, rises[i].from_initial};

  std::size_t first_rising = lambdas.size();
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    if (rises[i].per_step > opts.rise_tol) {
      first_rising = i;
      break;
    }
  if (first_rising == 0) {
    result.lambda_obs = 0.0;
  } else if (first_rising == lambdas.size()) {
    result.lambda_obs = lambdas.back();
  } else {
    double lo = lambdas[first_rising - 1];
    double hi = lambdas[first_rising];
    while (hi - lo > opts.refine) {
      const double mid = 0.5 * (lo + hi);
      if (measure(*td, prob, u0, mid, opts.steps).per_step <= opts.rise_tol)
        lo = mid;
      else
        hi = mid;
    }
    result.lambda_obs = lo;
  }
  return result;
}

std::string sweep_csv(const SweepResult& result, const SweepOptions& opts) {
  std::ostringstream out;
  out.precision(17);
  out << "# tv-sweep v1: lambda,max_rise_per_step,max_rise_from_initial\n";
  out << "# method=" << result.method << " dx=" << opts.dx
      << " steps=" << opts.steps << " rise_tol=" << opts.rise_tol << "\n";
  for (const auto& row : result.rows)
    out << row.lambda << "," << row.max_rise_per_step << ","
        << row.max_rise_from_initial << "\n";
  out << "# lambda_obs = " << result.lambda_obs << "\n";
  return out.str();
}

}  // namespace tdssp
