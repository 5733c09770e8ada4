#include "polymg/poly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polymg
{

double cheb_T(int k, double t)
{
  if (k < 0)
    throw std::invalid_argument("cheb_T: order must be non-negative");
  if (t < -1.0)
    return (k % 2 == 0 ? 1.0 : -1.0) * cheb_T(k, -t);
  if (t > 1.0)
  {
    const double r = std::sqrt(t * t - 1.0);
    return 0.5 * (std::pow(t - r, k) + std::pow(t + r, k));
  }
  double prev = 1.0;
  if (k == 0)
    return prev;
  double cur = t;
  for (int j = 2; j <= k; ++j)
  {
    const double next = 2.0 * t * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double cheb_U(int k, double t)
{
  if (k < -2)
    throw std::invalid_argument("cheb_U: order must be >= -2");
  if (k == -2)
    return -1.0;
  if (k == -1)
    return 0.0;
  if (t < -1.0)
    return (k % 2 == 0 ? 1.0 : -1.0) * cheb_U(k, -t);
  if (t > 1.0)
  {
    const double s = std::acosh(t);
    return std::sinh((k + 1) * s) / std::sinh(s);
  }
  double prev = 1.0;
  if (k == 0)
    return prev;
  double cur = 2.0 * t;
  for (int j = 2; j <= k; ++j)
  {
    const double next = 2.0 * t * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::string to_string(SmootherFamily f)
{
  switch (f)
  {
  case SmootherFamily::Chebyshev:
    return "cheb";
  case SmootherFamily::SA:
    return "sa";
  case SmootherFamily::BA1x:
    return "ba1x";
  }
  return "unknown";
}

SmootherFamily smoother_family_from_string(const std::string &name)
{
  if (name == "cheb" || name == "chebyshev")
    return SmootherFamily::Chebyshev;
  if (name == "sa")
    return SmootherFamily::SA;
  if (name == "ba1x" || name == "ba")
    return SmootherFamily::BA1x;
  throw std::invalid_argument("unknown smoother family '" + name + "' (expected cheb, sa or ba1x)");
}

void SmootherSpec::validate() const
{
  if (degree < 0)
    throw std::invalid_argument("smoother degree must be non-negative");
  if (!(lambda1 > 0.0) || !std::isfinite(lambda1))
    throw std::invalid_argument("lambda1 must be positive");
  if (family == SmootherFamily::SA)
    return;
  if (!(lambda0 >= 0.0))
    throw std::invalid_argument("lambda0 must be non-negative");
  if (!(lambda1 > lambda0))
    throw std::invalid_argument("lambda1 must exceed lambda0 (degenerate interval)");
  if (family == SmootherFamily::BA1x && lambda0 == 0.0)
    throw std::invalid_argument("BA1x requires lambda0 > 0 (kappa would be infinite)");
}

ChebCache::ChebCache(double lambda0, double lambda1, int max_order)
    : a_((lambda1 + lambda0) / (lambda1 - lambda0)), zeta_(2.0 / (lambda1 + lambda0))
{
  if (!(lambda1 > lambda0) || lambda0 < 0.0)
    throw std::invalid_argument("ChebCache: need 0 <= lambda0 < lambda1");
  values_.reserve(static_cast<std::size_t>(max_order) + 1);
  for (int k = 0; k <= max_order; ++k)
    values_.push_back(cheb_T(k, a_));
}

BA1xRecurrence BA1xRecurrence::make(double lambda0, double lambda1)
{
  BA1xRecurrence r{};
  r.mu0 = 1.0 / lambda1;
  r.mu1 = 1.0 / lambda0;
  const double sk = std::sqrt(lambda1 / lambda0);
  r.delta = (sk - 1.0) / (sk + 1.0);
  const double s = std::sqrt(r.mu0) + std::sqrt(r.mu1);
  r.c = 4.0 * r.mu0 * r.mu1 / (s * s);
  r.p0 = 0.5 * (r.mu0 + r.mu1);
  r.p1_constant = 0.5 * s * s;
  r.p1_slope = -r.mu0 * r.mu1;
  return r;
}

double sa_sign(int degree) { return degree % 2 == 0 ? -1.0 : 1.0; }

namespace
{

double ba1x_p(const SmootherSpec &spec, double x)
{
  const auto r = BA1xRecurrence::make(spec.lambda0, spec.lambda1);
  double prev = r.p0;
  if (spec.degree == 0)
    return prev;
  double cur = r.p1_constant + r.p1_slope * x;
  const double d2 = r.delta * r.delta;
  for (int j = 1; j < spec.degree; ++j)
  {
    const double next = cur + d2 * (cur - prev) + r.c * (1.0 - x * cur);
    prev = cur;
    cur = next;
  }
  return cur;
}

double chebyshev_q(const SmootherSpec &spec, double x)
{
  const ChebCache cache(spec.lambda0, spec.lambda1, spec.degree + 1);
  double prev = 0.0; // q_{-1}
  double cur = cache.zeta();
  for (int j = 1; j <= spec.degree; ++j)
  {
    const double next =
        cur + cache.residual_weight(j) * (1.0 - x * cur) + cache.momentum_weight(j) * (cur - prev);
    prev = cur;
    cur = next;
  }
  return cur;
}

// W_j and Q_j = (W_j(0) - W_j(x)) / x advanced together.
double sa_q(const SmootherSpec &spec, double x)
{
  const double l1 = spec.lambda1;
  const double t = 2.0 * (2.0 * x / l1 - 1.0);
  double w_prev = 1.0, w = 1.0; // W_{-1}, W_0
  double q_prev = 0.0, q = 0.0; // Q_{-1}, Q_0
  for (int j = 0; j <= spec.degree; ++j)
  {
    const double q_next = -2.0 * q - q_prev - (4.0 / l1) * w;
    const double w_next = t * w - w_prev;
    q_prev = q;
    q = q_next;
    w_prev = w;
    w = w_next;
  }
  return sa_sign(spec.degree) * q / (2.0 * spec.degree + 3.0);
}

// delta^{k+1} U_k(y) without forming the (possibly huge) U_k(y).
double scaled_U(int k, double y, double delta)
{
  if (k == -1)
    return 0.0;
  if (k == -2)
    return -1.0 / delta;
  if (std::abs(y) <= 1.0)
    return std::pow(delta, k + 1) * cheb_U(k, y);
  const double sign = (y < 0.0 && k % 2 == 1) ? -1.0 : 1.0;
  const double s = std::acosh(std::abs(y));
  const double n = k + 1.0;
  const double log_mag = n * (s + std::log(delta));
  return sign * std::exp(log_mag) * (-std::expm1(-2.0 * n * s)) / (2.0 * std::sinh(s));
}

} // namespace

double error_poly(const SmootherSpec &spec, double x)
{
  spec.validate();
  if (x < 0.0)
    throw std::invalid_argument("error_poly: x must be non-negative");
  switch (spec.family)
  {
  case SmootherFamily::Chebyshev:
  {
    const double l0 = spec.lambda0, l1 = spec.lambda1;
    const int n = spec.degree + 1;
    return cheb_T(n, (l0 + l1 - 2.0 * x) / (l1 - l0)) / cheb_T(n, (l0 + l1) / (l1 - l0));
  }
  case SmootherFamily::SA:
  {
    if (x == 0.0)
      return 1.0;
    const double s = std::sqrt(x / spec.lambda1);
    return sa_sign(spec.degree) / (2.0 * spec.degree + 3.0) * cheb_T(2 * spec.degree + 3, s) / s;
  }
  case SmootherFamily::BA1x:
    return 1.0 - x * ba1x_p(spec, x);
  }
  throw std::invalid_argument("unknown smoother family");
}

double q_value(const SmootherSpec &spec, double x)
{
  spec.validate();
  switch (spec.family)
  {
  case SmootherFamily::Chebyshev:
    return chebyshev_q(spec, x);
  case SmootherFamily::SA:
    return sa_q(spec, x);
  case SmootherFamily::BA1x:
    return ba1x_p(spec, x);
  }
  throw std::invalid_argument("unknown smoother family");
}

double max_abs_error_poly(const SmootherSpec &spec, double lo, double hi, int grid_points)
{
  if (!(hi >= lo) || grid_points < 2)
    throw std::invalid_argument("max_abs_error_poly: bad interval");
  auto f = [&](double x) { return std::abs(error_poly(spec, x)); };
  if (hi == lo)
    return f(lo);
  const double step = (hi - lo) / (grid_points - 1);
  int best_i = 0;
  double best = -1.0;
  for (int i = 0; i < grid_points; ++i)
  {
    const double v = f(lo + i * step);
    if (v > best)
    {
      best = v;
      best_i = i;
    }
  }
  // Golden-section polish on the bracketing cells.
  double a = lo + std::max(0, best_i - 1) * step;
  double b = lo + std::min(grid_points - 1, best_i + 1) * step;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 100 && (b - a) > 1e-15 * std::max(1.0, std::abs(b)); ++it)
  {
    if (fc > fd)
    {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    }
    else
    {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return std::max({best, fc, fd});
}

EndpointErrors ba1x_endpoint_errors(int m, double lambda, double lambda0, double lambda1)
{
  if (m < 1)
    throw std::invalid_argument("ba1x_endpoint_errors: m must be >= 1");
  if (!(lambda0 > 0.0 && lambda0 <= lambda && lambda <= lambda1))
    throw std::invalid_argument("ba1x_endpoint_errors: need 0 < lambda0 <= lambda <= lambda1");
  if (lambda == lambda1)
    throw std::invalid_argument("ba1x_endpoint_errors: lambda = lambda1 gives kappa = 1");

  const double ratio = lambda1 / lambda;
  const double sr = std::sqrt(ratio);
  EndpointErrors out{};
  out.at_lambda1 = std::pow((sr - 1.0) / (sr + 1.0), m) * (ratio - 1.0) / 2.0;

  const auto r = BA1xRecurrence::make(lambda, lambda1);
  const double x = lambda0;
  const double e0 = 1.0 / x - 0.5 * (r.mu0 + r.mu1);
  const double e1 = 1.0 / x - (r.p1_constant + r.p1_slope * x);
  const double y = (1.0 + r.delta * r.delta - r.c * x) / (2.0 * r.delta);
  // E_m = -delta^m E_0 U_{m-2}(y) + delta^{m-1} E_1 U_{m-1}(y)
  const double em = -r.delta * e0 * scaled_U(m - 2, y, r.delta) + e1 * scaled_U(m - 1, y, r.delta) / r.delta;
  out.at_lambda0 = x * std::abs(em);
  return out;
}

OptimalLambda0 optimal_lambda0_smoothing(int m, double lambda0, double lambda1)
{
  if (m < 1)
    throw std::invalid_argument("optimal_lambda0_smoothing: m must be >= 1");
  if (!(lambda0 > 0.0 && lambda0 < lambda1))
    throw std::invalid_argument("optimal_lambda0_smoothing: need 0 < lambda0 < lambda1");
  auto gap = [&](double lam) {
    const auto e = ba1x_endpoint_errors(m, lam, lambda0, lambda1);
    return e.at_lambda1 - e.at_lambda0;
  };
  if (gap(lambda0) <= 0.0)
    return {lambda0, false, ba1x_endpoint_errors(m, lambda0, lambda0, lambda1).at_lambda1};
  double lo = lambda0;
  double hi = lambda1 * (1.0 - 1e-14);
  if (gap(hi) > 0.0)
    return {lambda0, false, ba1x_endpoint_errors(m, lambda0, lambda0, lambda1).at_lambda1};
  while (hi - lo > 1e-10 * hi)
  {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? lo : hi) = mid;
  }
  const double value = 0.5 * (lo + hi);
  return {value, true, ba1x_endpoint_errors(m, value, lambda0, lambda1).at_lambda1};
}

int min_degree(double rho, double kappa, double lambda1)
{
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("min_degree: target damping must lie in (0, 1)");
  if (!(lambda1 > 0.0))
    throw std::invalid_argument("min_degree: lambda1 must be positive");
  if (!(kappa > 1.0))
    return 0;
  const double sk = std::sqrt(kappa);
  const double delta = (sk - 1.0) / (sk + 1.0);
  const double bound = std::min(2.0 * rho / (kappa - 1.0), 2.0 / (lambda1 * (kappa - 1.0)));
  if (bound >= 1.0)
    return 0;
  const double m = std::log(bound) / std::log(delta);
  // Exact integer solutions must not be pushed up by rounding.
  return std::max(0, static_cast<int>(std::ceil(m - 1e-9 * std::max(1.0, m))));
}

bool is_convergent_smoother(const SmootherSpec &spec)
{
  constexpr int n = 20000;
  for (int i = 1; i <= n; ++i)
    if (std::abs(error_poly(spec, spec.lambda1 * i / n)) >= 1.0)
      return false;
  return true;
}

} // namespace polymg
