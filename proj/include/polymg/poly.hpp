#ifndef POLYMG_POLY_HPP
#define POLYMG_POLY_HPP

#include <string>
#include <vector>

namespace polymg
{

/// Chebyshev polynomial of the first kind. Uses the three-term recurrence for
/// |t| <= 1 and the closed hyperbolic form outside.
double cheb_T(int k, double t);
/// Chebyshev polynomial of the second kind, U_{-1} = 0 (U_{-2} = -1).
double cheb_U(int k, double t);

enum class SmootherFamily
{
  Chebyshev,
  SA,
  BA1x
};

std::string to_string(SmootherFamily f);
SmootherFamily smoother_family_from_string(const std::string &name);

/// Polynomial smoother description. The smoother is R = q(R0 A) R0 and its
/// error polynomial is e(x) = 1 - x q(x).
///
/// `degree` is the degree of q: nu for Chebyshev and SA, m for BA1x. lambda0
/// is ignored by SA.
struct SmootherSpec
{
  SmootherFamily family = SmootherFamily::Chebyshev;
  int degree = 0;
  double lambda0 = 0.0;
  double lambda1 = 2.0;

  void validate() const;
  bool operator==(const SmootherSpec &) const = default;
};

/// Memoized T_k(a) for the Chebyshev operator recurrence on [lambda0, lambda1].
class ChebCache
{
public:
  ChebCache(double lambda0, double lambda1, int max_order);

  double a() const { return a_; }
  double zeta() const { return zeta_; }
  double T(int k) const { return values_.at(static_cast<std::size_t>(k)); }

  /// Coefficients of q_j - q_{j-1} = c_res (1 - x q_{j-1}) + c_mom (q_{j-1} - q_{j-2}).
  double residual_weight(int j) const { return 2.0 * zeta_ * a_ * T(j) / T(j + 1); }
  double momentum_weight(int j) const { return T(j - 1) / T(j + 1); }

private:
  double a_;
  double zeta_;
  std::vector<double> values_;
};

/// Constants of the best-approximation-to-1/x three-term recurrence on
/// [lambda0, lambda1]: p_{j+1} = p_j + delta^2 (p_j - p_{j-1}) + c (1 - x p_j).
struct BA1xRecurrence
{
  double mu0;   ///< 1 / lambda1
  double mu1;   ///< 1 / lambda0
  double delta; ///< (sqrt(kappa) - 1) / (sqrt(kappa) + 1)
  double c;     ///< 4 mu0 mu1 / (sqrt(mu0) + sqrt(mu1))^2
  double p0;    ///< (mu0 + mu1) / 2
  double p1_constant; ///< (sqrt(mu0) + sqrt(mu1))^2 / 2
  double p1_slope;    ///< -mu0 mu1

  static BA1xRecurrence make(double lambda0, double lambda1);
};

/// The three-term recurrence of the SA error polynomial: with
/// W_j(x) = T_{2j+1}(sqrt(x/l1)) / sqrt(x/l1), W_{j+1} = 2 (2x/l1 - 1) W_j - W_{j-1},
/// and e_nu = (-1)^{nu+1} W_{nu+1} / (2 nu + 3).
double sa_sign(int degree);

double error_poly(const SmootherSpec &spec, double x);
/// q(x) = (1 - e(x)) / x, evaluated without the division for every family.
double q_value(const SmootherSpec &spec, double x);

/// max |e(x)| over [lo, hi] via a dense grid polished by golden-section search.
double max_abs_error_poly(const SmootherSpec &spec, double lo, double hi, int grid_points = 4001);

struct EndpointErrors
{
  double at_lambda1; ///< |1 - lambda1 p_m(lambda1; lambda)|
  double at_lambda0; ///< |1 - lambda0 p_m(lambda0; lambda)|
};

/// Closed-form endpoint errors of the BA1x polynomial built on [lambda, lambda1],
/// evaluated at the ends of the larger interval [lambda0, lambda1].
EndpointErrors ba1x_endpoint_errors(int m, double lambda, double lambda0, double lambda1);

struct OptimalLambda0
{
  double value;
  bool crossed; ///< false: no crossing, value is lambda0 itself
  double error; ///< the common endpoint error at the returned value
};

/// lambda0* in [lambda0, lambda1) equalizing the two BA1x endpoint errors (bisection).
OptimalLambda0 optimal_lambda0_smoothing(int m, double lambda0, double lambda1);

/// Smallest BA1x degree m with delta^m (kappa-1)/2 <= rho and <= 1/lambda1.
int min_degree(double rho, double kappa, double lambda1);

/// True when max |e| < 1 on (0, lambda1] (checked on a dense grid).
bool is_convergent_smoother(const SmootherSpec &spec);

} // namespace polymg

#endif
