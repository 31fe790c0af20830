#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace matchmarket::analytics {

// Density of x + y for independent x, y ~ U(-1, 1).
double tent_pdf(double u);
// P(x + y > u) for the same pair.
double tent_tail(double u);

/// A base distribution for extreme statistics: density, upper tail, and the
/// integration range (finite support, or truncated where the remaining tail
/// mass of the maximum is negligible). Breakpoints split the range at kinks
/// and around the bulk so adaptive quadrature sees smooth pieces.
struct BaseDistribution {
  std::function<double(double)> pdf;
  std::function<double(double)> tail;
  std::vector<double> breakpoints;  // ascending, first/last are the range ends
};

BaseDistribution tent_base();
BaseDistribution uniform_base();
/// N(0, v), truncated so that the maximum of n draws loses < 1e-14 mass.
BaseDistribution normal_base(double v, std::size_t n);
BaseDistribution power_law_base(double gamma, std::size_t n);

/// Density of the maximum of n i.i.d. draws: n f(u) [1 - P(u)]^(n-1).
double extreme_pdf(double u, std::size_t n, const std::function<double(double)>& base_pdf,
                   const std::function<double(double)>& base_tail);

/// Integral of u^power * extreme_pdf over the base range by adaptive
/// Gauss-Kronrod quadrature; power 0 is the normalization, 1 the mean.
double extreme_moment(const BaseDistribution& base, std::size_t n, int power);
inline double extreme_mean(const BaseDistribution& base, std::size_t n) {
  return extreme_moment(base, n, 1);
}

// Large-n approximations for the linear rule with U(-1, 1) utilities.
double u_m_uniform_approx(std::size_t n);
/// 1 - <u_m>/2 with the approximation above, equal to sqrt(pi / (2n)).
double delta_uniform_approx(std::size_t n);

/// Large-n approximation for the k-norm rule, evaluated as printed; its
/// correction term is half that of u_m_uniform_approx at k = 1.
double u_m_knorm_approx(std::size_t n, double k);

/// Positive root u of u exp(u^2 / 2v) = n sqrt(v / 2 pi), solved by bracketed
/// root finding to full double precision. Throws DegenerateVariance if v <= 0.
double solve_u_m_normal(std::size_t n, double v);
/// Left minus right side of the equation above.
double normal_root_residual(double u, std::size_t n, double v);
/// Upper end of the root bracket, 2 sqrt(v ln n + v).
double normal_root_bracket(std::size_t n, double v);

/// sqrt(4 (1+st) ln(n sqrt((1+st)/pi))); throws ApproximationDomain when
/// the logarithm would be negative.
double u_m_normal_approx(std::size_t n, double st);

double x_m_uniform_exact(std::size_t n);
double x_m_normal_approx(std::size_t n);
/// (n r)^(1/(gamma-1)) Gamma(delta) with delta = (gamma-2)/(gamma-1).
double x_m_powerlaw_approx(std::size_t n, double gamma, double r = 1.0);

double n_opt_uniform(double beta);
double n_opt_normal(double beta);
double n_opt_powerlaw(double beta, double gamma);

double gamma_fn(double x);

}  // namespace matchmarket::analytics
