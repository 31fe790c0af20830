#include "analytics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <tuple>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "error.hpp"

namespace matchmarket::analytics {

namespace {

constexpr double kPi = std::numbers::pi;
// Mass of the maximum's distribution we allow to fall outside a truncated range.
constexpr double kTailMass = 1e-14;

void require_n(std::size_t n, std::size_t min, const char* what) {
  if (n < min) {
    std::ostringstream msg;
    msg << what << " requires n >= " << min << " (got " << n << ")";
    fail(ErrorCode::Domain, msg.str());
  }
}

double normal_tail(double u, double v) { return 0.5 * std::erfc(u / std::sqrt(2.0 * v)); }

}  // namespace

double tent_pdf(double u) {
  if (u < -2.0 || u > 2.0) return 0.0;
  return u < 0.0 ? (2.0 + u) / 4.0 : (2.0 - u) / 4.0;
}

double tent_tail(double u) {
  if (u <= -2.0) return 1.0;
  if (u >= 2.0) return 0.0;
  if (u >= 0.0) return (2.0 - u) * (2.0 - u) / 8.0;
  return 1.0 - (2.0 + u) * (2.0 + u) / 8.0;
}

BaseDistribution tent_base() { return {tent_pdf, tent_tail, {-2.0, 0.0, 2.0}}; }

BaseDistribution uniform_base() {
  return {[](double x) { return (x >= -1.0 && x <= 1.0) ? 0.5 : 0.0; },
          [](double x) { return x <= -1.0 ? 1.0 : (x >= 1.0 ? 0.0 : 0.5 * (1.0 - x)); },
          {-1.0, 1.0}};
}

BaseDistribution normal_base(double v, std::size_t n) {
  if (!(v > 0.0)) fail(ErrorCode::DegenerateVariance, "normal base needs positive variance");
  const double sd = std::sqrt(v);
  double z_low = 0.0;
  while (normal_tail(z_low * sd, v) > kTailMass) z_low += 0.5;
  double z_high = 0.0;
  while (static_cast<double>(n) * normal_tail(z_high * sd, v) > kTailMass) z_high += 0.5;
  std::vector<double> breaks;
  for (double z = -z_low; z < z_high; z += 0.5) breaks.push_back(z * sd);
  breaks.push_back(z_high * sd);
  return {[v](double u) { return std::exp(-u * u / (2.0 * v)) / std::sqrt(2.0 * kPi * v); },
          [v](double u) { return normal_tail(u, v); }, std::move(breaks)};
}

BaseDistribution power_law_base(double gamma, std::size_t n) {
  if (!(gamma > 2.0)) fail(ErrorCode::InvalidParameter, "power-law exponent must exceed 2");
  const double upper = std::pow(static_cast<double>(n) / kTailMass, 1.0 / (gamma - 1.0));
  std::vector<double> breaks{1.0};
  while (breaks.back() * 2.0 < upper) breaks.push_back(breaks.back() * 2.0);
  breaks.push_back(upper);
  return {[gamma](double x) { return x < 1.0 ? 0.0 : (gamma - 1.0) * std::pow(x, -gamma); },
          [gamma](double x) { return x <= 1.0 ? 1.0 : std::pow(x, 1.0 - gamma); },
          std::move(breaks)};
}

double extreme_pdf(double u, std::size_t n, const std::function<double(double)>& base_pdf,
                   const std::function<double(double)>& base_tail) {
  if (n == 0) fail(ErrorCode::Domain, "extreme statistics need n >= 1");
  const double f = base_pdf(u);
  if (n == 1 || f == 0.0) return f;
  const double tail = base_tail(u);
  if (tail >= 1.0) return 0.0;
  return static_cast<double>(n) * f * std::exp(static_cast<double>(n - 1) * std::log1p(-tail));
}

double extreme_moment(const BaseDistribution& base, std::size_t n, int power) {
  using boost::math::quadrature::gauss_kronrod;
  const auto integrand = [&](double u) {
    const double g = extreme_pdf(u, n, base.pdf, base.tail);
    return power == 0 ? g : std::pow(u, power) * g;
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < base.breakpoints.size(); ++i) {
    total += gauss_kronrod<double, 31>::integrate(integrand, base.breakpoints[i],
                                                  base.breakpoints[i + 1], 15, 1e-13);
  }
  return total;
}

double u_m_uniform_approx(std::size_t n) {
  require_n(n, 2, "u_m_uniform_approx");
  return 2.0 - std::sqrt(2.0 * kPi / static_cast<double>(n));
}

double delta_uniform_approx(std::size_t n) {
  require_n(n, 2, "delta_uniform_approx");
  return 1.0 - u_m_uniform_approx(n) / 2.0;
}

double u_m_knorm_approx(std::size_t n, double k) {
  require_n(n, 2, "u_m_knorm_approx");
  if (!(k > 0.0)) fail(ErrorCode::Domain, "k-norm exponent must be positive");
  const double inv_k = 1.0 / k;
  const double coeff = gamma_fn(0.5 + inv_k) * std::sqrt(kPi) /
                       (gamma_fn(1.0 + inv_k) * std::pow(4.0, 1.0 - inv_k));
  return 2.0 - std::sqrt(coeff) / std::sqrt(static_cast<double>(n));
}

double normal_root_residual(double u, std::size_t n, double v) {
  return u * std::exp(u * u / (2.0 * v)) - static_cast<double>(n) * std::sqrt(v / (2.0 * kPi));
}

double normal_root_bracket(std::size_t n, double v) {
  return 2.0 * std::sqrt(v * std::log(static_cast<double>(n)) + v);
}

double solve_u_m_normal(std::size_t n, double v) {
  if (!(v > 0.0)) fail(ErrorCode::DegenerateVariance, "variance must be positive");
  require_n(n, 2, "solve_u_m_normal");
  // ln u + u^2/2v is strictly increasing on u > 0, so the bracket holds one root.
  const double log_rhs = std::log(static_cast<double>(n) * std::sqrt(v / (2.0 * kPi)));
  const auto f = [&](double u) { return std::log(u) + u * u / (2.0 * v) - log_rhs; };
  double lo = std::numeric_limits<double>::min();
  double hi = normal_root_bracket(n, v);
  if (!(f(lo) < 0.0 && f(hi) > 0.0)) {
    fail(ErrorCode::Domain, "root of the extreme-value equation is not bracketed");
  }
  std::tie(lo, hi) = boost::math::tools::bisect(f, lo, hi,
                                                 boost::math::tools::eps_tolerance<double>());
  return std::abs(normal_root_residual(lo, n, v)) <= std::abs(normal_root_residual(hi, n, v))
             ? lo
             : hi;
}

double u_m_normal_approx(std::size_t n, double st) {
  if (!(st >= -1.0 && st <= 1.0)) fail(ErrorCode::Domain, "correlation st must lie in [-1, 1]");
  const double arg = static_cast<double>(n) * std::sqrt((1.0 + st) / kPi);
  // 1 + st carries an absolute rounding error of about one ulp of 1, so the
  // boundary st = -1 + pi/n^2 gets that much relative slack.
  const double slack = std::min(1e-6, 4.0 * std::numeric_limits<double>::epsilon() / (1.0 + st));
  if (!(arg >= 1.0 - slack)) {
    fail(ErrorCode::ApproximationDomain, "n sqrt((1+st)/pi) must be at least 1");
  }
  return std::sqrt(4.0 * (1.0 + st) * std::max(0.0, std::log(arg)));
}

double x_m_uniform_exact(std::size_t n) {
  require_n(n, 1, "x_m_uniform_exact");
  return 1.0 - 2.0 / (static_cast<double>(n) + 1.0);
}

double x_m_normal_approx(std::size_t n) { return solve_u_m_normal(n, 1.0); }

double x_m_powerlaw_approx(std::size_t n, double gamma, double r) {
  if (!(gamma > 2.0)) {
    fail(ErrorCode::Domain, "the mean of the maximum diverges for gamma <= 2");
  }
  if (!(r > 0.0 && r <= 1.0)) fail(ErrorCode::Domain, "power-law fraction r must lie in (0, 1]");
  const double nr = static_cast<double>(n) * r;
  if (nr < 1.0) fail(ErrorCode::ApproximationDomain, "n r must be at least 1");
  const double delta = (gamma - 2.0) / (gamma - 1.0);
  return std::pow(nr, 1.0 / (gamma - 1.0)) * gamma_fn(delta);
}

double n_opt_uniform(double beta) {
  if (!(beta > 0.0)) fail(ErrorCode::ApproximationDomain, "search cost must be positive");
  return std::sqrt(2.0 / beta) - 1.0;
}

double n_opt_normal(double beta) {
  if (!(beta > 0.0) || !(2.0 * kPi * beta * beta < 1.0)) {
    fail(ErrorCode::ApproximationDomain, "normal N_opt needs 0 < beta and 2 pi beta^2 < 1");
  }
  // Rough estimate <x_m> = 1 gives N0 = 1/beta; feeding N0 into the v = 1
  // extreme-value equation (prefactor dropped) refines <x_m>.
  const double n0 = 1.0 / beta;
  const double x_m = std::sqrt(2.0 * std::log(n0 / std::sqrt(2.0 * kPi)));
  return 1.0 / (beta * x_m);
}

double n_opt_powerlaw(double beta, double gamma) {
  if (!(beta > 0.0)) fail(ErrorCode::ApproximationDomain, "search cost must be positive");
  if (!(gamma > 2.0)) fail(ErrorCode::ApproximationDomain, "power-law N_opt needs gamma > 2");
  const double delta = (gamma - 2.0) / (gamma - 1.0);
  return std::pow(beta * (gamma - 1.0) / gamma_fn(delta), -1.0 / delta);
}

double gamma_fn(double x) {
  if (!(x > 0.0)) fail(ErrorCode::Domain, "gamma function defined here for x > 0 only");
  return std::tgamma(x);
}

}  // namespace matchmarket::analytics
