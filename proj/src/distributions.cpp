#include "distributions.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "error.hpp"

namespace matchmarket {

void DistributionSpec::validate() const {
  if (kind == DistributionKind::PowerLaw && !(gamma > 2.0)) {
    std::ostringstream msg;
    msg << "power-law exponent must exceed 2 (got " << gamma << ")";
    fail(ErrorCode::InvalidParameter, msg.str());
  }
}

std::string DistributionSpec::name() const {
  switch (kind) {
    case DistributionKind::UniformSym: return "uniform";
    case DistributionKind::StdNormal: return "normal";
    case DistributionKind::PowerLaw: return "powerlaw";
  }
  return "unknown";
}

void CorrelationParams::validate() const {
  if (!(t >= 0.0 && t <= 1.0)) {
    fail(ErrorCode::InvalidParameter, "correlation strength t must lie in [0, 1]");
  }
  if (s != 1 && s != -1) {
    fail(ErrorCode::InvalidParameter, "correlation sign s must be +1 or -1");
  }
}

RandomStream::RandomStream(SeedSpec seed)
    : key_{static_cast<std::uint32_t>(seed.master_seed),
           static_cast<std::uint32_t>(seed.master_seed >> 32)},
      index_(seed.realization_index) {}

std::uint64_t RandomStream::next_u64() {
  if (buffered_ == 0) {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                  static_cast<std::uint32_t>(block_ >> 32),
                                  static_cast<std::uint32_t>(index_),
                                  static_cast<std::uint32_t>(index_ >> 32)};
    buffer_ = Philox4x32::generate(ctr, key_);
    ++block_;
    buffered_ = 2;
  }
  const int word = 2 - buffered_;
  --buffered_;
  return (std::uint64_t{buffer_[2 * word + 1]} << 32) | buffer_[2 * word];
}

double RandomStream::uniform01() {
  // 53 random bits at the centres of the 2^-53 grid cells.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::uniform_sym() { return 2.0 * uniform01() - 1.0; }

double RandomStream::std_normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  // Marsaglia polar method.
  double a, b, r2;
  do {
    a = uniform_sym();
    b = uniform_sym();
    r2 = a * a + b * b;
  } while (r2 >= 1.0 || r2 == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(r2) / r2);
  spare_normal_ = b * scale;
  return a * scale;
}

double RandomStream::power_law(double gamma) {
  return std::pow(uniform01(), -1.0 / (gamma - 1.0));
}

double RandomStream::draw(const DistributionSpec& spec) {
  switch (spec.kind) {
    case DistributionKind::UniformSym: return uniform_sym();
    case DistributionKind::StdNormal: return std_normal();
    case DistributionKind::PowerLaw: return power_law(spec.gamma);
  }
  return 0.0;
}

CorrelatedPair RandomStream::correlated_pair(const CorrelationParams& params) {
  const double own = std::sqrt(1.0 - params.t);
  const double common = std::sqrt(params.t);
  const double x_own = std_normal();
  const double y_own = std_normal();
  const double shared = std_normal();
  return {own * x_own + common * shared, own * y_own + params.s * common * shared};
}

std::vector<double> sample(const DistributionSpec& spec, std::size_t n, SeedSpec seed) {
  spec.validate();
  if (n == 0) fail(ErrorCode::InvalidParameter, "sample size must be positive");
  RandomStream stream(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = stream.draw(spec);
  return out;
}

double sample_max(RandomStream& stream, const DistributionSpec& spec, std::size_t n) {
  if (spec.kind == DistributionKind::PowerLaw) {
    // The inverse transform is decreasing in U, so the largest draw comes
    // from the smallest uniform; one pow() per call instead of n.
    double u_min = 1.0;
    for (std::size_t i = 0; i < n; ++i) u_min = std::min(u_min, stream.uniform01());
    return std::pow(u_min, -1.0 / (spec.gamma - 1.0));
  }
  double best = -HUGE_VAL;
  for (std::size_t i = 0; i < n; ++i) best = std::max(best, stream.draw(spec));
  return best;
}

std::vector<CorrelatedPair> sample_correlated_pair(const CorrelationParams& params,
                                                   std::size_t n, SeedSpec seed) {
  params.validate();
  if (n == 0) fail(ErrorCode::InvalidParameter, "sample size must be positive");
  RandomStream stream(seed);
  std::vector<CorrelatedPair> out(n);
  for (auto& p : out) p = stream.correlated_pair(params);
  return out;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) fail(ErrorCode::InvalidInput, "pearson: length mismatch");
  if (xs.size() < 2) fail(ErrorCode::InvalidInput, "pearson: need at least two points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) fail(ErrorCode::InvalidInput, "pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

void check_support(const DistributionSpec& spec, double x) {
  spec.validate();
  const bool ok = [&] {
    switch (spec.kind) {
      case DistributionKind::UniformSym: return x >= -1.0 && x <= 1.0;
      case DistributionKind::StdNormal: return std::isfinite(x);
      case DistributionKind::PowerLaw: return x >= 1.0;
    }
    return false;
  }();
  if (!ok) {
    std::ostringstream msg;
    msg << "x = " << x << " outside the support of the " << spec.name() << " distribution";
    fail(ErrorCode::Domain, msg.str());
  }
}

}  // namespace

double pdf(const DistributionSpec& spec, double x) {
  check_support(spec, x);
  switch (spec.kind) {
    case DistributionKind::UniformSym: return 0.5;
    case DistributionKind::StdNormal:
      return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    case DistributionKind::PowerLaw: return (spec.gamma - 1.0) * std::pow(x, -spec.gamma);
  }
  return 0.0;
}

double cdf_complement(const DistributionSpec& spec, double x) {
  check_support(spec, x);
  switch (spec.kind) {
    case DistributionKind::UniformSym: return 0.5 * (1.0 - x);
    case DistributionKind::StdNormal: return 0.5 * std::erfc(x / std::numbers::sqrt2);
    case DistributionKind::PowerLaw: return std::pow(x, 1.0 - spec.gamma);
  }
  return 0.0;
}

}  // namespace matchmarket
