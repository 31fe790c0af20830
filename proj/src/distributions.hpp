#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "philox.hpp"

namespace matchmarket {

enum class DistributionKind { UniformSym, StdNormal, PowerLaw };

/// A utility distribution: U(-1,1), N(0,1), or the power law
/// (gamma-1) x^-gamma on [1, inf).
struct DistributionSpec {
  DistributionKind kind = DistributionKind::UniformSym;
  double gamma = 0.0;  // PowerLaw only

  static DistributionSpec uniform_sym() { return {DistributionKind::UniformSym, 0.0}; }
  static DistributionSpec std_normal() { return {DistributionKind::StdNormal, 0.0}; }
  static DistributionSpec power_law(double gamma) { return {DistributionKind::PowerLaw, gamma}; }

  /// Throws InvalidParameter for a power law with gamma <= 2.
  void validate() const;
  std::string name() const;
};

/// Shared-component correlation: Pearson correlation of the generated
/// pair is s*t.
struct CorrelationParams {
  double t = 0.0;
  int s = 1;

  double correlation() const { return s * t; }
  void validate() const;
};

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t realization_index = 0;
};

struct CorrelatedPair {
  double x;
  double y;
};

/// Random stream for one realization. The master seed is the Philox key and
/// the realization index occupies the upper half of the counter, so streams
/// of different realizations never overlap and can be generated in any order.
class RandomStream {
 public:
  explicit RandomStream(SeedSpec seed);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform01();
  double uniform_sym();
  double std_normal();
  /// Inverse transform x = U^(-1/(gamma-1)); gamma is not checked here.
  double power_law(double gamma);
  double draw(const DistributionSpec& spec);
  CorrelatedPair correlated_pair(const CorrelationParams& params);

 private:
  Philox4x32::Key key_;
  std::uint64_t index_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;  // 64-bit words left in buffer_
  std::optional<double> spare_normal_;
};

std::vector<double> sample(const DistributionSpec& spec, std::size_t n, SeedSpec seed);

/// Largest of n draws from spec using the stream. Equivalent to drawing n
/// values and taking the maximum.
double sample_max(RandomStream& stream, const DistributionSpec& spec, std::size_t n);

std::vector<CorrelatedPair> sample_correlated_pair(const CorrelationParams& params,
                                                   std::size_t n, SeedSpec seed);

double pearson(std::span<const double> xs, std::span<const double> ys);

double pdf(const DistributionSpec& spec, double x);
/// Upper-tail probability P(X > x).
double cdf_complement(const DistributionSpec& spec, double x);

}  // namespace matchmarket
