#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "distributions.hpp"
#include "market.hpp"

namespace matchmarket {

/// The vendor offers variants in decreasing order of its own utility and the
/// buyer takes the first one with x >= y. Single buyer only.
MatchOutcome vendor_proposes(const VariantTable& table);

struct SearchParams {
  double beta = 0.01;        // cost per examined variant
  std::size_t n = 1;         // variants examined
  DistributionSpec spec = DistributionSpec::uniform_sym();
  double cost_exponent = 1.0;  // cost = beta * n^cost_exponent; 1 is the validated case

  void validate() const;
  double cost(std::size_t examined) const;
};

struct SearchOutcome {
  double best_utility = 0.0;
  double net_utility = 0.0;
  std::size_t examined = 0;
};

SearchOutcome buyer_search(const SearchParams& params, SeedSpec seed);

struct CurvePoint {
  std::size_t n = 0;
  double mean_net = 0.0;
  double std_error = 0.0;
};

struct NOptScan {
  std::size_t n_opt = 0;
  std::vector<CurvePoint> curve;  // n = 1..n_max
  /// False when the maximum sits at n_max, i.e. the curve may still be rising.
  bool bracketed = false;
};

struct ScanOptions {
  std::size_t n_max = 100;
  std::uint64_t realizations = 10000;
  SeedSpec seed{};  // realization r uses index seed.realization_index + r
  unsigned workers = 0;
  double cost_exponent = 1.0;
};

/// Monte Carlo mean of the largest of n draws for n = 1..n_max (mean_net
/// holds the gross mean, no cost). Every realization draws one stream of
/// n_max utilities and contributes its prefix maxima to all n (common random
/// numbers).
std::vector<CurvePoint> max_curve(const DistributionSpec& spec, const ScanOptions& options);

/// Subtracts beta * n^cost_exponent from a gross curve and locates the maximum.
NOptScan apply_search_cost(std::span<const CurvePoint> gross, double beta,
                           double cost_exponent = 1.0);

/// Monte Carlo estimate of u_S(beta, n) for n = 1..n_max.
NOptScan n_opt_scan(double beta, const DistributionSpec& spec, const ScanOptions& options);

/// True if the curve's significant steps (|change| above three combined
/// standard errors) on a geometric grid of n go up and then down, with
/// exactly one change of sign.
bool rises_then_falls(std::span<const CurvePoint> curve);

}  // namespace matchmarket
