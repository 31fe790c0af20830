#include "protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"
#include "stats.hpp"

namespace matchmarket {

MatchOutcome vendor_proposes(const VariantTable& table) {
  if (table.buyers() != 1) fail(ErrorCode::InvalidInput, "vendor-proposes needs exactly one buyer");
  std::vector<std::size_t> order(table.variants());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return table.vendor(a) > table.vendor(b);
  });
  MatchOutcome out;
  for (std::size_t alpha : order) {
    const double x = table.buyer(0, alpha);
    const double y = table.vendor(alpha);
    if (x >= y) {
      out.status = MatchStatus::Trade;
      out.chosen_index = alpha;
      out.total_utility = x + y;
      out.buyer_utility = x;
      out.vendor_utility = y;
      out.inequality = x - y;
      break;
    }
  }
  return out;
}

void SearchParams::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    fail(ErrorCode::InvalidParameter, "search cost beta must be non-negative");
  }
  if (n == 0) fail(ErrorCode::InvalidParameter, "search must examine at least one variant");
  if (!(cost_exponent > 0.0)) fail(ErrorCode::InvalidParameter, "cost exponent must be positive");
  spec.validate();
}

double SearchParams::cost(std::size_t examined) const {
  const double n_real = static_cast<double>(examined);
  return cost_exponent == 1.0 ? beta * n_real : beta * std::pow(n_real, cost_exponent);
}

SearchOutcome buyer_search(const SearchParams& params, SeedSpec seed) {
  params.validate();
  RandomStream stream(seed);
  SearchOutcome out;
  out.examined = params.n;
  out.best_utility = sample_max(stream, params.spec, params.n);
  out.net_utility = out.best_utility - params.cost(params.n);
  return out;
}

namespace {

struct CurveAccumulator {
  std::vector<Moments> per_n;
  void merge(const CurveAccumulator& o) {
    for (std::size_t i = 0; i < per_n.size(); ++i) per_n[i].merge(o.per_n[i]);
  }
};

}  // namespace

std::vector<CurvePoint> max_curve(const DistributionSpec& spec, const ScanOptions& options) {
  spec.validate();
  if (options.n_max < 2) fail(ErrorCode::InvalidParameter, "n_max must be at least 2");
  if (options.realizations < 100) {
    fail(ErrorCode::InvalidParameter, "an n_opt scan needs at least 100 realizations");
  }

  const CurveAccumulator proto{std::vector<Moments>(options.n_max)};
  const auto acc = reduce_realizations(
      options.realizations, options.workers, proto,
      [&](std::uint64_t r, CurveAccumulator& a) {
        RandomStream stream({options.seed.master_seed, options.seed.realization_index + r});
        if (spec.kind == DistributionKind::PowerLaw) {
          // Track the smallest uniform; the power-law maximum is its image.
          const double exponent = -1.0 / (spec.gamma - 1.0);
          double u_min = 2.0;
          double best = 0.0;
          for (std::size_t i = 0; i < options.n_max; ++i) {
            const double u = stream.uniform01();
            if (u < u_min) {
              u_min = u;
              best = std::pow(u_min, exponent);
            }
            a.per_n[i].add(best);
          }
        } else {
          double best = -HUGE_VAL;
          for (std::size_t i = 0; i < options.n_max; ++i) {
            best = std::max(best, stream.draw(spec));
            a.per_n[i].add(best);
          }
        }
      });

  std::vector<CurvePoint> curve;
  curve.reserve(options.n_max);
  for (std::size_t i = 0; i < options.n_max; ++i) {
    curve.push_back({i + 1, acc.per_n[i].mean, acc.per_n[i].std_error()});
  }
  return curve;
}

NOptScan apply_search_cost(std::span<const CurvePoint> gross, double beta, double cost_exponent) {
  if (gross.empty()) fail(ErrorCode::InvalidInput, "empty search curve");
  const SearchParams params{beta, 1, DistributionSpec::uniform_sym(), cost_exponent};
  params.validate();
  NOptScan scan;
  scan.curve.reserve(gross.size());
  for (const auto& p : gross) scan.curve.push_back({p.n, p.mean_net - params.cost(p.n), p.std_error});
  const auto best = std::max_element(scan.curve.begin(), scan.curve.end(),
                                     [](const CurvePoint& a, const CurvePoint& b) {
                                       return a.mean_net < b.mean_net;
                                     });
  scan.n_opt = best->n;
  scan.bracketed = scan.n_opt < gross.back().n;
  return scan;
}

NOptScan n_opt_scan(double beta, const DistributionSpec& spec, const ScanOptions& options) {
  if (!(beta > 0.0)) fail(ErrorCode::InvalidParameter, "search cost beta must be positive");
  return apply_search_cost(max_curve(spec, options), beta, options.cost_exponent);
}

bool rises_then_falls(std::span<const CurvePoint> curve) {
  if (curve.size() < 3) return false;
  std::vector<std::size_t> grid{0};
  while (grid.back() + 1 < curve.size()) {
    const auto step = std::max<std::size_t>(1, grid.back() / 4);
    grid.push_back(std::min(curve.size() - 1, grid.back() + step));
  }
  int sign_changes = 0;
  int last = 0;
  bool rose = false;
  bool fell = false;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const auto& a = curve[grid[g - 1]];
    const auto& b = curve[grid[g]];
    const double diff = b.mean_net - a.mean_net;
    if (std::abs(diff) <= 3.0 * (a.std_error + b.std_error)) continue;
    const int sign = diff > 0 ? 1 : -1;
    if (last != 0 && sign != last) ++sign_changes;
    last = sign;
    rose = rose || sign > 0;
    fell = fell || (sign < 0 && rose);
  }
  return rose && fell && sign_changes == 1;
}

}  // namespace matchmarket
