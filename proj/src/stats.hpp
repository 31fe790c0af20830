#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace matchmarket {

/// Streaming mean and variance (Welford), mergeable in a fixed order.
struct Moments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(count + o.count);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.count) / n;
    m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / n;
    count += o.count;
  }

  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double std_dev() const { return std::sqrt(variance()); }
  /// Sample standard deviation over sqrt(count).
  double std_error() const {
    return count > 1 ? std_dev() / std::sqrt(static_cast<double>(count)) : 0.0;
  }
};

/// Paired streaming moments with the co-moment, for ratios of means.
struct PairedMoments {
  std::uint64_t count = 0;
  double mean_a = 0.0, mean_b = 0.0;
  double m2_a = 0.0, m2_b = 0.0, c_ab = 0.0;

  void add(double a, double b) {
    ++count;
    const double n = static_cast<double>(count);
    const double da = a - mean_a;
    const double db = b - mean_b;
    mean_a += da / n;
    mean_b += db / n;
    m2_a += da * (a - mean_a);
    m2_b += db * (b - mean_b);
    c_ab += da * (b - mean_b);
  }

  void merge(const PairedMoments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double n1 = static_cast<double>(count);
    const double n2 = static_cast<double>(o.count);
    const double n = n1 + n2;
    const double da = o.mean_a - mean_a;
    const double db = o.mean_b - mean_b;
    mean_a += da * n2 / n;
    mean_b += db * n2 / n;
    m2_a += o.m2_a + da * da * n1 * n2 / n;
    m2_b += o.m2_b + db * db * n1 * n2 / n;
    c_ab += o.c_ab + da * db * n1 * n2 / n;
    count += o.count;
  }

  /// mean_a / mean_b with its delta-method standard error.
  std::pair<double, double> ratio() const {
    const double n = static_cast<double>(count);
    const double r = mean_a / mean_b;
    if (count < 2) return {r, 0.0};
    const double var_a = m2_a / (n - 1.0) / n;
    const double var_b = m2_b / (n - 1.0) / n;
    const double cov = c_ab / (n - 1.0) / n;
    const double b2 = mean_b * mean_b;
    const double var_r = (var_a - 2.0 * r * cov + r * r * var_b) / b2;
    return {r, std::sqrt(std::max(0.0, var_r))};
  }
};

inline unsigned default_worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

inline constexpr std::uint64_t kRealizationBlock = 256;

/// Runs body(r, acc) for r in [0, count). Realizations are grouped into
/// fixed blocks of kRealizationBlock, each block accumulates into its own copy
/// of proto in index order, and blocks are merged in index order. The result
/// is therefore bit-identical for any worker count.
template <class Acc, class Body>
Acc reduce_realizations(std::uint64_t count, unsigned workers, const Acc& proto, Body body) {
  const std::uint64_t blocks = (count + kRealizationBlock - 1) / kRealizationBlock;
  std::vector<Acc> partial(blocks, proto);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    for (;;) {
      const std::uint64_t b = next.fetch_add(1);
      if (b >= blocks) return;
      try {
        const std::uint64_t end = std::min(count, (b + 1) * kRealizationBlock);
        for (std::uint64_t r = b * kRealizationBlock; r < end; ++r) body(r, partial[b]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = blocks;
        return;
      }
    }
  };

  if (workers == 0) workers = default_worker_count();
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(blocks, 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);

  Acc total = proto;
  for (const auto& p : partial) total.merge(p);
  return total;
}

}  // namespace matchmarket
