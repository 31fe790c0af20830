#include "experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "analytics.hpp"
#include "csv.hpp"
#include "distributions.hpp"
#include "error.hpp"
#include "market.hpp"
#include "protocols.hpp"
#include "stats.hpp"

namespace matchmarket {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <std::size_t K>
struct MomentArray {
  std::array<Moments, K> m{};
  Moments& operator[](std::size_t i) { return m[i]; }
  const Moments& operator[](std::size_t i) const { return m[i]; }
  void merge(const MomentArray& o) {
    for (std::size_t i = 0; i < K; ++i) m[i].merge(o.m[i]);
  }
};

struct ValueList {
  std::vector<double> values;
  void merge(const ValueList& o) { values.insert(values.end(), o.values.begin(), o.values.end()); }
};

SeedSpec realization_seed(const ExperimentConfig& c, std::uint64_t r) {
  return {c.master_seed, r};
}

void report(const ProgressFn& progress, const std::string& message) {
  if (progress) progress(message);
}

std::string fmt(double v) { return csv::format_double(v); }

ResultTable start_table(const ExperimentConfig& c, std::vector<std::string> columns,
                        std::optional<std::string> label = {}) {
  ResultTable table(std::move(columns), std::move(label));
  for (const auto& [k, v] : describe(c)) table.set_meta(k, v);
  table.set_meta("code_version", kCodeVersion);
  return table;
}

VariantTable uniform_single_buyer(RandomStream& stream, std::size_t n) {
  std::vector<double> x(n), y(n);
  for (auto& v : x) v = stream.uniform_sym();
  for (auto& v : y) v = stream.uniform_sym();
  return VariantTable::single_buyer(std::move(x), std::move(y));
}

VariantTable correlated_single_buyer(RandomStream& stream, std::size_t n,
                                     const CorrelationParams& corr) {
  std::vector<double> x(n), y(n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto p = stream.correlated_pair(corr);
    x[a] = p.x;
    y[a] = p.y;
  }
  return VariantTable::single_buyer(std::move(x), std::move(y));
}

/// (t, s) combinations ordered by st, with the duplicate st = 0 collapsed.
std::vector<CorrelationParams> correlation_grid(const ExperimentConfig& c) {
  std::vector<CorrelationParams> grid;
  for (int s : c.s_values) {
    for (double t : c.t_values) grid.push_back({t, s});
  }
  std::stable_sort(grid.begin(), grid.end(), [](const auto& a, const auto& b) {
    return a.correlation() < b.correlation();
  });
  std::vector<CorrelationParams> unique;
  for (const auto& p : grid) {
    if (!unique.empty() && unique.back().correlation() == p.correlation()) {
      if (p.s > 0) unique.back() = p;
      continue;
    }
    unique.push_back(p);
  }
  return unique;
}

double approx_or_nan(const std::function<double()>& f) {
  try {
    return f();
  } catch (const Error&) {
    return kNaN;
  }
}

ResultTable run_fig1(const ExperimentConfig& c, const ProgressFn& progress) {
  auto table = start_table(c, {"n", "k", "delta_mean", "delta_se", "u_m_mean", "u_m_se",
                               "joint_mean", "joint_se", "no_trade_fraction",
                               "no_trade_fraction_se", "u_m_knorm_approx"});
  for (std::size_t n : c.n_variants) {
    for (double k : c.k_values) {
      report(progress, "fig1_delta_k: n=" + std::to_string(n) + " k=" + fmt(k));
      const auto rule = UtilityRule::knorm(k);
      // 0 inequality, 1 rule value, 2 x + y, 3 no-trade indicator
      const auto acc = reduce_realizations(
          c.realizations, c.workers, MomentArray<4>{}, [&](std::uint64_t r, MomentArray<4>& a) {
            RandomStream stream(realization_seed(c, r));
            const auto out = matchmaker_select(rule, uniform_single_buyer(stream, n));
            a[3].add(out.traded() ? 0.0 : 1.0);
            if (!out.traded()) return;
            a[0].add(*out.inequality);
            a[1].add(out.total_utility);
            a[2].add(out.joint_utility());
          });
      table.add_row({static_cast<double>(n), k, acc[0].mean, acc[0].std_error(), acc[1].mean,
                     acc[1].std_error(), acc[2].mean, acc[2].std_error(), acc[3].mean,
                     acc[3].std_error(), approx_or_nan([&] { return analytics::u_m_knorm_approx(n, k); })});
    }
  }
  return table;
}

ResultTable run_fig2(const ExperimentConfig& c, const ProgressFn& progress) {
  auto table = start_table(c, {"n", "m", "u_m_mean", "u_m_se", "single_buyer_approx"});
  const auto rule = UtilityRule::multi_buyer_average();
  for (std::size_t n : c.n_variants) {
    for (std::size_t m : c.m_buyers) {
      report(progress, "fig2_multibuyer: n=" + std::to_string(n) + " m=" + std::to_string(m));
      const auto acc = reduce_realizations(
          c.realizations, c.workers, Moments{}, [&](std::uint64_t r, Moments& a) {
            RandomStream stream(realization_seed(c, r));
            std::vector<double> vendor(n), buyers(m * n);
            for (auto& v : vendor) v = stream.uniform_sym();
            for (auto& v : buyers) v = stream.uniform_sym();
            a.add(matchmaker_select(rule, VariantTable(std::move(vendor), std::move(buyers), m))
                      .total_utility);
          });
      table.add_row({static_cast<double>(n), static_cast<double>(m), acc.mean, acc.std_error(),
                     approx_or_nan([&] { return analytics::u_m_uniform_approx(n); })});
    }
  }
  return table;
}

struct CurveMoments {
  std::vector<Moments> per_n;
  void merge(const CurveMoments& o) {
    for (std::size_t i = 0; i < per_n.size(); ++i) per_n[i].merge(o.per_n[i]);
  }
};

ResultTable run_threshold_scan(const ExperimentConfig& c, const ProgressFn& progress) {
  auto table = start_table(c, {"m", "n_star", "log_n_star", "max_mean_at_n_star",
                               "max_se_at_n_star"});
  std::vector<double> ms, logs;
  bool all_found = true;
  for (std::size_t m : c.m_buyers) {
    report(progress, "fig2_threshold_scan: m=" + std::to_string(m));
    // Prefix maxima of the buyer-mean utilities a_alpha, shared across n.
    const auto acc = reduce_realizations(
        c.realizations, c.workers, CurveMoments{std::vector<Moments>(c.n_max)},
        [&](std::uint64_t r, CurveMoments& a) {
          RandomStream stream(realization_seed(c, r));
          double best = -HUGE_VAL;
          for (std::size_t alpha = 0; alpha < c.n_max; ++alpha) {
            double sum = 0.0;
            for (std::size_t i = 0; i < m; ++i) sum += stream.uniform_sym();
            best = std::max(best, sum / static_cast<double>(m));
            a.per_n[alpha].add(best);
          }
        });
    const auto hit = std::find_if(acc.per_n.begin(), acc.per_n.end(),
                                  [&](const Moments& mo) { return mo.mean >= c.threshold; });
    if (hit == acc.per_n.end()) {
      all_found = false;
      table.add_row({static_cast<double>(m), kNaN, kNaN, kNaN, kNaN});
      continue;
    }
    const double n_star = static_cast<double>(hit - acc.per_n.begin() + 1);
    table.add_row({static_cast<double>(m), n_star, std::log(n_star), hit->mean, hit->std_error()});
    ms.push_back(static_cast<double>(m));
    logs.push_back(std::log(n_star));
  }
  // Least-squares line through (m, ln n*).
  if (ms.size() >= 2) {
    const double n = static_cast<double>(ms.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      mx += ms[i];
      my += logs[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      sxy += (ms[i] - mx) * (logs[i] - my);
      sxx += (ms[i] - mx) * (ms[i] - mx);
    }
    const double slope = sxy / sxx;
    table.set_meta("log_n_star_slope", fmt(slope));
    table.set_meta("log_n_star_intercept", fmt(my - slope * mx));
  }
  table.set_meta("threshold_reached_for_all_m", all_found ? "true" : "false");
  return table;
}

ResultTable run_fig3(const ExperimentConfig& c, const ProgressFn& progress) {
  auto table = start_table(c, {"n", "t", "s", "st", "u_m_mean", "u_m_se", "implicit_root",
                               "log_approx", "quadrature_u_m"});
  for (std::size_t n : c.n_variants) {
    for (const auto& corr : correlation_grid(c)) {
      const double st = corr.correlation();
      report(progress, "fig3_correlated: n=" + std::to_string(n) + " st=" + fmt(st));
      const auto acc = reduce_realizations(
          c.realizations, c.workers, Moments{}, [&](std::uint64_t r, Moments& a) {
            RandomStream stream(realization_seed(c, r));
            double best = -HUGE_VAL;
            for (std::size_t alpha = 0; alpha < n; ++alpha) {
              const auto p = stream.correlated_pair(corr);
              best = std::max(best, p.x + p.y);
            }
            a.add(best);
          });
      const double v = 2.0 * (1.0 + st);
      // u_alpha is identically zero when v = 0, and so is its maximum.
      const double root =
          v > 0.0 ? approx_or_nan([&] { return analytics::solve_u_m_normal(n, v); }) : 0.0;
      const double log_approx = approx_or_nan([&] { return analytics::u_m_normal_approx(n, st); });
      const double exact =
          v > 0.0 ? analytics::extreme_mean(analytics::normal_base(v, n), n) : 0.0;
      table.add_row({static_cast<double>(n), corr.t, static_cast<double>(corr.s), st, acc.mean,
                     acc.std_error(), root, log_approx, exact});
    }
  }
  return table;
}

ResultTable run_fig4(const ExperimentConfig& c, const ProgressFn& progress) {
  auto table = start_table(
      c, {"n", "t", "s", "st", "mm_total_mean", "mm_total_se", "vp_total_mean", "vp_total_se",
          "mm_inequality_mean", "mm_inequality_se", "vp_inequality_mean", "vp_inequality_se",
          "mm_no_trade_fraction", "mm_no_trade_fraction_se", "vp_no_trade_fraction",
          "vp_no_trade_fraction_se"});
  for (std::size_t n : c.n_variants) {
    for (const auto& corr : correlation_grid(c)) {
      report(progress, "fig4_vendor_proposes: n=" + std::to_string(n) +
                           " st=" + fmt(corr.correlation()));
      // 0/1 totals, 2/3 inequalities, 4/5 no-trade indicators (mm, vp)
      const auto acc = reduce_realizations(
          c.realizations, c.workers, MomentArray<6>{}, [&](std::uint64_t r, MomentArray<6>& a) {
            RandomStream stream(realization_seed(c, r));
            const auto market = correlated_single_buyer(stream, n, corr);
            const auto mm = matchmaker_select(c.rule, market);
            const auto vp = vendor_proposes(market);
            a[4].add(mm.traded() ? 0.0 : 1.0);
            a[5].add(vp.traded() ? 0.0 : 1.0);
            if (mm.traded()) {
              a[0].add(mm.joint_utility());
              a[2].add(*mm.inequality);
            }
            if (vp.traded()) {
              a[1].add(vp.joint_utility());
              a[3].add(*vp.inequality);
            }
          });
      table.add_row({static_cast<double>(n), corr.t, static_cast<double>(corr.s),
                     corr.correlation(), acc[0].mean, acc[0].std_error(), acc[1].mean,
                     acc[1].std_error(), acc[2].mean, acc[2].std_error(), acc[3].mean,
                     acc[3].std_error(), acc[4].mean, acc[4].std_error(), acc[5].mean,
                     acc[5].std_error()});
    }
  }
  return table;
}

struct SearchDistribution {
  const char* name;
  DistributionSpec spec;
};

std::array<SearchDistribution, 3> search_distributions(double gamma) {
  return {{{"uniform", DistributionSpec::uniform_sym()},
           {"normal", DistributionSpec::std_normal()},
           {"powerlaw", DistributionSpec::power_law(gamma)}}};
}

double analytic_x_m(DistributionKind kind, std::size_t n, double gamma) {
  switch (kind) {
    case DistributionKind::UniformSym: return analytics::x_m_uniform_exact(n);
    case DistributionKind::StdNormal: return n == 1 ? 0.0 : analytics::x_m_normal_approx(n);
    case DistributionKind::PowerLaw: return analytics::x_m_powerlaw_approx(n, gamma);
  }
  return kNaN;
}

double analytic_n_opt(DistributionKind kind, double beta, double gamma) {
  return approx_or_nan([&] {
    switch (kind) {
      case DistributionKind::UniformSym: return analytics::n_opt_uniform(beta);
      case DistributionKind::StdNormal: return analytics::n_opt_normal(beta);
      case DistributionKind::PowerLaw: return analytics::n_opt_powerlaw(beta, gamma);
    }
    return kNaN;
  });
}

std::vector<std::vector<CurvePoint>> gross_curves(const ExperimentConfig& c,
                                                  const ProgressFn& progress) {
  std::vector<std::vector<CurvePoint>> curves;
  for (const auto& d : search_distributions(c.gamma)) {
    report(progress, std::string(experiment_name(c.experiment)) + ": scanning " + d.name);
    ScanOptions opt;
    opt.n_max = c.n_max;
    opt.realizations = c.realizations;
    opt.seed = {c.master_seed, 0};
    opt.workers = c.workers;
    opt.cost_exponent = c.cost_exponent;
    curves.push_back(max_curve(d.spec, opt));
  }
  return curves;
}

ResultTable run_fig5(const ExperimentConfig& c, const ProgressFn& progress) {
  const auto dists = search_distributions(c.gamma);
  std::vector<std::string> columns{"n"};
  for (const auto& d : dists) {
    const std::string base = std::string("u_s_") + d.name;
    columns.push_back(base + "_mean");
    columns.push_back(base + "_se");
    columns.push_back(base + "_analytic");
  }
  auto table = start_table(c, columns);
  const double beta = c.beta_values.front();
  const auto curves = gross_curves(c, progress);
  std::vector<NOptScan> scans;
  for (std::size_t d = 0; d < dists.size(); ++d) {
    scans.push_back(apply_search_cost(curves[d], beta, c.cost_exponent));
  }
  const SearchParams cost{beta, 1, DistributionSpec::uniform_sym(), c.cost_exponent};
  for (std::size_t i = 0; i < c.n_max; ++i) {
    const std::size_t n = i + 1;
    std::vector<double> row{static_cast<double>(n)};
    for (std::size_t d = 0; d < dists.size(); ++d) {
      row.push_back(scans[d].curve[i].mean_net);
      row.push_back(scans[d].curve[i].std_error);
      row.push_back(analytic_x_m(dists[d].spec.kind, n, c.gamma) - cost.cost(n));
    }
    table.add_row(std::move(row));
  }
  for (std::size_t d = 0; d < dists.size(); ++d) {
    const std::string name = dists[d].name;
    table.set_meta("n_opt_" + name + "_empirical", std::to_string(scans[d].n_opt));
    table.set_meta("n_opt_" + name + "_analytic",
                   fmt(analytic_n_opt(dists[d].spec.kind, beta, c.gamma)));
    table.set_meta(name + "_bracketed", scans[d].bracketed ? "true" : "false");
    table.set_meta(name + "_rises_then_falls", rises_then_falls(scans[d].curve) ? "true" : "false");
  }
  return table;
}

ResultTable run_fig5_nopt(const ExperimentConfig& c, const ProgressFn& progress) {
  const auto dists = search_distributions(c.gamma);
  std::vector<std::string> columns{"beta"};
  for (const auto& d : dists) {
    const std::string base = std::string("n_opt_") + d.name;
    columns.push_back(base + "_empirical");
    columns.push_back(base + "_analytic");
    columns.push_back(base + "_bracketed");
  }
  auto table = start_table(c, columns);
  const auto curves = gross_curves(c, progress);
  for (double beta : c.beta_values) {
    std::vector<double> row{beta};
    for (std::size_t d = 0; d < dists.size(); ++d) {
      const auto scan = apply_search_cost(curves[d], beta, c.cost_exponent);
      row.push_back(static_cast<double>(scan.n_opt));
      row.push_back(analytic_n_opt(dists[d].spec.kind, beta, c.gamma));
      row.push_back(scan.bracketed ? 1.0 : 0.0);
    }
    table.add_row(std::move(row));
  }
  return table;
}

}  // namespace

ResultTable claims_report(const ExperimentConfig& config, const ProgressFn& progress) {
  auto c = config;
  c.experiment = ExperimentKind::ClaimsTable;
  validate(c);
  const std::size_t n = c.n_variants.front();
  auto table = start_table(c, {"value", "std_error", "reference_value"}, std::string("claim"));

  report(progress, "claims_table: linear vs min rule, uniform utilities");
  struct RuleAcc {
    PairedMoments inequality;  // a = min rule, b = linear
    PairedMoments joint;
    void merge(const RuleAcc& o) {
      inequality.merge(o.inequality);
      joint.merge(o.joint);
    }
  };
  const auto rules = reduce_realizations(
      c.realizations, c.workers, RuleAcc{}, [&](std::uint64_t r, RuleAcc& a) {
        RandomStream stream(realization_seed(c, r));
        const auto market = uniform_single_buyer(stream, n);
        const auto lin = matchmaker_select(UtilityRule::linear(), market);
        const auto mn = matchmaker_select(UtilityRule::min_rule(), market);
        a.inequality.add(*mn.inequality, *lin.inequality);
        a.joint.add(mn.joint_utility(), lin.joint_utility());
      });
  const auto se_of = [&](const PairedMoments& p, bool first) {
    const double var = (first ? p.m2_a : p.m2_b) / static_cast<double>(p.count - 1);
    return std::sqrt(var / static_cast<double>(p.count));
  };
  const auto [ineq_ratio, ineq_ratio_se] = rules.inequality.ratio();
  const auto [joint_ratio, joint_ratio_se] = rules.joint.ratio();
  table.add_row("delta_linear", {rules.inequality.mean_b, se_of(rules.inequality, false),
                                 approx_or_nan([&] { return analytics::delta_uniform_approx(n); })});
  table.add_row("delta_min", {rules.inequality.mean_a, se_of(rules.inequality, true), kNaN});
  table.add_row("inequality_reduction_min", {1.0 - ineq_ratio, ineq_ratio_se, 0.29});
  table.add_row("joint_utility_linear",
                {rules.joint.mean_b, se_of(rules.joint, false),
                 approx_or_nan([&] { return analytics::u_m_uniform_approx(n); })});
  table.add_row("joint_utility_min", {rules.joint.mean_a, se_of(rules.joint, true), kNaN});
  table.add_row("joint_utility_reduction_min", {1.0 - joint_ratio, joint_ratio_se, 0.003});

  report(progress, "claims_table: matchmaker vs vendor-proposes, normal utilities");
  const CorrelationParams independent{0.0, 1};
  const auto protocols = reduce_realizations(
      c.realizations, c.workers, MomentArray<5>{}, [&](std::uint64_t r, MomentArray<5>& a) {
        RandomStream stream(realization_seed(c, r));
        const auto market = correlated_single_buyer(stream, n, independent);
        const auto mm = matchmaker_select(UtilityRule::linear(), market);
        const auto vp = vendor_proposes(market);
        a[0].add(*mm.inequality);
        a[1].add(mm.joint_utility());
        a[4].add(vp.traded() ? 0.0 : 1.0);
        if (vp.traded()) {
          a[2].add(*vp.inequality);
          a[3].add(vp.joint_utility());
        }
      });
  table.add_row("inequality_matchmaker_normal",
                {protocols[0].mean, protocols[0].std_error(), 1.1});
  table.add_row("inequality_vendor_proposes_normal",
                {protocols[2].mean, protocols[2].std_error(), 0.4});
  table.add_row("joint_utility_matchmaker_normal",
                {protocols[1].mean, protocols[1].std_error(), kNaN});
  table.add_row("joint_utility_vendor_proposes_normal",
                {protocols[3].mean, protocols[3].std_error(), kNaN});
  table.add_row("no_trade_fraction_vendor_proposes_normal",
                {protocols[4].mean, protocols[4].std_error(), std::ldexp(1.0, -static_cast<int>(n))});

  report(progress, "claims_table: large-N approximation error at N = 17");
  const double exact17 = analytics::extreme_mean(analytics::tent_base(), 17);
  const double approx17 = analytics::u_m_uniform_approx(17);
  table.add_row("u_m_approx_relative_error_n17",
                {std::abs(approx17 - exact17) / exact17, 0.0, 0.01});

  report(progress, "claims_table: power-law maximum statistics");
  const auto spec = DistributionSpec::power_law(c.gamma);
  const auto maxima = reduce_realizations(
      c.realizations, c.workers, ValueList{}, [&](std::uint64_t r, ValueList& a) {
        RandomStream stream(realization_seed(c, r));
        a.values.push_back(sample_max(stream, spec, n));
      });
  Moments pl;
  for (double v : maxima.values) pl.add(v);
  auto sorted = maxima.values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t R = sorted.size();
  const double median = R % 2 ? sorted[R / 2] : 0.5 * (sorted[R / 2 - 1] + sorted[R / 2]);
  const double g = c.gamma;
  const double nd = static_cast<double>(n);
  const double median_exact = std::pow(1.0 - std::pow(0.5, 1.0 / nd), -1.0 / (g - 1.0));
  // Mode of n (g-1) x^-g (1 - x^(1-g))^(n-1): x^(1-g) = g / (g + (n-1)(g-1)).
  const double mode = std::pow(g / (g + (nd - 1.0) * (g - 1.0)), -1.0 / (g - 1.0));
  table.add_row("x_m_powerlaw_mean", {pl.mean, pl.std_error(),
                                      analytics::x_m_powerlaw_approx(n, c.gamma)});
  table.add_row("x_m_powerlaw_median", {median, kNaN, median_exact});
  table.add_row("x_m_powerlaw_mode", {mode, 0.0, kNaN});
  return table;
}

ResultTable run_experiment(const ExperimentConfig& config, const ProgressFn& progress) {
  validate(config);
  switch (config.experiment) {
    case ExperimentKind::Fig1DeltaK: return run_fig1(config, progress);
    case ExperimentKind::Fig2Multibuyer: return run_fig2(config, progress);
    case ExperimentKind::Fig2ThresholdScan: return run_threshold_scan(config, progress);
    case ExperimentKind::Fig3Correlated: return run_fig3(config, progress);
    case ExperimentKind::Fig4VendorProposes: return run_fig4(config, progress);
    case ExperimentKind::Fig5Search: return run_fig5(config, progress);
    case ExperimentKind::Fig5NOpt: return run_fig5_nopt(config, progress);
    case ExperimentKind::ClaimsTable: return claims_report(config, progress);
  }
  fail(ErrorCode::InvalidConfig, "unknown experiment");
}

}  // namespace matchmarket
