// Acceptance suite: one [PASS]/[FAIL] line per criterion.
//
//   acceptance            run criteria 1-10
//   acceptance 3 7        run only criteria 3 and 7
//
// Exit status is 0 only if every selected criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "analytics.hpp"
#include "config.hpp"
#include "distributions.hpp"
#include "experiments.hpp"
#include "market.hpp"
#include "oracles.hpp"
#include "protocols.hpp"
#include "result_table.hpp"
#include "stats.hpp"

using namespace matchmarket;

namespace {

constexpr std::uint64_t kSeed = 20090101;

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& note) {
    pass = pass && ok;
    notes.push_back((ok ? "" : "NOT ") + note);
  }
};

std::string num(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

double meta_number(const ResultTable& t, const std::string& key) {
  const auto v = t.meta(key);
  return v ? std::stod(*v) : std::nan("");
}

bool meta_true(const ResultTable& t, const std::string& key) {
  const auto v = t.meta(key);
  return v && *v == "true";
}

ExperimentConfig configure(ExperimentKind kind,
                           std::vector<std::pair<const char*, std::string>> settings) {
  auto c = default_config(kind);
  c.master_seed = kSeed;
  for (const auto& [k, v] : settings) apply_setting(c, k, v);
  return c;
}

std::string csv_text(const ResultTable& t) {
  std::ostringstream os;
  write_csv(t, os);
  return os.str();
}

// Large-N uniform approximation vs quadrature at N = 17, plus Monte Carlo.
Verdict criterion1() {
  Verdict v;
  const std::size_t n = 17;
  const double exact = analytics::extreme_mean(analytics::tent_base(), n);
  const double reference = oracle::tent_max_mean(n);
  const double approx = 2.0 - std::sqrt(2.0 * std::numbers::pi / static_cast<double>(n));
  v.check(std::abs(exact - reference) < 1e-9 * reference,
          "quadrature " + num(exact, 8) + " matches independent integral " + num(reference, 8));
  const double rel = std::abs(approx - exact) / exact;
  v.check(rel < 0.01, "relative error " + num(rel) + " < 0.01");

  const auto mc = reduce_realizations(1000000, 0, Moments{}, [&](std::uint64_t r, Moments& a) {
    RandomStream s({kSeed, r});
    double best = -HUGE_VAL;
    for (std::size_t i = 0; i < n; ++i) best = std::max(best, s.uniform_sym() + s.uniform_sym());
    a.add(best);
  });
  v.check(std::abs(mc.mean - exact) <= 3.0 * mc.std_error(),
          "MC " + num(mc.mean, 6) + " +- " + num(mc.std_error(), 2) + " within 3 se of exact");
  return v;
}

// Inequality of the k-norm matchmaker at large k.
Verdict criterion2() {
  Verdict v;
  const auto t = run_experiment(configure(ExperimentKind::Fig1DeltaK,
                                          {{"n", "1000"}, {"k", "100"}, {"realizations", "10000"}}));
  const double delta = t.at(0, "delta_mean");
  v.check(delta >= 0.48 && delta <= 0.52,
          "Delta(k=100) = " + num(delta) + " +- " + num(t.at(0, "delta_se"), 2) +
              " in [0.48, 0.52]");
  return v;
}

// Min rule vs linear rule at N = 1000.
Verdict criterion3() {
  Verdict v;
  const auto t = claims_report(
      configure(ExperimentKind::ClaimsTable, {{"n", "1000"}, {"realizations", "100000"}}));
  const auto row = [&](const char* claim) { return t.find_label(claim); };
  const double ineq = t.at(row("inequality_reduction_min"), "value");
  const double joint = t.at(row("joint_utility_reduction_min"), "value");
  v.check(ineq >= 0.26 && ineq <= 0.32, "inequality reduction " + num(ineq) + " in [0.26, 0.32]");
  v.check(joint < 0.005, "total-utility reduction " + num(joint) + " < 0.005");
  return v;
}

// Correlated maxima against the implicit-equation root.
Verdict criterion4() {
  Verdict v;
  const auto t = run_experiment(configure(ExperimentKind::Fig3Correlated,
                                          {{"n", "1000"},
                                           {"t", "0,0.4,0.8"},
                                           {"s", "-1,1"},
                                           {"realizations", "10000"}}));
  double previous = -HUGE_VAL;
  bool increasing = true;
  for (double target : {-0.8, -0.4, 0.0, 0.4, 0.8}) {
    std::size_t r = 0;
    while (r < t.rows() && std::abs(t.at(r, "st") - target) > 1e-12) ++r;
    if (r == t.rows()) {
      v.check(false, "row for st = " + num(target) + " present");
      continue;
    }
    const double mc = t.at(r, "u_m_mean");
    const double root = t.at(r, "implicit_root");
    const double rel = std::abs(mc - root) / root;
    v.check(rel < 0.06, "st=" + num(target) + ": MC " + num(mc) + " vs root " + num(root) +
                            " (rel " + num(rel, 3) + ")");
    increasing = increasing && mc > previous;
    previous = mc;
  }
  v.check(increasing, "MC strictly increasing in st");
  return v;
}

// Matchmaker vs vendor-proposes with independent standard normals.
Verdict criterion5() {
  Verdict v;
  const auto t = run_experiment(
      configure(ExperimentKind::Fig4VendorProposes, {{"t", "0"}, {"realizations", "10000"}}));
  bool dominates = true;
  std::size_t at_1000 = t.rows();
  for (std::size_t r = 0; r < t.rows(); ++r) {
    dominates = dominates && t.at(r, "mm_total_mean") > t.at(r, "vp_total_mean");
    if (t.at(r, "n") == 1000.0) at_1000 = r;
  }
  if (at_1000 == t.rows()) {
    v.check(false, "row for N = 1000 present");
    return v;
  }
  const double mm = t.at(at_1000, "mm_inequality_mean");
  const double vp = t.at(at_1000, "vp_inequality_mean");
  v.check(mm >= 1.0 && mm <= 1.2, "matchmaker inequality " + num(mm) + " in [1.0, 1.2]");
  v.check(vp >= 0.35 && vp <= 0.45, "vendor-proposes inequality " + num(vp) + " in [0.35, 0.45]");
  v.check(dominates, "matchmaker total > vendor-proposes total at all " +
                         std::to_string(t.rows()) + " N");
  return v;
}

// Optimal search effort for the three utility distributions.
Verdict criterion6() {
  Verdict v;
  const auto t = run_experiment(configure(
      ExperimentKind::Fig5Search,
      {{"beta", "0.01"}, {"gamma", "4"}, {"n_max", "1000"}, {"realizations", "100000"}}));
  const double uni = meta_number(t, "n_opt_uniform_empirical");
  const double nor = meta_number(t, "n_opt_normal_empirical");
  const double pl = meta_number(t, "n_opt_powerlaw_empirical");
  v.check(uni >= 12 && uni <= 15, "uniform N_opt " + num(uni) + " in {12..15}");
  v.check(std::abs(nor - 36.8) <= 0.25 * 36.8, "normal N_opt " + num(nor) + " within 25% of 36.8");
  v.check(std::abs(pl - 303.0) <= 0.25 * 303.0,
          "power-law N_opt " + num(pl) + " within 25% of 303");
  for (const char* d : {"uniform", "normal", "powerlaw"}) {
    v.check(meta_true(t, std::string(d) + "_rises_then_falls"),
            std::string(d) + " curve rises then falls");
  }
  return v;
}

// Exact maxima of uniform and power-law draws.
Verdict criterion7() {
  Verdict v;
  for (std::size_t n : {1, 3, 10, 100}) {
    const auto spec = DistributionSpec::uniform_sym();
    const auto m = reduce_realizations(1000000, 0, Moments{}, [&](std::uint64_t r, Moments& a) {
      RandomStream s({kSeed + n, r});
      a.add(sample_max(s, spec, n));
    });
    const double exact = 1.0 - 2.0 / (static_cast<double>(n) + 1.0);
    v.check(std::abs(m.mean - exact) <= 3.0 * m.std_error(),
            "uniform n=" + std::to_string(n) + ": " + num(m.mean, 6) + " vs " + num(exact, 6));
  }
  const auto spec = DistributionSpec::power_law(4.0);
  const auto m = reduce_realizations(1000000, 0, Moments{}, [&](std::uint64_t r, Moments& a) {
    RandomStream s({kSeed + 7, r});
    a.add(sample_max(s, spec, 1000));
  });
  const double predicted = 10.0 * std::tgamma(2.0 / 3.0);
  const double rel = std::abs(m.mean - predicted) / predicted;
  v.check(rel < 0.05, "Pareto 1000-max " + num(m.mean, 5) + " vs " + num(predicted, 5) +
                          " (rel " + num(rel, 3) + ")");
  return v;
}

// Saturation of the multi-buyer maximum and the e^M threshold growth.
Verdict criterion8() {
  Verdict v;
  const auto t = run_experiment(configure(
      ExperimentKind::Fig2Multibuyer,
      {{"n", "1000"}, {"m", "1,3,10,30,100"}, {"realizations", "10000"}}));
  bool monotone = true;
  std::string values;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    values += (r ? ", " : "") + num(t.at(r, "u_m_mean"));
    if (r == 0) continue;
    const double se = std::hypot(t.at(r, "u_m_se"), t.at(r - 1, "u_m_se"));
    monotone = monotone && t.at(r, "u_m_mean") <= t.at(r - 1, "u_m_mean") + 2.0 * se;
  }
  v.check(monotone, "decreasing over M = 1,3,10,30,100 (" + values + ")");
  const double single = 2.0 - std::sqrt(2.0 * std::numbers::pi / 1000.0);
  v.check(std::abs(t.at(0, "u_m_mean") - single) <= 3.0 * t.at(0, "u_m_se"),
          "M=1 within 3 se of " + num(single));
  const double last = t.at(t.rows() - 1, "u_m_mean");
  v.check(last >= 0.9 && last <= 1.15, "M=100 value " + num(last) + " in [0.9, 1.15]");

  const auto scan = run_experiment(configure(ExperimentKind::Fig2ThresholdScan, {}));
  const double slope = meta_number(scan, "log_n_star_slope");
  v.check(meta_true(scan, "threshold_reached_for_all_m"), "threshold reached for M = 1..12");
  v.check(std::abs(slope - 1.0) <= 0.3, "log N* slope " + num(slope) + " in [0.7, 1.3]");
  return v;
}

// Byte-identical CSV for different worker counts.
Verdict criterion9() {
  Verdict v;
  using K = ExperimentKind;
  const std::vector<std::pair<K, std::vector<std::pair<const char*, std::string>>>> runs{
      {K::Fig1DeltaK, {{"n", "200"}, {"realizations", "2000"}}},
      {K::Fig2Multibuyer, {{"n", "10,100"}, {"m", "1,5,20"}, {"realizations", "1000"}}},
      {K::Fig2ThresholdScan, {{"m", "1,2,3,4"}, {"realizations", "2000"}}},
      {K::Fig3Correlated, {{"n", "200"}, {"realizations", "1000"}}},
      {K::Fig4VendorProposes, {{"n", "5,50,500"}, {"t", "0,0.5"}, {"realizations", "1000"}}},
      {K::Fig5Search, {{"n_max", "400"}, {"realizations", "2000"}}},
      {K::Fig5NOpt, {{"n_max", "400"}, {"beta", "0.01,0.05"}, {"realizations", "1000"}}},
      {K::ClaimsTable, {{"n", "100"}, {"realizations", "2000"}}},
  };
  for (const auto& [kind, settings] : runs) {
    auto c = configure(kind, settings);
    std::string reference;
    bool same = true;
    for (const char* workers : {"1", "2", "5"}) {
      apply_setting(c, "workers", workers);
      const auto text = csv_text(run_experiment(c));
      if (reference.empty()) reference = text;
      same = same && text == reference;
    }
    v.check(same, std::string(experiment_name(kind)) + " identical for 1/2/5 workers");
  }
  return v;
}

// Property suites at binomial (3 sigma) or exact tolerances.
Verdict criterion10() {
  Verdict v;
  const std::uint64_t trials = 200000;
  auto rate = [&](std::uint64_t stream_id, auto&& no_event) {
    std::uint64_t hits = 0;
    for (std::uint64_t r = 0; r < trials; ++r) {
      RandomStream s({kSeed + stream_id, r});
      hits += no_event(s);
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
  };
  auto draw = [](RandomStream& s, std::size_t n, bool normal) {
    std::vector<double> x(n), y(n);
    for (std::size_t a = 0; a < n; ++a) {
      x[a] = normal ? s.std_normal() : s.uniform_sym();
      y[a] = normal ? s.std_normal() : s.uniform_sym();
    }
    return VariantTable::single_buyer(std::move(x), std::move(y));
  };

  for (std::size_t n : {1, 2, 4, 8}) {
    const double half = std::ldexp(1.0, -static_cast<int>(n));
    const double negative = rate(100 + n, [&](RandomStream& s) {
      return matchmaker_select(UtilityRule::linear(), draw(s, n, false)).total_utility < 0.0;
    });
    v.check(std::abs(negative - half) <= oracle::binomial_band(half, trials),
            "P(u_m<0) N=" + std::to_string(n) + ": " + num(negative) + " vs " + num(half));

    const double quarter = std::pow(0.75, static_cast<double>(n));
    const double knorm = rate(200 + n, [&](RandomStream& s) {
      return !matchmaker_select(UtilityRule::knorm(2.0), draw(s, n, false)).traded();
    });
    v.check(std::abs(knorm - quarter) <= oracle::binomial_band(quarter, trials),
            "k-norm no-trade N=" + std::to_string(n) + ": " + num(knorm) + " vs " + num(quarter));

    const double vp = rate(300 + n, [&](RandomStream& s) {
      return !vendor_proposes(draw(s, n, true)).traded();
    });
    v.check(std::abs(vp - half) <= oracle::binomial_band(half, trials),
            "vendor-proposes no-trade N=" + std::to_string(n) + ": " + num(vp) + " vs " +
                num(half));
  }

  bool invariant = true;
  const std::vector<UtilityRule> rules{UtilityRule::linear(), UtilityRule::min_rule(),
                                       UtilityRule::knorm(0.5), UtilityRule::knorm(3.0)};
  for (std::uint64_t r = 0; r < 20000; ++r) {
    RandomStream s({kSeed + 400, r});
    const auto table = draw(s, 1 + r % 30, r % 2 == 0);
    for (const auto& rule : rules) {
      invariant = invariant && scale_invariance_check(rule, table, 0.25) &&
                  scale_invariance_check(rule, table, 7.0);
    }
    for (const auto& rule : {UtilityRule::linear(), UtilityRule::min_rule()}) {
      const auto base = matchmaker_select(rule, table);
      for (double c : {-1.5, 0.75}) {
        invariant = invariant && matchmaker_select(rule, table.shifted(c)).chosen_index ==
                                     base.chosen_index;
      }
    }
  }
  v.check(invariant, "argmax scale and shift invariance on 20000 tables");

  bool oracle_equal = true;
  for (std::size_t n = 1; n <= 12; ++n) {
    for (std::uint64_t r = 0; r < 5000; ++r) {
      RandomStream s({kSeed + 500 + n, r});
      std::vector<double> x(n), y(n);
      // Quarter-step values on odd draws so ties and x == y occur.
      const bool coarse = r % 2 == 1;
      for (std::size_t a = 0; a < n; ++a) {
        x[a] = coarse ? std::round(4.0 * s.uniform_sym()) / 4.0 : s.std_normal();
        y[a] = coarse ? std::round(4.0 * s.uniform_sym()) / 4.0 : s.std_normal();
      }
      const auto out = vendor_proposes(VariantTable::single_buyer(x, y));
      const auto expected = oracle::acceptable_max_y(x, y);
      oracle_equal = oracle_equal && out.traded() == expected.has_value() &&
                     (!expected || out.chosen_index == *expected);
    }
  }
  v.check(oracle_equal, "vendor-proposes equals acceptable-set max y for N <= 12");
  return v;
}

struct Criterion {
  const char* title;
  Verdict (*run)();
};

const Criterion kCriteria[] = {
    {"large-N approximation within 1% at N = 17", criterion1},
    {"inequality at k = 100 near 0.5", criterion2},
    {"min-rule trade-off", criterion3},
    {"correlated maxima vs implicit root", criterion4},
    {"vendor-proposes inequalities", criterion5},
    {"search optima", criterion6},
    {"exact maxima", criterion7},
    {"multi-buyer saturation", criterion8},
    {"determinism across worker counts", criterion9},
    {"property suites", criterion10},
};

}  // namespace

int main(int argc, char** argv) {
  constexpr int count = static_cast<int>(std::size(kCriteria));
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    char* end = nullptr;
    const long id = std::strtol(argv[i], &end, 10);
    if (*end != '\0' || id < 1 || id > count) {
      std::fprintf(stderr, "usage: %s [criterion 1-%d ...]\n", argv[0], count);
      return 2;
    }
    selected.push_back(static_cast<int>(id));
  }
  if (selected.empty()) {
    for (int i = 1; i <= count; ++i) selected.push_back(i);
  }

  int failed = 0;
  for (int id : selected) {
    const auto& c = kCriteria[id - 1];
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string detail;
    for (const auto& note : v.notes) detail += (detail.empty() ? "" : "; ") + note;
    std::printf("[%s] criterion %d: %s (%s) [%.1f s]\n", v.pass ? "PASS" : "FAIL", id, c.title,
                detail.c_str(), seconds);
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
