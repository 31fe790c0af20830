#include "doctest.h"

#include <cmath>
#include <vector>

#include "analytics.hpp"
#include "distributions.hpp"
#include "error.hpp"
#include "market.hpp"
#include "oracles.hpp"
#include "protocols.hpp"
#include "stats.hpp"

using namespace matchmarket;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::Io;
}

ScanOptions options(std::size_t n_max, std::uint64_t realizations, std::uint64_t seed) {
  ScanOptions o;
  o.n_max = n_max;
  o.realizations = realizations;
  o.seed = {seed, 0};
  return o;
}

}  // namespace

TEST_CASE("vendor-proposes examples") {
  SUBCASE("single acceptable variant") {
    const auto out = vendor_proposes(VariantTable::single_buyer({0.5}, {0.2}));
    CHECK(out.traded());
    CHECK(out.chosen_index == 0);
    CHECK(*out.inequality == doctest::Approx(0.3));
    CHECK(out.total_utility == doctest::Approx(0.7));
  }
  SUBCASE("offers go in decreasing vendor utility") {
    const auto out = vendor_proposes(VariantTable::single_buyer({0.1, 0.9, 0.4}, {0.8, 0.3, 0.35}));
    CHECK(out.chosen_index == 2);
  }
  SUBCASE("everything rejected") {
    const auto out = vendor_proposes(VariantTable::single_buyer({-0.3}, {0.1}));
    CHECK_FALSE(out.traded());
  }
  SUBCASE("x == y is accepted") {
    const auto out = vendor_proposes(VariantTable::single_buyer({0.2, 0.4}, {0.3, 0.4}));
    CHECK(out.chosen_index == 1);
    CHECK(*out.inequality == 0.0);
  }
  SUBCASE("several buyers are rejected") {
    CHECK(code_of([] { vendor_proposes(VariantTable({0.1}, {0.2, 0.3}, 2)); }) ==
          ErrorCode::InvalidInput);
  }
}

TEST_CASE("vendor-proposes equals the acceptable-set maximum of y") {
  RandomStream s({31, 0});
  for (std::size_t n = 1; n <= 12; ++n) {
    for (int trial = 0; trial < 2000; ++trial) {
      std::vector<double> x(n), y(n);
      // Coarse values on half the trials so ties in y and x == y occur.
      const bool coarse = trial % 2 == 0;
      for (std::size_t a = 0; a < n; ++a) {
        x[a] = coarse ? std::round(4.0 * s.uniform_sym()) / 4.0 : s.std_normal();
        y[a] = coarse ? std::round(4.0 * s.uniform_sym()) / 4.0 : s.std_normal();
      }
      const auto out = vendor_proposes(VariantTable::single_buyer(x, y));
      const auto expected = oracle::acceptable_max_y(x, y);
      REQUIRE(out.traded() == expected.has_value());
      if (!expected) continue;
      REQUIRE(out.chosen_index == *expected);
      REQUIRE(out.buyer_utility >= out.vendor_utility);
      REQUIRE(*out.inequality == out.buyer_utility - out.vendor_utility);
    }
  }
}

TEST_CASE("vendor-proposes no-trade rate is 2^-N") {
  const std::uint64_t trials = 200000;
  for (std::size_t n : {1, 2, 3, 5, 8}) {
    CAPTURE(n);
    RandomStream s({32, n});
    std::uint64_t none = 0;
    for (std::uint64_t r = 0; r < trials; ++r) {
      std::vector<double> x(n), y(n);
      for (std::size_t a = 0; a < n; ++a) {
        x[a] = s.std_normal();
        y[a] = s.std_normal();
      }
      none += !vendor_proposes(VariantTable::single_buyer(x, y)).traded();
    }
    const double p = std::ldexp(1.0, -static_cast<int>(n));
    CHECK(std::abs(static_cast<double>(none) / trials - p) <= oracle::binomial_band(p, trials));
  }
}

TEST_CASE("matchmaker total utility bounds vendor-proposes") {
  for (int s_sign : {-1, 1}) {
    for (double t : {0.0, 0.3, 0.7, 1.0}) {
      RandomStream s({33, static_cast<std::uint64_t>(10 * t) + (s_sign > 0 ? 100 : 0)});
      for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> x(50), y(50);
        for (std::size_t a = 0; a < 50; ++a) {
          const auto p = s.correlated_pair({t, s_sign});
          x[a] = p.x;
          y[a] = p.y;
        }
        const auto table = VariantTable::single_buyer(x, y);
        const auto mm = matchmaker_select(UtilityRule::linear(), table);
        const auto vp = vendor_proposes(table);
        if (!vp.traded()) continue;
        REQUIRE(vp.total_utility <= mm.total_utility);
        if (t == 1.0) REQUIRE(vp.total_utility == mm.total_utility);
      }
    }
  }
}

TEST_CASE("buyer search") {
  SUBCASE("one examination") {
    RandomStream s({34, 9});
    const double x = s.uniform_sym();
    const auto out = buyer_search({0.01, 1, DistributionSpec::uniform_sym()}, {34, 9});
    CHECK(out.best_utility == x);
    CHECK(out.net_utility == x - 0.01);
    CHECK(out.examined == 1);
  }
  SUBCASE("net utility is exactly best minus cost") {
    for (std::uint64_t r = 0; r < 100; ++r) {
      const SearchParams p{0.037, 1 + r % 17, DistributionSpec::std_normal()};
      const auto out = buyer_search(p, {35, r});
      REQUIRE(out.net_utility == out.best_utility - 0.037 * static_cast<double>(p.n));
    }
  }
  SUBCASE("uniform, beta 0.01, n 13") {
    const SearchParams p{0.01, 13, DistributionSpec::uniform_sym()};
    const auto m = reduce_realizations(100000, 0, Moments{}, [&](std::uint64_t r, Moments& a) {
      a.add(buyer_search(p, {36, r}).net_utility);
    });
    const double expected = 1.0 - 2.0 / 14.0 - 0.13;
    CHECK(expected == doctest::Approx(0.7271).epsilon(1e-4));
    CHECK(std::abs(m.mean - expected) < 3.0 * m.std_error());
  }
  SUBCASE("power law without cost") {
    const SearchParams p{0.0, 1000, DistributionSpec::power_law(4.0)};
    const auto m = reduce_realizations(20000, 0, Moments{}, [&](std::uint64_t r, Moments& a) {
      a.add(buyer_search(p, {37, r}).best_utility);
    });
    const double predicted = 10.0 * analytics::gamma_fn(2.0 / 3.0);
    CHECK(predicted == doctest::Approx(13.54).epsilon(1e-3));
    CHECK(std::abs(m.mean - predicted) / predicted < 0.05);
  }
  SUBCASE("invalid parameters") {
    CHECK(code_of([] { buyer_search({-0.1, 3, DistributionSpec::uniform_sym()}, {}); }) ==
          ErrorCode::InvalidParameter);
    CHECK(code_of([] { buyer_search({0.1, 0, DistributionSpec::uniform_sym()}, {}); }) ==
          ErrorCode::InvalidParameter);
    CHECK(code_of([] { buyer_search({0.1, 3, DistributionSpec::power_law(2.0)}, {}); }) ==
          ErrorCode::InvalidParameter);
  }
}

TEST_CASE("n_opt scans") {
  SUBCASE("uniform, beta 0.01") {
    const auto scan = n_opt_scan(0.01, DistributionSpec::uniform_sym(), options(60, 100000, 40));
    CHECK(scan.n_opt >= 12);
    CHECK(scan.n_opt <= 15);
    CHECK(oracle::uniform_search_argmax(0.01, 1000) == 13);
    CHECK(scan.bracketed);
    CHECK(rises_then_falls(scan.curve));
    REQUIRE(scan.curve.size() == 60);
    for (std::size_t i = 0; i < scan.curve.size(); ++i) {
      const double n = static_cast<double>(i + 1);
      CHECK(std::abs(scan.curve[i].mean_net - (1.0 - 2.0 / (n + 1.0) - 0.01 * n)) <
            4.0 * scan.curve[i].std_error + 1e-12);
    }
  }
  SUBCASE("uniform, beta 0.5") {
    const auto scan = n_opt_scan(0.5, DistributionSpec::uniform_sym(), options(20, 10000, 41));
    CHECK(scan.n_opt == 1);
  }
  SUBCASE("normal, beta 0.01") {
    const auto scan = n_opt_scan(0.01, DistributionSpec::std_normal(), options(150, 20000, 42));
    CHECK(std::abs(static_cast<double>(scan.n_opt) - 37.0) <= 0.25 * 37.0);
    CHECK(rises_then_falls(scan.curve));
  }
  SUBCASE("maximum at the edge is flagged") {
    const auto scan = n_opt_scan(0.01, DistributionSpec::uniform_sym(), options(5, 1000, 43));
    CHECK(scan.n_opt == 5);
    CHECK_FALSE(scan.bracketed);
    CHECK_FALSE(rises_then_falls(scan.curve));
  }
  SUBCASE("preconditions") {
    CHECK(code_of([] { n_opt_scan(0.01, DistributionSpec::uniform_sym(), options(1, 1000, 0)); }) ==
          ErrorCode::InvalidParameter);
    CHECK(code_of([] { n_opt_scan(0.01, DistributionSpec::uniform_sym(), options(10, 99, 0)); }) ==
          ErrorCode::InvalidParameter);
    CHECK(code_of([] { n_opt_scan(0.0, DistributionSpec::uniform_sym(), options(10, 100, 0)); }) ==
          ErrorCode::InvalidParameter);
  }
}

TEST_CASE("scan results do not depend on the worker count") {
  auto o = options(300, 3000, 44);
  o.workers = 1;
  const auto one = max_curve(DistributionSpec::power_law(4.0), o);
  o.workers = 3;
  const auto three = max_curve(DistributionSpec::power_law(4.0), o);
  REQUIRE(one.size() == three.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    REQUIRE(one[i].mean_net == three[i].mean_net);
    REQUIRE(one[i].std_error == three[i].std_error);
  }
}

TEST_CASE("rises_then_falls on synthetic curves") {
  auto make = [](auto f) {
    std::vector<CurvePoint> c;
    for (std::size_t n = 1; n <= 200; ++n) c.push_back({n, f(static_cast<double>(n)), 1e-4});
    return c;
  };
  CHECK(rises_then_falls(make([](double n) { return std::log(n) - 0.01 * n; })));
  CHECK_FALSE(rises_then_falls(make([](double n) { return std::log(n); })));
  CHECK_FALSE(rises_then_falls(make([](double n) { return -n; })));
  CHECK_FALSE(rises_then_falls(make([](double n) { return std::sin(n / 10.0); })));
}
