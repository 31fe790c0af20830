#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "csv.hpp"
#include "error.hpp"

namespace matchmarket {

const std::vector<ExperimentInfo>& experiment_catalog() {
  static const std::vector<ExperimentInfo> catalog{
      {ExperimentKind::Fig1DeltaK, "fig1_delta_k",
       "Inequality Delta(k) of the k-norm matchmaker vs k, uniform utilities"},
      {ExperimentKind::Fig2Multibuyer, "fig2_multibuyer",
       "Per-buyer maximal utility <u_m''> vs number of buyers M and variants N"},
      {ExperimentKind::Fig2ThresholdScan, "fig2_threshold_scan",
       "Smallest N with <max a_alpha> above a threshold vs M (e^M growth)"},
      {ExperimentKind::Fig3Correlated, "fig3_correlated",
       "<u_m> vs correlation st for normal utilities, with the implicit-equation root"},
      {ExperimentKind::Fig4VendorProposes, "fig4_vendor_proposes",
       "Total utility and inequality, matchmaker vs vendor-proposes, normal utilities"},
      {ExperimentKind::Fig5Search, "fig5_search",
       "Buyer's search utility u_S(beta, N) vs N for uniform, normal, power law"},
      {ExperimentKind::Fig5NOpt, "fig5_nopt",
       "Optimal number of examined variants N_opt vs beta, three distributions"},
      {ExperimentKind::ClaimsTable, "claims_table",
       "Scalar claims: min-rule trade-off, vendor-proposes inequality, approximation error"},
  };
  return catalog;
}

ExperimentKind parse_experiment(std::string_view name) {
  for (const auto& info : experiment_catalog()) {
    if (name == info.name) return info.kind;
  }
  fail(ErrorCode::InvalidConfig, "unknown experiment '" + std::string(name) + "'");
}

const char* experiment_name(ExperimentKind kind) {
  for (const auto& info : experiment_catalog()) {
    if (info.kind == kind) return info.name;
  }
  return "unknown";
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  c.n_variants = {1000};
  c.m_buyers = {1};
  c.k_values = {1.0};
  c.t_values = {0.0};
  c.s_values = {1};
  c.beta_values = {0.01};
  switch (kind) {
    case ExperimentKind::Fig1DeltaK:
      c.k_values = {0.25, 0.5, 0.75, 1, 1.5, 2, 3, 5, 10, 20, 50, 100};
      c.realizations = 10000;
      break;
    case ExperimentKind::Fig2Multibuyer:
      c.n_variants = {10, 100, 1000};
      c.m_buyers = {1, 2, 3, 5, 10, 20, 30, 50, 100};
      c.realizations = 1000;
      break;
    case ExperimentKind::Fig2ThresholdScan:
      c.m_buyers = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
      c.n_max = 256;
      c.realizations = 10000;
      break;
    case ExperimentKind::Fig3Correlated:
      c.t_values = {0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1};
      c.s_values = {-1, 1};
      c.realizations = 1000;
      break;
    case ExperimentKind::Fig4VendorProposes:
      c.n_variants = {2, 5, 10, 20, 50, 100, 200, 500, 1000};
      c.realizations = 1000;
      break;
    case ExperimentKind::Fig5Search:
      c.n_max = 1000;
      c.realizations = 10000;
      break;
    case ExperimentKind::Fig5NOpt:
      c.beta_values = {0.002, 0.005, 0.01, 0.02, 0.05, 0.1};
      c.n_max = 10000;
      c.realizations = 2000;
      break;
    case ExperimentKind::ClaimsTable:
      c.realizations = 100000;
      break;
  }
  return c;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* why) {
  std::ostringstream msg;
  msg << "invalid value '" << value << "' for '" << key << "': " << why;
  fail(ErrorCode::InvalidConfig, msg.str());
}

template <class T>
T parse_integer(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) bad_value(key, text, "not an integer");
  return value;
}

double parse_real(std::string_view key, std::string_view text) {
  text = trim(text);
  try {
    const double v = csv::parse_double(text);
    if (!std::isfinite(v)) bad_value(key, text, "not finite");
    return v;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig) throw;
    bad_value(key, text, "not a number");
  }
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(trim(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

template <class T, class Parse>
std::vector<T> parse_list(std::string_view key, std::string_view text, Parse parse) {
  std::vector<T> out;
  for (auto item : split_list(text)) {
    if (item.empty()) bad_value(key, text, "empty list item");
    out.push_back(parse(key, item));
  }
  return out;
}

UtilityRule parse_rule(std::string_view value) {
  value = trim(value);
  if (value == "linear") return UtilityRule::linear();
  if (value == "min") return UtilityRule::min_rule();
  if (value.rfind("knorm:", 0) == 0) {
    const double k = parse_real("rule", value.substr(6));
    if (!(k > 0.0)) bad_value("rule", value, "k must be positive");
    return UtilityRule::knorm(k);
  }
  bad_value("rule", value, "expected linear, min or knorm:<k>");
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += csv::format_double(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

template <class T>
void require_increasing(const char* key, const std::vector<T>& values) {
  if (values.empty()) fail(ErrorCode::InvalidConfig, std::string("sweep '") + key + "' is empty");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i - 1] < values[i])) {
      fail(ErrorCode::InvalidConfig, std::string("sweep '") + key + "' must be strictly increasing");
    }
  }
}

}  // namespace

std::string rule_name(const UtilityRule& rule) {
  switch (rule.kind) {
    case RuleKind::Linear: return "linear";
    case RuleKind::MinRule: return "min";
    case RuleKind::KNorm: return "knorm:" + csv::format_double(rule.k);
    case RuleKind::MultiBuyerAverage: return "average";
  }
  return "unknown";
}

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  const auto as_size = [](std::string_view k, std::string_view v) {
    return parse_integer<std::size_t>(k, v);
  };
  if (key == "experiment") {
    const auto kind = parse_experiment(value);
    if (kind != c.experiment) {
      const auto keep_out = c.output_path;
      const auto keep_workers = c.workers;
      c = default_config(kind);
      c.output_path = keep_out;
      c.workers = keep_workers;
    }
  } else if (key == "n") {
    c.n_variants = parse_list<std::size_t>(key, value, as_size);
  } else if (key == "m") {
    c.m_buyers = parse_list<std::size_t>(key, value, as_size);
  } else if (key == "k") {
    c.k_values = parse_list<double>(key, value, parse_real);
  } else if (key == "t") {
    c.t_values = parse_list<double>(key, value, parse_real);
  } else if (key == "s") {
    c.s_values = parse_list<int>(key, value, [](std::string_view k, std::string_view v) {
      return parse_integer<int>(k, v.front() == '+' ? v.substr(1) : v);
    });
  } else if (key == "rule") {
    c.rule = parse_rule(value);
  } else if (key == "beta") {
    c.beta_values = parse_list<double>(key, value, parse_real);
  } else if (key == "gamma") {
    c.gamma = parse_real(key, value);
  } else if (key == "realizations") {
    c.realizations = parse_integer<std::uint64_t>(key, value);
  } else if (key == "seed") {
    c.master_seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "n_max") {
    c.n_max = as_size(key, value);
  } else if (key == "threshold") {
    c.threshold = parse_real(key, value);
  } else if (key == "cost_exponent") {
    c.cost_exponent = parse_real(key, value);
  } else if (key == "workers") {
    c.workers = parse_integer<unsigned>(key, value);
  } else if (key == "out") {
    c.output_path = std::string(value);
  } else {
    fail(ErrorCode::InvalidConfig, "unknown config key '" + std::string(key) + "'");
  }
}

void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config file '" + path.string() + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::InvalidConfig,
           path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    apply_setting(config, view.substr(0, eq), view.substr(eq + 1));
  }
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  auto config = default_config(ExperimentKind::Fig1DeltaK);
  apply_config_file(config, path);
  return config;
}

void validate(const ExperimentConfig& c) {
  if (c.realizations < 1) fail(ErrorCode::InvalidConfig, "realizations must be at least 1");
  require_increasing("n", c.n_variants);
  require_increasing("m", c.m_buyers);
  require_increasing("k", c.k_values);
  require_increasing("t", c.t_values);
  require_increasing("s", c.s_values);
  require_increasing("beta", c.beta_values);
  if (c.n_variants.front() < 1) fail(ErrorCode::InvalidConfig, "n must be at least 1");
  if (c.m_buyers.front() < 1) fail(ErrorCode::InvalidConfig, "m must be at least 1");
  if (!(c.k_values.front() > 0.0)) fail(ErrorCode::InvalidConfig, "k must be positive");
  if (c.t_values.front() < 0.0 || c.t_values.back() > 1.0) {
    fail(ErrorCode::InvalidConfig, "t must lie in [0, 1]");
  }
  for (int s : c.s_values) {
    if (s != 1 && s != -1) fail(ErrorCode::InvalidConfig, "s must be +1 or -1");
  }
  if (!(c.beta_values.front() > 0.0)) fail(ErrorCode::InvalidConfig, "beta must be positive");
  if (!(c.cost_exponent > 0.0)) fail(ErrorCode::InvalidConfig, "cost exponent must be positive");
  if (c.rule.kind == RuleKind::MultiBuyerAverage) {
    fail(ErrorCode::InvalidConfig, "rule must be a single-buyer rule");
  }

  switch (c.experiment) {
    case ExperimentKind::Fig5Search:
      if (c.beta_values.size() != 1) {
        fail(ErrorCode::InvalidConfig, "fig5_search takes a single beta; use fig5_nopt to sweep");
      }
      [[fallthrough]];
    case ExperimentKind::Fig5NOpt:
      if (!(c.gamma > 2.0)) fail(ErrorCode::InvalidConfig, "gamma must exceed 2");
      if (c.n_max < 2) fail(ErrorCode::InvalidConfig, "n_max must be at least 2");
      if (c.realizations < 100) {
        fail(ErrorCode::InvalidConfig, "search scans need at least 100 realizations");
      }
      break;
    case ExperimentKind::Fig2ThresholdScan:
      if (c.n_max < 1) fail(ErrorCode::InvalidConfig, "n_max must be at least 1");
      if (!(c.threshold > 0.0 && c.threshold < 1.0)) {
        fail(ErrorCode::InvalidConfig, "threshold must lie in (0, 1)");
      }
      break;
    case ExperimentKind::ClaimsTable:
      if (!(c.gamma > 2.0)) fail(ErrorCode::InvalidConfig, "gamma must exceed 2");
      if (c.realizations < 2) fail(ErrorCode::InvalidConfig, "claims need at least 2 realizations");
      break;
    default:
      break;
  }
}

std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("experiment", experiment_name(c.experiment));
  out.emplace_back("seed", std::to_string(c.master_seed));
  out.emplace_back("realizations", std::to_string(c.realizations));
  switch (c.experiment) {
    case ExperimentKind::Fig1DeltaK:
      out.emplace_back("n", join(c.n_variants));
      out.emplace_back("k", join(c.k_values));
      break;
    case ExperimentKind::Fig2Multibuyer:
      out.emplace_back("n", join(c.n_variants));
      out.emplace_back("m", join(c.m_buyers));
      break;
    case ExperimentKind::Fig2ThresholdScan:
      out.emplace_back("m", join(c.m_buyers));
      out.emplace_back("n_max", std::to_string(c.n_max));
      out.emplace_back("threshold", csv::format_double(c.threshold));
      break;
    case ExperimentKind::Fig3Correlated:
      out.emplace_back("n", join(c.n_variants));
      out.emplace_back("t", join(c.t_values));
      out.emplace_back("s", join(c.s_values));
      break;
    case ExperimentKind::Fig4VendorProposes:
      out.emplace_back("n", join(c.n_variants));
      out.emplace_back("t", join(c.t_values));
      out.emplace_back("s", join(c.s_values));
      out.emplace_back("rule", rule_name(c.rule));
      break;
    case ExperimentKind::Fig5Search:
    case ExperimentKind::Fig5NOpt:
      out.emplace_back("beta", join(c.beta_values));
      out.emplace_back("gamma", csv::format_double(c.gamma));
      out.emplace_back("n_max", std::to_string(c.n_max));
      out.emplace_back("cost_exponent", csv::format_double(c.cost_exponent));
      break;
    case ExperimentKind::ClaimsTable:
      out.emplace_back("n", join(c.n_variants));
      out.emplace_back("gamma", csv::format_double(c.gamma));
      break;
  }
  return out;
}

}  // namespace matchmarket
