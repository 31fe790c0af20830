#include "matchmarket/matchmarket.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "analytics.hpp"
#include "config.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "market.hpp"
#include "protocols.hpp"
#include "result_table.hpp"

struct mm_config {
  matchmarket::ExperimentConfig config;
};

struct mm_table {
  matchmarket::ResultTable table;
  std::string meta_value;  // backing store for mm_table_meta
};

struct mm_market {
  matchmarket::VariantTable table;
};

namespace {

thread_local std::string last_error;

mm_status to_status(matchmarket::ErrorCode code) {
  using matchmarket::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidParameter: return MM_INVALID_PARAMETER;
    case ErrorCode::InvalidInput: return MM_INVALID_INPUT;
    case ErrorCode::InvalidRule: return MM_INVALID_RULE;
    case ErrorCode::Domain: return MM_DOMAIN;
    case ErrorCode::DegenerateVariance: return MM_DEGENERATE_VARIANCE;
    case ErrorCode::ApproximationDomain: return MM_APPROXIMATION_DOMAIN;
    case ErrorCode::InvalidConfig: return MM_INVALID_CONFIG;
    case ErrorCode::Io: return MM_IO;
  }
  return MM_INTERNAL;
}

template <class F>
mm_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return MM_OK;
  } catch (const matchmarket::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return MM_INTERNAL;
}

mm_status null_argument(const char* name) {
  last_error = std::string("null argument: ") + name;
  return MM_INVALID_INPUT;
}

matchmarket::ProgressFn wrap_progress(mm_progress_fn progress, void* user) {
  if (progress == nullptr) return {};
  return [progress, user](const std::string& message) { progress(message.c_str(), user); };
}

void fill(const matchmarket::MatchOutcome& o, mm_outcome* out) {
  out->traded = o.traded() ? 1 : 0;
  out->chosen_index = o.chosen_index;
  out->total_utility = o.total_utility;
  out->buyer_utility = o.buyer_utility;
  out->vendor_utility = o.vendor_utility;
  out->has_inequality = o.inequality.has_value() ? 1 : 0;
  out->inequality = o.inequality.value_or(0.0);
}

template <class F>
mm_status scalar(double* out, F&& f) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] { *out = f(); });
}

}  // namespace

extern "C" {

const char* mm_version(void) { return matchmarket::kCodeVersion; }

const char* mm_status_name(mm_status status) {
  switch (status) {
    case MM_OK: return "ok";
    case MM_INVALID_PARAMETER: return "invalid parameter";
    case MM_INVALID_INPUT: return "invalid input";
    case MM_INVALID_RULE: return "invalid rule";
    case MM_DOMAIN: return "domain error";
    case MM_DEGENERATE_VARIANCE: return "degenerate variance";
    case MM_APPROXIMATION_DOMAIN: return "approximation domain";
    case MM_INVALID_CONFIG: return "invalid config";
    case MM_IO: return "I/O error";
    case MM_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* mm_last_error(void) { return last_error.c_str(); }

size_t mm_experiment_count(void) { return matchmarket::experiment_catalog().size(); }

const char* mm_experiment_name(size_t index) {
  const auto& cat = matchmarket::experiment_catalog();
  return index < cat.size() ? cat[index].name : nullptr;
}

const char* mm_experiment_description(size_t index) {
  const auto& cat = matchmarket::experiment_catalog();
  return index < cat.size() ? cat[index].description : nullptr;
}

mm_status mm_config_create(const char* experiment, mm_config** out) {
  if (experiment == nullptr) return null_argument("experiment");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    *out = new mm_config{matchmarket::default_config(matchmarket::parse_experiment(experiment))};
  });
}

void mm_config_destroy(mm_config* config) { delete config; }

mm_status mm_config_set(mm_config* config, const char* key, const char* value) {
  if (config == nullptr) return null_argument("config");
  if (key == nullptr || value == nullptr) return null_argument("key/value");
  return guarded([&] { matchmarket::apply_setting(config->config, key, value); });
}

mm_status mm_config_load_file(mm_config* config, const char* path) {
  if (config == nullptr) return null_argument("config");
  if (path == nullptr) return null_argument("path");
  return guarded([&] { matchmarket::apply_config_file(config->config, path); });
}

mm_status mm_config_validate(const mm_config* config) {
  if (config == nullptr) return null_argument("config");
  return guarded([&] { matchmarket::validate(config->config); });
}

const char* mm_config_experiment(const mm_config* config) {
  return config == nullptr ? nullptr : matchmarket::experiment_name(config->config.experiment);
}

const char* mm_config_output_path(const mm_config* config) {
  return config == nullptr ? nullptr : config->config.output_path.c_str();
}

mm_status mm_run(const mm_config* config, mm_progress_fn progress, void* user, mm_table** out) {
  if (config == nullptr) return null_argument("config");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto table = matchmarket::run_experiment(config->config, wrap_progress(progress, user));
    *out = new mm_table{std::move(table), {}};
  });
}

mm_status mm_claims(const mm_config* config, mm_progress_fn progress, void* user,
                    mm_table** out) {
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const auto cfg = config != nullptr
                         ? config->config
                         : matchmarket::default_config(matchmarket::ExperimentKind::ClaimsTable);
    auto table = matchmarket::claims_report(cfg, wrap_progress(progress, user));
    *out = new mm_table{std::move(table), {}};
  });
}

void mm_table_destroy(mm_table* table) { delete table; }

size_t mm_table_rows(const mm_table* table) { return table ? table->table.rows() : 0; }

size_t mm_table_columns(const mm_table* table) {
  return table ? table->table.columns().size() : 0;
}

const char* mm_table_column_name(const mm_table* table, size_t column) {
  if (table == nullptr || column >= table->table.columns().size()) return nullptr;
  return table->table.columns()[column].c_str();
}

mm_status mm_table_column_index(const mm_table* table, const char* name, size_t* out) {
  if (table == nullptr) return null_argument("table");
  if (name == nullptr || out == nullptr) return null_argument("name/out");
  return guarded([&] { *out = table->table.column_index(name); });
}

mm_status mm_table_value(const mm_table* table, size_t row, size_t column, double* out) {
  if (table == nullptr) return null_argument("table");
  if (out == nullptr) return null_argument("out");
  if (row >= table->table.rows() || column >= table->table.columns().size()) {
    last_error = "table index out of range";
    return MM_INVALID_INPUT;
  }
  *out = table->table.at(row, column);
  return MM_OK;
}

const char* mm_table_label(const mm_table* table, size_t row) {
  if (table == nullptr || !table->table.label_column() || row >= table->table.rows()) {
    return nullptr;
  }
  return table->table.label(row).c_str();
}

const char* mm_table_meta(const mm_table* table, const char* key) {
  if (table == nullptr || key == nullptr) return nullptr;
  auto value = table->table.meta(key);
  if (!value) return nullptr;
  auto* mutable_table = const_cast<mm_table*>(table);
  mutable_table->meta_value = std::move(*value);
  return mutable_table->meta_value.c_str();
}

mm_status mm_table_write_csv(const mm_table* table, const char* path) {
  if (table == nullptr) return null_argument("table");
  if (path == nullptr) return null_argument("path");
  return guarded([&] { matchmarket::write_csv(table->table, std::filesystem::path(path)); });
}

mm_status mm_table_to_csv(const mm_table* table, char** out) {
  if (table == nullptr) return null_argument("table");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    std::ostringstream os;
    matchmarket::write_csv(table->table, os);
    const std::string text = os.str();
    char* buffer = static_cast<char*>(std::malloc(text.size() + 1));
    if (buffer == nullptr) throw std::bad_alloc();
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    *out = buffer;
  });
}

void mm_string_free(char* text) { std::free(text); }

mm_status mm_market_create(const double* vendor, const double* buyers, size_t n, size_t m,
                           mm_market** out) {
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  if ((vendor == nullptr || buyers == nullptr) && n * m != 0) return null_argument("vendor/buyers");
  return guarded([&] {
    std::vector<double> y(vendor, vendor + n);
    std::vector<double> x(buyers, buyers + n * m);
    *out = new mm_market{matchmarket::VariantTable(std::move(y), std::move(x), m)};
  });
}

void mm_market_destroy(mm_market* market) { delete market; }

mm_status mm_matchmaker_select(const mm_market* market, mm_rule rule, mm_outcome* out) {
  if (market == nullptr) return null_argument("market");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    matchmarket::UtilityRule r;
    switch (rule.kind) {
      case MM_RULE_LINEAR: r = matchmarket::UtilityRule::linear(); break;
      case MM_RULE_KNORM: r = matchmarket::UtilityRule::knorm(rule.k); break;
      case MM_RULE_MIN: r = matchmarket::UtilityRule::min_rule(); break;
      case MM_RULE_MULTI_BUYER_AVERAGE: r = matchmarket::UtilityRule::multi_buyer_average(); break;
      default: matchmarket::fail(matchmarket::ErrorCode::InvalidRule, "unknown rule kind");
    }
    fill(matchmarket::matchmaker_select(r, market->table), out);
  });
}

mm_status mm_vendor_proposes(const mm_market* market, mm_outcome* out) {
  if (market == nullptr) return null_argument("market");
  if (out == nullptr) return null_argument("out");
  return guarded([&] { fill(matchmarket::vendor_proposes(market->table), out); });
}

mm_status mm_u_m_uniform_exact(size_t n, double* out) {
  return scalar(out, [&] {
    if (n == 0) matchmarket::fail(matchmarket::ErrorCode::Domain, "n must be at least 1");
    return matchmarket::analytics::extreme_mean(matchmarket::analytics::tent_base(), n);
  });
}

mm_status mm_u_m_uniform_approx(size_t n, double* out) {
  return scalar(out, [&] { return matchmarket::analytics::u_m_uniform_approx(n); });
}

mm_status mm_u_m_knorm_approx(size_t n, double k, double* out) {
  return scalar(out, [&] { return matchmarket::analytics::u_m_knorm_approx(n, k); });
}

mm_status mm_solve_u_m_normal(size_t n, double variance, double* out) {
  return scalar(out, [&] { return matchmarket::analytics::solve_u_m_normal(n, variance); });
}

mm_status mm_u_m_normal_approx(size_t n, double correlation, double* out) {
  return scalar(out, [&] { return matchmarket::analytics::u_m_normal_approx(n, correlation); });
}

mm_status mm_x_m_powerlaw_approx(size_t n, double gamma, double* out) {
  return scalar(out, [&] { return matchmarket::analytics::x_m_powerlaw_approx(n, gamma); });
}

mm_status mm_n_opt_uniform(double beta, double* out) {
  return scalar(out, [&] { return matchmarket::analytics::n_opt_uniform(beta); });
}

mm_status mm_n_opt_normal(double beta, double* out) {
  return scalar(out, [&] { return matchmarket::analytics::n_opt_normal(beta); });
}

mm_status mm_n_opt_powerlaw(double beta, double gamma, double* out) {
  return scalar(out, [&] { return matchmarket::analytics::n_opt_powerlaw(beta, gamma); });
}

}  // extern "C"
