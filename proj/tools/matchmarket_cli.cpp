#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "matchmarket/matchmarket.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

int exit_code(mm_status status) {
  if (status == MM_OK) return kExitOk;
  return status == MM_IO ? kExitIo : kExitConfig;
}

int report(mm_status status) {
  std::fprintf(stderr, "matchmarket: %s: %s\n", mm_status_name(status), mm_last_error());
  return exit_code(status);
}

void progress_to_stderr(const char* message, void*) { std::fprintf(stderr, "%s\n", message); }

struct Overrides {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string config_file;
};

// Registers a string flag that forwards to the config key of the same meaning.
void forward(CLI::App* cmd, Overrides& o, std::vector<std::string>& storage, const char* flag,
             const char* key, const char* help) {
  storage.emplace_back();
  auto& slot = storage.back();
  cmd->add_option(flag, slot, help)->each([&o, key](const std::string& v) {
    o.pairs.emplace_back(key, v);
  });
}

int emit(mm_table* table, const std::string& out) {
  mm_status status = MM_OK;
  if (out.empty()) {
    char* text = nullptr;
    status = mm_table_to_csv(table, &text);
    if (status == MM_OK) {
      std::fputs(text, stdout);
      std::fflush(stdout);
    }
    mm_string_free(text);
  } else {
    status = mm_table_write_csv(table, out.c_str());
  }
  mm_table_destroy(table);
  return status == MM_OK ? kExitOk : report(status);
}

int configure(mm_config* config, const Overrides& o, const std::string& experiment) {
  if (!o.config_file.empty()) {
    if (auto s = mm_config_load_file(config, o.config_file.c_str()); s != MM_OK) return report(s);
    if (experiment != mm_config_experiment(config)) {
      std::fprintf(stderr, "matchmarket: config file selects '%s' but the command asks for '%s'\n",
                   mm_config_experiment(config), experiment.c_str());
      return kExitConfig;
    }
  }
  for (const auto& [key, value] : o.pairs) {
    if (auto s = mm_config_set(config, key.c_str(), value.c_str()); s != MM_OK) return report(s);
  }
  if (auto s = mm_config_validate(config); s != MM_OK) return report(s);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matchmaker market simulations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mm_version());

  Overrides run_o;
  std::vector<std::string> run_storage;
  run_storage.reserve(32);
  std::string experiment;
  auto* run = app.add_subcommand("run", "Run one experiment and write its CSV");
  run->add_option("experiment", experiment, "Experiment name (see 'list')")->required();
  forward(run, run_o, run_storage, "--n", "n", "Variant counts, comma separated");
  forward(run, run_o, run_storage, "--m", "m", "Buyer counts, comma separated");
  forward(run, run_o, run_storage, "--k", "k", "k-norm exponents, comma separated");
  forward(run, run_o, run_storage, "--t", "t", "Correlation strengths in [0, 1]");
  forward(run, run_o, run_storage, "--s", "s", "Correlation signs (-1 or 1)");
  forward(run, run_o, run_storage, "--beta", "beta", "Search costs per examined variant");
  forward(run, run_o, run_storage, "--gamma", "gamma", "Power-law exponent (> 2)");
  forward(run, run_o, run_storage, "--realizations", "realizations", "Monte Carlo realizations");
  forward(run, run_o, run_storage, "--seed", "seed", "Master seed");
  forward(run, run_o, run_storage, "--n-max", "n_max", "Largest n in search scans");
  forward(run, run_o, run_storage, "--threshold", "threshold", "Threshold for the e^M scan");
  forward(run, run_o, run_storage, "--rule", "rule", "Matchmaker rule: linear, min, knorm:K");
  forward(run, run_o, run_storage, "--cost-exponent", "cost_exponent", "Search cost exponent");
  forward(run, run_o, run_storage, "--workers,--threads", "workers", "Worker threads (0: all)");
  run->add_option("--config", run_o.config_file, "key = value config file");
  forward(run, run_o, run_storage, "--out", "out", "Output CSV path (default: standard output)");

  Overrides claims_o;
  std::vector<std::string> claims_storage;
  claims_storage.reserve(16);
  auto* claims = app.add_subcommand("claims", "Compute the scalar claims table");
  forward(claims, claims_o, claims_storage, "--seed", "seed", "Master seed");
  forward(claims, claims_o, claims_storage, "--n", "n", "Variant count");
  forward(claims, claims_o, claims_storage, "--gamma", "gamma", "Power-law exponent (> 2)");
  forward(claims, claims_o, claims_storage, "--realizations", "realizations",
          "Monte Carlo realizations");
  forward(claims, claims_o, claims_storage, "--workers,--threads", "workers",
          "Worker threads (0: all)");
  claims->add_option("--config", claims_o.config_file, "key = value config file");
  forward(claims, claims_o, claims_storage, "--out", "out",
          "Output CSV path (default: standard output)");

  auto* list = app.add_subcommand("list", "List experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (list->parsed()) {
    for (size_t i = 0; i < mm_experiment_count(); ++i) {
      std::printf("%-22s %s\n", mm_experiment_name(i), mm_experiment_description(i));
    }
    return kExitOk;
  }

  const bool is_run = run->parsed();
  const auto& o = is_run ? run_o : claims_o;
  const std::string name = is_run ? experiment : "claims_table";

  mm_config* config = nullptr;
  if (auto s = mm_config_create(name.c_str(), &config); s != MM_OK) return report(s);
  if (int code = configure(config, o, name); code != kExitOk) {
    mm_config_destroy(config);
    return code;
  }

  mm_table* table = nullptr;
  const mm_status status = is_run ? mm_run(config, progress_to_stderr, nullptr, &table)
                                  : mm_claims(config, progress_to_stderr, nullptr, &table);
  const std::string out = mm_config_output_path(config);
  mm_config_destroy(config);
  if (status != MM_OK) return report(status);
  return emit(table, out);
}
