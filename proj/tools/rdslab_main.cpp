// Command-line front end. Talks to the core exclusively through the shared
// library's C interface.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "rdslab.h"

namespace {

std::vector<std::string> catalog(int (*count)(), int (*name)(int, char*, size_t)) {
  std::vector<std::string> out;
  char buf[128];
  for (int i = 0; i < count(); ++i)
    if (name(i, buf, sizeof(buf)) == RDS_OK) out.emplace_back(buf);
  return out;
}

int run_config(const std::string& path, bool has_seed, uint64_t seed,
               const std::string& out_dir) {
  rds_experiment* exp = nullptr;
  int rc = rds_experiment_create_from_file(path.c_str(), &exp);
  if (rc != RDS_OK) {
    std::cerr << "config error: " << rds_last_error() << "\n";
    return 1;
  }
  if (has_seed) rds_experiment_set_seed(exp, seed);
  if (!out_dir.empty()) rds_experiment_set_output_dir(exp, out_dir.c_str());

  int run_rc = rds_experiment_run(exp);

  size_t needed = 0;
  rds_experiment_manifest_json(exp, nullptr, 0, &needed);
  std::string manifest(needed, '\0');
  if (rds_experiment_manifest_json(exp, manifest.data(), manifest.size(), nullptr) ==
      RDS_OK) {
    manifest.resize(needed - 1);
    auto j = nlohmann::json::parse(manifest, nullptr, false);
    if (!j.is_discarded()) {
      for (const auto& a : j["analyses"]) {
        std::cout << (a["ok"].get<bool>() ? "ok    " : "FAIL  ")
                  << a["name"].get<std::string>();
        if (!a["ok"].get<bool>()) std::cout << "  (" << a.value("error", "") << ")";
        std::cout << "\n";
      }
      std::cout << "config " << j.value("config_hash", "") << "\n";
    }
  }
  rds_experiment_free(exp);
  if (run_rc != RDS_OK) {
    std::cerr << "run failed: " << rds_last_error() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rdslab — stationary measures, Lyapunov spectra, entropy and "
               "zero-noise studies for randomly perturbed dynamical systems"};
  app.set_version_flag("--version", rds_version_string());
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  uint64_t seed = 0;
  bool has_seed = false;

  CLI::App* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config_path, "path to a JSON experiment config")->required();
  CLI::Option* seed_opt = run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out_dir, "override the output directory");

  CLI::App* list_systems =
      app.add_subcommand("list-systems", "list built-in maps and SDE systems");
  CLI::App* list_kernels =
      app.add_subcommand("list-kernels", "list transition-kernel variants");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    has_seed = seed_opt->count() > 0;
    return run_config(config_path, has_seed, seed, out_dir);
  }
  if (list_systems->parsed()) {
    std::cout << "maps:\n";
    for (const auto& n : catalog(rds_map_count, rds_map_name)) std::cout << "  " << n << "\n";
    std::cout << "sde systems:\n";
    for (const auto& n : catalog(rds_sde_count, rds_sde_name)) std::cout << "  " << n << "\n";
    return 0;
  }
  if (list_kernels->parsed()) {
    for (const auto& n : catalog(rds_kernel_variant_count, rds_kernel_variant_name))
      std::cout << n << "\n";
    return 0;
  }
  return 0;
}
