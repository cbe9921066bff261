// Copyright 2026 The rbnoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rbnoise/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

int do_list() {
  std::printf("%-16s %-12s %s\n", "name", "reproduces", "description");
  for (const auto& s : rbnoise::lab::experiment_catalog()) {
    std::printf("%-16s %-12s %s\n", s.name.c_str(), s.figure.c_str(),
                s.description.c_str());
  }
  return kExitOk;
}

int do_validate(const std::string& config_path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(rbnoise::io::read_text_file(config_path));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  const auto diags = rbnoise::lab::validate_config_json(j);
  bool any_error = false;
  for (const auto& d : diags) {
    const bool err = d.severity == rbnoise::lab::Diagnostic::Severity::error;
    any_error |= err;
    std::fprintf(stderr, "%s: %s: %s\n", err ? "error" : "warning",
                 d.path.c_str(), d.message.c_str());
  }
  if (!any_error) std::printf("config ok\n");
  return any_error ? kExitConfig : kExitOk;
}

struct Overrides {
  std::string config_path;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string out_dir;
  int threads = -1;
  bool paper_scale = false;
  std::string experiment;
  bool validate_only = false;
};

int do_run(const Overrides& ov) {
  if (ov.validate_only) return do_validate(ov.config_path);
  rbnoise::lab::ExperimentConfig cfg;
  try {
    cfg = rbnoise::lab::load_config_file(ov.config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  if (ov.has_seed) {
    cfg.seed = ov.seed;
    cfg.has_seed = true;
    cfg.raw["seed"] = ov.seed;
  }
  if (!ov.out_dir.empty()) {
    cfg.out_dir = ov.out_dir;
    cfg.raw["out"] = ov.out_dir;
  }
  if (ov.threads >= 0) {
    cfg.threads = ov.threads == 0
                      ? static_cast<int>(std::thread::hardware_concurrency())
                      : ov.threads;
    cfg.raw["threads"] = ov.threads;
  }
  if (ov.paper_scale) {
    cfg.paper_scale = true;
    cfg.raw["paper_scale"] = true;
  }
  if (!ov.experiment.empty()) {
    if (!rbnoise::lab::is_known_experiment(ov.experiment)) {
      std::fprintf(stderr, "error: unknown experiment: %s\n",
                   ov.experiment.c_str());
      return kExitConfig;
    }
    cfg.experiment = ov.experiment;
    cfg.raw["experiment"] = ov.experiment;
  }
  try {
    const auto result = rbnoise::lab::run_experiment(cfg);
    for (const auto& f : result.files) {
      std::printf("wrote %s/%s\n", cfg.out_dir.c_str(), f.c_str());
    }
    for (const auto& m : result.messages) {
      std::fprintf(stderr, "note: %s\n", m.c_str());
    }
    return result.numeric_ok ? kExitOk : kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumeric;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "rbnoise: a simulated phase-noise laboratory built on randomized "
      "benchmarking"};
  app.require_subcommand(0, 1);

  Overrides ov;

  auto* run = app.add_subcommand("run", "execute an experiment suite");
  run->add_option("--config", ov.config_path, "config file (JSON)")
      ->required();
  run->add_option("--seed", ov.seed, "override the master seed");
  run->add_option("--out", ov.out_dir, "override the output directory");
  run->add_option("--threads", ov.threads,
                  "worker threads (0 = hardware concurrency)");
  run->add_flag("--paper-scale", ov.paper_scale,
                "raise trial counts for publication-level precision");
  run->add_option("--experiment", ov.experiment,
                  "override the experiment name");
  run->add_flag("--validate-only", ov.validate_only,
                "validate the config and exit");

  auto* list =
      app.add_subcommand("list-experiments", "list the available suites");

  std::string validate_path;
  auto* validate =
      app.add_subcommand("validate", "check a config without running");
  validate->add_option("--config", validate_path, "config file (JSON)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    if (run->count("--seed") > 0) ov.has_seed = true;
    return do_run(ov);
  }
  if (list->parsed()) return do_list();
  if (validate->parsed()) return do_validate(validate_path);
  std::cout << app.help();
  return kExitOk;
}
