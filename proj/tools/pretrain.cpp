// Copyright 2026 The posecon Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Pre-trains the masked autoencoder with the pose-consistent contrastive
// objectives.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "posecon/posecon.h"

namespace {

int report_failure(const char* what) {
  std::fprintf(stderr, "pretrain: %s: %s\n", what, pc_last_error());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pre-train on a generated dataset; writes metrics.csv and checkpoint_last.ckpt"};
  std::string config_path, data_dir, out_dir, variant, resume;
  std::vector<std::string> overrides;
  bool no_strong_aug = false;
  app.add_option("--config", config_path, "Config file (key = value lines)");
  app.add_option("--data", data_dir, "Dataset directory")->required();
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_option("--variant", variant, "Ablation variant")
      ->check(CLI::IsMember({"genpoccl", "genpoccl0", "baseline-hap"}));
  app.add_flag("--no-strong-aug", no_strong_aug, "Flip and crop only");
  app.add_option("--set", overrides, "Config override key=value (repeatable)");
  app.add_option("--resume", resume, "Continue from a checkpoint; config options are ignored");
  CLI11_PARSE(app, argc, argv);

  pc_trainer* trainer = nullptr;
  if (!resume.empty()) {
    if (pc_trainer_resume(resume.c_str(), data_dir.c_str(), out_dir.c_str(), &trainer) != PC_OK) {
      return report_failure("resume");
    }
  } else {
    pc_config* config = nullptr;
    const pc_status st = config_path.empty() ? pc_config_create(&config) : pc_config_load(config_path.c_str(), &config);
    if (st != PC_OK) return report_failure("config");
    bool ok = variant.empty() || pc_config_apply_variant(config, variant.c_str()) == PC_OK;
    if (ok && no_strong_aug) ok = pc_config_set(config, "strong_augmentation", "false") == PC_OK;
    for (const auto& kv : overrides) {
      if (!ok) break;
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "pretrain: --set expects key=value, got '%s'\n", kv.c_str());
        pc_config_free(config);
        return 2;
      }
      ok = pc_config_set(config, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()) == PC_OK;
    }
    if (ok) ok = pc_trainer_create(config, data_dir.c_str(), out_dir.c_str(), &trainer) == PC_OK;
    pc_config_free(config);
    if (!ok) return report_failure("setup");
  }

  int32_t done = 0, total = 0;
  pc_trainer_epochs(trainer, &done, &total);
  while (done < total) {
    pc_epoch_summary s;
    if (pc_trainer_run_epoch(trainer, &s) != PC_OK) {
      pc_trainer_free(trainer);
      return report_failure("training");
    }
    std::printf("epoch %d/%d lr %.3g rec %.4f align %.4f mp %.4f total %.4f pos_sim %.3f neg_sim %.3f\n", s.epoch,
                total, s.lr, s.rec, s.align, s.mp, s.total, s.pos_sim, s.neg_sim);
    std::fflush(stdout);
    done = s.epoch;
  }
  char path[4096];
  size_t needed = 0;
  if (pc_trainer_checkpoint_path(trainer, path, sizeof(path), &needed) == PC_OK) std::printf("checkpoint %s\n", path);
  pc_trainer_free(trainer);
  return 0;
}
