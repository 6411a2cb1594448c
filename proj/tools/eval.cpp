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

// Pose retrieval metrics and 2-D embedding projections for a checkpoint.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "posecon/posecon.h"

namespace {

int report_failure(const char* what) {
  std::fprintf(stderr, "eval: %s: %s\n", what, pc_last_error());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluate a pre-trained checkpoint"};
  app.require_subcommand(1);

  std::string ckpt, data_dir, token = "pose", out_png, out_csv;
  int32_t m = 0;
  uint64_t seed = 0;

  auto* retrieval = app.add_subcommand("retrieval", "Nearest-neighbor pose retrieval (top-1, mAP)");
  retrieval->add_option("--ckpt", ckpt, "Checkpoint file")->required();
  retrieval->add_option("--data", data_dir, "Held-out dataset directory")->required();
  retrieval->add_option("--token", token, "Token to report")->check(CLI::IsMember({"pose", "cls"}));
  retrieval->add_option("--m", m, "Images per pose to use (default: all)");
  retrieval->add_option("--seed", seed, "Tie-break seed");

  auto* project = app.add_subcommand("project", "2-D projection scatter plot of token embeddings");
  project->add_option("--ckpt", ckpt, "Checkpoint file")->required();
  project->add_option("--data", data_dir, "Dataset directory")->required();
  project->add_option("--out", out_png, "Output PNG")->required();
  project->add_option("--csv", out_csv, "Coordinates CSV (default: next to the PNG)");
  project->add_option("--token", token, "Token to project")->check(CLI::IsMember({"pose", "cls"}));
  project->add_option("--m", m, "Images per pose to use (default: all)");
  project->add_option("--seed", seed, "Projection seed");

  CLI11_PARSE(app, argc, argv);

  pc_model* model = nullptr;
  if (pc_model_load(ckpt.c_str(), &model) != PC_OK) return report_failure("load");
  int32_t has_pose = 0;
  pc_model_info(model, &has_pose, nullptr, nullptr);
  if (token == "pose" && !has_pose) {
    std::fprintf(stderr, "eval: checkpoint has no [POSE] token, falling back to cls\n");
    token = "cls";
  }

  int rc = 0;
  if (retrieval->parsed()) {
    pc_retrieval_report r;
    if (pc_eval_retrieval(model, data_dir.c_str(), m, seed, &r) != PC_OK) {
      rc = report_failure("retrieval");
    } else {
      const bool pose = token == "pose";
      std::printf("poses %d  images/pose %d  chance %.4f\n", r.num_poses, r.m, r.chance_level);
      std::printf("token %s  top1 %.4f  mAP %.4f  top1/chance %.2f\n", token.c_str(), pose ? r.pose_top1 : r.cls_top1,
                  pose ? r.pose_map : r.cls_map, (pose ? r.pose_top1 : r.cls_top1) / r.chance_level);
      std::printf("breakdown cls top1 %.4f mAP %.4f", r.cls_top1, r.cls_map);
      if (r.has_pose) std::printf(" | pose top1 %.4f mAP %.4f", r.pose_top1, r.pose_map);
      std::printf("\n");
    }
  } else {
    size_t points = 0;
    if (pc_eval_project(model, data_dir.c_str(), token.c_str(), m, seed, out_png.c_str(),
                        out_csv.empty() ? nullptr : out_csv.c_str(), &points) != PC_OK) {
      rc = report_failure("project");
    } else {
      std::printf("projected %zu points (%s token) to %s\n", points, token.c_str(), out_png.c_str());
    }
  }
  pc_model_free(model);
  return rc;
}
