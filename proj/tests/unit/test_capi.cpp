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

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "posecon/posecon.h"
#include "test_util.hpp"

namespace {

using posecon::testing::TempDir;

std::string get(const pc_config* c, const char* key) {
  char buf[64];
  size_t needed = 0;
  EXPECT_EQ(pc_config_get(c, key, buf, sizeof(buf), &needed), PC_OK) << pc_last_error();
  return buf;
}

pc_config* tiny_config() {
  pc_config* c = nullptr;
  EXPECT_EQ(pc_config_create(&c), PC_OK);
  const char* kv[][2] = {{"embed_dim", "16"},       {"depth", "1"},         {"heads", "2"},
                         {"decoder_dim", "8"},      {"decoder_depth", "1"}, {"decoder_heads", "2"},
                         {"n_poses_per_batch", "4"}, {"m_variations", "2"},  {"total_epochs", "2"},
                         {"warmup_epochs", "1"}};
  for (const auto& [k, v] : kv) EXPECT_EQ(pc_config_set(c, k, v), PC_OK) << k;
  return c;
}

TEST(CApi, StatusAndErrors) {
  EXPECT_STREQ(pc_status_name(PC_OK), "ok");
  EXPECT_EQ(pc_config_create(nullptr), PC_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(pc_last_error()).find("NULL"), std::string::npos);
  pc_config* c = nullptr;
  ASSERT_EQ(pc_config_create(&c), PC_OK);
  EXPECT_STREQ(pc_last_error(), "");
  EXPECT_EQ(pc_config_set(c, "no_such_key", "1"), PC_ERR_PARSE);
  EXPECT_EQ(pc_config_set(c, "tau", "0"), PC_OK);
  EXPECT_EQ(pc_config_validate(c), PC_ERR_CONFIG);
  EXPECT_NE(std::string(pc_last_error()).find("tau"), std::string::npos);
  pc_config_free(c);
  pc_config_free(nullptr);
  EXPECT_EQ(pc_config_load("/nonexistent/x.cfg", &c), PC_ERR_IO);
}

TEST(CApi, ConfigAccessors) {
  pc_config* c = nullptr;
  ASSERT_EQ(pc_config_create(&c), PC_OK);
  EXPECT_EQ(get(c, "tau"), "0.2");
  EXPECT_EQ(pc_config_apply_variant(c, "baseline-hap"), PC_OK);
  EXPECT_EQ(get(c, "use_mpc_loss"), "false");
  EXPECT_EQ(get(c, "gamma2"), "0");
  EXPECT_EQ(pc_config_apply_variant(c, "hap"), PC_ERR_INVALID_ARGUMENT);
  char small[2];
  size_t needed = 0;
  EXPECT_EQ(pc_config_get(c, "use_pose_token", small, sizeof(small), &needed), PC_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(needed, 6u);
  EXPECT_EQ(pc_config_get(c, "use_pose_token", nullptr, 0, &needed), PC_OK);
  pc_config_free(c);
}

TEST(CApi, LossKernels) {
  const double z[] = {1, 0, 1, 0, 0, 1, 0, 1};
  double loss = 0, g1[8], g2[8];
  ASSERT_EQ(pc_mpc_loss(z, z, 2, 2, 2, 0.2, &loss, g1, g2), PC_OK);
  EXPECT_NEAR(loss, -std::log(std::exp(5.0) / (std::exp(5.0) + 2.0)), 1e-12);
  const double c[] = {1, 0, 0, 1};
  ASSERT_EQ(pc_align_loss(c, c, 2, 2, 0.2, &loss, nullptr, nullptr), PC_OK);
  EXPECT_NEAR(loss, -std::log(std::exp(5.0) / (std::exp(5.0) + 1.0)), 1e-12);
  EXPECT_EQ(pc_mpc_loss(z, z, 4, 1, 2, 0.2, &loss, nullptr, nullptr), PC_ERR_INVALID_ARGUMENT);
  const double bad[] = {2, 0, 0, 1};
  EXPECT_EQ(pc_align_loss(bad, c, 2, 2, 0.2, &loss, nullptr, nullptr), PC_ERR_NUMERIC);
}

TEST(CApi, EndToEnd) {
  TempDir dir("capi");
  pc_datagen_options opts;
  pc_datagen_default_options(&opts);
  opts.n_poses = 8;
  opts.m_variations = 2;
  pc_datagen_stats stats;
  const std::string data = (dir / "data").string(), out = (dir / "run").string();
  ASSERT_EQ(pc_datagen_build(&opts, data.c_str(), &stats), PC_OK) << pc_last_error();
  EXPECT_EQ(stats.accepted, 8u);

  pc_config* c = tiny_config();
  ASSERT_EQ(pc_config_set(c, "image_height", "64"), PC_OK);
  pc_trainer* t = nullptr;
  ASSERT_EQ(pc_trainer_create(c, data.c_str(), out.c_str(), &t), PC_OK) << pc_last_error();
  pc_config_free(c);
  pc_epoch_summary s;
  ASSERT_EQ(pc_trainer_run_epoch(t, &s), PC_OK) << pc_last_error();
  EXPECT_EQ(s.epoch, 1);
  EXPECT_EQ(s.micro_batches, 2);
  EXPECT_GT(s.total, 0.0);
  char ckpt[1024];
  size_t needed = 0;
  ASSERT_EQ(pc_trainer_checkpoint_path(t, ckpt, sizeof(ckpt), &needed), PC_OK);
  pc_trainer_free(t);

  ASSERT_EQ(pc_trainer_resume(ckpt, data.c_str(), out.c_str(), &t), PC_OK) << pc_last_error();
  int32_t done = 0, total = 0;
  pc_trainer_epochs(t, &done, &total);
  EXPECT_EQ(done, 1);
  EXPECT_EQ(total, 2);
  ASSERT_EQ(pc_trainer_run_epoch(t, nullptr), PC_OK);
  EXPECT_EQ(pc_trainer_run_epoch(t, nullptr), PC_ERR_STATE);
  pc_trainer_free(t);

  pc_model* m = nullptr;
  ASSERT_EQ(pc_model_load(ckpt, &m), PC_OK) << pc_last_error();
  int32_t has_pose = 0, dim = 0;
  int64_t params = 0;
  pc_model_info(m, &has_pose, &dim, &params);
  EXPECT_EQ(has_pose, 1);
  EXPECT_EQ(dim, 16);
  EXPECT_GT(params, 0);

  pc_retrieval_report r;
  ASSERT_EQ(pc_eval_retrieval(m, data.c_str(), 0, 0, &r), PC_OK) << pc_last_error();
  EXPECT_EQ(r.num_poses, 8);
  EXPECT_EQ(r.m, 2);
  EXPECT_NEAR(r.chance_level, 1.0 / 15.0, 1e-15);
  EXPECT_EQ(r.has_pose, 1);

  const std::string png = (dir / "proj.png").string();
  size_t points = 0;
  ASSERT_EQ(pc_eval_project(m, data.c_str(), "pose", 0, 1, png.c_str(), nullptr, &points), PC_OK) << pc_last_error();
  EXPECT_EQ(points, 16u);
  EXPECT_TRUE(std::filesystem::exists(dir / "proj.csv"));
  EXPECT_EQ(pc_eval_project(m, data.c_str(), "neither", 0, 1, png.c_str(), nullptr, nullptr), PC_ERR_INVALID_ARGUMENT);
  pc_model_free(m);

  EXPECT_EQ(pc_model_load((dir / "proj.png").c_str(), &m), PC_ERR_PARSE);
}

}  // namespace
