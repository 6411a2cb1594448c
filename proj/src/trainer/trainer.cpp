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

#include "trainer/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "augment/augment.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"
#include "losses/losses.hpp"

namespace posecon {
namespace {

std::string slot_tag(int epoch, int slot) {
  return "train/e" + std::to_string(epoch) + "/s" + std::to_string(slot);
}

MatrixXd to_double(const ag::Matrix& m) { return m.cast<double>(); }
ag::Matrix to_float(const MatrixXd& m) { return m.cast<float>(); }

MatrixXd stack(const MatrixXd& top, const MatrixXd& bottom) {
  MatrixXd out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

// Cross-view cosine statistics: same-label pairs (i != j) and
// different-label pairs.
void similarity_stats(const MatrixXd& z1, const MatrixXd& z2, const std::vector<int>& labels, StepReport& report) {
  const MatrixXd sim = z1 * z2.transpose();
  double pos = 0.0, neg = 0.0;
  std::int64_t npos = 0, nneg = 0;
  for (Eigen::Index i = 0; i < sim.rows(); ++i) {
    for (Eigen::Index j = 0; j < sim.cols(); ++j) {
      if (i == j) continue;
      if (labels[i] == labels[j]) {
        pos += sim(i, j);
        ++npos;
      } else {
        neg += sim(i, j);
        ++nneg;
      }
    }
  }
  report.pos_sim = npos ? pos / static_cast<double>(npos) : 0.0;
  report.neg_sim = nneg ? neg / static_cast<double>(nneg) : 0.0;
}

std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

PreparedBatch prepare_batch(const std::vector<const SampleGroup*>& groups, const TrainConfig& config, int epoch,
                            int first_slot) {
  const int n = static_cast<int>(groups.size());
  const int m = config.m_variations;
  require(n >= 1, ErrorKind::kInvalidArgument, "batch needs at least one pose group");
  const AugmentationSettings settings =
      config.strong_augmentation ? AugmentationSettings{} : AugmentationSettings::weak();

  PreparedBatch batch;
  batch.n = n;
  batch.m = m;
  batch.labels = repeated_labels(n, m);
  for (int g = 0; g < n; ++g) {
    const SampleGroup& group = *groups[g];
    require(static_cast<int>(group.images.size()) >= m, ErrorKind::kInvalidArgument,
            "pose group " + group.pose.pose_id + " has fewer than m_variations images");
    const std::string tag = slot_tag(epoch, first_slot + g);

    SampleGroup appearance;
    appearance.pose = group.pose;
    appearance.caption = group.caption;
    for (int k = 0; k < m; ++k) {
      Rng rng(config.seed, tag + "/appearance/" + std::to_string(k));
      appearance.images.push_back(apply_appearance(group.images[k], draw_appearance(rng, settings)));
    }

    Rng geo_rng(config.seed, tag + "/geometric");
    const ImageHW source{group.images[0].height, group.images[0].width};
    const SampleGroup warped =
        apply_geometric(appearance, draw_geometric(geo_rng, source, config.image_hw, settings));

    for (int k = 0; k < m; ++k) {
      Rng mask_rng(config.seed, tag + "/mask/" + std::to_string(k));
      batch.images.push_back(warped.images[k]);
      batch.poses.push_back(warped.pose);
      batch.mask1.push_back(gen_mask(warped.pose, config, mask_rng));
      batch.mask2.push_back(gen_mask(warped.pose, config, mask_rng));
    }
  }
  return batch;
}

std::string mp_token_name(const TrainConfig& config) {
  if (!config.use_mpc_loss) return "none";
  return config.use_pose_token ? "pose" : "cls";
}

StepReport forward_backward(MaskedAutoencoder& model, const PreparedBatch& batch, const TrainConfig& config,
                            double grad_scale) {
  const int b = batch.n * batch.m;
  const int num_patches = model.config().num_patches();

  // Both masked views go through the encoder and decoder as one 2B batch;
  // samples never interact, so this equals two separate passes.
  const ag::Matrix pixels = patchify(batch.images, config.patch_size);
  ag::Matrix inputs(2 * pixels.rows(), pixels.cols());
  inputs << pixels, pixels;
  std::vector<PatchMask> masks = batch.mask1;
  masks.insert(masks.end(), batch.mask2.begin(), batch.mask2.end());

  const EncodedBatch encoded = model.encode(inputs, masks);
  const ag::Var pred = model.decode(encoded);

  const MatrixXd target_once = to_double(config.norm_pix_loss ? normalize_patches(pixels) : pixels);
  const ReconstructionResult rec = reconstruction_loss(to_double(pred.value()), stack(target_once, target_once), masks);
  require(pred.rows() == 2 * static_cast<Eigen::Index>(b) * num_patches, ErrorKind::kShape,
          "decoder output row count mismatch");

  StepReport report;
  LossTerms terms;
  terms.rec = rec.value;

  std::vector<std::pair<ag::Var, ag::Matrix>> seeds;
  seeds.emplace_back(pred, to_float(rec.grad * grad_scale));

  const ag::Var cls = ag::l2_normalize_rows(encoded.special_rows(0));
  const MatrixXd cls_d = to_double(cls.value());
  const MatrixXd c1 = cls_d.topRows(b), c2 = cls_d.bottomRows(b);
  if (config.gamma1 != 0.0) {
    const LossWithGrad align = align_loss(c1, c2, config.tau);
    terms.align = align.value;
    seeds.emplace_back(cls, to_float(stack(align.grad_a, align.grad_b) * (config.gamma1 * grad_scale)));
  }

  const bool mp_on_pose = config.use_pose_token;
  const ag::Var mp_var = mp_on_pose ? ag::l2_normalize_rows(encoded.special_rows(1)) : cls;
  const MatrixXd mp_d = mp_on_pose ? to_double(mp_var.value()) : cls_d;
  const MatrixXd z1 = mp_d.topRows(b), z2 = mp_d.bottomRows(b);
  if (config.use_mpc_loss && config.gamma2 != 0.0) {
    const LossWithGrad mp = mpc_loss(z1, z2, batch.labels, config.tau);
    terms.mp = mp.value;
    seeds.emplace_back(mp_var, to_float(stack(mp.grad_a, mp.grad_b) * (config.gamma2 * grad_scale)));
  }
  similarity_stats(z1, z2, batch.labels, report);

  report.rec = terms.rec;
  report.align = terms.align;
  report.mp = terms.mp;
  report.total = total_loss(terms, config);
  ag::backward(seeds);
  return report;
}

std::vector<SampleGroup> load_dataset(const std::filesystem::path& data_dir) {
  const DatasetManifest manifest = read_manifest(data_dir);
  std::vector<SampleGroup> groups;
  groups.reserve(manifest.entries.size());
  for (const auto& entry : manifest.entries) groups.push_back(load_group(data_dir, entry));
  return groups;
}

Trainer::Trainer(TrainConfig config, std::vector<SampleGroup> groups, std::filesystem::path out_dir,
                 TrainerOptions options)
    : config_(std::move(config)),
      groups_(std::move(groups)),
      out_dir_(std::move(out_dir)),
      options_(options),
      model_(std::make_unique<MaskedAutoencoder>((config_.validate(), config_.model_config()), config_.seed)),
      optimizer_(model_->parameters(), AdamWSettings{.weight_decay = config_.weight_decay}),
      schedule_{config_.base_lr, static_cast<double>(config_.warmup_epochs),
                static_cast<double>(config_.total_epochs)} {
  for (const auto& g : groups_) {
    require(static_cast<int>(g.images.size()) >= config_.m_variations, ErrorKind::kInvalidArgument,
            "pose group " + g.pose.pose_id + " has " + std::to_string(g.images.size()) +
                " images, m_variations is " + std::to_string(config_.m_variations));
    for (const auto& img : g.images) {
      require(img.height == config_.image_hw.height && img.width == config_.image_hw.width, ErrorKind::kShape,
              "image size of pose group " + g.pose.pose_id + " does not match the configured image size");
    }
  }
  require(updates_per_epoch() >= 1, ErrorKind::kInvalidArgument,
          std::to_string(groups_.size()) + " pose groups are too few for n_poses_per_batch * grad_accum_steps = " +
              std::to_string(config_.n_poses_per_batch * config_.grad_accum_steps));
  std::error_code ec;
  std::filesystem::create_directories(out_dir_, ec);
  require(!ec, ErrorKind::kIo, "cannot create output directory " + out_dir_.string() + ": " + ec.message());
  optimizer_.zero_grad();
}

Trainer::Trainer(TrainConfig config, const std::filesystem::path& data_dir, std::filesystem::path out_dir,
                 TrainerOptions options)
    : Trainer(std::move(config), load_dataset(data_dir), std::move(out_dir), options) {}

std::unique_ptr<Trainer> Trainer::resume(const std::filesystem::path& checkpoint,
                                         const std::filesystem::path& data_dir, std::filesystem::path out_dir,
                                         TrainerOptions options) {
  return resume(checkpoint, load_dataset(data_dir), std::move(out_dir), options);
}

std::unique_ptr<Trainer> Trainer::resume(const std::filesystem::path& checkpoint, std::vector<SampleGroup> groups,
                                         std::filesystem::path out_dir, TrainerOptions options) {
  const Checkpoint ck = read_checkpoint(checkpoint);
  require(!ck.exp_avg.empty(), ErrorKind::kState, checkpoint.string() + " has no optimizer state to resume from");
  auto trainer = std::make_unique<Trainer>(ck.config, std::move(groups), std::move(out_dir), options);
  restore_checkpoint(ck, *trainer->model_, &trainer->optimizer_);
  trainer->epochs_completed_ = ck.epochs_completed;
  trainer->global_step_ = ck.global_step;
  trainer->metrics_open_ = std::filesystem::exists(trainer->metrics_path());
  return trainer;
}

int Trainer::micro_batches_per_epoch() const {
  return updates_per_epoch() * config_.grad_accum_steps;
}

int Trainer::updates_per_epoch() const {
  const int batches = static_cast<int>(groups_.size()) / config_.n_poses_per_batch;
  return batches / config_.grad_accum_steps;
}

void Trainer::run_epoch() {
  require(epochs_completed_ < config_.total_epochs, ErrorKind::kState,
          "all " + std::to_string(config_.total_epochs) + " epochs already completed");
  const int epoch = epochs_completed_;
  const int n = config_.n_poses_per_batch;
  const int accum = config_.grad_accum_steps;
  const int updates = updates_per_epoch();

  std::vector<int> order(groups_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  Rng order_rng(config_.seed, "train/order/e" + std::to_string(epoch));
  order_rng.shuffle(order);

  const double scale = 1.0 / accum;
  for (int u = 0; u < updates; ++u) {
    const double lr = lr_at(epoch + static_cast<double>(u) / updates, schedule_);
    for (int a = 0; a < accum; ++a) {
      const int first_slot = (u * accum + a) * n;
      std::vector<const SampleGroup*> batch_groups;
      for (int g = 0; g < n; ++g) batch_groups.push_back(&groups_[order[first_slot + g]]);
      const PreparedBatch batch = prepare_batch(batch_groups, config_, epoch, first_slot);

      MetricsRow row;
      row.step = global_step_++;
      row.epoch = epoch;
      row.lr = lr;
      row.report = forward_backward(*model_, batch, config_, scale);
      if (a == accum - 1) {
        row.grad_norm = gradient_norm(model_->parameters());
        optimizer_.step(lr);
        optimizer_.zero_grad();
      }
      history_.push_back(row);
      if (options_.write_metrics) append_metrics(row);
    }
  }
  ++epochs_completed_;
  save_checkpoint(latest_checkpoint_path());
  if (options_.keep_epoch_checkpoints) {
    save_checkpoint(out_dir_ / ("checkpoint_epoch_" + std::to_string(epochs_completed_) + ".ckpt"));
  }
}

std::filesystem::path Trainer::fit() {
  while (epochs_completed_ < config_.total_epochs) run_epoch();
  return latest_checkpoint_path();
}

void Trainer::save_checkpoint(const std::filesystem::path& path) const {
  write_checkpoint(path, capture_checkpoint(config_, *model_, &optimizer_, epochs_completed_, global_step_));
}

void Trainer::append_metrics(const MetricsRow& row) {
  const auto path = metrics_path();
  // A fresh run starts a new CSV; a resumed run appends to the existing one.
  const bool fresh = !metrics_open_;
  metrics_open_ = true;
  std::ofstream out(path, fresh ? std::ios::trunc : std::ios::app);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write metrics " + path.string());
  if (fresh) out << "step,lr,rec,align,mp,total,epoch,pos_sim,neg_sim,grad_norm,mp_token\n";
  const auto& r = row.report;
  out << row.step << ',' << csv_number(row.lr) << ',' << csv_number(r.rec) << ',' << csv_number(r.align) << ','
      << csv_number(r.mp) << ',' << csv_number(r.total) << ',' << row.epoch << ',' << csv_number(r.pos_sim) << ','
      << csv_number(r.neg_sim) << ',' << csv_number(row.grad_norm) << ',' << mp_token_name(config_) << '\n';
}

}  // namespace posecon
