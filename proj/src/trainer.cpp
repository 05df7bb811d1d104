// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcfnet/trainer.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "mcfnet/colorspace.hpp"
#include "mcfnet/errors.hpp"
#include "mcfnet/nn/ops.hpp"

namespace mcfnet {

namespace {

nn::AdamOptions adam_options(const TrainConfig& c) {
  nn::AdamOptions o;
  o.lr = c.base_lr;
  o.beta1 = c.beta1;
  o.beta2 = c.beta2;
  return o;
}

// HSV of an N x 3 x H x W RGB batch.
nn::Tensor rgb_batch_to_hsv(const nn::Tensor& rgb) {
  const nn::Shape s = rgb.shape();
  nn::Tensor out(s);
  const std::size_t plane = s.plane();
  for (int n = 0; n < s.n; ++n) {
    const double* r = rgb.plane(n, 0);
    const double* g = rgb.plane(n, 1);
    const double* b = rgb.plane(n, 2);
    double* h = out.plane(n, 0);
    double* sat = out.plane(n, 1);
    double* v = out.plane(n, 2);
    for (std::size_t i = 0; i < plane; ++i) {
      const Hsv px = rgb_to_hsv(Rgb{r[i], g[i], b[i]});
      h[i] = px[0];
      sat[i] = px[1];
      v[i] = px[2];
    }
  }
  return out;
}

std::string describe(const Batch& batch) {
  std::string s = batch.mode == BatchMode::kPaired ? "paired batch [" : "unpaired batch [nir:";
  for (std::size_t i = 0; i < batch.nir_ids.size(); ++i) {
    s += (i ? "," : "") + batch.nir_ids[i];
  }
  if (batch.mode == BatchMode::kUnpaired) {
    s += " rgb:";
    for (std::size_t i = 0; i < batch.rgb_ids.size(); ++i) {
      s += (i ? "," : "") + batch.rgb_ids[i];
    }
  }
  return s + "]";
}

void accumulate(StepLosses& sum, const StepLosses& x) {
  sum.generator.gan += x.generator.gan;
  sum.generator.pair += x.generator.pair;
  sum.generator.cyc += x.generator.cyc;
  sum.generator.edge += x.generator.edge;
  sum.generator.total += x.generator.total;
  sum.d_a += x.d_a;
  sum.d_b += x.d_b;
}

}  // namespace

Trainer::Trainer(TrainConfig config)
    : config_((config.validate(), std::move(config))),
      nets_(config_.model, config_.seed),
      rng_(config_.seed ^ 0x5eed5eed5eed5eedULL) {
  g_opt_ = nn::Adam(collect_params(nets_.generator_groups()), adam_options(config_));
  d_opt_ = nn::Adam(collect_params(nets_.discriminator_groups()), adam_options(config_));
}

void Trainer::set_lr(double lr) {
  g_opt_.set_lr(lr);
  d_opt_.set_lr(lr);
}

StepLosses Trainer::step(const Batch& batch) {
  const bool paired = batch.mode == BatchMode::kPaired;
  const nn::Var a = nn::Var::constant(batch.nir);
  const nn::Var b = nn::Var::constant(batch.rgb);
  const auto d_groups = nets_.discriminator_groups();
  StepLosses out;

  try {
    // Generator update with the discriminators frozen.
    for (auto* g : d_groups) g->set_requires_grad(false);
    g_opt_.zero_grad();

    const ColorizerOutput ca = nets_.colorize(a);
    const nn::Var fake_nir = nets_.restore_nir(b);
    const nn::Var rec_a = nets_.restore_nir(ca.y_rgb);
    const nn::Var rec_b = nets_.colorize(fake_nir).y_rgb;

    LossTerms terms;
    terms.gan = nn::add(generator_gan_loss(nets_.judge_rgb(ca.y_rgb)),
                        generator_gan_loss(nets_.judge_nir(fake_nir)));
    terms.cyc = cycle_loss(rec_a, a, rec_b, b);
    if (paired) {
      terms.pair = pair_loss(ca.y_rgb, b, fake_nir, a);
      if (nets_.config().use_hsv_cfem) {
        terms.pair = nn::add(terms.pair,
                             hsv_loss(ca.y_hsv, nn::Var::constant(rgb_batch_to_hsv(batch.rgb))));
      }
      terms.edge = edge_loss(ca.y_rgb, b, fake_nir, a);
    }
    const nn::Var total = weighted_total(terms, config_.weights);
    if (!std::isfinite(total.value().item())) {
      throw NumericError("non-finite generator loss");
    }
    out.generator = evaluate(terms, config_.weights);
    nn::backward(total);
    g_opt_.step();

    // Discriminator update on detached fakes.
    for (auto* g : d_groups) g->set_requires_grad(true);
    d_opt_.zero_grad();
    const nn::Var v_a =
        gan_loss(nets_.judge_rgb(b), nets_.judge_rgb(nn::detach(ca.y_rgb)));
    const nn::Var v_b =
        gan_loss(nets_.judge_nir(a), nets_.judge_nir(nn::detach(fake_nir)));
    out.d_a = v_a.value().item();
    out.d_b = v_b.value().item();
    if (!std::isfinite(out.d_a) || !std::isfinite(out.d_b)) {
      throw NumericError("non-finite discriminator loss");
    }
    nn::backward(nn::scale(nn::add(v_a, v_b), -1.0));
    d_opt_.step();
  } catch (const NumericError& e) {
    for (auto* g : d_groups) g->set_requires_grad(true);
    throw NumericError(std::string(e.what()) + " at epoch " + std::to_string(epoch_) + ", " +
                       describe(batch));
  }
  return out;
}

EpochLog Trainer::run_epoch(const Dataset& dataset, const BatchCallback& on_batch) {
  if (epoch_ >= config_.total_epochs) {
    throw ConfigError("training already finished at epoch " + std::to_string(epoch_));
  }
  ++epoch_;
  EpochLog log;
  log.epoch = epoch_;
  log.lr = lr_at_epoch(epoch_, config_);
  set_lr(log.lr);

  // Fresh samplers each epoch, seeded from the trainer stream.
  const std::uint64_t paired_seed = rng_();
  const std::uint64_t unpaired_seed = rng_();
  BatchSampler paired(dataset, BatchMode::kPaired, config_.batch_size, paired_seed);
  const int nb = paired.batches_per_epoch();
  const bool stage2 = epoch_ > config_.stage1_end;
  std::optional<BatchSampler> unpaired;
  if (stage2) {
    unpaired.emplace(dataset, BatchMode::kUnpaired, config_.batch_size, unpaired_seed);
  }
  const AugmentSpec* aug = config_.augment ? &config_.augment_spec : nullptr;

  StepLosses sum;
  int step_no = 0;
  const int steps = stage2 ? 2 * nb : nb;
  for (int i = 0; i < steps; ++i) {
    const bool use_unpaired = stage2 && (i % 2 == 1);
    const BatchIndices idx = use_unpaired ? unpaired->next() : paired.next();
    const Batch batch = make_batch(dataset, idx, aug, config_.seed, epoch_);
    const StepLosses l = step(batch);
    accumulate(sum, l);
    if (use_unpaired) {
      ++log.unpaired_batches;
    } else {
      ++log.paired_batches;
    }
    if (on_batch) {
      BatchRecord rec;
      rec.epoch = epoch_;
      rec.step = ++step_no;
      rec.mode = batch.mode;
      rec.nir_ids = batch.nir_ids;
      rec.rgb_ids = batch.rgb_ids;
      rec.losses = l;
      on_batch(rec);
    }
  }
  const double inv = 1.0 / steps;
  log.mean.generator.gan = sum.generator.gan * inv;
  log.mean.generator.pair = sum.generator.pair * inv;
  log.mean.generator.cyc = sum.generator.cyc * inv;
  log.mean.generator.edge = sum.generator.edge * inv;
  log.mean.generator = total_loss(log.mean.generator, config_.weights);
  log.mean.d_a = sum.d_a * inv;
  log.mean.d_b = sum.d_b * inv;
  return log;
}

std::vector<EpochLog> Trainer::train(const Dataset& dataset, const EpochCallback& on_epoch,
                                     const BatchCallback& on_batch) {
  std::vector<EpochLog> logs;
  while (epoch_ < config_.total_epochs) {
    logs.push_back(run_epoch(dataset, on_batch));
    if (on_epoch) on_epoch(logs.back());
  }
  return logs;
}

Checkpoint Trainer::checkpoint() const {
  Checkpoint c;
  c.config = config_;
  c.epoch = epoch_;
  std::ostringstream rng;
  rng << rng_;
  c.rng_state = rng.str();
  c.groups = snapshot_params(nets_);
  c.generator_opt = {g_opt_.steps(), g_opt_.first_moments(), g_opt_.second_moments()};
  c.discriminator_opt = {d_opt_.steps(), d_opt_.first_moments(), d_opt_.second_moments()};
  return c;
}

void Trainer::restore(const Checkpoint& ckpt) {
  if (!(ckpt.config.model == config_.model)) {
    throw CheckpointError("checkpoint model configuration differs from the trainer's");
  }
  load_params(nets_, ckpt);
  g_opt_.restore(ckpt.generator_opt.steps, ckpt.generator_opt.m, ckpt.generator_opt.v);
  d_opt_.restore(ckpt.discriminator_opt.steps, ckpt.discriminator_opt.m,
                 ckpt.discriminator_opt.v);
  std::istringstream rng(ckpt.rng_state);
  rng >> rng_;
  if (!rng) {
    throw CheckpointError("corrupt rng state in checkpoint");
  }
  epoch_ = ckpt.epoch;
  config_ = ckpt.config;
}

}  // namespace mcfnet
