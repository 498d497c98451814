// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/gan/train.hpp"

#include <json.hpp>

#include "evf/nn/adam.hpp"
#include "evf/nn/checkpoint.hpp"
#include "evf/nn/ops.hpp"

namespace evf::gan {

using namespace nn;
using json = nlohmann::ordered_json;

void GanTrainConfig::validate() const {
  if (steps <= 0 || batch_size <= 0 || n_critic <= 0) throw Error("gan: config must be positive");
  if (gp_lambda < 0.0 || lr <= 0.0) throw Error("gan: bad optimizer config");
}

namespace {

Tensor stack_batch(const std::vector<Tensor>& slices, const std::vector<std::size_t>& pick) {
  Shape shape = slices[pick[0]].shape();
  shape.insert(shape.begin(), static_cast<Eigen::Index>(pick.size()));
  Tensor out(shape);
  const Eigen::Index per = slices[pick[0]].size();
  for (std::size_t i = 0; i < pick.size(); ++i) {
    const Tensor& s = slices[pick[i]];
    if (s.size() != per) throw Error("gan: ragged slice batch");
    std::copy(s.data(), s.data() + per, out.data() + static_cast<Eigen::Index>(i) * per);
  }
  return out;
}

}  // namespace

GanTrainResult train_gan(GanPair& pair, const std::vector<Tensor>& slices,
                         const GanTrainConfig& cfg) {
  cfg.validate();
  if (slices.empty()) throw Error("gan: no training slices");
  for (const auto& s : slices)
    if (s.shape() != pair.spec.sample_shape()) throw Error("gan: slice shape mismatch");

  Rng rng(cfg.seed);
  ForwardCtx train_ctx{true, &rng};

  ParameterList g_params = pair.generator_params();
  ParameterList d_params = pair.discriminator_params();
  Adam g_opt(g_params, cfg.lr, cfg.beta1, cfg.beta2);
  Adam d_opt(d_params, cfg.lr, cfg.beta1, cfg.beta2);

  GanTrainResult result;
  result.loss_d.reserve(static_cast<std::size_t>(cfg.steps));
  result.wasserstein.reserve(static_cast<std::size_t>(cfg.steps));

  for (Eigen::Index step = 0; step < cfg.steps; ++step) {
    // Critic update on a fresh real batch and detached fakes.
    std::vector<std::size_t> pick(static_cast<std::size_t>(cfg.batch_size));
    for (auto& p : pick)
      p = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int64_t>(slices.size()) - 1));
    Var real = constant(stack_batch(slices, pick));

    Var fake;
    {
      NoGradGuard no_grad(false);
      fake = constant(pair.generator.forward(sample_latent(pair.spec, cfg.batch_size, rng),
                                             train_ctx)
                          .value());
    }

    WganGpLosses losses = wgan_gp_losses(pair.discriminator, real, fake, cfg.gp_lambda, rng,
                                         train_ctx);
    backward(losses.loss_d, d_params);
    d_opt.step();
    result.loss_d.push_back(losses.loss_d.value()[0]);
    result.wasserstein.push_back(losses.wasserstein);

    if ((step + 1) % cfg.n_critic == 0) {
      Var z = sample_latent(pair.spec, cfg.batch_size, rng);
      Var fake2 = pair.generator.forward(z, train_ctx);
      Var loss_g = neg(mean_all(pair.discriminator.forward(fake2, train_ctx)));
      backward(loss_g, g_params);
      g_opt.step();
    }
  }
  return result;
}

std::vector<Tensor> generate_samples(const GanPair& pair, Eigen::Index count,
                                     std::uint64_t seed) {
  Rng rng(seed);
  NoGradGuard no_grad(false);
  ForwardCtx eval_ctx{false, nullptr};

  std::vector<Tensor> out;
  out.reserve(static_cast<std::size_t>(count));
  const Eigen::Index chunk = 16;
  for (Eigen::Index done = 0; done < count; done += chunk) {
    const Eigen::Index n = std::min(chunk, count - done);
    Var z = sample_latent(pair.spec, n, rng);
    Tensor batch = pair.generator.forward(z, eval_ctx).value();
    Shape item_shape(batch.shape().begin() + 1, batch.shape().end());
    const Eigen::Index per = batch.size() / n;
    for (Eigen::Index i = 0; i < n; ++i) {
      Tensor item(item_shape);
      std::copy(batch.data() + i * per, batch.data() + (i + 1) * per, item.data());
      out.push_back(std::move(item));
    }
  }
  return out;
}

std::vector<Tensor> make_wave_slices(const std::vector<audio::Waveform>& utterances,
                                     Eigen::Index count, Eigen::Index slice_len, Rng& rng) {
  if (utterances.empty()) throw Error("gan: no utterances to slice");
  std::vector<Tensor> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    const audio::Waveform& w =
        utterances[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int64_t>(utterances.size()) - 1))];
    Tensor slice({slice_len, 1});
    const Eigen::Index n = w.samples.size();
    if (n <= slice_len) {
      for (Eigen::Index t = 0; t < n; ++t) slice[t] = w.samples[t];
    } else {
      const Eigen::Index start = rng.uniform_int(0, n - slice_len);
      for (Eigen::Index t = 0; t < slice_len; ++t) slice[t] = w.samples[start + t];
    }
    out.push_back(std::move(slice));
  }
  return out;
}

audio::Waveform slice_to_waveform(const Tensor& t, int sample_rate) {
  if (t.rank() != 2 || t.dim(1) != 1) throw Error("gan: expected a (len, 1) slice");
  audio::Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(t.dim(0));
  for (Eigen::Index i = 0; i < t.dim(0); ++i) w.samples[i] = t[i];
  return w;
}

void save_gan_checkpoint(const GanPair& pair, const GanTrainConfig& cfg, const std::string& dir) {
  json config;
  config["family"] = pair.spec.family == GanFamily::kWavegan ? "wavegan" : "specgan";
  config["model_size"] = pair.spec.model_size;
  config["channels"] = pair.spec.channels;
  config["latent_dim"] = pair.spec.latent_dim;
  config["phase_shuffle_n"] = pair.spec.phase_shuffle_n;
  config["seed"] = cfg.seed;

  ParameterList params = pair.generator_params();
  ParameterList d = pair.discriminator_params();
  params.insert(params.end(), d.begin(), d.end());
  nn::save_checkpoint(dir, "gan", config.dump(), params);
}

GanPair load_gan_checkpoint(const std::string& dir) {
  nn::CheckpointManifest manifest = nn::read_manifest(dir);
  if (manifest.model_kind != "gan") throw Error("not a gan checkpoint: " + dir);
  json config = json::parse(manifest.config_json);

  GanSpec spec;
  spec.family = config.at("family") == "wavegan" ? GanFamily::kWavegan : GanFamily::kSpecgan;
  spec.model_size = config.at("model_size").get<Eigen::Index>();
  spec.channels = config.at("channels").get<Eigen::Index>();
  spec.latent_dim = config.at("latent_dim").get<Eigen::Index>();
  spec.phase_shuffle_n = config.at("phase_shuffle_n").get<Eigen::Index>();

  Rng rng(config.value("seed", 1));
  GanPair pair = build_gan(spec, rng);
  ParameterList params = pair.generator_params();
  ParameterList d = pair.discriminator_params();
  params.insert(params.end(), d.begin(), d.end());
  nn::load_checkpoint(dir, params);
  return pair;
}

}  // namespace evf::gan
