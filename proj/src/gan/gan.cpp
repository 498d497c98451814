// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/gan/gan.hpp"

#include "evf/nn/ops.hpp"

namespace evf::gan {

using namespace nn;

Shape GanSpec::sample_shape() const {
  if (family == GanFamily::kWavegan) return {16384, channels};
  return {128, 128, channels};
}

GanPair build_wavegan(const GanSpec& spec, Rng& rng) {
  if (spec.latent_dim != 100) throw Error("wavegan: latent_dim is fixed at 100");
  const Eigen::Index d = spec.model_size, c = spec.channels;
  if (d <= 0 || c <= 0) throw Error("wavegan: model_size and channels must be positive");

  GanPair pair;
  pair.spec = spec;

  Graph& g = pair.generator;
  g.add("g.dense", std::make_unique<DenseLayer>(100, 256 * d, rng));
  g.add("g.reshape", std::make_unique<ReshapeLayer>(Shape{16, 16 * d}));
  g.add("g.relu1", std::make_unique<ReluLayer>());
  g.add("g.tconv1", std::make_unique<TConv1dLayer>(25, 16 * d, 8 * d, 4, rng));
  g.add("g.relu2", std::make_unique<ReluLayer>());
  g.add("g.tconv2", std::make_unique<TConv1dLayer>(25, 8 * d, 4 * d, 4, rng));
  g.add("g.relu3", std::make_unique<ReluLayer>());
  g.add("g.tconv3", std::make_unique<TConv1dLayer>(25, 4 * d, 2 * d, 4, rng));
  g.add("g.relu4", std::make_unique<ReluLayer>());
  g.add("g.tconv4", std::make_unique<TConv1dLayer>(25, 2 * d, d, 4, rng));
  g.add("g.relu5", std::make_unique<ReluLayer>());
  g.add("g.tconv5", std::make_unique<TConv1dLayer>(25, d, c, 4, rng));
  g.add("g.tanh", std::make_unique<TanhLayer>());

  Graph& dis = pair.discriminator;
  const Eigen::Index n = spec.phase_shuffle_n;
  dis.add("d.conv1", std::make_unique<Conv1dLayer>(25, c, d, 4, Padding::kSame, rng));
  dis.add("d.lrelu1", std::make_unique<LeakyReluLayer>(0.2));
  dis.add("d.shuffle1", std::make_unique<PhaseShuffleLayer>(n));
  dis.add("d.conv2", std::make_unique<Conv1dLayer>(25, d, 2 * d, 4, Padding::kSame, rng));
  dis.add("d.lrelu2", std::make_unique<LeakyReluLayer>(0.2));
  dis.add("d.shuffle2", std::make_unique<PhaseShuffleLayer>(n));
  dis.add("d.conv3", std::make_unique<Conv1dLayer>(25, 2 * d, 4 * d, 4, Padding::kSame, rng));
  dis.add("d.lrelu3", std::make_unique<LeakyReluLayer>(0.2));
  dis.add("d.shuffle3", std::make_unique<PhaseShuffleLayer>(n));
  dis.add("d.conv4", std::make_unique<Conv1dLayer>(25, 4 * d, 8 * d, 4, Padding::kSame, rng));
  dis.add("d.lrelu4", std::make_unique<LeakyReluLayer>(0.2));
  dis.add("d.shuffle4", std::make_unique<PhaseShuffleLayer>(n));
  dis.add("d.conv5", std::make_unique<Conv1dLayer>(25, 8 * d, 16 * d, 4, Padding::kSame, rng));
  dis.add("d.lrelu5", std::make_unique<LeakyReluLayer>(0.2));
  dis.add("d.reshape", std::make_unique<ReshapeLayer>(Shape{256 * d}));
  dis.add("d.dense", std::make_unique<DenseLayer>(256 * d, 1, rng));
  return pair;
}

GanPair build_specgan(const GanSpec& spec, Rng& rng) {
  if (spec.latent_dim != 100) throw Error("specgan: latent_dim is fixed at 100");
  const Eigen::Index d = spec.model_size, c = spec.channels;
  if (d <= 0 || c <= 0) throw Error("specgan: model_size and channels must be positive");

  GanPair pair;
  pair.spec = spec;

  Graph& g = pair.generator;
  g.add("g.dense", std::make_unique<DenseLayer>(100, 256 * d, rng));
  g.add("g.reshape", std::make_unique<ReshapeLayer>(Shape{4, 4, 16 * d}));
  g.add("g.relu1", std::make_unique<ReluLayer>());
  g.add("g.tconv1", std::make_unique<TConv2dLayer>(5, 5, 16 * d, 8 * d, 2, 2, rng));
  g.add("g.relu2", std::make_unique<ReluLayer>());
  g.add("g.tconv2", std::make_unique<TConv2dLayer>(5, 5, 8 * d, 4 * d, 2, 2, rng));
  g.add("g.relu3", std::make_unique<ReluLayer>());
  g.add("g.tconv3", std::make_unique<TConv2dLayer>(5, 5, 4 * d, 2 * d, 2, 2, rng));
  g.add("g.relu4", std::make_unique<ReluLayer>());
  g.add("g.tconv4", std::make_unique<TConv2dLayer>(5, 5, 2 * d, d, 2, 2, rng));
  g.add("g.relu5", std::make_unique<ReluLayer>());
  g.add("g.tconv5", std::make_unique<TConv2dLayer>(5, 5, d, c, 2, 2, rng));
  g.add("g.tanh", std::make_unique<TanhLayer>());

  Graph& dis = pair.discriminator;
  dis.add("d.conv1", std::make_unique<Conv2dLayer>(5, 5, c, d, 2, 2, Padding::kSame, rng));
  dis.add("d.lrelu1", std::make_unique<LeakyReluLayer>(0.2));
  dis.add("d.conv2", std::make_unique<Conv2dLayer>(5, 5, d, 2 * d, 2, 2, Padding::kSame, rng));
  dis.add("d.lrelu2", std::make_unique<LeakyReluLayer>(0.2));
  dis.add("d.conv3", std::make_unique<Conv2dLayer>(5, 5, 2 * d, 4 * d, 2, 2, Padding::kSame, rng));
  dis.add("d.lrelu3", std::make_unique<LeakyReluLayer>(0.2));
  dis.add("d.conv4", std::make_unique<Conv2dLayer>(5, 5, 4 * d, 8 * d, 2, 2, Padding::kSame, rng));
  dis.add("d.lrelu4", std::make_unique<LeakyReluLayer>(0.2));
  dis.add("d.conv5", std::make_unique<Conv2dLayer>(5, 5, 8 * d, 16 * d, 2, 2, Padding::kSame, rng));
  dis.add("d.lrelu5", std::make_unique<LeakyReluLayer>(0.2));
  dis.add("d.reshape", std::make_unique<ReshapeLayer>(Shape{256 * d}));
  dis.add("d.dense", std::make_unique<DenseLayer>(256 * d, 1, rng));
  return pair;
}

GanPair build_gan(const GanSpec& spec, Rng& rng) {
  return spec.family == GanFamily::kWavegan ? build_wavegan(spec, rng) : build_specgan(spec, rng);
}

Var sample_latent(const GanSpec& spec, Eigen::Index batch, Rng& rng) {
  return constant(Tensor::uniform({batch, spec.latent_dim}, rng, -1.0, 1.0));
}

WganGpLosses wgan_gp_losses(const Graph& discriminator, const Var& real, const Var& fake,
                            double lambda, Rng& rng, ForwardCtx& ctx) {
  if (real.shape() != fake.value().shape()) throw Error("wgan_gp: batch shape mismatch");
  const Eigen::Index batch = real.value().dim(0);

  // One forward over the stacked batch, then split the scores.
  Var d_both = discriminator.forward(cat({real, fake}, 0), ctx);
  Var d_real = narrow(d_both, 0, 0, batch);
  Var d_fake = narrow(d_both, 0, batch, batch);

  // Per-example interpolates between real and fake.
  Tensor u_mask(real.shape());
  const Eigen::Index per = real.size() / batch;
  for (Eigen::Index b = 0; b < batch; ++b) {
    const double u = rng.uniform();
    for (Eigen::Index i = 0; i < per; ++i) u_mask[b * per + i] = u;
  }
  Var interp(Tensor(real.shape()), true);
  interp.value().a() =
      u_mask.a() * real.value().a() + (1.0 - u_mask.a()) * fake.value().a();

  Var d_interp = discriminator.forward(interp, ctx);
  Var g_interp = grad(sum_all(d_interp), {interp}, /*create_graph=*/true)[0];

  // Per-example L2 norm of the interpolate gradient.
  Var g_flat = reshape(g_interp, {batch, per});
  Var norms = sqrt_v(sum_axis(mul(g_flat, g_flat), 1));
  Var penalty = mean_all(mul(add_scalar(norms, -1.0), add_scalar(norms, -1.0)));

  WganGpLosses out;
  out.loss_d = add(sub(mean_all(d_fake), mean_all(d_real)), scale(penalty, lambda));
  out.loss_g = neg(mean_all(d_fake));
  out.wasserstein = d_real.value().a().mean() - d_fake.value().a().mean();
  return out;
}

}  // namespace evf::gan
