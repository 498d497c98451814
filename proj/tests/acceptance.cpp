// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the exit code is the number of failures. Run with a list of criterion
// numbers to restrict (e.g. `acceptance 1 5 9`).

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "evf/adcrnn/trainer.hpp"
#include "evf/audio/resample.hpp"
#include "evf/augment/balance.hpp"
#include "evf/gan/train.hpp"
#include "evf/harness/pipeline.hpp"
#include "evf/nn/checkpoint.hpp"
#include "evf/spectral/specgan_transform.hpp"
#include "tests/support/fixtures.hpp"
#include "tests/support/oracles.hpp"

using namespace evf;
using namespace evf::nn;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int number;
  std::string title;
  std::function<void(std::string&)> run;  // throws on failure; may add detail
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(what);
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

// ---- criterion 1: architecture tables ---------------------------------------

struct Row {
  std::string op;
  Shape kernel;
  Shape output;
};

void check_walk(const std::vector<LayerDesc>& got, const std::vector<Row>& want,
                const std::string& tag) {
  require(got.size() == want.size(), tag + ": row count mismatch");
  for (std::size_t i = 0; i < got.size(); ++i) {
    require(got[i].op == want[i].op, tag + ": op mismatch at row " + std::to_string(i) + " (" +
                                         got[i].op + " vs " + want[i].op + ")");
    require(got[i].kernel == want[i].kernel, tag + ": kernel mismatch at row " + std::to_string(i));
    require(got[i].output == want[i].output, tag + ": shape mismatch at row " + std::to_string(i));
  }
}

void criterion_shapes(std::string& detail) {
  int combos = 0;
  for (auto [bs, d, c] : {std::tuple<Eigen::Index, Eigen::Index, Eigen::Index>{2, 2, 1},
                          {1, 4, 2}, {3, 1, 1}, {2, 8, 3}}) {
    Rng rng(1);
    gan::GanSpec wspec;
    wspec.family = gan::GanFamily::kWavegan;
    wspec.model_size = d;
    wspec.channels = c;
    gan::GanPair wave = gan::build_wavegan(wspec, rng);

    const std::vector<Row> wave_gen = {
        {"Dense", {100, 256 * d}, {bs, 256 * d}},
        {"Reshape", {}, {bs, 16, 16 * d}},
        {"ReLU", {}, {bs, 16, 16 * d}},
        {"TransposeConv1D", {25, 16 * d, 8 * d}, {bs, 64, 8 * d}},
        {"ReLU", {}, {bs, 64, 8 * d}},
        {"TransposeConv1D", {25, 8 * d, 4 * d}, {bs, 256, 4 * d}},
        {"ReLU", {}, {bs, 256, 4 * d}},
        {"TransposeConv1D", {25, 4 * d, 2 * d}, {bs, 1024, 2 * d}},
        {"ReLU", {}, {bs, 1024, 2 * d}},
        {"TransposeConv1D", {25, 2 * d, d}, {bs, 4096, d}},
        {"ReLU", {}, {bs, 4096, d}},
        {"TransposeConv1D", {25, d, c}, {bs, 16384, c}},
        {"Tanh", {}, {bs, 16384, c}},
    };
    const std::vector<Row> wave_disc = {
        {"Conv1D", {25, c, d}, {bs, 4096, d}},
        {"LeakyReLU", {}, {bs, 4096, d}},
        {"PhaseShuffle", {}, {bs, 4096, d}},
        {"Conv1D", {25, d, 2 * d}, {bs, 1024, 2 * d}},
        {"LeakyReLU", {}, {bs, 1024, 2 * d}},
        {"PhaseShuffle", {}, {bs, 1024, 2 * d}},
        {"Conv1D", {25, 2 * d, 4 * d}, {bs, 256, 4 * d}},
        {"LeakyReLU", {}, {bs, 256, 4 * d}},
        {"PhaseShuffle", {}, {bs, 256, 4 * d}},
        {"Conv1D", {25, 4 * d, 8 * d}, {bs, 64, 8 * d}},
        {"LeakyReLU", {}, {bs, 64, 8 * d}},
        {"PhaseShuffle", {}, {bs, 64, 8 * d}},
        {"Conv1D", {25, 8 * d, 16 * d}, {bs, 16, 16 * d}},
        {"LeakyReLU", {}, {bs, 16, 16 * d}},
        {"Reshape", {}, {bs, 256 * d}},
        {"Dense", {256 * d, 1}, {bs, 1}},
    };
    check_walk(wave.generator.walk({bs, 100}), wave_gen, "wavegan generator");
    check_walk(wave.discriminator.walk({bs, 16384, c}), wave_disc, "wavegan discriminator");

    gan::GanSpec sspec = wspec;
    sspec.family = gan::GanFamily::kSpecgan;
    gan::GanPair spec = gan::build_specgan(sspec, rng);
    const std::vector<Row> spec_gen = {
        {"Dense", {100, 256 * d}, {bs, 256 * d}},
        {"Reshape", {}, {bs, 4, 4, 16 * d}},
        {"ReLU", {}, {bs, 4, 4, 16 * d}},
        {"TransposeConv2D", {5, 5, 16 * d, 8 * d}, {bs, 8, 8, 8 * d}},
        {"ReLU", {}, {bs, 8, 8, 8 * d}},
        {"TransposeConv2D", {5, 5, 8 * d, 4 * d}, {bs, 16, 16, 4 * d}},
        {"ReLU", {}, {bs, 16, 16, 4 * d}},
        {"TransposeConv2D", {5, 5, 4 * d, 2 * d}, {bs, 32, 32, 2 * d}},
        {"ReLU", {}, {bs, 32, 32, 2 * d}},
        {"TransposeConv2D", {5, 5, 2 * d, d}, {bs, 64, 64, d}},
        {"ReLU", {}, {bs, 64, 64, d}},
        {"TransposeConv2D", {5, 5, d, c}, {bs, 128, 128, c}},
        {"Tanh", {}, {bs, 128, 128, c}},
    };
    const std::vector<Row> spec_disc = {
        {"Conv2D", {5, 5, c, d}, {bs, 64, 64, d}},
        {"LeakyReLU", {}, {bs, 64, 64, d}},
        {"Conv2D", {5, 5, d, 2 * d}, {bs, 32, 32, 2 * d}},
        {"LeakyReLU", {}, {bs, 32, 32, 2 * d}},
        {"Conv2D", {5, 5, 2 * d, 4 * d}, {bs, 16, 16, 4 * d}},
        {"LeakyReLU", {}, {bs, 16, 16, 4 * d}},
        {"Conv2D", {5, 5, 4 * d, 8 * d}, {bs, 8, 8, 8 * d}},
        {"LeakyReLU", {}, {bs, 8, 8, 8 * d}},
        {"Conv2D", {5, 5, 8 * d, 16 * d}, {bs, 4, 4, 16 * d}},
        {"LeakyReLU", {}, {bs, 4, 4, 16 * d}},
        {"Reshape", {}, {bs, 256 * d}},
        {"Dense", {256 * d, 1}, {bs, 1}},
    };
    check_walk(spec.generator.walk({bs, 100}), spec_gen, "specgan generator");
    check_walk(spec.discriminator.walk({bs, 128, 128, c}), spec_disc, "specgan discriminator");
    ++combos;
  }
  detail = std::to_string(combos) + " (Bs, D, C) combinations, all rows exact";
}

// ---- criterion 2: gradient suite --------------------------------------------

void criterion_gradients(std::string& detail) {
  Rng rng(42);
  const double tol = 1e-4;
  int trials = 0;
  double worst = 0.0;
  auto note = [&](double err) {
    worst = std::max(worst, err);
    ++trials;
    require(err <= tol, "gradient error " + std::to_string(err) + " above 1e-4 at trial " +
                            std::to_string(trials));
  };

  auto rand_var = [&](Shape shape, double lo = -1.0, double hi = 1.0) {
    return Var(Tensor::uniform(std::move(shape), rng, lo, hi), true);
  };
  auto kink_safe = [&](Shape shape) {
    Tensor t = Tensor::uniform(std::move(shape), rng);
    for (Eigen::Index i = 0; i < t.size(); ++i)
      if (std::abs(t[i]) < 5e-2) t[i] = t[i] < 0 ? -5e-2 : 5e-2;
    return Var(std::move(t), true);
  };

  for (int i = 0; i < 7; ++i) {  // dense
    Var x = rand_var({3, 4}), w = rand_var({4, 2}), b = rand_var({2});
    note(test::fd_check([&] { return mean_all(mul(dense(x, w, b), dense(x, w, b))); }, {x, w, b}));
  }
  for (int i = 0; i < 7; ++i) {  // conv1d + reshape
    Var x = rand_var({2, 9, 2}), w = rand_var({3, 2, 2});
    note(test::fd_check(
        [&] {
          Var y = conv1d(x, w, 2, i % 2 ? Padding::kSame : Padding::kValid);
          return mean_all(mul(reshape(y, {y.size()}), reshape(y, {y.size()})));
        },
        {x, w}));
  }
  for (int i = 0; i < 7; ++i) {  // tconv1d
    Var x = rand_var({1, 5, 2}), w = rand_var({4, 2, 2});
    note(test::fd_check([&] { Var y = tconv1d(x, w, 2); return mean_all(mul(y, y)); }, {x, w}));
  }
  for (int i = 0; i < 6; ++i) {  // conv2d
    Var x = rand_var({1, 5, 6, 2}), w = rand_var({3, 3, 2, 2});
    note(test::fd_check(
        [&] { Var y = conv2d(x, w, 1, 1, Padding::kSame); return mean_all(mul(y, y)); }, {x, w}));
  }
  for (int i = 0; i < 6; ++i) {  // dilated conv2d
    Var x = rand_var({1, 6, 6, 1}), w = rand_var({3, 3, 1, 2});
    note(test::fd_check(
        [&] { Var y = conv2d(x, w, 1, 1, Padding::kSame, 2, 2); return mean_all(mul(y, y)); },
        {x, w}));
  }
  for (int i = 0; i < 6; ++i) {  // tconv2d
    Var x = rand_var({1, 3, 4, 2}), w = rand_var({3, 3, 2, 1});
    note(test::fd_check([&] { Var y = tconv2d(x, w, 2, 2); return mean_all(mul(y, y)); }, {x, w}));
  }
  for (int i = 0; i < 6; ++i) {  // maxpool2d
    Var x = kink_safe({1, 6, 8, 2});
    note(test::fd_check([&] { Var y = maxpool2d(x, 2, 4, 2, 4); return mean_all(mul(y, y)); },
                        {x}));
  }
  for (int i = 0; i < 6; ++i) {  // batchnorm (train mode)
    Rng init(90 + i);
    BatchNormLayer bn(3, init);
    ForwardCtx ctx{true, &rng};
    Var x = rand_var({7, 3});
    note(test::fd_check(
        [&] { Var y = bn.forward(x, ctx); return mean_all(mul(y, y)); },
        {x, bn.gamma_->var, bn.beta_->var}));
  }
  for (int i = 0; i < 6; ++i) {  // dropout (fixed mask)
    Var x = rand_var({4, 4});
    Tensor mask({4, 4});
    for (Eigen::Index j = 0; j < 16; ++j) mask[j] = rng.uniform() < 0.5 ? 2.0 : 0.0;
    note(test::fd_check([&] { return mean_all(mul(apply_mask(x, mask), x)); }, {x}));
  }
  for (int i = 0; i < 5; ++i) {  // relu / leakyrelu
    Var x = kink_safe({5, 5});
    note(test::fd_check([&] { return sum_all(mul(relu(x), leaky_relu(x, 0.2))); }, {x}));
  }
  for (int i = 0; i < 5; ++i) {  // tanh / sigmoid
    Var x = rand_var({4, 4});
    note(test::fd_check([&] { return mean_all(mul(tanh_v(x), sigmoid_v(x))); }, {x}));
  }
  for (int i = 0; i < 4; ++i) {  // single-direction lstm (dilation 1 and 2)
    Rng init(70 + i);
    LstmCell cell(2, 3, init);
    ParameterList ps;
    cell.collect("c", &ps);
    Var x = rand_var({2, 4, 2});
    std::vector<Var> wrt{x};
    for (auto& p : ps) wrt.push_back(p->var);
    note(test::fd_check(
        [&] { Var h = cell.run(x, 1 + i % 2, false); return mean_all(mul(h, h)); }, wrt));
  }
  for (int i = 0; i < 4; ++i) {  // bidirectional dilated lstm
    Rng init(80 + i);
    BiDilatedLstm lstm(2, 2, {1, 2}, init);
    ParameterList ps;
    lstm.collect("l", &ps);
    ForwardCtx ctx{true, &rng};
    Var x = rand_var({1, 4, 2});
    std::vector<Var> wrt{x};
    for (auto& p : ps) wrt.push_back(p->var);
    note(test::fd_check([&] { Var h = lstm.forward(x, ctx); return mean_all(mul(h, h)); }, wrt));
  }
  for (int i = 0; i < 6; ++i) {  // attention
    Var h = rand_var({2, 4, 3}), z = rand_var({3});
    note(test::fd_check([&] { Var p = attention_pool(h, z); return mean_all(mul(p, p)); }, {h, z}));
  }
  for (int i = 0; i < 5; ++i) {  // phase shuffle (fixed shifts)
    Var x = rand_var({2, 6, 2});
    std::vector<Eigen::Index> shifts = {(i % 5) - 2, 2 - (i % 5)};
    note(test::fd_check(
        [&] { Var y = phase_shuffle(x, shifts); return mean_all(mul(y, mul(y, y))); }, {x}));
  }
  for (int i = 0; i < 4; ++i) {  // reshape / permute / narrow / cat / softmax
    Var a = rand_var({2, 6});
    note(test::fd_check(
        [&] {
          Var p = permute(reshape(a, {2, 3, 2}), {2, 1, 0});  // (2, 3, 2)
          Var n = narrow(p, 1, 1, 2);                         // (2, 2, 2)
          Var c = reshape(cat({n, n}, 2), {4, 4});
          Var weights = reshape(narrow(cat({a, a}, 0), 1, 1, 4), {4, 4});
          return sum_all(mul(softmax(c), weights));
        },
        {a}));
  }

  // Loss variants on random toy batches.
  for (auto variant : {adcrnn::LossVariant::kLf1, adcrnn::LossVariant::kLf2,
                       adcrnn::LossVariant::kLf3, adcrnn::LossVariant::kLf4}) {
    adcrnn::LossConfig cfg;
    cfg.variant = variant;
    cfg.epsilon = 0.3;
    const Eigen::Index cdim = cfg.centroid_dim(5, 3);
    for (int i = 0; i < 4; ++i) {
      Var features = rand_var({3, 5});
      Var logits = rand_var({3, 3});
      Var centroids = rand_var({3, cdim});
      std::vector<int> y = {static_cast<int>(rng.uniform_int(0, 2)),
                            static_cast<int>(rng.uniform_int(0, 2)),
                            static_cast<int>(rng.uniform_int(0, 2))};
      note(test::fd_check([&] { return adcrnn::total_loss(cfg, features, logits, y, centroids); },
                          {features, logits, centroids}));
    }
  }

  std::ostringstream os;
  os << trials << " randomized trials, max relative error " << worst;
  detail = os.str();
}

// ---- criterion 3: DSP round trips --------------------------------------------

void criterion_dsp(std::string& detail) {
  // istft(stft(x)) interior SNR.
  spectral::StftConfig cfg = spectral::StftConfig::features();
  Rng rng(3);
  audio::Waveform w;
  w.sample_rate = 16000;
  w.samples.resize(8000);
  for (Eigen::Index i = 0; i < 8000; ++i) w.samples[i] = rng.uniform(-0.8, 0.8);
  audio::Waveform back = spectral::istft(spectral::stft(w, cfg));
  double snr = test::snr_db(w.samples, back.samples, cfg.window, back.samples.size() - cfg.window);
  require(snr >= 40.0, "istft round trip " + std::to_string(snr) + " dB");

  // Griffin-Lim monotone distances on 20 random magnitude targets.
  spectral::StftConfig gcfg = spectral::StftConfig::specgan();
  for (int t = 0; t < 20; ++t) {
    spectral::MagSpectrogram target;
    target.config = gcfg;
    target.mag.resize(24, gcfg.bins());
    for (Eigen::Index i = 0; i < target.mag.size(); ++i)
      target.mag.data()[i] = rng.uniform(0.0, 1.0);
    std::vector<double> distances;
    spectral::griffin_lim(target, 16, &distances);
    require(distances.size() == 17, "griffin-lim must run exactly 16 iterations");
    for (std::size_t k = 0; k + 1 < distances.size(); ++k)
      require(distances[k + 1] <= distances[k] + 1e-9,
              "griffin-lim distance increased at iteration " + std::to_string(k));
  }

  // Resample round trip on band-limited tones.
  double worst_resample = 1e9;
  for (double freq : {500.0, 1700.0, 3600.0}) {
    audio::Waveform tone = test::sine(freq, 16000, 8000, 0.5);
    audio::Waveform round = audio::resample(audio::resample(tone, 32000), 16000);
    double s = test::snr_db(tone.samples, round.samples, 200, tone.samples.size() - 200);
    worst_resample = std::min(worst_resample, s);
  }
  require(worst_resample >= 40.0, "resample round trip " + std::to_string(worst_resample) + " dB");

  std::ostringstream os;
  os << "istft " << snr << " dB, griffin-lim monotone on 20 targets, resample "
     << worst_resample << " dB";
  detail = os.str();
}

// ---- criterion 4: pitch-shift frequency law ----------------------------------

void criterion_pitch(std::string& detail) {
  audio::Waveform w = test::sine(440.0, 16000, 16000);
  double worst_rel = 0.0;
  for (int nhs : {-2, -1, 1, 2, 12}) {
    augment::PitchSpec spec;
    spec.nhs = nhs;
    audio::Waveform out = augment::pitch_shift(w, spec);
    require(std::abs(out.samples.size() - w.samples.size()) <= 1,
            "length drifted at nhs " + std::to_string(nhs));
    const double expected = 440.0 * std::pow(2.0, nhs / 12.0);
    const double measured = test::fft_peak_hz(out);
    const double rel = std::abs(measured / expected - 1.0);
    worst_rel = std::max(worst_rel, rel);
    require(rel <= 0.03, "frequency law violated at nhs " + std::to_string(nhs) + ": measured " +
                             std::to_string(measured) + " expected " + std::to_string(expected));
  }
  std::ostringstream os;
  os << "max frequency deviation " << 100.0 * worst_rel << "% across nhs {-2,-1,1,2,12}";
  detail = os.str();
}

// ---- criterion 5: loss identities ---------------------------------------------

void criterion_losses(std::string& detail) {
  Rng rng(5);
  adcrnn::LossConfig lf1;
  lf1.variant = adcrnn::LossVariant::kLf1;
  lf1.epsilon = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Var features(Tensor::uniform({4, 6}, rng));
    Var logits(Tensor::uniform({4, 7}, rng, -3.0, 3.0));
    Var centroids(Tensor::uniform({7, 6}, rng));
    std::vector<int> y(4);
    for (auto& v : y) v = static_cast<int>(rng.uniform_int(0, 6));
    const double total = adcrnn::total_loss(lf1, features, logits, y, centroids).value()[0];
    const double sm = adcrnn::softmax_loss(logits, y).value()[0];
    require(total == sm, "Lf1 with epsilon 0 differs from the softmax loss");
  }

  Tensor c = Tensor::uniform({7, 6}, rng);
  Tensor f({3, 6});
  std::vector<int> y = {2, 5, 0};
  for (int n = 0; n < 3; ++n)
    for (Eigen::Index j = 0; j < 6; ++j)
      f.at({n, j}) = c.at({y[static_cast<std::size_t>(n)], j});
  require(adcrnn::center_loss(Var(f), y, Var(c)).value()[0] == 0.0,
          "center loss nonzero at the centroids");

  Var uniform_logits(Tensor::full({1, 7}, 1.2345));
  const double ln7 = adcrnn::softmax_loss(uniform_logits, {3}).value()[0];
  require(std::abs(ln7 - std::log(7.0)) <= 1e-9, "uniform-logit softmax loss is not ln 7");

  detail = "1000 exact Lf1(eps=0)==softmax batches; center loss 0 at centroids; ln 7 = " +
           std::to_string(ln7);
}

// ---- criterion 6: toy end-to-end learning -------------------------------------

double toy_cv_accuracy(adcrnn::LossVariant variant, std::string* per_fold) {
  spectral::Mel3dConfig mel;
  mel.fixed_frames = 64;
  adcrnn::FeatureSet all = test::make_tone_features({300, 1000, 3000}, 60, mel, 1234, 1.0);

  adcrnn::AdcrnnConfig cfg = adcrnn::AdcrnnConfig::toy(3, 64);
  adcrnn::TrainerConfig tcfg;
  tcfg.loss.variant = variant;
  tcfg.loss.epsilon = 0.1;
  tcfg.epochs = 14;
  tcfg.batch_size = 16;
  tcfg.lr = 1e-3;

  std::vector<double> fold_acc;
  for (int fold = 0; fold < 5; ++fold) {
    adcrnn::FeatureSet train, test_set;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (static_cast<int>(i) % 5 == fold) {
        test_set.features.push_back(all.features[i]);
        test_set.labels.push_back(all.labels[i]);
      } else {
        train.features.push_back(all.features[i]);
        train.labels.push_back(all.labels[i]);
      }
    }
    Rng mrng(1000 + fold);
    adcrnn::AdcrnnModel model(cfg, mrng);
    tcfg.seed = 2000 + fold;
    adcrnn::train_adcrnn(model, train, tcfg);
    fold_acc.push_back(adcrnn::accuracy(model, test_set));
  }
  harness::Aggregate agg = harness::aggregate(fold_acc);
  if (per_fold) {
    std::ostringstream os;
    for (double a : fold_acc) os << ' ' << a;
    *per_fold = os.str();
  }
  return agg.mean;
}

void criterion_toy_e2e(std::string& detail) {
  std::string folds1, folds2;
  const double acc_lf1 = toy_cv_accuracy(adcrnn::LossVariant::kLf1, &folds1);
  require(acc_lf1 >= 0.95, "Lf1 held-out accuracy " + std::to_string(acc_lf1) + " below 0.95");
  const double acc_lf2 = toy_cv_accuracy(adcrnn::LossVariant::kLf2, &folds2);
  require(acc_lf2 >= 0.90, "Lf2 held-out accuracy " + std::to_string(acc_lf2) + " below 0.90");
  std::ostringstream os;
  os << "Lf1 mean " << acc_lf1 << " (folds:" << folds1 << "), Lf2 mean " << acc_lf2;
  detail = os.str();
}

// ---- criterion 7: overfit sanity ----------------------------------------------

void criterion_overfit(std::string& detail) {
  const std::string dir = test::temp_dir("accept_overfit");
  test::make_emodb_fixture(dir, {3, 2, 2, 2, 2, 2, 3}, 9600);
  audio::Catalog catalog = audio::ingest_emodb(dir);
  require(catalog.records.size() == 16, "fixture subset must have 16 utterances");

  spectral::Mel3dConfig mel;
  mel.fixed_frames = 32;
  adcrnn::FeatureSet set;
  for (const auto& r : catalog.records) {
    set.features.push_back(spectral::melspec_3d(audio::read_wav(r.path), mel));
    set.labels.push_back(static_cast<int>(r.label));
  }

  adcrnn::AdcrnnConfig cfg = adcrnn::AdcrnnConfig::toy(7, 32);
  Rng mrng(11);
  adcrnn::AdcrnnModel model(cfg, mrng);
  adcrnn::TrainerConfig tcfg;
  tcfg.epochs = 200;
  tcfg.batch_size = 16;
  tcfg.lr = 1e-3;
  tcfg.seed = 12;

  adcrnn::TrainResult result = adcrnn::train_adcrnn(model, set, tcfg);
  const double acc = adcrnn::accuracy(model, set);
  require(acc == 1.0, "training accuracy " + std::to_string(acc) + " below 100%");
  std::ostringstream os;
  os << "100% on 16 utterances, final epoch loss " << result.epoch_loss.back();
  detail = os.str();
}

// ---- criterion 8: desk-scale WaveGAN -------------------------------------------

void criterion_gan(std::string& detail) {
  Rng data_rng(8);
  std::vector<Tensor> slices =
      gan::make_wave_slices({test::sine(440.0, 16000, 16000 * 8, 0.8)}, 256, 16384, data_rng);

  gan::GanSpec spec;
  spec.model_size = 16;
  gan::GanTrainConfig cfg;
  cfg.steps = 2000;
  cfg.batch_size = 4;
  cfg.n_critic = 5;
  cfg.seed = 21;

  Rng build_rng(31);
  gan::GanPair pair = gan::build_wavegan(spec, build_rng);
  gan::GanTrainResult result = gan::train_gan(pair, slices, cfg);

  // Wasserstein estimate trends toward zero.
  double first = 0.0, last = 0.0;
  for (int i = 0; i < 50; ++i) {
    first += result.wasserstein[static_cast<std::size_t>(i)];
    last += result.wasserstein[result.wasserstein.size() - 50 + static_cast<std::size_t>(i)];
  }
  first /= 50.0;
  last /= 50.0;

  std::vector<Tensor> samples = gan::generate_samples(pair, 50, 77);
  const double target_bin = 440.0 * 16384.0 / 16000.0;
  int hits = 0;
  for (const auto& s : samples) {
    Eigen::ArrayXd mono(16384);
    for (Eigen::Index i = 0; i < 16384; ++i) mono[i] = s[i];
    if (std::abs(test::fft_peak_bin(mono) - target_bin) <= 3.0) ++hits;
  }

  std::ostringstream os;
  os << hits << "/50 peaks within 3 bins of " << target_bin << "; W first50 " << first
     << " last50 " << last;
  detail = os.str();
  require(hits >= 30, "only " + std::to_string(hits) + "/50 samples near 440 Hz");
  require(last < first, "Wasserstein estimate did not trend toward zero (" +
                            std::to_string(first) + " -> " + std::to_string(last) + ")");
}

// ---- criterion 9: determinism ---------------------------------------------------

void compare_trees(const std::string& a, const std::string& b) {
  std::map<std::string, std::string> fa, fb;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) fa[fs::relative(e.path(), a).string()] = slurp(e.path().string());
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) fb[fs::relative(e.path(), b).string()] = slurp(e.path().string());
  require(fa.size() == fb.size(), "tree file counts differ: " + a + " vs " + b);
  for (const auto& [rel, bytes] : fa) {
    auto it = fb.find(rel);
    require(it != fb.end(), "missing file " + rel);
    require(it->second == bytes, "byte difference in " + rel);
  }
}

void criterion_determinism(std::string& detail) {
  const std::string data = test::temp_dir("accept_det_data");
  test::make_emodb_fixture(data, {4, 3, 3, 3, 3, 3, 3}, 2400);

  // Full pipeline twice (covers ingest, augmentation, features, training,
  // reports).
  auto run_once = [&](const std::string& out) {
    harness::PipelineConfig cfg;
    cfg.dataset_dir = data;
    cfg.out_dir = out;
    cfg.hda_case = "time_shift";
    cfg.folds = 3;
    cfg.epochs = 1;
    cfg.batch_size = 8;
    cfg.seed = 99;
    cfg.scale = "toy";
    cfg.fixed_frames = 12;
    harness::run_pipeline(cfg);
    // Catalog CSVs embed absolute paths; compare them after normalizing the
    // run directory prefix out.
    for (const char* name : {"catalog.csv", "catalog_original.csv"}) {
      std::string text = slurp(out + "/" + name);
      std::string normalized;
      std::size_t pos = 0;
      while (pos < text.size()) {
        auto hit = text.find(out, pos);
        if (hit == std::string::npos) {
          normalized += text.substr(pos);
          break;
        }
        normalized += text.substr(pos, hit - pos) + "<out>";
        pos = hit + out.size();
      }
      std::ofstream(out + "/" + name, std::ios::trunc) << normalized;
    }
  };
  const std::string out1 = test::temp_dir("accept_det_run1");
  const std::string out2 = test::temp_dir("accept_det_run2");
  run_once(out1);
  run_once(out2);
  compare_trees(out1, out2);

  // GAN training checkpoints are bit-stable too.
  Rng slice_rng(4);
  std::vector<Tensor> slices =
      gan::make_wave_slices({test::sine(440, 16000, 40000)}, 8, 16384, slice_rng);
  gan::GanSpec spec;
  spec.model_size = 1;
  gan::GanTrainConfig gcfg;
  gcfg.steps = 4;
  gcfg.batch_size = 2;
  gcfg.n_critic = 2;
  gcfg.seed = 5;
  const std::string g1 = test::temp_dir("accept_det_gan1");
  const std::string g2 = test::temp_dir("accept_det_gan2");
  for (const auto& dir : {g1, g2}) {
    Rng build(77);
    gan::GanPair pair = gan::build_wavegan(spec, build);
    gan::train_gan(pair, slices, gcfg);
    gan::save_gan_checkpoint(pair, gcfg, dir);
  }
  compare_trees(g1, g2);

  detail = "pipeline trees and GAN checkpoints byte-identical across reruns";
}

// ---- criterion 10: balancing census ---------------------------------------------

void criterion_balance(std::string& detail) {
  const std::string dir = test::temp_dir("accept_census");
  test::make_emodb_fixture(dir);
  audio::Catalog catalog = audio::ingest_emodb(dir);
  require(catalog.records.size() == 535, "census fixture must hold 535 files");

  augment::BalancePlan plan = augment::plan_balance(catalog, audio::Provenance::kTimeShift, 7);
  require(plan.target_count == 127, "majority count must be 127");

  std::map<std::string, int> label_of;
  for (const auto& r : catalog.records) label_of[r.id] = static_cast<int>(r.label);
  std::array<int, 7> added{};
  for (const auto& item : plan.items) added[static_cast<std::size_t>(label_of.at(item.source_id))]++;

  require(added[0] == 0, "majority class received synthetic items");
  int total = 535;
  for (int c = 0; c < 7; ++c) {
    const int final_count = test::kEmodbCounts[static_cast<std::size_t>(c)] +
                            added[static_cast<std::size_t>(c)];
    require(final_count == 127, "class " + std::string(audio::kEmotionNames[c]) +
                                    " ends at " + std::to_string(final_count));
    total += added[static_cast<std::size_t>(c)];
  }
  require(total == 7 * 127, "total after balancing must be 7 x 127");
  detail = "all six minority classes raised to 127; total " + std::to_string(total);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> criteria = {
      {1, "architecture tables reproduced exactly", criterion_shapes},
      {2, "finite-difference gradient suite (max rel err <= 1e-4)", criterion_gradients},
      {3, "DSP round trips (istft, griffin-lim, resample)", criterion_dsp},
      {4, "pitch-shift frequency law +-3%, length +-1", criterion_pitch},
      {5, "loss identities (eps=0, centroids, ln 7)", criterion_losses},
      {6, "toy 3-class end-to-end >= 95% (Lf1) and >= 90% (Lf2)", criterion_toy_e2e},
      {7, "overfit 16 utterances to 100% within 200 epochs", criterion_overfit},
      {8, "desk-scale WaveGAN learns 440 Hz (>= 60% within 3 bins)", criterion_gan},
      {9, "byte-identical reruns of every stage", criterion_determinism},
      {10, "balancing raises all minority classes to the majority", criterion_balance},
  };

  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0;
  for (auto& c : criteria) {
    if (!only.empty() && !only.count(c.number)) continue;
    std::string detail;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(detail);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::printf("[PASS] criterion %2d: %s — %s (%.1fs)\n", c.number, c.title.c_str(),
                  detail.c_str(), secs);
    } catch (const std::exception& e) {
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::printf("[FAIL] criterion %2d: %s — %s (%.1fs)\n", c.number, c.title.c_str(), e.what(),
                  secs);
      ++failures;
    }
    std::fflush(stdout);
  }
  return failures;
}
