// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <complex>

#include "evf/spectral/features.hpp"
#include "evf/spectral/specgan_transform.hpp"
#include "tests/support/oracles.hpp"

using namespace evf;
using test::sine;

TEST_CASE("stft: framing formula on one second at 16 kHz") {
  spectral::Spectrogram s = spectral::stft(sine(440, 16000, 16000), spectral::StftConfig::features());
  CHECK(s.frames.rows() == 98);
  CHECK(s.frames.cols() == 257);
}

TEST_CASE("stft: DC input concentrates energy at bin 0") {
  audio::Waveform w;
  w.sample_rate = 16000;
  w.samples = Eigen::ArrayXd::Constant(4000, 0.5);
  spectral::Spectrogram s = spectral::stft(w, spectral::StftConfig::features());
  for (Eigen::Index t = 0; t < s.frames.rows(); ++t) {
    Eigen::Index best = 0;
    double total = 0.0;
    for (Eigen::Index k = 0; k < s.frames.cols(); ++k) {
      if (std::abs(s.frames(t, k)) > std::abs(s.frames(t, best))) best = k;
      total += std::norm(s.frames(t, k));
    }
    CHECK(best == 0);
    // The analysis window spreads a little energy into the first bins.
    CHECK(std::norm(s.frames(t, 0)) / total > 0.5);
  }
}

TEST_CASE("stft: 1 kHz sine peaks at bin 32, matching a direct DFT") {
  spectral::StftConfig cfg = spectral::StftConfig::features();
  audio::Waveform w = sine(1000, 16000, 8000);
  spectral::Spectrogram s = spectral::stft(w, cfg);
  for (Eigen::Index t = 0; t < s.frames.rows(); ++t) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < s.frames.cols(); ++k)
      if (std::abs(s.frames(t, k)) > std::abs(s.frames(t, best))) best = k;
    CHECK(best == 32);
  }

  // One frame against the naive DFT.
  Eigen::ArrayXd window = spectral::hann_window(cfg.window);
  std::vector<double> frame(static_cast<std::size_t>(cfg.fft_size), 0.0);
  for (Eigen::Index i = 0; i < cfg.window; ++i) frame[static_cast<std::size_t>(i)] = w.samples[i] * window[i];
  auto ref = test::naive_dft(frame);
  for (Eigen::Index k = 0; k < s.frames.cols(); ++k)
    CHECK(std::abs(s.frames(0, k) - ref[static_cast<std::size_t>(k)]) < 1e-8);
}

TEST_CASE("stft: linear in the input") {
  spectral::StftConfig cfg = spectral::StftConfig::features();
  audio::Waveform w = sine(700, 16000, 4000, 0.4);
  audio::Waveform w2 = w;
  w2.samples *= 2.5;
  spectral::Spectrogram a = spectral::stft(w, cfg), b = spectral::stft(w2, cfg);
  for (Eigen::Index t = 0; t < a.frames.rows(); ++t)
    for (Eigen::Index k = 0; k < a.frames.cols(); ++k)
      CHECK(std::abs(b.frames(t, k) - 2.5 * a.frames(t, k)) < 1e-10);
}

TEST_CASE("stft: frame-level Parseval identity") {
  spectral::StftConfig cfg = spectral::StftConfig::features();
  Rng rng(11);
  audio::Waveform w;
  w.sample_rate = 16000;
  w.samples.resize(2000);
  for (Eigen::Index i = 0; i < 2000; ++i) w.samples[i] = rng.uniform(-1.0, 1.0);

  spectral::Spectrogram s = spectral::stft(w, cfg);
  Eigen::ArrayXd window = spectral::hann_window(cfg.window);
  for (Eigen::Index t = 0; t < s.frames.rows(); ++t) {
    // Full-spectrum sum from the half spectrum (interior bins count twice).
    double freq_energy = std::norm(s.frames(t, 0)) + std::norm(s.frames(t, cfg.bins() - 1));
    for (Eigen::Index k = 1; k < cfg.bins() - 1; ++k) freq_energy += 2.0 * std::norm(s.frames(t, k));
    double time_energy = 0.0;
    for (Eigen::Index i = 0; i < cfg.window; ++i) {
      const double v = window[i] * w.samples[t * cfg.hop + i];
      time_energy += v * v;
    }
    CHECK(freq_energy == doctest::Approx(cfg.fft_size * time_energy).epsilon(1e-9));
  }
}

TEST_CASE("istft: inverts stft to 40 dB or better in the interior") {
  spectral::StftConfig cfg = spectral::StftConfig::features();
  Rng rng(5);
  audio::Waveform w;
  w.sample_rate = 16000;
  w.samples.resize(6400);
  for (Eigen::Index i = 0; i < w.samples.size(); ++i) w.samples[i] = rng.uniform(-0.9, 0.9);

  audio::Waveform back = spectral::istft(spectral::stft(w, cfg));
  REQUIRE(back.samples.size() >= 6000);
  const double snr = test::snr_db(w.samples, back.samples, cfg.window,
                                  back.samples.size() - cfg.window);
  CHECK(snr >= 40.0);
}

TEST_CASE("istft: zero spectrogram gives a zero waveform") {
  spectral::Spectrogram s;
  s.config = spectral::StftConfig::features();
  s.frames = spectral::CRowMat::Zero(10, s.config.bins());
  audio::Waveform w = spectral::istft(s);
  CHECK((w.samples == 0.0).all());
}

TEST_CASE("istft: single Hann-windowed sine frame reconstructs the segment") {
  spectral::StftConfig cfg{512, 256, 512, 16000};
  audio::Waveform w = sine(1000, 16000, 512);
  spectral::Spectrogram s = spectral::stft(w, cfg);
  REQUIRE(s.frames.rows() == 1);

  // Inverse-DFT oracle: the frame spectrum must invert to the windowed
  // segment.
  Eigen::ArrayXd window = spectral::hann_window(cfg.window);
  std::vector<double> frame(static_cast<std::size_t>(cfg.window));
  for (Eigen::Index i = 0; i < cfg.window; ++i) frame[static_cast<std::size_t>(i)] = w.samples[i] * window[i];
  auto spec = test::naive_dft(frame);
  for (Eigen::Index k = 0; k < cfg.bins(); ++k)
    CHECK(std::abs(s.frames(0, k) - spec[static_cast<std::size_t>(k)]) < 1e-8);

  // The least-squares inverse recovers the original samples wherever the
  // window has support.
  audio::Waveform back = spectral::istft(s);
  const double snr = test::snr_db(w.samples, back.samples, 64, 448);
  CHECK(snr >= 40.0);
}

TEST_CASE("istft: rejects window overlap with interior gaps") {
  spectral::Spectrogram s;
  s.config = {400, 300, 512, 16000};  // hop > window/2
  s.frames = spectral::CRowMat::Zero(4, s.config.bins());
  CHECK_THROWS(spectral::istft(s));
}

TEST_CASE("mel: filterbank geometry") {
  spectral::RowMatD fb = spectral::mel_filterbank();
  REQUIRE(fb.rows() == 40);
  REQUIRE(fb.cols() == 257);
  CHECK((fb.array() >= 0.0).all());
  for (Eigen::Index m = 0; m < 40; ++m) CHECK(fb.row(m).sum() > 0.0);

  Eigen::ArrayXd centers = spectral::filter_centers_hz();
  for (Eigen::Index m = 0; m + 1 < centers.size(); ++m) CHECK(centers[m] < centers[m + 1]);
  CHECK(centers[0] > 300.0);
  CHECK(centers[centers.size() - 1] < 8000.0);

  // First center sits one mel step above 300 Hz.
  const double step = (spectral::hz_to_mel(8000) - spectral::hz_to_mel(300)) / 41.0;
  const double expected = spectral::mel_to_hz(spectral::hz_to_mel(300) + step);
  CHECK(centers[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("mel: linear spacing switch spaces centers evenly in Hz") {
  Eigen::ArrayXd centers =
      spectral::filter_centers_hz(40, 300, 8000, spectral::FilterSpacing::kLinear);
  const double step = centers[1] - centers[0];
  for (Eigen::Index m = 0; m + 1 < centers.size(); ++m)
    CHECK(centers[m + 1] - centers[m] == doctest::Approx(step).epsilon(1e-9));
}

TEST_CASE("log-mel: silence floors at log(1e-10)") {
  audio::Waveform w;
  w.sample_rate = 16000;
  w.samples = Eigen::ArrayXd::Zero(4000);
  spectral::RowMatD s = spectral::log_mel_static(w);
  CHECK((s.array() == std::log(1e-10)).all());
}

TEST_CASE("log-mel: doubling the signal adds log 4 to energetic cells") {
  audio::Waveform w = sine(1000, 16000, 4000);
  audio::Waveform w2 = w;
  w2.samples *= 2.0;
  spectral::RowMatD a = spectral::log_mel_static(w), b = spectral::log_mel_static(w2);
  int checked = 0;
  for (Eigen::Index t = 0; t < a.rows(); ++t)
    for (Eigen::Index m = 0; m < a.cols(); ++m)
      if (a(t, m) > -10.0) {  // well above the floor
        CHECK(b(t, m) - a(t, m) == doctest::Approx(std::log(4.0)).epsilon(1e-6));
        ++checked;
      }
  CHECK(checked > 50);
}

TEST_CASE("log-mel: 1 kHz tone lands in the band containing 1 kHz") {
  audio::Waveform w = sine(1000, 16000, 4000);
  spectral::RowMatD s = spectral::log_mel_static(w);

  // Band whose triangle contains 1 kHz, from the filter geometry.
  Eigen::ArrayXd centers = spectral::filter_centers_hz();
  Eigen::Index expected = 0;
  double best = 1e9;
  for (Eigen::Index m = 0; m < centers.size(); ++m)
    if (std::abs(centers[m] - 1000.0) < best) {
      best = std::abs(centers[m] - 1000.0);
      expected = m;
    }
  for (Eigen::Index t = 0; t < s.rows(); ++t) {
    Eigen::Index arg = 0;
    for (Eigen::Index m = 1; m < s.cols(); ++m)
      if (s(t, m) > s(t, arg)) arg = m;
    CHECK(std::abs(arg - expected) <= 1);
  }
}

TEST_CASE("delta: constant, ramp and direct formula") {
  spectral::RowMatD c = spectral::RowMatD::Constant(10, 4, 3.25);
  CHECK((spectral::delta(c, 2).array() == 0.0).all());

  spectral::RowMatD ramp(12, 1);
  for (Eigen::Index t = 0; t < 12; ++t) ramp(t, 0) = 0.7 * static_cast<double>(t);
  spectral::RowMatD d = spectral::delta(ramp, 2);
  for (Eigen::Index t = 2; t < 10; ++t) CHECK(d(t, 0) == doctest::Approx(0.7).epsilon(1e-12));

  Rng rng(3);
  spectral::RowMatD x(6, 1);
  for (Eigen::Index t = 0; t < 6; ++t) x(t, 0) = rng.uniform(-1, 1);
  spectral::RowMatD got = spectral::delta(x, 2);
  auto clamp = [&](Eigen::Index t) { return std::clamp<Eigen::Index>(t, 0, 5); };
  for (Eigen::Index t = 0; t < 6; ++t) {
    const double expect = (1.0 * (x(clamp(t + 1), 0) - x(clamp(t - 1), 0)) +
                           2.0 * (x(clamp(t + 2), 0) - x(clamp(t - 2), 0))) /
                          (2.0 * (1.0 + 4.0));
    CHECK(got(t, 0) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("melspec_3d: fixed shape for any duration") {
  spectral::Mel3dConfig cfg;
  cfg.fixed_frames = 120;
  for (double secs : {0.2, 1.0, 3.0, 10.0}) {
    Tensor t = spectral::melspec_3d(sine(500, 16000, static_cast<Eigen::Index>(16000 * secs)), cfg);
    CHECK(t.shape() == Shape{120, 40, 3});
    CHECK(t.all_finite());
  }
}

TEST_CASE("melspec_3d: channel structure") {
  audio::Waveform w;
  w.sample_rate = 16000;
  w.samples = Eigen::ArrayXd::Zero(8000);  // constant static channel
  Tensor full = spectral::melspec_3d_full(w);
  const Eigen::Index t_total = full.dim(0);

  for (Eigen::Index t = 0; t < t_total; ++t)
    for (Eigen::Index b = 0; b < 40; ++b) CHECK(full.at({t, b, 1}) == 0.0);

  // Channel 2 equals delta of channel 1 on an arbitrary signal.
  audio::Waveform w2 = sine(800, 16000, 8000);
  Tensor f2 = spectral::melspec_3d_full(w2);
  spectral::RowMatD ch1(f2.dim(0), 40);
  for (Eigen::Index t = 0; t < f2.dim(0); ++t)
    for (Eigen::Index b = 0; b < 40; ++b) ch1(t, b) = f2.at({t, b, 1});
  spectral::RowMatD d = spectral::delta(ch1, 2);
  for (Eigen::Index t = 0; t < f2.dim(0); ++t)
    for (Eigen::Index b = 0; b < 40; ++b)
      CHECK(f2.at({t, b, 2}) == doctest::Approx(d(t, b)).epsilon(1e-12));
}

TEST_CASE("specgan: forward framing, range and mean-zeroing") {
  // Stationary 500 Hz tone: every analysis frame is identical, so the
  // corpus statistics make the normalized analysis rows exactly zero.
  audio::Waveform w = sine(500, 16000, spectral::kSpecganSliceLen);
  spectral::SpecganNorm norm = spectral::specgan_fit_norm({w});
  spectral::RowMatD out = spectral::specgan_forward(w, norm);

  CHECK(out.rows() == 128);
  CHECK(out.cols() == 128);
  CHECK((out.array() >= -1.0).all());
  CHECK((out.array() <= 1.0).all());
  // Identical frames leave only FFT roundoff scaled by the floored per-bin
  // std, so the normalized analysis rows vanish to within that noise.
  for (Eigen::Index t = 0; t < 127; ++t)
    for (Eigen::Index b = 0; b < 128; ++b) CHECK(std::abs(out(t, b)) < 1e-5);
}

TEST_CASE("specgan: inverse is deterministic and near-silent at the floor") {
  spectral::SpecganNorm norm;
  norm.mean = Eigen::ArrayXd::Constant(128, std::log(1e-3));
  norm.std = Eigen::ArrayXd::Constant(128, 2.0);

  spectral::RowMatD floor_in = spectral::RowMatD::Constant(128, 128, -1.0);
  audio::Waveform out = spectral::specgan_inverse(floor_in, norm);
  CHECK(out.samples.size() == spectral::kSpecganSliceLen);
  CHECK(std::sqrt(out.samples.square().mean()) < 1e-3);

  audio::Waveform again = spectral::specgan_inverse(floor_in, norm);
  CHECK((again.samples == out.samples).all());
}

TEST_CASE("specgan: tone round trip keeps the peak within one bin") {
  for (double freq : {500.0, 1500.0, 3000.0}) {
    audio::Waveform w = sine(freq, 16000, spectral::kSpecganSliceLen, 0.5);
    // Mild amplitude variety so per-bin deviations are nonzero.
    audio::Waveform w2 = w;
    w2.samples *= 0.5;
    audio::Waveform noise;
    noise.sample_rate = 16000;
    noise.samples.resize(spectral::kSpecganSliceLen);
    Rng rng(17);
    for (Eigen::Index i = 0; i < noise.samples.size(); ++i) noise.samples[i] = rng.uniform(-0.2, 0.2);

    spectral::SpecganNorm norm = spectral::specgan_fit_norm({w, w2, noise});
    audio::Waveform back = spectral::specgan_inverse(spectral::specgan_forward(w, norm), norm);

    const double bin_hz = 16000.0 / static_cast<double>(spectral::kSpecganSliceLen);
    CHECK(std::abs(test::fft_peak_hz(back) - freq) <=
          bin_hz * (1.0 + 16000.0 / 256.0 / bin_hz));  // one analysis bin
  }
}

TEST_CASE("griffin_lim: distance is non-increasing and sines reconstruct") {
  spectral::StftConfig cfg = spectral::StftConfig::specgan();

  SUBCASE("magnitude from a real signal") {
    audio::Waveform w = sine(750, 16000, 8000, 0.5);
    spectral::Spectrogram s = spectral::stft(w, cfg);
    spectral::MagSpectrogram target{s.magnitude(), cfg};
    std::vector<double> distances;
    spectral::griffin_lim(target, 16, &distances);
    REQUIRE(distances.size() == 17);
    for (std::size_t k = 0; k + 1 < distances.size(); ++k)
      CHECK(distances[k + 1] <= distances[k] + 1e-9);
    CHECK(distances.back() <= distances.front());
  }

  SUBCASE("zero magnitude gives zero audio") {
    spectral::MagSpectrogram target{spectral::RowMatD::Zero(20, cfg.bins()), cfg};
    audio::Waveform out = spectral::griffin_lim(target, 16);
    CHECK((out.samples == 0.0).all());
  }

  SUBCASE("pure-sine magnitude reconstructs the tone bin") {
    audio::Waveform w = sine(1000, 16000, 8000, 0.5);
    spectral::Spectrogram s = spectral::stft(w, cfg);
    spectral::MagSpectrogram target{s.magnitude(), cfg};
    audio::Waveform out = spectral::griffin_lim(target, 16);
    const double peak = test::fft_peak_hz(out);
    CHECK(std::abs(peak - 1000.0) <= 16000.0 / 256.0);  // one analysis bin
  }
}
