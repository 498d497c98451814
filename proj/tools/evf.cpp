// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: dataset ingestion, augmentation, feature
// extraction, GAN training/generation, classifier training and the full
// cross-validated pipeline.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>

#include "evf/audio/resample.hpp"
#include "evf/audio/tensor_file.hpp"
#include "evf/audio/wav.hpp"
#include "evf/augment/balance.hpp"
#include "evf/gan/train.hpp"
#include "evf/harness/pipeline.hpp"
#include "evf/spectral/features.hpp"
#include "evf/spectral/specgan_transform.hpp"

namespace fs = std::filesystem;
using namespace evf;

namespace {

audio::Waveform load_16k(const std::string& path) {
  audio::Waveform w = audio::read_wav(path);
  if (w.sample_rate != 16000) w = audio::resample(w, 16000);
  return w;
}

audio::Waveform pad_to(audio::Waveform w, Eigen::Index n) {
  if (w.samples.size() < n) {
    Eigen::ArrayXd padded = Eigen::ArrayXd::Zero(n);
    padded.head(w.samples.size()) = w.samples;
    w.samples = padded;
  }
  return w;
}

int cmd_ingest(const std::string& in_dir, const std::string& out_csv) {
  audio::Catalog catalog = audio::ingest_emodb(in_dir);
  audio::write_catalog_csv(catalog, out_csv);
  std::cout << "ingested " << catalog.records.size() << " utterances ("
            << catalog.skipped << " skipped)\n";
  auto counts = catalog.class_counts();
  for (int c = 0; c < audio::kNumEmotions; ++c)
    std::cout << "  " << audio::kEmotionNames[c] << ": " << counts[c] << '\n';
  return 0;
}

int cmd_augment(const std::string& method, const std::string& in_csv, const std::string& out_dir,
                std::uint64_t seed, const std::string& checkpoints, const std::string& norm_path) {
  audio::Catalog catalog = audio::read_catalog_csv(in_csv);

  audio::Provenance prov;
  if (method == "time") prov = audio::Provenance::kTimeShift;
  else if (method == "pitch") prov = audio::Provenance::kPitchShift;
  else if (method == "wavegan") prov = audio::Provenance::kWavegan;
  else if (method == "specgan") prov = audio::Provenance::kSpecgan;
  else throw Error("unknown method: " + method);

  augment::BalancePlan plan = augment::plan_balance(catalog, prov, seed);
  fs::create_directories(out_dir);

  audio::Catalog out;
  if (prov == audio::Provenance::kTimeShift || prov == audio::Provenance::kPitchShift) {
    out = augment::run_traditional_augment(catalog, plan, out_dir);
  } else {
    // GAN items draw from per-class generator checkpoints.
    if (checkpoints.empty()) throw Error("GAN methods need --checkpoints");
    spectral::SpecganNorm norm;
    if (prov == audio::Provenance::kSpecgan) {
      if (norm_path.empty()) throw Error("specgan needs --norm");
      norm = spectral::load_specgan_norm(norm_path);
    }
    std::map<std::string, const audio::UtteranceRecord*> by_id;
    for (const auto& r : catalog.records) by_id[r.id] = &r;

    std::map<int, std::vector<const augment::PlanItem*>> items_by_class;
    for (const auto& item : plan.items)
      items_by_class[static_cast<int>(by_id.at(item.source_id)->label)].push_back(&item);

    out = catalog;
    for (const auto& [cls, items] : items_by_class) {
      const std::string ckpt =
          (fs::path(checkpoints) / ("gan_" + std::string(audio::kEmotionNames[cls]))).string();
      gan::GanPair pair = gan::load_gan_checkpoint(ckpt);
      std::vector<Tensor> samples =
          gan::generate_samples(pair, static_cast<Eigen::Index>(items.size()), seed + cls);
      for (std::size_t i = 0; i < items.size(); ++i) {
        audio::Waveform w;
        if (prov == audio::Provenance::kSpecgan) {
          spectral::RowMatD m(spectral::kSpecganFrames, spectral::kSpecganBins);
          for (Eigen::Index a = 0; a < m.rows(); ++a)
            for (Eigen::Index b = 0; b < m.cols(); ++b) m(a, b) = samples[i].at({a, b, 0});
          w = spectral::specgan_inverse(m, norm);
        } else {
          w = gan::slice_to_waveform(samples[i]);
        }
        const std::string path = (fs::path(out_dir) / (items[i]->output_id + ".wav")).string();
        audio::write_wav(w, path);
        const audio::UtteranceRecord* src = by_id.at(items[i]->source_id);
        out.records.push_back({items[i]->output_id, src->speaker, src->label, path, prov});
      }
    }
  }
  audio::write_catalog_csv(out, (fs::path(out_dir) / "catalog.csv").string());
  std::cout << "augmented catalog: " << out.records.size() << " records ("
            << plan.items.size() << " synthetic)\n";
  return 0;
}

int cmd_features(const std::string& in_csv, const std::string& out_dir, Eigen::Index frames) {
  audio::Catalog catalog = audio::read_catalog_csv(in_csv);
  spectral::Mel3dConfig cfg;
  cfg.fixed_frames = frames;
  fs::create_directories(out_dir);
  for (const auto& r : catalog.records) {
    audio::Waveform w = pad_to(load_16k(r.path), cfg.stft.window);
    Tensor t = spectral::melspec_3d(w, cfg);
    audio::tensor_write(t, (fs::path(out_dir) / (r.id + ".tensor")).string());
  }
  std::cout << "wrote " << catalog.records.size() << " feature tensors\n";
  return 0;
}

int cmd_specnorm(const std::string& in_csv, const std::string& out_path) {
  audio::Catalog catalog = audio::read_catalog_csv(in_csv);
  std::vector<audio::Waveform> corpus;
  for (const auto& r : catalog.records)
    if (r.provenance == audio::Provenance::kOriginal)
      corpus.push_back(pad_to(load_16k(r.path), spectral::kSpecganSliceLen));
  spectral::SpecganNorm norm = spectral::specgan_fit_norm(corpus);
  spectral::save_specgan_norm(norm, out_path);
  std::cout << "fit normalization over " << corpus.size() << " utterances\n";
  return 0;
}

int cmd_gan_train(const std::string& family, const std::string& cls, const std::string& in_csv,
                  const std::string& out_dir, const gan::GanTrainConfig& tcfg,
                  Eigen::Index model_size, Eigen::Index slices_count,
                  const std::string& norm_path) {
  audio::Catalog catalog = audio::read_catalog_csv(in_csv);
  audio::EmotionLabel label = audio::emotion_from_string(cls);

  std::vector<audio::Waveform> waves;
  for (const auto& r : catalog.records)
    if (r.label == label && r.provenance == audio::Provenance::kOriginal)
      waves.push_back(load_16k(r.path));
  if (waves.empty()) throw Error("no utterances for class " + cls);

  gan::GanSpec spec;
  spec.family = family == "wave" ? gan::GanFamily::kWavegan : gan::GanFamily::kSpecgan;
  spec.model_size = model_size;

  Rng build_rng(tcfg.seed ^ 0xabcdef);
  gan::GanPair pair = gan::build_gan(spec, build_rng);

  Rng slice_rng(tcfg.seed ^ 0x123457);
  std::vector<Tensor> slices;
  if (spec.family == gan::GanFamily::kWavegan) {
    slices = gan::make_wave_slices(waves, slices_count, 16384, slice_rng);
  } else {
    if (norm_path.empty()) throw Error("specgan needs --norm");
    spectral::SpecganNorm norm = spectral::load_specgan_norm(norm_path);
    for (Eigen::Index i = 0; i < slices_count; ++i) {
      const audio::Waveform& w = slice_rng.pick(waves);
      spectral::RowMatD m = spectral::specgan_forward(pad_to(w, spectral::kSpecganSliceLen), norm);
      Tensor t({spectral::kSpecganFrames, spectral::kSpecganBins, 1});
      for (Eigen::Index a = 0; a < m.rows(); ++a)
        for (Eigen::Index b = 0; b < m.cols(); ++b) t.at({a, b, 0}) = m(a, b);
      slices.push_back(std::move(t));
    }
  }

  gan::GanTrainResult result = gan::train_gan(pair, slices, tcfg);
  gan::save_gan_checkpoint(pair, tcfg, out_dir);
  std::cout << "trained " << tcfg.steps << " critic steps; last Wasserstein estimate "
            << (result.wasserstein.empty() ? 0.0 : result.wasserstein.back()) << '\n';
  return 0;
}

int cmd_gan_generate(const std::string& ckpt, Eigen::Index count, std::uint64_t seed,
                     const std::string& out_dir, const std::string& cls,
                     const std::string& norm_path) {
  gan::GanPair pair = gan::load_gan_checkpoint(ckpt);
  audio::EmotionLabel label = audio::emotion_from_string(cls);
  fs::create_directories(out_dir);

  spectral::SpecganNorm norm;
  const bool spectral_family = pair.spec.family == gan::GanFamily::kSpecgan;
  if (spectral_family) {
    if (norm_path.empty()) throw Error("specgan needs --norm");
    norm = spectral::load_specgan_norm(norm_path);
  }

  std::vector<Tensor> samples = gan::generate_samples(pair, count, seed);
  audio::Catalog catalog;
  const char* tag = spectral_family ? "sg" : "wg";
  for (Eigen::Index i = 0; i < count; ++i) {
    audio::Waveform w;
    if (spectral_family) {
      spectral::RowMatD m(spectral::kSpecganFrames, spectral::kSpecganBins);
      for (Eigen::Index a = 0; a < m.rows(); ++a)
        for (Eigen::Index b = 0; b < m.cols(); ++b) m(a, b) = samples[i].at({a, b, 0});
      w = spectral::specgan_inverse(m, norm);
    } else {
      w = gan::slice_to_waveform(samples[i]);
    }
    char name[64];
    std::snprintf(name, sizeof(name), "%s_%s%05lld", cls.c_str(), tag,
                  static_cast<long long>(i));
    const std::string path = (fs::path(out_dir) / (std::string(name) + ".wav")).string();
    audio::write_wav(w, path);
    catalog.records.push_back({name, "synthetic", label, path,
                               spectral_family ? audio::Provenance::kSpecgan
                                               : audio::Provenance::kWavegan});
  }
  audio::write_catalog_csv(catalog, (fs::path(out_dir) / "catalog.csv").string());
  std::cout << "generated " << count << " samples\n";
  return 0;
}

int cmd_train(const std::string& features_dir, const std::string& catalog_csv,
              const harness::FoldRunConfig& cfg, const std::string& out_dir) {
  audio::Catalog catalog = audio::read_catalog_csv(catalog_csv);

  std::map<std::string, Tensor> feats;
  for (const auto& r : catalog.records)
    feats.emplace(r.id,
                  audio::tensor_read((fs::path(features_dir) / (r.id + ".tensor")).string()));

  harness::FoldRunConfig run_cfg = cfg;
  fs::create_directories(out_dir);
  run_cfg.checkpoint_dir = out_dir;
  if (!feats.empty()) run_cfg.fixed_frames = feats.begin()->second.dim(0);

  harness::FeatureProvider provider = [&](const std::string& id, Rng*) {
    return feats.at(id);
  };
  harness::PipelineReport report = harness::run_folds(catalog, provider, run_cfg);
  report.case_title = "(pre-extracted features)";

  harness::PipelineConfig meta;
  meta.loss = cfg.loss;
  meta.seed = cfg.seed;
  harness::write_report_json(report, meta, (fs::path(out_dir) / "report.json").string());
  harness::write_report_text(report, (fs::path(out_dir) / "report.txt").string());
  std::cout << "mean accuracy " << 100.0 * report.agg.mean << "% +/- "
            << 100.0 * report.agg.stddev << "%\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"speech emotion pipeline: augmentation, features, GANs, classifier"};
  app.require_subcommand(1);

  // ingest
  std::string in, out;
  auto* ingest = app.add_subcommand("ingest", "scan a dataset directory into a catalog CSV");
  ingest->add_option("--in", in, "dataset directory")->required();
  ingest->add_option("--out", out, "output catalog CSV")->required();

  // augment
  std::string method, checkpoints, norm_path;
  std::uint64_t seed = 1;
  auto* aug = app.add_subcommand("augment", "balance classes with synthetic samples");
  aug->add_option("--method", method, "time|pitch|wavegan|specgan")->required();
  aug->add_option("--in", in, "catalog CSV")->required();
  aug->add_option("--out", out, "output directory")->required();
  aug->add_option("--seed", seed, "rng seed");
  aug->add_option("--checkpoints", checkpoints, "per-class GAN checkpoint root");
  aug->add_option("--norm", norm_path, "specgan normalization tensor");

  // features
  Eigen::Index frames = 300;
  auto* feat = app.add_subcommand("features", "extract fixed-length 3-channel log-mel tensors");
  feat->add_option("--in", in, "catalog CSV")->required();
  feat->add_option("--out", out, "output directory")->required();
  feat->add_option("--frames", frames, "fixed frame count");

  // specnorm
  auto* snorm = app.add_subcommand("specnorm", "fit per-bin spectrogram normalization");
  snorm->add_option("--in", in, "catalog CSV")->required();
  snorm->add_option("--out", out, "output tensor path")->required();

  // gan-train
  std::string family = "wave", cls;
  gan::GanTrainConfig tcfg;
  Eigen::Index model_size = 16, slices_count = 64;
  auto* gt = app.add_subcommand("gan-train", "train one per-class generator");
  gt->add_option("--family", family, "wave|spec");
  gt->add_option("--class", cls, "emotion label")->required();
  gt->add_option("--in", in, "catalog CSV")->required();
  gt->add_option("--out", out, "checkpoint directory")->required();
  gt->add_option("--steps", tcfg.steps, "critic steps");
  gt->add_option("--batch", tcfg.batch_size, "batch size");
  gt->add_option("--n-critic", tcfg.n_critic, "critic steps per generator step");
  gt->add_option("--lr", tcfg.lr, "Adam learning rate");
  gt->add_option("--seed", tcfg.seed, "rng seed");
  gt->add_option("--model-size", model_size, "channel multiplier D");
  gt->add_option("--slices", slices_count, "training slices to draw");
  gt->add_option("--norm", norm_path, "specgan normalization tensor");

  // gan-generate
  std::string ckpt;
  Eigen::Index count = 16;
  auto* gg = app.add_subcommand("gan-generate", "sample audio from a trained generator");
  gg->add_option("--checkpoint", ckpt, "checkpoint directory")->required();
  gg->add_option("--count", count, "samples to generate");
  gg->add_option("--seed", seed, "rng seed");
  gg->add_option("--out", out, "output directory")->required();
  gg->add_option("--class", cls, "emotion label for the catalog rows")->required();
  gg->add_option("--norm", norm_path, "specgan normalization tensor");

  // train
  harness::FoldRunConfig fcfg;
  std::string loss_name = "lf1", features_dir, catalog_csv;
  auto* tr = app.add_subcommand("train", "cross-validated classifier training");
  tr->add_option("--features", features_dir, "feature tensor directory")->required();
  tr->add_option("--catalog", catalog_csv, "catalog CSV")->required();
  tr->add_option("--loss", loss_name, "lf1|lf2|lf3|lf4");
  tr->add_option("--epsilon", fcfg.loss.epsilon, "center-loss balance factor");
  tr->add_option("--folds", fcfg.folds, "fold count");
  tr->add_option("--seed", fcfg.seed, "rng seed");
  tr->add_option("--epochs", fcfg.epochs, "epochs per fold");
  tr->add_option("--batch", fcfg.batch_size, "batch size");
  tr->add_option("--lr", fcfg.lr, "Adam learning rate");
  tr->add_option("--scale", fcfg.scale, "toy|full");
  tr->add_option("--out", out, "output directory")->required();

  // run
  std::string config_path;
  auto* run = app.add_subcommand("run", "full pipeline from a config file");
  run->add_option("--config", config_path, "key=value config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return cmd_ingest(in, out);
    if (*aug) return cmd_augment(method, in, out, seed, checkpoints, norm_path);
    if (*feat) return cmd_features(in, out, frames);
    if (*snorm) return cmd_specnorm(in, out);
    if (*gt) return cmd_gan_train(family, cls, in, out, tcfg, model_size, slices_count, norm_path);
    if (*gg) return cmd_gan_generate(ckpt, count, seed, out, cls, norm_path);
    if (*tr) {
      fcfg.loss.variant = adcrnn::loss_variant_from_string(loss_name);
      return cmd_train(features_dir, catalog_csv, fcfg, out);
    }
    if (*run) {
      harness::PipelineConfig cfg = harness::PipelineConfig::from_file(config_path);
      harness::PipelineReport report = harness::run_pipeline(cfg);
      std::cout << report.case_title << ": " << 100.0 * report.agg.mean << "% +/- "
                << 100.0 * report.agg.stddev << "%\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
