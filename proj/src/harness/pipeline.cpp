// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/harness/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "evf/adcrnn/trainer.hpp"
#include "evf/audio/resample.hpp"
#include "evf/audio/tensor_file.hpp"
#include "evf/audio/wav.hpp"
#include "evf/augment/balance.hpp"
#include "evf/gan/train.hpp"
#include "evf/nn/checkpoint.hpp"
#include "evf/spectral/features.hpp"
#include "evf/spectral/specgan_transform.hpp"

namespace evf::harness {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config: " + path);

  PipelineConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t'))
      line.pop_back();
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config line " + std::to_string(line_no) + ": expected key=value");
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);

    if (key == "dataset_dir") cfg.dataset_dir = value;
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "case") cfg.hda_case = value;
    else if (key == "loss") cfg.loss.variant = adcrnn::loss_variant_from_string(value);
    else if (key == "epsilon") cfg.loss.epsilon = std::stod(value);
    else if (key == "centers_by_backprop") cfg.loss.centers_by_backprop = value == "true";
    else if (key == "folds") cfg.folds = std::stoi(value);
    else if (key == "epochs") cfg.epochs = std::stoi(value);
    else if (key == "batch_size") cfg.batch_size = std::stol(value);
    else if (key == "lr") cfg.lr = std::stod(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "scale") cfg.scale = value;
    else if (key == "fixed_frames") cfg.fixed_frames = std::stol(value);
    else if (key == "gan_steps") cfg.gan_steps = std::stol(value);
    else if (key == "gan_batch") cfg.gan_batch = std::stol(value);
    else if (key == "gan_n_critic") cfg.gan_n_critic = std::stol(value);
    else if (key == "gan_model_size") cfg.gan_model_size = std::stol(value);
    else if (key == "gan_lr") cfg.gan_lr = std::stod(value);
    else if (key == "gan_slices_per_class") cfg.gan_slices_per_class = std::stol(value);
    else throw Error("config line " + std::to_string(line_no) + ": unknown key " + key);
  }
  return cfg;
}

void PipelineConfig::validate() const {
  if (dataset_dir.empty() || out_dir.empty()) throw Error("pipeline: dataset_dir and out_dir required");
  static const std::set<std::string> cases = {"none", "time_shift", "pitch_shift", "wavegan",
                                              "specgan"};
  if (!cases.count(hda_case)) throw Error("pipeline: unknown case " + hda_case);
  if (scale != "toy" && scale != "full") throw Error("pipeline: scale must be toy or full");
  if (folds < 2 || epochs < 1) throw Error("pipeline: folds >= 2 and epochs >= 1 required");
  loss.validate();
}

std::string PipelineConfig::case_title() const {
  if (hda_case == "none") return "Without using the HDA methods";
  if (hda_case == "time_shift") return "Using the time shifting";
  if (hda_case == "pitch_shift") return "Using the pitch shifting";
  if (hda_case == "wavegan") return "Using the WaveGAN";
  return "Using the SpecGAN";
}

namespace {

audio::Waveform load_16k(const std::string& path) {
  audio::Waveform w = audio::read_wav(path);
  if (w.sample_rate != 16000) w = audio::resample(w, 16000);
  return w;
}

audio::Provenance case_provenance(const std::string& hda_case) {
  if (hda_case == "time_shift") return audio::Provenance::kTimeShift;
  if (hda_case == "pitch_shift") return audio::Provenance::kPitchShift;
  if (hda_case == "wavegan") return audio::Provenance::kWavegan;
  if (hda_case == "specgan") return audio::Provenance::kSpecgan;
  throw Error("no provenance for case " + hda_case);
}

// Executes the GAN items of a balance plan: one generator per class,
// trained on that class's slices, then sampled to fill the plan.
audio::Catalog run_gan_augment(const audio::Catalog& catalog, const augment::BalancePlan& plan,
                               const PipelineConfig& cfg, const std::string& out_dir,
                               Rng& seeds) {
  const bool spectral_family = plan.method == audio::Provenance::kSpecgan;
  fs::create_directories(out_dir);

  std::map<std::string, const audio::UtteranceRecord*> by_id;
  for (const auto& r : catalog.records) by_id[r.id] = &r;

  // Plan items grouped by the class of their source.
  std::array<std::vector<const augment::PlanItem*>, audio::kNumEmotions> items_by_class;
  for (const auto& item : plan.items) {
    auto it = by_id.find(item.source_id);
    if (it == by_id.end()) throw Error("gan augment: unknown source " + item.source_id);
    items_by_class[static_cast<int>(it->second->label)].push_back(&item);
  }

  // One shared normalization for the spectral family.
  spectral::SpecganNorm norm;
  if (spectral_family) {
    std::vector<audio::Waveform> all;
    for (const auto& r : catalog.records)
      if (r.provenance == audio::Provenance::kOriginal) {
        audio::Waveform w = load_16k(r.path);
        if (w.samples.size() < spectral::kSpecganSliceLen) {
          Eigen::ArrayXd padded = Eigen::ArrayXd::Zero(spectral::kSpecganSliceLen);
          padded.head(w.samples.size()) = w.samples;
          w.samples = padded;
        }
        all.push_back(std::move(w));
      }
    norm = spectral::specgan_fit_norm(all);
    spectral::save_specgan_norm(norm, (fs::path(out_dir) / "specgan_norm.tensor").string());
  }

  audio::Catalog out = catalog;
  for (int c = 0; c < audio::kNumEmotions; ++c) {
    const auto& items = items_by_class[c];
    if (items.empty()) continue;

    std::vector<audio::Waveform> class_waves;
    for (const auto& r : catalog.records)
      if (r.provenance == audio::Provenance::kOriginal && static_cast<int>(r.label) == c)
        class_waves.push_back(load_16k(r.path));
    if (class_waves.empty()) throw Error("gan augment: class has no audio");

    gan::GanSpec spec;
    spec.family = spectral_family ? gan::GanFamily::kSpecgan : gan::GanFamily::kWavegan;
    spec.model_size = cfg.gan_model_size;

    gan::GanTrainConfig tcfg;
    tcfg.steps = cfg.gan_steps;
    tcfg.batch_size = cfg.gan_batch;
    tcfg.n_critic = cfg.gan_n_critic;
    tcfg.lr = cfg.gan_lr;
    tcfg.seed = seeds.next_u64();

    Rng build_rng(seeds.next_u64());
    gan::GanPair pair = gan::build_gan(spec, build_rng);

    std::vector<Tensor> slices;
    Rng slice_rng(seeds.next_u64());
    if (spectral_family) {
      for (Eigen::Index i = 0; i < cfg.gan_slices_per_class; ++i) {
        const audio::Waveform& w = slice_rng.pick(class_waves);
        audio::Waveform padded = w;
        if (padded.samples.size() < spectral::kSpecganSliceLen) {
          Eigen::ArrayXd p = Eigen::ArrayXd::Zero(spectral::kSpecganSliceLen);
          p.head(padded.samples.size()) = padded.samples;
          padded.samples = p;
        }
        spectral::RowMatD m = spectral::specgan_forward(padded, norm);
        Tensor t({spectral::kSpecganFrames, spectral::kSpecganBins, 1});
        for (Eigen::Index a = 0; a < m.rows(); ++a)
          for (Eigen::Index b = 0; b < m.cols(); ++b) t.at({a, b, 0}) = m(a, b);
        slices.push_back(std::move(t));
      }
    } else {
      slices = gan::make_wave_slices(class_waves, cfg.gan_slices_per_class, 16384, slice_rng);
    }

    gan::train_gan(pair, slices, tcfg);
    std::string ckpt_dir = (fs::path(out_dir) / ("gan_" + std::string(audio::kEmotionNames[c])))
                               .string();
    gan::save_gan_checkpoint(pair, tcfg, ckpt_dir);

    std::vector<Tensor> samples =
        gan::generate_samples(pair, static_cast<Eigen::Index>(items.size()), seeds.next_u64());
    for (std::size_t i = 0; i < items.size(); ++i) {
      audio::Waveform w;
      if (spectral_family) {
        spectral::RowMatD m(spectral::kSpecganFrames, spectral::kSpecganBins);
        for (Eigen::Index a = 0; a < m.rows(); ++a)
          for (Eigen::Index b = 0; b < m.cols(); ++b) m(a, b) = samples[i].at({a, b, 0});
        w = spectral::specgan_inverse(m, norm);
      } else {
        w = gan::slice_to_waveform(samples[i]);
      }
      std::string path = (fs::path(out_dir) / (items[i]->output_id + ".wav")).string();
      audio::write_wav(w, path);

      const audio::UtteranceRecord* src = by_id.at(items[i]->source_id);
      audio::UtteranceRecord rec;
      rec.id = items[i]->output_id;
      rec.speaker = src->speaker;
      rec.label = src->label;
      rec.path = path;
      rec.provenance = plan.method;
      out.records.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace

PipelineReport run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  Rng seeds(cfg.seed);
  seeds.next_u64();  // split seed, drawn again inside run_folds
  const std::uint64_t plan_seed = seeds.next_u64();

  // Stage 1: ingest.
  audio::Catalog catalog = audio::ingest_emodb(cfg.dataset_dir);
  if (catalog.records.empty()) throw Error("pipeline: no utterances ingested");
  audio::write_catalog_csv(catalog, (fs::path(cfg.out_dir) / "catalog_original.csv").string());

  // Stage 2: augmentation case (fold assignment happens in run_folds; the
  // plan binds every synthetic item to its source, which fixes its fold).
  audio::Catalog full_catalog = catalog;
  if (cfg.hda_case != "none") {
    augment::BalancePlan plan = augment::plan_balance(catalog, case_provenance(cfg.hda_case),
                                                      plan_seed);
    const std::string aug_dir = (fs::path(cfg.out_dir) / "augmented").string();
    if (plan.method == audio::Provenance::kTimeShift ||
        plan.method == audio::Provenance::kPitchShift)
      full_catalog = augment::run_traditional_augment(catalog, plan, aug_dir);
    else
      full_catalog = run_gan_augment(catalog, plan, cfg, aug_dir, seeds);
  }
  audio::write_catalog_csv(full_catalog, (fs::path(cfg.out_dir) / "catalog.csv").string());

  // Stage 3: features. Evaluation tensors are center-cropped and written to
  // disk; training keeps the full-length tensor for seeded random crops.
  spectral::Mel3dConfig mel_cfg;
  mel_cfg.fixed_frames = cfg.fixed_frames;
  const std::string feat_dir = (fs::path(cfg.out_dir) / "features").string();
  fs::create_directories(feat_dir);

  std::map<std::string, Tensor> full_features;
  for (const auto& r : full_catalog.records) {
    audio::Waveform w = load_16k(r.path);
    if (w.samples.size() < mel_cfg.stft.window) {
      Eigen::ArrayXd padded = Eigen::ArrayXd::Zero(mel_cfg.stft.window);
      padded.head(w.samples.size()) = w.samples;
      w.samples = padded;
    }
    Tensor full = spectral::melspec_3d_full(w, mel_cfg);
    audio::tensor_write(spectral::fit_frames(full, cfg.fixed_frames),
                        (fs::path(feat_dir) / (r.id + ".tensor")).string());
    full_features.emplace(r.id, std::move(full));
  }

  // Stage 4: per-fold training and evaluation.
  FoldRunConfig run_cfg;
  run_cfg.loss = cfg.loss;
  run_cfg.folds = cfg.folds;
  run_cfg.epochs = cfg.epochs;
  run_cfg.batch_size = cfg.batch_size;
  run_cfg.lr = cfg.lr;
  run_cfg.seed = cfg.seed;
  run_cfg.scale = cfg.scale;
  run_cfg.fixed_frames = cfg.fixed_frames;
  run_cfg.checkpoint_dir = (fs::path(cfg.out_dir) / "models").string();

  FeatureProvider provider = [&](const std::string& id, Rng* crop_rng) {
    return spectral::fit_frames(full_features.at(id), cfg.fixed_frames, crop_rng);
  };
  PipelineReport report = run_folds(full_catalog, provider, run_cfg);
  report.case_title = cfg.case_title();
  report.augmented_added =
      static_cast<int>(full_catalog.records.size() - catalog.records.size());

  write_report_json(report, cfg, (fs::path(cfg.out_dir) / "report.json").string());
  write_report_text(report, (fs::path(cfg.out_dir) / "report.txt").string());
  return report;
}

PipelineReport run_folds(const audio::Catalog& catalog, const FeatureProvider& features,
                         const FoldRunConfig& cfg) {
  Rng seeds(cfg.seed);
  const std::uint64_t split_seed = seeds.next_u64();
  seeds.next_u64();  // reserved (plan stage of the full pipeline)
  const std::uint64_t crop_seed = seeds.next_u64();
  const std::uint64_t fold_seed_base = seeds.next_u64();

  std::vector<FoldSplit> folds = split_kfold(catalog, cfg.folds, split_seed);

  std::map<std::string, int> label_of;
  std::map<std::string, std::string> source_of;
  for (const auto& r : catalog.records) {
    label_of[r.id] = static_cast<int>(r.label);
    if (r.provenance != audio::Provenance::kOriginal) {
      auto us = r.id.rfind('_');
      if (us == std::string::npos) throw Error("synthetic id without source: " + r.id);
      source_of[r.id] = r.id.substr(0, us);
    }
  }

  std::map<std::string, int> test_fold_of;
  for (const auto& f : folds)
    for (const auto& id : f.test_ids) test_fold_of[id] = f.fold;

  adcrnn::AdcrnnConfig model_cfg =
      cfg.scale == "toy" ? adcrnn::AdcrnnConfig::toy(audio::kNumEmotions, cfg.fixed_frames)
                         : adcrnn::AdcrnnConfig{};
  model_cfg.input_frames = cfg.fixed_frames;

  PipelineReport report;
  report.loss_name = adcrnn::to_string(cfg.loss.variant);
  report.pooled = ConfusionMatrix(audio::kNumEmotions);

  for (const auto& fold : folds) {
    Rng crop_rng(crop_seed ^ (0x9e37u + static_cast<std::uint64_t>(fold.fold)));

    adcrnn::FeatureSet train_set;
    auto add_train = [&](const std::string& id) {
      train_set.features.push_back(features(id, &crop_rng));
      train_set.labels.push_back(label_of.at(id));
    };
    for (const auto& id : fold.train_ids) add_train(id);
    for (const auto& [id, src] : source_of) {
      auto it = test_fold_of.find(src);
      if (it == test_fold_of.end()) throw Error("synthetic record with unknown source: " + id);
      if (it->second != fold.fold) add_train(id);
    }

    adcrnn::FeatureSet test_set;
    for (const auto& id : fold.test_ids) {
      test_set.features.push_back(features(id, nullptr));
      test_set.labels.push_back(label_of.at(id));
    }

    Rng model_rng(fold_seed_base + static_cast<std::uint64_t>(fold.fold) * 2 + 1);
    adcrnn::AdcrnnModel model(model_cfg, model_rng);
    adcrnn::TrainerConfig tcfg;
    tcfg.loss = cfg.loss;
    tcfg.epochs = cfg.epochs;
    tcfg.batch_size = cfg.batch_size;
    tcfg.lr = cfg.lr;
    tcfg.seed = fold_seed_base + static_cast<std::uint64_t>(fold.fold) * 2 + 2;
    adcrnn::TrainResult tr = adcrnn::train_adcrnn(model, train_set, tcfg);

    if (!cfg.checkpoint_dir.empty()) {
      json config;
      config["scale"] = cfg.scale;
      config["fixed_frames"] = cfg.fixed_frames;
      config["fold"] = fold.fold;
      config["loss"] = adcrnn::to_string(cfg.loss.variant);
      nn::ParameterList params = model.params();
      auto centroid_param = std::make_shared<nn::Parameter>("centroids", tr.centroids);
      params.push_back(centroid_param);
      nn::save_checkpoint(
          (fs::path(cfg.checkpoint_dir) / ("fold_" + std::to_string(fold.fold))).string(),
          "adcrnn", config.dump(), params, model.state());
    }

    std::vector<int> preds = adcrnn::predict_batch(model, test_set.features);
    ConfusionMatrix m = confusion(test_set.labels, preds, audio::kNumEmotions);
    report.fold_accuracies.push_back(m.accuracy());
    report.pooled += m;
    report.fold_matrices.push_back(std::move(m));
  }

  report.agg = aggregate(report.fold_accuracies);
  return report;
}

void write_report_json(const PipelineReport& report, const PipelineConfig& cfg,
                       const std::string& path) {
  json j;
  j["case"] = report.case_title;
  j["loss"] = report.loss_name;
  j["epsilon"] = cfg.loss.epsilon;
  j["seed"] = cfg.seed;
  j["folds"] = json::array();
  for (std::size_t f = 0; f < report.fold_matrices.size(); ++f) {
    json jf;
    jf["fold"] = f;
    const auto& m = report.fold_matrices[f];
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.counts.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < m.counts.cols(); ++c) row.push_back(m.counts(r, c));
      rows.push_back(row);
    }
    jf["confusion"] = rows;
    Eigen::ArrayXd pca = m.per_class_accuracy();
    json jp = json::array();
    for (Eigen::Index i = 0; i < pca.size(); ++i) jp.push_back(pca[i]);
    jf["per_class_accuracy"] = jp;
    jf["accuracy"] = report.fold_accuracies[f];
    j["folds"].push_back(jf);
  }
  json pooled = json::array();
  for (Eigen::Index r = 0; r < report.pooled.counts.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < report.pooled.counts.cols(); ++c)
      row.push_back(report.pooled.counts(r, c));
    pooled.push_back(row);
  }
  j["pooled_confusion"] = pooled;
  j["mean_accuracy"] = report.agg.mean;
  j["std_accuracy"] = report.agg.stddev;
  j["augmented_added"] = report.augmented_added;

  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot write report: " + path);
  os << j.dump(2) << '\n';
}

void write_report_text(const PipelineReport& report, const std::string& path) {
  std::ostringstream os;
  char buf[128];
  os << "Method                              Accuracy (%)\n";
  os << "----------------------------------  --------------\n";
  std::snprintf(buf, sizeof(buf), "%-34s  %.2f +/- %.2f\n", report.case_title.c_str(),
                100.0 * report.agg.mean, 100.0 * report.agg.stddev);
  os << buf;
  os << "\nLoss variant: " << report.loss_name << '\n';

  os << "\nPer-fold accuracy (%):\n";
  for (std::size_t f = 0; f < report.fold_accuracies.size(); ++f) {
    std::snprintf(buf, sizeof(buf), "  fold %zu: %.2f\n", f, 100.0 * report.fold_accuracies[f]);
    os << buf;
  }

  os << "\nPooled confusion matrix (rows = truth, columns = predicted):\n      ";
  for (int c = 0; c < audio::kNumEmotions; ++c) {
    std::snprintf(buf, sizeof(buf), "%6s", audio::kEmotionShortNames[c]);
    os << buf;
  }
  os << '\n';
  for (int r = 0; r < audio::kNumEmotions; ++r) {
    std::snprintf(buf, sizeof(buf), "%6s", audio::kEmotionShortNames[r]);
    os << buf;
    for (int c = 0; c < audio::kNumEmotions; ++c) {
      std::snprintf(buf, sizeof(buf), "%6d", report.pooled.counts(r, c));
      os << buf;
    }
    os << '\n';
  }

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write report: " + path);
  out << os.str();
}

}  // namespace evf::harness
