// Copyright 2026 The surfcloth Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "surfcloth/harness/train.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

#include "surfcloth/geom/kernels.hpp"
#include "surfcloth/net/checkpoint.hpp"
#include "surfcloth/random.hpp"

namespace surfcloth::harness {

using nlohmann::json;

void TrainConfig::validate() const {
  if (epochs < 1) throw Error("epochs must be positive");
  if (batch_size < 1) throw Error("batch size must be positive");
  if (!(adam.learning_rate >= 0.0)) throw Error("learning rate must be non-negative");
  if (points_per_step < 1 || scan_budget < 1) throw Error("point budgets must be positive");
  if (validation_scans < 1 || validation_points < 1) throw Error("validation sizes must be positive");
  if (model_preset != "desk" && model_preset != "full") {
    throw Error("model preset must be 'desk' or 'full', got '" + model_preset + "'");
  }
  weights.validate();
}

model::ModelConfig TrainConfig::model_config() const {
  model::ModelConfig c = model_preset == "full" ? model::ModelConfig{} : model::ModelConfig::desk();
  if (model_overrides) {
    json merged = c.to_json();
    merged.merge_patch(*model_overrides);
    c = model::ModelConfig::from_json(merged);
  }
  c.etd = !ablations.no_etd;
  c.uv_features = ablations.no_csf_uv_baseline;
  c.garment_to_pose_decoder = !ablations.no_garment_to_pose_decoder;
  c.seed = seed;
  return c;
}

loss::LossWeights TrainConfig::effective_weights() const {
  loss::LossWeights w = weights;
  // without the split there is no separate wrinkle term to penalize
  if (ablations.no_etd) w.lambda_pd = 0.0;
  w.template_data_term = ablations.template_data_term && !ablations.no_etd;
  return w;
}

json TrainConfig::to_json() const {
  json j = {{"epochs", epochs},
            {"batch_size", batch_size},
            {"learning_rate", adam.learning_rate},
            {"beta1", adam.beta1},
            {"beta2", adam.beta2},
            {"epsilon", adam.epsilon},
            {"weights", weights.to_json()},
            {"points_per_step", points_per_step},
            {"scan_budget", scan_budget},
            {"seed", seed},
            {"ablations",
             {{"no_etd", ablations.no_etd},
              {"no_csf_uv_baseline", ablations.no_csf_uv_baseline},
              {"no_garment_to_pose_decoder", ablations.no_garment_to_pose_decoder},
              {"template_data_term", ablations.template_data_term}}},
            {"model_preset", model_preset},
            {"validation_scans", validation_scans},
            {"validation_points", validation_points},
            {"max_train_scans", max_train_scans}};
  if (model_overrides) j["model"] = *model_overrides;
  return j;
}

TrainConfig TrainConfig::from_json(const json& j) {
  TrainConfig c;
  try {
    auto get = [&j](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("epochs", c.epochs);
    get("batch_size", c.batch_size);
    get("learning_rate", c.adam.learning_rate);
    get("beta1", c.adam.beta1);
    get("beta2", c.adam.beta2);
    get("epsilon", c.adam.epsilon);
    if (j.contains("weights")) c.weights = loss::LossWeights::from_json(j.at("weights"));
    get("points_per_step", c.points_per_step);
    get("scan_budget", c.scan_budget);
    get("seed", c.seed);
    if (j.contains("ablations")) {
      const json& a = j.at("ablations");
      c.ablations.no_etd = a.value("no_etd", false);
      c.ablations.no_csf_uv_baseline = a.value("no_csf_uv_baseline", false);
      c.ablations.no_garment_to_pose_decoder = a.value("no_garment_to_pose_decoder", false);
      c.ablations.template_data_term = a.value("template_data_term", false);
    }
    get("model_preset", c.model_preset);
    if (j.contains("model")) c.model_overrides = j.at("model");
    get("validation_scans", c.validation_scans);
    get("validation_points", c.validation_points);
    get("max_train_scans", c.max_train_scans);
  } catch (const json::exception& e) {
    throw Error(std::string("bad train config: ") + e.what());
  }
  c.validate();
  return c;
}

void save_model(const std::filesystem::path& path, const model::DeformationModel& model,
                const json& body_source, const json& extra) {
  json meta = {{"model", model.config().to_json()}, {"body", body_source}, {"outfits", model.outfits()}};
  if (!extra.is_null()) meta["extra"] = extra;
  net::save_checkpoint(path, model.params(), meta);
}

model::DeformationModel load_model(const std::filesystem::path& path, json* metadata) {
  net::Checkpoint ck = net::load_checkpoint(path);
  const json& meta = ck.metadata;
  if (!meta.contains("model") || !meta.contains("body")) {
    throw Error(path.string() + ": checkpoint lacks model metadata");
  }
  model::DeformationModel m(synth::load_body(meta.at("body"), path.parent_path()),
                            model::ModelConfig::from_json(meta.at("model")));
  for (const auto& o : meta.value("outfits", json::array())) m.add_outfit(o.get<std::string>());
  net::assign_parameters(m.params(), ck.params);
  if (metadata) *metadata = meta;
  return m;
}

namespace {

json absolute_body_source(json source, const std::filesystem::path& root) {
  if (source.value("kind", "") == "rigged") {
    for (const char* key : {"mesh", "skinning"}) {
      const std::filesystem::path p(source.at(key).get<std::string>());
      if (!p.is_absolute()) source[key] = std::filesystem::absolute(root / p).string();
    }
  }
  return source;
}

struct TrainScan {
  synth::DatasetEntry entry;
  body::PosedBody posed;
  std::unique_ptr<KdTree> tree;
  std::vector<Vec3> normals;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

TrainResult train(const synth::Manifest& manifest, const TrainConfig& config,
                  const std::filesystem::path& out_dir, std::ostream* progress) {
  config.validate();
  model::DeformationModel m(synth::load_body(manifest.body, manifest.root), config.model_config());
  return train(std::move(m), manifest, config, out_dir, progress);
}

TrainResult train(model::DeformationModel model, const synth::Manifest& manifest,
                  const TrainConfig& config, const std::filesystem::path& out_dir, std::ostream* progress) {
  config.validate();
  const loss::LossWeights weights = config.effective_weights();
  std::filesystem::create_directories(out_dir);
  const json body_source = absolute_body_source(manifest.body, manifest.root);

  std::vector<synth::DatasetEntry> entries = manifest.split("train");
  if (config.max_train_scans > 0 && static_cast<int>(entries.size()) > config.max_train_scans) {
    entries.resize(config.max_train_scans);
  }
  if (entries.empty()) throw Error("dataset has no training scans");

  TrainResult result{std::move(model), {}, 0.0, 0.0, out_dir / "model.sclk"};
  model::DeformationModel& mdl = result.model;

  std::vector<TrainScan> scans;
  scans.reserve(entries.size());
  for (const auto& e : entries) {
    mdl.add_outfit(e.outfit);
    synth::ScanCloud sc = synth::load_scan(manifest, e);
    if (!sc.cloud.has_normals()) throw Error("scan " + e.ply + " has no normals");
    std::vector<Vec3> pos = std::move(sc.cloud.positions);
    std::vector<Vec3> nrm = std::move(sc.cloud.normals);
    if (static_cast<int>(pos.size()) > config.scan_budget) {
      std::vector<int> idx(pos.size());
      std::iota(idx.begin(), idx.end(), 0);
      Rng rng(mix_seed(config.seed, fnv1a(e.ply)));
      shuffle(idx.begin(), idx.end(), rng);
      idx.resize(config.scan_budget);
      std::sort(idx.begin(), idx.end());
      std::vector<Vec3> p2, n2;
      for (int i : idx) {
        p2.push_back(pos[i]);
        n2.push_back(nrm[i]);
      }
      pos = std::move(p2);
      nrm = std::move(n2);
    }
    TrainScan ts;
    ts.entry = e;
    ts.posed = body::lbs_pose(mdl.body(), manifest.poses.at(e.pose_index));
    ts.tree = std::make_unique<KdTree>(std::move(pos));
    ts.normals = std::move(nrm);
    scans.push_back(std::move(ts));
  }

  const model::PointSet val_points =
      mdl.sample_points(config.validation_points, mix_seed(config.seed, fnv1a("validation")));
  const int n_val = std::min<int>(config.validation_scans, static_cast<int>(scans.size()));
  std::vector<model::FrameSet> val_frames;
  for (int i = 0; i < n_val; ++i) val_frames.push_back(mdl.frames(scans[i].posed, val_points));
  auto validation_chamfer = [&]() {
    double sum = 0.0;
    for (int i = 0; i < n_val; ++i) {
      net::Tape tape(mdl.params());
      const auto d = mdl.decode(tape, mdl.garment_features(tape, scans[i].entry.outfit),
                                  mdl.pose_features(tape, scans[i].posed), val_points, val_frames[i]);
      sum += tape.scalar(tape.chamfer(d.x_world, *scans[i].tree));
    }
    return sum / n_val;
  };

  std::ofstream csv(out_dir / "loss.csv");
  if (!csv) throw Error("cannot write " + (out_dir / "loss.csv").string());
  csv << "epoch,loss,chamfer,normal,rgl_total,rgl_pose,rgl_code,template_chamfer,val_chamfer\n";

  result.initial_val_chamfer = validation_chamfer();
  if (progress) *progress << "initial validation chamfer " << result.initial_val_chamfer << '\n';

  net::Adam adam(config.adam);
  const int n = static_cast<int>(scans.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(epoch) + 1));
    shuffle(order.begin(), order.end(), rng);

    loss::LossReport sum;
    for (int start = 0, step = 0; start < n; start += config.batch_size, ++step) {
      const int stop = std::min(n, start + config.batch_size);
      const double inv = 1.0 / static_cast<double>(stop - start);
      mdl.params().zero_grad();
      net::Tape tape(mdl.params());
      std::map<std::string, net::Var> garment;
      std::vector<std::pair<double, net::Var>> terms;
      std::vector<loss::LossReport> reports;
      for (int b = start; b < stop; ++b) {
        const TrainScan& s = scans[order[b]];
        const std::string& outfit = s.entry.outfit;
        if (!garment.count(outfit)) garment[outfit] = mdl.garment_features(tape, outfit);
        const std::uint64_t point_seed =
            mix_seed(mix_seed(config.seed, static_cast<std::uint64_t>(epoch)), static_cast<std::uint64_t>(b));
        const model::PointSet ps = mdl.sample_points(config.points_per_step, point_seed);
        const model::FrameSet fs = mdl.frames(s.posed, ps);
        const auto d = mdl.decode(tape, garment[outfit], mdl.pose_features(tape, s.posed), ps, fs,
                                  weights.template_data_term);
        const auto obj = loss::build_objective(tape, d, tape.param(mdl.code_name(outfit)), *s.tree,
                                               s.normals, weights, epoch, config.epochs);
        terms.emplace_back(inv, obj.loss);
        reports.push_back(obj.report);
      }
      const net::Var batch_loss = tape.weighted_sum(terms);
      if (!std::isfinite(tape.scalar(batch_loss))) {
        json diag = {{"epoch", epoch}, {"step", step}, {"loss", fmt(tape.scalar(batch_loss))}};
        json items = json::array();
        for (int b = start; b < stop; ++b) {
          const auto& r = reports[b - start];
          items.push_back({{"scan", scans[order[b]].entry.ply},
                           {"chamfer", fmt(r.chamfer)},
                           {"normal", fmt(r.normal)},
                           {"rgl_total", fmt(r.rgl_total)},
                           {"rgl_pose", fmt(r.rgl_pose)},
                           {"rgl_code", fmt(r.rgl_code)}});
        }
        diag["batch"] = items;
        save_model(out_dir / "nan_snapshot.sclk", mdl, body_source, diag);
        std::ofstream(out_dir / "nan_snapshot.json") << diag.dump(2) << '\n';
        throw TrainingDiverged("non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                               std::to_string(step) + "; snapshot in " + out_dir.string());
      }
      tape.backward(batch_loss, mdl.params());
      adam.step(mdl.params());
      for (const auto& r : reports) {
        sum.total += r.total;
        sum.chamfer += r.chamfer;
        sum.normal += r.normal;
        sum.rgl_total += r.rgl_total;
        sum.rgl_pose += r.rgl_pose;
        sum.rgl_code += r.rgl_code;
        sum.template_chamfer += r.template_chamfer;
      }
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean = sum;
    for (double* v : {&rec.mean.total, &rec.mean.chamfer, &rec.mean.normal, &rec.mean.rgl_total,
                      &rec.mean.rgl_pose, &rec.mean.rgl_code, &rec.mean.template_chamfer}) {
      *v /= n;
    }
    rec.val_chamfer = validation_chamfer();
    result.log.push_back(rec);
    csv << epoch << ',' << fmt(rec.mean.total) << ',' << fmt(rec.mean.chamfer) << ','
        << fmt(rec.mean.normal) << ',' << fmt(rec.mean.rgl_total) << ',' << fmt(rec.mean.rgl_pose) << ','
        << fmt(rec.mean.rgl_code) << ',' << fmt(rec.mean.template_chamfer) << ','
        << fmt(rec.val_chamfer) << '\n';
    csv.flush();
    if (progress) {
      *progress << "epoch " << epoch << " loss " << rec.mean.total << " chamfer " << rec.mean.chamfer
                << " val " << rec.val_chamfer << '\n';
    }
  }
  result.final_val_chamfer = result.log.back().val_chamfer;

  save_model(result.checkpoint, mdl, body_source, json{{"train", config.to_json()}});
  const json summary = {{"initial_val_chamfer", result.initial_val_chamfer},
                        {"final_val_chamfer", result.final_val_chamfer},
                        {"val_reduction", 1.0 - result.final_val_chamfer / result.initial_val_chamfer},
                        {"epochs", config.epochs},
                        {"train_scans", n},
                        {"parameters", mdl.params().parameter_count()}};
  std::ofstream(out_dir / "train_summary.json") << summary.dump(2) << '\n';
  return result;
}

}  // namespace surfcloth::harness
