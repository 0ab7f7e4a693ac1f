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

// surfcloth command line: dataset generation, training, evaluation and export.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "surfcloth/body/humanoid.hpp"
#include "surfcloth/body/rig_io.hpp"
#include "surfcloth/geom/io.hpp"
#include "surfcloth/harness/evaluate.hpp"
#include "surfcloth/harness/train.hpp"
#include "surfcloth/synth/synthdata.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace surfcloth;

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error("cannot write " + path.string());
}

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::string config;
  CLI::Option* seed_opt = nullptr;

  [[nodiscard]] json config_json() const { return config.empty() ? json::object() : read_json(config); }
};

synth::OutfitSpec outfit_from(const json& j) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "jacket") return synth::OutfitSpec::loose_jacket();
    if (name == "skirt") return synth::OutfitSpec::skirt();
    throw Error("unknown outfit preset '" + name + "' (jacket, skirt)");
  }
  return synth::OutfitSpec::from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point-based clothed-body deformation: data, training and evaluation"};
  app.require_subcommand(1);
  Globals g;
  g.seed_opt = app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();
  app.add_option("--config", g.config, "JSON config file; command-line flags take precedence");

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic scan dataset");
  std::vector<std::string> outfit_names;
  int pose_count = 100;
  double train_fraction = 0.8;
  int points_per_scan = 4096;
  body::HumanoidConfig hcfg;
  std::string mesh_file, skin_file;
  auto* o_outfits = gen->add_option("--outfits", outfit_names, "outfit presets (jacket, skirt)")->delimiter(',');
  auto* o_poses = gen->add_option("--poses", pose_count, "number of poses")->capture_default_str();
  auto* o_frac = gen->add_option("--train-fraction", train_fraction)->capture_default_str();
  auto* o_pts = gen->add_option("--points", points_per_scan, "points per scan")->capture_default_str();
  gen->add_option("--subdivisions", hcfg.subdivisions)->capture_default_str();
  gen->add_option("--rings", hcfg.rings_per_segment, "rings per limb segment")->capture_default_str();
  gen->add_option("--mesh", mesh_file, "rigged OBJ mesh instead of the built-in humanoid");
  gen->add_option("--skinning", skin_file, "skeleton/skinning JSON for --mesh");

  // train
  auto* tr = app.add_subcommand("train", "train a model on a dataset");
  std::string data;
  harness::TrainConfig tc_cli;
  tr->add_option("--data", data, "dataset manifest.json")->required();
  auto* t_epochs = tr->add_option("--epochs", tc_cli.epochs)->capture_default_str();
  auto* t_batch = tr->add_option("--batch-size", tc_cli.batch_size)->capture_default_str();
  auto* t_lr = tr->add_option("--lr", tc_cli.adam.learning_rate)->capture_default_str();
  auto* t_pts = tr->add_option("--points-per-step", tc_cli.points_per_step)->capture_default_str();
  auto* t_budget = tr->add_option("--scan-budget", tc_cli.scan_budget)->capture_default_str();
  auto* t_preset = tr->add_option("--preset", tc_cli.model_preset, "desk or full")->capture_default_str();
  auto* t_noetd = tr->add_flag("--no-etd", tc_cli.ablations.no_etd, "single displacement head");
  auto* t_uv = tr->add_flag("--uv-baseline", tc_cli.ablations.no_csf_uv_baseline, "features through a UV grid");
  auto* t_g2p = tr->add_flag("--no-garment-to-pose-decoder", tc_cli.ablations.no_garment_to_pose_decoder);
  auto* t_tmpl = tr->add_flag("--template-data-term", tc_cli.ablations.template_data_term);

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a dataset split");
  std::string checkpoint, split = "test";
  int eval_points = 8192;
  ev->add_option("--checkpoint", checkpoint)->required();
  ev->add_option("--data", data, "dataset manifest.json")->required();
  ev->add_option("--split", split)->capture_default_str();
  ev->add_option("--points", eval_points)->capture_default_str();

  // animate
  auto* an = app.add_subcommand("animate", "emit one point cloud per pose");
  std::string poses_file, outfit;
  int anim_points = 8192;
  an->add_option("--checkpoint", checkpoint)->required();
  an->add_option("--poses", poses_file, "pose sequence JSON")->required();
  an->add_option("--outfit", outfit)->required();
  an->add_option("--points", anim_points)->capture_default_str();

  // export-template
  auto* ex = app.add_subcommand("export-template", "write the pose-invariant garment template");
  int tmpl_points = 8192;
  bool with_body = false;
  ex->add_option("--checkpoint", checkpoint)->required();
  ex->add_option("--outfit", outfit)->required();
  ex->add_option("--points", tmpl_points)->capture_default_str();
  ex->add_flag("--body-mesh", with_body, "also write the template body as OBJ");

  // seam-study
  auto* ss = app.add_subcommand("seam-study", "compare surface and UV interpolation across edges");
  int resolution = 64, samples = 1000;
  ss->add_option("--resolution", resolution, "UV grid size")->capture_default_str();
  ss->add_option("--samples", samples, "edge points")->capture_default_str();
  ss->add_option("--subdivisions", hcfg.subdivisions)->capture_default_str();
  ss->add_option("--rings", hcfg.rings_per_segment)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path out(g.out_dir);
    fs::create_directories(out);
    const json cfg = g.config_json();

    if (*gen) {
      json body_source = cfg.value("body", synth::humanoid_source(hcfg));
      if (!mesh_file.empty()) {
        if (skin_file.empty()) throw Error("--mesh needs --skinning");
        body_source = {{"kind", "rigged"},
                       {"mesh", fs::absolute(mesh_file).string()},
                       {"skinning", fs::absolute(skin_file).string()}};
      }
      const TemplateBody body = synth::load_body(body_source);
      std::vector<synth::OutfitSpec> specs;
      if (o_outfits->count() > 0) {
        for (const auto& n : outfit_names) specs.push_back(outfit_from(n));
      } else if (cfg.contains("outfits")) {
        for (const auto& o : cfg.at("outfits")) specs.push_back(outfit_from(o));
      } else {
        specs.push_back(synth::OutfitSpec::loose_jacket());
      }
      synth::DatasetConfig dc;
      dc.pose_count = o_poses->count() ? pose_count : cfg.value("pose_count", pose_count);
      dc.train_fraction = o_frac->count() ? train_fraction : cfg.value("train_fraction", train_fraction);
      dc.points_per_scan = o_pts->count() ? points_per_scan : cfg.value("points_per_scan", points_per_scan);
      dc.seed = g.seed_opt->count() ? g.seed : cfg.value("seed", g.seed);
      const auto m = synth::generate_dataset(body, body_source, specs, dc, out);
      std::cout << "wrote " << m.entries.size() << " scans (" << m.split("train").size() << " train, "
                << m.split("test").size() << " test) to " << (out / "manifest.json").string() << '\n';
    } else if (*tr) {
      harness::TrainConfig tc = harness::TrainConfig::from_json(cfg);
      if (t_epochs->count()) tc.epochs = tc_cli.epochs;
      if (t_batch->count()) tc.batch_size = tc_cli.batch_size;
      if (t_lr->count()) tc.adam.learning_rate = tc_cli.adam.learning_rate;
      if (t_pts->count()) tc.points_per_step = tc_cli.points_per_step;
      if (t_budget->count()) tc.scan_budget = tc_cli.scan_budget;
      if (t_preset->count()) tc.model_preset = tc_cli.model_preset;
      if (t_noetd->count()) tc.ablations.no_etd = true;
      if (t_uv->count()) tc.ablations.no_csf_uv_baseline = true;
      if (t_g2p->count()) tc.ablations.no_garment_to_pose_decoder = true;
      if (t_tmpl->count()) tc.ablations.template_data_term = true;
      if (g.seed_opt->count()) tc.seed = g.seed;
      tc.validate();
      write_json(out / "train_config.json", tc.to_json());
      const auto manifest = synth::read_manifest(data);
      const auto result = harness::train(manifest, tc, out, &std::cout);
      std::cout << "validation chamfer " << result.initial_val_chamfer << " -> " << result.final_val_chamfer
                << "; checkpoint " << result.checkpoint.string() << '\n';
    } else if (*ev) {
      const auto model = harness::load_model(checkpoint);
      const auto manifest = synth::read_manifest(data);
      const auto report = harness::evaluate(model, manifest, split, eval_points, g.seed);
      write_json(out / "eval_report.json", report.to_json());
      std::cout << "chamfer (1e-4 m^2) mean " << report.chamfer_mean << " max " << report.chamfer_max
                << "; normal (1e-1) mean " << report.normal_mean << " max " << report.normal_max << '\n';
    } else if (*an) {
      const auto model = harness::load_model(checkpoint);
      const auto poses = body::read_pose_sequence(poses_file);
      const auto clouds = model.animate(poses, outfit, anim_points, g.seed);
      for (std::size_t f = 0; f < clouds.size(); ++f) {
        char name[64];
        std::snprintf(name, sizeof name, "frame_%04zu.ply", f);
        harness::export_cloud(clouds[f], out / name);
      }
      std::cout << "wrote " << clouds.size() << " frames to " << out.string() << '\n';
    } else if (*ex) {
      const auto model = harness::load_model(checkpoint);
      const fs::path path = out / ("template_" + outfit + ".ply");
      harness::export_template(model, outfit, path, tmpl_points, g.seed);
      if (with_body) {
        harness::export_mesh({model.body().vertices, model.body().faces, model.body().normals},
                             out / "body.obj");
      }
      std::cout << "wrote " << path.string() << '\n';
    } else if (*ss) {
      const TemplateBody body = body::build_humanoid(hcfg);
      Matrix field(body.vertex_count(), 3);
      for (int v = 0; v < body.vertex_count(); ++v) field.row(v) = body.vertices[v].transpose();
      const auto study = harness::seam_study(body, field, resolution, samples, g.seed);
      write_json(out / "seam_study.json", study.to_json());
      std::cout << "surface max jump " << study.surface_max_jump << "; uv seam jump mean "
                << study.uv_seam_mean_jump << " max " << study.uv_seam_max_jump << " over "
                << study.seam_samples << " seam samples\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
