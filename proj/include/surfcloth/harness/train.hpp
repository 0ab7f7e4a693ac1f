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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "surfcloth/loss/loss.hpp"
#include "surfcloth/model/model.hpp"
#include "surfcloth/net/adam.hpp"
#include "surfcloth/synth/synthdata.hpp"

namespace surfcloth::harness {

struct Ablations {
  bool no_etd = false;
  bool no_csf_uv_baseline = false;  // features through the seamed UV grid
  bool no_garment_to_pose_decoder = false;
  bool template_data_term = false;
};

struct TrainConfig {
  int epochs = 60;  // 400 for full-length runs
  int batch_size = 4;
  net::AdamConfig adam;  // learning rate 3e-4
  loss::LossWeights weights;
  int points_per_step = 1024;  // surface points decoded per scan and step
  int scan_budget = 4096;      // scan points used per step
  std::uint64_t seed = 0;
  Ablations ablations;
  std::string model_preset = "desk";  // "desk" or "full"
  std::optional<nlohmann::json> model_overrides;  // merged into the preset's ModelConfig
  int validation_scans = 4;
  int validation_points = 1024;
  int max_train_scans = 0;  // 0: all

  void validate() const;
  [[nodiscard]] model::ModelConfig model_config() const;
  [[nodiscard]] loss::LossWeights effective_weights() const;
  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] static TrainConfig from_json(const nlohmann::json& j);
};

struct EpochRecord {
  int epoch = 0;
  loss::LossReport mean;  // averaged over the epoch's scans
  double val_chamfer = 0.0;
};

struct TrainResult {
  model::DeformationModel model;
  std::vector<EpochRecord> log;
  double initial_val_chamfer = 0.0;
  double final_val_chamfer = 0.0;
  std::filesystem::path checkpoint;
};

/// Raised when a step produces a non-finite loss; a snapshot of the
/// parameters and the offending batch is written first.
class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

/// Trains on the manifest's train split. Writes `model.sclk`, `loss.csv` and
/// `train_summary.json` into `out_dir`. Deterministic for a given seed.
TrainResult train(const synth::Manifest& manifest, const TrainConfig& config,
                  const std::filesystem::path& out_dir, std::ostream* progress = nullptr);

/// Same, starting from an existing model (its outfits and parameters).
TrainResult train(model::DeformationModel model, const synth::Manifest& manifest,
                  const TrainConfig& config, const std::filesystem::path& out_dir,
                  std::ostream* progress = nullptr);

void save_model(const std::filesystem::path& path, const model::DeformationModel& model,
                const nlohmann::json& body_source, const nlohmann::json& extra = {});

/// Rebuilds the body, the model and its outfits from a checkpoint.
[[nodiscard]] model::DeformationModel load_model(const std::filesystem::path& path,
                                                 nlohmann::json* metadata = nullptr);

}  // namespace surfcloth::harness
