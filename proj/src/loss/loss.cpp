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

#include "surfcloth/loss/loss.hpp"

namespace surfcloth::loss {

void LossWeights::validate() const {
  if (lambda_p < 0 || lambda_n < 0 || lambda_rgl < 0 || lambda_pd < 0 || lambda_gc < 0) {
    throw Error("loss weights must be non-negative");
  }
  if (!(normal_loss_start_fraction >= 0.0 && normal_loss_start_fraction <= 1.0)) {
    throw Error("normal loss start fraction must lie in [0, 1]");
  }
}

nlohmann::json LossWeights::to_json() const {
  return {{"lambda_p", lambda_p},
          {"lambda_n", lambda_n},
          {"lambda_rgl", lambda_rgl},
          {"lambda_pd", lambda_pd},
          {"lambda_gc", lambda_gc},
          {"normal_loss_start_fraction", normal_loss_start_fraction},
          {"template_data_term", template_data_term}};
}

LossWeights LossWeights::from_json(const nlohmann::json& j) {
  LossWeights w;
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("lambda_p", w.lambda_p);
  get("lambda_n", w.lambda_n);
  get("lambda_rgl", w.lambda_rgl);
  get("lambda_pd", w.lambda_pd);
  get("lambda_gc", w.lambda_gc);
  get("normal_loss_start_fraction", w.normal_loss_start_fraction);
  get("template_data_term", w.template_data_term);
  w.validate();
  return w;
}

DataTerms data_loss(const PointCloud& pred, const PointCloud& scan) {
  if (pred.empty() || scan.empty()) throw Error("chamfer distance of an empty point cloud");
  if (!scan.has_normals()) throw Error("scan has no normals");
  if (!pred.has_normals()) throw Error("prediction has no normals");
  const ChamferTerms t = parallel::chamfer_terms(pred.positions, scan.positions);
  DataTerms out;
  out.chamfer = t.total();
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sum += (pred.normals[i] - scan.normals[t.nn_a_in_b[i]]).lpNorm<1>();
  }
  out.normal = sum / static_cast<double>(pred.size());
  return out;
}

DataTerms data_loss(std::span<const model::DeformationSample> pred, const PointCloud& scan) {
  PointCloud cloud;
  cloud.positions.reserve(pred.size());
  cloud.normals.reserve(pred.size());
  for (const auto& s : pred) {
    cloud.positions.push_back(s.x_world);
    cloud.normals.push_back(s.n_world);
  }
  return data_loss(cloud, scan);
}

RegularizationTerms regularization(std::span<const model::DeformationSample> pred,
                                   const Matrix& garment_code) {
  RegularizationTerms out;
  if (!pred.empty()) {
    for (const auto& s : pred) {
      out.total += s.r().squaredNorm();
      out.pose += s.r_p.squaredNorm();
    }
    out.total /= static_cast<double>(pred.size());
    out.pose /= static_cast<double>(pred.size());
  }
  if (garment_code.rows() > 0) {
    out.code = garment_code.squaredNorm() / static_cast<double>(garment_code.rows());
  }
  return out;
}

bool normal_active(const LossWeights& w, int epoch, int total_epochs) {
  return static_cast<double>(epoch) >= w.normal_loss_start_fraction * static_cast<double>(total_epochs);
}

double total_loss(const LossReport& r, const LossWeights& w, int epoch, int total_epochs) {
  const double n = normal_active(w, epoch, total_epochs) ? w.lambda_n : 0.0;
  double total = 0.0;
  total += w.lambda_p * r.chamfer;
  total += n * r.normal;
  total += w.lambda_rgl * r.rgl_total;
  total += w.lambda_rgl * w.lambda_pd * r.rgl_pose;
  total += w.lambda_rgl * w.lambda_gc * r.rgl_code;
  if (w.template_data_term) total += w.lambda_p * r.template_chamfer;
  return total;
}

Objective build_objective(net::Tape& tape, const model::DecodeVars& d, net::Var code,
                          const KdTree& scan, std::span<const Vec3> scan_normals,
                          const LossWeights& w, int epoch, int total_epochs) {
  if (scan_normals.size() != scan.size()) throw Error("scan has no normals");
  std::vector<int> nn;
  const net::Var cd = tape.chamfer(d.x_world, scan, &nn);
  Matrix target(static_cast<Eigen::Index>(nn.size()), 3);
  for (std::size_t i = 0; i < nn.size(); ++i) {
    target.row(static_cast<Eigen::Index>(i)) = scan_normals[nn[i]].transpose();
  }
  const net::Var nl = tape.mean_abs_diff(d.n_world, target);
  const net::Var rt = tape.mean_squared_norm(d.r);
  const net::Var rp = tape.mean_squared_norm(d.r_p);

  const double n = normal_active(w, epoch, total_epochs) ? w.lambda_n : 0.0;
  std::vector<std::pair<double, net::Var>> terms{{w.lambda_p, cd},
                                                 {n, nl},
                                                 {w.lambda_rgl, rt},
                                                 {w.lambda_rgl * w.lambda_pd, rp}};
  Objective out;
  if (code.valid()) {
    const net::Var rc = tape.mean_squared_norm(code);
    terms.emplace_back(w.lambda_rgl * w.lambda_gc, rc);
    out.report.rgl_code = tape.scalar(rc);
  }
  if (w.template_data_term) {
    if (!d.x_template.valid()) throw Error("template data term needs the decoded template");
    const net::Var tc = tape.chamfer(d.x_template, scan);
    terms.emplace_back(w.lambda_p, tc);
    out.report.template_chamfer = tape.scalar(tc);
  }
  out.loss = tape.weighted_sum(terms);
  out.report.total = tape.scalar(out.loss);
  out.report.chamfer = tape.scalar(cd);
  out.report.normal = tape.scalar(nl);
  out.report.rgl_total = tape.scalar(rt);
  out.report.rgl_pose = tape.scalar(rp);
  return out;
}

}  // namespace surfcloth::loss
