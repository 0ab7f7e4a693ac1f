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

#include "surfcloth/body/rig_io.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "surfcloth/geom/io.hpp"
#include "surfcloth/geom/surface.hpp"

namespace surfcloth::body {

using nlohmann::json;

namespace {

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

Vec3 vec3_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw Error(what + " must be a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

TemplateBody load_rigged_mesh(const std::filesystem::path& mesh_file,
                              const std::filesystem::path& skinning_file) {
  const TriMesh mesh = read_obj(mesh_file);
  const json doc = read_json(skinning_file);
  TemplateBody body;
  body.vertices = mesh.vertices;
  body.faces = mesh.faces;
  body.normals = vertex_normals(body.vertices, body.faces);
  try {
    const auto& parents = doc.at("parents");
    const auto& offsets = doc.at("offsets");
    for (const auto& p : parents) body.skeleton.parents.push_back(p.get<int>());
    for (std::size_t j = 0; j < offsets.size(); ++j) {
      body.skeleton.offsets.push_back(vec3_from(offsets[j], "offset " + std::to_string(j)));
    }
    if (doc.contains("joints")) {
      for (const auto& name : doc["joints"]) body.skeleton.names.push_back(name.get<std::string>());
    }
    body.skeleton.validate();
    const int joints = body.skeleton.joint_count();
    const auto& weights = doc.at("weights");
    if (weights.size() != body.vertices.size()) {
      throw Error("weights has " + std::to_string(weights.size()) + " rows, mesh has " +
                  std::to_string(body.vertices.size()) + " vertices");
    }
    body.skinning = Matrix::Zero(body.vertex_count(), joints);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const auto& row = weights[i];
      if (!row.is_array() || static_cast<int>(row.size()) != joints) {
        throw Error("weight row " + std::to_string(i) + " must have " + std::to_string(joints) +
                    " entries");
      }
      double sum = 0.0;
      for (int j = 0; j < joints; ++j) {
        const double w = row[j].get<double>();
        if (!(w >= 0.0)) throw Error("weight row " + std::to_string(i) + " has a negative weight");
        body.skinning(i, j) = w;
        sum += w;
      }
      if (!(sum >= 0.99 && sum <= 1.01)) {
        throw Error("weight row " + std::to_string(i) + " sums to " + std::to_string(sum));
      }
      body.skinning.row(i) /= sum;
    }
  } catch (const json::exception& e) {
    throw Error(skinning_file.string() + ": " + e.what());
  }
  body.validate(1e-9);
  return body;
}

json skinning_to_json(const TemplateBody& body) {
  json doc;
  doc["joints"] = body.skeleton.names;
  doc["parents"] = body.skeleton.parents;
  json offsets = json::array();
  for (const Vec3& o : body.skeleton.offsets) offsets.push_back({o.x(), o.y(), o.z()});
  doc["offsets"] = offsets;
  json weights = json::array();
  for (int i = 0; i < body.vertex_count(); ++i) {
    json row = json::array();
    for (int j = 0; j < body.skinning.cols(); ++j) row.push_back(body.skinning(i, j));
    weights.push_back(std::move(row));
  }
  doc["weights"] = std::move(weights);
  return doc;
}

void save_rigged_mesh(const TemplateBody& body, const std::filesystem::path& mesh_file,
                      const std::filesystem::path& skinning_file) {
  write_obj(mesh_file, TriMesh{body.vertices, body.faces, body.normals});
  std::ofstream out(skinning_file);
  if (!out) throw Error("cannot open " + skinning_file.string() + " for writing");
  out << skinning_to_json(body).dump();
}

json pose_to_json(const Pose& pose) {
  json frame;
  frame["root_translation"] = {pose.root_translation.x(), pose.root_translation.y(),
                               pose.root_translation.z()};
  json aa = json::array();
  for (const Vec3& a : pose.axis_angles()) aa.push_back({a.x(), a.y(), a.z()});
  frame["axis_angle"] = std::move(aa);
  return frame;
}

Pose pose_from_json(const json& frame) {
  try {
    std::vector<Vec3> aa;
    for (const auto& a : frame.at("axis_angle")) aa.push_back(vec3_from(a, "axis_angle entry"));
    Vec3 root = Vec3::Zero();
    if (frame.contains("root_translation")) root = vec3_from(frame["root_translation"], "root_translation");
    return Pose::from_axis_angle(aa, root);
  } catch (const json::exception& e) {
    throw Error(std::string("malformed pose: ") + e.what());
  }
}

std::vector<Pose> read_pose_sequence(const std::filesystem::path& path) {
  const json doc = read_json(path);
  std::vector<Pose> poses;
  try {
    const int joints = doc.at("joints").get<int>();
    for (const auto& frame : doc.at("frames")) {
      poses.push_back(pose_from_json(frame));
      if (poses.back().joint_count() != joints) {
        throw Error(path.string() + ": frame " + std::to_string(poses.size() - 1) + " has " +
                    std::to_string(poses.back().joint_count()) + " joints, expected " +
                    std::to_string(joints));
      }
    }
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
  return poses;
}

void write_pose_sequence(const std::filesystem::path& path, const std::vector<Pose>& poses) {
  json doc;
  doc["joints"] = poses.empty() ? 0 : poses.front().joint_count();
  json frames = json::array();
  for (const Pose& p : poses) frames.push_back(pose_to_json(p));
  doc["frames"] = std::move(frames);
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << doc.dump(1);
}

}  // namespace surfcloth::body
