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

#include "surfcloth/geom/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace surfcloth {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

[[noreturn]] void parse_error(const std::filesystem::path& path, int line, const std::string& what) {
  throw Error(path.string() + ":" + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view token, const std::filesystem::path& path, int line) {
  double v = 0.0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    parse_error(path, line, "invalid number '" + std::string(token) + "'");
  }
  return v;
}

int parse_index(std::string_view token, const std::filesystem::path& path, int line) {
  int v = 0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    parse_error(path, line, "invalid index '" + std::string(token) + "'");
  }
  return v;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

void write_obj(const std::filesystem::path& path, const TriMesh& mesh) {
  if (!mesh.normals.empty() && mesh.normals.size() != mesh.vertices.size()) {
    throw Error("normal count does not match vertex count");
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  for (const Vec3& v : mesh.vertices) {
    out << "v " << format_double(v.x()) << ' ' << format_double(v.y()) << ' '
        << format_double(v.z()) << '\n';
  }
  for (const Vec3& n : mesh.normals) {
    out << "vn " << format_double(n.x()) << ' ' << format_double(n.y()) << ' '
        << format_double(n.z()) << '\n';
  }
  const bool with_normals = !mesh.normals.empty();
  for (const Face& f : mesh.faces) {
    out << 'f';
    for (int v : f) {
      out << ' ' << v + 1;
      if (with_normals) out << "//" << v + 1;
    }
    out << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

TriMesh read_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  TriMesh mesh;
  std::vector<std::array<int, 3>> face_lines;
  std::vector<int> face_line_numbers;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0].starts_with('#')) continue;
    if (tok[0] == "v" || tok[0] == "vn") {
      if (tok.size() < 4) parse_error(path, line_no, "expected three coordinates");
      Vec3 p(parse_double(tok[1], path, line_no), parse_double(tok[2], path, line_no),
             parse_double(tok[3], path, line_no));
      (tok[0] == "v" ? mesh.vertices : mesh.normals).push_back(p);
    } else if (tok[0] == "f") {
      if (tok.size() != 4) parse_error(path, line_no, "only triangular faces are supported");
      Face f{};
      for (int c = 0; c < 3; ++c) {
        std::string_view t = tok[c + 1];
        t = t.substr(0, t.find('/'));
        int idx = parse_index(t, path, line_no);
        f[c] = idx - 1;  // relative (negative) indices are not supported
      }
      face_lines.push_back(f);
      face_line_numbers.push_back(line_no);
    }
  }
  const int n = static_cast<int>(mesh.vertices.size());
  for (std::size_t i = 0; i < face_lines.size(); ++i) {
    for (int v : face_lines[i]) {
      if (v < 0 || v >= n) {
        parse_error(path, face_line_numbers[i],
                    "face index " + std::to_string(v + 1) + " out of range (" + std::to_string(n) +
                        " vertices)");
      }
    }
  }
  mesh.faces = std::move(face_lines);
  if (!mesh.normals.empty() && mesh.normals.size() != mesh.vertices.size()) {
    throw Error(path.string() + ": normal count does not match vertex count");
  }
  return mesh;
}

void write_ply(const std::filesystem::path& path, const PointCloud& cloud) {
  if (cloud.empty()) throw Error("refusing to write empty point cloud to " + path.string());
  if (cloud.has_normals() && cloud.normals.size() != cloud.positions.size()) {
    throw Error("normal count does not match point count");
  }
  std::ostringstream header;
  header << "ply\nformat binary_little_endian 1.0\nelement vertex " << cloud.size()
         << "\nproperty float x\nproperty float y\nproperty float z\n"
            "property float nx\nproperty float ny\nproperty float nz\nend_header\n";
  std::vector<float> data(cloud.size() * 6, 0.0f);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      data[6 * i + c] = static_cast<float>(cloud.positions[i][c]);
      if (cloud.has_normals()) data[6 * i + 3 + c] = static_cast<float>(cloud.normals[i][c]);
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  const std::string h = header.str();
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(float)));
  if (!out) throw Error("write failed for " + path.string());
}

PointCloud read_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  int line_no = 0;
  std::size_t count = 0;
  bool in_vertex = false;
  bool seen_vertex = false;
  std::vector<std::string> props;
  auto next = [&]() {
    if (!std::getline(in, line)) parse_error(path, line_no, "unexpected end of header");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };
  next();
  if (line != "ply") parse_error(path, line_no, "missing ply magic");
  next();
  if (line != "format binary_little_endian 1.0") {
    parse_error(path, line_no, "unsupported format '" + line + "'");
  }
  for (next(); line != "end_header"; next()) {
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "element") {
      if (tok.size() != 3) parse_error(path, line_no, "malformed element line");
      in_vertex = tok[1] == "vertex";
      if (in_vertex) {
        if (seen_vertex) parse_error(path, line_no, "duplicate vertex element");
        seen_vertex = true;
        count = static_cast<std::size_t>(parse_index(tok[2], path, line_no));
      } else if (!seen_vertex) {
        parse_error(path, line_no, "vertex element must come first");
      }
    } else if (tok[0] == "property" && in_vertex) {
      if (tok.size() != 3 || (tok[1] != "float" && tok[1] != "float32")) {
        parse_error(path, line_no, "only float vertex properties are supported");
      }
      props.emplace_back(tok[2]);
    }
  }
  auto find = [&](const char* name) {
    for (std::size_t i = 0; i < props.size(); ++i) {
      if (props[i] == name) return static_cast<int>(i);
    }
    return -1;
  };
  const int ix = find("x"), iy = find("y"), iz = find("z");
  const int inx = find("nx"), iny = find("ny"), inz = find("nz");
  if (ix < 0 || iy < 0 || iz < 0) throw Error(path.string() + ": missing x/y/z properties");
  const bool has_n = inx >= 0 && iny >= 0 && inz >= 0;

  std::vector<float> data(count * props.size());
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != data.size() * sizeof(float)) {
    throw Error(path.string() + ": truncated vertex data");
  }
  PointCloud cloud;
  cloud.positions.resize(count);
  if (has_n) cloud.normals.resize(count);
  bool any_normal = false;
  const std::size_t stride = props.size();
  for (std::size_t i = 0; i < count; ++i) {
    const float* row = data.data() + i * stride;
    cloud.positions[i] = Vec3(row[ix], row[iy], row[iz]);
    if (has_n) {
      cloud.normals[i] = Vec3(row[inx], row[iny], row[inz]);
      any_normal = any_normal || !cloud.normals[i].isZero(0.0);
    }
  }
  if (!any_normal) cloud.normals.clear();
  return cloud;
}

}  // namespace surfcloth
