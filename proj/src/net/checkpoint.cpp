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

#include "surfcloth/net/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace surfcloth::net {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes little-endian");

void put_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }

std::uint32_t get_u32(std::istream& in, const std::filesystem::path& path) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 4)) throw Error(path.string() + ": truncated checkpoint");
  return v;
}

std::string get_bytes(std::istream& in, std::uint32_t n, const std::filesystem::path& path) {
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), n)) throw Error(path.string() + ": truncated checkpoint");
  return s;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ParameterStore& params,
                     const nlohmann::json& metadata) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write("SCLK", 4);
  put_u32(out, kCheckpointVersion);
  const std::string meta = metadata.dump();
  put_u32(out, static_cast<std::uint32_t>(meta.size()));
  out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  std::vector<float> buf;
  for (const auto& t : params.tensors()) {
    put_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put_u32(out, static_cast<std::uint32_t>(t.value.rows()));
    put_u32(out, static_cast<std::uint32_t>(t.value.cols()));
    buf.resize(t.value.size());
    for (Eigen::Index i = 0; i < t.value.size(); ++i) buf[i] = static_cast<float>(t.value.data()[i]);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
  }
  if (!out) throw Error("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  if (get_bytes(in, 4, path) != "SCLK") throw Error(path.string() + ": not a checkpoint file");
  const std::uint32_t version = get_u32(in, path);
  if (version != kCheckpointVersion) {
    throw Error(path.string() + ": unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ck;
  const std::string meta = get_bytes(in, get_u32(in, path), path);
  try {
    ck.metadata = meta.empty() ? nlohmann::json::object() : nlohmann::json::parse(meta);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": bad checkpoint metadata: " + e.what());
  }
  const std::uint32_t count = get_u32(in, path);
  std::vector<float> buf;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = get_bytes(in, get_u32(in, path), path);
    const std::uint32_t rows = get_u32(in, path);
    const std::uint32_t cols = get_u32(in, path);
    const int id = ck.params.add(name, static_cast<int>(rows), static_cast<int>(cols), Init::kZero);
    buf.resize(static_cast<std::size_t>(rows) * cols);
    if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 4))) {
      throw Error(path.string() + ": truncated tensor " + name);
    }
    Matrix& v = ck.params.at(id).value;
    for (std::size_t j = 0; j < buf.size(); ++j) v.data()[j] = static_cast<double>(buf[j]);
  }
  return ck;
}

void assign_parameters(ParameterStore& target, const ParameterStore& source) {
  for (auto& t : target.tensors()) {
    if (!source.contains(t.name)) throw Error("checkpoint lacks parameter " + t.name);
    const auto& s = source.at(t.name);
    if (s.value.rows() != t.value.rows() || s.value.cols() != t.value.cols()) {
      throw Error("checkpoint parameter " + t.name + " has a different shape");
    }
    t.value = s.value;
  }
}

}  // namespace surfcloth::net
