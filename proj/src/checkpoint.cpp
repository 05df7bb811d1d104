// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "mcfnet/errors.hpp"
#include "mcfnet/trainer.hpp"

namespace mcfnet {

namespace {

constexpr std::array<char, 8> kMagic = {'M', 'C', 'F', 'N', 'E', 'T', 'C', 'K'};

class Writer {
 public:
  template <typename T>
  void pod(T v) {
    const auto* p = reinterpret_cast<const char*>(&v);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  void str(const std::string& s) {
    pod<std::uint64_t>(s.size());
    buf_.insert(buf_.end(), s.begin(), s.end());
  }
  void tensor(const nn::Tensor& t) {
    const nn::Shape s = t.shape();
    pod<std::int32_t>(s.n);
    pod<std::int32_t>(s.c);
    pod<std::int32_t>(s.h);
    pod<std::int32_t>(s.w);
    const auto* p = reinterpret_cast<const char*>(t.data());
    buf_.insert(buf_.end(), p, p + t.size() * sizeof(double));
  }
  std::vector<char>& bytes() { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  Reader(const std::vector<char>& buf, std::size_t end, std::string path)
      : buf_(buf), end_(end), path_(std::move(path)) {}

  template <typename T>
  T pod() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint64_t>();
    need(n);
    std::string s(buf_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  nn::Tensor tensor() {
    nn::Shape s;
    s.n = pod<std::int32_t>();
    s.c = pod<std::int32_t>();
    s.h = pod<std::int32_t>();
    s.w = pod<std::int32_t>();
    if (s.n < 0 || s.c < 0 || s.h < 0 || s.w < 0) {
      throw CheckpointError(path_ + ": negative tensor extent");
    }
    const std::size_t bytes = s.numel() * sizeof(double);
    need(bytes);
    std::vector<double> data(s.numel());
    std::memcpy(data.data(), buf_.data() + pos_, bytes);
    pos_ += bytes;
    return nn::Tensor(s, std::move(data));
  }
  bool done() const { return pos_ == end_; }

 private:
  void need(std::size_t n) const {
    if (n > end_ - pos_) {
      throw CheckpointError(path_ + ": truncated payload");
    }
  }

  const std::vector<char>& buf_;
  std::size_t pos_ = 0;
  std::size_t end_;
  std::string path_;
};

std::uint32_t crc_of(const char* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data), chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

void write_opt(Writer& w, const OptimizerState& s) {
  w.pod<std::int64_t>(s.steps);
  w.pod<std::uint64_t>(s.m.size());
  for (std::size_t i = 0; i < s.m.size(); ++i) {
    w.tensor(s.m[i]);
    w.tensor(s.v[i]);
  }
}

OptimizerState read_opt(Reader& r) {
  OptimizerState s;
  s.steps = r.pod<std::int64_t>();
  const auto n = r.pod<std::uint64_t>();
  for (std::uint64_t i = 0; i < n; ++i) {
    s.m.push_back(r.tensor());
    s.v.push_back(r.tensor());
  }
  return s;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  if (ckpt.generator_opt.m.size() != ckpt.generator_opt.v.size() ||
      ckpt.discriminator_opt.m.size() != ckpt.discriminator_opt.v.size()) {
    throw CheckpointError("optimizer state has mismatched moment lists");
  }
  Writer w;
  w.bytes().insert(w.bytes().end(), kMagic.begin(), kMagic.end());
  w.pod<std::uint32_t>(Checkpoint::kVersion);
  const nlohmann::json meta = {
      {"config", to_json(ckpt.config)}, {"epoch", ckpt.epoch}, {"rng_state", ckpt.rng_state}};
  w.str(meta.dump());
  w.pod<std::uint64_t>(ckpt.groups.size());
  for (const auto& [group, params] : ckpt.groups) {
    w.str(group);
    w.pod<std::uint64_t>(params.size());
    for (const auto& [name, value] : params) {
      w.str(name);
      w.tensor(value);
    }
  }
  write_opt(w, ckpt.generator_opt);
  write_opt(w, ckpt.discriminator_opt);
  w.pod<std::uint32_t>(crc_of(w.bytes().data(), w.bytes().size()));

  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) {
    throw CheckpointError("cannot write checkpoint " + path.string());
  }
  std::ofstream side(path.string() + ".json", std::ios::trunc);
  side << meta["config"].dump(2) << "\n";
  if (!side) {
    throw CheckpointError("cannot write checkpoint sidecar for " + path.string());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CheckpointError("cannot open checkpoint " + path.string());
  }
  const std::vector<char> buf((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
  const std::string where = path.string();
  if (buf.size() < kMagic.size() || !std::equal(kMagic.begin(), kMagic.end(), buf.begin())) {
    throw CheckpointError(where + ": not a checkpoint (bad magic)");
  }
  if (buf.size() < kMagic.size() + 2 * sizeof(std::uint32_t)) {
    throw CheckpointError(where + ": checksum mismatch (file truncated)");
  }
  const std::size_t body = buf.size() - sizeof(std::uint32_t);
  std::uint32_t stored;
  std::memcpy(&stored, buf.data() + body, sizeof stored);
  if (stored != crc_of(buf.data(), body)) {
    throw CheckpointError(where + ": checksum mismatch");
  }

  Reader r(buf, body, where);
  for (std::size_t i = 0; i < kMagic.size(); ++i) r.pod<char>();
  const auto version = r.pod<std::uint32_t>();
  if (version != Checkpoint::kVersion) {
    throw CheckpointError(where + ": unsupported version " + std::to_string(version) +
                          " (expected " + std::to_string(Checkpoint::kVersion) + ")");
  }
  Checkpoint c;
  try {
    const auto meta = nlohmann::json::parse(r.str());
    c.config = train_config_from_json(meta.at("config"));
    c.epoch = meta.at("epoch").get<int>();
    c.rng_state = meta.at("rng_state").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(where + ": bad metadata: " + e.what());
  } catch (const ConfigError& e) {
    throw CheckpointError(where + ": bad configuration: " + e.what());
  }
  const auto groups = r.pod<std::uint64_t>();
  for (std::uint64_t g = 0; g < groups; ++g) {
    auto& [name, params] = c.groups.emplace_back();
    name = r.str();
    const auto count = r.pod<std::uint64_t>();
    for (std::uint64_t p = 0; p < count; ++p) {
      std::string pname = r.str();
      params.emplace_back(std::move(pname), r.tensor());
    }
  }
  c.generator_opt = read_opt(r);
  c.discriminator_opt = read_opt(r);
  if (!r.done()) {
    throw CheckpointError(where + ": trailing bytes after payload");
  }
  return c;
}

std::vector<std::pair<std::string, std::vector<std::pair<std::string, nn::Tensor>>>>
snapshot_params(const Networks& nets) {
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, nn::Tensor>>>> out;
  for (const nn::ParamGroup* g : nets.all_groups()) {
    auto& [name, params] = out.emplace_back();
    name = g->name();
    for (const auto& p : g->params()) {
      params.emplace_back(p.name, p.var.value());
    }
  }
  return out;
}

void load_params(Networks& nets, const Checkpoint& ckpt) {
  const auto groups = nets.all_groups();
  if (ckpt.groups.size() != groups.size()) {
    throw ShapeError("checkpoint holds " + std::to_string(ckpt.groups.size()) +
                     " parameter groups, network has " + std::to_string(groups.size()));
  }
  // Validate everything before touching the network.
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& [name, params] = ckpt.groups[i];
    const auto live = groups[i]->params();
    if (name != groups[i]->name() || params.size() != live.size()) {
      throw ShapeError("parameter group '" + groups[i]->name() +
                       "' does not match checkpoint group '" + name + "'");
    }
    for (std::size_t j = 0; j < live.size(); ++j) {
      if (params[j].first != live[j].name || !(params[j].second.shape() == live[j].var.shape())) {
        throw ShapeError("parameter group '" + name + "': " + live[j].name + " " +
                         live[j].var.shape().str() + " vs checkpoint " + params[j].first + " " +
                         params[j].second.shape().str());
      }
    }
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto live = groups[i]->params();
    for (std::size_t j = 0; j < live.size(); ++j) {
      nn::Var v = live[j].var;
      v.mutable_value() = ckpt.groups[i].second[j].second;
    }
  }
}

}  // namespace mcfnet
