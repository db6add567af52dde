// Copyright 2026 The diffmon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "diffmon/records.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <sstream>
#include <stdexcept>

namespace diffmon {

namespace {

using nlohmann::json;

template <typename T>
std::string enum_error(const std::string& got,
                       const std::vector<std::pair<T, const char*>>& table) {
  std::ostringstream os;
  os << "unknown value '" << got << "', expected one of:";
  for (const auto& [_, name] : table) os << " " << name;
  return os.str();
}

const std::vector<std::pair<ModelVariant, const char*>> kVariantNames = {
    {ModelVariant::kDiffusive, "diffusive"},
    {ModelVariant::kUncorrelated, "uncorrelated"},
    {ModelVariant::kQuenched, "quenched"},
    {ModelVariant::kDimer, "dimer"},
    {ModelVariant::kU1Symmetric, "u1_symmetric"},
};

const std::vector<std::pair<Protocol, const char*>> kProtocolNames = {
    {Protocol::kSteadyState, "steady_state"},
    {Protocol::kPurification, "purification"},
    {Protocol::kGrowth, "growth"},
    {Protocol::kCodeLength, "code_length"},
    {Protocol::kU1, "u1"},
};

const std::vector<std::pair<InitialState, const char*>> kInitialNames = {
    {InitialState::kProtocolDefault, "protocol_default"},
    {InitialState::kRandomProduct, "random_product"},
    {InitialState::kMaximallyMixed, "maximally_mixed"},
};

template <typename T>
std::string enum_name(T v, const std::vector<std::pair<T, const char*>>& t) {
  for (const auto& [e, name] : t) {
    if (e == v) return name;
  }
  throw std::logic_error("unmapped enum value");
}

template <typename T>
T enum_value(const std::string& s,
             const std::vector<std::pair<T, const char*>>& t) {
  for (const auto& [e, name] : t) {
    if (s == name) return e;
  }
  throw std::invalid_argument(enum_error(s, t));
}

}  // namespace

std::string to_string(ModelVariant v) { return enum_name(v, kVariantNames); }
std::string to_string(Protocol p) { return enum_name(p, kProtocolNames); }
std::string to_string(InitialState s) { return enum_name(s, kInitialNames); }

ModelVariant variant_from_string(const std::string& s) {
  return enum_value(s, kVariantNames);
}
Protocol protocol_from_string(const std::string& s) {
  return enum_value(s, kProtocolNames);
}
InitialState initial_from_string(const std::string& s) {
  return enum_value(s, kInitialNames);
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr ||
      EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, digest.data(), &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256 failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; i++) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

json config_to_json(const ExperimentConfig& cfg) {
  return json{
      {"num_sites", cfg.num_sites},
      {"p", cfg.p},
      {"diffusivity", cfg.diffusivity},
      {"variant", to_string(cfg.variant)},
      {"protocol", to_string(cfg.protocol)},
      {"periodic", cfg.periodic},
      {"initial", to_string(cfg.initial)},
      {"blocks", cfg.blocks},
      {"probe_cadence", cfg.probe_cadence},
      {"tail_window", cfg.tail_window},
      {"growth_cut_halfwidth", cfg.growth_cut_halfwidth},
      {"record_series", cfg.record_series},
      {"validate_code_steps", cfg.validate_code_steps},
      {"master_seed", cfg.master_seed},
      {"samples", cfg.samples},
  };
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  static const std::set<std::string> known = {
      "num_sites",      "p",           "diffusivity",
      "variant",        "protocol",    "periodic",
      "initial",        "blocks",      "probe_cadence",
      "tail_window",    "growth_cut_halfwidth", "record_series",
      "validate_code_steps", "master_seed", "samples",
  };
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  cfg.num_sites = j.value("num_sites", cfg.num_sites);
  cfg.p = j.value("p", cfg.p);
  cfg.diffusivity = j.value("diffusivity", cfg.diffusivity);
  if (j.contains("variant")) {
    cfg.variant = variant_from_string(j.at("variant").get<std::string>());
  }
  if (j.contains("protocol")) {
    cfg.protocol = protocol_from_string(j.at("protocol").get<std::string>());
  }
  cfg.periodic = j.value("periodic", cfg.periodic);
  if (j.contains("initial")) {
    cfg.initial = initial_from_string(j.at("initial").get<std::string>());
  }
  cfg.blocks = j.value("blocks", cfg.blocks);
  cfg.probe_cadence = j.value("probe_cadence", cfg.probe_cadence);
  cfg.tail_window = j.value("tail_window", cfg.tail_window);
  cfg.growth_cut_halfwidth =
      j.value("growth_cut_halfwidth", cfg.growth_cut_halfwidth);
  cfg.record_series = j.value("record_series", cfg.record_series);
  cfg.validate_code_steps =
      j.value("validate_code_steps", cfg.validate_code_steps);
  cfg.master_seed = j.value("master_seed", cfg.master_seed);
  cfg.samples = j.value("samples", cfg.samples);
  return cfg;
}

std::string config_digest(const ExperimentConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("samples");
  return sha256_hex(j.dump());
}

json record_to_json(const TrajectoryRecord& rec) {
  json scalars = json::object();
  for (const auto& [k, v] : rec.scalars) scalars[k] = v;
  json series = json::object();
  for (const auto& s : rec.series) {
    json pts = json::array();
    for (const auto& pt : s.points) {
      pts.push_back(json::array({pt.t, pt.value}));
    }
    series[s.name] = std::move(pts);
  }
  return json{
      {"kind", "record"},
      {"schema", kRecordSchemaVersion},
      {"config", rec.config_digest},
      {"trajectory", rec.trajectory_index},
      {"rng", rec.rng_tag},
      {"scalars", std::move(scalars)},
      {"series", std::move(series)},
  };
}

TrajectoryRecord record_from_json(const json& j) {
  if (j.value("schema", -1) != kRecordSchemaVersion) {
    throw std::invalid_argument("unsupported record schema version");
  }
  TrajectoryRecord rec;
  rec.trajectory_index = j.at("trajectory").get<uint64_t>();
  rec.config_digest = j.value("config", "");
  rec.rng_tag = j.value("rng", "");
  for (const auto& [k, v] : j.at("scalars").items()) {
    rec.add_scalar(k, v.get<double>());
  }
  for (const auto& [name, pts] : j.at("series").items()) {
    ProbeSeries s{name, {}};
    for (const auto& pt : pts) {
      s.points.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
    }
    rec.series.push_back(std::move(s));
  }
  return rec;
}

std::filesystem::path cell_file_path(const std::filesystem::path& out_dir,
                                     const ExperimentConfig& cfg) {
  std::string name = to_string(cfg.protocol) + "_" + to_string(cfg.variant) +
                     "_" + config_digest(cfg).substr(0, 12) + ".jsonl";
  return out_dir / name;
}

RecordWriter::RecordWriter(const std::filesystem::path& path,
                           const ExperimentConfig& cfg)
    : digest_(config_digest(cfg)) {
  bool fresh = !std::filesystem::exists(path) ||
               std::filesystem::file_size(path) == 0;
  out_.open(path, std::ios::app);
  if (!out_) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  if (fresh) {
    json header{{"kind", "config"},
                {"schema", kRecordSchemaVersion},
                {"digest", digest_},
                {"config", config_to_json(cfg)}};
    out_ << header.dump() << "\n";
  }
}

void RecordWriter::append(TrajectoryRecord rec) {
  rec.config_digest = digest_;
  out_ << record_to_json(rec).dump() << "\n";
}

void RecordWriter::flush() { out_.flush(); }

RecordSet RecordSet::load(std::vector<std::filesystem::path> files) {
  std::sort(files.begin(), files.end());
  RecordSet set;
  std::string all_bytes;
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      line_no++;
      all_bytes += line;
      all_bytes += '\n';
      if (line.empty()) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ":" +
                                 std::to_string(line_no) + ": " + e.what());
      }
      std::string kind = j.value("kind", "");
      if (kind == "config") {
        set.configs.emplace(j.at("digest").get<std::string>(),
                            config_from_json(j.at("config")));
      } else if (kind == "record") {
        set.entries.push_back({j.value("config", ""), record_from_json(j)});
      } else {
        throw std::runtime_error(path.string() + ":" +
                                 std::to_string(line_no) +
                                 ": unknown line kind '" + kind + "'");
      }
    }
    set.inputs.push_back(path);
  }
  for (const auto& e : set.entries) {
    if (!set.configs.count(e.digest)) {
      throw std::runtime_error("record with no config header, digest " +
                               e.digest.substr(0, 12));
    }
  }
  set.content_hash = sha256_hex(all_bytes);
  return set;
}

RecordSet RecordSet::load_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::exists(dir)) {
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
    }
  }
  return load(std::move(files));
}

std::vector<const RecordSet::Entry*> RecordSet::with_protocol(
    Protocol p) const {
  std::vector<const Entry*> out;
  for (const auto& e : entries) {
    auto it = configs.find(e.digest);
    if (it != configs.end() && it->second.protocol == p) out.push_back(&e);
  }
  return out;
}

std::set<std::pair<std::string, uint64_t>> existing_pairs(
    const std::filesystem::path& dir) {
  std::set<std::pair<std::string, uint64_t>> pairs;
  if (!std::filesystem::exists(dir)) return pairs;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".jsonl") continue;
    std::ifstream in(entry.path());
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || j.value("kind", "") != "record") continue;
      pairs.emplace(j.value("config", ""), j.at("trajectory").get<uint64_t>());
    }
  }
  return pairs;
}

}  // namespace diffmon
