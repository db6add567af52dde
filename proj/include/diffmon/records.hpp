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

#ifndef DIFFMON_RECORDS_HPP
#define DIFFMON_RECORDS_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "diffmon/experiment.hpp"
#include "json.hpp"

namespace diffmon {

inline constexpr int kRecordSchemaVersion = 1;

std::string to_string(ModelVariant v);
std::string to_string(Protocol p);
std::string to_string(InitialState s);
ModelVariant variant_from_string(const std::string& s);
Protocol protocol_from_string(const std::string& s);
InitialState initial_from_string(const std::string& s);

std::string sha256_hex(std::string_view bytes);

// Full config round trip; parsing rejects unknown keys by name so config
// typos fail loudly.
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

// Digest over every field that determines trajectory content. `samples` is
// deliberately excluded: raising it appends to the same record file.
std::string config_digest(const ExperimentConfig& cfg);

nlohmann::json record_to_json(const TrajectoryRecord& rec);
TrajectoryRecord record_from_json(const nlohmann::json& j);

// One JSON-lines file per sweep cell, named by the config digest. The first
// line carries the schema version and the full config; record lines follow.
std::filesystem::path cell_file_path(const std::filesystem::path& out_dir,
                                     const ExperimentConfig& cfg);

class RecordWriter {
 public:
  // Appends to path, writing the config header only when the file is new.
  RecordWriter(const std::filesystem::path& path,
               const ExperimentConfig& cfg);

  void append(TrajectoryRecord rec);
  void flush();

  const std::string& digest() const { return digest_; }

 private:
  std::ofstream out_;
  std::string digest_;
};

struct RecordSet {
  struct Entry {
    std::string digest;
    TrajectoryRecord record;
  };

  std::map<std::string, ExperimentConfig> configs;  // digest -> config
  std::vector<Entry> entries;
  std::string content_hash;  // sha256 over the raw input bytes
  std::vector<std::filesystem::path> inputs;

  static RecordSet load(std::vector<std::filesystem::path> files);
  // Loads every *.jsonl under the directory, sorted by name.
  static RecordSet load_dir(const std::filesystem::path& dir);

  std::vector<const Entry*> with_protocol(Protocol p) const;
};

// (digest, trajectory index) pairs already present under the directory;
// the resume cursor skips exactly these.
std::set<std::pair<std::string, uint64_t>> existing_pairs(
    const std::filesystem::path& dir);

}  // namespace diffmon

#endif
