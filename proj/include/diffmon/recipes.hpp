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

#ifndef DIFFMON_RECIPES_HPP
#define DIFFMON_RECIPES_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "diffmon/records.hpp"

namespace diffmon {

struct Artifact {
  std::string name;   // file name, e.g. "fig2b_tau.csv"
  std::string bytes;  // full contents
};

const std::vector<std::string>& recipe_names();

// Pure function of the record set: rerunning on the same inputs reproduces
// the artifact bytes exactly. Throws with a description of the missing cells
// when the records cannot feed the recipe.
std::vector<Artifact> run_recipe(const std::string& name,
                                 const RecordSet& records);

void write_artifacts(const std::vector<Artifact>& artifacts,
                     const std::filesystem::path& out_dir);

}  // namespace diffmon

#endif
