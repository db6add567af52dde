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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "diffmon/analysis.hpp"
#include "diffmon/clipped.hpp"
#include "diffmon/dense_oracle.hpp"
#include "diffmon/experiment.hpp"
#include "diffmon/measurers.hpp"
#include "diffmon/recipes.hpp"
#include "diffmon/records.hpp"
#include "json.hpp"

namespace diffmon {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json load_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

// --set key=value; the value is JSON when it parses, a bare string otherwise
// so `--set variant=diffusive` works without inner quotes.
void apply_override(json& cfg, const std::string& kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::runtime_error("--set expects key=value, got '" + kv + "'");
  }
  std::string key = kv.substr(0, eq);
  std::string value = kv.substr(eq + 1);
  json parsed = json::parse(value, nullptr, false);
  cfg[key] = parsed.is_discarded() ? json(value) : parsed;
}

size_t resolve_threads(int flag) {
  if (flag > 0) return static_cast<size_t>(flag);
  if (const char* env = std::getenv("DIFFMON_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return static_cast<size_t>(v);
  }
  return 1;
}

std::string fmt_seconds(double s) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << s << " s";
  return os.str();
}

struct CellOutcome {
  size_t written = 0;
  size_t skipped = 0;
  fs::path path;
};

// Runs one sweep cell: every trajectory index in [0, samples) that is not
// already on disk. Workers pull indices from a shared cursor; the main
// thread flushes records in index order so reruns are byte-identical.
CellOutcome run_cell(const ExperimentConfig& cfg, const fs::path& out_dir,
                     size_t threads, bool resume) {
  fs::create_directories(out_dir);
  CellOutcome outcome;
  outcome.path = cell_file_path(out_dir, cfg);
  std::string digest = config_digest(cfg);

  std::vector<uint64_t> todo;
  if (resume) {
    auto have = existing_pairs(out_dir);
    for (uint64_t i = 0; i < cfg.samples; i++) {
      if (have.count({digest, i})) {
        outcome.skipped++;
      } else {
        todo.push_back(i);
      }
    }
  } else {
    for (uint64_t i = 0; i < cfg.samples; i++) todo.push_back(i);
  }
  if (todo.empty()) return outcome;

  RecordWriter writer(outcome.path, cfg);
  if (threads <= 1) {
    for (uint64_t idx : todo) {
      writer.append(run_trajectory(cfg, idx));
      outcome.written++;
    }
  } else {
    std::atomic<size_t> cursor{0};
    std::mutex mu;
    std::condition_variable cv;
    std::map<size_t, TrajectoryRecord> ready;  // todo position -> record
    std::exception_ptr error;

    auto work = [&]() {
      while (true) {
        size_t pos = cursor.fetch_add(1);
        if (pos >= todo.size()) return;
        try {
          TrajectoryRecord rec = run_trajectory(cfg, todo[pos]);
          std::lock_guard<std::mutex> lock(mu);
          ready.emplace(pos, std::move(rec));
          cv.notify_all();
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
          cursor.store(todo.size());
          cv.notify_all();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (size_t i = 0; i < std::min(threads, todo.size()); i++) {
      pool.emplace_back(work);
    }
    size_t next = 0;
    std::unique_lock<std::mutex> lock(mu);
    while (next < todo.size()) {
      cv.wait(lock, [&] { return error || ready.count(next); });
      if (error) break;
      TrajectoryRecord rec = std::move(ready.at(next));
      ready.erase(next);
      next++;
      lock.unlock();
      writer.append(std::move(rec));
      outcome.written++;
      lock.lock();
    }
    lock.unlock();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }
  writer.flush();
  return outcome;
}

void report_cell(const ExperimentConfig& cfg, const CellOutcome& out,
                 double seconds) {
  std::cout << "cell " << to_string(cfg.protocol) << " "
            << to_string(cfg.variant) << " N=" << cfg.num_sites
            << " p=" << cfg.p << ": wrote " << out.written;
  if (out.skipped > 0) std::cout << ", kept " << out.skipped << " existing";
  std::cout << " -> " << out.path.string() << "  [" << fmt_seconds(seconds)
            << "]\n";
}

int cmd_run(const std::string& config_path,
            const std::vector<std::string>& sets, int64_t samples,
            int64_t seed, const std::string& out_dir, int threads,
            bool resume) {
  json j = config_path.empty() ? json::object() : load_json_file(config_path);
  for (const auto& kv : sets) apply_override(j, kv);
  ExperimentConfig cfg = config_from_json(j);
  if (samples >= 0) cfg.samples = static_cast<size_t>(samples);
  if (seed >= 0) cfg.master_seed = static_cast<uint64_t>(seed);

  auto t0 = std::chrono::steady_clock::now();
  CellOutcome out = run_cell(cfg, out_dir, resolve_threads(threads), resume);
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            t0)
                  .count();
  report_cell(cfg, out, dt);
  return 0;
}

// Sweep manifests look like
//   {"base": {...config keys...},
//    "axes": {"num_sites": [64, 128], "p": [0.1, 0.2]},
//    "samples": 500}
// and expand to the cartesian product of the axes over the base config.
int cmd_sweep(const std::string& manifest_path,
              const std::vector<std::string>& sets, int64_t samples,
              const std::string& out_dir, int threads, bool resume) {
  json manifest = load_json_file(manifest_path);
  if (!manifest.is_object()) {
    throw std::runtime_error(manifest_path + ": manifest must be an object");
  }
  for (const auto& [key, _] : manifest.items()) {
    if (key != "base" && key != "axes" && key != "samples") {
      throw std::runtime_error(manifest_path + ": unknown manifest key '" +
                               key + "' (expected base, axes, samples)");
    }
  }
  json base = manifest.value("base", json::object());
  if (!base.is_object()) {
    throw std::runtime_error(manifest_path + ": 'base' must be an object");
  }
  for (const auto& kv : sets) apply_override(base, kv);
  if (manifest.contains("samples")) {
    base["samples"] = manifest.at("samples");
  }
  if (samples >= 0) base["samples"] = samples;

  std::vector<std::pair<std::string, json>> axes;
  if (manifest.contains("axes")) {
    if (!manifest.at("axes").is_object()) {
      throw std::runtime_error(manifest_path + ": 'axes' must be an object");
    }
    for (const auto& [key, values] : manifest.at("axes").items()) {
      if (!values.is_array() || values.empty()) {
        throw std::runtime_error(manifest_path + ": axis '" + key +
                                 "' must be a non-empty array");
      }
      axes.emplace_back(key, values);
    }
  }

  std::vector<json> cells{base};
  for (const auto& [key, values] : axes) {
    std::vector<json> next;
    for (const auto& cell : cells) {
      for (const auto& v : values) {
        json c = cell;
        c[key] = v;
        next.push_back(std::move(c));
      }
    }
    cells = std::move(next);
  }

  // Validate the whole grid before running anything.
  std::vector<ExperimentConfig> configs;
  for (const auto& cell : cells) {
    try {
      configs.push_back(config_from_json(cell));
    } catch (const std::exception& e) {
      throw std::runtime_error(manifest_path + ": bad cell " + cell.dump() +
                               ": " + e.what());
    }
  }

  size_t threads_n = resolve_threads(threads);
  size_t total_written = 0, total_skipped = 0;
  auto sweep_t0 = std::chrono::steady_clock::now();
  for (const auto& cfg : configs) {
    auto t0 = std::chrono::steady_clock::now();
    CellOutcome out = run_cell(cfg, out_dir, threads_n, resume);
    double dt = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    report_cell(cfg, out, dt);
    total_written += out.written;
    total_skipped += out.skipped;
  }
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            sweep_t0)
                  .count();
  std::cout << "sweep: " << configs.size() << " cells, " << total_written
            << " new records";
  if (total_skipped > 0) std::cout << ", " << total_skipped << " kept";
  std::cout << " [" << fmt_seconds(dt) << "]\n";
  return 0;
}

int cmd_analyze(const std::string& records_dir,
                const std::vector<std::string>& recipes,
                const std::string& out_dir) {
  RecordSet records = RecordSet::load_dir(records_dir);
  std::cout << "loaded " << records.entries.size() << " records across "
            << records.configs.size() << " cells from " << records_dir
            << "\n";
  bool explicit_selection = !recipes.empty();
  std::vector<std::string> to_run =
      explicit_selection ? recipes : recipe_names();
  size_t produced = 0;
  for (const auto& name : to_run) {
    try {
      auto artifacts = run_recipe(name, records);
      write_artifacts(artifacts, out_dir);
      std::cout << name << ":";
      for (const auto& a : artifacts) std::cout << " " << a.name;
      std::cout << "\n";
      produced++;
    } catch (const std::exception& e) {
      if (explicit_selection) throw;
      std::cout << name << ": skipped (" << e.what() << ")\n";
    }
  }
  if (produced == 0) {
    throw std::runtime_error("no recipe could run on " + records_dir);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// selftest: a compact oracle battery, seconds not minutes. Every check is a
// scaled-down version of a unit or acceptance test and prints one line.

struct SelfTest {
  std::string name;
  std::string detail;
  bool pass = false;
};

SelfTest check_pure_cross_history() {
  SelfTest t{"stabilizer-vs-statevector",
             "n=5, 25 histories, every prefix entropy and outcome", false};
  std::mt19937_64 rng(11);
  for (int h = 0; h < 25; h++) {
    StabilizerState st = StabilizerState::random_product(5, rng);
    DenseState dense = DenseState::from_stabilizer(st);
    for (int step = 0; step < 30; step++) {
      size_t a = rng() % 4;
      CliffordGate g = CliffordGate::random_two_qubit(rng);
      st.apply_gate(GateTable::from_gate(g), a, a + 1);
      dense.apply(g, a, a + 1);
      if (std::bernoulli_distribution(0.3)(rng)) {
        size_t s = rng() % 5;
        auto r = st.measure_z(s, rng);
        auto d = dense.force_measure_z(s, r.outcome);
        // Clifford outcomes are unbiased or certain, never anything else.
        double chosen = r.outcome == 1 ? d.prob_plus : 1.0 - d.prob_plus;
        if (std::abs(chosen - 0.5) > 1e-9 && std::abs(chosen - 1.0) > 1e-9) {
          return t;
        }
      }
      for (size_t cut = 1; cut < 5; cut++) {
        double want = dense.entropy_interval(0, cut);
        if (std::abs(static_cast<double>(st.entropy_interval(0, cut)) -
                     want) > 1e-7) {
          return t;
        }
      }
    }
  }
  t.pass = true;
  return t;
}

SelfTest check_mixed_cross_history() {
  SelfTest t{"purification-vs-density-matrix",
             "n=4 maximally mixed, 10 histories", false};
  std::mt19937_64 rng(12);
  for (int h = 0; h < 10; h++) {
    StabilizerState st(4);
    DenseState dense = DenseState::from_stabilizer(st);
    for (int step = 0; step < 40; step++) {
      size_t a = rng() % 3;
      CliffordGate g = CliffordGate::random_two_qubit(rng);
      st.apply_gate(GateTable::from_gate(g), a, a + 1);
      dense.apply(g, a, a + 1);
      size_t s = rng() % 4;
      auto r = st.measure_z(s, rng);
      dense.force_measure_z(s, r.outcome);
      if (std::abs(static_cast<double>(st.entropy_total()) -
                   dense.entropy_total()) > 1e-7) {
        return t;
      }
    }
    for (size_t cut = 1; cut < 4; cut++) {
      if (std::abs(static_cast<double>(st.entropy_interval(0, cut)) -
                   dense.entropy_interval(0, cut)) > 1e-7) {
        return t;
      }
    }
  }
  t.pass = true;
  return t;
}

SelfTest check_clipped_gauge() {
  SelfTest t{"clipped-gauge", "n=48, 20 circuits, all prefixes", false};
  std::mt19937_64 rng(13);
  const size_t n = 48;
  for (int h = 0; h < 20; h++) {
    StabilizerState st = StabilizerState::random_product(n, rng);
    for (int block = 0; block < 30; block++) {
      for (size_t i = block % 2; i + 1 < n; i += 2) {
        st.apply_gate(GateTable::from_gate(CliffordGate::random_two_qubit(rng)),
                      i, i + 1);
      }
      for (size_t s = 0; s < n; s++) {
        if (std::bernoulli_distribution(0.15)(rng)) st.measure_z(s, rng);
      }
    }
    ClippedGauge gauge = ClippedGauge::from_state(st);
    if (!gauge.two_ends_per_site()) return t;
    auto profile = gauge.entropy_all_prefixes();
    for (size_t cut = 0; cut <= n; cut++) {
      if (profile[cut] != st.entropy_interval(0, cut)) return t;
    }
  }
  t.pass = true;
  return t;
}

SelfTest check_ssep_uniformity() {
  SelfTest t{"walker-stationarity",
             "ring of 6, 3 walkers, chi2 over all 20 configurations", false};
  std::mt19937_64 rng(14);
  auto walkers = MeasurerConfiguration::random_half_filled(
      6, 1.0, SsepBoundary::kPeriodic, rng);
  std::map<std::vector<uint8_t>, size_t> counts;
  const size_t samples = 20000;
  for (size_t i = 0; i < samples; i++) {
    walkers.ssep_advance(1.0, rng);
    counts[walkers.occupancy()]++;
  }
  if (counts.size() != 20) return t;
  double expected = static_cast<double>(samples) / 20.0;
  double chi2 = 0;
  for (const auto& [_, c] : counts) {
    double d = static_cast<double>(c) - expected;
    chi2 += d * d / expected;
  }
  // 0.999 quantile of chi-squared with 19 degrees of freedom.
  t.detail += ", chi2=" + std::to_string(chi2);
  t.pass = chi2 < 43.82;
  return t;
}

SelfTest check_analysis_oracles() {
  SelfTest t{"analysis-synthetics",
             "collapse, peak, wandering, tail ranking on exact inputs",
             false};
  {
    // Points on one line collapse exactly.
    CollapseProblem prob;
    prob.ansatz = CollapseAnsatz::kRescaled;
    for (double n : {16.0, 32.0, 64.0}) {
      for (double p : {0.1, 0.15, 0.2, 0.25, 0.3}) {
        double x = std::pow(n, 1.0 / 1.4) * (p - 0.2);
        prob.points.push_back({n, p, std::pow(n, 0.3) * (2 + 3 * x), 0.01});
      }
    }
    if (collapse_quality(prob, {0.2, 1.4, 0.3}) > 1e-15) return t;
  }
  {
    std::vector<PeakPoint> pts;
    for (double p = 0.1; p < 0.23; p += 0.02) {
      pts.push_back({p, 1.0 - 50.0 * (p - 0.16) * (p - 0.16), 0.001});
    }
    PeakFit fit = peak_location(pts);
    if (std::abs(fit.p_star - 0.16) > 1e-6) return t;
  }
  {
    std::vector<SizeValue> pts;
    for (double n : {32.0, 64.0, 128.0, 256.0}) {
      pts.push_back({n, 1.7 * std::pow(n, 0.41), 1e-4});
    }
    WanderingFit fit = wandering_exponent(pts);
    if (std::abs(fit.beta.value - 0.41) > 1e-4) return t;
  }
  {
    std::vector<TailPoint> pts;
    for (double x = 10; x < 1500; x *= 1.3) {
      pts.push_back({x, std::exp(-0.2 * std::sqrt(x)), 100000});
    }
    TailRanking r = tail_scaling_discriminator(pts);
    if (r.fits[0].model != TailModel::kSqrtT) return t;
  }
  t.pass = true;
  return t;
}

SelfTest check_records_roundtrip() {
  SelfTest t{"record-store", "digest stability, write and reload", false};
  ExperimentConfig cfg;
  cfg.protocol = Protocol::kGrowth;
  cfg.num_sites = 16;
  cfg.samples = 2;
  ExperimentConfig more = cfg;
  more.samples = 50;
  if (config_digest(cfg) != config_digest(more)) return t;

  fs::path dir = fs::temp_directory_path() / "diffmon_selftest_records";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    RecordWriter w(cell_file_path(dir, cfg), cfg);
    for (uint64_t i = 0; i < 2; i++) {
      TrajectoryRecord rec = run_trajectory(cfg, i);
      w.append(std::move(rec));
    }
  }
  RecordSet set = RecordSet::load_dir(dir);
  bool ok = set.entries.size() == 2 && set.configs.size() == 1 &&
            existing_pairs(dir).size() == 2;
  fs::remove_all(dir);
  t.pass = ok;
  return t;
}

int cmd_selftest() {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<SelfTest> results;
  std::vector<SelfTest (*)()> checks = {
      check_pure_cross_history, check_mixed_cross_history,
      check_clipped_gauge,      check_ssep_uniformity,
      check_analysis_oracles,   check_records_roundtrip,
  };
  for (auto* check : checks) {
    SelfTest t;
    try {
      t = check();
    } catch (const std::exception& e) {
      t.name = "unknown";
      t.detail = std::string("exception: ") + e.what();
      t.pass = false;
    }
    std::cout << (t.pass ? "[PASS] " : "[FAIL] ") << t.name << " ("
              << t.detail << ")\n";
    results.push_back(t);
  }
  int failures = 0;
  for (const auto& t : results) failures += t.pass ? 0 : 1;
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            t0)
                  .count();
  std::cout << "selftest: " << (results.size() - failures) << "/"
            << results.size() << " passed [" << fmt_seconds(dt) << "]\n";
  return failures == 0 ? 0 : 1;
}

int run_cli(int argc, char** argv) {
  CLI::App app{
      "diffmon: monitored Clifford circuits with diffusing measurers"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "records";
  std::vector<std::string> sets;
  int64_t samples = -1, seed = -1;
  int threads = 0;
  bool resume = false;

  CLI::App* run = app.add_subcommand("run", "simulate one sweep cell");
  run->add_option("--config", config_path, "config JSON file");
  run->add_option("--set", sets, "override, key=value (repeatable)");
  run->add_option("--samples", samples, "trajectory count");
  run->add_option("--seed", seed, "master seed");
  run->add_option("--out", out_dir, "record directory");
  run->add_option("--threads", threads,
                  "worker threads (default: DIFFMON_THREADS or 1)");
  run->add_flag("--resume", resume, "skip trajectories already on disk");

  std::string manifest_path;
  CLI::App* sweep =
      app.add_subcommand("sweep", "simulate a grid of cells from a manifest");
  sweep->add_option("manifest", manifest_path, "manifest JSON file")
      ->required();
  sweep->add_option("--set", sets, "base-config override (repeatable)");
  sweep->add_option("--samples", samples, "trajectory count per cell");
  sweep->add_option("--out", out_dir, "record directory");
  sweep->add_option("--threads", threads,
                    "worker threads (default: DIFFMON_THREADS or 1)");
  sweep->add_flag("--resume", resume, "skip trajectories already on disk");

  std::string records_dir = "records", analysis_dir = "analysis";
  std::vector<std::string> recipes;
  CLI::App* analyze =
      app.add_subcommand("analyze", "turn record files into tables and plots");
  analyze->add_option("--records", records_dir, "record directory");
  analyze->add_option("--recipe", recipes,
                      "recipe names (default: every recipe that applies)");
  analyze->add_option("--out", analysis_dir, "artifact directory");

  app.add_subcommand("selftest", "run the built-in oracle battery");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return cmd_run(config_path, sets, samples, seed, out_dir, threads,
                   resume);
  }
  if (sweep->parsed()) {
    return cmd_sweep(manifest_path, sets, samples, out_dir, threads, resume);
  }
  if (analyze->parsed()) {
    return cmd_analyze(records_dir, recipes, analysis_dir);
  }
  return cmd_selftest();
}

}  // namespace
}  // namespace diffmon

int main(int argc, char** argv) {
  try {
    return diffmon::run_cli(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "diffmon: error: " << e.what() << "\n";
    return 1;
  }
}
