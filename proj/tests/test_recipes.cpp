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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "diffmon/recipes.hpp"
#include "diffmon/records.hpp"
#include "doctest.h"

namespace diffmon {
namespace {

namespace fs = std::filesystem;

// Builds a RecordSet in memory, the same shape the loader produces.
struct SetBuilder {
  RecordSet set;

  SetBuilder() { set.content_hash = sha256_hex("synthetic test input"); }

  void add(const ExperimentConfig& cfg, TrajectoryRecord rec) {
    std::string digest = config_digest(cfg);
    set.configs.emplace(digest, cfg);
    rec.config_digest = digest;
    set.entries.push_back({digest, std::move(rec)});
  }
};

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> comments;
};

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      csv.comments.push_back(line);
      continue;
    }
    std::vector<std::string> fields;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) fields.push_back(cell);
    if (csv.header.empty()) {
      csv.header = fields;
    } else {
      csv.rows.push_back(fields);
    }
  }
  return csv;
}

const Artifact& find_artifact(const std::vector<Artifact>& artifacts,
                              const std::string& name) {
  for (const auto& a : artifacts) {
    if (a.name == name) return a;
  }
  REQUIRE_MESSAGE(false, "artifact not produced: " << name);
  static Artifact dummy;
  return dummy;
}

void check_provenance(const std::vector<Artifact>& artifacts,
                      const RecordSet& set) {
  for (const auto& a : artifacts) {
    if (a.name.size() < 4 || a.name.substr(a.name.size() - 4) != ".csv")
      continue;
    CAPTURE(a.name);
    CHECK(a.bytes.rfind("# diffmon recipe=", 0) == 0);
    CHECK(a.bytes.find("# inputs_sha256=" + set.content_hash) !=
          std::string::npos);
  }
}

ExperimentConfig base_config(Protocol protocol, ModelVariant variant,
                             size_t n, double p) {
  ExperimentConfig cfg;
  cfg.protocol = protocol;
  cfg.variant = variant;
  cfg.num_sites = n;
  cfg.p = p;
  return cfg;
}

TEST_CASE("recipe registry is closed and empty inputs fail loudly") {
  CHECK(recipe_names().size() == 8);
  RecordSet empty;
  CHECK_THROWS_WITH_AS(run_recipe("fig5-imaginary", empty),
                       doctest::Contains("fig5-imaginary"),
                       std::invalid_argument);
  for (const auto& name : recipe_names()) {
    CHECK_THROWS_WITH_AS(run_recipe(name, empty),
                         doctest::Contains(name.c_str()), std::runtime_error);
  }
}

TEST_CASE("fig2a locates the mutual information peak per size") {
  SetBuilder b;
  // A clean parabola peaked at p = 0.16, five samples per point with a tiny
  // deterministic spread so the error bars are finite.
  for (int ip = 0; ip < 7; ip++) {
    double p = 0.10 + 0.02 * ip;
    double ami = 0.16 - 3.0 * (p - 0.16) * (p - 0.16);
    for (int s = -2; s <= 2; s++) {
      TrajectoryRecord rec;
      rec.trajectory_index = static_cast<uint64_t>(5 * ip + s + 2);
      rec.add_scalar("ami_tail_mean", ami + 1e-3 * s);
      b.add(base_config(Protocol::kSteadyState, ModelVariant::kDiffusive, 32,
                        p),
            std::move(rec));
    }
  }
  // A second size with too few p values to fit: must be skipped, not fatal.
  for (int ip = 0; ip < 4; ip++) {
    double p = 0.12 + 0.02 * ip;
    TrajectoryRecord rec;
    rec.add_scalar("ami_tail_mean", 0.1 + 0.01 * ip);
    b.add(base_config(Protocol::kSteadyState, ModelVariant::kDiffusive, 64, p),
          std::move(rec));
  }

  auto artifacts = run_recipe("fig2a-ami-peak", b.set);
  check_provenance(artifacts, b.set);
  Csv ami = parse_csv(find_artifact(artifacts, "fig2a_ami.csv").bytes);
  CHECK(ami.rows.size() == 11);  // 7 + 4 cells
  Csv peaks = parse_csv(find_artifact(artifacts, "fig2a_peaks.csv").bytes);
  REQUIRE(peaks.rows.size() == 1);
  CHECK(peaks.rows[0][0] == "diffusive");
  CHECK(peaks.rows[0][1] == "32");
  CHECK(std::stod(peaks.rows[0][2]) == doctest::Approx(0.16).epsilon(0.02));
  CHECK(std::stod(peaks.rows[0][4]) < 0);  // concave
  bool skipped_64 = false;
  for (const auto& c : peaks.comments) {
    if (c.find("n=64") != std::string::npos &&
        c.find("fewer than 5") != std::string::npos) {
      skipped_64 = true;
    }
  }
  CHECK(skipped_64);
  CHECK(find_artifact(artifacts, "fig2a.svg").bytes.find("<svg") !=
        std::string::npos);
}

TEST_CASE("fig2b recovers a planted dynamical exponent of two") {
  SetBuilder b;
  for (size_t n : {16, 32, 64, 128}) {
    for (int i = 0; i < 31; i++) {
      TrajectoryRecord rec;
      rec.trajectory_index = static_cast<uint64_t>(i);
      // Ramp around the median: the middle order statistic is exactly n^2.
      double tau = static_cast<double>(n) * n * (0.9 + 0.2 * i / 30.0);
      rec.add_scalar("tau_p", tau);
      rec.add_scalar("purified", 1.0);
      b.add(base_config(Protocol::kPurification, ModelVariant::kDiffusive, n,
                        0.16),
            std::move(rec));
    }
  }
  auto artifacts = run_recipe("fig2b-purification", b.set);
  check_provenance(artifacts, b.set);

  Csv taus = parse_csv(find_artifact(artifacts, "fig2b_tau.csv").bytes);
  REQUIRE(taus.rows.size() == 4);
  for (const auto& row : taus.rows) {
    CHECK(row[0] == "diffusive");
    CHECK(std::stod(row[3]) == 1.0);  // purified_fraction
    double n = std::stod(row[1]);
    CHECK(std::stod(row[4]) == doctest::Approx(n * n).epsilon(1e-9));
  }

  Csv fit = parse_csv(find_artifact(artifacts, "fig2b_fit.csv").bytes);
  REQUIRE(fit.rows.size() == 1);
  CHECK(fit.rows[0][0] == "diffusive");
  CHECK(std::stod(fit.rows[0][1]) == doctest::Approx(2.0).epsilon(0.01));
  // Three local slopes for four sizes, all near two.
  std::istringstream slopes(fit.rows[0][8]);
  std::string tok;
  size_t n_slopes = 0;
  while (std::getline(slopes, tok, ';')) {
    CHECK(std::stod(tok) == doctest::Approx(2.0).epsilon(0.05));
    n_slopes++;
  }
  CHECK(n_slopes == 3);
}

// Shared builder for the growth-tail fixture: each variant gets a planted
// survival law, realized exactly as counts over 500 trajectories.
void add_tail_variant(SetBuilder& b, ModelVariant variant,
                      double (*planted)(double)) {
  const size_t m = 500;
  std::vector<double> grid;
  for (double t = 4.0; t < 200.0; t *= 1.3) grid.push_back(t);
  ExperimentConfig cfg = base_config(Protocol::kGrowth, variant, 64, 0.3);
  cfg.periodic = false;
  for (size_t r = 0; r < m; r++) {
    TrajectoryRecord rec;
    rec.trajectory_index = r;
    ProbeSeries s;
    s.name = "s_cut";
    for (double t : grid) {
      size_t low = static_cast<size_t>(std::lround(m * planted(t)));
      s.points.push_back({t, r < low ? 0.0 : 40.0});
    }
    rec.series.push_back(std::move(s));
    b.add(cfg, std::move(rec));
  }
}

TEST_CASE("fig3 ranks each planted tail law first") {
  SetBuilder b;
  add_tail_variant(b, ModelVariant::kDiffusive,
                   [](double t) { return std::exp(-0.3 * std::sqrt(t)); });
  add_tail_variant(b, ModelVariant::kUncorrelated,
                   [](double t) { return std::exp(-0.02 * t); });
  add_tail_variant(b, ModelVariant::kQuenched,
                   [](double t) { return std::pow(t / 4.0, -1.3); });

  auto artifacts = run_recipe("fig3-volume-tails", b.set);
  check_provenance(artifacts, b.set);
  Csv ranking = parse_csv(find_artifact(artifacts, "fig3_ranking.csv").bytes);
  REQUIRE(ranking.rows.size() == 9);  // 3 variants x 3 models
  std::map<std::string, std::string> first_model;
  for (const auto& row : ranking.rows) {
    if (row[1] == "1") first_model[row[0]] = row[2];
    CHECK(std::stod(row[3]) > 0);  // slopes all positive
  }
  CHECK(first_model["diffusive"] == "sqrt_t");
  CHECK(first_model["uncorrelated"] == "t");
  CHECK(first_model["quenched"] == "log_t");

  Csv tails = parse_csv(find_artifact(artifacts, "fig3_tails.csv").bytes);
  CHECK(tails.rows.size() > 30);
  CHECK(find_artifact(artifacts, "fig3.svg").bytes.find("<svg") !=
        std::string::npos);
}

TEST_CASE("fig3 names the variants it is missing") {
  SetBuilder b;
  add_tail_variant(b, ModelVariant::kDiffusive,
                   [](double t) { return std::exp(-0.3 * std::sqrt(t)); });
  CHECK_THROWS_WITH_AS(run_recipe("fig3-volume-tails", b.set),
                       doctest::Contains("quenched"), std::runtime_error);
  CHECK_THROWS_WITH_AS(run_recipe("fig3-volume-tails", b.set),
                       doctest::Contains("uncorrelated"), std::runtime_error);
}

TEST_CASE("fig4 fits the area-phase decay and the survival rate") {
  SetBuilder b;
  // Panel a input: mean cut entropy shaped so log(S sqrt(t) / N) falls as
  // -0.4 sqrt(t), exactly.
  {
    ExperimentConfig cfg =
        base_config(Protocol::kGrowth, ModelVariant::kDiffusive, 32, 0.5);
    cfg.periodic = false;
    for (int r = 0; r < 5; r++) {
      TrajectoryRecord rec;
      rec.trajectory_index = static_cast<uint64_t>(r);
      ProbeSeries s;
      s.name = "s_cut";
      for (double t = 1.0; t < 120.0; t *= 1.5) {
        double x = std::sqrt(t);
        s.points.push_back({t, 32.0 * std::exp(-0.4 * x) / x});
      }
      rec.series.push_back(std::move(s));
      b.add(cfg, std::move(rec));
    }
  }
  // Panel b input: purification times exponential in t / N with rate 0.7.
  {
    ExperimentConfig cfg = base_config(Protocol::kPurification,
                                       ModelVariant::kDiffusive, 32, 0.5);
    for (int r = 0; r < 32; r++) {
      TrajectoryRecord rec;
      rec.trajectory_index = static_cast<uint64_t>(r);
      double u = -std::log((r + 0.5) / 32.0) / 0.7;
      rec.add_scalar("tau_p", 32.0 * u);
      rec.add_scalar("purified", 1.0);
      b.add(cfg, std::move(rec));
    }
  }

  auto artifacts = run_recipe("fig4-area-tails", b.set);
  check_provenance(artifacts, b.set);
  Csv afit = parse_csv(find_artifact(artifacts, "fig4_area_fit.csv").bytes);
  REQUIRE(afit.rows.size() == 1);
  CHECK(afit.rows[0][0] == "32");
  CHECK(std::stod(afit.rows[0][1]) == doctest::Approx(-0.4).epsilon(0.01));
  CHECK(std::stod(afit.rows[0][3]) > 0.999);  // r squared

  Csv rates = parse_csv(find_artifact(artifacts, "fig4_rates.csv").bytes);
  REQUIRE(rates.rows.size() == 1);
  CHECK(std::stod(rates.rows[0][1]) == doctest::Approx(0.7).epsilon(0.2));

  Csv surv = parse_csv(find_artifact(artifacts, "fig4_survival.csv").bytes);
  CHECK(surv.rows.size() == 48);  // u = 0.25 .. 12 by 0.25
  CHECK_THROWS_WITH_AS(
      run_recipe("fig4-area-tails",
                 [] { SetBuilder only; return only.set; }()),
      doctest::Contains("growth"), std::runtime_error);
}

TEST_CASE("s1 fits a collapse from a synthetic scaling family") {
  SetBuilder b;
  const double p_c = 0.16, nu = 1.3, beta = 0.25;
  for (size_t n : {16, 32, 64}) {
    for (int ip = 0; ip < 5; ip++) {
      double p = 0.12 + 0.02 * ip;
      double x = std::pow(n, 1.0 / nu) * (p - p_c);
      double y = std::pow(n, beta) / (1.0 + x * x);
      for (int s = -1; s <= 1; s++) {
        TrajectoryRecord rec;
        rec.add_scalar("ami_tail_mean", y * (1.0 + 0.004 * s));
        b.add(base_config(Protocol::kSteadyState, ModelVariant::kDiffusive, n,
                          p),
              std::move(rec));
      }
    }
  }
  auto artifacts = run_recipe("s1-collapse", b.set);
  check_provenance(artifacts, b.set);
  Csv fit = parse_csv(find_artifact(artifacts, "s1_fit.csv").bytes);
  REQUIRE(fit.rows.size() == 1);
  CHECK(std::stod(fit.rows[0][0]) == doctest::Approx(p_c).epsilon(0.05));
  CHECK(std::stod(fit.rows[0][3]) == doctest::Approx(nu).epsilon(0.25));
  Csv land = parse_csv(find_artifact(artifacts, "s1_landscape.csv").bytes);
  CHECK(land.rows.size() == 21 * 20);
  find_artifact(artifacts, "s1_collapse.svg");
}

TEST_CASE("s2 tabulates the charge-conserving purification checks") {
  SetBuilder b;
  ExperimentConfig cfg =
      base_config(Protocol::kU1, ModelVariant::kU1Symmetric, 16, 0.25);
  for (int r = 0; r < 10; r++) {
    TrajectoryRecord rec;
    rec.trajectory_index = static_cast<uint64_t>(r);
    bool done = r != 3;  // one censored trajectory
    rec.add_scalar("purified", done ? 1.0 : 0.0);
    rec.add_scalar("product_z_final", done ? 1.0 : 0.0);
    rec.add_scalar("tau_p", done ? 20.0 + r : 1600.0);
    rec.add_scalar("monotone_violations", 0.0);
    b.add(cfg, std::move(rec));
  }
  auto artifacts = run_recipe("s2-u1-check", b.set);
  check_provenance(artifacts, b.set);
  Csv table = parse_csv(find_artifact(artifacts, "s2_u1.csv").bytes);
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0][0] == "16");
  CHECK(table.rows[0][2] == "10");
  CHECK(std::stod(table.rows[0][3]) == 0.9);
  CHECK(std::stod(table.rows[0][4]) == 0.9);
  CHECK(std::stod(table.rows[0][6]) == 0.0);
  CHECK(std::stod(table.rows[0][7]) == 1600.0);  // ceil(100 log2 16 / 0.25)
}

TEST_CASE("s4 pools code lengths past the settling margin") {
  SetBuilder b;
  ExperimentConfig cfg =
      base_config(Protocol::kCodeLength, ModelVariant::kDiffusive, 16, 0.3);
  {
    TrajectoryRecord rec;
    rec.trajectory_index = 0;
    rec.add_scalar("entangled", 1.0);
    rec.add_scalar("t_entangle", 10.0);
    rec.add_scalar("overlap_violations", 0.0);
    ProbeSeries dmin;
    dmin.name = "d_min";
    // First point sits inside the settling margin and must not be pooled.
    dmin.points = {{12.0, 9.0}, {16.0, 3.0}, {20.0, 5.0}};
    rec.series.push_back(dmin);
    for (const char* name : {"d_x", "d_y", "d_z"}) {
      ProbeSeries s;
      s.name = name;
      s.points = {{16.0, 4.0}, {20.0, 6.0}};
      rec.series.push_back(s);
    }
    b.add(cfg, std::move(rec));
  }
  {
    TrajectoryRecord rec;  // never entangled: contributes only to the count
    rec.trajectory_index = 1;
    rec.add_scalar("entangled", 0.0);
    b.add(cfg, std::move(rec));
  }
  auto artifacts = run_recipe("s4-codelength", b.set);
  check_provenance(artifacts, b.set);
  Csv hist = parse_csv(find_artifact(artifacts, "s4_hist.csv").bytes);
  REQUIRE(hist.rows.size() == 2);
  CHECK(hist.rows[0][0] == "3");
  CHECK(std::stod(hist.rows[0][2]) == 0.5);
  CHECK(hist.rows[1][0] == "5");
  Csv summary = parse_csv(find_artifact(artifacts, "s4_summary.csv").bytes);
  REQUIRE(summary.rows.size() == 1);
  CHECK(summary.rows[0][0] == "2");  // records
  CHECK(summary.rows[0][1] == "1");  // entangled
  CHECK(summary.rows[0][3] == "2");  // pooled
  CHECK(summary.rows[0][4] == "0");  // zero-length probes

  // All probes inside the margin: the pool is empty and that is an error.
  SetBuilder early;
  TrajectoryRecord rec;
  rec.add_scalar("entangled", 1.0);
  rec.add_scalar("t_entangle", 10.0);
  ProbeSeries dmin;
  dmin.name = "d_min";
  dmin.points = {{11.0, 2.0}};
  rec.series.push_back(dmin);
  early.add(cfg, std::move(rec));
  CHECK_THROWS_WITH_AS(run_recipe("s4-codelength", early.set),
                       doctest::Contains("settling margin"),
                       std::runtime_error);
}

TEST_CASE("s6 recovers a planted wandering exponent") {
  SetBuilder b;
  const double beta = 0.3;
  for (size_t n : {16, 32, 64, 128}) {
    for (int i = 0; i < 40; i++) {
      TrajectoryRecord rec;
      rec.trajectory_index = static_cast<uint64_t>(i);
      double variance =
          0.5 * std::pow(n, 2 * beta) * (0.98 + 0.04 * i / 39.0);
      rec.add_scalar("w_variance_at_tau_p", variance);
      rec.add_scalar("purified", 1.0);
      rec.add_scalar("tau_p", 10.0 + i);
      b.add(base_config(Protocol::kPurification, ModelVariant::kDiffusive, n,
                        0.33),
            std::move(rec));
    }
  }
  auto artifacts = run_recipe("s6-hyperuniformity", b.set);
  check_provenance(artifacts, b.set);
  Csv sigma = parse_csv(find_artifact(artifacts, "s6_sigma.csv").bytes);
  REQUIRE(sigma.rows.size() == 4);
  for (const auto& row : sigma.rows) {
    CHECK(std::stod(row[2]) > 0);
    double ks = std::stod(row[5]);
    CHECK(ks >= 0.0);
    CHECK(ks <= 1.0);
  }
  Csv fit = parse_csv(find_artifact(artifacts, "s6_fit.csv").bytes);
  REQUIRE(fit.rows.size() == 1);
  CHECK(std::stod(fit.rows[0][0]) == doctest::Approx(beta).epsilon(0.05));
}

TEST_CASE("recipes are bitwise deterministic") {
  SetBuilder b;
  for (size_t n : {16, 32, 64, 128}) {
    for (int i = 0; i < 31; i++) {
      TrajectoryRecord rec;
      rec.trajectory_index = static_cast<uint64_t>(i);
      rec.add_scalar("tau_p", static_cast<double>(n) * n *
                                  (0.9 + 0.2 * i / 30.0));
      rec.add_scalar("purified", 1.0);
      rec.add_scalar("w_variance_at_tau_p", 0.1 * n * (1.0 + 0.01 * i));
      b.add(base_config(Protocol::kPurification, ModelVariant::kDiffusive, n,
                        0.16),
            std::move(rec));
    }
  }
  for (const char* name : {"fig2b-purification", "s6-hyperuniformity"}) {
    auto first = run_recipe(name, b.set);
    auto second = run_recipe(name, b.set);
    REQUIRE(first.size() == second.size());
    for (size_t i = 0; i < first.size(); i++) {
      CHECK(first[i].name == second[i].name);
      CHECK(first[i].bytes == second[i].bytes);
    }
  }
}

TEST_CASE("write_artifacts reproduces bytes on disk") {
  fs::path dir = fs::temp_directory_path() / "diffmon_artifacts_test";
  fs::remove_all(dir);
  std::vector<Artifact> artifacts = {
      {"table.csv", "# header\na,b\n1,2\n"},
      {"figure.svg", "<svg xmlns=\"http://www.w3.org/2000/svg\"></svg>\n"},
  };
  write_artifacts(artifacts, dir / "nested");
  for (const auto& a : artifacts) {
    std::ifstream in(dir / "nested" / a.name, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == a.bytes);
  }
  fs::remove_all(dir);
}

}  // namespace
}  // namespace diffmon
