// Copyright 2026 The nilmkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nilm/architectures.hpp"
#include "nilm/error.hpp"
#include "nilm/hash.hpp"
#include "nilm/pipeline.hpp"
#include "nilm/world.hpp"
#include "test_util.hpp"

using namespace nilm;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// A small desk world with quick training settings.
fs::path small_world(const testutil::TempDir& dir, std::uint64_t seed = 5) {
  WorldOptions w = kettle_world();
  w.samples_per_house = 2500;
  const fs::path cfg = write_world(dir.path(), w, {1, 2}, {3}, seed);
  json j = json::parse(testutil::read_file(cfg));
  j["train"] = {{"update_budget", 6}, {"batch_size", 4}, {"std_sample_windows", 40}, {"log_every", 1}};
  std::ofstream(cfg) << j.dump(2);
  return cfg;
}

ExperimentConfig load(const fs::path& cfg) {
  auto c = load_config(cfg);
  c.validate();
  return c;
}

std::string hash_file(const fs::path& p) { return hex64(fnv1a64(testutil::read_file(p))); }

// Runs the command-line binary and returns its exit status.
int run_cli(const std::string& args) {
  const std::string cmd = std::string(NILM_CLI_PATH) + " -q " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(1, {"init", "kettle", "dae"}) == derive_seed(1, {"init", "kettle", "dae"}));
  CHECK(derive_seed(1, {"init", "kettle", "dae"}) != derive_seed(2, {"init", "kettle", "dae"}));
  CHECK(derive_seed(1, {"init", "kettle", "dae"}) != derive_seed(1, {"init", "kettle", "lstm"}));
}

TEST_CASE("checkpoint naming and discovery") {
  testutil::TempDir dir("ckpt");
  CHECK(checkpoint_path(dir.path(), "kettle", "dae", 40).filename() == "kettle_dae_40.cbor");
  for (int s : {5, 40, 100, 9}) testutil::write_file(checkpoint_path(dir.path(), "kettle", "dae", s), "x");
  testutil::write_file(checkpoint_path(dir.path(), "fridge", "dae", 500), "x");
  CHECK(latest_checkpoint(dir.path(), "kettle", "dae").filename() == "kettle_dae_100.cbor");
  CHECK_THROWS_AS(latest_checkpoint(dir.path(), "kettle", "lstm"), DataError);
}

TEST_CASE("extract: counts table follows the config order") {
  testutil::TempDir dir("extract");
  const auto config = load(small_world(dir));
  const auto summary = cmd_extract(config, {});
  CHECK(summary.houses == std::vector<int>{1, 2, 3});
  CHECK(summary.appliances == std::vector<std::string>{"kettle", "heater", "fridge"});
  for (const auto& row : summary.counts)
    for (long n : row) CHECK(n > 0);
  const auto store = load_activation_store(layout_for(config).activations());
  CHECK(static_cast<long>(store.at("kettle").at(1).activations.size()) == summary.counts[0][0]);
  CHECK(store.at("kettle").at(2).channel_samples == 2500);
}

TEST_CASE("extract: pulse and empty channel") {
  testutil::TempDir dir("pulse");
  std::ostringstream mains, kettle;
  for (int i = 0; i < 20; ++i) {
    const double k = (i >= 5 && i < 8) ? 2500 : 0;  // 3 samples = 18 s
    mains << 1000 + 6 * i << ',' << 100 + k << '\n';
    kettle << 1000 + 6 * i << ',' << k << '\n';
  }
  testutil::write_file(dir / "h1/mains.csv", mains.str());
  testutil::write_file(dir / "h1/kettle.csv", kettle.str());
  testutil::write_file(dir / "h2/mains.csv", mains.str());
  testutil::write_file(dir / "h2/kettle.csv", "");
  testutil::write_file(dir / "c.json", R"({
    "schema_version": 1, "seed": 1,
    "houses": [
      {"id": 1, "mains": "h1/mains.csv", "channels": {"kettle": "h1/kettle.csv"}},
      {"id": 2, "mains": "h2/mains.csv", "channels": {"kettle": "h2/kettle.csv"}}],
    "appliances": [{"id": "kettle", "max_power": 3100, "on_power_threshold": 2000,
      "min_on_duration": 12, "min_off_duration": 0, "window_width": 128,
      "train_houses": [1], "test_houses": [2]}]})");
  const auto config = load(dir / "c.json");
  const auto summary = cmd_extract(config, {});
  CHECK(summary.counts[0][0] == 1);
  CHECK(summary.counts[1][0] == 0);
  CHECK(run_cli("--config " + (dir / "c.json").string() + " extract") == 0);
}

TEST_CASE("train: budget 0 writes the initial weights") {
  testutil::TempDir dir("budget0");
  auto config = load(small_world(dir));
  config.train.update_budget = 0;
  cmd_extract(config, {});
  const auto out = cmd_train(config, "kettle", ArchitectureKind::dae, {});
  CHECK(out.result.steps_completed == 0);
  const fs::path ckpt = checkpoint_path(out.model_dir, "kettle", "dae", 0);
  REQUIRE(fs::exists(ckpt));
  Checkpoint meta;
  const Network loaded = load_checkpoint(ckpt, &meta);
  CHECK(meta.manifest_hash == load_manifest(out.model_dir / "manifest.json").hash());
  const Network fresh = build_network(
      architecture_spec(ArchitectureKind::dae, config.window_width(config.appliance("kettle")),
                        config.architecture_options()),
      derive_seed(config.seed, {"init", "kettle", "dae"}));
  CHECK(loaded.parameter_values() == fresh.parameter_values());
}

TEST_CASE("train: same seed gives identical loss logs and checkpoints") {
  testutil::TempDir a("train-a"), b("train-b");
  std::vector<std::string> hashes;
  for (const auto* dir : {&a, &b}) {
    const auto config = load(small_world(*dir));
    cmd_extract(config, {});
    const auto out = cmd_train(config, "kettle", ArchitectureKind::rectangles, {});
    CHECK(out.result.steps_completed == 6);
    hashes.push_back(hash_file(out.model_dir / "loss.csv") +
                     hash_file(checkpoint_path(out.model_dir, "kettle", "rectangles", 6)) +
                     hash_file(out.model_dir / "manifest.json"));
  }
  CHECK(hashes[0] == hashes[1]);
  const std::string log = testutil::read_file(layout_for(load(a / "config.json")).model_dir("kettle", "rectangles") / "loss.csv");
  CHECK(log.starts_with("step,"));
}

TEST_CASE("train: divergence is a numeric failure") {
  testutil::TempDir dir("diverge");
  auto config = load(small_world(dir));
  config.optimizer.learning_rate = 1e200;
  config.optimizer.gradient_clip.reset();
  cmd_extract(config, {});
  CHECK_THROWS_AS(cmd_train(config, "kettle", ArchitectureKind::dae, {}), NumericError);
  const fs::path mdir = layout_for(config).model_dir("kettle", "dae");
  CHECK_NOTHROW(latest_checkpoint(mdir, "kettle", "dae"));
}

TEST_CASE("disaggregate: networks, baselines, refusal and empty input") {
  testutil::TempDir dir("disagg");
  const auto config = load(small_world(dir));
  cmd_extract(config, {});
  cmd_train(config, "kettle", ArchitectureKind::dae, {});
  const Layout layout = layout_for(config);

  const auto paths = cmd_disaggregate(config, "kettle", "dae", 3, {});
  REQUIRE(paths.size() == 1);
  const auto est = load_estimate_csv(paths[0]);
  CHECK(est.power.size() == 2500);
  const json run = json::parse(testutil::read_file(layout.run_report(3, "kettle", "dae")));
  CHECK(run["config_hash"] == config.hash());
  CHECK(run.contains("checkpoint_hash"));
  CHECK(run["runtime_s"] == 0.0);

  const auto first = hash_file(paths[0]);
  cmd_disaggregate(config, "kettle", "dae", 3, {});
  CHECK(hash_file(paths[0]) == first);

  // baselines route through the state models and write every appliance
  const auto co = cmd_disaggregate(config, "", "co", 3, {});
  CHECK(co.size() == 3);
  CHECK(fs::exists(layout.baseline_models()));
  CHECK(fs::exists(layout.estimate(3, "fridge", "co")));

  // tampered manifest
  const fs::path manifest = layout.model_dir("kettle", "dae") / "manifest.json";
  json m = json::parse(testutil::read_file(manifest));
  m["input_std"] = m["input_std"].get<double>() * 2;
  std::ofstream(manifest) << m.dump();
  CHECK_THROWS_WITH_AS(cmd_disaggregate(config, "kettle", "dae", 3, {}), doctest::Contains("manifest"),
                       DataError);

  // zero-length aggregate
  testutil::write_file(dir / "house_3/mains.csv", "");
  const auto empty = cmd_disaggregate(config, "", "co", 3, {});
  CHECK(load_estimate_csv(empty[0]).power.empty());
}

TEST_CASE("evaluate and report: perfect estimates, seven metrics, byte-identical reruns") {
  testutil::TempDir dir("evaluate");
  const auto config = load(small_world(dir));
  const Layout layout = layout_for(config);
  const PowerSeries mains = load_csv(dir / "house_3/mains.csv", 6);
  const PowerSeries kettle = load_csv(dir / "house_3/kettle.csv", 6);
  REQUIRE(kettle.size() == mains.size());
  fs::create_directories(layout.estimate(3, "kettle", "co").parent_path());
  save_estimate_csv(layout.estimate(3, "kettle", "co"), EstimateSeries{kettle, {}});

  const fs::path report = cmd_evaluate(config, 3, {});
  const json j = json::parse(testutil::read_file(report));
  REQUIRE(j["results"].size() == 1);
  const auto& metrics = j["results"][0]["metrics"];
  CHECK(metrics.size() == 7);
  CHECK(metrics["f1"] == 1.0);
  CHECK(metrics["relative_error_total_energy"] == 0.0);
  CHECK(metrics["mean_absolute_error"] == 0.0);
  CHECK(metrics["proportion_energy_correct"] == 1.0);

  const auto before = hash_file(report);
  fs::path csv = report;
  csv.replace_extension(".csv");
  const auto before_csv = hash_file(csv);
  cmd_evaluate(config, 3, {});
  CHECK(hash_file(report) == before);
  CHECK(hash_file(csv) == before_csv);

  const fs::path combined = cmd_report(config, {});
  const auto combined_hash = hash_file(combined);
  cmd_report(config, {});
  CHECK(hash_file(combined) == combined_hash);

  // shifted estimate is refused with timestamps in the message
  PowerSeries shifted = kettle;
  shifted.start_time += 6;
  save_estimate_csv(layout.estimate(3, "kettle", "co"), EstimateSeries{shifted, {}});
  CHECK_THROWS_WITH_AS(cmd_evaluate(config, 3, {}), doctest::Contains(std::to_string(shifted.start_time).c_str()),
                       DataError);
}

TEST_CASE("command-line exit codes") {
  testutil::TempDir dir("cli");
  const std::string cfg = small_world(dir).string();
  CHECK(run_cli("") == 1);
  CHECK(run_cli("--config " + cfg + " frobnicate") == 1);
  CHECK(run_cli("--config " + (dir / "missing.json").string() + " extract") == 2);
  CHECK(run_cli("--config " + cfg + " --profile laptop extract") == 1);
  CHECK(run_cli("--config " + cfg + " extract") == 0);
  CHECK(run_cli("--config " + cfg + " train --appliance kettle --kind gru") == 1);
  CHECK(run_cli("--config " + cfg + " train --appliance toaster --kind dae") == 1);
  CHECK(run_cli("--config " + cfg + " disaggregate --appliance kettle --kind dae --house 3") == 2);
  CHECK(run_cli("--config " + cfg + " synth-preview --appliance kettle --windows 3") == 0);
  CHECK(fs::exists(dir / "out/preview/kettle.csv"));
  CHECK(run_cli("--config " + cfg + " disaggregate --baseline co") == 0);
  CHECK(run_cli("--config " + cfg + " evaluate") == 0);
  CHECK(run_cli("--config " + cfg + " report") == 0);

  json j = json::parse(testutil::read_file(cfg));
  j["optimizer"] = {{"learning_rate", 1e200}, {"gradient_clip", nullptr}};
  std::ofstream(cfg) << j.dump(2);
  CHECK(run_cli("--config " + cfg + " train --appliance kettle --kind dae") == 3);
}
