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

#include <random>

#include "nilm/error.hpp"
#include "nilm/timeseries.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace nilm;

namespace {

const ActivationParams kKettle{3100.0, 2000.0, 12.0, 0.0};

std::string error_of(const std::filesystem::path& p) {
  try {
    load_csv(p);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("load_csv maps rows onto the grid") {
  testutil::TempDir dir("ts");
  testutil::write_file(dir / "a.csv", "timestamp,watts\n0,100\n6,100\n");
  const PowerSeries s = load_csv(dir / "a.csv");
  CHECK(s == PowerSeries{0, 6, {100.0, 100.0}});

  testutil::write_file(dir / "b.csv", "0,100\n6,100\n");
  CHECK(load_csv(dir / "b.csv") == s);
}

TEST_CASE("load_csv on an empty file gives an empty series") {
  testutil::TempDir dir("ts");
  testutil::write_file(dir / "e.csv", "");
  const PowerSeries s = load_csv(dir / "e.csv", 6);
  CHECK(s.empty());
  CHECK(s.sample_period == 6);
}

TEST_CASE("load_csv errors name the line") {
  testutil::TempDir dir("ts");
  testutil::write_file(dir / "neg.csv", "0,50\n6,-1\n");
  CHECK(error_of(dir / "neg.csv").find("negative power at line 2") != std::string::npos);

  testutil::write_file(dir / "bad.csv", "timestamp,watts\n0,50\n6;7\n");
  CHECK(error_of(dir / "bad.csv").find("line 3") != std::string::npos);

  testutil::write_file(dir / "order.csv", "0,50\n12,7\n6,7\n");
  const std::string msg = error_of(dir / "order.csv");
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("timestamp") != std::string::npos);
}

TEST_CASE("save_csv and load_csv round-trip") {
  testutil::TempDir dir("ts");
  const PowerSeries s{600, 6, {0.0, 12.5, 3000.25, 7.0}};
  save_csv(dir / "s.csv", s);
  CHECK(load_csv(dir / "s.csv") == s);
}

TEST_CASE("resample uses bin means") {
  const PowerSeries six{0, 6, {1, 2, 3}};
  CHECK(resample(six, 6) == six);
  CHECK(resample(PowerSeries{0, 1, {3, 3, 3, 3, 3, 3}}, 6).values == std::vector<double>{3});
  CHECK(resample(PowerSeries{0, 1, {0, 6, 0, 6, 0, 6}}, 6).values == std::vector<double>{3});
  // partial trailing bin dropped
  CHECK(resample(PowerSeries{0, 1, {1, 1, 1, 1, 1, 1, 9}}, 6).size() == 1);
  CHECK_THROWS_AS(resample(six, 9), ConfigError);
}

TEST_CASE("resample composes") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> w(0, 3000);
  PowerSeries s{0, 1, {}};
  for (int i = 0; i < 72; ++i) s.values.push_back(w(rng));
  const auto twice = resample(resample(s, 2), 6);
  const auto once = resample(s, 6);
  REQUIRE(twice.size() == once.size());
  for (std::size_t i = 0; i < once.size(); ++i)
    CHECK(twice.values[i] == doctest::Approx(once.values[i]).epsilon(1e-12));
  CHECK(twice.sample_period == 6);
}

TEST_CASE("fill_gaps forward-fills short gaps and zeroes long ones") {
  const std::vector<TimedSample> short_gap{{0, 10}, {18, 10}};
  CHECK(fill_gaps(short_gap).values == std::vector<double>{10, 10, 10, 10});

  const std::vector<TimedSample> long_gap{{0, 10}, {240, 10}};
  const PowerSeries s = fill_gaps(long_gap);
  REQUIRE(s.size() == 41);
  CHECK(s.values[0] == 10);
  for (std::size_t i = 1; i <= 39; ++i) CHECK(s.values[i] == 0);
  CHECK(s.values[40] == 10);

  const std::vector<TimedSample> none{{0, 1}, {6, 2}, {12, 3}};
  CHECK(fill_gaps(none).values == std::vector<double>{1, 2, 3});
}

TEST_CASE("fill_gaps boundary sits at 180 seconds") {
  // One-second grid: a gap of 179 missing seconds is filled, 181 is not.
  const std::vector<TimedSample> a{{0, 5}, {180, 7}};
  const PowerSeries fa = fill_gaps(a, 1);
  REQUIRE(fa.size() == 181);
  for (std::size_t i = 1; i < 180; ++i) CHECK(fa.values[i] == 5);

  const std::vector<TimedSample> b{{0, 5}, {182, 7}};
  const PowerSeries fb = fill_gaps(b, 1);
  REQUIRE(fb.size() == 183);
  for (std::size_t i = 1; i < 182; ++i) CHECK(fb.values[i] == 0);
  CHECK(fb.values[182] == 7);
}

TEST_CASE("fill_gaps length and snapping") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> step(1, 80);
  std::vector<TimedSample> rows;
  std::int64_t t = 1000;
  for (int i = 0; i < 200; ++i) {
    rows.push_back({t, 1.0 + i});
    t += 6 * step(rng);
  }
  const PowerSeries s = fill_gaps(rows);
  CHECK(s.size() == static_cast<std::size_t>((rows.back().timestamp - rows.front().timestamp) / 6 + 1));
  CHECK(s.start_time == 1000);

  // Off-grid timestamps snap to the nearest slot; later rows win.
  const std::vector<TimedSample> jitter{{0, 1}, {7, 2}, {11, 3}, {13, 4}};
  CHECK(fill_gaps(jitter).values == std::vector<double>{1, 2, 4});
}

TEST_CASE("extract_activations hand cases") {
  CHECK(extract_activations(PowerSeries{0, 6, {0, 100, 1999, 2000}}, kKettle).empty());

  const auto acts = extract_activations(PowerSeries{0, 6, {0, 2500, 2500, 2500, 0}}, kKettle);
  REQUIRE(acts.size() == 1);
  CHECK(acts[0].source_offset == 1);
  CHECK(acts[0].values == std::vector<double>{2500, 2500, 2500});

  // 18 s accepted, 6 s rejected with the kettle parameters
  CHECK(extract_activations(PowerSeries{0, 6, {0, 2500, 0}}, kKettle).empty());

  // Values above max_power are clipped, not rejected.
  const auto clipped = extract_activations(PowerSeries{0, 6, {0, 4000, 2500, 2500}}, kKettle);
  REQUIRE(clipped.size() == 1);
  CHECK(clipped[0].values == std::vector<double>{3100, 2500, 2500});
}

TEST_CASE("extract_activations merges across short dips") {
  // 10 s grid: 200 s on, 60 s below, 200 s on; each half alone is too short.
  const ActivationParams washer{2500.0, 20.0, 300.0, 160.0};
  PowerSeries s{0, 10, {}};
  s.values.assign(3, 0.0);
  s.values.insert(s.values.end(), 20, 500.0);
  s.values.insert(s.values.end(), 6, 5.0);
  s.values.insert(s.values.end(), 20, 500.0);
  s.values.insert(s.values.end(), 3, 0.0);
  const auto acts = extract_activations(s, washer);
  REQUIRE(acts.size() == 1);
  CHECK(acts[0].source_offset == 3);
  CHECK(acts[0].size() == 46);

  ActivationParams strict = washer;
  strict.min_off_duration = 60.0;  // 60 s is not shorter than 60 s
  CHECK(extract_activations(s, strict).empty());
}

TEST_CASE("extract_activations agrees with the brute-force oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    std::uniform_int_distribution<std::size_t> len(0, 200);
    std::uniform_int_distribution<int> level(0, 3);
    std::uniform_int_distribution<int> period_pick(1, 10);
    const std::int64_t period = period_pick(rng);
    PowerSeries s{0, period, std::vector<double>(len(rng))};
    for (double& v : s.values) v = level(rng) * 100.0;
    ActivationParams p;
    p.on_power_threshold = std::uniform_int_distribution<int>(0, 2)(rng) * 100.0 + 50.0;
    p.max_power = 250.0;
    p.min_on_duration = std::uniform_int_distribution<int>(0, 8)(rng) * period;
    p.min_off_duration = std::uniform_int_distribution<int>(0, 6)(rng) * period;

    const auto acts = extract_activations(s, p);
    const auto spans = oracle::activation_spans(s.values, p, static_cast<double>(period));
    REQUIRE(acts.size() == spans.size());
    for (std::size_t i = 0; i < acts.size(); ++i) {
      CHECK(acts[i].source_offset == spans[i].begin);
      CHECK(acts[i].end_offset() == spans[i].end);
      CHECK(static_cast<double>(acts[i].size()) * period >= p.min_on_duration);
      std::size_t dip = 0;
      for (std::size_t k = 0; k < acts[i].size(); ++k) {
        const double raw = s.values[acts[i].source_offset + k];
        CHECK(acts[i].values[k] == std::min(raw, p.max_power));
        dip = raw > p.on_power_threshold ? 0 : dip + 1;
        if (dip > 0) CHECK(static_cast<double>(dip) * period < p.min_off_duration);
      }
      if (i > 0) CHECK(acts[i - 1].end_offset() <= acts[i].source_offset);
    }
  }
}
