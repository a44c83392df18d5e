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

#include <cmath>
#include <numbers>
#include <random>

#include "nilm/baselines.hpp"
#include "nilm/error.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace nilm;

namespace {

ApplianceStateModel two_state(const std::string& id, double watts) {
  ApplianceStateModel m;
  m.appliance_id = id;
  m.state_powers = {0.0, watts};
  m.transition = {{0.9, 0.1}, {0.2, 0.8}};
  m.initial = {0.7, 0.3};
  m.emission_std = {10.0, 20.0};
  return m;
}

PowerSeries series(std::vector<double> v) {
  PowerSeries s;
  s.start_time = 60;
  s.sample_period = 6;
  s.values = std::move(v);
  return s;
}

}  // namespace

TEST_CASE("fit_states examples") {
  const std::vector<Activation> kettle{{0, {2000, 2000, 2000}}, {50, {2000, 2000}}};
  const auto m = fit_states("kettle", kettle, 2);
  CHECK(m.state_powers == std::vector<double>{0, 2000});
  CHECK_NOTHROW(m.validate());
  CHECK(m.emission_std[1] == 10.0);
  for (const auto& row : m.transition) {
    double s = 0;
    for (double p : row) s += p;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }

  CHECK_THROWS_AS(fit_states("kettle", std::vector<Activation>{}, 2), DataError);
  CHECK_THROWS_AS(fit_states("kettle", kettle, 1), ConfigError);

  std::vector<std::string> warnings;
  const auto reduced = fit_states("kettle", kettle, 4, {}, &warnings);
  CHECK(reduced.states() == 2);
  CHECK(warnings.size() == 1);
}

TEST_CASE("kmeans on two blobs") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> jitter(-5, 5);
  std::vector<double> values;
  for (int i = 0; i < 300; ++i) values.push_back(100 + jitter(rng));
  for (int i = 0; i < 100; ++i) values.push_back(1900 + jitter(rng));
  const auto c = kmeans_1d(values, 2);
  REQUIRE(c.size() == 2);
  CHECK(std::abs(c[0] - 100) <= 5);
  CHECK(std::abs(c[1] - 1900) <= 5);

  std::vector<Activation> acts{{0, values}};
  const auto m = fit_states("x", acts, 3);
  REQUIRE(m.states() == 3);
  CHECK(std::abs(m.state_powers[1] - 100) <= 5);
  CHECK(std::abs(m.state_powers[2] - 1900) <= 5);
}

TEST_CASE("CO examples") {
  const std::vector<ApplianceStateModel> models{two_state("a", 100), two_state("b", 60)};
  const auto path = co_assign(std::vector<double>{0, 160, 90}, models);
  CHECK(path[0] == std::vector<std::size_t>{0, 0});
  CHECK(path[1] == std::vector<std::size_t>{1, 1});
  CHECK(path[2] == std::vector<std::size_t>{1, 0});

  const auto est = co_disaggregate(series({0, 160, 90}), models);
  REQUIRE(est.size() == 2);
  CHECK(est[0].power.values == std::vector<double>{0, 100, 100});
  CHECK(est[1].power.values == std::vector<double>{0, 60, 0});
  CHECK(est[0].power.start_time == 60);
}

TEST_CASE("CO ties go to the lowest total, then lexicographic order") {
  // 50 is equidistant from 0 and 100.
  const std::vector<ApplianceStateModel> a{two_state("a", 100)};
  CHECK(co_assign(std::vector<double>{50}, a)[0] == std::vector<std::size_t>{0});
  // Equal totals: a on or b on; the first appliance's lower state wins.
  const std::vector<ApplianceStateModel> ab{two_state("a", 100), two_state("b", 100)};
  CHECK(co_assign(std::vector<double>{100}, ab)[0] == std::vector<std::size_t>{0, 1});
}

TEST_CASE("CO matches exhaustive search") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> y(0, 6000);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ApplianceStateModel> models;
    for (int i = 0; i < 4; ++i) models.push_back(oracle::random_model(2 + i % 3, rng, "m" + std::to_string(i)));
    std::vector<double> agg(50);
    for (double& v : agg) v = y(rng);
    const auto path = co_assign(agg, models);
    for (std::size_t t = 0; t < agg.size(); ++t)
      CHECK(std::abs(agg[t] - oracle::total_power(models, path[t])) ==
            doctest::Approx(oracle::co_min_residual(models, agg[t])));
  }
}

TEST_CASE("CO combination guard") {
  std::mt19937_64 rng(43);
  std::vector<ApplianceStateModel> models;
  for (int i = 0; i < 7; ++i) models.push_back(oracle::random_model(8, rng, "m"));
  try {
    co_assign(std::vector<double>{1.0}, models);
    FAIL("expected a guard error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("fewer states") != std::string::npos);
  }
}

TEST_CASE("FHMM single appliance is plain Viterbi") {
  const auto m = two_state("a", 1000);
  const std::vector<ApplianceStateModel> models{m};
  const std::vector<double> y{0, 5, 990, 1010, 20, 1000};
  // standard Viterbi written out directly
  const std::size_t k = 2, n = y.size();
  std::vector<std::vector<double>> delta(n, std::vector<double>(k));
  std::vector<std::vector<std::size_t>> back(n, std::vector<std::size_t>(k));
  auto emit = [&](std::size_t s, double v) {
    const double sd = m.emission_std[s];
    return -0.5 * std::log(2 * std::numbers::pi * sd * sd) - (v - m.state_powers[s]) * (v - m.state_powers[s]) / (2 * sd * sd);
  };
  for (std::size_t s = 0; s < k; ++s) delta[0][s] = std::log(m.initial[s]) + emit(s, y[0]);
  for (std::size_t t = 1; t < n; ++t)
    for (std::size_t s = 0; s < k; ++s) {
      double best = -INFINITY;
      for (std::size_t r = 0; r < k; ++r) {
        const double c = delta[t - 1][r] + std::log(m.transition[r][s]);
        if (c > best) {
          best = c;
          back[t][s] = r;
        }
      }
      delta[t][s] = best + emit(s, y[t]);
    }
  std::vector<std::size_t> states(n);
  states[n - 1] = delta[n - 1][1] > delta[n - 1][0] ? 1 : 0;
  for (std::size_t t = n - 1; t > 0; --t) states[t - 1] = back[t][states[t]];

  double lp = 0;
  const auto path = fhmm_viterbi(y, models, &lp);
  for (std::size_t t = 0; t < n; ++t) CHECK(path[t][0] == states[t]);
  CHECK(lp == doctest::Approx(std::max(delta[n - 1][0], delta[n - 1][1])));
}

TEST_CASE("FHMM with one sample picks argmax of initial times emission") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<ApplianceStateModel> models{oracle::random_model(3, rng, "a"),
                                                  oracle::random_model(2, rng, "b")};
    const std::vector<double> y{std::uniform_real_distribution<double>(0, 5000)(rng)};
    double lp = 0;
    const auto path = fhmm_viterbi(y, models, &lp);
    double best = -INFINITY;
    std::vector<std::size_t> arg;
    for (const auto& s : oracle::all_joint_states(models)) {
      const double v = oracle::path_log_probability(models, y, {s});
      if (v > best) {
        best = v;
        arg = s;
      }
    }
    CHECK(path[0] == arg);
    CHECK(lp == doctest::Approx(best));
  }
}

TEST_CASE("FHMM matches brute force over all joint paths") {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> y(0, 4000);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<ApplianceStateModel> models{oracle::random_model(2, rng, "a"),
                                                  oracle::random_model(2, rng, "b")};
    std::vector<double> agg(5);
    for (double& v : agg) v = y(rng);
    double lp = 0;
    const auto path = fhmm_viterbi(agg, models, &lp);
    const double best = oracle::fhmm_brute_force(models, agg);
    CHECK(lp == doctest::Approx(best).epsilon(1e-10));
    CHECK(oracle::path_log_probability(models, agg, path) == doctest::Approx(best).epsilon(1e-10));
  }
}

TEST_CASE("FHMM joint-state guard") {
  std::mt19937_64 rng(46);
  std::vector<ApplianceStateModel> models;
  for (int i = 0; i < 5; ++i) models.push_back(oracle::random_model(6, rng, "m"));
  try {
    fhmm_viterbi(std::vector<double>{1.0}, models);
    FAIL("expected a guard error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("co") != std::string::npos);
  }
}

TEST_CASE("FHMM decodes a clean synthetic trace") {
  const std::vector<ApplianceStateModel> models{two_state("kettle", 2000), two_state("fridge", 100)};
  std::vector<double> y;
  std::vector<std::vector<std::size_t>> truth;
  for (int t = 0; t < 60; ++t) {
    const std::size_t k = (t / 7) % 2, f = (t / 3) % 2;
    truth.push_back({k, f});
    y.push_back(2000.0 * k + 100.0 * f);
  }
  const auto est = fhmm_disaggregate(series(y), models);
  for (std::size_t t = 0; t < y.size(); ++t) {
    CHECK(est[0].power.values[t] == 2000.0 * truth[t][0]);
    CHECK(est[1].power.values[t] == 100.0 * truth[t][1]);
  }
}

TEST_CASE("model JSON round-trip and validation") {
  std::mt19937_64 rng(47);
  const std::vector<ApplianceStateModel> models{oracle::random_model(3, rng, "kettle"),
                                                oracle::random_model(2, rng, "fridge")};
  testutil::TempDir dir("models");
  save_models(dir / "m.json", models);
  const auto back = load_models(dir / "m.json");
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].appliance_id == models[i].appliance_id);
    CHECK(back[i].state_powers == models[i].state_powers);
    CHECK(back[i].transition == models[i].transition);
    CHECK(back[i].initial == models[i].initial);
    CHECK(back[i].emission_std == models[i].emission_std);
  }

  auto bad = two_state("x", 10);
  bad.transition[0] = {0.5, 0.6};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = two_state("x", 10);
  bad.state_powers[0] = 5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = two_state("x", 10);
  bad.emission_std[1] = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
