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
#include <functional>
#include <random>

#include "nilm/disaggregate.hpp"
#include "nilm/error.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace nilm;

namespace {

// Test double: callback receives the standardised inputs and window origins.
class FnPredictor final : public WindowPredictor {
 public:
  using Fn = std::function<Tensor(const Tensor&, std::span<const std::ptrdiff_t>)>;
  FnPredictor(std::size_t width, OutputLayout layout, Fn fn)
      : width_(width), layout_(layout), fn_(std::move(fn)) {}
  std::size_t window_width() const override { return width_; }
  OutputLayout layout() const override { return layout_; }
  Tensor predict(const Tensor& inputs, std::span<const std::ptrdiff_t> origins) const override {
    return fn_(inputs, origins);
  }

 private:
  std::size_t width_;
  OutputLayout layout_;
  Fn fn_;
};

PowerSeries series(std::vector<double> v) {
  PowerSeries s;
  s.start_time = 1000;
  s.sample_period = 6;
  s.values = std::move(v);
  return s;
}

FnPredictor constant_sequence(std::size_t width, double scaled) {
  return FnPredictor(width, {false, 0, width}, [=](const Tensor& in, auto) {
    return Tensor({in.dim(0), width, 1}, scaled);
  });
}

FnPredictor fixed_rectangles(std::size_t width, std::function<RectangleTriple(std::ptrdiff_t)> f) {
  return FnPredictor(width, {true, 0, 0}, [=](const Tensor& in, std::span<const std::ptrdiff_t> origins) {
    Tensor out({in.dim(0), 3});
    for (std::size_t w = 0; w < in.dim(0); ++w) {
      const auto r = f(origins[w]);
      out[w * 3] = r.start;
      out[w * 3 + 1] = r.end;
      out[w * 3 + 2] = r.height;
    }
    return out;
  });
}

std::vector<std::size_t> coverage(const std::vector<std::ptrdiff_t>& origins, std::size_t length,
                                  std::size_t width) {
  std::vector<std::size_t> c(length, 0);
  for (auto o : origins)
    for (std::size_t i = 0; i < width; ++i) {
      const auto t = o + static_cast<std::ptrdiff_t>(i);
      if (t >= 0 && t < static_cast<std::ptrdiff_t>(length)) ++c[static_cast<std::size_t>(t)];
    }
  return c;
}

}  // namespace

TEST_CASE("stride validation") {
  CHECK_THROWS_AS((DisaggConfig{0, 0, 0.5}.validate(32)), ConfigError);
  CHECK_THROWS_AS((DisaggConfig{33, 0, 0.5}.validate(32)), ConfigError);
  CHECK_THROWS_AS((DisaggConfig{4, 0, 1.5}.validate(32)), ConfigError);
  CHECK_NOTHROW((DisaggConfig{32, 0, 0.5}.validate(32)));

  const auto p = constant_sequence(32, 0.1);
  CHECK_THROWS_AS(slide(p, series(std::vector<double>(100, 1.0)), {"k", 32, 3100, 1}, {64, 0, 0.5}),
                  ConfigError);
}

TEST_CASE("window origins: padding and coverage") {
  const auto tiles = window_origins(100, 20, 20);
  CHECK(tiles.front() == -20);
  for (std::size_t c : coverage(tiles, 100, 20)) CHECK(c == 1);

  const auto strided = window_origins(1000, 128, 16);
  CHECK(strided.front() == -128);
  const auto c = coverage(strided, 1000, 128);
  for (std::size_t t = 0; t < 1000; ++t) CHECK(c[t] == 128 / 16);
  CHECK(window_origins(0, 16, 4).empty());
}

TEST_CASE("all-zero aggregate gives zero window inputs") {
  std::size_t calls = 0;
  FnPredictor p(16, {false, 0, 16}, [&](const Tensor& in, auto) {
    ++calls;
    for (double v : in.data()) CHECK(v == 0.0);
    return Tensor({in.dim(0), 16, 1});
  });
  const auto e = disaggregate(p, series(std::vector<double>(50, 0.0)), {"k", 16, 100, 50}, {4, 0, 0.5});
  CHECK(calls > 0);
  for (double v : e.power.values) CHECK(v == 0.0);
}

TEST_CASE("combine_mean examples") {
  const PowerSeries grid = series(std::vector<double>(4, 0.0));
  WindowOutputs one{4, {{1, {5.0, 6.0}}}, {}};
  const auto a = combine_mean(one, grid);
  CHECK(a.power.values == std::vector<double>{0, 5, 6, 0});
  CHECK(a.power.start_time == 1000);
  CHECK(a.probability.empty());

  WindowOutputs two{4, {{0, {100.0, 100.0}}, {1, {200.0, 50.0}}}, {}};
  CHECK(combine_mean(two, grid).power.values == std::vector<double>{100, 150, 50, 0});

  WindowOutputs negative{4, {{0, {-5.0, 3.0, -1.0, 0.0}}}, {}};
  CHECK(combine_mean(negative, grid).power.values == std::vector<double>{0, 3, 0, 0});
}

TEST_CASE("constant window outputs give a constant series") {
  const auto agg = series(std::vector<double>(333, 250.0));
  for (std::size_t stride : {1u, 5u, 16u, 32u}) {
    const auto e = disaggregate(constant_sequence(32, 0.25), agg, {"k", 32, 3100, 10}, {stride, 0, 0.5});
    REQUIRE(e.power.size() == 333);
    for (double v : e.power.values) CHECK(v == doctest::Approx(775.0));
  }
}

TEST_CASE("oracle predictor reproduces the target when tiling") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 3000);
  std::vector<double> truth(250);
  for (double& v : truth) v = u(rng);
  const double max_power = 3100;
  FnPredictor oracle_net(25, {false, 0, 25}, [&](const Tensor& in, std::span<const std::ptrdiff_t> origins) {
    Tensor out({in.dim(0), 25, 1});
    for (std::size_t w = 0; w < in.dim(0); ++w)
      for (std::size_t i = 0; i < 25; ++i) {
        const auto t = origins[w] + static_cast<std::ptrdiff_t>(i);
        out[w * 25 + i] = t >= 0 && t < 250 ? truth[static_cast<std::size_t>(t)] / max_power : 0.0;
      }
    return out;
  });
  const auto e = disaggregate(oracle_net, series(std::vector<double>(250, 500.0)), {"k", 25, max_power, 7},
                              {25, 0, 0.5});
  for (std::size_t t = 0; t < 250; ++t) CHECK(e.power.values[t] == doctest::Approx(truth[t]).epsilon(1e-12));
}

TEST_CASE("dae halo positions are skipped") {
  // Only samples 3..W-4 of every window carry an estimate.
  FnPredictor p(16, {false, 3, 10}, [](const Tensor& in, auto) { return Tensor({in.dim(0), 10, 1}, 0.5); });
  const auto e = disaggregate(p, series(std::vector<double>(40, 1.0)), {"k", 16, 200, 1}, {16, 0, 0.5});
  std::vector<double> expected(40, 0.0);
  for (std::size_t t = 0; t < 40; ++t) {
    const auto in_window = (t + 16) % 16;
    if (in_window >= 3 && in_window < 13) expected[t] = 100.0;
  }
  CHECK(e.power.values == expected);
}

TEST_CASE("decode_rectangle examples") {
  CHECK(decode_rectangle({0.1, 0.9, 0.5}, 0, 100, 3100) == DecodedRectangle{10, 90, 1550});
  CHECK_FALSE(decode_rectangle({0, 0, 0}, 0, 100, 3100).has_value());
  CHECK_FALSE(decode_rectangle({0.5, 0.5, 0.9}, 0, 100, 3100).has_value());
  CHECK_FALSE(decode_rectangle({0.6, 0.4, 0.9}, 0, 100, 3100).has_value());
  CHECK(decode_rectangle({0.25, 0.5, 1.0}, -64, 128, 2000) == DecodedRectangle{-32, 0, 2000});
}

TEST_CASE("encode then decode is exact on the index lattice") {
  for (std::size_t width : {16u, 100u, 128u, 1536u}) {
    const WindowSpec spec{"k", width, 1.0, 1.0};
    for (std::size_t a = 0; a < width; a += std::max<std::size_t>(1, width / 13)) {
      for (std::size_t b = a + 1; b <= width; b += std::max<std::size_t>(1, width / 7)) {
        std::vector<double> t(width, 0.0);
        for (std::size_t i = a; i < b; ++i) t[i] = 0.75;
        const auto r = encode_rectangle(t, spec);
        const auto d = decode_rectangle(r, 40, width, 1000);
        REQUIRE(d.has_value());
        CHECK(d->start_sample == 40 + static_cast<std::ptrdiff_t>(a));
        CHECK(d->end_sample == 40 + static_cast<std::ptrdiff_t>(b));
        CHECK(d->watts == 750.0);
      }
    }
  }
}

TEST_CASE("rectangle overlay: unanimity") {
  // Every window places the same absolute span 100..120.
  const std::size_t w = 64;
  auto p = fixed_rectangles(w, [&](std::ptrdiff_t origin) -> RectangleTriple {
    const std::ptrdiff_t s = 100 - origin, e = 120 - origin;
    if (s < 0 || e > static_cast<std::ptrdiff_t>(w)) return {};
    return {double(s) / double(w), double(e) / double(w), 0.5};
  });
  const auto agg = series(std::vector<double>(300, 10.0));
  const auto outputs = slide(p, agg, {"k", w, 2000, 1}, {w, 0, 0.5});
  // Windows fully containing the span vs all windows covering it differ;
  // use stride W so each sample has one covering window.
  const auto e = combine_rectangles(outputs, agg, 2000, {w, 500, 0.5});
  for (std::size_t t = 0; t < 300; ++t) {
    const bool on = t >= 100 && t < 120;
    CHECK(e.probability[t] == (on ? 1.0 : 0.0));
    CHECK(e.power.values[t] == (on ? 1000.0 : 0.0));
  }
}

TEST_CASE("rectangle overlay: no predictions and half votes") {
  const auto agg = series(std::vector<double>(200, 10.0));
  auto none = fixed_rectangles(32, [](std::ptrdiff_t) { return RectangleTriple{}; });
  const auto e0 = disaggregate(none, agg, {"k", 32, 3100, 1}, {4, 1000, 0.5});
  for (std::size_t t = 0; t < 200; ++t) {
    CHECK(e0.power.values[t] == 0.0);
    CHECK(e0.probability[t] == 0.0);
  }

  // 8 windows cover each sample; alternate windows claim the whole window at 2000 W.
  auto half = fixed_rectangles(32, [](std::ptrdiff_t origin) {
    return (origin / 4) % 2 == 0 ? RectangleTriple{0, 1, 1.0} : RectangleTriple{};
  });
  const auto e = disaggregate(half, agg, {"k", 32, 2000, 1}, {4, 500, 0.5});
  for (std::size_t t = 0; t < 200; ++t) {
    CHECK(e.probability[t] == 0.5);
    CHECK(e.power.values[t] == 2000.0);
  }
  const auto strict = disaggregate(half, agg, {"k", 32, 2000, 1}, {4, 500, 0.6});
  for (double v : strict.power.values) CHECK(v == 0.0);
  // below the power threshold: rectangle does not count
  const auto weak = disaggregate(half, agg, {"k", 32, 400, 1}, {4, 500, 0.5});
  for (std::size_t t = 0; t < 200; ++t) CHECK(weak.probability[t] == 0.0);
}

TEST_CASE("estimates: determinism, ranges and csv round-trip") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> agg(123);
  for (double& v : agg) v = 3000 * u(rng);
  auto p = fixed_rectangles(32, [](std::ptrdiff_t origin) {
    const double s = std::abs(std::sin(double(origin)));
    return RectangleTriple{s * 0.5, 0.5 + s * 0.5, s};
  });
  const WindowSpec spec{"k", 32, 3100, 900};
  const auto a = disaggregate(p, series(agg), spec, {4, 100, 0.5});
  const auto b = disaggregate(p, series(agg), spec, {4, 100, 0.5});
  CHECK(a == b);
  for (std::size_t t = 0; t < a.power.size(); ++t) {
    CHECK(a.power.values[t] >= 0.0);
    CHECK(a.probability[t] >= 0.0);
    CHECK(a.probability[t] <= 1.0);
  }

  testutil::TempDir dir("disagg");
  save_estimate_csv(dir.path() / "r.csv", a);
  const auto back = load_estimate_csv(dir.path() / "r.csv");
  REQUIRE(back.power.size() == a.power.size());
  CHECK(back.power.start_time == 1000);
  CHECK(back.power.sample_period == 6);
  for (std::size_t t = 0; t < a.power.size(); ++t) {
    CHECK(back.power.values[t] == doctest::Approx(a.power.values[t]).epsilon(1e-9));
    CHECK(back.probability[t] == doctest::Approx(a.probability[t]).epsilon(1e-9));
  }

  const auto seq = disaggregate(constant_sequence(32, 0.1), series(agg), spec, {8, 0, 0.5});
  save_estimate_csv(dir.path() / "s.csv", seq);
  CHECK(testutil::read_file(dir.path() / "s.csv").starts_with("timestamp,estimated_watts\n"));
  CHECK(load_estimate_csv(dir.path() / "s.csv").probability.empty());
}

TEST_CASE("non-finite predictions are rejected") {
  FnPredictor bad(16, {false, 0, 16}, [](const Tensor& in, auto) {
    return Tensor({in.dim(0), 16, 1}, std::nan(""));
  });
  CHECK_THROWS_AS(disaggregate(bad, series(std::vector<double>(40, 1.0)), {"k", 16, 100, 1}, {8, 0, 0.5}),
                  NumericError);
}
