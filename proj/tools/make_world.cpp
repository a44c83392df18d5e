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

#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "nilm/error.hpp"
#include "nilm/world.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write a synthetic kettle world and a matching config"};
  std::string out;
  std::uint64_t seed = 1;
  std::size_t samples = 20000;
  std::vector<int> train{1, 2};
  std::vector<int> test{3};
  app.add_option("--out", out, "Output directory")->required();
  app.add_option("--seed", seed);
  app.add_option("--samples", samples, "Samples per house");
  app.add_option("--train", train, "Training house ids")->delimiter(',');
  app.add_option("--test", test, "Test house ids")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  try {
    auto world = nilm::kettle_world();
    world.samples_per_house = samples;
    const auto path = nilm::write_world(out, world, train, test, seed);
    std::cout << "config written to " << path.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
