// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "mcfnet/cli.hpp"
#include "mcfnet/errors.hpp"
#include "mcfnet/png_io.hpp"
#include "support.hpp"

using namespace mcfnet;
namespace fs = std::filesystem;
using mcfnet::testing::scratch_dir;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "mcfnet");
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

int count_lines(const fs::path& p) {
  std::ifstream in(p);
  int n = 0;
  for (std::string s; std::getline(in, s);) ++n;
  return n;
}

const fs::path& synth_data() {
  static const fs::path dir = [] {
    const fs::path d = scratch_dir("cli_data");
    const Run r = run({"synth", "--n", "8", "--size", "64", "--seed", "1", "--out", d.string()});
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("synth writes paired directories and a manifest") {
  const fs::path d = synth_data();
  CHECK(png_stems(d / "nir").size() == 8);
  CHECK(png_stems(d / "rgb").size() == 8);
  const auto m = read_json(d / "manifest.json");
  CHECK(m["command"] == "synth");
  CHECK(m["seed"] == 1);
  CHECK(read_png(d / "rgb" / "synth_0000.png", ColorSpace::kRgb).width() == 64);
}

TEST_CASE("train, infer and eval pipeline") {
  const fs::path out = scratch_dir("cli_train");
  Run r = run({"train", "--desk", "--data", synth_data().string(), "--out", (out / "run").string(),
               "--epochs", "2", "--stage1-end", "1", "--seed", "3"});
  INFO(r.err);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(out / "run" / "checkpoint.mcfnet"));
  CHECK(fs::exists(out / "run" / "checkpoint.mcfnet.json"));
  CHECK(count_lines(out / "run" / "train_log.csv") == 3);
  CHECK(count_lines(out / "run" / "batches.csv") == 1 + 8 + 16);
  const auto m = read_json(out / "run" / "manifest.json");
  CHECK(m["command"] == "train");
  CHECK(m["seed"] == 3);
  CHECK(m["config"]["total_epochs"] == 2);
  CHECK(m["config"]["model"]["grm_width"] == 8);
  CHECK(m.contains("git_describe"));
  CHECK(m.contains("timestamp"));
  CHECK(m["trainable_groups"].size() == 6);

  r = run({"infer", "--ckpt", (out / "run" / "checkpoint.mcfnet").string(), "--nir",
           (synth_data() / "nir").string(), "--out", (out / "pred").string(), "--dump-branches"});
  INFO(r.err);
  REQUIRE(r.code == 0);
  CHECK(png_stems(out / "pred").size() == 8);
  const ImagePlane grid = read_png(out / "pred" / "branches" / "synth_0003.png", ColorSpace::kRgb);
  CHECK(grid.width() == 3 * 64);
  CHECK(grid.height() == 64);

  r = run({"eval", "--pred", (out / "pred").string(), "--gt", (synth_data() / "rgb").string(),
           "--out", (out / "eval").string()});
  REQUIRE(r.code == 0);
  CHECK(count_lines(out / "eval" / "report.csv") == 10);
}

TEST_CASE("eval of a directory against itself reports the psnr cap") {
  const fs::path out = scratch_dir("cli_self");
  const std::string rgb = (synth_data() / "rgb").string();
  const Run r = run({"eval", "--pred", rgb, "--gt", rgb, "--out", out.string()});
  REQUIRE(r.code == 0);
  const auto j = read_json(out / "report.json");
  CHECK(j["aggregate"]["psnr"].get<double>() == 100.0);
  CHECK(j["aggregate"]["ae"].get<double>() == 0.0);
}

TEST_CASE("ablate no-cfem records the variant and drops the group") {
  const fs::path out = scratch_dir("cli_ablate");
  const Run r = run({"ablate", "--variant", "no-cfem", "--desk", "--data", synth_data().string(),
                     "--out", out.string(), "--epochs", "2", "--stage1-end", "1"});
  INFO(r.err);
  REQUIRE(r.code == 0);
  const auto m = read_json(out / "manifest.json");
  CHECK(m["command"] == "ablate");
  CHECK(m["config"]["model"]["use_hsv_cfem"] == false);
  CHECK(m["config"]["variant"] == "no-cfem");
  for (const auto& g : m["trainable_groups"]) CHECK(g != "cfem");
  CHECK(m["trainable_groups"].size() == 5);
}

TEST_CASE("apply_variant") {
  ModelConfig m;
  cli::apply_variant(m, "no-texture");
  CHECK_FALSE(m.use_texture);
  cli::apply_variant(m, "no-multiscale");
  CHECK_FALSE(m.use_multiscale);
  ModelConfig f;
  cli::apply_variant(f, "full");
  CHECK(f == ModelConfig{});
  CHECK_THROWS_AS(cli::apply_variant(f, "no-color"), ConfigError);
}

TEST_CASE("exit codes") {
  const fs::path out = scratch_dir("cli_codes");
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"frobnicate"}).code == cli::kUsage);
  CHECK(run({"train", "--out", out.string()}).code == cli::kUsage);
  CHECK(run({"--help"}).code == cli::kOk);
  CHECK(run({"ablate", "--variant", "nope", "--desk", "--data", synth_data().string(), "--out",
             (out / "a").string()})
            .code == cli::kUsage);

  std::ofstream(out / "bad.json") << R"({"total_epochs": 2, "stage1_edn": 1})";
  Run r = run({"train", "--config", (out / "bad.json").string(), "--data", synth_data().string(),
               "--out", (out / "b").string()});
  CHECK(r.code == cli::kUsage);
  CHECK(r.err.find("stage1_edn") != std::string::npos);

  // Data directory without an rgb/ subdirectory.
  fs::create_directories(out / "half" / "nir");
  CHECK(run({"train", "--desk", "--data", (out / "half").string(), "--out", (out / "c").string()})
            .code != cli::kOk);

  // Unmatched stems without --unpaired are a data error.
  const fs::path odd = out / "odd";
  fs::create_directories(odd / "nir");
  fs::create_directories(odd / "rgb");
  write_png(odd / "nir" / "x.png", ImagePlane(64, 64, ColorSpace::kNir, 0.5));
  r = run({"train", "--desk", "--data", odd.string(), "--out", (out / "d").string()});
  CHECK(r.code == cli::kDataError);

  fs::create_directories(out / "p");
  write_png(out / "p" / "only.png", ImagePlane(16, 16, ColorSpace::kRgb, 0.5));
  CHECK(run({"eval", "--pred", (out / "p").string(), "--gt", (synth_data() / "rgb").string(),
             "--out", (out / "e").string()})
            .code == cli::kDataError);

  std::ofstream(out / "junk.mcfnet") << "not a checkpoint";
  CHECK(run({"infer", "--ckpt", (out / "junk.mcfnet").string(), "--nir",
             (synth_data() / "nir").string(), "--out", (out / "f").string()})
            .code == cli::kDataError);

  CHECK(run({"synth", "--n", "2", "--size", "20", "--out", (out / "g").string()}).code ==
        cli::kDataError);
}

TEST_CASE("seed precedence: flag, config file, environment") {
  const fs::path out = scratch_dir("cli_seed");
  ::setenv(cli::kSeedEnv, "41", 1);
  REQUIRE(run({"synth", "--n", "1", "--size", "8", "--out", (out / "env").string()}).code == 0);
  CHECK(read_json(out / "env" / "manifest.json")["seed"] == 41);
  REQUIRE(run({"synth", "--n", "1", "--size", "8", "--seed", "5", "--out", (out / "flag").string()})
              .code == 0);
  CHECK(read_json(out / "flag" / "manifest.json")["seed"] == 5);

  std::ofstream(out / "c.json") << R"({"total_epochs": 2, "stage1_end": 1, "seed": 9})";
  const std::string data = synth_data().string();
  Run r = run({"train", "--desk", "--config", (out / "c.json").string(), "--data", data, "--out",
               (out / "cfg").string(), "--epochs", "1"});
  // One epoch cannot hold both stages.
  CHECK(r.code == cli::kUsage);
  ::setenv(cli::kSeedEnv, "not-a-number", 1);
  r = run({"synth", "--n", "1", "--size", "8", "--out", (out / "junk").string()});
  CHECK(r.code == cli::kUsage);
  ::unsetenv(cli::kSeedEnv);
}

TEST_CASE("config file seed beats the environment, flags beat both") {
  const fs::path out = scratch_dir("cli_seed2");
  const fs::path data = out / "data";
  REQUIRE(run({"synth", "--n", "1", "--size", "32", "--seed", "2", "--out", data.string()}).code == 0);
  std::ofstream(out / "c.json") << R"({"total_epochs": 2, "stage1_end": 1, "seed": 9})";
  ::setenv(cli::kSeedEnv, "41", 1);
  REQUIRE(run({"train", "--desk", "--config", (out / "c.json").string(), "--data", data.string(),
               "--out", (out / "file").string()})
              .code == 0);
  CHECK(read_json(out / "file" / "manifest.json")["seed"] == 9);
  REQUIRE(run({"train", "--desk", "--config", (out / "c.json").string(), "--data", data.string(),
               "--out", (out / "flag").string(), "--seed", "4"})
              .code == 0);
  CHECK(read_json(out / "flag" / "manifest.json")["seed"] == 4);
  std::ofstream(out / "noseed.json") << R"({"total_epochs": 2, "stage1_end": 1})";
  REQUIRE(run({"train", "--desk", "--config", (out / "noseed.json").string(), "--data",
               data.string(), "--out", (out / "env").string()})
              .code == 0);
  CHECK(read_json(out / "env" / "manifest.json")["seed"] == 41);
  ::unsetenv(cli::kSeedEnv);
}
