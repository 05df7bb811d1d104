// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcfnet/cli.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "mcfnet/colorspace.hpp"
#include "mcfnet/errors.hpp"
#include "mcfnet/image_tensor.hpp"
#include "mcfnet/metrics.hpp"
#include "mcfnet/png_io.hpp"

namespace mcfnet::cli {

namespace fs = std::filesystem;

namespace {

std::string git_describe() {
  std::FILE* pipe = ::popen("git describe --always --dirty --tags 2>/dev/null", "r");
  if (!pipe) return "unknown";
  std::string out;
  std::array<char, 256> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) out += buf.data();
  const int status = ::pclose(pipe);
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
  return status == 0 && !out.empty() ? out : "unknown";
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv(kSeedEnv);
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long s = std::stoull(v, &used);
    if (used != std::string(v).size()) throw std::invalid_argument(v);
    return s;
  } catch (const std::exception&) {
    throw ConfigError(std::string(kSeedEnv) + "='" + v + "' is not an unsigned integer");
  }
}

RunManifest base_manifest(const std::string& command) {
  RunManifest m;
  m.command = command;
  m.git_describe = git_describe();
  m.timestamp = utc_timestamp();
  return m;
}

// Options shared by train and ablate.
struct TrainOptions {
  std::string config_path;
  std::string data;
  std::string out;
  bool desk = false;
  bool unpaired = false;
  bool no_augment = false;
  int checkpoint_every = 0;
  std::optional<int> epochs;
  std::optional<int> stage1_end;
  std::optional<int> batch_size;
  std::optional<double> lr;
  std::optional<std::uint64_t> seed;
  std::string variant;
};

void add_train_options(CLI::App* app, TrainOptions& o) {
  app->add_option("--config", o.config_path, "JSON TrainConfig; flags override it")
      ->check(CLI::ExistingFile);
  app->add_option("--data", o.data, "directory holding nir/ and rgb/")
      ->required()
      ->check(CLI::ExistingDirectory);
  app->add_option("--out", o.out, "output directory (overwritten)")->required();
  app->add_flag("--desk", o.desk, "start from the narrow 64x64 CPU preset");
  app->add_flag("--unpaired", o.unpaired, "keep unmatched stems as unpaired extras");
  app->add_flag("--no-augment", o.no_augment, "disable augmentation");
  app->add_option("--checkpoint-every", o.checkpoint_every, "epochs between checkpoints (0: end only)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--epochs", o.epochs, "total_epochs");
  app->add_option("--stage1-end", o.stage1_end, "last paired-only epoch");
  app->add_option("--batch-size", o.batch_size, "batch size");
  app->add_option("--lr", o.lr, "base learning rate");
  app->add_option("--seed", o.seed, "seed (fallback: MCFNET_SEED)");
}

TrainConfig resolve_config(const TrainOptions& o) {
  TrainConfig c = o.desk ? TrainConfig::desk() : TrainConfig{};
  bool file_seed = false;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config " + o.config_path + ": " + e.what());
    }
    c = train_config_from_json(j, c);
    file_seed = j.contains("seed");
  }
  if (o.epochs) c.total_epochs = *o.epochs;
  if (o.stage1_end) c.stage1_end = *o.stage1_end;
  if (o.batch_size) c.batch_size = *o.batch_size;
  if (o.lr) c.base_lr = *o.lr;
  if (o.no_augment) c.augment = false;
  if (o.seed) {
    c.seed = *o.seed;
  } else if (!file_seed) {
    if (auto s = env_seed()) c.seed = *s;
  }
  if (!o.variant.empty()) apply_variant(c.model, o.variant);
  c.validate();
  return c;
}

int run_train(const std::string& command, const TrainOptions& o, std::ostream& out) {
  const TrainConfig config = resolve_config(o);
  const fs::path out_dir = o.out;
  Trainer trainer(config);

  RunManifest manifest = base_manifest(command);
  manifest.config_path = o.config_path;
  manifest.config = to_json(config);
  if (!o.variant.empty()) manifest.config["variant"] = o.variant;
  manifest.seed = config.seed;
  manifest.trainable_groups = trainer.networks().trainable_group_names();
  write_manifest(manifest, out_dir);

  const fs::path data = o.data;
  const Dataset dataset = load_pairs(data / "nir", data / "rgb", o.unpaired);
  if (dataset.pairs.empty()) {
    throw DataError("no paired samples under " + data.string());
  }
  TrainLogWriter log(out_dir);
  const fs::path ckpt_path = out_dir / "checkpoint.mcfnet";
  trainer.train(
      dataset,
      [&](const EpochLog& e) {
        out << "epoch " << e.epoch << "/" << config.total_epochs << " lr " << e.lr << " g_total "
            << e.mean.generator.total << " d_a " << e.mean.d_a << " d_b " << e.mean.d_b << std::endl;
        log.epoch(e);
        if (o.checkpoint_every > 0 && e.epoch % o.checkpoint_every == 0 &&
            e.epoch < config.total_epochs) {
          save_checkpoint(trainer.checkpoint(), ckpt_path);
        }
      },
      [&](const BatchRecord& r) { log.batch(r); });
  save_checkpoint(trainer.checkpoint(), ckpt_path);
  out << "checkpoint written to " << ckpt_path.string() << "\n";
  return kOk;
}

ImagePlane texture_preview(const nn::Tensor& tex) {
  const TextureMap t = to_texture(tex, 0);
  ImagePlane img(t.height(), t.width(), ColorSpace::kRgb);
  for (int y = 0; y < t.height(); ++y) {
    for (int x = 0; x < t.width(); ++x) {
      const double v = std::clamp(0.5 + t.at(y, x, 0), 0.0, 1.0);
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = v;
    }
  }
  return img;
}

ImagePlane hstack(const std::vector<ImagePlane>& tiles) {
  const int h = tiles.front().height();
  int w = 0;
  for (const auto& t : tiles) w += t.width();
  ImagePlane grid(h, w, ColorSpace::kRgb);
  int x0 = 0;
  for (const auto& t : tiles) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < t.width(); ++x) {
        for (int c = 0; c < 3; ++c) grid.at(y, x0 + x, c) = t.at(y, x, c);
      }
    }
    x0 += t.width();
  }
  return grid;
}

int run_infer(const std::string& ckpt_path, const std::string& nir_dir, const std::string& out,
              bool dump, std::ostream& os) {
  const fs::path out_dir = out;
  RunManifest manifest = base_manifest("infer");
  manifest.config = {{"ckpt", ckpt_path}, {"nir", nir_dir}, {"dump_branches", dump}};
  write_manifest(manifest, out_dir);

  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  Networks nets(ckpt.config.model, ckpt.config.seed);
  load_params(nets, ckpt);
  const auto inputs = png_stems(nir_dir);
  if (dump) fs::create_directories(out_dir / "branches");
  for (const auto& [stem, path] : inputs) {
    const ImagePlane nir = read_png(path, ColorSpace::kNir);
    const ColorizerOutput r = nets.colorize(nn::Var::constant(to_tensor(nir)));
    write_png(out_dir / (stem + ".png"), to_plane(r.y_rgb.value(), 0, ColorSpace::kRgb));
    if (dump) {
      const ImagePlane grid =
          hstack({to_plane(r.y_prime_rgb.value(), 0, ColorSpace::kRgb),
                  hsv_to_rgb(to_plane(r.y_hsv.value(), 0, ColorSpace::kHsv)),
                  texture_preview(r.y_tex.value())});
      write_png(out_dir / "branches" / (stem + ".png"), grid);
    }
  }
  os << "colorized " << inputs.size() << " images into " << out_dir.string() << "\n";
  return kOk;
}

int run_eval(const std::string& pred, const std::string& gt, const std::string& out,
             std::ostream& os) {
  RunManifest manifest = base_manifest("eval");
  manifest.config = {{"pred", pred}, {"gt", gt}};
  write_manifest(manifest, out);
  const MetricsReport report = evaluate(pred, gt);
  write_report(report, out);
  os << report.per_image.size() << " images: psnr " << report.aggregate.psnr << " ssim "
     << report.aggregate.ssim << " ae " << report.aggregate.ae << "\n";
  return kOk;
}

int run_synth(int n, int size, std::optional<std::uint64_t> seed_flag, const std::string& out,
              std::ostream& os) {
  std::uint64_t seed = 0;
  if (seed_flag) {
    seed = *seed_flag;
  } else if (auto s = env_seed()) {
    seed = *s;
  }
  RunManifest manifest = base_manifest("synth");
  manifest.config = {{"n", n}, {"size", size}, {"seed", seed}};
  manifest.seed = seed;
  write_manifest(manifest, out);
  write_pairs(out, make_synthetic_pairs(n, size, seed));
  os << "wrote " << n << " pairs of " << size << "x" << size << " into " << out << "\n";
  return kOk;
}

}  // namespace

nlohmann::json RunManifest::to_json() const {
  return {{"command", command},   {"config_path", config_path},
          {"config", config},     {"git_describe", git_describe},
          {"timestamp", timestamp}, {"seed", seed},
          {"trainable_groups", trainable_groups}};
}

void write_manifest(const RunManifest& manifest, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::ofstream f(out_dir / "manifest.json", std::ios::trunc);
  f << manifest.to_json().dump(2) << "\n";
  if (!f) {
    throw DataError("cannot write manifest into " + out_dir.string());
  }
}

void apply_variant(ModelConfig& model, const std::string& variant) {
  if (variant == "full") {
    model.use_texture = model.use_multiscale = model.use_hsv_cfem = true;
  } else if (variant == "no-texture") {
    model.use_texture = false;
  } else if (variant == "no-multiscale") {
    model.use_multiscale = false;
  } else if (variant == "no-cfem") {
    model.use_hsv_cfem = false;
  } else {
    throw ConfigError("unknown variant '" + variant +
                      "' (expected no-texture, no-multiscale, no-cfem or full)");
  }
}

int dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"NIR-to-RGB colorization: training, inference and evaluation"};
  app.require_subcommand(1);

  TrainOptions train_opts;
  auto* train = app.add_subcommand("train", "train the networks on a paired dataset");
  add_train_options(train, train_opts);

  TrainOptions ablate_opts;
  auto* ablate = app.add_subcommand("ablate", "train one ablation variant");
  add_train_options(ablate, ablate_opts);
  ablate->add_option("--variant", ablate_opts.variant, "ablation variant")
      ->required()
      ->check(CLI::IsMember({"no-texture", "no-multiscale", "no-cfem", "full"}));

  std::string ckpt, nir_dir, infer_out;
  bool dump = false;
  auto* infer = app.add_subcommand("infer", "colorize every NIR image of a directory");
  infer->add_option("--ckpt", ckpt, "checkpoint file")->required()->check(CLI::ExistingFile);
  infer->add_option("--nir", nir_dir, "directory of NIR PNGs")
      ->required()
      ->check(CLI::ExistingDirectory);
  infer->add_option("--out", infer_out, "output directory")->required();
  infer->add_flag("--dump-branches", dump, "also write per-branch grids under branches/");

  std::string pred, gt, eval_out;
  auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
  eval->add_option("--pred", pred, "predicted RGB PNGs")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--gt", gt, "ground-truth RGB PNGs")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--out", eval_out, "report directory")->required();

  int n = 8, size = 64;
  std::optional<std::uint64_t> synth_seed;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "generate a synthetic paired dataset");
  synth->add_option("--n", n, "number of pairs")->check(CLI::PositiveNumber);
  synth->add_option("--size", size, "side length, a multiple of 8")->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "seed (fallback: MCFNET_SEED)");
  synth->add_option("--out", synth_out, "output directory")->required();

  std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\nrun with --help for usage\n";
    return kUsage;
  }

  try {
    if (*train) return run_train("train", train_opts, out);
    if (*ablate) return run_train("ablate", ablate_opts, out);
    if (*infer) return run_infer(ckpt, nir_dir, infer_out, dump, out);
    if (*eval) return run_eval(pred, gt, eval_out, out);
    if (*synth) return run_synth(n, size, synth_seed, synth_out, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

int dispatch(int argc, const char* const* argv) {
  return dispatch(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace mcfnet::cli
