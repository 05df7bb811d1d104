// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <string>

#include "mcfnet/colorspace.hpp"
#include "mcfnet/errors.hpp"
#include "mcfnet/image_tensor.hpp"
#include "mcfnet/network.hpp"
#include "mcfnet/nn/ops.hpp"
#include "support.hpp"

using namespace mcfnet;
using namespace mcfnet::nn;
using mcfnet::testing::Gen;
using mcfnet::testing::max_abs_diff;

namespace {

void randomize(ParamGroup& group, Gen& gen, double stddev) {
  for (const auto& np : group.params()) {
    Var v = np.var;
    for (double& x : v.mutable_value().values()) x = gen.normal(stddev);
  }
}

bool contains(const std::vector<std::string>& names, const std::string& n) {
  return std::find(names.begin(), names.end(), n) != names.end();
}

ImagePlane nir_hsv(const ImagePlane& nir) { return rgb_to_hsv(replicate_nir(nir)); }

}  // namespace

TEST_CASE("taps and pyramid scales at 64, 128 and 256") {
  Gen gen(41);
  const Networks nets(ModelConfig::desk(), 1);
  for (int size : {64, 128, 256}) {
    CAPTURE(size);
    const ImagePlane nir = gen.plane(size, size, ColorSpace::kNir);
    const CfemOutput c = cfem_forward(nir_hsv(nir), *nets.cfem());
    CHECK(c.y_hsv.height() == size);
    CHECK(c.y_hsv.width() == size);
    CHECK(c.y_hsv.space() == ColorSpace::kHsv);
    CHECK(c.pyramid.full.shape().h == size);
    CHECK(c.pyramid.quarter.shape().h == size / 4);
    CHECK(c.pyramid.eighth.shape().h == size / 8);
    CHECK(c.pyramid.full.shape().w == size);
    CHECK(c.pyramid.quarter.shape().w == size / 4);
    CHECK(c.pyramid.eighth.shape().w == size / 8);

    const GrmOutput g = grm_forward(nir, &c.pyramid, nets.grm());
    CHECK(g.y_prime_rgb.channels() == 3);
    CHECK(g.y_prime_rgb.height() == size);
    CHECK(g.y1.shape().h == size);
    CHECK(g.y2.shape().h == size / 2);
    CHECK(g.y3.shape().h == size / 4);
    CHECK(g.y4.shape().h == size / 8);
    CHECK(g.y1.shape().w == size);
    CHECK(g.y2.shape().w == size / 2);
    CHECK(g.y3.shape().w == size / 4);
    CHECK(g.y4.shape().w == size / 8);

    const ImagePlane rgb = gen.plane(size, size, ColorSpace::kRgb);
    const ImagePlane back = gb_forward(rgb, nets.gb());
    CHECK(back.channels() == 1);
    CHECK(back.height() == size);
    CHECK(back.width() == size);
  }
}

TEST_CASE("non-square inputs keep their aspect through every branch") {
  Gen gen(42);
  const Networks nets(ModelConfig::desk(), 2);
  const Var x = Var::constant(gen.tensor({1, 1, 32, 48}, 0, 1));
  const ColorizerOutput out = nets.colorize(x);
  CHECK(out.y_rgb.shape() == Shape{1, 3, 32, 48});
  CHECK(out.taps.y4.shape().h == 4);
  CHECK(out.taps.y4.shape().w == 6);
  CHECK(out.pyramid->quarter.shape().w == 12);
}

TEST_CASE("sizes not divisible by 8 are rejected") {
  const Networks nets(ModelConfig::desk(), 3);
  const ImagePlane nir(60, 64, ColorSpace::kNir, 0.5);
  CHECK_THROWS_AS(cfem_forward(nir_hsv(nir), *nets.cfem()), ShapeError);
  CHECK_THROWS_AS(grm_forward(nir, nullptr, nets.grm()), ShapeError);
  CHECK_THROWS_AS(nets.colorize(Var::constant(Tensor({1, 1, 64, 36}))), ShapeError);
  CHECK_THROWS_AS(require_divisible_by_8(0, 8, "x"), ShapeError);
  CHECK_NOTHROW(require_divisible_by_8(8, 16, "x"));
}

TEST_CASE("wrong plane types and pyramid shapes are rejected") {
  Gen gen(43);
  const Networks nets(ModelConfig::desk(), 4);
  const ImagePlane nir = gen.plane(32, 32, ColorSpace::kNir);
  CHECK_THROWS_AS(cfem_forward(gen.plane(32, 32, ColorSpace::kRgb), *nets.cfem()), ShapeError);
  CHECK_THROWS_AS(gb_forward(nir, nets.gb()), ShapeError);
  const CfemOutput c = cfem_forward(nir_hsv(gen.plane(64, 64, ColorSpace::kNir)), *nets.cfem());
  CHECK_THROWS_AS(grm_forward(nir, &c.pyramid, nets.grm()), ShapeError);
}

TEST_CASE("property: bounded heads stay in [0,1] under random parameters") {
  Gen gen(44);
  for (int trial = 0; trial < 3; ++trial) {
    Networks nets(ModelConfig::desk(), 10 + trial);
    for (ParamGroup* g : nets.all_groups()) randomize(*g, gen, 0.4);
    const Var x = Var::constant(gen.tensor({1, 1, 32, 32}, 0, 1));
    const ColorizerOutput out = nets.colorize(x);
    const Var back = nets.restore_nir(out.y_rgb);
    for (const Var* v : {&out.y_rgb, &out.y_prime_rgb, &out.y_hsv, &back}) {
      for (double e : v->value().values()) {
        CHECK(e >= 0.0);
        CHECK(e <= 1.0);
      }
    }
    for (const Var& d : {nets.judge_rgb(out.y_rgb), nets.judge_nir(back)}) {
      for (double e : d.value().values()) {
        CHECK(e >= 0.0);
        CHECK(e <= 1.0);
      }
    }
  }
}

TEST_CASE("zero SPADE heads make injection a no-op in the geometry network") {
  Gen gen(45);
  Networks nets(ModelConfig::desk(), 5);
  ParamGroup* grm = nets.group("grm");
  int zeroed = 0;
  for (const auto& np : grm->params()) {
    if (np.name.find(".gamma.") != std::string::npos || np.name.find(".beta.") != std::string::npos) {
      Var v = np.var;
      v.mutable_value().fill(0.0);
      ++zeroed;
    }
  }
  REQUIRE(zeroed == 12);
  const ImagePlane nir = gen.plane(64, 64, ColorSpace::kNir);
  const CfemOutput c = cfem_forward(nir_hsv(nir), *nets.cfem());
  const GrmOutput with = grm_forward(nir, &c.pyramid, nets.grm());
  const GrmOutput without = grm_forward(nir, nullptr, nets.grm());
  CHECK(max_abs_diff(to_tensor(with.y_prime_rgb), to_tensor(without.y_prime_rgb)) <= 1e-6);
  CHECK(max_abs_diff(with.y1, without.y1) <= 1e-6);
  CHECK(max_abs_diff(with.y4, without.y4) <= 1e-6);
}

TEST_CASE("injection changes the output when the heads are live") {
  Gen gen(46);
  Networks nets(ModelConfig::desk(), 6);
  randomize(*nets.group("grm"), gen, 0.2);
  const ImagePlane nir = gen.plane(32, 32, ColorSpace::kNir);
  const CfemOutput c = cfem_forward(nir_hsv(nir), *nets.cfem());
  const GrmOutput with = grm_forward(nir, &c.pyramid, nets.grm());
  const GrmOutput without = grm_forward(nir, nullptr, nets.grm());
  CHECK(max_abs_diff(with.y1, without.y1) > 1e-6);
}

TEST_CASE("fixed seed and input give bit-identical outputs") {
  Gen gen(47);
  const Networks a(ModelConfig::desk(), 9);
  const Networks b(ModelConfig::desk(), 9);
  const Networks other(ModelConfig::desk(), 10);
  const Var x = Var::constant(gen.tensor({1, 1, 32, 32}, 0, 1));
  const Tensor ya = a.colorize(x).y_rgb.value();
  CHECK(max_abs_diff(ya, a.colorize(x).y_rgb.value()) == 0.0);
  CHECK(max_abs_diff(ya, b.colorize(x).y_rgb.value()) == 0.0);
  CHECK(max_abs_diff(ya, other.colorize(x).y_rgb.value()) > 0.0);
  const Var rgb = Var::constant(gen.tensor({1, 3, 32, 32}, 0, 1));
  CHECK(max_abs_diff(a.restore_nir(rgb).value(), b.restore_nir(rgb).value()) == 0.0);
  CHECK(max_abs_diff(a.judge_rgb(rgb).value(), b.judge_rgb(rgb).value()) == 0.0);
}

TEST_CASE("ablation toggles change the trainable set") {
  ModelConfig full = ModelConfig::desk();
  const Networks f(full, 1);
  CHECK(f.trainable_group_names() ==
        std::vector<std::string>{"grm", "cfem", "fusion", "gb", "da", "db"});
  CHECK(f.grm().has_injection());
  CHECK(f.grm().multiscale());

  ModelConfig no_cfem = full;
  no_cfem.use_hsv_cfem = false;
  const Networks n(no_cfem, 1);
  CHECK_FALSE(contains(n.trainable_group_names(), "cfem"));
  CHECK(n.cfem() == nullptr);
  CHECK_FALSE(n.grm().has_injection());
  CHECK(n.group("grm")->numel() < f.group("grm")->numel());

  ModelConfig no_ms = full;
  no_ms.use_multiscale = false;
  const Networks m(no_ms, 1);
  CHECK_FALSE(m.grm().multiscale());
  CHECK(m.group("grm")->numel() < f.group("grm")->numel());
  CHECK(m.group("cfem")->numel() == f.group("cfem")->numel());

  ModelConfig no_tex = full;
  no_tex.use_texture = false;
  const Networks t(no_tex, 1);
  CHECK(t.parameter_count() == f.parameter_count());
}

TEST_CASE("disabled branches become zeros with unchanged shapes") {
  Gen gen(48);
  const Var x = Var::constant(gen.tensor({2, 1, 32, 32}, 0.1, 0.9));
  ModelConfig cfg = ModelConfig::desk();
  cfg.use_texture = false;
  const ColorizerOutput t = Networks(cfg, 1).colorize(x);
  CHECK(t.y_tex.shape() == Shape{2, 1, 32, 32});
  for (double v : t.y_tex.value().values()) CHECK(v == 0.0);
  CHECK(t.y_rgb.shape() == Shape{2, 3, 32, 32});

  cfg = ModelConfig::desk();
  cfg.use_hsv_cfem = false;
  const ColorizerOutput h = Networks(cfg, 1).colorize(x);
  CHECK(h.y_hsv.shape() == Shape{2, 3, 32, 32});
  for (double v : h.y_hsv.value().values()) CHECK(v == 0.0);
  CHECK_FALSE(h.pyramid.has_value());
  CHECK(h.y_rgb.shape() == Shape{2, 3, 32, 32});
}

TEST_CASE("x_hsv matches the replicated-NIR colour conversion") {
  Gen gen(49);
  const ImagePlane nir = gen.plane(8, 8, ColorSpace::kNir);
  const Tensor got = nir_to_hsv(Var::constant(to_tensor(nir))).value();
  CHECK(max_abs_diff(got, to_tensor(nir_hsv(nir))) == 0.0);
}

TEST_CASE("gradients reach every generator group") {
  Gen gen(50);
  Networks nets(ModelConfig::desk(), 7);
  const Var x = Var::constant(gen.tensor({1, 1, 32, 32}, 0, 1));
  const ColorizerOutput out = nets.colorize(x);
  const Var target = Var::constant(gen.tensor({1, 3, 32, 32}, 0, 1));
  const Var loss = add(add(mean(abs(sub(out.y_rgb, target))), mean(out.y_hsv)),
                       mean(nets.restore_nir(out.y_rgb)));
  backward(loss);
  for (const char* name : {"grm", "cfem", "fusion", "gb"}) {
    CAPTURE(name);
    CHECK(nets.group(name)->has_nonzero_grad());
  }
  CHECK_FALSE(nets.group("da")->has_nonzero_grad());
  CHECK_FALSE(nets.group("db")->has_nonzero_grad());
}

TEST_CASE("perturbing any group changes the reverse generator or colorizer") {
  Gen gen(51);
  const Var x = Var::constant(gen.tensor({1, 1, 16, 16}, 0, 1));
  const Var rgb = Var::constant(gen.tensor({1, 3, 16, 16}, 0, 1));
  for (const char* name : {"grm", "cfem", "fusion", "gb"}) {
    CAPTURE(name);
    Networks nets(ModelConfig::desk(), 8);
    const Tensor y0 = nets.colorize(x).y_rgb.value();
    const Tensor n0 = nets.restore_nir(rgb).value();
    randomize(*nets.group(name), gen, 0.1);
    const double dy = max_abs_diff(y0, nets.colorize(x).y_rgb.value());
    const double dn = max_abs_diff(n0, nets.restore_nir(rgb).value());
    CHECK(std::max(dy, dn) > 1e-9);
  }
}
