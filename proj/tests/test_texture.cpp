// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <vector>

#include "mcfnet/errors.hpp"
#include "mcfnet/texture.hpp"
#include "support.hpp"

using namespace mcfnet;
using mcfnet::testing::Gen;

namespace {

// Direct convolution with the stencil, clamping coordinates at the border.
TextureMap brute_laplacian(const ImagePlane& img) {
  const int h = img.height(), w = img.width();
  TextureMap out(h, w, img.channels());
  auto px = [&](int y, int x, int c) {
    y = std::clamp(y, 0, h - 1);
    x = std::clamp(x, 0, w - 1);
    return img.at(y, x, c);
  };
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            acc += kLaplacianKernel[(dy + 1) * 3 + dx + 1] * px(y + dy, x + dx, c);
          }
        }
        out.at(y, x, c) = acc;
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("constant image gives an all-zero map") {
  const TextureMap t = laplacian_map(ImagePlane(6, 5, ColorSpace::kRgb, 0.7));
  for (double v : t.values()) CHECK(v == 0.0);
}

TEST_CASE("impulse imprints the kernel") {
  ImagePlane img(5, 5, ColorSpace::kNir, 0.0);
  img.at(2, 2, 0) = 1.0;
  const TextureMap t = laplacian_map(img);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 5; ++x) {
      double want = 0.0;
      if (y == 2 && x == 2) want = -4.0;
      if ((y == 1 || y == 3) && x == 2) want = 1.0;
      if ((x == 1 || x == 3) && y == 2) want = 1.0;
      CHECK(t.at(y, x, 0) == want);
    }
  }
}

TEST_CASE("horizontal ramp is zero at interior pixels") {
  ImagePlane img(6, 8, ColorSpace::kNir);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 8; ++x) img.at(y, x, 0) = x / 8.0;
  }
  const TextureMap t = laplacian_map(img);
  for (int y = 0; y < 6; ++y) {
    for (int x = 1; x < 7; ++x) CHECK(t.at(y, x, 0) == 0.0);
  }
  // Replicated border columns see a one-sided difference.
  CHECK(t.at(3, 0, 0) == doctest::Approx(1.0 / 8.0));
  CHECK(t.at(3, 7, 0) == doctest::Approx(-1.0 / 8.0));
}

TEST_CASE("step edge responds only in the two columns next to the step") {
  ImagePlane img(6, 8, ColorSpace::kRgb);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 6; ++y) {
      for (int x = 4; x < 8; ++x) img.at(y, x, c) = 1.0;
    }
  }
  const TextureMap t = edge_map(img);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 6; ++y) {
      for (int x = 0; x < 8; ++x) {
        const double want = x == 3 ? 1.0 : (x == 4 ? -1.0 : 0.0);
        CHECK(t.at(y, x, c) == want);
      }
    }
  }
}

TEST_CASE("edge_map equals laplacian_map and matches direct convolution") {
  Gen gen(21);
  for (int trial = 0; trial < 10; ++trial) {
    const ColorSpace space = trial % 2 ? ColorSpace::kNir : ColorSpace::kRgb;
    const ImagePlane img = gen.plane(gen.integer(3, 12), gen.integer(3, 12), space);
    const TextureMap a = laplacian_map(img);
    const TextureMap b = edge_map(img);
    const TextureMap ref = brute_laplacian(img);
    REQUIRE(a.values().size() == ref.values().size());
    for (std::size_t i = 0; i < a.values().size(); ++i) {
      CHECK(a.values()[i] == b.values()[i]);
      CHECK(a.values()[i] == doctest::Approx(ref.values()[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("identical channels give identical responses") {
  Gen gen(22);
  const ImagePlane base = gen.plane(7, 7, ColorSpace::kNir);
  ImagePlane rgb(7, 7, ColorSpace::kRgb);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 7; ++y) {
      for (int x = 0; x < 7; ++x) rgb.at(y, x, c) = base.at(y, x, 0);
    }
  }
  const TextureMap t = edge_map(rgb);
  for (int y = 0; y < 7; ++y) {
    for (int x = 0; x < 7; ++x) {
      CHECK(t.at(y, x, 0) == t.at(y, x, 1));
      CHECK(t.at(y, x, 1) == t.at(y, x, 2));
    }
  }
}

TEST_CASE("property: linearity") {
  Gen gen(23);
  for (int trial = 0; trial < 10; ++trial) {
    const int h = gen.integer(3, 10), w = gen.integer(3, 10);
    const ImagePlane x = gen.plane(h, w, ColorSpace::kNir);
    const ImagePlane y = gen.plane(h, w, ColorSpace::kNir);
    const double a = gen.uniform(0, 0.5), b = gen.uniform(0, 0.5);
    ImagePlane mix(h, w, ColorSpace::kNir);
    for (std::size_t i = 0; i < mix.size(); ++i) mix.values()[i] = a * x.values()[i] + b * y.values()[i];
    const TextureMap lx = laplacian_map(x), ly = laplacian_map(y), lm = laplacian_map(mix);
    for (std::size_t i = 0; i < mix.size(); ++i) {
      CHECK(lm.values()[i] == doctest::Approx(a * lx.values()[i] + b * ly.values()[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: translation equivariance away from borders") {
  Gen gen(24);
  const ImagePlane x = gen.plane(12, 12, ColorSpace::kNir);
  ImagePlane shifted(12, 12, ColorSpace::kNir);
  for (int y = 0; y < 12; ++y) {
    for (int c = 0; c < 12; ++c) shifted.at(y, c, 0) = x.at((y + 12 - 2) % 12, (c + 12 - 1) % 12, 0);
  }
  const TextureMap a = laplacian_map(x);
  const TextureMap b = laplacian_map(shifted);
  for (int y = 3; y < 11; ++y) {
    for (int c = 2; c < 11; ++c) CHECK(b.at(y, c, 0) == doctest::Approx(a.at(y - 2, c - 1, 0)));
  }
}

TEST_CASE("images below 3x3 are rejected") {
  CHECK_THROWS_AS(laplacian_map(ImagePlane(2, 5, ColorSpace::kNir)), ShapeError);
  CHECK_THROWS_AS(edge_map(ImagePlane(5, 2, ColorSpace::kRgb)), ShapeError);
  CHECK_NOTHROW(laplacian_map(ImagePlane(3, 3, ColorSpace::kNir)));
}

TEST_CASE("adjoint satisfies <L x, g> == <x, L^T g>") {
  Gen gen(25);
  for (int trial = 0; trial < 10; ++trial) {
    const int h = gen.integer(3, 9), w = gen.integer(3, 9);
    std::vector<double> x(h * w), g(h * w), lx(h * w), ltg(h * w, 0.0);
    for (auto& v : x) v = gen.uniform(-1, 1);
    for (auto& v : g) v = gen.uniform(-1, 1);
    detail::laplacian_plane(x, h, w, lx);
    detail::laplacian_plane_adjoint(g, h, w, ltg);
    double lhs = 0.0, rhs = 0.0;
    for (int i = 0; i < h * w; ++i) {
      lhs += lx[i] * g[i];
      rhs += x[i] * ltg[i];
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}
