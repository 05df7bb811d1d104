// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace mcfnet {

/// Widths and branch toggles for the colorization network and its companions.
struct ModelConfig {
  int grm_width = 64;        // base width of the geometry U-Net
  int cfem_width = 64;       // base width of the HSV generator
  int color_features = 64;   // channels per color-pyramid level
  int spade_hidden = 64;     // shared SPADE hidden width
  int fusion_width = 64;
  int gb_width = 64;         // reverse generator
  int disc_width = 64;

  bool use_texture = true;
  bool use_multiscale = true;
  bool use_hsv_cfem = true;

  /// Narrow preset for CPU runs at 64x64.
  static ModelConfig desk() {
    ModelConfig c;
    c.grm_width = 8;
    c.cfem_width = 8;
    c.color_features = 8;
    c.spade_hidden = 8;
    c.fusion_width = 8;
    c.gb_width = 8;
    c.disc_width = 8;
    return c;
  }

  /// Throws ConfigError on non-positive widths.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

}  // namespace mcfnet
