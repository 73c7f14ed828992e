#pragma once

#include "vidfuse/fusion_engine.hpp"
#include "vidfuse/motion_features.hpp"
#include "vidfuse/optical_flow.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace vidfuse {

/// Settings shared by the CLI subcommands.
///
/// Stored as `key = value` lines; `#` starts a comment. Keys:
///
///   n_kf                 key-frames per video (>= 2)
///   flow.alpha           Horn-Schunck smoothness weight (> 0)
///   flow.iterations      maximum sweeps (>= 1)
///   flow.epsilon         convergence tolerance (>= 0)
///   hist.mag_bins        magnitude bins (>= 1)
///   hist.ang_bins        angle bins (>= 1)
///   hist.mag_cap         magnitude saturation, px/frame (> 0)
///   fusion.modalities    comma-separated fold order, e.g. spatial,temporal
///   fusion.frame_tiers   cross_then_self | self_then_cross
///   input, output        optional default paths
struct PipelineConfig {
  int n_kf = 6;
  HornSchunckParams flow;
  HistogramConfig hist;
  FusionPlan plan;
  std::string input;
  std::string output;

  bool operator==(const PipelineConfig& other) const;
};

/// Throws UsageError on unknown keys, malformed values or out-of-range fields.
PipelineConfig parse_config(std::istream& in);
PipelineConfig load_config(const std::filesystem::path& file);

/// Emits every key; doubles are written with 17 significant digits.
std::string serialize_config(const PipelineConfig& config);

void validate_config(const PipelineConfig& config);

std::string to_string(FrameTierOrder order);
FrameTierOrder parse_frame_tiers(const std::string& text);

}  // namespace vidfuse
