#pragma once

#include "vidfuse/conflation.hpp"
#include "vidfuse/fusion_engine.hpp"
#include "vidfuse/keyframe_select.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vidfuse {

enum class PredictionLevel { Frame, Video };

/// One line of the JSON-Lines prediction interchange:
///   {"video_id":..., "modality":..., "level":"frame"|"video",
///    "frame_index":k (frame level only), "dist":[...], "source":... (optional)}
struct PredictionRecord {
  std::string video_id;
  std::string modality;
  PredictionLevel level = PredictionLevel::Video;
  std::optional<int> frame_index;
  std::vector<double> dist;
  std::optional<std::string> source;

  bool operator==(const PredictionRecord&) const = default;
};

/// Dists whose sum lies within this distance of 1 are accepted (and rescaled).
inline constexpr double kRecordSumTolerance = 1e-6;

PredictionRecord parse_prediction_record(std::string_view line);
std::string serialize_prediction_record(const PredictionRecord& record);

/// Reads a JSONL file; blank lines are skipped. Errors name the line number.
std::vector<PredictionRecord> parse_prediction_records(std::istream& in);
std::vector<PredictionRecord> parse_prediction_records(const std::filesystem::path& file);

/// Groups records per video (sorted by video_id). Modality order is the order
/// of first appearance; frame-level predictions are sorted by frame_index.
std::vector<PredictionBundle> group_into_bundles(const std::vector<PredictionRecord>& records);

/// One line of fuse output.
struct FusedPrediction {
  std::string video_id;
  std::vector<double> dist;
  int predicted_class = 0;
  std::vector<std::string> modality_order;
  std::vector<int> frame_order;
  std::string frame_tiers;
};

std::string serialize_fused(const FusedPrediction& fused);
std::vector<FusedPrediction> parse_fused(const std::filesystem::path& file);

/// CSV with header `video_id,label` and integer labels.
std::map<std::string, int> parse_labels_csv(const std::filesystem::path& file);

/// {overall_acc, macro_acc, per_class: [{class, support, correct}], confusion}
std::string report_to_json(const AccuracyReport& report);

/// `class,recall` rows for classes with non-zero support (recall in [0, 1]).
void write_recall_csv(std::ostream& out, const AccuracyReport& report);

/// {video_id, n_kf, d_low, chosen: [{frame_index, padded}], edges: [[i, j], ...]}
std::string selection_to_json(const SelectionResult& selection, const std::string& video_id,
                              int n_kf);

struct SelectionDocument {
  std::string video_id;
  int n_kf = 0;
  int d_low = 0;
  std::vector<ChosenFrame> chosen;
  std::vector<std::pair<int, int>> edges;
};

SelectionDocument parse_selection_json(const std::filesystem::path& file);

}  // namespace vidfuse
