#include "vidfuse/records.hpp"

#include "vidfuse/types.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace vidfuse {

namespace {

std::ifstream open_input(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError(file.string() + ": cannot open");
  return in;
}

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_string()) throw DataError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> require_dist(const json& j) {
  const json& v = require(j, "dist");
  if (!v.is_array()) throw DataError("field 'dist' must be an array");
  std::vector<double> dist;
  for (const auto& x : v) {
    if (!x.is_number()) throw DataError("field 'dist' must contain numbers");
    dist.push_back(x.get<double>());
  }
  return dist;
}

void validate_dist(std::vector<double>& dist) {
  if (dist.size() < 2) throw DataError("dist needs at least 2 classes");
  double sum = 0.0;
  for (double x : dist) {
    if (!std::isfinite(x) || x < 0.0) throw DataError("dist entries must be finite and >= 0");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kRecordSumTolerance)
    throw DataError("dist sums to " + std::to_string(sum) + ", outside 1 +/- 1e-6");
  // Already-normalised vectors are left untouched so re-parsing is exact.
  if (std::abs(sum - 1.0) > 1e-12)
    for (double& x : dist) x /= sum;
}

}  // namespace

PredictionRecord parse_prediction_record(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("record must be a JSON object");

  PredictionRecord r;
  r.video_id = require_string(j, "video_id");
  r.modality = require_string(j, "modality");
  const std::string level = require_string(j, "level");
  if (level == "frame")
    r.level = PredictionLevel::Frame;
  else if (level == "video")
    r.level = PredictionLevel::Video;
  else
    throw DataError("level must be 'frame' or 'video', got '" + level + "'");

  if (auto it = j.find("frame_index"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw DataError("frame_index must be an integer");
    r.frame_index = it->get<int>();
    if (*r.frame_index < 1) throw DataError("frame_index must be >= 1");
  }
  if (r.level == PredictionLevel::Frame && !r.frame_index)
    throw DataError("frame-level record without frame_index");
  if (auto it = j.find("source"); it != j.end() && it->is_string()) r.source = it->get<std::string>();

  r.dist = require_dist(j);
  validate_dist(r.dist);
  return r;
}

std::string serialize_prediction_record(const PredictionRecord& r) {
  json j = json::object();
  j["video_id"] = r.video_id;
  j["modality"] = r.modality;
  j["level"] = r.level == PredictionLevel::Frame ? "frame" : "video";
  if (r.frame_index) j["frame_index"] = *r.frame_index;
  j["dist"] = r.dist;
  if (r.source) j["source"] = *r.source;
  return j.dump();
}

std::vector<PredictionRecord> parse_prediction_records(std::istream& in) {
  std::vector<PredictionRecord> out;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }))
      continue;
    try {
      out.push_back(parse_prediction_record(line));
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<PredictionRecord> parse_prediction_records(const fs::path& file) {
  auto in = open_input(file);
  try {
    return parse_prediction_records(in);
  } catch (const DataError& e) {
    throw DataError(file.string() + ": " + e.what());
  }
}

std::vector<PredictionBundle> group_into_bundles(const std::vector<PredictionRecord>& records) {
  std::map<std::string, PredictionBundle> by_video;
  std::map<std::string, std::map<std::string, std::map<int, ProbDist>>> frames;
  std::size_t classes = 0;

  for (const auto& r : records) {
    if (classes == 0) classes = r.dist.size();
    if (r.dist.size() != classes)
      throw DataError("video '" + r.video_id + "': records disagree on the class count");
    auto& b = by_video[r.video_id];
    b.video_id = r.video_id;
    if (std::find(b.modalities.begin(), b.modalities.end(), r.modality) == b.modalities.end())
      b.modalities.push_back(r.modality);
    const ProbDist d = Eigen::Map<const ProbDist>(r.dist.data(), static_cast<Eigen::Index>(r.dist.size()));
    if (r.level == PredictionLevel::Video) {
      if (!b.video_preds.emplace(r.modality, d).second)
        throw DataError("video '" + r.video_id + "': duplicate video-level record for modality '" +
                        r.modality + "'");
    } else if (!frames[r.video_id][r.modality].emplace(*r.frame_index, d).second) {
      throw DataError("video '" + r.video_id + "': duplicate frame " +
                      std::to_string(*r.frame_index) + " for modality '" + r.modality + "'");
    }
  }

  std::vector<PredictionBundle> out;
  for (auto& [id, b] : by_video) {
    bool first = true;
    for (auto& [modality, per_frame] : frames[id]) {
      std::vector<int> indices;
      auto& stream = b.frame_preds[modality];
      for (auto& [k, d] : per_frame) {
        indices.push_back(k);
        stream.push_back(std::move(d));
      }
      if (!first && indices != b.frame_indices)
        throw DataError("video '" + id + "': modalities cover different key-frames");
      b.frame_indices = std::move(indices);
      first = false;
    }
    out.push_back(std::move(b));
  }
  return out;
}

std::string serialize_fused(const FusedPrediction& f) {
  json j = json::object();
  j["video_id"] = f.video_id;
  j["dist"] = f.dist;
  j["predicted_class"] = f.predicted_class;
  j["modality_order"] = f.modality_order;
  j["frame_order"] = f.frame_order;
  j["frame_tiers"] = f.frame_tiers;
  return j.dump();
}

std::vector<FusedPrediction> parse_fused(const fs::path& file) {
  auto in = open_input(file);
  std::vector<FusedPrediction> out;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      FusedPrediction f;
      f.video_id = require_string(j, "video_id");
      f.dist = require_dist(j);
      const json& pc = require(j, "predicted_class");
      if (!pc.is_number_integer()) throw DataError("predicted_class must be an integer");
      f.predicted_class = pc.get<int>();
      if (auto it = j.find("modality_order"); it != j.end())
        f.modality_order = it->get<std::vector<std::string>>();
      if (auto it = j.find("frame_order"); it != j.end()) f.frame_order = it->get<std::vector<int>>();
      if (auto it = j.find("frame_tiers"); it != j.end()) f.frame_tiers = it->get<std::string>();
      out.push_back(std::move(f));
    } catch (const json::exception& e) {
      throw DataError(file.string() + ": line " + std::to_string(lineno) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(file.string() + ": line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::map<std::string, int> parse_labels_csv(const fs::path& file) {
  auto in = open_input(file);
  std::string line;
  if (!std::getline(in, line)) throw DataError(file.string() + ": empty labels file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "video_id,label")
    throw DataError(file.string() + ": header must be 'video_id,label'");
  std::map<std::string, int> labels;
  for (int lineno = 2; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    const auto where = file.string() + ": line " + std::to_string(lineno);
    if (comma == std::string::npos || comma == 0) throw DataError(where + ": expected video_id,label");
    const std::string id = line.substr(0, comma);
    const std::string value = line.substr(comma + 1);
    int label = -1;
    try {
      std::size_t used = 0;
      label = std::stoi(value, &used);
      if (used != value.size()) label = -1;
    } catch (const std::exception&) {
    }
    if (label < 0) throw DataError(where + ": label must be a non-negative integer");
    if (!labels.emplace(id, label).second) throw DataError(where + ": duplicate video_id '" + id + "'");
  }
  return labels;
}

std::string report_to_json(const AccuracyReport& report) {
  json j = json::object();
  j["overall_acc"] = report.overall_acc;
  j["macro_acc"] = report.macro_acc;
  json per_class = json::array();
  for (std::size_t c = 0; c < report.support.size(); ++c)
    per_class.push_back({{"class", c}, {"support", report.support[c]}, {"correct", report.correct[c]}});
  j["per_class"] = per_class;
  j["confusion"] = report.confusion;
  return j.dump(2);
}

void write_recall_csv(std::ostream& out, const AccuracyReport& report) {
  out << "class,recall\n";
  const auto old_precision = out.precision(17);
  for (std::size_t c = 0; c < report.support.size(); ++c)
    if (report.support[c] > 0)
      out << c << ',' << static_cast<double>(report.correct[c]) / report.support[c] << '\n';
  out.precision(old_precision);
}

std::string selection_to_json(const SelectionResult& selection, const std::string& video_id,
                              int n_kf) {
  json j = json::object();
  j["video_id"] = video_id;
  j["n_kf"] = n_kf;
  j["d_low"] = selection.d_low;
  json chosen = json::array();
  for (const auto& c : selection.chosen)
    chosen.push_back({{"frame_index", c.frame_index}, {"padded", c.padded}});
  j["chosen"] = chosen;
  json edges = json::array();
  for (const auto& [a, b] : selection.chosen_edges) edges.push_back({a, b});
  j["edges"] = edges;
  return j.dump(2);
}

SelectionDocument parse_selection_json(const fs::path& file) {
  auto in = open_input(file);
  try {
    const json j = json::parse(in);
    SelectionDocument doc;
    doc.video_id = require_string(j, "video_id");
    doc.n_kf = require(j, "n_kf").get<int>();
    doc.d_low = require(j, "d_low").get<int>();
    for (const auto& c : require(j, "chosen")) {
      ChosenFrame f;
      f.frame_index = require(c, "frame_index").get<int>();
      f.padded = require(c, "padded").get<bool>();
      if (f.frame_index < 1) throw DataError("frame_index must be >= 1");
      doc.chosen.push_back(f);
    }
    for (const auto& e : require(j, "edges")) {
      if (!e.is_array() || e.size() != 2) throw DataError("edges must be [i, j] pairs");
      doc.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return doc;
  } catch (const json::exception& e) {
    throw DataError(file.string() + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(file.string() + ": " + e.what());
  }
}

}  // namespace vidfuse
