#include "vidfuse/config.hpp"

#include "vidfuse/types.hpp"

#include <fstream>
#include <sstream>

namespace vidfuse {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (!in || !(in >> std::ws).eof())
    throw UsageError("config: '" + key + "' has invalid value '" + value + "'");
  return out;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ','))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

}  // namespace

bool PipelineConfig::operator==(const PipelineConfig& o) const {
  return n_kf == o.n_kf && flow.alpha == o.flow.alpha && flow.iterations == o.flow.iterations &&
         flow.epsilon == o.flow.epsilon && hist.mag_bins == o.hist.mag_bins &&
         hist.ang_bins == o.hist.ang_bins && hist.mag_cap == o.hist.mag_cap &&
         plan.modality_order == o.plan.modality_order && plan.frame_tiers == o.plan.frame_tiers &&
         input == o.input && output == o.output;
}

std::string to_string(FrameTierOrder order) {
  return order == FrameTierOrder::CrossThenSelf ? "cross_then_self" : "self_then_cross";
}

FrameTierOrder parse_frame_tiers(const std::string& text) {
  if (text == "cross_then_self") return FrameTierOrder::CrossThenSelf;
  if (text == "self_then_cross") return FrameTierOrder::SelfThenCross;
  throw UsageError("config: fusion.frame_tiers must be cross_then_self or self_then_cross");
}

void validate_config(const PipelineConfig& c) {
  if (c.n_kf < 2) throw UsageError("config: n_kf must be >= 2");
  if (!(c.flow.alpha > 0.0)) throw UsageError("config: flow.alpha must be > 0");
  if (c.flow.iterations < 1) throw UsageError("config: flow.iterations must be >= 1");
  if (!(c.flow.epsilon >= 0.0)) throw UsageError("config: flow.epsilon must be >= 0");
  if (c.hist.mag_bins < 1 || c.hist.ang_bins < 1)
    throw UsageError("config: histogram bin counts must be >= 1");
  if (!(c.hist.mag_cap > 0.0)) throw UsageError("config: hist.mag_cap must be > 0");
}

PipelineConfig parse_config(std::istream& in) {
  PipelineConfig c;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "n_kf") c.n_kf = parse_number<int>(key, value);
    else if (key == "flow.alpha") c.flow.alpha = parse_number<double>(key, value);
    else if (key == "flow.iterations") c.flow.iterations = parse_number<int>(key, value);
    else if (key == "flow.epsilon") c.flow.epsilon = parse_number<double>(key, value);
    else if (key == "hist.mag_bins") c.hist.mag_bins = parse_number<int>(key, value);
    else if (key == "hist.ang_bins") c.hist.ang_bins = parse_number<int>(key, value);
    else if (key == "hist.mag_cap") c.hist.mag_cap = parse_number<double>(key, value);
    else if (key == "fusion.modalities") c.plan.modality_order = split_list(value);
    else if (key == "fusion.frame_tiers") c.plan.frame_tiers = parse_frame_tiers(value);
    else if (key == "input") c.input = value;
    else if (key == "output") c.output = value;
    else throw UsageError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  validate_config(c);
  return c;
}

PipelineConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw UsageError(file.string() + ": cannot open config");
  return parse_config(in);
}

std::string serialize_config(const PipelineConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "n_kf = " << c.n_kf << '\n'
      << "flow.alpha = " << c.flow.alpha << '\n'
      << "flow.iterations = " << c.flow.iterations << '\n'
      << "flow.epsilon = " << c.flow.epsilon << '\n'
      << "hist.mag_bins = " << c.hist.mag_bins << '\n'
      << "hist.ang_bins = " << c.hist.ang_bins << '\n'
      << "hist.mag_cap = " << c.hist.mag_cap << '\n'
      << "fusion.modalities = ";
  for (std::size_t i = 0; i < c.plan.modality_order.size(); ++i)
    out << (i ? "," : "") << c.plan.modality_order[i];
  out << '\n' << "fusion.frame_tiers = " << to_string(c.plan.frame_tiers) << '\n';
  if (!c.input.empty()) out << "input = " << c.input << '\n';
  if (!c.output.empty()) out << "output = " << c.output << '\n';
  return out.str();
}

}  // namespace vidfuse
