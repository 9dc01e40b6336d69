#include "cmseg/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace cmseg {

namespace {

constexpr char kMagic[4] = {'C', 'M', 'S', 'G'};
constexpr std::uint32_t kFeatureFileVersion = 1;

// Fixed little-endian layout; this codebase only targets LE hosts.
static_assert(std::endian::native == std::endian::little, "feature file io assumes little-endian");

template <typename T>
void write_scalar(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_scalar(std::ifstream& in, const std::string& what) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw IoError(IoError::Code::truncated, "truncated feature file header: " + what);
  return value;
}

}  // namespace

void write_features(const FeatureMatrix& features, const std::string& path) {
  validate(features);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(IoError::Code::open_failed, "cannot open for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_scalar<std::uint32_t>(out, kFeatureFileVersion);
  write_scalar<std::uint64_t>(out, static_cast<std::uint64_t>(features.frames()));
  write_scalar<std::uint64_t>(out, static_cast<std::uint64_t>(features.dims()));
  write_scalar<float>(out, static_cast<float>(features.fps));
  for (Eigen::Index t = 0; t < features.frames(); ++t) {
    for (Eigen::Index d = 0; d < features.dims(); ++d) {
      write_scalar<float>(out, static_cast<float>(features.values(t, d)));
    }
  }
  if (!out) throw IoError(IoError::Code::open_failed, "write failed: " + path);
}

FeatureMatrix read_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoError::Code::open_failed, "cannot open for reading: " + path);

  char magic[4] = {};
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError(IoError::Code::bad_magic, "bad magic in feature file: " + path);
  }
  const auto version = read_scalar<std::uint32_t>(in, "version");
  if (version != kFeatureFileVersion) {
    throw IoError(IoError::Code::bad_version,
                  "unsupported feature file version " + std::to_string(version));
  }
  const auto frames = read_scalar<std::uint64_t>(in, "frame count");
  const auto dims = read_scalar<std::uint64_t>(in, "dimension count");
  const auto fps = read_scalar<float>(in, "fps");

  FeatureMatrix features;
  features.fps = fps;
  features.values.resize(static_cast<Eigen::Index>(frames), static_cast<Eigen::Index>(dims));
  std::vector<float> payload(frames * dims);
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(payload.size() * sizeof(float)));
  if (static_cast<std::uint64_t>(in.gcount()) != payload.size() * sizeof(float)) {
    std::ostringstream msg;
    msg << "truncated payload in " << path << ": expected "
        << 28 + payload.size() * sizeof(float) << " bytes, got " << 28 + in.gcount();
    throw IoError(IoError::Code::truncated, msg.str());
  }
  for (std::uint64_t t = 0; t < frames; ++t) {
    for (std::uint64_t d = 0; d < dims; ++d) {
      features.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(d)) =
          payload[t * dims + d];
    }
  }
  return features;
}

void write_labels(const LabelTrack& track, const std::string& path, std::optional<double> fps) {
  std::ofstream out(path);
  if (!out) throw IoError(IoError::Code::open_failed, "cannot open for writing: " + path);
  if (fps) out << "#fps=" << *fps << "\n";
  for (auto label : track) out << (label ? '1' : '0') << '\n';
  if (!out) throw IoError(IoError::Code::open_failed, "write failed: " + path);
}

LabelTrack read_labels(const std::string& path, double* fps_out) {
  std::ifstream in(path);
  if (!in) throw IoError(IoError::Code::open_failed, "cannot open for reading: " + path);
  LabelTrack track;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first && line.rfind("#fps=", 0) == 0) {
      try {
        const double fps = std::stod(line.substr(5));
        if (fps_out != nullptr) *fps_out = fps;
      } catch (const std::exception&) {
        throw IoError(IoError::Code::bad_header, "malformed fps header in " + path);
      }
      first = false;
      continue;
    }
    first = false;
    if (line.empty()) continue;
    if (line == "0") {
      track.push_back(0);
    } else if (line == "1") {
      track.push_back(1);
    } else {
      throw IoError(IoError::Code::bad_label, "label lines must be '0' or '1', got: " + line);
    }
  }
  return track;
}

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json f1b = nlohmann::json::object();
  for (const auto& [threshold, f1] : report.per_threshold_f1b) {
    f1b[std::to_string(threshold)] = f1;
  }
  nlohmann::json f1s = nlohmann::json::object();
  for (const auto& [threshold, f1] : report.per_threshold_f1s) {
    char key[16];
    std::snprintf(key, sizeof(key), "%.2f", threshold);
    f1s[key] = f1;
  }
  return nlohmann::json{{"mf1b", report.mf1b},
                        {"mf1s", report.mf1s},
                        {"per_threshold_f1b", f1b},
                        {"per_threshold_f1s", f1s},
                        {"pred_boundary_count", report.pred_boundary_count},
                        {"gt_boundary_count", report.gt_boundary_count},
                        {"seeds_aggregated", report.seeds_aggregated}};
}

EvalReport report_from_json(const nlohmann::json& doc) {
  EvalReport report;
  report.mf1b = doc.at("mf1b").get<double>();
  report.mf1s = doc.at("mf1s").get<double>();
  for (const auto& [key, value] : doc.at("per_threshold_f1b").items()) {
    report.per_threshold_f1b[std::stoi(key)] = value.get<double>();
  }
  for (const auto& [key, value] : doc.at("per_threshold_f1s").items()) {
    report.per_threshold_f1s[std::stod(key)] = value.get<double>();
  }
  report.pred_boundary_count = doc.at("pred_boundary_count").get<int>();
  report.gt_boundary_count = doc.at("gt_boundary_count").get<int>();
  report.seeds_aggregated = doc.at("seeds_aggregated").get<int>();
  return report;
}

void render_timeline(const std::vector<std::pair<std::string, LabelTrack>>& tracks,
                     const std::string& path) {
  if (tracks.empty()) throw std::invalid_argument("timeline needs at least one track");
  const std::size_t frames = tracks.front().second.size();
  for (const auto& [name, track] : tracks) {
    if (track.size() != frames) throw std::invalid_argument("track length mismatch");
  }

  constexpr int kLaneHeight = 28;
  constexpr int kBarHeight = 18;
  constexpr int kLabelWidth = 70;
  constexpr int kFrameWidth = 3;
  const int width = kLabelWidth + static_cast<int>(frames) * kFrameWidth + 10;
  const int height = static_cast<int>(tracks.size()) * kLaneHeight + 10;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n";
  for (std::size_t lane = 0; lane < tracks.size(); ++lane) {
    const int y = static_cast<int>(lane) * kLaneHeight + 5;
    svg << "<text x=\"4\" y=\"" << y + kBarHeight - 4
        << "\" font-family=\"monospace\" font-size=\"12\">" << tracks[lane].first << "</text>\n";
    svg << "<rect x=\"" << kLabelWidth << "\" y=\"" << y << "\" width=\""
        << frames * kFrameWidth << "\" height=\"" << kBarHeight
        << "\" fill=\"#f0f0f0\" stroke=\"#999\"/>\n";
    for (const auto& run : extract_runs(tracks[lane].second)) {
      svg << "<rect x=\"" << kLabelWidth + run.start * kFrameWidth << "\" y=\"" << y
          << "\" width=\"" << run.length() * kFrameWidth << "\" height=\"" << kBarHeight
          << "\" fill=\"#3b6fd4\"/>\n";
    }
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(IoError::Code::open_failed, "cannot open for writing: " + path);
  out << svg.str();
}

std::vector<std::pair<std::string, std::string>> read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(IoError::Code::open_failed, "cannot open for reading: " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  const auto trim = [](std::string s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return std::string();
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line is not key = value: " + line);
    }
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return entries;
}

}  // namespace cmseg
