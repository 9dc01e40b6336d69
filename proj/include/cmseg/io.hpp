#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmseg/core.hpp"
#include "cmseg/metrics.hpp"

namespace cmseg {

inline constexpr const char* kToolVersion = "1.0.0";

struct IoError : std::runtime_error {
  enum class Code { open_failed, bad_magic, bad_version, truncated, bad_label, bad_header };

  IoError(Code c, const std::string& what) : std::runtime_error(what), code(c) {}
  Code code;
};

/// Binary feature file: magic "CMSG", u32 version (=1), u64 T, u64 D,
/// f32 fps, then T*D row-major f32 values. All little-endian, 28-byte header.
FeatureMatrix read_features(const std::string& path);
void write_features(const FeatureMatrix& features, const std::string& path);

/// Text label file: one "0"/"1" line per frame, optional leading
/// "#fps=<value>" header. Frames are 0-indexed top to bottom.
LabelTrack read_labels(const std::string& path, double* fps_out = nullptr);
void write_labels(const LabelTrack& track, const std::string& path,
                  std::optional<double> fps = std::nullopt);

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& doc);

/// One horizontal lane per named track, 1-frames drawn as filled bars.
/// Deterministic byte output for identical input.
void render_timeline(const std::vector<std::pair<std::string, LabelTrack>>& tracks,
                     const std::string& path);

/// Key/value experiment config text: "key = value" lines, '#' comments.
/// Unknown keys throw std::invalid_argument.
std::vector<std::pair<std::string, std::string>> read_key_values(const std::string& path);

}  // namespace cmseg
