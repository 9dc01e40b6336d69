#pragma once

#include <string>

#include "cmseg/core.hpp"

namespace cmseg {

enum class FusionStrategy { cmpl, insertion_only, refinement_only, merge, local };

std::string to_string(FusionStrategy strategy);
FusionStrategy fusion_strategy_from_string(const std::string& name);

struct FusionConfig {
  int gamma = 4;             // insertion bandwidth in frames
  int delta = 4;             // refinement matching window in frames
  double threshold = 0.5;    // pseudo-label probability cutoff
  FusionStrategy strategy = FusionStrategy::cmpl;
  bool insertion_first = false;  // alternative transform order for cmpl
};

/// Label 1 iff prob > threshold (strict).
LabelTrack threshold_probs(const ProbTrack& probs, double threshold);

/// Copy cp[i] into frames whose pseudo-label window of integer offsets
/// -gamma+1..gamma-1 (clipped at track ends) contains no 1; keep pl[i]
/// elsewhere. Never deletes a pseudo-label 1.
LabelTrack insertion(const LabelTrack& pl, const LabelTrack& cp, int gamma);

/// Match pl runs to cp runs one-to-one, greedily by ascending center
/// distance, only within delta frames. Each matched run is translated so its
/// center lands at the midpoint of the two centers (half-frames rounded
/// toward the cp side), clamped to stay inside the track with >= 1 background
/// frame to neighboring runs. Run count and run lengths are preserved.
LabelTrack refinement(const LabelTrack& pl, const LabelTrack& cp, int delta);

/// Refinement of the original pl runs, then insertion with the refined track.
/// With config.insertion_first the two transforms run in the opposite order.
LabelTrack cmpl(const LabelTrack& pl, const LabelTrack& cp, const FusionConfig& config);

/// Framewise logical OR.
LabelTrack merge_union(const LabelTrack& pl, const LabelTrack& cp);

/// Copy cp 1-frames into pl segments strictly longer than the mean pl
/// segment length; all pl 1s retained.
LabelTrack local_fusion(const LabelTrack& pl, const LabelTrack& cp);

/// Dispatch on config.strategy.
LabelTrack apply_fusion(const LabelTrack& pl, const LabelTrack& cp, const FusionConfig& config);

}  // namespace cmseg
