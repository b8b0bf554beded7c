#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "signsynth/pose_model.hpp"

namespace signsynth {

inline constexpr double kDefaultConfidenceThreshold = 0.8;

struct InterpolationReport {
  std::size_t frames_touched = 0;    // frames with at least one filled landmark
  std::size_t keypoints_filled = 0;  // landmark slots copied from a donor frame
  std::size_t unresolved = 0;        // low-confidence slots with no donor anywhere
};

/// Replaces the (x, y) of every landmark whose confidence is below
/// `threshold` with the same landmark from the nearest frame where it is
/// confident. Equidistant donors resolve to the earlier frame. Landmarks
/// without any confident donor are left unchanged and counted as unresolved.
std::pair<std::vector<RawLandmarkFrame>, InterpolationReport> interpolate_low_confidence(
    std::span<const RawLandmarkFrame> frames, double threshold = kDefaultConfidenceThreshold);

PoseFrame select_and_flatten(const RawLandmarkFrame& frame, const KeypointSelection& sel);

PoseSequence process_word_video(std::span<const RawLandmarkFrame> frames,
                                const KeypointSelection& sel,
                                double threshold = kDefaultConfidenceThreshold,
                                InterpolationReport* report = nullptr);

}  // namespace signsynth
