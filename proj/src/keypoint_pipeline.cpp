#include "signsynth/keypoint_pipeline.hpp"

#include <limits>

#include "signsynth/common.hpp"

namespace signsynth {

std::pair<std::vector<RawLandmarkFrame>, InterpolationReport> interpolate_low_confidence(
    std::span<const RawLandmarkFrame> frames, double threshold) {
  if (frames.empty()) throw DataError("empty input");
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("threshold must lie in [0,1]");
  }

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  const std::size_t n = frames.size();
  std::vector<RawLandmarkFrame> out(frames.begin(), frames.end());
  std::vector<bool> touched(n, false);
  InterpolationReport report;

  // Per landmark: nearest confident frame at or before t, and at or after t.
  std::vector<std::size_t> prev(n), next(n);
  for (std::size_t g = 0; g < kRawLandmarks; ++g) {
    std::size_t last = kNone;
    for (std::size_t t = 0; t < n; ++t) {
      if (frames[t].at(g).confidence >= threshold) last = t;
      prev[t] = last;
    }
    last = kNone;
    for (std::size_t t = n; t-- > 0;) {
      if (frames[t].at(g).confidence >= threshold) last = t;
      next[t] = last;
    }

    for (std::size_t t = 0; t < n; ++t) {
      if (frames[t].at(g).confidence >= threshold) continue;
      std::size_t donor = kNone;
      if (prev[t] != kNone && next[t] != kNone) {
        donor = (t - prev[t] <= next[t] - t) ? prev[t] : next[t];
      } else if (prev[t] != kNone) {
        donor = prev[t];
      } else {
        donor = next[t];
      }
      if (donor == kNone) {
        ++report.unresolved;
        continue;
      }
      Landmark& dst = out[t].at(g);
      const Landmark& src = frames[donor].at(g);
      dst.x = src.x;
      dst.y = src.y;
      ++report.keypoints_filled;
      touched[t] = true;
    }
  }
  for (bool b : touched) report.frames_touched += b ? 1 : 0;
  return {std::move(out), report};
}

PoseFrame select_and_flatten(const RawLandmarkFrame& frame, const KeypointSelection& sel) {
  if (sel.keypoint_count() != kSelectedKeypoints) {
    throw std::invalid_argument("keypoint selection must hold 76 keypoints");
  }
  PoseFrame out;
  std::size_t k = 0;
  auto put = [&](const Landmark& lm) {
    out.values[k++] = static_cast<float>(lm.x);
    out.values[k++] = static_cast<float>(lm.y);
  };
  for (std::size_t i : sel.body_indices) put(frame.body[i]);
  for (std::size_t i : sel.face_indices) put(frame.face[i]);
  for (const Landmark& lm : frame.left_hand) put(lm);
  for (const Landmark& lm : frame.right_hand) put(lm);
  return out;
}

PoseSequence process_word_video(std::span<const RawLandmarkFrame> frames,
                                const KeypointSelection& sel, double threshold,
                                InterpolationReport* report) {
  auto [patched, rep] = interpolate_low_confidence(frames, threshold);
  if (report) *report = rep;
  PoseSequence seq;
  seq.frames.reserve(patched.size());
  for (const auto& f : patched) seq.frames.push_back(select_and_flatten(f, sel));
  return seq;
}

}  // namespace signsynth
