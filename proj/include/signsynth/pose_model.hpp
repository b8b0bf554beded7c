#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace signsynth {

inline constexpr std::size_t kBodyLandmarks = 33;
inline constexpr std::size_t kFaceLandmarks = 468;
inline constexpr std::size_t kHandLandmarks = 21;
inline constexpr std::size_t kRawLandmarks =
    kBodyLandmarks + kFaceLandmarks + 2 * kHandLandmarks;

inline constexpr std::size_t kSelectedBody = 11;
inline constexpr std::size_t kSelectedFace = 23;
inline constexpr std::size_t kSelectedKeypoints =
    kSelectedBody + kSelectedFace + 2 * kHandLandmarks;  // 76
inline constexpr std::size_t kPoseDims = 2 * kSelectedKeypoints;  // 152

struct Landmark {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;

  friend bool operator==(const Landmark&, const Landmark&) = default;
};

/// One frame of holistic-extractor output. Landmarks are addressed either per
/// group or through a global index in [0, kRawLandmarks) laid out as
/// body, face, left hand, right hand.
struct RawLandmarkFrame {
  std::array<Landmark, kBodyLandmarks> body{};
  std::array<Landmark, kFaceLandmarks> face{};
  std::array<Landmark, kHandLandmarks> left_hand{};
  std::array<Landmark, kHandLandmarks> right_hand{};

  Landmark& at(std::size_t global_index);
  const Landmark& at(std::size_t global_index) const;

  /// Throws DataError when a coordinate is non-finite or a confidence is
  /// outside [0, 1].
  void validate() const;

  friend bool operator==(const RawLandmarkFrame&, const RawLandmarkFrame&) = default;
};

inline constexpr std::size_t kFaceOffset = kBodyLandmarks;
inline constexpr std::size_t kLeftHandOffset = kFaceOffset + kFaceLandmarks;
inline constexpr std::size_t kRightHandOffset = kLeftHandOffset + kHandLandmarks;

/// The 152-value model input: 76 keypoints as adjacent (x, y) pairs in the
/// order body, face, left hand, right hand.
struct PoseFrame {
  std::array<float, kPoseDims> values{};

  bool all_finite() const;
  friend bool operator==(const PoseFrame&, const PoseFrame&) = default;
};

struct PoseSequence {
  std::vector<PoseFrame> frames;
  std::string source_id;
  std::optional<double> fps_hint;

  std::size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
  friend bool operator==(const PoseSequence&, const PoseSequence&) = default;
};

enum class WordOrder { SWO, RWO };

std::string_view to_string(WordOrder order);
WordOrder parse_word_order(std::string_view s);

/// The twelve grammatical phenomenon tags plus "corpus" and "custom".
const std::vector<std::string>& phenomenon_tags();
const std::vector<std::string>& template_phenomena();  // the twelve only
bool is_known_phenomenon(std::string_view tag);

struct SentenceRecord {
  std::string id;
  std::vector<std::string> text;
  std::optional<std::string> phenomenon;
  WordOrder word_order = WordOrder::SWO;
  std::optional<std::string> pose_path;
  std::optional<std::size_t> n_frames;

  /// Throws DataError on empty text, or on pose_path without positive n_frames.
  void validate() const;
  friend bool operator==(const SentenceRecord&, const SentenceRecord&) = default;
};

struct KeypointSelection {
  std::vector<std::size_t> body_indices;  // into [0, 33)
  std::vector<std::size_t> face_indices;  // into [0, 468)
  // Both hands are always kept whole.

  std::size_t keypoint_count() const {
    return body_indices.size() + face_indices.size() + 2 * kHandLandmarks;
  }
  void validate() const;
};

/// Body landmarks dropped from the selection (legs, hips, inner/outer eye
/// corners, mouth corners and finger tips tracked by the body model).
const std::vector<std::size_t>& excluded_body_landmarks();

KeypointSelection default_selection();

}  // namespace signsynth
