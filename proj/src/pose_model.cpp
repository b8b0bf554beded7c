#include "signsynth/pose_model.hpp"

#include <algorithm>
#include <cmath>

#include "signsynth/common.hpp"

namespace signsynth {

Landmark& RawLandmarkFrame::at(std::size_t g) {
  if (g < kFaceOffset) return body[g];
  if (g < kLeftHandOffset) return face[g - kFaceOffset];
  if (g < kRightHandOffset) return left_hand[g - kLeftHandOffset];
  if (g < kRawLandmarks) return right_hand[g - kRightHandOffset];
  throw std::out_of_range("landmark index " + std::to_string(g));
}

const Landmark& RawLandmarkFrame::at(std::size_t g) const {
  return const_cast<RawLandmarkFrame*>(this)->at(g);
}

void RawLandmarkFrame::validate() const {
  for (std::size_t g = 0; g < kRawLandmarks; ++g) {
    const Landmark& lm = at(g);
    if (!std::isfinite(lm.x) || !std::isfinite(lm.y)) {
      throw DataError("landmark " + std::to_string(g) + ": non-finite coordinate");
    }
    if (!(lm.confidence >= 0.0 && lm.confidence <= 1.0)) {
      throw DataError("landmark " + std::to_string(g) + ": confidence outside [0,1]");
    }
  }
}

bool PoseFrame::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](float v) { return std::isfinite(v); });
}

std::string_view to_string(WordOrder order) {
  return order == WordOrder::SWO ? "SWO" : "RWO";
}

WordOrder parse_word_order(std::string_view s) {
  const std::string lower = ascii_lower(s);
  if (lower == "swo") return WordOrder::SWO;
  if (lower == "rwo") return WordOrder::RWO;
  throw DataError("unknown word order '" + std::string(s) + "'");
}

const std::vector<std::string>& template_phenomena() {
  static const std::vector<std::string> tags = {
      "anaphor_agreement",  "argument_structure", "binding",
      "control_raising",    "determiner_noun_agreement",
      "ellipsis",           "filler_gap",         "irregular_forms",
      "island_effects",     "npi_licensing",      "quantifiers",
      "subject_verb_agreement",
  };
  return tags;
}

const std::vector<std::string>& phenomenon_tags() {
  static const std::vector<std::string> tags = [] {
    auto t = template_phenomena();
    t.emplace_back("corpus");
    t.emplace_back("custom");
    return t;
  }();
  return tags;
}

bool is_known_phenomenon(std::string_view tag) {
  const auto& tags = phenomenon_tags();
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

void SentenceRecord::validate() const {
  if (text.empty()) throw DataError("record '" + id + "': empty text");
  if (pose_path && (!n_frames || *n_frames == 0)) {
    throw DataError("record '" + id + "': pose_path without positive n_frames");
  }
}

void KeypointSelection::validate() const {
  auto check = [](const std::vector<std::size_t>& idx, std::size_t want, std::size_t bound,
                  const char* group) {
    if (idx.size() != want) {
      throw DataError(std::string(group) + " selection must have " + std::to_string(want) +
                      " indices");
    }
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] >= bound) throw DataError(std::string(group) + " index out of range");
      if (i && idx[i] <= idx[i - 1]) {
        throw DataError(std::string(group) + " indices must be strictly ascending");
      }
    }
  };
  check(body_indices, kSelectedBody, kBodyLandmarks, "body");
  check(face_indices, kSelectedFace, kFaceLandmarks, "face");
}

const std::vector<std::size_t>& excluded_body_landmarks() {
  static const std::vector<std::size_t> excluded = {26, 28, 30, 32, 25, 27, 29, 31, 1,  3,  4,
                                                    6,  9,  10, 17, 18, 19, 20, 21, 22, 23, 24};
  return excluded;
}

KeypointSelection default_selection() {
  KeypointSelection sel;
  const auto& excluded = excluded_body_landmarks();
  for (std::size_t i = 0; i < kBodyLandmarks; ++i) {
    if (std::find(excluded.begin(), excluded.end(), i) == excluded.end()) {
      sel.body_indices.push_back(i);
    }
  }
  // Lips outer/corners, eyebrows, eye contours and the nose top.
  sel.face_indices = {61,  291, 17,  0,   70,  105, 107, 300, 334, 336, 161, 158,
                      33,  163, 153, 133, 388, 385, 263, 390, 380, 362, 9};
  std::sort(sel.face_indices.begin(), sel.face_indices.end());
  return sel;
}

}  // namespace signsynth
