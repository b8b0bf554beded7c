#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "signsynth/corpus_pipeline.hpp"
#include "signsynth/metrics.hpp"
#include "signsynth/pose_model.hpp"
#include "signsynth/stitcher.hpp"
#include "signsynth/template_engine.hpp"

namespace signsynth::io {

namespace fs = std::filesystem;

// Pose file ("psp-v1"), all integers little-endian:
//   char[8]  magic      "psp-v1\0\0"
//   u32      n_frames
//   u32      dims       always 152
//   u32      id_len
//   char[id_len] source_id (UTF-8)
//   f32[n_frames * 152] payload, row-major
inline constexpr std::string_view kPoseMagic{"psp-v1\0\0", 8};

std::string encode_pose(const PoseSequence& seq);
PoseSequence decode_pose(std::string_view bytes, std::string_view origin = "<memory>");
void write_pose_file(const fs::path& path, const PoseSequence& seq);
PoseSequence read_pose_file(const fs::path& path);

/// One JSON object per frame: {"body":[[x,y,c]...], "face":..., "left_hand":..., "right_hand":...}
std::vector<RawLandmarkFrame> read_landmark_file(const fs::path& path);
std::vector<RawLandmarkFrame> parse_landmark_jsonl(std::string_view text,
                                                   std::string_view origin = "<memory>");
void write_landmark_file(const fs::path& path, std::span<const RawLandmarkFrame> frames);

std::string record_to_json(const SentenceRecord& r);
SentenceRecord record_from_json(std::string_view line, std::string_view origin, std::size_t line_no);

std::vector<SentenceRecord> read_manifest(const fs::path& path);
std::vector<SentenceRecord> parse_manifest(std::string_view text, std::string_view origin = "<memory>");
std::string format_manifest(std::span<const SentenceRecord> records);
void write_manifest(const fs::path& path, std::span<const SentenceRecord> records);

struct ManifestStats {
  std::size_t n_sentences = 0;
  LengthHistogram length_histogram;
  LengthHistogram frame_histogram;  // records with n_frames only
  std::size_t vocab_size = 0;       // distinct case-folded tokens
};

ManifestStats compute_stats(std::span<const SentenceRecord> records);
std::string stats_to_json(const ManifestStats& stats);
ManifestStats stats_from_json(std::string_view json);
std::string histogram_csv(const LengthHistogram& h, std::string_view value_name);

/// `id TAB phenomenon TAB dsl` per line; blank lines and '#' comments skipped.
std::vector<Template> read_templates(const fs::path& path);
std::vector<Template> parse_templates(std::string_view text, std::string_view origin = "<memory>");

/// {"category":..., "word":..., "features":{...}, "pose_source":...} per line.
SlotLexicon read_slot_lexicon(const fs::path& path);
SlotLexicon parse_slot_lexicon(std::string_view text, std::string_view origin = "<memory>");

/// Sign lexicon index: {"word":..., "pose_path":..., "n_frames":...} per
/// line, pose paths relative to the index file's directory.
SignLexicon read_sign_lexicon(const fs::path& index_path);

std::vector<EvalPair> read_eval_pairs(const fs::path& path);
std::string report_to_json(const EvalReport& report);

/// One entry per non-empty line, trimmed.
std::set<std::string> read_word_list(const fs::path& path);
/// Every line, including blank ones (no trailing empty line).
std::vector<std::string> read_lines(const fs::path& path);

std::string read_file(const fs::path& path);
/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const fs::path& path, std::string_view contents);

}  // namespace signsynth::io
