#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "signsynth/corpus_pipeline.hpp"
#include "signsynth/pose_model.hpp"

namespace signsynth {

/// Case-folded word -> processed pose clip.
class SignLexicon {
public:
  void add(std::string_view word, PoseSequence clip);
  const PoseSequence* find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word) != nullptr; }
  std::size_t size() const { return clips_.size(); }
  double mean_clip_length() const;
  const std::map<std::string, PoseSequence>& clips() const { return clips_; }

private:
  std::map<std::string, PoseSequence> clips_;
};

struct StitchConfig {
  WordOrder word_order = WordOrder::SWO;
  std::size_t base_stride = 1;
  /// Per-sentence stride multipliers drawn uniformly; {1} disables jitter.
  std::vector<std::size_t> jitter_strides = {1};
  std::size_t crossfade_frames = 2;
  std::uint64_t seed = 0;
  /// Drop tokens without a lexicon clip instead of failing the sentence.
  bool skip_oov = false;

  void validate() const;
};

struct WordSpan {
  std::string word;
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive

  friend bool operator==(const WordSpan&, const WordSpan&) = default;
};

struct StitchResult {
  PoseSequence sequence;
  std::vector<WordSpan> boundaries;
  std::vector<std::string> order;  // words in stitched order
  std::size_t applied_stride = 1;
};

/// max(1, round(synth / target)), ties to even.
std::size_t compute_sampling_rate(double mean_synth_frames, double mean_target_frames);

/// Frames 0, stride, 2*stride, ...
PoseSequence resample(const PoseSequence& seq, std::size_t stride);

/// Linear crossfade frame between `a` and `b` at fraction t in [0, 1].
PoseFrame blend(const PoseFrame& a, const PoseFrame& b, double t);

/// Builds one sentence. Randomness (RWO permutation, jitter) is seeded from
/// (cfg.seed, sentence_id) so each sentence is reproducible on its own.
StitchResult stitch_sentence(const std::vector<std::string>& words, const SignLexicon& lex,
                             const StitchConfig& cfg, std::string_view sentence_id = {});

/// Stride-1, jitter-free stitched length (clips plus crossfades), or nullopt
/// when the sentence cannot be stitched under cfg.skip_oov.
std::optional<std::size_t> unstrided_length(const std::vector<std::string>& words,
                                            const SignLexicon& lex, const StitchConfig& cfg);

struct StitchDatasetSummary {
  std::vector<SentenceRecord> records;  // stitched records only, input order
  LengthHistogram frame_histogram;
  std::size_t base_stride = 1;
  double pre_stitch_mean = 0.0;
  std::size_t skipped = 0;
  std::vector<std::string> errors;  // one message per skipped record
};

/// Receives each stitched sentence in input order and returns the pose_path
/// to record in the manifest (empty for none).
using StitchSink = std::function<std::string(const SentenceRecord&, const StitchResult&)>;

/// Picks base_stride from the pre-stitch mean frame count versus
/// `target_mean_frames` (when given; otherwise cfg.base_stride is kept),
/// stitches every record on `jobs` threads and hands results to `sink` in
/// input order. Records that fail to stitch are skipped and counted.
StitchDatasetSummary stitch_dataset(std::span<const SentenceRecord> records,
                                    const SignLexicon& lex, StitchConfig cfg,
                                    std::optional<double> target_mean_frames,
                                    const StitchSink& sink = {}, std::size_t jobs = 1);

}  // namespace signsynth
