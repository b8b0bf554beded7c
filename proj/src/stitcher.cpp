#include "signsynth/stitcher.hpp"

#include <cmath>
#include <stdexcept>

#include "signsynth/common.hpp"
#include "signsynth/parallel.hpp"

namespace signsynth {

void SignLexicon::add(std::string_view word, PoseSequence clip) {
  if (clip.empty()) throw DataError("lexicon clip for '" + std::string(word) + "' is empty");
  clips_[ascii_lower(word)] = std::move(clip);
}

const PoseSequence* SignLexicon::find(std::string_view word) const {
  auto it = clips_.find(ascii_lower(word));
  return it == clips_.end() ? nullptr : &it->second;
}

double SignLexicon::mean_clip_length() const {
  if (clips_.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [w, clip] : clips_) sum += static_cast<double>(clip.size());
  return sum / static_cast<double>(clips_.size());
}

void StitchConfig::validate() const {
  if (base_stride < 1) throw std::invalid_argument("base_stride must be >= 1");
  for (std::size_t j : jitter_strides) {
    if (j < 1 || j > 3) throw std::invalid_argument("jitter strides must lie in {1,2,3}");
  }
}

std::size_t compute_sampling_rate(double mean_synth_frames, double mean_target_frames) {
  if (!(mean_synth_frames > 0.0) || !(mean_target_frames > 0.0)) {
    throw DataError("sampling rate needs positive mean frame counts");
  }
  // nearbyint honours the default round-to-nearest-even mode.
  const double r = std::nearbyint(mean_synth_frames / mean_target_frames);
  return r < 1.0 ? 1 : static_cast<std::size_t>(r);
}

PoseSequence resample(const PoseSequence& seq, std::size_t stride) {
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  PoseSequence out;
  out.source_id = seq.source_id;
  if (seq.fps_hint) out.fps_hint = *seq.fps_hint / static_cast<double>(stride);
  out.frames.reserve((seq.size() + stride - 1) / stride);
  for (std::size_t i = 0; i < seq.size(); i += stride) out.frames.push_back(seq.frames[i]);
  return out;
}

PoseFrame blend(const PoseFrame& a, const PoseFrame& b, double t) {
  PoseFrame out;
  for (std::size_t k = 0; k < kPoseDims; ++k) {
    const double va = a.values[k];
    const double vb = b.values[k];
    out.values[k] = static_cast<float>(va + (vb - va) * t);
  }
  return out;
}

namespace {

std::vector<std::string> resolvable_words(const std::vector<std::string>& words,
                                          const SignLexicon& lex, bool skip_oov) {
  std::vector<std::string> kept;
  kept.reserve(words.size());
  for (const auto& w : words) {
    if (lex.contains(w)) {
      kept.push_back(w);
    } else if (!skip_oov) {
      throw DataError("no lexicon clip for token '" + w + "'");
    }
  }
  if (kept.empty()) throw DataError("nothing to stitch: empty word list");
  return kept;
}

}  // namespace

StitchResult stitch_sentence(const std::vector<std::string>& words, const SignLexicon& lex,
                             const StitchConfig& cfg, std::string_view sentence_id) {
  cfg.validate();
  if (words.empty()) throw DataError("nothing to stitch: empty word list");
  StitchResult res;
  res.order = resolvable_words(words, lex, cfg.skip_oov);

  Engine eng(derive_seed(cfg.seed, sentence_id));
  if (cfg.word_order == WordOrder::RWO) shuffle(res.order, eng);
  std::size_t jitter = 1;
  if (!cfg.jitter_strides.empty()) {
    jitter = cfg.jitter_strides[uniform_index(eng, cfg.jitter_strides.size())];
  }
  res.applied_stride = cfg.base_stride * jitter;

  PoseSequence& out = res.sequence;
  out.source_id = std::string(sentence_id);
  for (std::size_t i = 0; i < res.order.size(); ++i) {
    const PoseSequence clip = resample(*lex.find(res.order[i]), res.applied_stride);
    if (i > 0) {
      const PoseFrame prev = out.frames.back();
      const PoseFrame& next = clip.frames.front();
      for (std::size_t j = 1; j <= cfg.crossfade_frames; ++j) {
        out.frames.push_back(
            blend(prev, next, static_cast<double>(j) / static_cast<double>(cfg.crossfade_frames + 1)));
      }
    }
    const std::size_t start = out.frames.size();
    out.frames.insert(out.frames.end(), clip.frames.begin(), clip.frames.end());
    res.boundaries.push_back({res.order[i], start, out.frames.size()});
  }
  return res;
}

std::optional<std::size_t> unstrided_length(const std::vector<std::string>& words,
                                            const SignLexicon& lex, const StitchConfig& cfg) {
  std::size_t total = 0;
  std::size_t n = 0;
  for (const auto& w : words) {
    const PoseSequence* clip = lex.find(w);
    if (!clip) {
      if (!cfg.skip_oov) return std::nullopt;
      continue;
    }
    total += clip->size();
    ++n;
  }
  if (n == 0) return std::nullopt;
  return total + cfg.crossfade_frames * (n - 1);
}

StitchDatasetSummary stitch_dataset(std::span<const SentenceRecord> records,
                                    const SignLexicon& lex, StitchConfig cfg,
                                    std::optional<double> target_mean_frames,
                                    const StitchSink& sink, std::size_t jobs) {
  cfg.validate();
  StitchDatasetSummary summary;

  double sum = 0.0;
  std::size_t counted = 0;
  for (const auto& r : records) {
    if (auto len = unstrided_length(r.text, lex, cfg)) {
      sum += static_cast<double>(*len);
      ++counted;
    }
  }
  summary.pre_stitch_mean = counted ? sum / static_cast<double>(counted) : 0.0;
  if (target_mean_frames) {
    if (counted == 0) throw DataError("no stitchable records to estimate the frame mean");
    cfg.base_stride = compute_sampling_rate(summary.pre_stitch_mean, *target_mean_frames);
  }
  summary.base_stride = cfg.base_stride;

  // Fixed-size chunks are stitched in parallel and drained in order, so the
  // sink sees the same sequence for every `jobs` value.
  const std::size_t chunk = std::max<std::size_t>(64, 64 * jobs);
  std::vector<std::size_t> frame_counts;
  for (std::size_t begin = 0; begin < records.size(); begin += chunk) {
    const std::size_t end = std::min(records.size(), begin + chunk);
    std::vector<std::optional<StitchResult>> results(end - begin);
    std::vector<std::string> errors(end - begin);
    parallel_for(end - begin, jobs, [&](std::size_t i) {
      const SentenceRecord& r = records[begin + i];
      try {
        results[i] = stitch_sentence(r.text, lex, cfg, r.id);
      } catch (const DataError& e) {
        errors[i] = "record '" + r.id + "': " + e.what();
      }
    });
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (!results[i]) {
        ++summary.skipped;
        summary.errors.push_back(std::move(errors[i]));
        continue;
      }
      SentenceRecord rec = records[begin + i];
      rec.word_order = cfg.word_order;
      rec.n_frames = results[i]->sequence.size();
      rec.pose_path.reset();
      if (sink) {
        std::string path = sink(rec, *results[i]);
        if (!path.empty()) rec.pose_path = std::move(path);
      }
      frame_counts.push_back(*rec.n_frames);
      summary.records.push_back(std::move(rec));
    }
  }
  summary.frame_histogram = LengthHistogram::from_lengths(frame_counts);
  return summary;
}

}  // namespace signsynth
