#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "signsynth/pose_model.hpp"

namespace signsynth {

inline const std::string kPersonToken = "<PERSON>";
inline const std::string kUnknownToken = "<UNKNOWN>";

struct LengthHistogram {
  std::map<std::size_t, std::size_t> bins;
  double mean = 0.0;
  std::size_t total = 0;

  static LengthHistogram from_lengths(std::span<const std::size_t> lengths);
  friend bool operator==(const LengthHistogram&, const LengthHistogram&) = default;
};

struct MergePolicy {
  std::size_t max_len = 8;  // strictly shorter sentences are candidates
  double fraction = 0.9;
  std::size_t group = 3;

  void validate() const;
};

/// Share of case-folded tokens found in `vocab` (which must hold lowercase words).
double match_rate(const std::vector<std::string>& sentence, const std::set<std::string>& vocab);

/// Keeps sentences whose match rate is strictly greater than `min_rate` and
/// tags them with the "corpus" phenomenon. Empty sentences are dropped.
std::vector<SentenceRecord> filter_corpus(std::span<const SentenceRecord> sentences,
                                          const std::set<std::string>& vocab, double min_rate);

/// Concatenates a seeded random subset of short sentences into groups.
/// Output keeps corpus order; a merged sentence sits where its first member was.
std::vector<SentenceRecord> merge_short(std::span<const SentenceRecord> sentences,
                                        const MergePolicy& policy, std::uint64_t seed);

/// Replaces gazetteer names with <PERSON> and tokens rarer than `min_freq`
/// with <UNKNOWN>. Frequencies are counted (case-folded) over `sentences`
/// plus every extra corpus in `counting_corpora`.
std::vector<SentenceRecord> replace_rare_and_names(
    std::span<const SentenceRecord> sentences, const std::set<std::string>& name_list,
    std::size_t min_freq,
    std::span<const std::vector<SentenceRecord>> counting_corpora = {});

LengthHistogram length_stats(std::span<const SentenceRecord> sentences);

}  // namespace signsynth
