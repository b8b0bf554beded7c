#include "signsynth/corpus_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "signsynth/common.hpp"

namespace signsynth {

LengthHistogram LengthHistogram::from_lengths(std::span<const std::size_t> lengths) {
  LengthHistogram h;
  std::uint64_t sum = 0;
  for (std::size_t len : lengths) {
    ++h.bins[len];
    sum += len;
  }
  h.total = lengths.size();
  h.mean = h.total ? static_cast<double>(sum) / static_cast<double>(h.total) : 0.0;
  return h;
}

void MergePolicy::validate() const {
  if (group < 2) throw std::invalid_argument("merge group must be >= 2");
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("merge fraction must lie in [0,1]");
  }
}

double match_rate(const std::vector<std::string>& sentence, const std::set<std::string>& vocab) {
  if (sentence.empty()) throw DataError("match_rate: empty sentence");
  std::size_t hits = 0;
  for (const auto& tok : sentence) hits += vocab.count(ascii_lower(tok));
  return static_cast<double>(hits) / static_cast<double>(sentence.size());
}

std::vector<SentenceRecord> filter_corpus(std::span<const SentenceRecord> sentences,
                                          const std::set<std::string>& vocab, double min_rate) {
  if (!(min_rate >= 0.0 && min_rate <= 1.0)) {
    throw std::invalid_argument("min_rate must lie in [0,1]");
  }
  std::vector<SentenceRecord> out;
  for (const auto& s : sentences) {
    if (s.text.empty()) continue;
    if (match_rate(s.text, vocab) > min_rate) {
      SentenceRecord r = s;
      r.phenomenon = "corpus";
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<SentenceRecord> merge_short(std::span<const SentenceRecord> sentences,
                                        const MergePolicy& policy, std::uint64_t seed) {
  policy.validate();
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (sentences[i].text.size() < policy.max_len) candidates.push_back(i);
  }
  const auto n_select = static_cast<std::size_t>(
      std::floor(policy.fraction * static_cast<double>(candidates.size()) + 1e-9));

  // Partial Fisher-Yates picks the subset; it is then restored to corpus order.
  Engine eng(derive_seed(seed, "merge_short"));
  for (std::size_t i = 0; i < n_select; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_index(eng, candidates.size() - i));
    std::swap(candidates[i], candidates[j]);
  }
  std::vector<std::size_t> selected(candidates.begin(),
                                    candidates.begin() + static_cast<std::ptrdiff_t>(n_select));
  std::sort(selected.begin(), selected.end());

  // group_head[i] = index into `groups` for the first member of each full group.
  const std::size_t n_groups = selected.size() / policy.group;
  std::vector<std::ptrdiff_t> group_head(sentences.size(), -1);
  std::vector<bool> absorbed(sentences.size(), false);
  for (std::size_t g = 0; g < n_groups; ++g) {
    group_head[selected[g * policy.group]] = static_cast<std::ptrdiff_t>(g);
    for (std::size_t k = 1; k < policy.group; ++k) absorbed[selected[g * policy.group + k]] = true;
  }

  std::vector<SentenceRecord> out;
  out.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (absorbed[i]) continue;
    if (group_head[i] < 0) {
      out.push_back(sentences[i]);
      continue;
    }
    const auto g = static_cast<std::size_t>(group_head[i]);
    SentenceRecord merged = sentences[i];
    merged.pose_path.reset();
    merged.n_frames.reset();
    for (std::size_t k = 1; k < policy.group; ++k) {
      const SentenceRecord& m = sentences[selected[g * policy.group + k]];
      merged.id += "+" + m.id;
      merged.text.insert(merged.text.end(), m.text.begin(), m.text.end());
    }
    out.push_back(std::move(merged));
  }
  return out;
}

std::vector<SentenceRecord> replace_rare_and_names(
    std::span<const SentenceRecord> sentences, const std::set<std::string>& name_list,
    std::size_t min_freq, std::span<const std::vector<SentenceRecord>> counting_corpora) {
  if (min_freq < 1) throw std::invalid_argument("min_freq must be >= 1");
  std::set<std::string> names;
  for (const auto& n : name_list) names.insert(ascii_lower(n));

  std::unordered_map<std::string, std::size_t> freq;
  auto count = [&](std::span<const SentenceRecord> corpus) {
    for (const auto& s : corpus) {
      for (const auto& tok : s.text) ++freq[ascii_lower(tok)];
    }
  };
  count(sentences);
  for (const auto& extra : counting_corpora) count(extra);

  std::vector<SentenceRecord> out(sentences.begin(), sentences.end());
  for (auto& s : out) {
    for (auto& tok : s.text) {
      if (tok == kPersonToken || tok == kUnknownToken) continue;
      const std::string key = ascii_lower(tok);
      if (names.count(key)) {
        tok = kPersonToken;
      } else if (freq[key] < min_freq) {
        tok = kUnknownToken;
      }
    }
  }
  return out;
}

LengthHistogram length_stats(std::span<const SentenceRecord> sentences) {
  std::vector<std::size_t> lengths;
  lengths.reserve(sentences.size());
  for (const auto& s : sentences) lengths.push_back(s.text.size());
  return LengthHistogram::from_lengths(lengths);
}

}  // namespace signsynth
