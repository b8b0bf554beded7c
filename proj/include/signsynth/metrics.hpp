#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace signsynth {

using Tokens = std::vector<std::string>;

enum class BleuSmoothing {
  None,  // any zero n-gram precision zeroes the score
  Exp,   // k-th zero-match order counts as 1 / (2^k * total)
};

std::string_view to_string(BleuSmoothing s);
BleuSmoothing parse_smoothing(std::string_view s);

struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  std::map<int, double> bleu;  // n -> [0, 100]
  PrfScore rouge1, rouge2, rougeL;
  std::size_t n_pairs = 0;
  BleuSmoothing smoothing = BleuSmoothing::None;
};

/// Whitespace split of the lowercased text.
Tokens metric_tokens(std::string_view text);

/// Corpus BLEU-1..max_n, each with its own geometric mean over orders 1..n
/// and the shared brevity penalty.
std::map<int, double> bleu_corpus(std::span<const Tokens> candidates,
                                  std::span<const Tokens> references, int max_n = 4,
                                  BleuSmoothing smoothing = BleuSmoothing::None);

PrfScore rouge_n(const Tokens& candidate, const Tokens& reference, int n);
PrfScore rouge_l(const Tokens& candidate, const Tokens& reference);

struct EvalPair {
  std::string id;
  std::string candidate;
  std::string reference;
};

/// All metrics over a manifest; corpus ROUGE is the mean of per-pair scores.
EvalReport eval_pairs(std::span<const EvalPair> pairs,
                      BleuSmoothing smoothing = BleuSmoothing::None);

}  // namespace signsynth
