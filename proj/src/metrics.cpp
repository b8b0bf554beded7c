#include "signsynth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "signsynth/common.hpp"

namespace signsynth {

std::string_view to_string(BleuSmoothing s) { return s == BleuSmoothing::None ? "none" : "exp"; }

BleuSmoothing parse_smoothing(std::string_view s) {
  if (s == "none") return BleuSmoothing::None;
  if (s == "exp") return BleuSmoothing::Exp;
  throw UsageError("unknown smoothing profile '" + std::string(s) + "'");
}

Tokens metric_tokens(std::string_view text) { return split_ws(ascii_lower(text)); }

namespace {

std::map<Tokens, std::size_t> ngram_counts(const Tokens& toks, int n) {
  std::map<Tokens, std::size_t> counts;
  const auto un = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + un <= toks.size(); ++i) {
    ++counts[Tokens(toks.begin() + static_cast<std::ptrdiff_t>(i),
                    toks.begin() + static_cast<std::ptrdiff_t>(i + un))];
  }
  return counts;
}

double harmonic(double p, double r) { return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

std::map<int, double> bleu_corpus(std::span<const Tokens> candidates,
                                  std::span<const Tokens> references, int max_n,
                                  BleuSmoothing smoothing) {
  if (candidates.size() != references.size()) {
    throw DataError("bleu: candidate/reference count mismatch");
  }
  if (candidates.empty()) throw DataError("bleu: empty corpus");
  if (max_n < 1 || max_n > 4) throw std::invalid_argument("bleu: max_n must lie in [1,4]");

  std::vector<std::size_t> matched(static_cast<std::size_t>(max_n), 0);
  std::vector<std::size_t> total(static_cast<std::size_t>(max_n), 0);
  std::size_t cand_len = 0, ref_len = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    cand_len += candidates[i].size();
    ref_len += references[i].size();
    for (int n = 1; n <= max_n; ++n) {
      const auto ref_counts = ngram_counts(references[i], n);
      for (const auto& [gram, c] : ngram_counts(candidates[i], n)) {
        auto it = ref_counts.find(gram);
        matched[static_cast<std::size_t>(n - 1)] += it == ref_counts.end() ? 0 : std::min(c, it->second);
        total[static_cast<std::size_t>(n - 1)] += c;
      }
    }
  }

  double bp = 1.0;
  if (cand_len == 0) {
    bp = 0.0;
  } else if (cand_len < ref_len) {
    bp = std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len));
  }

  std::vector<double> log_p(static_cast<std::size_t>(max_n));
  std::vector<bool> zero(static_cast<std::size_t>(max_n), false);
  double decay = 1.0;
  for (std::size_t k = 0; k < log_p.size(); ++k) {
    if (total[k] == 0) {
      zero[k] = true;
    } else if (matched[k] == 0) {
      if (smoothing == BleuSmoothing::Exp) {
        decay *= 2.0;
        log_p[k] = std::log(1.0 / (decay * static_cast<double>(total[k])));
      } else {
        zero[k] = true;
      }
    } else {
      log_p[k] = std::log(static_cast<double>(matched[k]) / static_cast<double>(total[k]));
    }
  }

  std::map<int, double> out;
  double sum = 0.0;
  bool any_zero = false;
  for (int n = 1; n <= max_n; ++n) {
    const auto k = static_cast<std::size_t>(n - 1);
    any_zero = any_zero || zero[k];
    sum += log_p[k];
    out[n] = (any_zero || bp == 0.0) ? 0.0 : bp * std::exp(sum / n) * 100.0;
  }
  return out;
}

PrfScore rouge_n(const Tokens& candidate, const Tokens& reference, int n) {
  if (n < 1) throw std::invalid_argument("rouge_n: n must be >= 1");
  const auto cand = ngram_counts(candidate, n);
  const auto ref = ngram_counts(reference, n);
  std::size_t overlap = 0, cand_total = 0, ref_total = 0;
  for (const auto& [g, c] : cand) {
    cand_total += c;
    auto it = ref.find(g);
    if (it != ref.end()) overlap += std::min(c, it->second);
  }
  for (const auto& [g, c] : ref) ref_total += c;
  PrfScore s;
  if (cand_total) s.precision = static_cast<double>(overlap) / static_cast<double>(cand_total);
  if (ref_total) s.recall = static_cast<double>(overlap) / static_cast<double>(ref_total);
  s.f1 = harmonic(s.precision, s.recall);
  return s;
}

PrfScore rouge_l(const Tokens& candidate, const Tokens& reference) {
  PrfScore s;
  if (candidate.empty() || reference.empty()) return s;
  std::vector<std::size_t> prev(reference.size() + 1, 0), cur(reference.size() + 1, 0);
  for (const auto& c : candidate) {
    for (std::size_t j = 1; j <= reference.size(); ++j) {
      cur[j] = c == reference[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const auto lcs = static_cast<double>(prev[reference.size()]);
  s.precision = lcs / static_cast<double>(candidate.size());
  s.recall = lcs / static_cast<double>(reference.size());
  s.f1 = harmonic(s.precision, s.recall);
  return s;
}

EvalReport eval_pairs(std::span<const EvalPair> pairs, BleuSmoothing smoothing) {
  if (pairs.empty()) throw DataError("eval: no pairs");
  std::vector<Tokens> cands, refs;
  cands.reserve(pairs.size());
  refs.reserve(pairs.size());
  for (const auto& p : pairs) {
    cands.push_back(metric_tokens(p.candidate));
    refs.push_back(metric_tokens(p.reference));
  }
  EvalReport rep;
  rep.smoothing = smoothing;
  rep.n_pairs = pairs.size();
  rep.bleu = bleu_corpus(cands, refs, 4, smoothing);
  auto accumulate = [](PrfScore& acc, const PrfScore& s) {
    acc.precision += s.precision;
    acc.recall += s.recall;
    acc.f1 += s.f1;
  };
  for (std::size_t i = 0; i < cands.size(); ++i) {
    accumulate(rep.rouge1, rouge_n(cands[i], refs[i], 1));
    accumulate(rep.rouge2, rouge_n(cands[i], refs[i], 2));
    accumulate(rep.rougeL, rouge_l(cands[i], refs[i]));
  }
  const auto n = static_cast<double>(pairs.size());
  for (PrfScore* s : {&rep.rouge1, &rep.rouge2, &rep.rougeL}) {
    s->precision /= n;
    s->recall /= n;
    s->f1 /= n;
  }
  return rep;
}

}  // namespace signsynth
