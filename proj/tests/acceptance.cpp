// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance <path-to-signsynth-cli> <work-dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "oracles.hpp"
#include "signsynth/common.hpp"
#include "signsynth/corpus_pipeline.hpp"
#include "signsynth/curriculum.hpp"
#include "signsynth/io.hpp"
#include "signsynth/keypoint_pipeline.hpp"
#include "signsynth/metrics.hpp"
#include "signsynth/stitcher.hpp"
#include "signsynth/template_engine.hpp"
#include "signsynth/tokenizer.hpp"

using namespace signsynth;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ------------------------------------------------------------ keypoints

Outcome keypoint_selection() {
  Outcome o;
  const auto t0 = Clock::now();
  const KeypointSelection sel = default_selection();
  const auto body = oracle::body_set_difference(excluded_body_landmarks());
  o.require(sel.body_indices == body, "body set differs from {0..32} minus exclusions");
  o.require(body == std::vector<std::size_t>{0, 2, 5, 7, 8, 11, 12, 13, 14, 15, 16}, "body set is not the expected 11");
  o.require(sel.face_indices.size() == 23, "face set does not have 23 members");
  o.require(std::set<std::size_t>(sel.face_indices.begin(), sel.face_indices.end()).size() == 23, "face set has repeats");

  std::set<std::size_t> kept;
  for (auto b : sel.body_indices) kept.insert(b);
  for (auto f : sel.face_indices) kept.insert(kFaceOffset + f);
  for (std::size_t h = 0; h < 2 * kHandLandmarks; ++h) kept.insert(kLeftHandOffset + h);

  std::mt19937_64 rng(1000);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000 && o.ok; ++i) {
    RawLandmarkFrame f = oracle::random_frame(rng);
    const PoseFrame p = select_and_flatten(f, sel);
    o.require(p.values.size() == kPoseDims && p.all_finite(), "pose frame is not 152 finite values");
    // Direct index map: pair k is the k-th kept landmark in layout order.
    std::size_t k = 0;
    for (std::size_t g : kept) {
      o.require(p.values[2 * k] == static_cast<float>(f.at(g).x) && p.values[2 * k + 1] == static_cast<float>(f.at(g).y),
                "pair " + std::to_string(k) + " does not map to landmark " + std::to_string(g));
      ++k;
    }
    RawLandmarkFrame g = f;
    for (std::size_t idx = 0; idx < kRawLandmarks; ++idx) {
      if (!kept.count(idx)) g.at(idx) = {u(rng), u(rng), u(rng)};
    }
    o.require(select_and_flatten(g, sel) == p, "perturbing an excluded landmark changed the output");
  }
  const double secs = seconds_since(t0);
  o.require(secs < 5.0, "runtime " + fmt("%.2f", secs) + " s");
  if (o.ok) o.detail = "1000 frames, 11 body + 23 face + 42 hand keypoints, " + fmt("%.3f", secs) + " s";
  return o;
}

// -------------------------------------------------------- interpolation

Outcome interpolation() {
  Outcome o;
  std::mt19937_64 rng(500);
  std::size_t idempotence_checked = 0;
  for (int s = 0; s < 500 && o.ok; ++s) {
    const std::size_t len = 1 + rng() % 50;
    const double p_low = std::uniform_real_distribution<double>(0.0, 0.6)(rng);
    std::vector<RawLandmarkFrame> seq;
    for (std::size_t i = 0; i < len; ++i) seq.push_back(oracle::random_frame(rng, p_low));
    std::size_t unresolved_oracle = 0;
    const auto expect = oracle::nearest_donor_fill(seq, 0.8, &unresolved_oracle);
    const auto [got, report] = interpolate_low_confidence(seq, 0.8);
    o.require(got == expect, "sequence " + std::to_string(s) + " differs from the donor oracle");
    o.require(report.unresolved == unresolved_oracle, "unresolved count differs on sequence " + std::to_string(s));
    if (report.unresolved == 0) {
      const auto again = interpolate_low_confidence(got, 0.8).first;
      o.require(again == got, "not idempotent on sequence " + std::to_string(s));
      ++idempotence_checked;
    }
  }
  o.require(idempotence_checked > 0, "no sequence exercised idempotence");
  if (o.ok) o.detail = "500 sequences exact; idempotence on " + std::to_string(idempotence_checked);
  return o;
}

// ------------------------------------------------------------ templates

Outcome template_engine() {
  Outcome o;
  const fs::path data{SIGNSYNTH_DATA_DIR};
  const auto templates = io::read_templates(data / "templates.tsv");
  const SlotLexicon lex = io::read_slot_lexicon(data / "slot_lexicon.jsonl");
  std::set<std::string> tags;
  std::size_t total = 0;
  for (const auto& t : templates) {
    tags.insert(t.phenomenon);
    const auto rows = expand_all(t, lex);
    std::set<std::vector<std::string>> got;
    for (const auto& r : rows) got.insert(r.text);
    const auto want_list = oracle::enumerate_expansions(t, lex);
    const std::set<std::vector<std::string>> want(want_list.begin(), want_list.end());
    o.require(got.size() == rows.size(), t.id + ": duplicate sentences emitted");
    o.require(got == want, t.id + ": expansion set differs from the nested-loop oracle");
    o.require(count_expansions(t, lex) == rows.size(), t.id + ": count_expansions differs from emitted count");
    for (const auto& r : rows) o.require(r.phenomenon == t.phenomenon, t.id + ": wrong phenomenon tag");
    total += rows.size();
  }
  const auto& twelve = template_phenomena();
  o.require(tags == std::set<std::string>(twelve.begin(), twelve.end()), "pack does not cover the 12 tags");

  SlotLexicon agree;
  agree.add("Subj", {"boy", {{"num", "sg"}}, "boy"});
  agree.add("Subj", {"girl", {{"num", "sg"}}, "girl"});
  agree.add("Subj", {"dogs", {{"num", "pl"}}, "dog"});
  agree.add("V", {"runs", {{"num", "sg"}}, "run"});
  agree.add("V", {"run", {{"num", "pl"}}, "run"});
  agree.add("V", {"jump", {{"num", "pl"}}, "jump"});
  const auto t = parse_template("Subj[num=N] V[num=N]", "agree", "subject_verb_agreement");
  o.require(count_expansions(t, agree) == 4, "agreement example count is not 4");
  o.require(expand_all(t, agree).size() == 4, "agreement example does not emit 4 sentences");
  o.require(oracle::enumerate_expansions(t, agree).size() == 4, "oracle disagrees on the agreement example");
  if (o.ok) {
    o.detail = std::to_string(templates.size()) + " templates, 12 tags, " + std::to_string(total) +
               " sentences match oracle; agreement example = 4";
  }
  return o;
}

// -------------------------------------------------------------- corpus

std::vector<std::string> random_sentence(std::mt19937_64& rng, std::size_t len, const std::vector<std::string>& words) {
  std::vector<std::string> s;
  for (std::size_t i = 0; i < len; ++i) s.push_back(words[rng() % words.size()]);
  return s;
}

Outcome corpus_pipeline() {
  Outcome o;
  std::mt19937_64 rng(635);
  std::vector<std::string> words;
  for (int i = 0; i < 60; ++i) words.push_back((i % 5 == 0 ? "W" : "w") + std::to_string(i));
  std::set<std::string> vocab;
  for (int i = 0; i < 50; ++i) vocab.insert("w" + std::to_string(i));

  // Filtering against an integer-arithmetic oracle (hits/len > 9/10).
  std::vector<SentenceRecord> corpus;
  for (int i = 0; i < 5000; ++i) {
    SentenceRecord r;
    r.id = "c" + std::to_string(i);
    r.text = random_sentence(rng, 1 + rng() % 25, i % 2 ? std::vector<std::string>(words.begin(), words.begin() + 52) : words);
    corpus.push_back(r);
  }
  const auto kept = filter_corpus(corpus, vocab, 0.9);
  std::vector<std::string> want_ids;
  for (const auto& r : corpus) {
    std::size_t hits = 0;
    for (const auto& tok : r.text) {
      for (const auto& v : vocab) hits += (ascii_lower(tok) == v);
    }
    if (hits * 10 > r.text.size() * 9) want_ids.push_back(r.id);
  }
  std::vector<std::string> got_ids;
  for (const auto& r : kept) got_ids.push_back(r.id);
  o.require(got_ids == want_ids, "filter output differs from the oracle");
  o.require(!want_ids.empty() && want_ids.size() < corpus.size(), "filter corpus is degenerate");

  // A corpus shaped like the synthetic "before merging" distribution: mostly
  // short sentences with a long tail. Target: a reference corpus with lengths
  // spread over 4..20.
  std::vector<SentenceRecord> synth;
  for (int i = 0; i < 20000; ++i) {
    SentenceRecord r;
    r.id = "s" + std::to_string(i);
    const std::size_t len = (rng() % 5 < 4) ? 3 + rng() % 5 : 8 + rng() % 13;
    r.text = random_sentence(rng, len, words);
    synth.push_back(r);
  }
  std::vector<std::size_t> ref_lengths;
  for (int i = 0; i < 20000; ++i) ref_lengths.push_back(4 + rng() % 17);
  const double target = LengthHistogram::from_lengths(ref_lengths).mean;

  MergePolicy policy;
  const auto merged = merge_short(synth, policy, 7);
  std::size_t k = 0;
  std::map<std::string, std::size_t> before, after;
  for (const auto& r : synth) {
    k += r.text.size() < policy.max_len;
    for (const auto& t : r.text) ++before[t];
  }
  for (const auto& r : merged) {
    for (const auto& t : r.text) ++after[t];
  }
  o.require(before == after, "token multiset not conserved");
  const std::size_t selected = static_cast<std::size_t>(std::floor(0.9 * static_cast<double>(k)));
  const std::size_t expect_rows = synth.size() - selected + selected / 3 + selected % 3;
  o.require(merged.size() == expect_rows, "row count " + std::to_string(merged.size()) + " != " + std::to_string(expect_rows));
  const auto again = merge_short(synth, policy, 7);
  o.require(again == merged, "merge is not deterministic for a fixed seed");

  const double before_mean = length_stats(synth).mean;
  const double after_mean = length_stats(merged).mean;
  const double rel = std::abs(after_mean - target) / target;
  o.require(rel <= 0.10, "post-merge mean " + fmt("%.3f", after_mean) + " vs target " + fmt("%.3f", target));
  if (o.ok) {
    o.detail = "filter exact; k=" + std::to_string(k) + " selected=" + std::to_string(selected) + "; mean " +
               fmt("%.2f", before_mean) + " -> " + fmt("%.2f", after_mean) + " (target " + fmt("%.2f", target) +
               ", " + fmt("%+.1f", 100.0 * (after_mean - target) / target) + "%)";
  }
  return o;
}

// ------------------------------------------------------------- stitcher

PoseSequence random_clip(std::mt19937_64& rng, std::size_t n, const std::string& id) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  PoseSequence s;
  s.source_id = id;
  for (std::size_t i = 0; i < n; ++i) {
    PoseFrame f;
    for (auto& v : f.values) v = u(rng);
    s.frames.push_back(f);
  }
  return s;
}

Outcome stitcher() {
  Outcome o;
  std::mt19937_64 rng(636);
  SignLexicon lex;
  std::vector<std::string> words;
  for (int i = 0; i < 30; ++i) {
    words.push_back("w" + std::to_string(i));
    lex.add(words.back(), random_clip(rng, 40 + rng() % 41, words.back()));
  }

  // SWO, no crossfade, stride 1: every boundary holds its clip bit-exactly.
  StitchConfig swo;
  swo.crossfade_frames = 0;
  for (int s = 0; s < 200 && o.ok; ++s) {
    const auto sent = random_sentence(rng, 1 + rng() % 8, words);
    const auto res = stitch_sentence(sent, lex, swo, "s" + std::to_string(s));
    o.require(res.boundaries.size() == sent.size(), "boundary count");
    for (std::size_t i = 0; i < sent.size() && o.ok; ++i) {
      const auto& b = res.boundaries[i];
      const auto& clip = lex.find(sent[i])->frames;
      o.require(b.word == sent[i], "boundary word order");
      o.require(b.end - b.start == clip.size(), "boundary length");
      for (std::size_t f = 0; f < clip.size() && o.ok; ++f) {
        o.require(res.sequence.frames[b.start + f] == clip[f], "frame differs inside a boundary");
      }
    }
  }

  // Total length: sum of clips plus crossfades between adjacent words.
  for (std::size_t cf : {0u, 1u, 2u, 5u}) {
    StitchConfig cfg;
    cfg.crossfade_frames = cf;
    for (int s = 0; s < 100 && o.ok; ++s) {
      const auto sent = random_sentence(rng, 1 + rng() % 8, words);
      std::size_t want = cf * (sent.size() - 1);
      for (const auto& w : sent) want += lex.find(w)->size();
      o.require(stitch_sentence(sent, lex, cfg).sequence.size() == want, "length formula");
    }
  }

  // RWO: seeded permutations.
  StitchConfig rwo;
  rwo.word_order = WordOrder::RWO;
  rwo.seed = 99;
  std::size_t reordered = 0;
  for (int s = 0; s < 200 && o.ok; ++s) {
    const auto sent = random_sentence(rng, 2 + rng() % 7, words);
    const std::string id = "r" + std::to_string(s);
    const auto a = stitch_sentence(sent, lex, rwo, id);
    const auto b = stitch_sentence(sent, lex, rwo, id);
    o.require(a.order == b.order && a.sequence == b.sequence, "RWO not deterministic");
    auto x = a.order, y = sent;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    o.require(x == y, "RWO order is not a permutation of the input");
    reordered += a.order != sent;
  }
  o.require(reordered > 0, "RWO never reordered a sentence");

  // Dataset: jobs 1 vs 8, and framerate matching at 3x the target.
  std::vector<SentenceRecord> records;
  for (int i = 0; i < 600; ++i) {
    SentenceRecord r;
    r.id = "d" + std::to_string(i);
    r.text = random_sentence(rng, 4 + rng() % 3, words);
    records.push_back(r);
  }
  StitchConfig ds;
  ds.word_order = WordOrder::RWO;
  ds.seed = 5;
  const double target = 100.0;
  auto run = [&](std::size_t jobs, std::vector<PoseSequence>& seqs) {
    return stitch_dataset(records, lex, ds, target,
                          [&](const SentenceRecord&, const StitchResult& res) {
                            seqs.push_back(res.sequence);
                            return std::string();
                          },
                          jobs);
  };
  std::vector<PoseSequence> s1, s8;
  const auto d1 = run(1, s1);
  const auto d8 = run(8, s8);
  o.require(d1.records == d8.records && s1 == s8, "dataset output differs between jobs 1 and 8");

  o.require(compute_sampling_rate(3.0 * target, target) == 3, "compute_sampling_rate(3t, t) != 3");
  const double ratio = d1.pre_stitch_mean / target;
  o.require(std::abs(ratio - 3.0) < 0.5, "toy synthetic mean is not about 3x target: " + fmt("%.2f", ratio));
  o.require(d1.base_stride == 3, "dataset base stride " + std::to_string(d1.base_stride));
  std::uint64_t sum = 0;
  for (const auto& s : s1) sum += s.size();
  const double post_mean = static_cast<double>(sum) / static_cast<double>(s1.size());
  o.require(post_mean == d1.frame_histogram.mean, "histogram mean differs from emitted sequences");
  const double rel = std::abs(post_mean - target) / target;
  o.require(rel <= 0.15, "post-stitch mean " + fmt("%.2f", post_mean) + " vs target 100");
  if (o.ok) {
    o.detail = "bit-exact boundaries, length formula, RWO permutations, jobs 1==8; pre mean " +
               fmt("%.1f", d1.pre_stitch_mean) + ", stride 3, post mean " + fmt("%.1f", post_mean) + " (" +
               fmt("%+.1f", 100.0 * (post_mean - target) / target) + "% of 100)";
  }
  return o;
}

// ----------------------------------------------------------- curriculum

Outcome curriculum() {
  Outcome o;
  const AnnealSchedule sched;
  o.require(real_fraction(0, sched) == 0.0, "real_fraction(0) != 0");
  o.require(real_fraction(60000, sched) == 0.85, "real_fraction(60000) != 0.85");
  o.require(real_fraction(120000, sched) == 0.85, "real_fraction past the ramp != 0.85");

  std::string rates;
  for (std::uint64_t step : {60000ull, 30000ull, 6000ull}) {
    const double p = real_fraction(step, sched);
    const std::size_t n = 100000;
    std::size_t real = 0;
    for (std::uint64_t seed = 0; seed < n; ++seed) real += draw(step, sched, seed, 1000, 1000).source == DataSource::Real;
    const double sigma = std::sqrt(n * p * (1 - p));
    o.require(std::abs(static_cast<double>(real) - n * p) <= 3 * sigma,
              "step " + std::to_string(step) + ": " + std::to_string(real) + " real of 1e5");
    rates += " " + fmt("%.4f", double(real) / n);
  }

  const auto full = emit_schedule(60000, sched, 42, 500, 900);
  double mean_sum = 0, var_sum = 0;
  std::size_t real_total = 0;
  for (const auto& d : full) {
    const double p = real_fraction(d.step, sched);
    mean_sum += p;
    var_sum += p * (1 - p);
    real_total += d.source == DataSource::Real;
    o.require(d.item_index < (d.source == DataSource::Real ? 500u : 900u), "item index out of range");
  }
  o.require(std::abs(real_total - mean_sum) <= 3 * std::sqrt(var_sum), "cumulative real count off");
  for (std::uint64_t start : {0ull, 1ull, 777ull, 59999ull}) {
    const auto tail = emit_schedule(60000 - start, sched, 42, 500, 900, start);
    o.require(std::equal(tail.begin(), tail.end(), full.begin() + static_cast<long>(start)),
              "replay from step " + std::to_string(start) + " differs");
  }
  if (o.ok) o.detail = "exact endpoints; real rates" + rates + "; cumulative " + std::to_string(real_total) + "; replay ok";
  return o;
}

// ------------------------------------------------------------ tokenizer

Outcome tokenizer() {
  Outcome o;
  const std::vector<std::string> aaab = {"aaab aaab", "aaab aaab"};
  const auto model = bpe_train(aaab, 200);
  std::vector<std::string> split_words;
  for (const auto& line : aaab) {
    for (const auto& w : split_ws(line)) split_words.push_back(w);
  }
  const auto counts = oracle::bpe_pair_counts(split_words);
  std::pair<std::string, std::string> best;
  long best_count = -1;
  for (const auto& [pair, c] : counts) {
    if (c > best_count) {
      best = pair;
      best_count = c;
    }
  }
  o.require(!model.merges().empty() && model.merges().front() == best, "first merge differs from pair-count oracle");
  o.require(best == std::pair<std::string, std::string>{"a", "a"}, "oracle first merge is not (a, a)");

  std::mt19937_64 rng(638);
  const std::vector<std::string> syll = {"ka", "ri", "to", "mu", "sen", "la", "é", "ñо", "th", "e", "ing"};
  const auto specials = default_specials();
  std::vector<std::string> corpus;
  for (int i = 0; i < 10000; ++i) {
    std::vector<std::string> sent;
    for (std::size_t w = 0, n = 1 + rng() % 10; w < n; ++w) {
      if (rng() % 15 == 0) {
        sent.push_back(specials[4 + rng() % 2]);
        continue;
      }
      std::string word;
      for (std::size_t k = 0, m = 1 + rng() % 3; k < m; ++k) word += syll[rng() % syll.size()];
      sent.push_back(word);
    }
    corpus.push_back(join(sent));
  }
  const auto bpe = bpe_train(corpus, 400);
  std::size_t mismatches = 0;
  for (const auto& s : corpus) mismatches += bpe.decode(bpe.encode(s)) != s;
  o.require(mismatches == 0, std::to_string(mismatches) + " sentences fail the round trip");

  for (const auto& sp : specials) {
    const auto ids = bpe.encode("la " + sp + " ka");
    o.require(std::count(ids.begin(), ids.end(), bpe.token_id(sp)) == 1, sp + " is not a single token");
  }
  for (const auto& [l, r] : bpe.merges()) {
    for (const auto& sp : specials) o.require(l.find(sp) == std::string::npos && r.find(sp) == std::string::npos, "special inside a merge");
  }
  const auto reloaded = BpeModel::from_json(bpe.to_json());
  o.require(reloaded.encode(corpus[0]) == bpe.encode(corpus[0]), "JSON reload changes encoding");
  if (o.ok) {
    o.detail = "first merge (a, a); 10000/10000 round trips; " + std::to_string(bpe.merges().size()) +
               " merges; specials atomic";
  }
  return o;
}

// -------------------------------------------------------------- metrics

Outcome metrics() {
  Outcome o;
  const std::vector<Tokens> same = {metric_tokens("the cat is on the mat"), metric_tokens("there is a cat on the mat")};
  o.require(bleu_corpus(same, same, 4).at(4) == 100.0, "BLEU-4 on identical corpora != 100");

  const Tokens c = metric_tokens("the the the the the the the");
  const Tokens r = metric_tokens("the cat is on the mat");
  const auto [m, t] = oracle::clipped_matches(c, r, 1);
  o.require(m == 2 && t == 7, "oracle clipped precision is not 2/7");
  const double b1 = bleu_corpus(std::vector<Tokens>{c}, std::vector<Tokens>{r}, 1).at(1);
  o.require(std::abs(b1 - 100.0 * 2.0 / 7.0) < 1e-9, "p1 = " + fmt("%.6f", b1 / 100));

  const auto rl = rouge_l(metric_tokens("a b c d"), metric_tokens("a c d b"));
  o.require(std::abs(rl.recall - 0.75) < 1e-12, "rouge_l recall is not 3/4");
  const auto r1 = rouge_n(metric_tokens("the cat sat"), metric_tokens("the cat"), 1);
  o.require(std::abs(r1.precision - 2.0 / 3.0) < 1e-12 && r1.recall == 1.0, "rouge-1 example");

  const std::vector<EvalPair> five = {
      {"1", "a cat sat on a mat", "the cat sat on the mat"},
      {"2", "dogs run fast", "the dogs run very fast"},
      {"3", "hello there friend", "hello friend there"},
      {"4", "one two three four", "one two three four"},
      {"5", "x y z w", "z y x w"},
  };
  const auto rep = eval_pairs(five);
  std::vector<Tokens> cs, rs;
  double lsum = 0;
  for (const auto& p : five) {
    cs.push_back(metric_tokens(p.candidate));
    rs.push_back(metric_tokens(p.reference));
    const double lcs = static_cast<double>(oracle::lcs_brute(cs.back(), rs.back()));
    const double pr = lcs / double(cs.back().size()), rc = lcs / double(rs.back().size());
    lsum += pr + rc > 0 ? 2 * pr * rc / (pr + rc) : 0.0;
  }
  for (int n = 1; n <= 4; ++n) {
    o.require(std::abs(rep.bleu.at(n) - oracle::bleu(cs, rs, static_cast<std::size_t>(n))) < 1e-9,
              "BLEU-" + std::to_string(n) + " differs from oracle");
  }
  o.require(std::abs(rep.rougeL.f1 - lsum / 5) < 1e-12, "ROUGE-L differs from oracle");

  std::mt19937_64 rng(639);
  for (int trial = 0; trial < 20 && o.ok; ++trial) {
    auto pairs = five;
    std::shuffle(pairs.begin(), pairs.end(), rng);
    const auto shuffled = eval_pairs(pairs);
    for (int n = 1; n <= 4; ++n) o.require(std::abs(shuffled.bleu.at(n) - rep.bleu.at(n)) < 1e-9, "BLEU not order invariant");
    o.require(std::abs(shuffled.rouge1.f1 - rep.rouge1.f1) < 1e-12 && std::abs(shuffled.rougeL.f1 - rep.rougeL.f1) < 1e-12,
              "ROUGE not order invariant");
  }
  if (o.ok) o.detail = "BLEU-4 100; p1 = 2/7; LCS recall 3/4; 5-pair oracle; order invariant (BLEU-4 " + fmt("%.2f", rep.bleu.at(4)) + ")";
  return o;
}

// ----------------------------------------------------------- end to end

std::string quote(const std::string& s) { return "'" + s + "'"; }

int run_command(const std::string& cli, const std::string& args, const fs::path& log) {
  const std::string cmd = quote(cli) + " " + args + " >>" + quote(log.string()) + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return rc == -1 ? -1 : WEXITSTATUS(rc);
}

Outcome end_to_end(const std::string& cli, const fs::path& work) {
  Outcome o;
  const auto t0 = Clock::now();
  fs::remove_all(work);
  fs::create_directories(work / "raw");
  const fs::path log = work / "commands.log";

  const std::vector<std::string> words = {"i",   "you", "he",   "she",  "we",    "they", "boy",
                                          "girl", "dog", "cat",  "see",  "like",  "help", "run",
                                          "eat",  "go",  "food", "water", "home", "not"};
  std::mt19937_64 rng(640);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& w : words) {
    std::vector<RawLandmarkFrame> frames(6 + rng() % 15);
    for (auto& f : frames) {
      for (std::size_t g = 0; g < kRawLandmarks; ++g) f.at(g) = {u(rng), u(rng), u(rng) < 0.15 ? 0.5 * u(rng) : 0.9};
    }
    io::write_landmark_file(work / "raw" / (w + ".jsonl"), frames);
  }
  {
    std::ofstream t(work / "templates.tsv");
    t << "# toy pack\n"
         "e1\targument_structure\tPRO[] V[] N[]\n"
         "e2\targument_structure\tN[] VI[]\n"
         "e3\tnpi_licensing\tPRO[] not V[] O[]\n"
         "e4\tcustom\tPRO[] go home\n";
    std::ofstream l(work / "slots.jsonl");
    auto entry = [&](const char* cat, const std::string& w) {
      l << "{\"category\":\"" << cat << "\",\"word\":\"" << w << "\"}\n";
    };
    for (int i = 0; i < 6; ++i) entry("PRO", words[i]);
    for (int i = 6; i < 10; ++i) entry("N", words[i]);
    for (int i = 10; i < 13; ++i) entry("V", words[i]);
    for (int i = 13; i < 16; ++i) entry("VI", words[i]);
    for (int i = 16; i < 19; ++i) entry("O", words[i]);
  }
  const std::string w = work.string() + "/";
  const std::vector<std::pair<std::string, std::string>> steps = {
      {"ingest", "--seed 3 ingest --input-dir " + quote(w + "raw") + " --output-dir " + quote(w + "signs")},
      {"gen", "--seed 3 gen --templates " + quote(w + "templates.tsv") + " --lexicon " + quote(w + "slots.jsonl") +
                  " --sign-lexicon " + quote(w + "signs/lexicon.jsonl") + " --out " + quote(w + "gen.jsonl")},
      {"stitch", "--seed 3 --jobs 4 stitch --manifest " + quote(w + "gen.jsonl") + " --lexicon " +
                     quote(w + "signs/lexicon.jsonl") + " --output-dir " + quote(w + "poses") + " --out " +
                     quote(w + "stitched.jsonl") + " --word-order rwo --stats " + quote(w + "stitch_stats.json")},
      {"stats", "stats --manifest " + quote(w + "stitched.jsonl") + " --out " + quote(w + "stats.json") +
                    " --length-csv " + quote(w + "len.csv") + " --frame-csv " + quote(w + "frames.csv")},
      {"sample", "--seed 3 sample --total-steps 2000 --ramp-steps 1000 --real-size 50 --synth-size " +
                     std::string("144 --csv ") + quote(w + "schedule.csv")},
      {"tokenize train", "tokenize train --input " + quote(w + "stitched.jsonl") + " --model " + quote(w + "bpe.json") +
                             " --vocab-size 120"},
      {"tokenize encode", "tokenize encode --input " + quote(w + "stitched.jsonl") + " --model " +
                              quote(w + "bpe.json") + " --out " + quote(w + "ids.jsonl")},
      {"tokenize decode", "tokenize decode --input " + quote(w + "ids.jsonl") + " --model " + quote(w + "bpe.json") +
                              " --out " + quote(w + "decoded.txt")},
  };
  for (const auto& [name, args] : steps) {
    const int rc = run_command(cli, args, log);
    o.require(rc == 0, name + " exited " + std::to_string(rc) + " (see " + log.string() + ")");
    if (!o.ok) return o;
  }

  // References: the manifest text, one sentence per line.
  std::vector<nlohmann::json> rows;
  {
    std::ifstream in(work / "stitched.jsonl");
    std::ofstream refs(work / "refs.txt");
    for (std::string line; std::getline(in, line);) {
      if (line.empty()) continue;
      rows.push_back(nlohmann::json::parse(line));
      std::string text;
      for (const auto& tok : rows.back()["text"]) text += (text.empty() ? "" : " ") + tok.get<std::string>();
      refs << text << "\n";
    }
  }
  const int rc = run_command(cli, "eval --candidates " + quote(w + "decoded.txt") + " --references " +
                                      quote(w + "refs.txt") + " --out " + quote(w + "report.json"),
                             log);
  o.require(rc == 0, "eval exited " + std::to_string(rc));
  if (!o.ok) return o;
  const auto report = nlohmann::json::parse(io::read_file(work / "report.json"));
  o.require(report["bleu"]["4"].get<double>() == 100.0, "decoded text does not reproduce the manifest");

  o.require(rows.size() == 72 + 12 + 54 + 6, "stitched " + std::to_string(rows.size()) + " rows, expected 144");
  std::size_t pose_files = 0;
  for (const auto& e : fs::directory_iterator(work / "poses")) pose_files += e.path().extension() == ".psp";
  o.require(pose_files == rows.size(), "pose file count differs from manifest rows");

  // Recompute the statistics from the rows alone.
  std::map<std::size_t, std::size_t> len_bins, frame_bins;
  std::uint64_t len_sum = 0, frame_sum = 0;
  std::set<std::string> vocab;
  for (const auto& row : rows) {
    const std::size_t len = row["text"].size();
    ++len_bins[len];
    len_sum += len;
    for (const auto& tok : row["text"]) vocab.insert(ascii_lower(tok.get<std::string>()));
    const std::size_t nf = row["n_frames"].get<std::size_t>();
    ++frame_bins[nf];
    frame_sum += nf;
    const auto seq = io::read_pose_file(work / row["pose_path"].get<std::string>());
    o.require(seq.size() == nf, "pose file length differs from n_frames for " + row["id"].get<std::string>());
  }
  const double n = static_cast<double>(rows.size());
  for (const char* file : {"stats.json", "stitch_stats.json"}) {
    const auto stats = nlohmann::json::parse(io::read_file(work / file));
    auto bins_of = [](const nlohmann::json& h) {
      std::map<std::size_t, std::size_t> b;
      for (auto it = h["bins"].begin(); it != h["bins"].end(); ++it) b[std::stoul(it.key())] = it.value().get<std::size_t>();
      return b;
    };
    o.require(stats["n_sentences"].get<std::size_t>() == rows.size(), std::string(file) + ": n_sentences");
    o.require(stats["vocab_size"].get<std::size_t>() == vocab.size(), std::string(file) + ": vocab_size");
    o.require(bins_of(stats["length_histogram"]) == len_bins, std::string(file) + ": length bins");
    o.require(stats["length_histogram"]["mean"].get<double>() == static_cast<double>(len_sum) / n, std::string(file) + ": length mean");
    o.require(bins_of(stats["frame_histogram"]) == frame_bins, std::string(file) + ": frame bins");
    o.require(stats["frame_histogram"]["mean"].get<double>() == static_cast<double>(frame_sum) / n, std::string(file) + ": frame mean");
  }
  std::size_t schedule_rows = 0;
  {
    std::ifstream in(work / "schedule.csv");
    std::string header;
    std::getline(in, header);
    o.require(header == "step,real_fraction,source", "schedule header");
    for (std::string line; std::getline(in, line);) schedule_rows += !line.empty();
  }
  o.require(schedule_rows == 2000, "schedule rows " + std::to_string(schedule_rows));

  const double secs = seconds_since(t0);
  o.require(secs < 60.0, "took " + fmt("%.1f", secs) + " s");
  if (o.ok) {
    o.detail = "20-word lexicon, " + std::to_string(rows.size()) + " sentences, stats recomputed exactly, BLEU-4 100 after BPE round trip, " +
               fmt("%.2f", secs) + " s";
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <signsynth-cli> <work-dir>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path work = argv[2];

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"keypoint selection", keypoint_selection},
      {"interpolation", interpolation},
      {"template engine", template_engine},
      {"corpus pipeline", corpus_pipeline},
      {"stitcher", stitcher},
      {"curriculum", curriculum},
      {"tokenizer", tokenizer},
      {"metrics", metrics},
      {"end-to-end smoke", [&] { return end_to_end(cli, work); }},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::cout << (o.ok ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << std::endl;
    failures += !o.ok;
  }
  std::cout << (failures ? std::to_string(failures) + " criteria failed" : "all criteria passed") << std::endl;
  return failures ? 1 : 0;
}
