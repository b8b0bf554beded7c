#include "signsynth/cli.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "signsynth/common.hpp"
#include "signsynth/config.hpp"
#include "signsynth/corpus_pipeline.hpp"
#include "signsynth/curriculum.hpp"
#include "signsynth/io.hpp"
#include "signsynth/keypoint_pipeline.hpp"
#include "signsynth/metrics.hpp"
#include "signsynth/parallel.hpp"
#include "signsynth/stitcher.hpp"
#include "signsynth/template_engine.hpp"
#include "signsynth/tokenizer.hpp"

namespace signsynth {

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string config;
  std::size_t jobs = 1;
  bool skip_oov = false;
};

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

/// Fills options the user left unset from the config file.
void apply_config(CLI::App& app, const Config& cfg) {
  for (CLI::Option* opt : app.get_options()) {
    if (opt->count() > 0 || opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "config" || name == "help") continue;
    if (auto v = cfg.get(name)) {
      opt->add_result(*v);
      opt->run_callback();
    }
  }
}

std::vector<SentenceRecord> read_text_corpus(const fs::path& path) {
  std::vector<SentenceRecord> out;
  std::size_t n = 0;
  for (const auto& line : io::read_lines(path)) {
    ++n;
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    SentenceRecord r;
    r.id = "line" + std::to_string(n);
    r.text = std::move(toks);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SentenceRecord> read_corpus(const fs::path& path, bool plain_text) {
  return plain_text ? read_text_corpus(path) : io::read_manifest(path);
}

std::set<std::string> read_vocab(const fs::path& path) {
  std::set<std::string> vocab;
  for (const auto& w : io::read_word_list(path)) vocab.insert(ascii_lower(w));
  return vocab;
}

// ---------------------------------------------------------------- gen

struct GenOptions {
  std::string templates, lexicon, out, vocab, sign_lexicon;
  std::uint64_t limit = 0;
  std::uint64_t sample = 0;
};

/// Drops lexicon entries whose tokens fall outside the shared vocabulary.
std::size_t restrict_lexicon(SlotLexicon& lex, const std::vector<Template>& templates,
                             const std::set<std::string>& vocab, std::ostream& err) {
  std::set<std::string> template_words;
  for (const auto& [cat, entries] : lex.entries) {
    for (const auto& e : entries) {
      for (const auto& tok : split_ws(e.word)) template_words.insert(tok);
    }
  }
  for (const auto& t : templates) {
    for (const auto& it : t.items) {
      if (const auto* lit = std::get_if<std::string>(&it)) template_words.insert(*lit);
    }
  }
  const auto shared = intersect_vocab(vocab, template_words);
  for (auto& [cat, entries] : lex.entries) {
    std::erase_if(entries, [&](const LexEntry& e) {
      for (const auto& tok : split_ws(e.word)) {
        if (!shared.count(ascii_lower(tok))) return true;
      }
      return false;
    });
  }
  for (const auto& t : templates) {
    for (const auto& it : t.items) {
      const auto* lit = std::get_if<std::string>(&it);
      if (lit && !shared.count(ascii_lower(*lit))) {
        err << "warning: template '" << t.id << "' literal '" << *lit
            << "' is outside the shared vocabulary\n";
      }
    }
  }
  return shared.size();
}

int cmd_gen(const GenOptions& o, const GlobalOptions& g, Streams s) {
  const auto templates = io::read_templates(o.templates);
  SlotLexicon lex = io::read_slot_lexicon(o.lexicon);
  if (!o.vocab.empty()) {
    const auto shared = restrict_lexicon(lex, templates, read_vocab(o.vocab), s.err);
    s.err << "shared vocabulary: " << shared << " words\n";
  }
  if (!o.sign_lexicon.empty()) {
    const SignLexicon signs = io::read_sign_lexicon(o.sign_lexicon);
    for (const auto& [cat, entries] : lex.entries) {
      for (const auto& e : entries) {
        if (!signs.contains(e.pose_source)) {
          throw DataError("lexicon word '" + e.word + "' has pose_source '" + e.pose_source +
                          "' missing from the sign lexicon");
        }
      }
    }
  }

  std::vector<std::vector<SentenceRecord>> per_template(templates.size());
  parallel_for(templates.size(), g.jobs, [&](std::size_t i) {
    if (o.sample > 0) {
      per_template[i] = sample_expansions(templates[i], lex, o.sample, g.seed);
    } else {
      std::optional<std::uint64_t> limit;
      if (o.limit > 0) limit = o.limit;
      per_template[i] = expand_all(templates[i], lex, limit);
    }
  });

  std::vector<SentenceRecord> all;
  std::map<std::string, std::size_t> by_phenomenon;
  for (auto& v : per_template) {
    for (auto& r : v) {
      ++by_phenomenon[r.phenomenon.value_or("custom")];
      all.push_back(std::move(r));
    }
  }
  io::write_manifest(o.out, all);
  s.err << "generated " << all.size() << " sentences from " << templates.size() << " templates\n";
  for (const auto& [p, n] : by_phenomenon) s.err << "  " << p << ": " << n << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- filter

struct FilterOptions {
  std::string input, vocab, out;
  double min_rate = 0.9;
  bool text = false;
};

int cmd_filter(const FilterOptions& o, Streams s) {
  const auto corpus = read_corpus(o.input, o.text);
  const auto kept = filter_corpus(corpus, read_vocab(o.vocab), o.min_rate);
  io::write_manifest(o.out, kept);
  s.err << "kept " << kept.size() << " of " << corpus.size() << " sentences\n";
  return kExitOk;
}

// ---------------------------------------------------------------- merge

struct MergeOptions {
  std::string input, out;
  MergePolicy policy;
};

int cmd_merge(const MergeOptions& o, const GlobalOptions& g, Streams s) {
  const auto corpus = io::read_manifest(o.input);
  const auto merged = merge_short(corpus, o.policy, g.seed);
  io::write_manifest(o.out, merged);
  const auto before = length_stats(corpus);
  const auto after = length_stats(merged);
  s.err << "sentences " << before.total << " -> " << after.total << ", mean length " << before.mean
        << " -> " << after.mean << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- postprocess

struct PostprocessOptions {
  std::string input, out, names;
  std::vector<std::string> count_extra;
  std::size_t min_freq = 3;
};

int cmd_postprocess(const PostprocessOptions& o, Streams s) {
  const auto corpus = io::read_manifest(o.input);
  std::set<std::string> names;
  if (!o.names.empty()) names = io::read_word_list(o.names);
  std::vector<std::vector<SentenceRecord>> extra;
  for (const auto& p : o.count_extra) extra.push_back(io::read_manifest(p));
  const auto out = replace_rare_and_names(corpus, names, o.min_freq, extra);
  io::write_manifest(o.out, out);
  std::size_t person = 0, unknown = 0;
  for (const auto& r : out) {
    for (const auto& t : r.text) {
      person += t == kPersonToken;
      unknown += t == kUnknownToken;
    }
  }
  s.err << "replaced " << person << " names and " << unknown << " rare tokens\n";
  return kExitOk;
}

// ---------------------------------------------------------------- ingest

struct IngestOptions {
  std::string input_dir, output_dir;
  double threshold = kDefaultConfidenceThreshold;
};

int cmd_ingest(const IngestOptions& o, const GlobalOptions& g, Streams s) {
  std::vector<fs::path> inputs;
  if (!fs::is_directory(o.input_dir)) throw DataError("not a directory: " + o.input_dir);
  for (const auto& entry : fs::directory_iterator(o.input_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") inputs.push_back(entry.path());
  }
  std::sort(inputs.begin(), inputs.end());
  if (inputs.empty()) throw DataError("no .jsonl landmark files in " + o.input_dir);

  const KeypointSelection sel = default_selection();
  const fs::path out_dir(o.output_dir);
  fs::create_directories(out_dir);
  std::vector<std::size_t> n_frames(inputs.size());
  std::vector<InterpolationReport> reports(inputs.size());
  parallel_for(inputs.size(), g.jobs, [&](std::size_t i) {
    const auto frames = io::read_landmark_file(inputs[i]);
    if (frames.empty()) throw DataError(inputs[i].string() + ": empty input");
    PoseSequence seq = process_word_video(frames, sel, o.threshold, &reports[i]);
    seq.source_id = inputs[i].stem().string();
    n_frames[i] = seq.size();
    io::write_pose_file(out_dir / (inputs[i].stem().string() + ".psp"), seq);
  });

  std::string index;
  InterpolationReport total;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    nlohmann::ordered_json j;
    j["word"] = inputs[i].stem().string();
    j["pose_path"] = inputs[i].stem().string() + ".psp";
    j["n_frames"] = n_frames[i];
    index += j.dump() + "\n";
    total.frames_touched += reports[i].frames_touched;
    total.keypoints_filled += reports[i].keypoints_filled;
    total.unresolved += reports[i].unresolved;
  }
  io::write_file_atomic(out_dir / "lexicon.jsonl", index);
  s.err << "ingested " << inputs.size() << " clips; filled " << total.keypoints_filled
        << " keypoints in " << total.frames_touched << " frames, " << total.unresolved
        << " unresolved\n";
  return kExitOk;
}

// ---------------------------------------------------------------- stitch

struct StitchOptions {
  std::string manifest, lexicon, output_dir, out, stats, word_order = "swo", jitter = "1";
  std::size_t crossfade = 2;
  std::size_t stride = 1;
  double target_mean_frames = 0.0;
};

std::vector<std::size_t> parse_size_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stoul(item));
    } catch (const std::exception&) {
      throw UsageError("bad integer list '" + s + "'");
    }
  }
  return out;
}

std::string file_stem_for(std::size_t index, const std::string& id) {
  std::string safe;
  for (char c : id.substr(0, 64)) {
    safe += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%08zu_", index);
  return buf + safe;
}

int cmd_stitch(const StitchOptions& o, const GlobalOptions& g, Streams s) {
  const auto records = io::read_manifest(o.manifest);
  const SignLexicon lex = io::read_sign_lexicon(o.lexicon);

  StitchConfig cfg;
  cfg.word_order = parse_word_order(o.word_order);
  cfg.base_stride = o.stride;
  cfg.jitter_strides = parse_size_list(o.jitter);
  cfg.crossfade_frames = o.crossfade;
  cfg.seed = g.seed;
  cfg.skip_oov = g.skip_oov;

  const fs::path out_manifest(o.out);
  const fs::path manifest_dir = out_manifest.has_parent_path() ? out_manifest.parent_path() : fs::path(".");
  const fs::path pose_dir(o.output_dir);
  fs::create_directories(pose_dir);

  std::size_t index = 0;
  std::optional<double> target;
  if (o.target_mean_frames > 0.0) target = o.target_mean_frames;
  const auto summary = stitch_dataset(
      records, lex, cfg, target,
      [&](const SentenceRecord& rec, const StitchResult& res) {
        const fs::path file = pose_dir / (file_stem_for(index++, rec.id) + ".psp");
        io::write_pose_file(file, res.sequence);
        return fs::relative(file, manifest_dir).generic_string();
      },
      g.jobs);

  io::write_manifest(out_manifest, summary.records);
  if (!o.stats.empty()) {
    io::write_file_atomic(o.stats, io::stats_to_json(io::compute_stats(summary.records)));
  }
  for (const auto& e : summary.errors) s.err << "skipped " << e << "\n";
  s.err << "stitched " << summary.records.size() << " sentences (skipped " << summary.skipped
        << "), base stride " << summary.base_stride << ", frames mean "
        << summary.pre_stitch_mean << " -> " << summary.frame_histogram.mean << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- sample

struct SampleOptions {
  std::uint64_t total_steps = 0;
  std::uint64_t start_step = 0;
  std::uint64_t real_size = 1, synth_size = 1;
  AnnealSchedule sched;
  std::string csv, draws;
};

int cmd_sample(const SampleOptions& o, const GlobalOptions& g, Streams s) {
  const auto draws = emit_schedule(o.total_steps, o.sched, g.seed, o.real_size, o.synth_size, o.start_step);
  std::ostringstream csv;
  write_schedule_csv(csv, draws, o.sched);
  if (o.csv.empty()) {
    s.out << csv.str();
  } else {
    io::write_file_atomic(o.csv, csv.str());
  }
  if (!o.draws.empty()) {
    std::string lines;
    for (const auto& d : draws) {
      nlohmann::ordered_json j;
      j["step"] = d.step;
      j["source"] = d.source == DataSource::Real ? "real" : "synthetic";
      j["item_index"] = d.item_index;
      lines += j.dump() + "\n";
    }
    io::write_file_atomic(o.draws, lines);
  }
  std::size_t real = 0;
  for (const auto& d : draws) real += d.source == DataSource::Real;
  s.err << "emitted " << draws.size() << " draws, " << real << " real\n";
  return kExitOk;
}

// ---------------------------------------------------------------- tokenize

struct TokenizeOptions {
  std::vector<std::string> inputs;
  std::string model, out;
  std::size_t vocab_size = 15000;
  bool text = false;
};

std::vector<std::string> corpus_lines(const std::vector<std::string>& inputs, bool text) {
  std::vector<std::string> lines;
  for (const auto& p : inputs) {
    for (const auto& r : read_corpus(p, text)) lines.push_back(join(r.text));
  }
  return lines;
}

int cmd_tokenize_train(const TokenizeOptions& o, Streams s) {
  const auto lines = corpus_lines(o.inputs, o.text);
  const BpeModel model = bpe_train(lines, o.vocab_size);
  io::write_file_atomic(o.model, model.to_json() + "\n");
  s.err << "trained BPE: " << model.vocab_size() << " tokens, " << model.merges().size()
        << " merges\n";
  return kExitOk;
}

int cmd_tokenize_encode(const TokenizeOptions& o, Streams s) {
  const BpeModel model = BpeModel::from_json(io::read_file(o.model));
  std::string lines;
  std::size_t n = 0;
  for (const auto& p : o.inputs) {
    for (const auto& r : read_corpus(p, o.text)) {
      nlohmann::ordered_json j;
      j["id"] = r.id;
      j["ids"] = model.encode(join(r.text));
      lines += j.dump() + "\n";
      ++n;
    }
  }
  if (o.out.empty()) {
    s.out << lines;
  } else {
    io::write_file_atomic(o.out, lines);
  }
  s.err << "encoded " << n << " sentences\n";
  return kExitOk;
}

int cmd_tokenize_decode(const TokenizeOptions& o, Streams s) {
  const BpeModel model = BpeModel::from_json(io::read_file(o.model));
  std::string lines;
  for (const auto& p : o.inputs) {
    std::size_t line_no = 0;
    for (const auto& line : io::read_lines(p)) {
      ++line_no;
      if (split_ws(line).empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        const auto ids = j.at("ids").get<std::vector<std::int32_t>>();
        lines += model.decode(ids) + "\n";
      } catch (const nlohmann::json::exception& e) {
        throw DataError(p + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  if (o.out.empty()) {
    s.out << lines;
  } else {
    io::write_file_atomic(o.out, lines);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalOptions {
  std::string pairs, candidates, references, out, smoothing = "none";
};

std::string format_report_table(const EvalReport& r) {
  std::ostringstream os;
  char buf[96];
  std::snprintf(buf, sizeof buf, "%-10s %10s\n", "metric", "score");
  os << buf;
  for (const auto& [n, v] : r.bleu) {
    std::snprintf(buf, sizeof buf, "BLEU-%-5d %10.2f\n", n, v);
    os << buf;
  }
  const std::pair<const char*, const PrfScore*> rouge[] = {
      {"ROUGE-1", &r.rouge1}, {"ROUGE-2", &r.rouge2}, {"ROUGE-L", &r.rougeL}};
  for (const auto& [name, sc] : rouge) {
    std::snprintf(buf, sizeof buf, "%-10s %10.4f  (P %.4f R %.4f)\n", name, sc->f1, sc->precision,
                  sc->recall);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "pairs %zu, smoothing %s\n", r.n_pairs,
                std::string(to_string(r.smoothing)).c_str());
  os << buf;
  return os.str();
}

int cmd_eval(const EvalOptions& o, Streams s) {
  std::vector<EvalPair> pairs;
  if (!o.pairs.empty()) {
    pairs = io::read_eval_pairs(o.pairs);
  } else {
    if (o.candidates.empty() || o.references.empty()) {
      throw UsageError("eval needs --pairs or both --candidates and --references");
    }
    const auto cands = io::read_lines(o.candidates);
    const auto refs = io::read_lines(o.references);
    if (cands.size() != refs.size()) {
      throw DataError("candidate file has " + std::to_string(cands.size()) +
                      " lines, reference file " + std::to_string(refs.size()));
    }
    for (std::size_t i = 0; i < cands.size(); ++i) {
      pairs.push_back({std::to_string(i + 1), cands[i], refs[i]});
    }
  }
  const EvalReport report = eval_pairs(pairs, parse_smoothing(o.smoothing));
  s.out << format_report_table(report);
  if (!o.out.empty()) io::write_file_atomic(o.out, io::report_to_json(report));
  return kExitOk;
}

// ---------------------------------------------------------------- stats

struct StatsOptions {
  std::string manifest, out, length_csv, frame_csv;
};

int cmd_stats(const StatsOptions& o, Streams s) {
  const auto records = io::read_manifest(o.manifest);
  const auto stats = io::compute_stats(records);
  const auto json = io::stats_to_json(stats);
  if (o.out.empty()) {
    s.out << json;
  } else {
    io::write_file_atomic(o.out, json);
  }
  if (!o.length_csv.empty()) {
    io::write_file_atomic(o.length_csv, io::histogram_csv(stats.length_histogram, "length"));
  }
  if (!o.frame_csv.empty()) {
    io::write_file_atomic(o.frame_csv, io::histogram_csv(stats.frame_histogram, "frames"));
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthetic sign-language pose dataset toolkit"};
  app.name(args.empty() ? "signsynth" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Global random seed");
  app.add_option("--config", g.config, "Flat key = value settings file");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--skip-oov", g.skip_oov, "Drop tokens without a lexicon clip when stitching");

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Expand slot templates into a sentence manifest");
  gen_cmd->add_option("--templates", gen.templates, "Template file (id TAB phenomenon TAB dsl)")->required();
  gen_cmd->add_option("--lexicon", gen.lexicon, "Slot lexicon JSONL")->required();
  gen_cmd->add_option("--out", gen.out, "Output manifest JSONL")->required();
  gen_cmd->add_option("--vocab", gen.vocab, "Sign vocabulary word list; restricts the lexicon");
  gen_cmd->add_option("--sign-lexicon", gen.sign_lexicon, "Sign lexicon index used to check pose_source");
  gen_cmd->add_option("--limit", gen.limit, "Max sentences per template (0 = all)");
  gen_cmd->add_option("--sample", gen.sample, "Draw this many sentences per template instead of enumerating");

  FilterOptions filter;
  auto* filter_cmd = app.add_subcommand("filter", "Keep corpus sentences covered by the vocabulary");
  filter_cmd->add_option("--input", filter.input, "Corpus manifest (or text with --text)")->required();
  filter_cmd->add_option("--vocab", filter.vocab, "Word list")->required();
  filter_cmd->add_option("--out", filter.out, "Output manifest")->required();
  filter_cmd->add_option("--min-rate", filter.min_rate, "Keep sentences with match rate above this")
      ->check(CLI::Range(0.0, 1.0));
  filter_cmd->add_flag("--text", filter.text, "Input is plain text, one sentence per line");

  MergeOptions merge;
  auto* merge_cmd = app.add_subcommand("merge", "Merge short sentences to match a length distribution");
  merge_cmd->add_option("--input", merge.input)->required();
  merge_cmd->add_option("--out", merge.out)->required();
  merge_cmd->add_option("--max-len", merge.policy.max_len, "Sentences shorter than this are candidates");
  merge_cmd->add_option("--fraction", merge.policy.fraction, "Share of candidates merged")
      ->check(CLI::Range(0.0, 1.0));
  merge_cmd->add_option("--group", merge.policy.group, "Sentences per merged sentence");

  PostprocessOptions post;
  auto* post_cmd = app.add_subcommand("postprocess", "Replace names with <PERSON> and rare words with <UNKNOWN>");
  post_cmd->add_option("--input", post.input)->required();
  post_cmd->add_option("--out", post.out)->required();
  post_cmd->add_option("--names", post.names, "Gazetteer, one name per line");
  post_cmd->add_option("--min-freq", post.min_freq, "Tokens rarer than this become <UNKNOWN>");
  post_cmd->add_option("--count-extra", post.count_extra, "Extra manifests included in the frequency count");

  IngestOptions ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Convert raw landmark clips into a pose lexicon");
  ingest_cmd->add_option("--input-dir", ingest.input_dir, "Directory of <word>.jsonl landmark files")->required();
  ingest_cmd->add_option("--output-dir", ingest.output_dir)->required();
  ingest_cmd->add_option("--threshold", ingest.threshold, "Confidence threshold")->check(CLI::Range(0.0, 1.0));

  StitchOptions stitch;
  auto* stitch_cmd = app.add_subcommand("stitch", "Stitch word clips into sentence pose sequences");
  stitch_cmd->add_option("--manifest", stitch.manifest)->required();
  stitch_cmd->add_option("--lexicon", stitch.lexicon, "Sign lexicon index (from ingest)")->required();
  stitch_cmd->add_option("--output-dir", stitch.output_dir, "Directory for pose files")->required();
  stitch_cmd->add_option("--out", stitch.out, "Output manifest")->required();
  stitch_cmd->add_option("--stats", stitch.stats, "Write stats JSON for the output manifest");
  stitch_cmd->add_option("--word-order", stitch.word_order, "swo or rwo");
  stitch_cmd->add_option("--crossfade", stitch.crossfade, "Interpolated frames between words");
  stitch_cmd->add_option("--stride", stitch.stride, "Base stride when no target mean is given")
      ->check(CLI::PositiveNumber);
  stitch_cmd->add_option("--jitter", stitch.jitter, "Per-sentence stride multipliers, e.g. 1,2,3");
  stitch_cmd->add_option("--target-mean-frames", stitch.target_mean_frames,
                         "Match this mean frame count (sets the base stride)");

  SampleOptions sample;
  auto* sample_cmd = app.add_subcommand("sample", "Export the real/synthetic mixture schedule");
  sample_cmd->add_option("--total-steps", sample.total_steps)->required();
  sample_cmd->add_option("--start-step", sample.start_step);
  sample_cmd->add_option("--real-size", sample.real_size)->check(CLI::PositiveNumber);
  sample_cmd->add_option("--synth-size", sample.synth_size)->check(CLI::PositiveNumber);
  sample_cmd->add_option("--max-real-fraction", sample.sched.max_real_fraction)->check(CLI::Range(0.0, 1.0));
  sample_cmd->add_option("--ramp-steps", sample.sched.ramp_steps)->check(CLI::PositiveNumber);
  sample_cmd->add_option("--csv", sample.csv, "CSV output (default stdout)");
  sample_cmd->add_option("--draws", sample.draws, "JSONL with per-step source and item index");

  TokenizeOptions tok;
  auto* tok_cmd = app.add_subcommand("tokenize", "Train or apply the BPE tokenizer");
  tok_cmd->require_subcommand(1);
  auto* tok_train = tok_cmd->add_subcommand("train", "Train a BPE model");
  tok_train->add_option("--input", tok.inputs, "Manifests (or text files with --text)")->required();
  tok_train->add_option("--model", tok.model, "Output model JSON")->required();
  tok_train->add_option("--vocab-size", tok.vocab_size);
  tok_train->add_flag("--text", tok.text);
  auto* tok_encode = tok_cmd->add_subcommand("encode", "Encode sentences to ids");
  tok_encode->add_option("--input", tok.inputs)->required();
  tok_encode->add_option("--model", tok.model)->required();
  tok_encode->add_option("--out", tok.out, "Output JSONL (default stdout)");
  tok_encode->add_flag("--text", tok.text);
  auto* tok_decode = tok_cmd->add_subcommand("decode", "Decode id JSONL back to text");
  tok_decode->add_option("--input", tok.inputs)->required();
  tok_decode->add_option("--model", tok.model)->required();
  tok_decode->add_option("--out", tok.out);

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "BLEU-1..4 and ROUGE-1/2/L");
  eval_cmd->add_option("--pairs", ev.pairs, "JSONL of {id, candidate, reference}");
  eval_cmd->add_option("--candidates", ev.candidates, "Hypotheses, one per line");
  eval_cmd->add_option("--references", ev.references, "References, one per line");
  eval_cmd->add_option("--smoothing", ev.smoothing, "none or exp");
  eval_cmd->add_option("--out", ev.out, "Report JSON");

  StatsOptions st;
  auto* stats_cmd = app.add_subcommand("stats", "Manifest statistics and histogram CSVs");
  stats_cmd->add_option("--manifest", st.manifest)->required();
  stats_cmd->add_option("--out", st.out, "Stats JSON (default stdout)");
  stats_cmd->add_option("--length-csv", st.length_csv);
  stats_cmd->add_option("--frame-csv", st.frame_csv);

  std::vector<char*> argv;
  std::vector<std::string> storage = args.empty() ? std::vector<std::string>{"signsynth"} : args;
  for (auto& a : storage) argv.push_back(a.data());

  Streams s{out, err};
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (!g.config.empty()) {
      const Config cfg = Config::load(g.config);
      apply_config(app, cfg);
      for (CLI::App* sub : app.get_subcommands()) {
        apply_config(*sub, cfg);
        for (CLI::App* nested : sub->get_subcommands()) apply_config(*nested, cfg);
      }
    }

    if (gen_cmd->parsed()) return cmd_gen(gen, g, s);
    if (filter_cmd->parsed()) return cmd_filter(filter, s);
    if (merge_cmd->parsed()) return cmd_merge(merge, g, s);
    if (post_cmd->parsed()) return cmd_postprocess(post, s);
    if (ingest_cmd->parsed()) return cmd_ingest(ingest, g, s);
    if (stitch_cmd->parsed()) return cmd_stitch(stitch, g, s);
    if (sample_cmd->parsed()) return cmd_sample(sample, g, s);
    if (tok_train->parsed()) return cmd_tokenize_train(tok, s);
    if (tok_encode->parsed()) return cmd_tokenize_encode(tok, s);
    if (tok_decode->parsed()) return cmd_tokenize_decode(tok, s);
    if (eval_cmd->parsed()) return cmd_eval(ev, s);
    if (stats_cmd->parsed()) return cmd_stats(st, s);
    throw UsageError("no subcommand");
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    if (rc == 0) return kExitOk;
    err << app.help();
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  }
}

int run_cli(int argc, char** argv) {
  return run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace signsynth
