#include "signsynth/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "signsynth/common.hpp"

namespace signsynth::io {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw DataError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(std::string_view b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + static_cast<std::size_t>(i)]))
         << (8 * i);
  }
  return v;
}

[[noreturn]] void pose_error(std::string_view origin, std::size_t offset, const std::string& what) {
  throw DataError(std::string(origin) + ": byte " + std::to_string(offset) + ": " + what);
}

}  // namespace

std::string encode_pose(const PoseSequence& seq) {
  std::string out(kPoseMagic);
  put_u32(out, static_cast<std::uint32_t>(seq.size()));
  put_u32(out, static_cast<std::uint32_t>(kPoseDims));
  put_u32(out, static_cast<std::uint32_t>(seq.source_id.size()));
  out += seq.source_id;
  out.reserve(out.size() + seq.size() * kPoseDims * 4);
  for (const auto& f : seq.frames) {
    for (float v : f.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

PoseSequence decode_pose(std::string_view b, std::string_view origin) {
  constexpr std::size_t kFixed = 8 + 12;
  if (b.size() < kFixed) pose_error(origin, b.size(), "truncated header");
  if (b.substr(0, 8) != kPoseMagic) pose_error(origin, 0, "bad magic (expected psp-v1)");
  const std::uint32_t n_frames = get_u32(b, 8);
  const std::uint32_t dims = get_u32(b, 12);
  const std::uint32_t id_len = get_u32(b, 16);
  if (dims != kPoseDims) pose_error(origin, 12, "dims must be 152, got " + std::to_string(dims));
  if (b.size() < kFixed + id_len) pose_error(origin, b.size(), "truncated source id");
  PoseSequence seq;
  seq.source_id = std::string(b.substr(kFixed, id_len));
  const std::size_t payload_at = kFixed + id_len;
  const std::size_t want = static_cast<std::size_t>(n_frames) * kPoseDims * 4;
  if (b.size() - payload_at != want) {
    pose_error(origin, b.size(), "payload is " + std::to_string(b.size() - payload_at) +
                                     " bytes, expected " + std::to_string(want));
  }
  seq.frames.resize(n_frames);
  std::size_t at = payload_at;
  for (auto& f : seq.frames) {
    for (float& v : f.values) {
      v = std::bit_cast<float>(get_u32(b, at));
      if (!std::isfinite(v)) pose_error(origin, at, "non-finite value");
      at += 4;
    }
  }
  return seq;
}

void write_pose_file(const fs::path& path, const PoseSequence& seq) {
  write_file_atomic(path, encode_pose(seq));
}

PoseSequence read_pose_file(const fs::path& path) {
  return decode_pose(read_file(path), path.string());
}

namespace {

[[noreturn]] void line_error(std::string_view origin, std::size_t line_no, const std::string& what) {
  throw DataError(std::string(origin) + ":" + std::to_string(line_no) + ": " + what);
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) fn(line, line_no);
    pos = end + 1;
  }
}

json parse_json_line(std::string_view line, std::string_view origin, std::size_t line_no) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    line_error(origin, line_no, e.what());
  }
}

template <std::size_t N>
void read_group(const json& j, const char* key, std::array<Landmark, N>& out,
                std::string_view origin, std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_array()) line_error(origin, line_no, std::string("missing '") + key + "'");
  if (it->size() != N) {
    line_error(origin, line_no, std::string("'") + key + "' has " + std::to_string(it->size()) +
                                    " points, expected " + std::to_string(N));
  }
  for (std::size_t i = 0; i < N; ++i) {
    const json& p = (*it)[i];
    if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() ||
        !p[2].is_number()) {
      line_error(origin, line_no, std::string(key) + "[" + std::to_string(i) + "] must be [x,y,c]");
    }
    out[i] = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
  }
}

template <std::size_t N>
json group_json(const std::array<Landmark, N>& pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back({p.x, p.y, p.confidence});
  return arr;
}

}  // namespace

std::vector<RawLandmarkFrame> parse_landmark_jsonl(std::string_view text, std::string_view origin) {
  std::vector<RawLandmarkFrame> frames;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const json j = parse_json_line(line, origin, line_no);
    RawLandmarkFrame f;
    read_group(j, "body", f.body, origin, line_no);
    read_group(j, "face", f.face, origin, line_no);
    read_group(j, "left_hand", f.left_hand, origin, line_no);
    read_group(j, "right_hand", f.right_hand, origin, line_no);
    try {
      f.validate();
    } catch (const DataError& e) {
      line_error(origin, line_no, e.what());
    }
    frames.push_back(f);
  });
  return frames;
}

std::vector<RawLandmarkFrame> read_landmark_file(const fs::path& path) {
  return parse_landmark_jsonl(read_file(path), path.string());
}

void write_landmark_file(const fs::path& path, std::span<const RawLandmarkFrame> frames) {
  std::string out;
  for (const auto& f : frames) {
    ojson j;
    j["body"] = group_json(f.body);
    j["face"] = group_json(f.face);
    j["left_hand"] = group_json(f.left_hand);
    j["right_hand"] = group_json(f.right_hand);
    out += j.dump();
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::string record_to_json(const SentenceRecord& r) {
  ojson j;
  j["id"] = r.id;
  j["text"] = r.text;
  if (r.phenomenon) j["phenomenon"] = *r.phenomenon;
  j["word_order"] = std::string(to_string(r.word_order));
  if (r.pose_path) j["pose_path"] = *r.pose_path;
  if (r.n_frames) j["n_frames"] = *r.n_frames;
  return j.dump();
}

SentenceRecord record_from_json(std::string_view line, std::string_view origin, std::size_t line_no) {
  const json j = parse_json_line(line, origin, line_no);
  SentenceRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    const json& text = j.at("text");
    // Plain strings are accepted and split on whitespace.
    r.text = text.is_string() ? split_ws(text.get<std::string>()) : text.get<std::vector<std::string>>();
    if (auto it = j.find("phenomenon"); it != j.end() && !it->is_null()) {
      r.phenomenon = it->get<std::string>();
    }
    if (auto it = j.find("word_order"); it != j.end()) r.word_order = parse_word_order(it->get<std::string>());
    if (auto it = j.find("pose_path"); it != j.end() && !it->is_null()) r.pose_path = it->get<std::string>();
    if (auto it = j.find("n_frames"); it != j.end() && !it->is_null()) r.n_frames = it->get<std::size_t>();
    r.validate();
  } catch (const json::exception& e) {
    line_error(origin, line_no, e.what());
  } catch (const DataError& e) {
    line_error(origin, line_no, e.what());
  }
  return r;
}

std::vector<SentenceRecord> parse_manifest(std::string_view text, std::string_view origin) {
  std::vector<SentenceRecord> out;
  std::set<std::string> ids;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    out.push_back(record_from_json(line, origin, line_no));
    if (!ids.insert(out.back().id).second) line_error(origin, line_no, "duplicate id '" + out.back().id + "'");
  });
  return out;
}

std::vector<SentenceRecord> read_manifest(const fs::path& path) {
  return parse_manifest(read_file(path), path.string());
}

std::string format_manifest(std::span<const SentenceRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r);
    out += '\n';
  }
  return out;
}

void write_manifest(const fs::path& path, std::span<const SentenceRecord> records) {
  write_file_atomic(path, format_manifest(records));
}

ManifestStats compute_stats(std::span<const SentenceRecord> records) {
  ManifestStats s;
  s.n_sentences = records.size();
  s.length_histogram = length_stats(records);
  std::vector<std::size_t> frames;
  std::set<std::string> vocab;
  for (const auto& r : records) {
    if (r.n_frames) frames.push_back(*r.n_frames);
    for (const auto& t : r.text) vocab.insert(ascii_lower(t));
  }
  s.frame_histogram = LengthHistogram::from_lengths(frames);
  s.vocab_size = vocab.size();
  return s;
}

namespace {

ojson hist_json(const LengthHistogram& h) {
  ojson bins = ojson::object();
  for (const auto& [len, count] : h.bins) bins[std::to_string(len)] = count;
  ojson j;
  j["total"] = h.total;
  j["mean"] = h.mean;
  j["bins"] = std::move(bins);
  return j;
}

LengthHistogram hist_from(const json& j) {
  LengthHistogram h;
  h.total = j.at("total").get<std::size_t>();
  h.mean = j.at("mean").get<double>();
  for (auto it = j.at("bins").begin(); it != j.at("bins").end(); ++it) {
    h.bins[std::stoul(it.key())] = it.value().get<std::size_t>();
  }
  return h;
}

}  // namespace

std::string stats_to_json(const ManifestStats& s) {
  ojson j;
  j["n_sentences"] = s.n_sentences;
  j["length_histogram"] = hist_json(s.length_histogram);
  j["frame_histogram"] = hist_json(s.frame_histogram);
  j["vocab_size"] = s.vocab_size;
  return j.dump(2) + "\n";
}

ManifestStats stats_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    ManifestStats s;
    s.n_sentences = j.at("n_sentences").get<std::size_t>();
    s.length_histogram = hist_from(j.at("length_histogram"));
    s.frame_histogram = hist_from(j.at("frame_histogram"));
    s.vocab_size = j.at("vocab_size").get<std::size_t>();
    return s;
  } catch (const std::exception& e) {
    throw DataError(std::string("stats json: ") + e.what());
  }
}

std::string histogram_csv(const LengthHistogram& h, std::string_view value_name) {
  std::string out = std::string(value_name) + ",count\n";
  for (const auto& [len, count] : h.bins) out += std::to_string(len) + "," + std::to_string(count) + "\n";
  return out;
}

std::vector<Template> parse_templates(std::string_view text, std::string_view origin) {
  std::vector<Template> out;
  std::set<std::string> ids;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto first = line.find_first_not_of(" \t");
    if (line[first] == '#') return;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) line_error(origin, line_no, "expected 'id<TAB>phenomenon<TAB>template'");
    std::string id(line.substr(0, t1));
    std::string phen(line.substr(t1 + 1, t2 - t1 - 1));
    if (id.empty()) line_error(origin, line_no, "empty template id");
    if (!is_known_phenomenon(phen) || phen == "corpus") {
      line_error(origin, line_no, "unknown phenomenon '" + phen + "'");
    }
    if (!ids.insert(id).second) line_error(origin, line_no, "duplicate template id '" + id + "'");
    try {
      out.push_back(parse_template(line.substr(t2 + 1), id, phen));
    } catch (const TemplateParseError& e) {
      line_error(origin, line_no, e.what());
    }
  });
  return out;
}

std::vector<Template> read_templates(const fs::path& path) {
  return parse_templates(read_file(path), path.string());
}

SlotLexicon parse_slot_lexicon(std::string_view text, std::string_view origin) {
  SlotLexicon lex;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const json j = parse_json_line(line, origin, line_no);
    try {
      LexEntry e;
      e.word = j.at("word").get<std::string>();
      if (split_ws(e.word).empty()) line_error(origin, line_no, "empty word");
      if (auto it = j.find("features"); it != j.end()) {
        e.features = it->get<std::map<std::string, std::string>>();
      }
      e.pose_source = j.value("pose_source", e.word);
      const auto category = j.at("category").get<std::string>();
      if (category.empty()) line_error(origin, line_no, "empty category");
      lex.add(category, std::move(e));
    } catch (const json::exception& e) {
      line_error(origin, line_no, e.what());
    }
  });
  return lex;
}

SlotLexicon read_slot_lexicon(const fs::path& path) {
  return parse_slot_lexicon(read_file(path), path.string());
}

SignLexicon read_sign_lexicon(const fs::path& index_path) {
  SignLexicon lex;
  const fs::path base = index_path.parent_path();
  const std::string text = read_file(index_path);
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const json j = parse_json_line(line, index_path.string(), line_no);
    std::string word, rel;
    try {
      word = j.at("word").get<std::string>();
      rel = j.at("pose_path").get<std::string>();
    } catch (const json::exception& e) {
      line_error(index_path.string(), line_no, e.what());
    }
    PoseSequence clip = read_pose_file(base / rel);
    if (clip.empty()) line_error(index_path.string(), line_no, "empty clip for '" + word + "'");
    lex.add(word, std::move(clip));
  });
  return lex;
}

std::vector<EvalPair> read_eval_pairs(const fs::path& path) {
  std::vector<EvalPair> out;
  const std::string text = read_file(path);
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const json j = parse_json_line(line, path.string(), line_no);
    try {
      EvalPair p;
      p.id = j.contains("id") ? (j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump())
                              : std::to_string(line_no);
      p.candidate = j.at("candidate").get<std::string>();
      p.reference = j.at("reference").get<std::string>();
      out.push_back(std::move(p));
    } catch (const json::exception& e) {
      line_error(path.string(), line_no, e.what());
    }
  });
  return out;
}

std::string report_to_json(const EvalReport& r) {
  auto prf = [](const PrfScore& s) {
    ojson j;
    j["precision"] = s.precision;
    j["recall"] = s.recall;
    j["f"] = s.f1;
    return j;
  };
  ojson j;
  ojson bleu;
  for (const auto& [n, v] : r.bleu) bleu[std::to_string(n)] = v;
  j["bleu"] = std::move(bleu);
  j["rouge1"] = prf(r.rouge1);
  j["rouge2"] = prf(r.rouge2);
  j["rougeL"] = prf(r.rougeL);
  j["n_pairs"] = r.n_pairs;
  j["smoothing"] = std::string(to_string(r.smoothing));
  return j.dump(2) + "\n";
}

std::set<std::string> read_word_list(const fs::path& path) {
  std::set<std::string> out;
  for (const auto& line : read_lines(path)) {
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t");
    out.insert(line.substr(b, e - b + 1));
  }
  return out;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::vector<std::string> out;
  const std::string text = read_file(path);
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
    pos = end + 1;
  }
  return out;
}

}  // namespace signsynth::io
