#include "signsynth/tokenizer.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "signsynth/common.hpp"

namespace signsynth {

std::vector<std::string> default_specials() {
  return {"<PAD>", "<BOS>", "<EOS>", kUnkToken, "<PERSON>", "<UNKNOWN>"};
}

std::vector<std::string> utf8_chars(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (c >= 0xF0) len = 4;
    else if (c >= 0xE0) len = 3;
    else if (c >= 0xC0) len = 2;
    if (i + len > s.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

std::int32_t BpeModel::token_id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? -1 : it->second;
}

bool BpeModel::is_special(std::string_view token) const {
  return std::find(specials_.begin(), specials_.end(), token) != specials_.end();
}

void BpeModel::add_token(const std::string& tok) {
  if (ids_.emplace(tok, static_cast<std::int32_t>(tokens_.size())).second) tokens_.push_back(tok);
}

void BpeModel::finalize() {
  merge_rank_.clear();
  for (std::size_t i = 0; i < merges_.size(); ++i) merge_rank_.emplace(merges_[i], i);
  unk_id_ = token_id(kUnkToken);
}

namespace {

std::vector<std::string> word_symbols(std::string_view word) {
  auto syms = utf8_chars(word);
  if (!syms.empty()) syms.back() += kEndOfWord;
  return syms;
}

std::uint64_t pair_key(std::int32_t a, std::int32_t b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

BpeModel bpe_train(std::span<const std::string> corpus, std::size_t vocab_size,
                   std::vector<std::string> specials) {
  if (std::find(specials.begin(), specials.end(), kUnkToken) == specials.end()) {
    specials.push_back(kUnkToken);
  }
  {
    std::set<std::string> uniq(specials.begin(), specials.end());
    if (uniq.size() != specials.size()) throw std::invalid_argument("duplicate special token");
  }
  const std::set<std::string> special_set(specials.begin(), specials.end());

  std::map<std::string, std::uint64_t> word_freq;
  for (const auto& line : corpus) {
    for (auto& w : split_ws(line)) {
      if (!special_set.count(w)) ++word_freq[w];
    }
  }
  if (word_freq.empty()) throw DataError("bpe_train: empty corpus");

  // Every character enters the alphabet in both its inner and word-final form.
  std::set<std::string> alphabet;
  for (const auto& [w, f] : word_freq) {
    for (const auto& ch : utf8_chars(w)) {
      alphabet.insert(ch);
      alphabet.insert(ch + std::string(kEndOfWord));
    }
  }
  if (vocab_size < specials.size() + alphabet.size()) {
    throw std::invalid_argument("vocab_size " + std::to_string(vocab_size) +
                                " is below specials + alphabet (" +
                                std::to_string(specials.size() + alphabet.size()) + ")");
  }

  BpeModel model;
  model.specials_ = specials;
  for (const auto& s : specials) model.add_token(s);
  for (const auto& a : alphabet) model.add_token(a);
  model.alphabet_size_ = alphabet.size();

  // Working state over symbol ids.
  std::vector<std::string>& sym = model.tokens_;
  std::vector<std::vector<std::int32_t>> words;
  std::vector<std::uint64_t> freq;
  for (const auto& [w, f] : word_freq) {
    std::vector<std::int32_t> ids;
    for (const auto& s : word_symbols(w)) ids.push_back(model.ids_.at(s));
    words.push_back(std::move(ids));
    freq.push_back(f);
  }

  std::unordered_map<std::uint64_t, std::int64_t> pair_count;
  std::unordered_map<std::uint64_t, std::set<std::size_t>> where;
  for (std::size_t wi = 0; wi < words.size(); ++wi) {
    const auto& w = words[wi];
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      const auto k = pair_key(w[i], w[i + 1]);
      pair_count[k] += static_cast<std::int64_t>(freq[wi]);
      where[k].insert(wi);
    }
  }

  struct Entry {
    std::int64_t count;
    std::int32_t a, b;
  };
  // Highest count first; ties go to the lexicographically smaller pair.
  auto worse = [&sym](const Entry& x, const Entry& y) {
    if (x.count != y.count) return x.count < y.count;
    const int c = sym[x.a].compare(sym[y.a]);
    if (c != 0) return c > 0;
    return sym[x.b] > sym[y.b];
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  for (const auto& [k, c] : pair_count) {
    heap.push({c, static_cast<std::int32_t>(k >> 32), static_cast<std::int32_t>(k & 0xffffffffu)});
  }

  std::set<std::uint64_t> merged_pairs;
  while (model.tokens_.size() < vocab_size && !heap.empty()) {
    const Entry top = heap.top();
    heap.pop();
    const auto key = pair_key(top.a, top.b);
    auto pc = pair_count.find(key);
    if (pc == pair_count.end() || pc->second != top.count) continue;  // stale
    if (top.count < 2) break;
    if (!merged_pairs.insert(key).second) continue;

    const std::string joined = sym[top.a] + sym[top.b];
    model.merges_.emplace_back(sym[top.a], sym[top.b]);
    model.add_token(joined);
    const std::int32_t new_id = model.ids_.at(joined);

    std::set<std::uint64_t> touched;
    const auto affected = where[key];
    for (std::size_t wi : affected) {
      auto& w = words[wi];
      const auto f = static_cast<std::int64_t>(freq[wi]);
      for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        const auto k = pair_key(w[i], w[i + 1]);
        pair_count[k] -= f;
        touched.insert(k);
      }
      std::vector<std::int32_t> next;
      next.reserve(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (i + 1 < w.size() && w[i] == top.a && w[i + 1] == top.b) {
          next.push_back(new_id);
          ++i;
        } else {
          next.push_back(w[i]);
        }
      }
      w = std::move(next);
      for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        const auto k = pair_key(w[i], w[i + 1]);
        pair_count[k] += f;
        where[k].insert(wi);
        touched.insert(k);
      }
    }
    for (auto k : touched) {
      const auto c = pair_count[k];
      if (c > 0 && !merged_pairs.count(k)) {
        heap.push({c, static_cast<std::int32_t>(k >> 32), static_cast<std::int32_t>(k & 0xffffffffu)});
      }
    }
  }
  model.finalize();
  return model;
}

std::vector<std::string> BpeModel::encode_word(std::string_view word) const {
  auto syms = word_symbols(word);
  while (syms.size() > 1) {
    std::size_t best_rank = merge_rank_.size();
    std::size_t best_pos = 0;
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      auto it = merge_rank_.find({syms[i], syms[i + 1]});
      if (it != merge_rank_.end() && it->second < best_rank) {
        best_rank = it->second;
        best_pos = i;
      }
    }
    if (best_rank == merge_rank_.size()) break;
    const auto& [left, right] = merges_[best_rank];
    std::vector<std::string> next;
    next.reserve(syms.size());
    for (std::size_t i = 0; i < syms.size(); ++i) {
      if (i >= best_pos && i + 1 < syms.size() && syms[i] == left && syms[i + 1] == right) {
        next.push_back(syms[i] + syms[i + 1]);
        ++i;
      } else {
        next.push_back(syms[i]);
      }
    }
    syms = std::move(next);
  }
  return syms;
}

std::vector<std::int32_t> BpeModel::encode(std::string_view text) const {
  std::vector<std::int32_t> out;
  for (const auto& w : split_ws(text)) {
    if (is_special(w)) {
      out.push_back(token_id(w));
      continue;
    }
    for (const auto& s : encode_word(w)) {
      const auto id = token_id(s);
      out.push_back(id >= 0 ? id : unk_id_);
    }
  }
  return out;
}

std::string BpeModel::decode(std::span<const std::int32_t> ids) const {
  std::vector<std::string> words;
  std::string buf;
  for (auto id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
      throw DataError("decode: unknown token id " + std::to_string(id));
    }
    const std::string& tok = tokens_[static_cast<std::size_t>(id)];
    if (is_special(tok)) {
      if (!buf.empty()) words.push_back(std::move(buf));
      buf.clear();
      words.push_back(tok);
    } else if (tok.size() >= kEndOfWord.size() &&
               std::string_view(tok).substr(tok.size() - kEndOfWord.size()) == kEndOfWord) {
      buf.append(tok, 0, tok.size() - kEndOfWord.size());
      words.push_back(std::move(buf));
      buf.clear();
    } else {
      buf += tok;
    }
  }
  if (!buf.empty()) words.push_back(std::move(buf));
  return join(words);
}

std::string BpeModel::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = "bpe-v1";
  j["specials"] = specials_;
  j["alphabet_size"] = alphabet_size_;
  auto merges = nlohmann::ordered_json::array();
  for (const auto& [a, b] : merges_) merges.push_back({a, b});
  j["merges"] = std::move(merges);
  nlohmann::ordered_json vocab = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < tokens_.size(); ++i) vocab[tokens_[i]] = i;
  j["vocab"] = std::move(vocab);
  return j.dump(1);
}

BpeModel BpeModel::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bpe model: ") + e.what());
  }
  if (j.value("version", "") != "bpe-v1") throw DataError("bpe model: expected version bpe-v1");
  BpeModel m;
  try {
    m.specials_ = j.at("specials").get<std::vector<std::string>>();
    const auto& vocab = j.at("vocab");
    m.tokens_.assign(vocab.size(), {});
    std::vector<bool> seen(vocab.size(), false);
    for (auto it = vocab.begin(); it != vocab.end(); ++it) {
      const auto id = it.value().get<std::int64_t>();
      if (id < 0 || static_cast<std::size_t>(id) >= vocab.size() || seen[static_cast<std::size_t>(id)]) {
        throw DataError("bpe model: vocab ids must be dense and unique");
      }
      seen[static_cast<std::size_t>(id)] = true;
      m.tokens_[static_cast<std::size_t>(id)] = it.key();
      m.ids_[it.key()] = static_cast<std::int32_t>(id);
    }
    for (const auto& pair : j.at("merges")) {
      m.merges_.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
      if (!m.ids_.count(m.merges_.back().first + m.merges_.back().second)) {
        throw DataError("bpe model: merge result missing from vocab");
      }
    }
    m.alphabet_size_ = j.value("alphabet_size", std::size_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bpe model: ") + e.what());
  }
  for (std::size_t i = 0; i < m.specials_.size(); ++i) {
    if (m.token_id(m.specials_[i]) != static_cast<std::int32_t>(i)) {
      throw DataError("bpe model: specials must hold the lowest ids");
    }
  }
  m.finalize();
  if (m.unk_id_ < 0) throw DataError("bpe model: missing " + kUnkToken);
  return m;
}

}  // namespace signsynth
