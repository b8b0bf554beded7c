#include "signsynth/template_engine.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace signsynth {

std::size_t Template::slot_count() const {
  return static_cast<std::size_t>(std::count_if(items.begin(), items.end(), [](const auto& it) {
    return std::holds_alternative<Slot>(it);
  }));
}

std::vector<const Slot*> Template::slots() const {
  std::vector<const Slot*> out;
  for (const auto& it : items) {
    if (const auto* s = std::get_if<Slot>(&it)) out.push_back(s);
  }
  return out;
}

TemplateParseError::TemplateParseError(const std::string& what, std::size_t offset)
    : DataError("template parse error at byte " + std::to_string(offset) + ": " + what),
      offset_(offset) {}

namespace {

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

class TemplateParser {
public:
  explicit TemplateParser(std::string_view src) : src_(src) {}

  std::vector<TemplateItem> parse() {
    std::vector<TemplateItem> items;
    while (true) {
      while (pos_ < src_.size() && is_space(src_[pos_])) ++pos_;
      if (pos_ >= src_.size()) break;
      items.push_back(item());
    }
    return items;
  }

private:
  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    throw TemplateParseError(what, at);
  }

  TemplateItem item() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < src_.size() && !is_space(src_[end]) && src_[end] != '[') ++end;
    if (end < src_.size() && src_[end] == '[') return slot(start, end);

    const std::string_view tok = src_.substr(start, end - start);
    if (tok.find(']') != std::string_view::npos) fail("unmatched ']'", start + tok.find(']'));
    for (std::size_t i = 0; i < tok.size(); ++i) {
      if (tok[i] >= 'A' && tok[i] <= 'Z') {
        fail("literal must be lowercase (missing '[]' after a slot name?)", start + i);
      }
    }
    pos_ = end;
    return std::string(tok);
  }

  TemplateItem slot(std::size_t start, std::size_t bracket) {
    Slot s;
    if (bracket == start) fail("empty category", start);
    for (std::size_t i = start; i < bracket; ++i) {
      if (!is_ident_char(src_[i])) fail("invalid character in category", i);
    }
    if (!std::isalpha(static_cast<unsigned char>(src_[start]))) {
      fail("category must start with a letter", start);
    }
    s.category = std::string(src_.substr(start, bracket - start));

    pos_ = bracket + 1;
    if (pos_ < src_.size() && src_[pos_] == ']') {
      ++pos_;
      after_slot();
      return s;
    }
    while (true) {
      const std::size_t key_start = pos_;
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
      if (pos_ == key_start) fail("empty feature name", key_start);
      if (!std::islower(static_cast<unsigned char>(src_[key_start]))) {
        fail("feature name must start with a lowercase letter", key_start);
      }
      std::string key(src_.substr(key_start, pos_ - key_start));
      for (const auto& [k, v] : s.constraints) {
        if (k == key) fail("duplicate feature '" + key + "'", key_start);
      }
      if (pos_ >= src_.size() || src_[pos_] != '=') fail("expected '='", pos_);
      ++pos_;

      const std::size_t var_start = pos_;
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
      if (pos_ == var_start) fail("empty value", var_start);
      for (std::size_t i = var_start; i < pos_; ++i) {
        const char c = src_[i];
        const bool ok = (c >= 'A' && c <= 'Z') || (i > var_start && ((c >= '0' && c <= '9') || c == '_'));
        if (!ok) fail("variable must be an uppercase identifier", i);
      }
      s.constraints.emplace_back(std::move(key), std::string(src_.substr(var_start, pos_ - var_start)));

      if (pos_ >= src_.size()) fail("unterminated '['", bracket);
      if (src_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (src_[pos_] == ']') {
        ++pos_;
        break;
      }
      fail("expected ',' or ']'", pos_);
    }
    after_slot();
    return s;
  }

  void after_slot() {
    if (pos_ < src_.size() && !is_space(src_[pos_])) fail("expected whitespace after slot", pos_);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

Template parse_template(std::string_view src, std::string id, std::string phenomenon) {
  if (src.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw TemplateParseError("empty template", 0);
  }
  Template t;
  t.id = std::move(id);
  t.phenomenon = std::move(phenomenon);
  t.items = TemplateParser(src).parse();
  if (t.slot_count() == 0) throw TemplateParseError("template has no slots", 0);
  return t;
}

std::string render(const Template& t) {
  std::string out;
  for (const auto& it : t.items) {
    if (!out.empty()) out += ' ';
    if (const auto* s = std::get_if<Slot>(&it)) {
      out += s->category;
      out += '[';
      for (std::size_t i = 0; i < s->constraints.size(); ++i) {
        if (i) out += ',';
        out += s->constraints[i].first + "=" + s->constraints[i].second;
      }
      out += ']';
    } else {
      out += std::get<std::string>(it);
    }
  }
  return out;
}

std::set<std::string> intersect_vocab(const std::set<std::string>& lexicon_words,
                                      const std::set<std::string>& template_words) {
  std::set<std::string> a, b, out;
  for (const auto& w : lexicon_words) a.insert(ascii_lower(w));
  for (const auto& w : template_words) b.insert(ascii_lower(w));
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

namespace {

using Bindings = std::vector<const std::string*>;  // per variable id; null = unbound

struct SlotPlan {
  const std::vector<LexEntry>* candidates = nullptr;
  std::vector<std::pair<std::string, std::size_t>> constraints;  // feature, variable id
  std::vector<std::vector<std::string>> tokens;                  // per candidate
  // Candidates grouped by their values for the constrained features.
  std::vector<std::size_t> group_of;
  std::vector<std::size_t> group_size;
  std::vector<std::size_t> group_rep;  // a representative candidate per group
};

class ExpansionPlan {
public:
  ExpansionPlan(const Template& t, const SlotLexicon& lex) : t_(t) {
    std::map<std::string, std::size_t> var_ids;
    for (const Slot* s : t.slots()) {
      auto it = lex.entries.find(s->category);
      if (it == lex.entries.end()) {
        throw DataError("unknown category '" + s->category + "' in template '" + t.id + "'");
      }
      SlotPlan plan;
      plan.candidates = &it->second;
      for (const auto& [feature, var] : s->constraints) {
        auto [vit, inserted] = var_ids.emplace(var, var_ids.size());
        plan.constraints.emplace_back(feature, vit->second);
      }
      std::map<std::vector<std::string>, std::size_t> groups;
      for (const LexEntry& e : it->second) {
        std::vector<std::string> key;
        for (const auto& [feature, var] : plan.constraints) {
          auto f = e.features.find(feature);
          if (f == e.features.end()) {
            throw DataError("lexicon word '" + e.word + "' in category '" + s->category +
                            "' lacks feature '" + feature + "'");
          }
          key.push_back(f->second);
        }
        auto [git, fresh] = groups.emplace(std::move(key), plan.group_size.size());
        if (fresh) {
          plan.group_size.push_back(0);
          plan.group_rep.push_back(plan.tokens.size());
        }
        plan.group_of.push_back(git->second);
        ++plan.group_size[git->second];
        plan.tokens.push_back(split_ws(e.word));
      }
      slots_.push_back(std::move(plan));
    }
    n_vars_ = var_ids.size();
    prefix_free_ = std::all_of(slots_.begin(), slots_.end(), [](const SlotPlan& p) {
      auto toks = p.tokens;
      std::sort(toks.begin(), toks.end());
      for (std::size_t i = 1; i < toks.size(); ++i) {
        const auto& a = toks[i - 1];
        const auto& b = toks[i];
        if (a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin())) return false;
      }
      return true;
    });
  }

  std::size_t slot_count() const { return slots_.size(); }
  bool prefix_free() const { return prefix_free_; }
  Bindings empty_bindings() const { return Bindings(n_vars_, nullptr); }

  /// Binds the candidate's feature values. Returns false on conflict; on
  /// success `newly` lists variables that were bound by this call.
  bool bind(std::size_t slot, std::size_t cand, Bindings& b, std::vector<std::size_t>& newly) const {
    newly.clear();
    const SlotPlan& p = slots_[slot];
    const LexEntry& e = (*p.candidates)[cand];
    for (const auto& [feature, var] : p.constraints) {
      const std::string& value = e.features.at(feature);
      if (b[var] == nullptr) {
        b[var] = &value;
        newly.push_back(var);
      } else if (*b[var] != value) {
        for (std::size_t v : newly) b[v] = nullptr;
        newly.clear();
        return false;
      }
    }
    return true;
  }

  static void unbind(Bindings& b, const std::vector<std::size_t>& newly) {
    for (std::size_t v : newly) b[v] = nullptr;
  }

  /// Number of candidate tuples for slots [slot, end) consistent with `b`.
  std::uint64_t count_from(std::size_t slot, Bindings& b) const {
    if (slot == slots_.size()) return 1;
    const SlotPlan& p = slots_[slot];
    std::uint64_t total = 0;
    std::vector<std::size_t> newly;
    for (std::size_t g = 0; g < p.group_size.size(); ++g) {
      if (!bind(slot, p.group_rep[g], b, newly)) continue;
      const std::uint64_t rest = count_from(slot + 1, b);
      unbind(b, newly);
      if (rest != 0 && p.group_size[g] > (UINT64_MAX - total) / rest) {
        throw DataError("expansion count overflows 64 bits");
      }
      total += p.group_size[g] * rest;
    }
    return total;
  }

  std::vector<std::string> render_tokens(const std::vector<std::size_t>& choice) const {
    std::vector<std::string> out;
    std::size_t k = 0;
    for (const auto& it : t_.items) {
      if (std::holds_alternative<Slot>(it)) {
        const auto& toks = slots_[k].tokens[choice[k]];
        out.insert(out.end(), toks.begin(), toks.end());
        ++k;
      } else {
        out.push_back(std::get<std::string>(it));
      }
    }
    return out;
  }

  /// Depth-first enumeration in candidate-index order. `visit` returns false to stop.
  template <typename Visit>
  void enumerate(Visit&& visit) const {
    std::vector<std::size_t> choice(slots_.size());
    Bindings b = empty_bindings();
    bool stop = false;
    enumerate_from(0, choice, b, stop, visit);
  }

  /// The rank-th tuple (0-based) of the enumeration order, by descending
  /// through per-candidate completion counts.
  std::vector<std::size_t> unrank(std::uint64_t rank) const {
    std::vector<std::size_t> choice(slots_.size());
    Bindings b = empty_bindings();
    std::vector<std::size_t> newly;
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      const SlotPlan& p = slots_[s];
      std::vector<std::int64_t> per_group(p.group_size.size(), -1);
      bool placed = false;
      for (std::size_t c = 0; c < p.tokens.size(); ++c) {
        const std::size_t g = p.group_of[c];
        if (!bind(s, c, b, newly)) continue;
        if (per_group[g] < 0) per_group[g] = static_cast<std::int64_t>(count_from(s + 1, b));
        const auto completions = static_cast<std::uint64_t>(per_group[g]);
        if (rank < completions) {
          choice[s] = c;
          placed = true;
          break;
        }
        rank -= completions;
        unbind(b, newly);
      }
      if (!placed) throw std::logic_error("unrank: rank out of range");
    }
    return choice;
  }

private:
  template <typename Visit>
  void enumerate_from(std::size_t slot, std::vector<std::size_t>& choice, Bindings& b, bool& stop,
                      Visit& visit) const {
    if (slot == slots_.size()) {
      if (!visit(choice)) stop = true;
      return;
    }
    std::vector<std::size_t> newly;
    const SlotPlan& p = slots_[slot];
    for (std::size_t c = 0; c < p.tokens.size() && !stop; ++c) {
      if (!bind(slot, c, b, newly)) continue;
      choice[slot] = c;
      enumerate_from(slot + 1, choice, b, stop, visit);
      unbind(b, newly);
    }
  }

  const Template& t_;
  std::vector<SlotPlan> slots_;
  std::size_t n_vars_ = 0;
  bool prefix_free_ = true;
};

struct TokenListHash {
  std::size_t operator()(const std::vector<std::string>& v) const {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (const auto& s : v) h = splitmix64(h ^ fnv1a64(s));
    return static_cast<std::size_t>(h);
  }
};

SentenceRecord make_record(const Template& t, std::string id, std::vector<std::string> tokens) {
  SentenceRecord r;
  r.id = std::move(id);
  r.text = std::move(tokens);
  r.phenomenon = t.phenomenon;
  return r;
}

}  // namespace

std::uint64_t count_expansions(const Template& t, const SlotLexicon& lex) {
  ExpansionPlan plan(t, lex);
  if (plan.prefix_free()) {
    Bindings b = plan.empty_bindings();
    return plan.count_from(0, b);
  }
  std::unordered_set<std::vector<std::string>, TokenListHash> seen;
  plan.enumerate([&](const std::vector<std::size_t>& choice) {
    seen.insert(plan.render_tokens(choice));
    return true;
  });
  return seen.size();
}

std::uint64_t expand_each(const Template& t, const SlotLexicon& lex,
                          std::optional<std::uint64_t> limit, const RecordSink& sink) {
  ExpansionPlan plan(t, lex);
  std::uint64_t emitted = 0;
  if (limit && *limit == 0) return 0;
  const bool dedupe = !plan.prefix_free();
  std::unordered_set<std::vector<std::string>, TokenListHash> seen;
  plan.enumerate([&](const std::vector<std::size_t>& choice) {
    auto tokens = plan.render_tokens(choice);
    if (dedupe && !seen.insert(tokens).second) return true;
    sink(make_record(t, t.id + "-" + std::to_string(emitted), std::move(tokens)));
    ++emitted;
    return !(limit && emitted >= *limit);
  });
  return emitted;
}

std::vector<SentenceRecord> expand_all(const Template& t, const SlotLexicon& lex,
                                       std::optional<std::uint64_t> limit) {
  std::vector<SentenceRecord> out;
  expand_each(t, lex, limit, [&](SentenceRecord&& r) { out.push_back(std::move(r)); });
  return out;
}

std::vector<SentenceRecord> sample_expansions(const Template& t, const SlotLexicon& lex,
                                              std::uint64_t n, std::uint64_t seed) {
  ExpansionPlan plan(t, lex);
  Engine eng(derive_seed(seed, t.id));
  std::vector<SentenceRecord> out;

  if (plan.prefix_free()) {
    Bindings b = plan.empty_bindings();
    const std::uint64_t space = plan.count_from(0, b);
    if (space == 0) throw DataError("template '" + t.id + "' has an empty expansion space");
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto choice = plan.unrank(uniform_index(eng, space));
      out.push_back(make_record(t, t.id + "-s" + std::to_string(i), plan.render_tokens(choice)));
    }
    return out;
  }

  const auto all = expand_all(t, lex);
  if (all.empty()) throw DataError("template '" + t.id + "' has an empty expansion space");
  for (std::uint64_t i = 0; i < n; ++i) {
    out.push_back(make_record(t, t.id + "-s" + std::to_string(i),
                              all[uniform_index(eng, all.size())].text));
  }
  return out;
}

namespace {

bool match_from(const Template& t, const SlotLexicon& lex, std::size_t item, std::size_t pos,
                const std::vector<std::string>& tokens,
                std::map<std::string, std::string>& bindings) {
  if (item == t.items.size()) return pos == tokens.size();
  const auto& it = t.items[item];
  if (const auto* lit = std::get_if<std::string>(&it)) {
    return pos < tokens.size() && tokens[pos] == *lit &&
           match_from(t, lex, item + 1, pos + 1, tokens, bindings);
  }
  const Slot& s = std::get<Slot>(it);
  auto cat = lex.entries.find(s.category);
  if (cat == lex.entries.end()) return false;
  for (const LexEntry& e : cat->second) {
    const auto toks = split_ws(e.word);
    if (pos + toks.size() > tokens.size() ||
        !std::equal(toks.begin(), toks.end(), tokens.begin() + static_cast<std::ptrdiff_t>(pos))) {
      continue;
    }
    auto saved = bindings;
    bool ok = true;
    for (const auto& [feature, var] : s.constraints) {
      auto f = e.features.find(feature);
      if (f == e.features.end()) {
        ok = false;
        break;
      }
      auto [b, inserted] = bindings.emplace(var, f->second);
      if (!inserted && b->second != f->second) {
        ok = false;
        break;
      }
    }
    if (ok && match_from(t, lex, item + 1, pos + toks.size(), tokens, bindings)) return true;
    bindings = std::move(saved);
  }
  return false;
}

}  // namespace

bool is_valid_expansion(const Template& t, const SlotLexicon& lex,
                        const std::vector<std::string>& tokens) {
  std::map<std::string, std::string> bindings;
  return match_from(t, lex, 0, 0, tokens, bindings);
}

}  // namespace signsynth
