#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "signsynth/common.hpp"
#include "signsynth/pose_model.hpp"

namespace signsynth {

// Template DSL
// ------------
// Whitespace-separated items:
//   Name[]            unconstrained slot filled from lexicon category Name
//   Name[f=V,g=W]     constrained slot; every slot binding variable V must be
//                     filled by words that agree on the bound feature values
//   word              lowercase literal copied verbatim into the sentence
// Example: "Subj[num=N] V_mat[num=N] Obj[]".

struct Slot {
  std::string category;
  /// (feature, variable) pairs in source order.
  std::vector<std::pair<std::string, std::string>> constraints;

  friend bool operator==(const Slot&, const Slot&) = default;
};

using TemplateItem = std::variant<Slot, std::string>;

struct Template {
  std::string id;
  std::string phenomenon = "custom";
  std::vector<TemplateItem> items;

  std::size_t slot_count() const;
  std::vector<const Slot*> slots() const;

  friend bool operator==(const Template&, const Template&) = default;
};

class TemplateParseError : public DataError {
public:
  TemplateParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

Template parse_template(std::string_view src, std::string id = {},
                        std::string phenomenon = "custom");

/// Canonical DSL form: items joined by single spaces, constraints in source order.
std::string render(const Template& t);

struct LexEntry {
  std::string word;  // may span several tokens, e.g. "some boy"
  std::map<std::string, std::string> features;
  std::string pose_source;

  friend bool operator==(const LexEntry&, const LexEntry&) = default;
};

struct SlotLexicon {
  std::map<std::string, std::vector<LexEntry>> entries;

  void add(const std::string& category, LexEntry entry) {
    entries[category].push_back(std::move(entry));
  }
};

/// Case-folded set intersection.
std::set<std::string> intersect_vocab(const std::set<std::string>& lexicon_words,
                                      const std::set<std::string>& template_words);

/// Number of distinct sentences expand_all emits for `t`.
std::uint64_t count_expansions(const Template& t, const SlotLexicon& lex);

using RecordSink = std::function<void(SentenceRecord&&)>;

/// Streams sentences in lexicographic order of slot-candidate indices (last
/// slot varies fastest), skipping duplicate texts. Returns the number emitted.
std::uint64_t expand_each(const Template& t, const SlotLexicon& lex,
                          std::optional<std::uint64_t> limit, const RecordSink& sink);

std::vector<SentenceRecord> expand_all(const Template& t, const SlotLexicon& lex,
                                       std::optional<std::uint64_t> limit = std::nullopt);

/// `n` draws, uniform with replacement over the distinct expansions. The
/// engine is seeded from (seed, t.id), so each template's draws are
/// independent of which other templates are sampled.
std::vector<SentenceRecord> sample_expansions(const Template& t, const SlotLexicon& lex,
                                              std::uint64_t n, std::uint64_t seed);

/// True iff the record's tokens are a valid expansion of `t`, i.e. can be
/// segmented into literals and lexicon words with all agreement satisfied.
bool is_valid_expansion(const Template& t, const SlotLexicon& lex,
                        const std::vector<std::string>& tokens);

}  // namespace signsynth
