#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace signsynth {

inline constexpr std::string_view kEndOfWord = "</w>";
inline const std::string kUnkToken = "<UNK>";

std::vector<std::string> default_specials();

/// Splits a UTF-8 string into code points (invalid bytes stand alone).
std::vector<std::string> utf8_chars(std::string_view s);

/// Byte-pair-encoding model over characters with an end-of-word suffix
/// marker. Ids: specials first, then the base alphabet (sorted), then one id
/// per merge result in training order.
class BpeModel {
public:
  BpeModel() = default;

  const std::vector<std::pair<std::string, std::string>>& merges() const { return merges_; }
  const std::vector<std::string>& specials() const { return specials_; }
  const std::vector<std::string>& id_to_token() const { return tokens_; }
  std::size_t vocab_size() const { return tokens_.size(); }
  std::size_t alphabet_size() const { return alphabet_size_; }
  std::int32_t unk_id() const { return unk_id_; }
  /// -1 when absent.
  std::int32_t token_id(std::string_view token) const;
  bool is_special(std::string_view token) const;

  std::vector<std::int32_t> encode(std::string_view text) const;
  std::string decode(std::span<const std::int32_t> ids) const;

  std::string to_json() const;
  static BpeModel from_json(std::string_view json);

  friend BpeModel bpe_train(std::span<const std::string> corpus, std::size_t vocab_size,
                            std::vector<std::string> specials);

private:
  void add_token(const std::string& tok);
  void finalize();
  std::vector<std::string> encode_word(std::string_view word) const;

  std::vector<std::pair<std::string, std::string>> merges_;
  std::vector<std::string> specials_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> ids_;
  std::map<std::pair<std::string, std::string>, std::size_t> merge_rank_;
  std::size_t alphabet_size_ = 0;
  std::int32_t unk_id_ = -1;
};

/// Trains on whitespace-separated words. Repeatedly merges the most frequent
/// adjacent symbol pair (ties: lexicographically smallest pair) until the
/// vocabulary reaches `vocab_size` or no pair occurs more than once.
/// Words equal to a special token are never split or counted.
BpeModel bpe_train(std::span<const std::string> corpus, std::size_t vocab_size,
                   std::vector<std::string> specials = default_specials());

}  // namespace signsynth
