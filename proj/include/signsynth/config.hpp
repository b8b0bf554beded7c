#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace signsynth {

/// Flat `key = value` settings file. '#' starts a comment; keys are
/// normalised to lowercase with '-' folded to '_', so `max-frames`,
/// `Max_Frames` and `max_frames` are the same setting.
class Config {
public:
  static Config parse(std::string_view text, std::string_view origin = "<config>");
  static Config load(const std::filesystem::path& path);

  std::optional<std::string> get(std::string_view key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  static std::string normalize_key(std::string_view key);

private:
  std::map<std::string, std::string> values_;
};

}  // namespace signsynth
