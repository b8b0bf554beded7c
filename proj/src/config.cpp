#include "signsynth/config.hpp"

#include "signsynth/common.hpp"
#include "signsynth/io.hpp"

namespace signsynth {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string Config::normalize_key(std::string_view key) {
  std::string k = ascii_lower(trim(key));
  while (!k.empty() && k.front() == '-') k.erase(k.begin());
  for (char& c : k) {
    if (c == '-') c = '_';
  }
  return k;
}

Config Config::parse(std::string_view text, std::string_view origin) {
  Config cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw DataError(std::string(origin) + ":" + std::to_string(line_no) + ": expected key = value");
      }
      const std::string key = normalize_key(line.substr(0, eq));
      if (key.empty()) {
        throw DataError(std::string(origin) + ":" + std::to_string(line_no) + ": empty key");
      }
      std::string value(trim(line.substr(eq + 1)));
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
        value = value.substr(1, value.size() - 2);
      }
      if (!cfg.values_.emplace(key, std::move(value)).second) {
        throw DataError(std::string(origin) + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
      }
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  return parse(io::read_file(path), path.string());
}

std::optional<std::string> Config::get(std::string_view key) const {
  auto it = values_.find(normalize_key(key));
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

}  // namespace signsynth
