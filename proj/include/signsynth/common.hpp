#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace signsynth {

/// Malformed or inconsistent input data. The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad invocation (unknown subcommand, missing option). CLI exit code 1.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string ascii_lower(std::string_view s);

/// Splits on ASCII whitespace, dropping empty pieces.
std::vector<std::string> split_ws(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep = " ");

// Seeding. Every random decision in the pipeline draws from an engine seeded by
// mixing a global seed with a stable key, so results never depend on
// scheduling order or on how many values were drawn elsewhere.

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key);

using Engine = std::mt19937_64;

/// Uniform integer in [0, n). Rejection sampling, identical on every platform
/// (std::uniform_int_distribution is implementation-defined).
std::uint64_t uniform_index(Engine& eng, std::uint64_t n);

/// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(Engine& eng);

/// In-place Fisher-Yates shuffle driven by uniform_index.
template <typename T>
void shuffle(std::vector<T>& v, Engine& eng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(eng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace signsynth
