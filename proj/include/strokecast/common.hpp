#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace strokecast {

// Exit-code contract of the CLI: 2 config error, 3 data error, 4 internal
// invariant failure.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

enum class Gender : std::uint8_t { Male, Female };
enum class StrokeKind : std::uint8_t { PenDown, PenUp };
enum class Decision : std::uint8_t { Male, Female, Tie };

inline char gender_code(Gender g) { return g == Gender::Male ? 'M' : 'F'; }

inline Gender gender_from_code(char c) {
  if (c == 'M') return Gender::Male;
  if (c == 'F') return Gender::Female;
  throw DataError(std::string("invalid gender code '") + c + "' (expected M or F)");
}

inline std::string_view kind_name(StrokeKind k) {
  return k == StrokeKind::PenDown ? "down" : "up";
}

inline StrokeKind kind_from_name(std::string_view s) {
  if (s == "down") return StrokeKind::PenDown;
  if (s == "up") return StrokeKind::PenUp;
  throw DataError("invalid stroke kind '" + std::string(s) + "' (expected down or up)");
}

inline std::string_view decision_name(Decision d) {
  switch (d) {
    case Decision::Male: return "M";
    case Decision::Female: return "F";
    default: return "Tie";
  }
}

// Channel count per stroke kind: pen-down keeps x, y, pressure; pen-up keeps
// only x, y (its pressure is identically zero).
inline int feature_count(StrokeKind k) { return k == StrokeKind::PenDown ? 3 : 2; }

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace strokecast
