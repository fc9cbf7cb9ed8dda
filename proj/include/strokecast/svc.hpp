#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "strokecast/common.hpp"

namespace strokecast {

// One point of an SVC trajectory file: x y ts bs az al pr, all integers.
// bs is 1 while the pen touches the surface, 0 in the air.
struct PenSample {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int64_t ts = 0;
  std::int32_t bs = 0;
  std::int32_t az = 0;
  std::int32_t al = 0;
  std::int32_t pr = 0;

  bool operator==(const PenSample&) const = default;
};

struct WordRecording {
  std::string word_id;
  std::vector<PenSample> samples;

  bool operator==(const WordRecording&) const = default;
};

// Throws DataError unless: at least one sample, bs in {0,1}, pr >= 0 and
// ts non-decreasing.
void validate_recording(const WordRecording& rec);

// SVC text layout: line 1 is the decimal point count, then one sample per
// line as "x y ts bs az al pr". LF endings, trailing newline optional; a
// trailing CR before the LF is tolerated. Every violation is reported with
// its 1-based line number.
WordRecording parse_svc(std::string_view text, std::string_view word_id = "");

// Inverse of parse_svc: single-space separated fields, one trailing newline.
// parse_svc(write_svc(r)) reproduces r field for field.
std::string write_svc(const WordRecording& rec);

struct RecordingKey {
  std::string writer_id;
  int session_id = 0;
  std::string word_id;

  auto operator<=>(const RecordingKey&) const = default;
};

class Dataset {
public:
  std::map<std::string, Gender> writers;
  std::map<RecordingKey, WordRecording> recordings;

  // Rejects unknown writers and duplicate (writer, session, word) keys.
  void insert(const std::string& writer_id, int session_id,
              const std::string& word_id, WordRecording rec);

  const WordRecording* find(const std::string& writer_id, int session_id,
                            const std::string& word_id) const;

  Gender gender_of(const std::string& writer_id) const;
  std::vector<std::string> writers_of(Gender g) const;
  std::vector<std::string> word_ids() const;
  std::vector<int> sessions_of(const std::string& writer_id,
                               const std::string& word_id) const;

  // New dataset restricted to the given writers (labels and recordings).
  Dataset subset(const std::set<std::string>& keep) const;
};

// Manifest: UTF-8 text, one "writer_id,gender" pair per line, gender M or F,
// '#' starts a comment line. Duplicate writers and unknown genders are fatal.
std::map<std::string, Gender> parse_manifest(const std::filesystem::path& file);

struct SkipReport {
  std::filesystem::path file;
  std::string reason;
};

struct LoadResult {
  Dataset dataset;
  std::vector<SkipReport> skipped;
};

// Loads every *.svc under root/<writer>/<session>/<word>.svc for writers in
// the manifest. Files that fail to parse (or sit at unexpected paths) are
// skipped with a report instead of aborting the load, so one bad donor file
// cannot take down a whole corpus. recordings + skips always account for
// every .svc file under root.
LoadResult load_dataset(const std::filesystem::path& root,
                        const std::filesystem::path& manifest);

}  // namespace strokecast
