#include "strokecast/svc.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace strokecast {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits text into lines on '\n', stripping one trailing '\r' per line.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename Int>
Int parse_int(std::string_view tok, int line_no, std::string_view what) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw DataError("line " + std::to_string(line_no) + ": " + std::string(what) +
                    " is not an integer: '" + std::string(tok) + "'");
  }
  return value;
}

}  // namespace

void validate_recording(const WordRecording& rec) {
  if (rec.samples.empty()) throw DataError("recording has no samples");
  std::int64_t prev_ts = rec.samples.front().ts;
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    const PenSample& s = rec.samples[i];
    if (s.bs != 0 && s.bs != 1)
      throw DataError("sample " + std::to_string(i) + ": bs=" + std::to_string(s.bs) +
                      " out of range {0,1}");
    if (s.pr < 0)
      throw DataError("sample " + std::to_string(i) + ": negative pressure " +
                      std::to_string(s.pr));
    if (s.ts < prev_ts)
      throw DataError("sample " + std::to_string(i) + ": timestamp decreases (" +
                      std::to_string(s.ts) + " < " + std::to_string(prev_ts) + ")");
    prev_ts = s.ts;
  }
}

WordRecording parse_svc(std::string_view text, std::string_view word_id) {
  const auto lines = split_lines(text);
  if (lines.empty() || trim(lines[0]).empty()) throw DataError("line 1: missing point-count header");

  const auto count = parse_int<std::int64_t>(trim(lines[0]), 1, "point count");
  if (count < 1) throw DataError("line 1: point count must be >= 1, got " + std::to_string(count));
  const auto declared = static_cast<std::size_t>(count);
  if (lines.size() - 1 != declared) {
    throw DataError("line 1: declared " + std::to_string(declared) + " points, found " +
                    std::to_string(lines.size() - 1));
  }

  WordRecording rec;
  rec.word_id = std::string(word_id);
  rec.samples.reserve(declared);
  std::int64_t prev_ts = 0;
  for (std::size_t i = 0; i < declared; ++i) {
    const int line_no = static_cast<int>(i) + 2;
    const auto fields = split_fields(lines[i + 1]);
    if (fields.size() != 7) {
      throw DataError("line " + std::to_string(line_no) + ": expected 7 fields, found " +
                      std::to_string(fields.size()));
    }
    PenSample s;
    s.x = parse_int<std::int32_t>(fields[0], line_no, "x");
    s.y = parse_int<std::int32_t>(fields[1], line_no, "y");
    s.ts = parse_int<std::int64_t>(fields[2], line_no, "ts");
    s.bs = parse_int<std::int32_t>(fields[3], line_no, "bs");
    s.az = parse_int<std::int32_t>(fields[4], line_no, "az");
    s.al = parse_int<std::int32_t>(fields[5], line_no, "al");
    s.pr = parse_int<std::int32_t>(fields[6], line_no, "pr");
    if (s.bs != 0 && s.bs != 1)
      throw DataError("line " + std::to_string(line_no) + ": bs=" + std::to_string(s.bs) +
                      " out of range {0,1}");
    if (s.pr < 0)
      throw DataError("line " + std::to_string(line_no) + ": negative pressure " +
                      std::to_string(s.pr));
    if (i > 0 && s.ts < prev_ts)
      throw DataError("line " + std::to_string(line_no) + ": timestamp decreases (" +
                      std::to_string(s.ts) + " < " + std::to_string(prev_ts) + ")");
    prev_ts = s.ts;
    rec.samples.push_back(s);
  }
  return rec;
}

std::string write_svc(const WordRecording& rec) {
  validate_recording(rec);
  std::string out = std::to_string(rec.samples.size());
  out.push_back('\n');
  for (const PenSample& s : rec.samples) {
    out += std::to_string(s.x);
    out.push_back(' ');
    out += std::to_string(s.y);
    out.push_back(' ');
    out += std::to_string(s.ts);
    out.push_back(' ');
    out += std::to_string(s.bs);
    out.push_back(' ');
    out += std::to_string(s.az);
    out.push_back(' ');
    out += std::to_string(s.al);
    out.push_back(' ');
    out += std::to_string(s.pr);
    out.push_back('\n');
  }
  return out;
}

void Dataset::insert(const std::string& writer_id, int session_id,
                     const std::string& word_id, WordRecording rec) {
  if (!writers.contains(writer_id))
    throw DataError("recording for unknown writer '" + writer_id + "'");
  RecordingKey key{writer_id, session_id, word_id};
  if (recordings.contains(key))
    throw DataError("duplicate recording key (" + writer_id + ", " +
                    std::to_string(session_id) + ", " + word_id + ")");
  recordings.emplace(std::move(key), std::move(rec));
}

const WordRecording* Dataset::find(const std::string& writer_id, int session_id,
                                   const std::string& word_id) const {
  const auto it = recordings.find(RecordingKey{writer_id, session_id, word_id});
  return it == recordings.end() ? nullptr : &it->second;
}

Gender Dataset::gender_of(const std::string& writer_id) const {
  const auto it = writers.find(writer_id);
  if (it == writers.end()) throw DataError("unknown writer '" + writer_id + "'");
  return it->second;
}

std::vector<std::string> Dataset::writers_of(Gender g) const {
  std::vector<std::string> out;
  for (const auto& [id, gender] : writers)
    if (gender == g) out.push_back(id);
  return out;
}

std::vector<std::string> Dataset::word_ids() const {
  std::set<std::string> seen;
  for (const auto& [key, rec] : recordings) seen.insert(key.word_id);
  return {seen.begin(), seen.end()};
}

std::vector<int> Dataset::sessions_of(const std::string& writer_id,
                                      const std::string& word_id) const {
  std::set<int> seen;
  for (auto it = recordings.lower_bound(RecordingKey{writer_id, 0, ""});
       it != recordings.end() && it->first.writer_id == writer_id; ++it) {
    if (it->first.word_id == word_id) seen.insert(it->first.session_id);
  }
  return {seen.begin(), seen.end()};
}

Dataset Dataset::subset(const std::set<std::string>& keep) const {
  Dataset out;
  for (const auto& [id, g] : writers)
    if (keep.contains(id)) out.writers.emplace(id, g);
  for (const auto& [key, rec] : recordings)
    if (keep.contains(key.writer_id)) out.recordings.emplace(key, rec);
  return out;
}

std::map<std::string, Gender> parse_manifest(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open manifest " + file.string());
  std::map<std::string, Gender> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    const std::size_t comma = sv.find(',');
    if (comma == std::string_view::npos)
      throw DataError("manifest line " + std::to_string(line_no) + ": expected 'writer_id,gender'");
    const std::string writer{trim(sv.substr(0, comma))};
    const std::string_view gender_tok = trim(sv.substr(comma + 1));
    if (writer.empty())
      throw DataError("manifest line " + std::to_string(line_no) + ": empty writer id");
    if (gender_tok.size() != 1 || (gender_tok[0] != 'M' && gender_tok[0] != 'F'))
      throw DataError("manifest line " + std::to_string(line_no) + ": gender '" +
                      std::string(gender_tok) + "' for writer '" + writer +
                      "' is not M or F");
    if (out.contains(writer))
      throw DataError("manifest line " + std::to_string(line_no) + ": duplicate writer '" +
                      writer + "'");
    out.emplace(writer, gender_from_code(gender_tok[0]));
  }
  if (out.empty()) throw DataError("manifest " + file.string() + " lists no writers");
  return out;
}

LoadResult load_dataset(const std::filesystem::path& root,
                        const std::filesystem::path& manifest) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw DataError("dataset root " + root.string() + " is not a directory");

  LoadResult result;
  result.dataset.writers = parse_manifest(manifest);

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".svc")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  for (const fs::path& file : files) {
    const fs::path rel = fs::relative(file, root);
    std::vector<std::string> parts;
    for (const auto& p : rel) parts.push_back(p.string());
    if (parts.size() != 3) {
      result.skipped.push_back({file, "unexpected layout (want <writer>/<session>/<word>.svc)"});
      continue;
    }
    const std::string& writer = parts[0];
    if (!result.dataset.writers.contains(writer)) {
      result.skipped.push_back({file, "writer '" + writer + "' not in manifest"});
      continue;
    }
    int session = 0;
    const auto [p, ec] = std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), session);
    if (ec != std::errc{} || p != parts[1].data() + parts[1].size() || session < 1) {
      result.skipped.push_back({file, "session directory '" + parts[1] + "' is not a positive integer"});
      continue;
    }
    const std::string word = fs::path(parts[2]).stem().string();
    std::ifstream in(file, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      WordRecording rec = parse_svc(buf.str(), word);
      result.dataset.insert(writer, session, word, std::move(rec));
    } catch (const DataError& e) {
      result.skipped.push_back({file, e.what()});
    }
  }
  return result;
}

}  // namespace strokecast
