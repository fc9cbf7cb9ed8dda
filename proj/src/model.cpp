#include "strokecast/model.hpp"

#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "strokecast/rng.hpp"
#include "strokecast/stroke.hpp"

namespace strokecast {
namespace {

constexpr std::string_view kMagic = "STROKECAST-CB v1";
constexpr std::string_view kIndexMagic = "STROKECAST-IDX v1";

std::string schedule_digest(const SomConfig& cfg, const TrainingSchedule& s) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s;rough%d@%.6g-%.6g;fine%d@%.6g-%.6g;units%d",
                s.mode == TrainMode::Batch ? "batch" : "seq", s.rough_epochs,
                s.rough_sigma.start, s.rough_sigma.end, s.fine_epochs, s.fine_sigma.start,
                s.fine_sigma.end, cfg.target_units);
  return buf;
}

TrainingSchedule make_schedule(const GridSpec& grid, const SomConfig& cfg) {
  TrainingSchedule s = default_schedule(grid);
  s.rough_epochs = cfg.rough_epochs;
  s.fine_epochs = cfg.fine_epochs;
  s.mode = cfg.mode;
  return s;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class LineReader {
public:
  LineReader(std::string text, std::filesystem::path file)
      : text_(std::move(text)), file_(std::move(file)) {}

  // Next line, or throws on EOF. The checksum covers raw consumed bytes.
  std::string next(std::string_view what) {
    if (pos_ >= text_.size())
      throw DataError(file_.string() + ": truncated file, expected " + std::string(what));
    std::size_t nl = text_.find('\n', pos_);
    if (nl == std::string::npos) nl = text_.size();
    std::string line = text_.substr(pos_, nl - pos_);
    consumed_ = std::min(nl + 1, text_.size());
    pos_ = consumed_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  std::string_view consumed_bytes_before_current() const {
    return std::string_view(text_).substr(0, last_mark_);
  }
  void mark() { last_mark_ = pos_; }
  bool at_end() {
    while (pos_ < text_.size() && (text_[pos_] == '\n' || text_[pos_] == '\r')) ++pos_;
    return pos_ >= text_.size();
  }

private:
  std::string text_;
  std::filesystem::path file_;
  std::size_t pos_ = 0;
  std::size_t consumed_ = 0;
  std::size_t last_mark_ = 0;
};

std::string expect_kv(const std::string& line, std::string_view key,
                      const std::filesystem::path& file) {
  const std::string prefix = std::string(key) + ": ";
  if (line.rfind(prefix, 0) != 0)
    throw DataError(file.string() + ": expected '" + std::string(key) + ":' line, got '" + line + "'");
  return line.substr(prefix.size());
}

long parse_long(const std::string& s, std::string_view what, const std::filesystem::path& file) {
  long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw DataError(file.string() + ": bad " + std::string(what) + " value '" + s + "'");
  return v;
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string cb_filename(Gender g, StrokeKind k) {
  return std::string(1, gender_code(g)) + "-" + std::string(kind_name(k)) + ".cb";
}

}  // namespace

std::uint64_t derive_codebook_seed(std::uint64_t seed, const std::string& word_id,
                                   Gender g, StrokeKind k) {
  std::uint64_t s = mix_seed(seed, word_id);
  s = mix_seed(s, g == Gender::Male ? "male" : "female");
  return mix_seed(s, kind_name(k));
}

Codebook build_codebook(const Dataset& ds, const std::string& word_id, Gender g,
                        StrokeKind k, int resample_points, const SomConfig& cfg,
                        std::uint64_t seed) {
  if (resample_points < 2) throw ConfigError("resample_points must be >= 2");

  std::vector<std::vector<double>> vectors;
  std::set<std::string> contributing;
  for (const std::string& writer : ds.writers_of(g)) {
    for (const int session : ds.sessions_of(writer, word_id)) {
      const WordRecording* rec = ds.find(writer, session, word_id);
      const Segmentation seg = segment(*rec);
      for (const FeatureStroke& fs : feature_strokes(seg, k, resample_points)) {
        vectors.push_back(fs.values);
        contributing.insert(writer);
      }
    }
  }
  if (vectors.empty())
    throw DataError("no " + std::string(kind_name(k)) + " strokes for word '" + word_id +
                    "', gender " + gender_code(g));

  const std::size_t dim = static_cast<std::size_t>(resample_points) *
                          static_cast<std::size_t>(feature_count(k));
  for (const auto& v : vectors)
    if (v.size() != dim) throw InternalError("feature stroke dimension mismatch");

  const GridSpec grid = plan_grid(vectors, cfg.target_units);
  const TrainingSchedule schedule = make_schedule(grid, cfg);

  Codebook cb;
  cb.word_id = word_id;
  cb.gender = g;
  cb.kind = k;
  cb.resample_points = resample_points;
  cb.features = feature_count(k);
  cb.protos = train(vectors, grid, schedule, seed);
  cb.provenance.writer_count = static_cast<int>(contributing.size());
  cb.provenance.stroke_count = static_cast<long>(vectors.size());
  cb.provenance.seed = seed;
  cb.provenance.schedule_digest = schedule_digest(cfg, schedule);
  return cb;
}

WordModel build_word_model(const Dataset& ds, const std::string& word_id,
                           int resample_points, const SomConfig& cfg, std::uint64_t seed) {
  WordModel model;
  model.word_id = word_id;
  for (const Gender g : {Gender::Male, Gender::Female}) {
    for (const StrokeKind k : {StrokeKind::PenDown, StrokeKind::PenUp}) {
      model.at(g, k) = build_codebook(ds, word_id, g, k, resample_points, cfg,
                                      derive_codebook_seed(seed, word_id, g, k));
    }
  }
  return model;
}

void save_codebook(const Codebook& cb, const std::filesystem::path& file) {
  for (const double w : cb.protos.weights)
    if (!std::isfinite(w)) throw InternalError("save_codebook: non-finite prototype");
  if (cb.protos.dim != cb.resample_points * cb.features)
    throw InternalError("save_codebook: dim != M*F");

  std::string out;
  out += kMagic;
  out += '\n';
  out += "word: " + cb.word_id + '\n';
  out += "gender: " + std::string(1, gender_code(cb.gender)) + '\n';
  out += "kind: " + std::string(kind_name(cb.kind)) + '\n';
  out += "M: " + std::to_string(cb.resample_points) + '\n';
  out += "F: " + std::to_string(cb.features) + '\n';
  out += "rows: " + std::to_string(cb.protos.grid.rows) + '\n';
  out += "cols: " + std::to_string(cb.protos.grid.cols) + '\n';
  out += "seed: " + std::to_string(cb.provenance.seed) + '\n';
  out += "writers: " + std::to_string(cb.provenance.writer_count) + '\n';
  out += "strokes: " + std::to_string(cb.provenance.stroke_count) + '\n';
  out += "schedule: " + cb.provenance.schedule_digest + '\n';
  for (int u = 0; u < cb.protos.grid.units(); ++u) {
    out += "proto:";
    for (const double w : cb.protos.prototype(u)) {
      out += ' ';
      out += fmt_double(w);
    }
    out += '\n';
  }
  char sum[32];
  std::snprintf(sum, sizeof sum, "%016" PRIx64, fnv1a64(out));
  out += "checksum: ";
  out += sum;
  out += '\n';

  std::filesystem::create_directories(file.parent_path().empty() ? "." : file.parent_path());
  std::ofstream f(file, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + file.string());
  f << out;
  if (!f) throw DataError("write failed for " + file.string());
}

Codebook load_codebook(const std::filesystem::path& file) {
  LineReader reader(read_file(file), file);

  const std::string magic = reader.next("magic line");
  if (magic != kMagic)
    throw DataError(file.string() + ": unsupported format/version '" + magic + "' (expected '" +
                    std::string(kMagic) + "')");

  Codebook cb;
  cb.word_id = expect_kv(reader.next("word"), "word", file);
  const std::string gender = expect_kv(reader.next("gender"), "gender", file);
  if (gender.size() != 1) throw DataError(file.string() + ": bad gender '" + gender + "'");
  cb.gender = gender_from_code(gender[0]);
  cb.kind = kind_from_name(expect_kv(reader.next("kind"), "kind", file));
  cb.resample_points = static_cast<int>(parse_long(expect_kv(reader.next("M"), "M", file), "M", file));
  cb.features = static_cast<int>(parse_long(expect_kv(reader.next("F"), "F", file), "F", file));
  cb.protos.grid.rows = static_cast<int>(parse_long(expect_kv(reader.next("rows"), "rows", file), "rows", file));
  cb.protos.grid.cols = static_cast<int>(parse_long(expect_kv(reader.next("cols"), "cols", file), "cols", file));
  {
    const std::string s = expect_kv(reader.next("seed"), "seed", file);
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
      throw DataError(file.string() + ": bad seed value '" + s + "'");
    cb.provenance.seed = v;
  }
  cb.provenance.writer_count =
      static_cast<int>(parse_long(expect_kv(reader.next("writers"), "writers", file), "writers", file));
  cb.provenance.stroke_count = parse_long(expect_kv(reader.next("strokes"), "strokes", file), "strokes", file);
  cb.provenance.schedule_digest = expect_kv(reader.next("schedule"), "schedule", file);

  if (cb.resample_points < 2 || cb.features < 1 || cb.protos.grid.rows < 1 || cb.protos.grid.cols < 1)
    throw DataError(file.string() + ": invalid header values");
  if (cb.features != feature_count(cb.kind))
    throw DataError(file.string() + ": F=" + std::to_string(cb.features) +
                    " inconsistent with kind " + std::string(kind_name(cb.kind)));

  cb.protos.dim = cb.resample_points * cb.features;
  const int units = cb.protos.grid.units();
  cb.protos.weights.reserve(static_cast<std::size_t>(units) * static_cast<std::size_t>(cb.protos.dim));
  for (int u = 0; u < units; ++u) {
    const std::string line = reader.next("prototype line");
    if (line.rfind("proto:", 0) != 0)
      throw DataError(file.string() + ": expected prototype line " + std::to_string(u));
    std::istringstream ss(line.substr(6));
    double v = 0.0;
    int count = 0;
    while (ss >> v) {
      cb.protos.weights.push_back(v);
      ++count;
    }
    if (count != cb.protos.dim)
      throw DataError(file.string() + ": prototype " + std::to_string(u) + " has " +
                      std::to_string(count) + " values, expected " + std::to_string(cb.protos.dim));
  }

  reader.mark();
  const std::string_view covered = reader.consumed_bytes_before_current();
  const std::string checksum_line = reader.next("checksum line");
  char expect[32];
  std::snprintf(expect, sizeof expect, "%016" PRIx64, fnv1a64(covered));
  if (expect_kv(checksum_line, "checksum", file) != expect)
    throw DataError(file.string() + ": checksum mismatch, file is corrupt");
  if (!reader.at_end()) throw DataError(file.string() + ": trailing content after checksum");

  for (const double w : cb.protos.weights)
    if (!std::isfinite(w)) throw DataError(file.string() + ": non-finite prototype value");
  return cb;
}

std::filesystem::path save_word_model(const WordModel& model,
                                      const std::filesystem::path& models_root) {
  const std::filesystem::path dir = models_root / model.word_id;
  std::filesystem::create_directories(dir);

  std::string digest;
  for (const Gender g : {Gender::Male, Gender::Female})
    for (const StrokeKind k : {StrokeKind::PenDown, StrokeKind::PenUp}) {
      const Codebook& cb = model.at(g, k);
      save_codebook(cb, dir / cb_filename(g, k));
      digest = cb.provenance.schedule_digest;  // identical across the four by construction
    }

  std::string idx;
  idx += kIndexMagic;
  idx += '\n';
  idx += "word: " + model.word_id + '\n';
  idx += "config: " + digest + '\n';
  for (const Gender g : {Gender::Male, Gender::Female})
    for (const StrokeKind k : {StrokeKind::PenDown, StrokeKind::PenUp})
      idx += cb_filename(g, k) + '\n';

  const std::filesystem::path index = dir / "index.txt";
  std::ofstream f(index, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + index.string());
  f << idx;
  return index;
}

WordModel load_word_model(const std::filesystem::path& index_or_dir) {
  namespace fs = std::filesystem;
  const fs::path index = fs::is_directory(index_or_dir) ? index_or_dir / "index.txt" : index_or_dir;
  LineReader reader(read_file(index), index);
  if (reader.next("magic line") != kIndexMagic)
    throw DataError(index.string() + ": not a model index file");

  WordModel model;
  model.word_id = expect_kv(reader.next("word"), "word", index);
  expect_kv(reader.next("config"), "config", index);
  const fs::path dir = index.parent_path();
  for (int i = 0; i < 4; ++i) {
    const std::string rel = reader.next("codebook path");
    Codebook cb = load_codebook(dir / rel);
    if (cb.word_id != model.word_id)
      throw DataError(index.string() + ": codebook " + rel + " belongs to word '" + cb.word_id + "'");
    model.at(cb.gender, cb.kind) = std::move(cb);
  }
  const int m = model.codebooks[0].resample_points;
  for (const Codebook& cb : model.codebooks)
    if (cb.resample_points != m)
      throw DataError(index.string() + ": codebooks disagree on resample length");
  return model;
}

std::vector<WordModel> load_all_models(const std::filesystem::path& models_root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(models_root))
    throw DataError("models root " + models_root.string() + " is not a directory");
  std::vector<fs::path> indices;
  for (const auto& entry : fs::directory_iterator(models_root))
    if (entry.is_directory() && fs::exists(entry.path() / "index.txt"))
      indices.push_back(entry.path() / "index.txt");
  std::sort(indices.begin(), indices.end());
  if (indices.empty()) throw DataError("no word models under " + models_root.string());

  std::vector<WordModel> models;
  models.reserve(indices.size());
  for (const auto& idx : indices) models.push_back(load_word_model(idx));
  return models;
}

}  // namespace strokecast
