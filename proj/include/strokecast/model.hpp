#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "strokecast/som.hpp"
#include "strokecast/svc.hpp"

namespace strokecast {

struct SomConfig {
  int target_units = 150;
  int rough_epochs = 40;
  int fine_epochs = 200;
  TrainMode mode = TrainMode::Batch;
};

struct Provenance {
  int writer_count = 0;
  long stroke_count = 0;
  std::uint64_t seed = 0;
  std::string schedule_digest;

  bool operator==(const Provenance&) const = default;
};

// A trained prototype set for one (word, gender, stroke kind) triple.
struct Codebook {
  std::string word_id;
  Gender gender = Gender::Male;
  StrokeKind kind = StrokeKind::PenDown;
  int resample_points = 0;  // M
  int features = 0;         // F; protos.dim == M*F
  PrototypeSet protos;
  Provenance provenance;

  bool operator==(const Codebook&) const = default;
};

// The four codebooks of one word: {male, female} x {pen-down, pen-up}.
struct WordModel {
  std::string word_id;
  std::array<Codebook, 4> codebooks;

  static int slot(Gender g, StrokeKind k) {
    return (g == Gender::Female ? 2 : 0) + (k == StrokeKind::PenUp ? 1 : 0);
  }
  const Codebook& at(Gender g, StrokeKind k) const { return codebooks[static_cast<std::size_t>(slot(g, k))]; }
  Codebook& at(Gender g, StrokeKind k) { return codebooks[static_cast<std::size_t>(slot(g, k))]; }

  bool operator==(const WordModel&) const = default;
};

std::uint64_t derive_codebook_seed(std::uint64_t seed, const std::string& word_id,
                                   Gender g, StrokeKind k);

// Pools strokes of the requested kind from every session of every writer of
// the requested gender, featurizes them, sizes the grid and trains the map.
// Deterministic given (dataset, arguments, seed).
Codebook build_codebook(const Dataset& ds, const std::string& word_id, Gender g,
                        StrokeKind k, int resample_points, const SomConfig& cfg,
                        std::uint64_t seed);

WordModel build_word_model(const Dataset& ds, const std::string& word_id,
                           int resample_points, const SomConfig& cfg, std::uint64_t seed);

// Versioned text format: "STROKECAST-CB v1" magic, key:value header lines,
// one prototype per line at 17 significant digits, and a final FNV-1a
// checksum over everything above it. load(save(cb)) == cb bit-exactly.
void save_codebook(const Codebook& cb, const std::filesystem::path& file);
Codebook load_codebook(const std::filesystem::path& file);

// Writes models_root/<word>/{M,F}-{down,up}.cb plus an index file naming the
// four codebooks and the shared config digest; returns the index path.
std::filesystem::path save_word_model(const WordModel& model,
                                      const std::filesystem::path& models_root);

// Accepts the index file or the word directory containing it.
WordModel load_word_model(const std::filesystem::path& index_or_dir);

// All word models under a models root (directories with an index file).
std::vector<WordModel> load_all_models(const std::filesystem::path& models_root);

}  // namespace strokecast
