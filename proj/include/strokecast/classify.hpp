#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "strokecast/model.hpp"
#include "strokecast/stroke.hpp"
#include "strokecast/svc.hpp"

namespace strokecast {

enum class Channel : std::uint8_t { DownOnly, UpOnly, Combined };
enum class FusionStrategy : std::uint8_t { Sum, Average, Max, Min };

std::string_view channel_name(Channel c);
Channel channel_from_name(std::string_view s);
std::string_view fusion_name(FusionStrategy f);
FusionStrategy fusion_from_name(std::string_view s);

struct DistortionRecord {
  std::string writer_id;
  std::string word_id;
  int session_id = 0;
  Gender gender = Gender::Male;
  StrokeKind kind = StrokeKind::PenDown;
  double distortion = 0.0;
  int stroke_count = 0;
};

struct ClassificationResult {
  std::string writer_id;
  Channel channel = Channel::DownOnly;
  std::vector<std::string> words;
  double male_score = 0.0;
  double female_score = 0.0;
  Decision decision = Decision::Tie;
  std::vector<std::string> warnings;
};

struct LabelledResult {
  ClassificationResult result;
  Gender true_gender = Gender::Male;
};

// Sum of best-matching-unit distances of the strokes in the codebook. An
// empty stroke list yields 0 and, when a sink is given, a warning.
double word_distortion(const Codebook& cb, std::span<const FeatureStroke> strokes,
                       std::vector<std::string>* warnings = nullptr);

// Reduce the per-session distortions of one (writer, word, codebook) into a
// single measure.
double fuse_sessions(std::span<const double> per_session, FusionStrategy strategy);

// Non-weighted sum of the two stroke-channel distortions.
double combine_channels(double down, double up);

// Non-weighted sum across words.
double combine_words(std::span<const double> per_word);

// Smaller distortion wins; exact equality is a Tie.
Decision decide(double male_score, double female_score);

// Full per-writer pipeline: per word and session, quantize the writer's
// strokes with both genders' codebooks; fuse sessions; combine channels and
// words; pick the gender with the smaller total distortion. The dataset must
// contain the same words the models were built from. Words with no strokes of
// a requested kind contribute 0 with a warning; a channel whose evidence is
// empty across all words and sessions is an error.
ClassificationResult classify_writer(std::span<const WordModel> models, const Dataset& ds,
                                     const std::string& writer_id, Channel channel,
                                     std::span<const std::string> words,
                                     FusionStrategy strategy,
                                     std::vector<DistortionRecord>* records = nullptr);

std::string classification_csv_header();
std::string classification_csv_row(const ClassificationResult& r, Gender true_gender);

}  // namespace strokecast
