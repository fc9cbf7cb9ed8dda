#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "strokecast/svc.hpp"

namespace strokecast {

// A maximal run of samples sharing one button status. [begin, end) indexes
// into the source recording; neighbours just outside the span differ in bs
// or fall off the sequence.
struct Stroke {
  StrokeKind kind = StrokeKind::PenDown;
  std::vector<PenSample> points;
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct DroppedRun {
  StrokeKind kind = StrokeKind::PenDown;
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct Segmentation {
  std::vector<Stroke> pen_down;
  std::vector<Stroke> pen_up;
  std::vector<DroppedRun> dropped;  // runs shorter than min_points
};

// Splits the recording into constant-bs runs, in temporal order. Runs with
// fewer than min_points samples are dropped but recorded, so emitted spans
// plus dropped spans always tile [0, N).
Segmentation segment(const WordRecording& rec, int min_points = 2);

// Selected channels of a stroke: {x, y, pr} for pen-down, {x, y} for pen-up.
std::vector<std::vector<double>> stroke_channels(const Stroke& s);

// Piecewise-linear resampling on the normalized sample-index axis; output
// point j sits at parameter j/(out_points-1). First and last input values
// are preserved exactly.
std::vector<double> resample_channel(std::span<const double> channel, int out_points);

std::vector<std::vector<double>> resample(const Stroke& s, int out_points);

// Zero-mean, unit population standard deviation. A constant channel maps to
// all zeros.
std::vector<double> normalize_channel(std::span<const double> channel);

struct FeatureStroke {
  StrokeKind kind = StrokeKind::PenDown;
  int points = 0;    // resample length M
  int features = 0;  // channels F: 3 pen-down, 2 pen-up
  std::vector<double> values;  // M*F, point-major

  bool operator==(const FeatureStroke&) const = default;
};

// Select channels, resample each to out_points, z-normalize each channel
// independently, flatten point-major. Channels carry equal weight.
FeatureStroke to_feature_stroke(const Stroke& s, int out_points);

std::vector<FeatureStroke> feature_strokes(const Segmentation& seg, StrokeKind kind,
                                           int out_points);

// Debug dump line: kind,M,F,v0,v1,... with 9 significant digits.
std::string dump_feature_stroke(const FeatureStroke& fs);

}  // namespace strokecast
