#include "strokecast/stroke.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace strokecast {

Segmentation segment(const WordRecording& rec, int min_points) {
  if (rec.samples.empty()) throw DataError("cannot segment an empty recording");
  if (min_points < 2) throw DataError("min_points must be >= 2");

  Segmentation out;
  const auto& samples = rec.samples;
  std::size_t run_start = 0;
  for (std::size_t i = 1; i <= samples.size(); ++i) {
    if (i < samples.size() && samples[i].bs == samples[run_start].bs) continue;
    const StrokeKind kind =
        samples[run_start].bs == 1 ? StrokeKind::PenDown : StrokeKind::PenUp;
    if (i - run_start >= static_cast<std::size_t>(min_points)) {
      Stroke s;
      s.kind = kind;
      s.begin = run_start;
      s.end = i;
      s.points.assign(samples.begin() + static_cast<std::ptrdiff_t>(run_start),
                      samples.begin() + static_cast<std::ptrdiff_t>(i));
      (kind == StrokeKind::PenDown ? out.pen_down : out.pen_up).push_back(std::move(s));
    } else {
      out.dropped.push_back({kind, run_start, i});
    }
    run_start = i;
  }
  return out;
}

std::vector<std::vector<double>> stroke_channels(const Stroke& s) {
  std::vector<std::vector<double>> channels;
  const int f = feature_count(s.kind);
  channels.resize(static_cast<std::size_t>(f));
  for (auto& c : channels) c.reserve(s.points.size());
  for (const PenSample& p : s.points) {
    channels[0].push_back(static_cast<double>(p.x));
    channels[1].push_back(static_cast<double>(p.y));
    if (f == 3) channels[2].push_back(static_cast<double>(p.pr));
  }
  return channels;
}

std::vector<double> resample_channel(std::span<const double> channel, int out_points) {
  if (out_points < 2) throw DataError("resample length must be >= 2");
  const std::size_t n = channel.size();
  if (n < 2) throw DataError("cannot resample a channel with fewer than 2 points");

  std::vector<double> out(static_cast<std::size_t>(out_points));
  for (int j = 0; j < out_points; ++j) {
    // t = j*(n-1)/(M-1); exact at both ends and whenever n == M.
    const double t = static_cast<double>(j) * static_cast<double>(n - 1) /
                     static_cast<double>(out_points - 1);
    const auto i = static_cast<std::size_t>(t);
    if (i >= n - 1) {
      out[static_cast<std::size_t>(j)] = channel[n - 1];
      continue;
    }
    const double frac = t - static_cast<double>(i);
    out[static_cast<std::size_t>(j)] = channel[i] * (1.0 - frac) + channel[i + 1] * frac;
  }
  return out;
}

std::vector<std::vector<double>> resample(const Stroke& s, int out_points) {
  auto channels = stroke_channels(s);
  for (auto& c : channels) c = resample_channel(c, out_points);
  return channels;
}

std::vector<double> normalize_channel(std::span<const double> channel) {
  if (channel.empty()) throw DataError("cannot normalize an empty channel");
  const auto [mn, mx] = std::minmax_element(channel.begin(), channel.end());
  if (*mn == *mx) return std::vector<double>(channel.size(), 0.0);

  double mean = 0.0;
  for (double v : channel) mean += v;
  mean /= static_cast<double>(channel.size());
  double var = 0.0;
  for (double v : channel) var += (v - mean) * (v - mean);
  var /= static_cast<double>(channel.size());  // population variance
  const double inv_sd = 1.0 / std::sqrt(var);

  std::vector<double> out(channel.size());
  for (std::size_t i = 0; i < channel.size(); ++i) out[i] = (channel[i] - mean) * inv_sd;
  return out;
}

FeatureStroke to_feature_stroke(const Stroke& s, int out_points) {
  auto channels = resample(s, out_points);
  for (auto& c : channels) c = normalize_channel(c);

  FeatureStroke fs;
  fs.kind = s.kind;
  fs.points = out_points;
  fs.features = static_cast<int>(channels.size());
  fs.values.resize(static_cast<std::size_t>(out_points) * channels.size());
  for (int j = 0; j < out_points; ++j)
    for (std::size_t f = 0; f < channels.size(); ++f)
      fs.values[static_cast<std::size_t>(j) * channels.size() + f] =
          channels[f][static_cast<std::size_t>(j)];
  return fs;
}

std::vector<FeatureStroke> feature_strokes(const Segmentation& seg, StrokeKind kind,
                                           int out_points) {
  const auto& strokes = kind == StrokeKind::PenDown ? seg.pen_down : seg.pen_up;
  std::vector<FeatureStroke> out;
  out.reserve(strokes.size());
  for (const Stroke& s : strokes) out.push_back(to_feature_stroke(s, out_points));
  return out;
}

std::string dump_feature_stroke(const FeatureStroke& fs) {
  std::string line(kind_name(fs.kind));
  line += ',';
  line += std::to_string(fs.points);
  line += ',';
  line += std::to_string(fs.features);
  char buf[40];
  for (double v : fs.values) {
    std::snprintf(buf, sizeof buf, ",%.9g", v);
    line += buf;
  }
  return line;
}

}  // namespace strokecast
