#include "strokecast/classify.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

namespace strokecast {

std::string_view channel_name(Channel c) {
  switch (c) {
    case Channel::DownOnly: return "down";
    case Channel::UpOnly: return "up";
    default: return "combined";
  }
}

Channel channel_from_name(std::string_view s) {
  if (s == "down") return Channel::DownOnly;
  if (s == "up") return Channel::UpOnly;
  if (s == "combined") return Channel::Combined;
  throw ConfigError("unknown channel '" + std::string(s) + "' (down|up|combined)");
}

std::string_view fusion_name(FusionStrategy f) {
  switch (f) {
    case FusionStrategy::Sum: return "sum";
    case FusionStrategy::Average: return "average";
    case FusionStrategy::Max: return "max";
    default: return "min";
  }
}

FusionStrategy fusion_from_name(std::string_view s) {
  if (s == "sum") return FusionStrategy::Sum;
  if (s == "average" || s == "avg") return FusionStrategy::Average;
  if (s == "max") return FusionStrategy::Max;
  if (s == "min") return FusionStrategy::Min;
  throw ConfigError("unknown fusion strategy '" + std::string(s) + "' (sum|average|max|min)");
}

double word_distortion(const Codebook& cb, std::span<const FeatureStroke> strokes,
                       std::vector<std::string>* warnings) {
  if (strokes.empty()) {
    if (warnings)
      warnings->push_back("word '" + cb.word_id + "': no " + std::string(kind_name(cb.kind)) +
                          " strokes, distortion 0");
    return 0.0;
  }
  double sum = 0.0;
  for (const FeatureStroke& fs : strokes) {
    if (fs.kind != cb.kind)
      throw DataError("word_distortion: stroke kind does not match codebook kind");
    if (static_cast<int>(fs.values.size()) != cb.protos.dim)
      throw DataError("word_distortion: stroke dimension " + std::to_string(fs.values.size()) +
                      " != codebook dimension " + std::to_string(cb.protos.dim));
    sum += bmu(cb.protos, fs.values).distance;
  }
  return sum;
}

double fuse_sessions(std::span<const double> per_session, FusionStrategy strategy) {
  if (per_session.empty()) throw DataError("fuse_sessions: empty distortion list");
  switch (strategy) {
    case FusionStrategy::Sum: {
      double s = 0.0;
      for (const double v : per_session) s += v;
      return s;
    }
    case FusionStrategy::Average: {
      double s = 0.0;
      for (const double v : per_session) s += v;
      return s / static_cast<double>(per_session.size());
    }
    case FusionStrategy::Max:
      return *std::max_element(per_session.begin(), per_session.end());
    default:
      return *std::min_element(per_session.begin(), per_session.end());
  }
}

double combine_channels(double down, double up) { return down + up; }

double combine_words(std::span<const double> per_word) {
  if (per_word.empty()) throw DataError("combine_words: empty distortion list");
  double s = 0.0;
  for (const double v : per_word) s += v;
  return s;
}

Decision decide(double male_score, double female_score) {
  if (male_score < female_score) return Decision::Male;
  if (female_score < male_score) return Decision::Female;
  return Decision::Tie;
}

ClassificationResult classify_writer(std::span<const WordModel> models, const Dataset& ds,
                                     const std::string& writer_id, Channel channel,
                                     std::span<const std::string> words,
                                     FusionStrategy strategy,
                                     std::vector<DistortionRecord>* records) {
  if (!ds.writers.contains(writer_id)) throw DataError("writer '" + writer_id + "' not in dataset");
  if (words.empty()) throw ConfigError("classify_writer: no words requested");
  {
    std::set<std::string_view> uniq(words.begin(), words.end());
    if (uniq.size() != words.size()) throw ConfigError("classify_writer: duplicate words requested");
  }

  std::map<std::string_view, const WordModel*> by_word;
  for (const WordModel& m : models) by_word.emplace(m.word_id, &m);

  const bool want_down = channel != Channel::UpOnly;
  const bool want_up = channel != Channel::DownOnly;

  ClassificationResult res;
  res.writer_id = writer_id;
  res.channel = channel;
  res.words.assign(words.begin(), words.end());
  std::sort(res.words.begin(), res.words.end());

  // totals[gender][kind], accumulated word by word so that the Combined score
  // is exactly the DownOnly total plus the UpOnly total.
  double totals[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  long evidence[2] = {0, 0};

  for (const std::string& word : words) {
    const auto mit = by_word.find(word);
    if (mit == by_word.end()) throw DataError("no model for word '" + word + "'");
    const WordModel& model = *mit->second;

    const std::vector<int> sessions = ds.sessions_of(writer_id, word);
    if (sessions.empty())
      throw DataError("writer '" + writer_id + "' has no recording of word '" + word + "'");

    std::vector<double> session_dist[2][2];
    for (const int session : sessions) {
      const WordRecording* rec = ds.find(writer_id, session, word);
      const Segmentation seg = segment(*rec);
      for (const StrokeKind kind : {StrokeKind::PenDown, StrokeKind::PenUp}) {
        if (kind == StrokeKind::PenDown ? !want_down : !want_up) continue;
        const int ki = kind == StrokeKind::PenUp ? 1 : 0;
        const int m = model.at(Gender::Male, kind).resample_points;
        const std::vector<FeatureStroke> fs = feature_strokes(seg, kind, m);
        if (fs.empty())
          res.warnings.push_back("writer '" + writer_id + "' word '" + word + "' session " +
                                 std::to_string(session) + ": no " +
                                 std::string(kind_name(kind)) + " strokes, distortion 0");
        evidence[ki] += static_cast<long>(fs.size());
        for (const Gender g : {Gender::Male, Gender::Female}) {
          const int gi = g == Gender::Female ? 1 : 0;
          const double d = word_distortion(model.at(g, kind), fs);
          session_dist[gi][ki].push_back(d);
          if (records)
            records->push_back({writer_id, word, session, g, kind, d, static_cast<int>(fs.size())});
        }
      }
    }
    for (int gi = 0; gi < 2; ++gi)
      for (int ki = 0; ki < 2; ++ki)
        if (!session_dist[gi][ki].empty())
          totals[gi][ki] += fuse_sessions(session_dist[gi][ki], strategy);
  }

  if (want_down && !want_up && evidence[0] == 0)
    throw DataError("writer '" + writer_id + "': no pen-down strokes in any session (insufficient evidence)");
  if (want_up && !want_down && evidence[1] == 0)
    throw DataError("writer '" + writer_id + "': no pen-up strokes in any session (insufficient evidence)");
  if (want_down && want_up && evidence[0] == 0 && evidence[1] == 0)
    throw DataError("writer '" + writer_id + "': no strokes in any session (insufficient evidence)");

  switch (channel) {
    case Channel::DownOnly:
      res.male_score = totals[0][0];
      res.female_score = totals[1][0];
      break;
    case Channel::UpOnly:
      res.male_score = totals[0][1];
      res.female_score = totals[1][1];
      break;
    default:
      res.male_score = combine_channels(totals[0][0], totals[0][1]);
      res.female_score = combine_channels(totals[1][0], totals[1][1]);
      break;
  }
  res.decision = decide(res.male_score, res.female_score);
  return res;
}

std::string classification_csv_header() {
  return "writer_id,channel,words,male_score,female_score,decision,true_gender";
}

std::string classification_csv_row(const ClassificationResult& r, Gender true_gender) {
  std::string words;
  for (const auto& w : r.words) {
    if (!words.empty()) words += ';';
    words += w;
  }
  char buf[64];
  std::string row = r.writer_id + ',' + std::string(channel_name(r.channel)) + ',' + words;
  std::snprintf(buf, sizeof buf, ",%.12g,%.12g,", r.male_score, r.female_score);
  row += buf;
  row += decision_name(r.decision);
  row += ',';
  row += gender_code(true_gender);
  return row;
}

}  // namespace strokecast
