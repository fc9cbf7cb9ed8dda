#include "strokecast/som.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "strokecast/rng.hpp"

namespace strokecast {
namespace {

constexpr double kSqrt3Half = 0.86602540378443864676;

struct Pca {
  Eigen::VectorXd mean;
  double l1 = 0.0, l2 = 0.0;     // two leading covariance eigenvalues
  Eigen::VectorXd e1, e2;
};

Pca compute_pca(const std::vector<std::vector<double>>& data) {
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto d = static_cast<Eigen::Index>(data.front().size());
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = data[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];

  Pca pca;
  pca.mean = x.colwise().mean();
  pca.e1 = Eigen::VectorXd::Zero(d);
  pca.e2 = Eigen::VectorXd::Zero(d);
  if (n < 2) return pca;

  x.rowwise() -= pca.mean.transpose();
  const Eigen::MatrixXd cov = (x.adjoint() * x) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const auto& vals = es.eigenvalues();  // ascending
  const auto& vecs = es.eigenvectors();
  pca.l1 = std::max(vals(d - 1), 0.0);
  pca.e1 = vecs.col(d - 1);
  if (d >= 2) {
    pca.l2 = std::max(vals(d - 2), 0.0);
    pca.e2 = vecs.col(d - 2);
  }
  return pca;
}

void check_data(const std::vector<std::vector<double>>& data) {
  if (data.empty()) throw DataError("SOM: empty data");
  const std::size_t d = data.front().size();
  if (d == 0) throw DataError("SOM: zero-dimensional data");
  for (const auto& v : data)
    if (v.size() != d) throw DataError("SOM: mixed vector dimensions");
}

double interp(const SigmaRange& r, int e, int len) {
  if (len <= 1) return r.end;
  return r.start + (r.end - r.start) * (static_cast<double>(e) / static_cast<double>(len - 1));
}

double sqdist(const double* a, const double* b, int d) {
  double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
  int k = 0;
  for (; k + 4 <= d; k += 4) {
    const double t0 = a[k] - b[k];
    const double t1 = a[k + 1] - b[k + 1];
    const double t2 = a[k + 2] - b[k + 2];
    const double t3 = a[k + 3] - b[k + 3];
    acc0 += t0 * t0;
    acc1 += t1 * t1;
    acc2 += t2 * t2;
    acc3 += t3 * t3;
  }
  for (; k < d; ++k) {
    const double t = a[k] - b[k];
    acc0 += t * t;
  }
  return (acc0 + acc1) + (acc2 + acc3);
}

int nearest_unit(const double* x, const std::vector<double>& weights, int units, int d) {
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int u = 0; u < units; ++u) {
    const double d2 = sqdist(x, weights.data() + static_cast<std::size_t>(u) * static_cast<std::size_t>(d), d);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = u;
    }
  }
  return best;
}

// Squared hex-embedding distances for every unit pair.
std::vector<double> hex_distance_sq_table(const GridSpec& grid) {
  const int units = grid.units();
  std::vector<double> emb(static_cast<std::size_t>(units) * 2);
  for (int u = 0; u < units; ++u) {
    const int r = u / grid.cols;
    const int c = u % grid.cols;
    emb[static_cast<std::size_t>(u) * 2] = c + 0.5 * (r % 2);
    emb[static_cast<std::size_t>(u) * 2 + 1] = r * kSqrt3Half;
  }
  std::vector<double> d2(static_cast<std::size_t>(units) * static_cast<std::size_t>(units));
  for (int u = 0; u < units; ++u)
    for (int v = 0; v < units; ++v) {
      const double dx = emb[static_cast<std::size_t>(u) * 2] - emb[static_cast<std::size_t>(v) * 2];
      const double dy = emb[static_cast<std::size_t>(u) * 2 + 1] - emb[static_cast<std::size_t>(v) * 2 + 1];
      d2[static_cast<std::size_t>(u) * static_cast<std::size_t>(units) + static_cast<std::size_t>(v)] =
          dx * dx + dy * dy;
    }
  return d2;
}

std::vector<double> flatten(const std::vector<std::vector<double>>& data) {
  const std::size_t d = data.front().size();
  std::vector<double> x;
  x.reserve(data.size() * d);
  for (const auto& v : data) x.insert(x.end(), v.begin(), v.end());
  return x;
}

void batch_train(PrototypeSet& p, const std::vector<double>& x, std::size_t n,
                 const TrainingSchedule& schedule, const std::vector<double>& hex_d2) {
  const int units = p.grid.units();
  const int d = p.dim;
  std::vector<int> assign(n);
  std::vector<double> sums(static_cast<std::size_t>(units) * static_cast<std::size_t>(d));
  std::vector<double> counts(static_cast<std::size_t>(units));
  std::vector<double> next(p.weights.size());
  std::vector<int> occupied;
  occupied.reserve(static_cast<std::size_t>(units));

  for (int epoch = 0; epoch < schedule.total_epochs(); ++epoch) {
    const double sigma = sigma_at(schedule, epoch);
    const double inv = 1.0 / (2.0 * sigma * sigma);

    for (std::size_t i = 0; i < n; ++i)
      assign[i] = nearest_unit(x.data() + i * static_cast<std::size_t>(d), p.weights, units, d);

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(assign[i]);
      double* s = sums.data() + u * static_cast<std::size_t>(d);
      const double* xi = x.data() + i * static_cast<std::size_t>(d);
      for (int k = 0; k < d; ++k) s[k] += xi[k];
      counts[u] += 1.0;
    }

    occupied.clear();
    for (int u = 0; u < units; ++u)
      if (counts[static_cast<std::size_t>(u)] > 0.0) occupied.push_back(u);

    for (int u = 0; u < units; ++u) {
      double* out = next.data() + static_cast<std::size_t>(u) * static_cast<std::size_t>(d);
      std::fill(out, out + d, 0.0);
      double den = 0.0;
      const double* row = hex_d2.data() + static_cast<std::size_t>(u) * static_cast<std::size_t>(units);
      for (const int j : occupied) {
        const double w = std::exp(-row[j] * inv);
        den += w * counts[static_cast<std::size_t>(j)];
        const double* s = sums.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(d);
        for (int k = 0; k < d; ++k) out[k] += w * s[k];
      }
      // den > 0: Gaussian weights are strictly positive and some unit has mass
      const double inv_den = 1.0 / den;
      for (int k = 0; k < d; ++k) out[k] *= inv_den;
    }
    p.weights.swap(next);
  }
}

void sequential_train(PrototypeSet& p, const std::vector<double>& x, std::size_t n,
                      const TrainingSchedule& schedule, const std::vector<double>& hex_d2,
                      std::uint64_t seed) {
  const int units = p.grid.units();
  const int d = p.dim;
  Rng rng(mix_seed(seed, "som-seq-order"));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 0; epoch < schedule.total_epochs(); ++epoch) {
    const double sigma = sigma_at(schedule, epoch);
    const double alpha = alpha_at(schedule, epoch);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    rng.shuffle(order);
    for (const std::size_t i : order) {
      const double* xi = x.data() + i * static_cast<std::size_t>(d);
      const int b = nearest_unit(xi, p.weights, units, d);
      const double* row = hex_d2.data() + static_cast<std::size_t>(b) * static_cast<std::size_t>(units);
      for (int u = 0; u < units; ++u) {
        const double coef = alpha * std::exp(-row[u] * inv);
        double* m = p.weights.data() + static_cast<std::size_t>(u) * static_cast<std::size_t>(d);
        for (int k = 0; k < d; ++k) m[k] += coef * (xi[k] - m[k]);
      }
    }
  }
}

}  // namespace

TrainingSchedule default_schedule(const GridSpec& grid) {
  TrainingSchedule s;
  const double side = std::max(grid.rows, grid.cols);
  s.rough_sigma.end = std::max(side / 16.0, 1.0);
  s.rough_sigma.start = std::max(side / 4.0, s.rough_sigma.end);
  s.fine_sigma.start = s.rough_sigma.end;
  s.fine_sigma.end = 1.0;
  return s;
}

double sigma_at(const TrainingSchedule& s, int epoch) {
  if (epoch < 0 || epoch >= s.total_epochs()) throw InternalError("sigma_at: epoch out of range");
  if (epoch < s.rough_epochs) return interp(s.rough_sigma, epoch, s.rough_epochs);
  return interp(s.fine_sigma, epoch - s.rough_epochs, s.fine_epochs);
}

double alpha_at(const TrainingSchedule& s, int epoch) {
  if (epoch < 0 || epoch >= s.total_epochs()) throw InternalError("alpha_at: epoch out of range");
  if (epoch < s.rough_epochs) return interp(s.rough_alpha, epoch, s.rough_epochs);
  return interp(s.fine_alpha, epoch - s.rough_epochs, s.fine_epochs);
}

void validate_schedule(const TrainingSchedule& s) {
  if (s.rough_epochs < 0 || s.fine_epochs < 0 || s.total_epochs() < 1)
    throw ConfigError("schedule: epochs must be non-negative with at least one in total");
  for (const double v : {s.rough_sigma.start, s.rough_sigma.end, s.fine_sigma.start, s.fine_sigma.end})
    if (!(v > 0.0)) throw ConfigError("schedule: sigmas must be positive");
  const bool has_rough = s.rough_epochs > 0;
  const bool has_fine = s.fine_epochs > 0;
  if (has_rough && s.rough_sigma.start < s.rough_sigma.end)
    throw ConfigError("schedule: rough sigma must be non-increasing");
  if (has_fine && s.fine_sigma.start < s.fine_sigma.end)
    throw ConfigError("schedule: fine sigma must be non-increasing");
  if (has_rough && has_fine && s.rough_sigma.end < s.fine_sigma.start)
    throw ConfigError("schedule: sigma may not increase between phases");
  if (s.mode == TrainMode::Sequential) {
    for (const auto& a : {s.rough_alpha, s.fine_alpha}) {
      if (!(a.start > 0.0 && a.start <= 1.0 && a.end > 0.0 && a.end <= 1.0))
        throw ConfigError("schedule: alphas must lie in (0, 1]");
      if (a.start < a.end) throw ConfigError("schedule: alpha must be non-increasing");
    }
  }
}

GridSpec plan_grid(const std::vector<std::vector<double>>& data, int target_units) {
  if (target_units < 4) throw ConfigError("plan_grid: target_units must be >= 4");
  check_data(data);

  double ratio = 1.0;
  if (data.size() >= 2) {
    const Pca pca = compute_pca(data);
    if (pca.l1 > 0.0) {
      if (pca.l2 <= pca.l1 * 1e-12) {
        ratio = 5.0;  // effectively one-dimensional data
      } else {
        ratio = std::clamp(std::sqrt(pca.l1 / pca.l2), 1.0, 5.0);
      }
    }
  }

  const double ideal_rows = std::sqrt(static_cast<double>(target_units) * ratio);
  const double ideal_cols = std::sqrt(static_cast<double>(target_units) / ratio);

  const auto score = [&](int r, int c) {
    const double shape = std::abs(std::log(static_cast<double>(r) / c) - std::log(ratio));
    return std::tuple(std::abs(r * c - target_units), shape, r * c);
  };

  GridSpec best;
  bool found = false;
  const auto consider = [&](int r, int c) {
    r = std::max(r, 1);
    c = std::max(c, 1);
    if (!found || score(r, c) < score(best.rows, best.cols)) {
      best = {r, c};
      found = true;
    }
  };
  for (const int r : {static_cast<int>(std::floor(ideal_rows)), static_cast<int>(std::ceil(ideal_rows))})
    for (const int c : {static_cast<int>(std::floor(ideal_cols)), static_cast<int>(std::ceil(ideal_cols))})
      consider(r, c);

  // Rounding the ideal sides almost always lands within the +-20% unit
  // budget; widen the search for the rare small-target corner cases.
  if (std::abs(best.units() - target_units) > 0.2 * target_units) {
    const int r_lo = std::max(1, static_cast<int>(std::floor(ideal_rows)) - 2);
    const int r_hi = static_cast<int>(std::ceil(ideal_rows)) + 2;
    const int c_lo = std::max(1, static_cast<int>(std::floor(ideal_cols)) - 2);
    const int c_hi = static_cast<int>(std::ceil(ideal_cols)) + 2;
    for (int r = r_lo; r <= r_hi; ++r)
      for (int c = c_lo; c <= c_hi; ++c) consider(r, c);
  }
  return best;
}

double hex_distance(int u, int v, const GridSpec& grid) {
  if (u < 0 || v < 0 || u >= grid.units() || v >= grid.units())
    throw DataError("hex_distance: unit index out of range");
  const int ru = u / grid.cols, cu = u % grid.cols;
  const int rv = v / grid.cols, cv = v % grid.cols;
  const double dx = (cu + 0.5 * (ru % 2)) - (cv + 0.5 * (rv % 2));
  const double dy = (ru - rv) * kSqrt3Half;
  return std::sqrt(dx * dx + dy * dy);
}

PrototypeSet init_linear(const std::vector<std::vector<double>>& data,
                         const GridSpec& grid, std::uint64_t seed) {
  check_data(data);
  if (grid.rows < 1 || grid.cols < 1) throw ConfigError("init_linear: bad grid");
  const auto d = static_cast<Eigen::Index>(data.front().size());

  const Pca pca = compute_pca(data);
  const double sd1 = std::sqrt(pca.l1);
  const double sd2 = std::sqrt(pca.l2);
  const double scale_ref = sd1 > 0.0 ? sd1 : 1.0;
  const double noise_sd = 0.01 * scale_ref;
  const bool have1 = sd1 > 0.0;
  const bool have2 = d >= 2 && sd2 > sd1 * 1e-7;

  // The longer grid side follows the leading principal component.
  const bool rows_major = grid.rows >= grid.cols;

  PrototypeSet p;
  p.grid = grid;
  p.dim = static_cast<int>(d);
  p.weights.resize(static_cast<std::size_t>(grid.units()) * static_cast<std::size_t>(d));
  Rng rng(mix_seed(seed, "som-init-linear"));

  for (int r = 0; r < grid.rows; ++r) {
    const double coef_r = grid.rows > 1 ? 2.0 * r / (grid.rows - 1) - 1.0 : 0.0;
    for (int c = 0; c < grid.cols; ++c) {
      const double coef_c = grid.cols > 1 ? 2.0 * c / (grid.cols - 1) - 1.0 : 0.0;
      const double a = rows_major ? coef_r : coef_c;  // along e1
      const double b = rows_major ? coef_c : coef_r;  // along e2
      double* w = p.weights.data() +
                  (static_cast<std::size_t>(r) * static_cast<std::size_t>(grid.cols) +
                   static_cast<std::size_t>(c)) *
                      static_cast<std::size_t>(d);
      for (Eigen::Index k = 0; k < d; ++k) w[k] = pca.mean(k);
      if (have1) {
        for (Eigen::Index k = 0; k < d; ++k) w[k] += a * 2.0 * sd1 * pca.e1(k);
      } else if (a != 0.0) {
        for (Eigen::Index k = 0; k < d; ++k) w[k] += a * rng.normal(0.0, noise_sd);
      }
      if (have2) {
        for (Eigen::Index k = 0; k < d; ++k) w[k] += b * 2.0 * sd2 * pca.e2(k);
      } else if (b != 0.0) {
        for (Eigen::Index k = 0; k < d; ++k) w[k] += b * rng.normal(0.0, noise_sd);
      }
    }
  }
  return p;
}

PrototypeSet train(const std::vector<std::vector<double>>& data, const GridSpec& grid,
                   const TrainingSchedule& schedule, std::uint64_t seed) {
  validate_schedule(schedule);
  check_data(data);

  PrototypeSet p = init_linear(data, grid, seed);
  const std::vector<double> x = flatten(data);
  const std::vector<double> hex_d2 = hex_distance_sq_table(grid);

  if (schedule.mode == TrainMode::Batch)
    batch_train(p, x, data.size(), schedule, hex_d2);
  else
    sequential_train(p, x, data.size(), schedule, hex_d2, seed);

  for (const double w : p.weights)
    if (!std::isfinite(w)) throw InternalError("train: non-finite prototype");
  return p;
}

BmuResult bmu(const PrototypeSet& protos, std::span<const double> v) {
  if (static_cast<int>(v.size()) != protos.dim)
    throw DataError("bmu: vector dimension " + std::to_string(v.size()) +
                    " does not match prototype dimension " + std::to_string(protos.dim));
  const int u = nearest_unit(v.data(), protos.weights, protos.grid.units(), protos.dim);
  const double d2 = sqdist(v.data(),
                           protos.weights.data() + static_cast<std::size_t>(u) * static_cast<std::size_t>(protos.dim),
                           protos.dim);
  return {u, std::sqrt(d2)};
}

double quantization_error(const PrototypeSet& protos,
                          const std::vector<std::vector<double>>& data) {
  if (data.empty()) throw DataError("quantization_error: empty data");
  double sum = 0.0;
  for (const auto& v : data) sum += bmu(protos, v).distance;
  return sum / static_cast<double>(data.size());
}

}  // namespace strokecast
