#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "strokecast/common.hpp"

namespace strokecast {

// Sheet-shaped lattice with hexagonal neighbourhood topology. Unit u lives at
// row u / cols, column u % cols.
struct GridSpec {
  int rows = 1;
  int cols = 1;

  int units() const { return rows * cols; }
  bool operator==(const GridSpec&) const = default;
};

struct SigmaRange {
  double start = 0.0;
  double end = 0.0;
};

enum class TrainMode : std::uint8_t { Batch, Sequential };

// Two-phase schedule: a rough phase with a wide neighbourhood followed by a
// long fine phase that narrows it. Sigma interpolates linearly inside each
// phase (in hex grid-distance units). Alphas apply to Sequential mode only.
struct TrainingSchedule {
  int rough_epochs = 40;
  int fine_epochs = 200;
  SigmaRange rough_sigma{2.5, 1.0};
  SigmaRange fine_sigma{1.0, 1.0};
  TrainMode mode = TrainMode::Batch;
  SigmaRange rough_alpha{0.5, 0.05};
  SigmaRange fine_alpha{0.05, 0.01};

  int total_epochs() const { return rough_epochs + fine_epochs; }
};

// Grid-derived defaults: rough sigma max(rows,cols)/4 -> max(rows,cols)/16
// (clamped to at least 1), fine sigma continues from there down to 1.
TrainingSchedule default_schedule(const GridSpec& grid);

double sigma_at(const TrainingSchedule& s, int epoch);
double alpha_at(const TrainingSchedule& s, int epoch);

// Throws ConfigError unless epochs are positive, sigmas positive and
// non-increasing across the whole run, and alphas in (0, 1].
void validate_schedule(const TrainingSchedule& s);

struct PrototypeSet {
  GridSpec grid;
  int dim = 0;
  std::vector<double> weights;  // units * dim, unit-major

  std::span<const double> prototype(int unit) const {
    return {weights.data() + static_cast<std::size_t>(unit) * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
};

// Picks rows x cols near target_units with the side ratio matching
// sqrt(lambda1/lambda2) of the two leading data-covariance eigenvalues,
// clamped to [1, 5]. Degenerate data falls back to a square grid. The
// resulting unit count stays within +-20% of the target.
GridSpec plan_grid(const std::vector<std::vector<double>>& data, int target_units = 150);

// Euclidean distance between hex embeddings (r,c) -> (c + 0.5*(r&1), r*sqrt(3)/2).
double hex_distance(int u, int v, const GridSpec& grid);

// Prototypes span the plane of the two leading principal components, grid
// coordinates mapped to [-2*sigma, +2*sigma] along each. Directions missing
// from rank-deficient data are filled with small seeded noise.
PrototypeSet init_linear(const std::vector<std::vector<double>>& data,
                         const GridSpec& grid, std::uint64_t seed);

// Batch mode: per epoch, assign every sample to its best-matching unit, then
// move each prototype to the Gaussian-neighbourhood-weighted mean of the
// assigned masses. No learning rate; order-independent; bit-deterministic.
// Sequential mode: per-sample updates m += alpha*h*(x-m) with a seeded
// shuffle per epoch. Runtime is linear in samples and epochs.
PrototypeSet train(const std::vector<std::vector<double>>& data, const GridSpec& grid,
                   const TrainingSchedule& schedule, std::uint64_t seed);

struct BmuResult {
  int unit = 0;
  double distance = 0.0;
};

// Nearest prototype by Euclidean distance; ties break to the lowest index.
BmuResult bmu(const PrototypeSet& protos, std::span<const double> v);

// Mean BMU distance over the data.
double quantization_error(const PrototypeSet& protos,
                          const std::vector<std::vector<double>>& data);

}  // namespace strokecast
