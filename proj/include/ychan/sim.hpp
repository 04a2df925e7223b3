#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ychan/allocator.hpp"
#include "ychan/phy.hpp"

namespace ychan {

struct SimConfig {
  int user_antennas = 3;   // M
  int relay_antennas = 3;  // N
  DofTuple dof;
  Mode mode = Mode::kJoint;
  std::vector<double> snr_grid_db;
  int trials_per_point = 200;
  std::uint64_t channel_seed = 1;
  std::uint64_t noise_seed = 2;
  Cancellation cancellation = Cancellation::kGenie;
  Constellation constellation = Constellation::kGaussian;
  Noise noise = Noise::kOn;
  PowerSplit power_split = PowerSplit::kUniform;
  // Independent channel realizations averaged per point (1 = one fixed set).
  int channel_draws = 1;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

// Throws InvalidInput for an unusable config. `min_points` is 2 for sweeps.
void validate(const SimConfig& cfg, std::size_t min_points = 1);

// Seed for (base, a, b, c) through a splitmix64 chain.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          std::uint64_t b = 0, std::uint64_t c = 0);

struct StreamSample {
  double sinr_db = 0.0;    // +inf when no error was observed
  double rate_bits = 0.0;  // log2(1 + SINR)
  std::optional<double> ser;  // QPSK only

  friend bool operator==(const StreamSample&, const StreamSample&) = default;
};

struct StreamInfo {
  Pair pair;
  Strategy strategy = Strategy::kUni;

  friend bool operator==(const StreamInfo&, const StreamInfo&) = default;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;

  friend bool operator==(const LineFit&, const LineFit&) = default;
};

/// Monte Carlo samples per (SNR point, stream) and, for noisy sweeps, the
/// high-SNR slope of each stream's rate against log2(rho).
struct SweepResult {
  std::vector<double> snr_db;
  std::vector<StreamInfo> streams;
  std::vector<std::vector<StreamSample>> samples;  // [point][stream]
  std::vector<double> sum_rate;                    // per point
  bool slopes_fitted = false;
  std::vector<LineFit> stream_fits;  // empty unless slopes_fitted
  LineFit sum_fit;
  double sum_dof = 0.0;  // sum of stream slopes

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

// Least squares over the upper ceil(n/2) points (at least two).
LineFit fit_top_half(const std::vector<double>& x, const std::vector<double>& y);

// Plans the demand, throws InfeasibleDemand if it does not fit the relay.
SubChannelPlan plan_for(const SimConfig& cfg);

// Samples every grid point without fitting slopes.
SweepResult simulate(const SimConfig& cfg);

// As simulate, plus slope fits (disabled and flagged in noiseless mode).
// Needs a strictly increasing grid with at least two points.
SweepResult run_sweep(const SimConfig& cfg);

struct SerTable {
  std::vector<double> snr_db;
  std::vector<StreamInfo> streams;
  std::vector<std::vector<double>> ser;  // [point][stream]
};

// QPSK with decision-directed cancellation.
SerTable run_ser(const SimConfig& cfg);

struct InseparabilityReport {
  int relay_antennas = 0;
  DofTuple tuple;
  PlanOutcome joint;
  PlanOutcome separable;

  bool inseparable() const { return joint.feasible() && !separable.feasible(); }
};

// Default witness (2,0,1,1,1,0) at N=3; for other N the tuple
// (N-1,0,1,N-2,N-2,0) is tried and must lie in the region.
InseparabilityReport inseparability_experiment(
    int relay_antennas, const std::optional<DofTuple>& tuple = std::nullopt);

}  // namespace ychan
