#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ychan/allocator.hpp"

namespace ychan {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Rng = std::mt19937_64;

inline constexpr double kConditionLimit = 1e8;

/// Static uplink/downlink channels of the three users.
struct ChannelSet {
  int user_antennas = 0;   // M
  int relay_antennas = 0;  // N
  std::array<CMatrix, 3> uplink;    // H_i, N x M
  std::array<CMatrix, 3> downlink;  // D_i, M x N
};

// Throws UnsupportedRegime for N > M, InvalidInput for bad shapes and
// NearSingular when a Gram matrix fails the 1e8 condition guard.
void validate_channels(const ChannelSet& ch);

// i.i.d. CN(0,1) entries, redrawn from the same stream until the condition
// guard passes.
ChannelSet sample_channels(int user_antennas, int relay_antennas,
                           std::uint64_t seed);

// Same but with every matrix set to the (rectangular) identity.
ChannelSet identity_channels(int user_antennas, int relay_antennas);

enum class PowerSplit {
  kUniform,     // every slot of a_i carries rho/N
  kActiveOnly,  // user power concentrated on the slots it actually uses
};

/// Zero-forcing coders plus per-sub-channel relay gains for one plan.
struct CoderSet {
  double rho = 0.0;
  std::array<CMatrix, 3> precoder;   // V_i, M x N
  std::array<CMatrix, 3> postcoder;  // U_i, N x M
  std::array<double, 3> alpha{};
  std::array<double, 3> symbol_var{};  // per-slot symbol variance of user i
  Eigen::VectorXd relay_gain;          // gamma_s; zero on idle sub-channels
  std::array<Eigen::VectorXd, 3> post_noise_var;  // ||row s of U_i||^2
};

CoderSet build_coders(const ChannelSet& ch, double rho,
                      const SubChannelPlan& plan,
                      PowerSplit split = PowerSplit::kUniform);

enum class Strategy { kBiDir, kCyclic, kUni };

std::string to_string(Strategy s);

/// One demanded symbol stream of a plan: which entry carries it and which
/// payload slot of that entry it is.
struct Stream {
  Pair pair;
  Strategy strategy = Strategy::kUni;
  std::size_t entry = 0;
  std::size_t slot = 0;
};

// Order: plan entries in order; BiDir (i->j, j->i), Cyclic (i->j, j->k, k->i).
std::vector<Stream> list_streams(const SubChannelPlan& plan);

/// Payload symbols per plan entry: BiDir (u_ij, u_ji), Cyclic
/// (v_ij, v_jk, v_ki), Uni (w_ij).
struct StreamSymbols {
  std::vector<std::vector<cd>> entries;
};

enum class Constellation { kGaussian, kQpsk };

std::string to_string(Constellation c);
Constellation parse_constellation(const std::string& s);

// Nearest QPSK point for a constellation of per-symbol variance `var`.
cd qpsk_decide(cd x, double var);

StreamSymbols draw_symbols(const SubChannelPlan& plan, const CoderSet& coders,
                           Constellation constellation, Rng& rng);

StreamSymbols zero_symbols(const SubChannelPlan& plan);

enum class Noise { kOff, kOn };

// a_i for every user, built from the plan entries.
std::array<CVector, 3> slot_vectors(const SubChannelPlan& plan,
                                    const StreamSymbols& symbols, int n);

// x_i = V_i a_i.
std::array<CVector, 3> transmit_vectors(const CoderSet& coders,
                                        const SubChannelPlan& plan,
                                        const StreamSymbols& symbols);

// y_r = sum_i H_i x_i + z_r.
CVector uplink(const ChannelSet& ch, const CoderSet& coders,
               const SubChannelPlan& plan, const StreamSymbols& symbols,
               Noise noise, Rng& rng);

// x_{r,s} = gamma_s y_{r,s} on active sub-channels, 0 elsewhere.
CVector relay_forward(const CVector& y_r, const CoderSet& coders,
                      const SubChannelPlan& plan);

enum class Cancellation { kGenie, kDecisionDirected };

std::string to_string(Cancellation c);
Cancellation parse_cancellation(const std::string& s);

struct DecodeOptions {
  Cancellation cancellation = Cancellation::kGenie;
  Constellation constellation = Constellation::kGaussian;
  // Remove the first decoded cyclic symbol before decoding the second.
  bool successive_cyclic = true;
};

struct StreamOutcome {
  Stream stream;
  cd sent;
  cd estimate;     // soft estimate after cancellation and scaling
  cd decision;     // hard decision (QPSK) or the soft estimate (Gaussian)
  bool exact = false;  // |estimate - sent| <= 1e-6 * |sent|
  double signal_power = 0.0;
  double error_power = 0.0;

  // Undefined for an all-zero symbol.
  std::optional<double> sinr() const;
};

struct RoundResult {
  std::vector<StreamOutcome> streams;
};

// Post-codes every user's downlink observation and recovers its desired
// symbols. `self_info` must hold the symbols of every entry in the plan.
RoundResult downlink_decode(const ChannelSet& ch, const CoderSet& coders,
                            const SubChannelPlan& plan, const CVector& x_r,
                            const StreamSymbols& self_info, Noise noise,
                            Rng& rng, const DecodeOptions& options = {});

// uplink -> relay_forward -> downlink_decode with one noise stream.
RoundResult run_round(const ChannelSet& ch, const CoderSet& coders,
                      const SubChannelPlan& plan, const StreamSymbols& symbols,
                      Noise noise, Rng& rng, const DecodeOptions& options = {});

}  // namespace ychan
