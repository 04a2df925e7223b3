#include "ychan/phy.hpp"

#include <cmath>
#include <algorithm>
#include <limits>

#include "ychan/error.hpp"
#include "ychan/zero_forcing.hpp"

namespace ychan {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

cd complex_gaussian(Rng& rng, double var) {
  std::normal_distribution<double> g(0.0, std::sqrt(var / 2.0));
  const double re = g(rng);
  const double im = g(rng);
  return {re, im};
}

CMatrix gaussian_matrix(Rng& rng, int rows, int cols) {
  CMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = complex_gaussian(rng, 1.0);
  }
  return m;
}

std::string user_label(int i) { return "user " + std::to_string(i + 1); }

// Gram-matrix condition numbers of user i; first uplink, then downlink.
std::array<double, 2> gram_conditions(const ChannelSet& ch, int i) {
  const CMatrix& h = ch.uplink[i];
  const CMatrix& d = ch.downlink[i];
  return {hpd_condition_number(h * h.adjoint()),
          hpd_condition_number(d.adjoint() * d)};
}

bool passes_guard(const ChannelSet& ch) {
  for (int i = 0; i < kUsers; ++i) {
    for (double c : gram_conditions(ch, i)) {
      if (!(c <= kConditionLimit)) return false;
    }
  }
  return true;
}

void check_regime(int user_antennas, int relay_antennas) {
  if (user_antennas < 1 || relay_antennas < 1) {
    throw InvalidInput("antenna counts must be >= 1 (M=" +
                       std::to_string(user_antennas) +
                       ", N=" + std::to_string(relay_antennas) + ")");
  }
  if (relay_antennas > user_antennas) {
    throw UnsupportedRegime(
        "zero-forcing diagonalization needs N <= M; got M=" +
        std::to_string(user_antennas) + ", N=" + std::to_string(relay_antennas));
  }
}

// Unit-variance symbol footprints: for every symbol user i sends, the set of
// sub-channels it occupies (a cyclic relay symbol occupies two).
std::array<std::vector<std::vector<int>>, 3> symbol_footprints(
    const SubChannelPlan& plan) {
  std::array<std::vector<std::vector<int>>, 3> out;
  for (const auto& e : plan.entries) {
    std::visit(Overloaded{
                   [&](const BiDir& b) {
                     out[b.pair.src - 1].push_back({b.sub});
                     out[b.pair.dst - 1].push_back({b.sub});
                   },
                   [&](const Cyclic& c) {
                     out[c.cycle[0] - 1].push_back({c.subs[0]});
                     out[c.cycle[1] - 1].push_back({c.subs[0], c.subs[1]});
                     out[c.cycle[2] - 1].push_back({c.subs[1]});
                   },
                   [&](const Uni& u) { out[u.pair.src - 1].push_back({u.sub}); },
               },
               e);
  }
  return out;
}

std::size_t payload_size(const PlanEntry& e) {
  return std::visit(Overloaded{
                        [](const BiDir&) -> std::size_t { return 2; },
                        [](const Cyclic&) -> std::size_t { return 3; },
                        [](const Uni&) -> std::size_t { return 1; },
                    },
                    e);
}

// Source user of payload slot `slot` of entry e.
int payload_source(const PlanEntry& e, std::size_t slot) {
  return std::visit(Overloaded{
                        [&](const BiDir& b) {
                          return slot == 0 ? b.pair.src : b.pair.dst;
                        },
                        [&](const Cyclic& c) { return c.cycle[slot]; },
                        [](const Uni& u) { return u.pair.src; },
                    },
                    e);
}

void check_symbols(const SubChannelPlan& plan, const StreamSymbols& symbols) {
  if (symbols.entries.size() != plan.entries.size()) {
    throw ContractError("symbol set has " +
                        std::to_string(symbols.entries.size()) +
                        " entries, plan has " +
                        std::to_string(plan.entries.size()));
  }
  for (std::size_t k = 0; k < plan.entries.size(); ++k) {
    if (symbols.entries[k].size() != payload_size(plan.entries[k])) {
      throw ContractError("plan entry " + std::to_string(k) + " expects " +
                          std::to_string(payload_size(plan.entries[k])) +
                          " symbols, got " +
                          std::to_string(symbols.entries[k].size()));
    }
  }
}

void check_plan_fits(const SubChannelPlan& plan, int n) {
  if (plan.total_subchannels > n) {
    throw ContractError("plan uses " + std::to_string(plan.total_subchannels) +
                        " sub-channels, relay has " + std::to_string(n));
  }
}

CVector noise_vector(Rng& rng, Eigen::Index n) {
  CVector z(n);
  for (Eigen::Index k = 0; k < n; ++k) z(k) = complex_gaussian(rng, 1.0);
  return z;
}

}  // namespace

void validate_channels(const ChannelSet& ch) {
  check_regime(ch.user_antennas, ch.relay_antennas);
  for (int i = 0; i < kUsers; ++i) {
    if (ch.uplink[i].rows() != ch.relay_antennas ||
        ch.uplink[i].cols() != ch.user_antennas ||
        ch.downlink[i].rows() != ch.user_antennas ||
        ch.downlink[i].cols() != ch.relay_antennas) {
      throw InvalidInput("channel matrices of " + user_label(i) +
                         " do not match M=" + std::to_string(ch.user_antennas) +
                         ", N=" + std::to_string(ch.relay_antennas));
    }
    const auto cond = gram_conditions(ch, i);
    if (!(cond[0] <= kConditionLimit) || !(cond[1] <= kConditionLimit)) {
      throw NearSingular("Gram matrix of " + user_label(i) +
                         " is near-singular (condition numbers " +
                         std::to_string(cond[0]) + ", " +
                         std::to_string(cond[1]) + ")");
    }
  }
}

ChannelSet sample_channels(int user_antennas, int relay_antennas,
                           std::uint64_t seed) {
  check_regime(user_antennas, relay_antennas);
  Rng rng(seed);
  constexpr int kMaxAttempts = 1000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    ChannelSet ch;
    ch.user_antennas = user_antennas;
    ch.relay_antennas = relay_antennas;
    for (auto& h : ch.uplink) {
      h = gaussian_matrix(rng, relay_antennas, user_antennas);
    }
    for (auto& d : ch.downlink) {
      d = gaussian_matrix(rng, user_antennas, relay_antennas);
    }
    if (passes_guard(ch)) return ch;
  }
  throw NearSingular("no well-conditioned channel draw after 1000 attempts");
}

ChannelSet identity_channels(int user_antennas, int relay_antennas) {
  check_regime(user_antennas, relay_antennas);
  ChannelSet ch;
  ch.user_antennas = user_antennas;
  ch.relay_antennas = relay_antennas;
  for (auto& h : ch.uplink) {
    h = CMatrix::Identity(relay_antennas, user_antennas);
  }
  for (auto& d : ch.downlink) {
    d = CMatrix::Identity(user_antennas, relay_antennas);
  }
  return ch;
}

CoderSet build_coders(const ChannelSet& ch, double rho,
                      const SubChannelPlan& plan, PowerSplit split) {
  validate_channels(ch);
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw InvalidInput("transmit power must be positive and finite");
  }
  const int n = ch.relay_antennas;
  check_plan_fits(plan, n);

  CoderSet cs;
  cs.rho = rho;
  for (int i = 0; i < kUsers; ++i) {
    auto pre = zf_precoder(ch.uplink[i]);
    auto post = zf_postcoder(ch.downlink[i]);
    cs.precoder[i] = std::move(pre.matrix);
    cs.alpha[i] = pre.alpha;
    cs.postcoder[i] = std::move(post.matrix);
    cs.post_noise_var[i] = cs.postcoder[i].rowwise().squaredNorm();
  }

  // Per-slot symbol variance. The uniform split gives rho/N per slot and
  // only backs off when a symbol repeated over two slots would push the
  // transmit power past rho.
  const auto footprints = symbol_footprints(plan);
  for (int i = 0; i < kUsers; ++i) {
    double unit_power = 0.0;  // tr(V S V^H) for unit-variance symbols
    for (const auto& subs : footprints[i]) {
      CVector col = CVector::Zero(cs.precoder[i].rows());
      for (int s : subs) col += cs.precoder[i].col(s);
      unit_power += col.squaredNorm();
    }
    const double cap = unit_power > 0.0 ? rho / unit_power
                                        : std::numeric_limits<double>::infinity();
    cs.symbol_var[i] =
        split == PowerSplit::kUniform ? std::min(rho / n, cap)
                                      : (unit_power > 0.0 ? cap : rho / n);
  }

  // Expected |L_s|^2 on every sub-channel, then a uniform relay power split
  // over the active ones (unit-variance relay noise included).
  Eigen::VectorXd load = Eigen::VectorXd::Zero(n);
  std::vector<bool> active(n, false);
  for (int i = 0; i < kUsers; ++i) {
    for (const auto& subs : footprints[i]) {
      for (int s : subs) {
        load(s) += cs.alpha[i] * cs.alpha[i] * cs.symbol_var[i];
        active[s] = true;
      }
    }
  }
  const auto n_active = std::count(active.begin(), active.end(), true);
  cs.relay_gain = Eigen::VectorXd::Zero(n);
  for (int s = 0; s < n; ++s) {
    if (active[s]) {
      cs.relay_gain(s) =
          std::sqrt(rho / static_cast<double>(n_active) / (load(s) + 1.0));
    }
  }
  return cs;
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kBiDir:
      return "bidir";
    case Strategy::kCyclic:
      return "cyclic";
    case Strategy::kUni:
      return "uni";
  }
  return "?";
}

std::vector<Stream> list_streams(const SubChannelPlan& plan) {
  std::vector<Stream> out;
  for (std::size_t k = 0; k < plan.entries.size(); ++k) {
    std::visit(Overloaded{
                   [&](const BiDir& b) {
                     out.push_back({b.pair, Strategy::kBiDir, k, 0});
                     out.push_back(
                         {{b.pair.dst, b.pair.src}, Strategy::kBiDir, k, 1});
                   },
                   [&](const Cyclic& c) {
                     const auto& v = c.cycle;
                     out.push_back({{v[0], v[1]}, Strategy::kCyclic, k, 0});
                     out.push_back({{v[1], v[2]}, Strategy::kCyclic, k, 1});
                     out.push_back({{v[2], v[0]}, Strategy::kCyclic, k, 2});
                   },
                   [&](const Uni& u) {
                     out.push_back({u.pair, Strategy::kUni, k, 0});
                   },
               },
               plan.entries[k]);
  }
  return out;
}

std::string to_string(Constellation c) {
  return c == Constellation::kGaussian ? "gaussian" : "qpsk";
}

Constellation parse_constellation(const std::string& s) {
  if (s == "gaussian") return Constellation::kGaussian;
  if (s == "qpsk") return Constellation::kQpsk;
  throw InvalidInput("unknown constellation '" + s +
                     "' (expected gaussian or qpsk)");
}

cd qpsk_decide(cd x, double var) {
  const double a = std::sqrt(var / 2.0);
  return {x.real() >= 0.0 ? a : -a, x.imag() >= 0.0 ? a : -a};
}

StreamSymbols draw_symbols(const SubChannelPlan& plan, const CoderSet& coders,
                           Constellation constellation, Rng& rng) {
  StreamSymbols out;
  out.entries.reserve(plan.entries.size());
  std::bernoulli_distribution bit(0.5);
  for (const auto& e : plan.entries) {
    std::vector<cd> payload(payload_size(e));
    for (std::size_t slot = 0; slot < payload.size(); ++slot) {
      const double var = coders.symbol_var[payload_source(e, slot) - 1];
      if (constellation == Constellation::kGaussian) {
        payload[slot] = complex_gaussian(rng, var);
      } else {
        const double a = std::sqrt(var / 2.0);
        const double re = bit(rng) ? a : -a;
        const double im = bit(rng) ? a : -a;
        payload[slot] = {re, im};
      }
    }
    out.entries.push_back(std::move(payload));
  }
  return out;
}

StreamSymbols zero_symbols(const SubChannelPlan& plan) {
  StreamSymbols out;
  for (const auto& e : plan.entries) {
    out.entries.emplace_back(payload_size(e), cd{});
  }
  return out;
}

std::array<CVector, 3> slot_vectors(const SubChannelPlan& plan,
                                    const StreamSymbols& symbols, int n) {
  check_symbols(plan, symbols);
  check_plan_fits(plan, n);
  std::array<CVector, 3> a;
  for (auto& v : a) v = CVector::Zero(n);
  for (std::size_t k = 0; k < plan.entries.size(); ++k) {
    const auto& p = symbols.entries[k];
    std::visit(Overloaded{
                   [&](const BiDir& b) {
                     a[b.pair.src - 1](b.sub) = p[0];
                     a[b.pair.dst - 1](b.sub) = p[1];
                   },
                   [&](const Cyclic& c) {
                     const auto& v = c.cycle;
                     a[v[0] - 1](c.subs[0]) = p[0];
                     a[v[1] - 1](c.subs[0]) = p[1];
                     a[v[1] - 1](c.subs[1]) = p[1];
                     a[v[2] - 1](c.subs[1]) = p[2];
                   },
                   [&](const Uni& u) { a[u.pair.src - 1](u.sub) = p[0]; },
               },
               plan.entries[k]);
  }
  return a;
}

std::array<CVector, 3> transmit_vectors(const CoderSet& coders,
                                        const SubChannelPlan& plan,
                                        const StreamSymbols& symbols) {
  const auto n = static_cast<int>(coders.relay_gain.size());
  auto a = slot_vectors(plan, symbols, n);
  std::array<CVector, 3> x;
  for (int i = 0; i < kUsers; ++i) x[i] = coders.precoder[i] * a[i];
  return x;
}

CVector uplink(const ChannelSet& ch, const CoderSet& coders,
               const SubChannelPlan& plan, const StreamSymbols& symbols,
               Noise noise, Rng& rng) {
  const auto x = transmit_vectors(coders, plan, symbols);
  CVector y = CVector::Zero(ch.relay_antennas);
  for (int i = 0; i < kUsers; ++i) y += ch.uplink[i] * x[i];
  if (noise == Noise::kOn) y += noise_vector(rng, ch.relay_antennas);
  return y;
}

CVector relay_forward(const CVector& y_r, const CoderSet& coders,
                      const SubChannelPlan& plan) {
  if (y_r.size() != coders.relay_gain.size()) {
    throw ContractError("relay observation has the wrong dimension");
  }
  check_plan_fits(plan, static_cast<int>(y_r.size()));
  // Idle sub-channels have zero gain.
  return coders.relay_gain.cast<cd>().cwiseProduct(y_r);
}

std::string to_string(Cancellation c) {
  return c == Cancellation::kGenie ? "genie" : "decision-directed";
}

Cancellation parse_cancellation(const std::string& s) {
  if (s == "genie") return Cancellation::kGenie;
  if (s == "decision-directed" || s == "decision") {
    return Cancellation::kDecisionDirected;
  }
  throw InvalidInput("unknown cancellation '" + s +
                     "' (expected genie or decision-directed)");
}

std::optional<double> StreamOutcome::sinr() const {
  if (signal_power == 0.0) return std::nullopt;
  return signal_power / error_power;
}

RoundResult downlink_decode(const ChannelSet& ch, const CoderSet& coders,
                            const SubChannelPlan& plan, const CVector& x_r,
                            const StreamSymbols& self_info, Noise noise,
                            Rng& rng, const DecodeOptions& options) {
  if (self_info.entries.empty() && !plan.entries.empty()) {
    throw ContractError("downlink decoding needs each user's own symbols");
  }
  check_symbols(plan, self_info);
  if (x_r.size() != ch.relay_antennas) {
    throw ContractError("relay signal has the wrong dimension");
  }

  // Post-coded observations: U_i (D_i x_r + z_i) = x_r + U_i z_i.
  std::array<CVector, 3> obs;
  for (int i = 0; i < kUsers; ++i) {
    CVector y = ch.downlink[i] * x_r;
    if (noise == Noise::kOn) y += noise_vector(rng, ch.user_antennas);
    obs[i] = coders.postcoder[i] * y;
  }

  const auto& alpha = coders.alpha;
  const auto& gamma = coders.relay_gain;
  const auto decide = [&](cd est, int src) {
    return options.constellation == Constellation::kQpsk
               ? qpsk_decide(est, coders.symbol_var[src - 1])
               : est;
  };
  // Strips a known term from an observation and scales out the desired one.
  const auto extract = [&](int user, int s, cd known, int src) {
    return (obs[user - 1](s) - known) / (gamma(s) * alpha[src - 1]);
  };

  RoundResult out;
  for (const auto& stream : list_streams(plan)) {
    const auto& p = self_info.entries[stream.entry];
    const int src = stream.pair.src;
    const int dst = stream.pair.dst;
    cd est{};
    std::visit(
        Overloaded{
            [&](const BiDir& b) {
              // dst removes its own contribution from the shared sum.
              const cd own = stream.slot == 0 ? p[1] : p[0];
              est = extract(dst, b.sub, gamma(b.sub) * alpha[dst - 1] * own,
                            src);
            },
            [&](const Cyclic& c) {
              const auto& v = c.cycle;
              const int s1 = c.subs[0];
              const int s2 = c.subs[1];
              switch (stream.slot) {
                case 0:  // v_ij at j, from s1 minus own v_jk
                  est = extract(v[1], s1, gamma(s1) * alpha[v[1] - 1] * p[1],
                                v[0]);
                  break;
                case 1:  // v_jk at k, from s2 minus own v_ki
                  est = extract(v[2], s2, gamma(s2) * alpha[v[2] - 1] * p[2],
                                v[1]);
                  break;
                default: {  // v_ki at i: v_jk from s1 first, then s2
                  cd relayed{};
                  if (options.successive_cyclic) {
                    const cd first = extract(
                        v[0], s1, gamma(s1) * alpha[v[0] - 1] * p[0], v[1]);
                    relayed = options.cancellation == Cancellation::kGenie
                                  ? p[1]
                                  : decide(first, v[1]);
                  }
                  est = extract(v[0], s2, gamma(s2) * alpha[v[1] - 1] * relayed,
                                v[2]);
                  break;
                }
              }
            },
            [&](const Uni& u) { est = extract(dst, u.sub, cd{}, src); },
        },
        plan.entries[stream.entry]);

    StreamOutcome o;
    o.stream = stream;
    o.sent = p[stream.slot];
    o.estimate = est;
    o.decision = decide(est, src);
    o.signal_power = std::norm(o.sent);
    o.error_power = std::norm(est - o.sent);
    const double tol = o.sent == cd{} ? 1e-12 : 1e-6 * std::abs(o.sent);
    o.exact = std::abs(est - o.sent) <= tol;
    out.streams.push_back(o);
  }
  return out;
}

RoundResult run_round(const ChannelSet& ch, const CoderSet& coders,
                      const SubChannelPlan& plan, const StreamSymbols& symbols,
                      Noise noise, Rng& rng, const DecodeOptions& options) {
  const CVector y_r = uplink(ch, coders, plan, symbols, noise, rng);
  const CVector x_r = relay_forward(y_r, coders, plan);
  return downlink_decode(ch, coders, plan, x_r, symbols, noise, rng, options);
}

}  // namespace ychan
