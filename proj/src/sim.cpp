#include "ychan/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ychan/error.hpp"

namespace ychan {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

struct Tally {
  double signal = 0.0;
  double error = 0.0;
  long long symbol_errors = 0;
  long long symbols = 0;
};

std::vector<StreamInfo> stream_infos(const SubChannelPlan& plan) {
  std::vector<StreamInfo> out;
  for (const auto& s : list_streams(plan)) out.push_back({s.pair, s.strategy});
  return out;
}

SweepResult sample_grid(const SimConfig& cfg) {
  const SubChannelPlan plan = plan_for(cfg);
  const auto streams = list_streams(plan);

  std::vector<ChannelSet> channels;
  for (int draw = 0; draw < cfg.channel_draws; ++draw) {
    const std::uint64_t seed =
        draw == 0 ? cfg.channel_seed
                  : derive_seed(cfg.channel_seed, static_cast<std::uint64_t>(draw));
    channels.push_back(
        sample_channels(cfg.user_antennas, cfg.relay_antennas, seed));
  }

  DecodeOptions options;
  options.cancellation = cfg.cancellation;
  options.constellation = cfg.constellation;

  SweepResult out;
  out.snr_db = cfg.snr_grid_db;
  out.streams = stream_infos(plan);
  for (std::size_t p = 0; p < cfg.snr_grid_db.size(); ++p) {
    const double rho = db_to_linear(cfg.snr_grid_db[p]);
    std::vector<Tally> tally(streams.size());
    for (std::size_t draw = 0; draw < channels.size(); ++draw) {
      const CoderSet coders =
          build_coders(channels[draw], rho, plan, cfg.power_split);
      for (int t = 0; t < cfg.trials_per_point; ++t) {
        Rng rng(derive_seed(cfg.noise_seed, draw, p,
                            static_cast<std::uint64_t>(t)));
        const auto symbols =
            draw_symbols(plan, coders, cfg.constellation, rng);
        const auto round =
            run_round(channels[draw], coders, plan, symbols, cfg.noise, rng,
                      options);
        for (std::size_t k = 0; k < round.streams.size(); ++k) {
          const auto& o = round.streams[k];
          tally[k].signal += o.signal_power;
          tally[k].error += o.error_power;
          tally[k].symbol_errors += o.decision != o.sent ? 1 : 0;
          tally[k].symbols += 1;
        }
      }
    }

    std::vector<StreamSample> row;
    double sum_rate = 0.0;
    for (const auto& t : tally) {
      StreamSample s;
      const double sinr = t.error > 0.0
                              ? t.signal / t.error
                              : std::numeric_limits<double>::infinity();
      s.sinr_db = 10.0 * std::log10(sinr);
      s.rate_bits = std::log2(1.0 + sinr);
      if (cfg.constellation == Constellation::kQpsk) {
        s.ser = static_cast<double>(t.symbol_errors) /
                static_cast<double>(t.symbols);
      }
      sum_rate += s.rate_bits;
      row.push_back(s);
    }
    out.samples.push_back(std::move(row));
    out.sum_rate.push_back(sum_rate);
  }
  return out;
}

}  // namespace

void validate(const SimConfig& cfg, std::size_t min_points) {
  if (cfg.user_antennas < 1 || cfg.relay_antennas < 1) {
    throw InvalidInput("antenna counts must be >= 1");
  }
  if (cfg.trials_per_point < 1) {
    throw InvalidInput("trials_per_point must be >= 1");
  }
  if (cfg.channel_draws < 1) {
    throw InvalidInput("channel_draws must be >= 1");
  }
  if (cfg.snr_grid_db.size() < min_points) {
    throw InvalidInput("SNR grid needs at least " + std::to_string(min_points) +
                       " point(s)");
  }
  for (std::size_t k = 0; k < cfg.snr_grid_db.size(); ++k) {
    if (!std::isfinite(cfg.snr_grid_db[k])) {
      throw InvalidInput("SNR grid values must be finite");
    }
    if (k > 0 && !(cfg.snr_grid_db[k] > cfg.snr_grid_db[k - 1])) {
      throw InvalidInput("SNR grid must be strictly increasing");
    }
  }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  return splitmix64(h ^ c);
}

LineFit fit_top_half(const std::vector<double>& x,
                     const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidInput("slope fit needs at least two (x, y) points");
  }
  const std::size_t n = x.size();
  const std::size_t used = std::max<std::size_t>(2, (n + 1) / 2);
  const std::size_t first = n - used;

  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = first; k < n; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(used);
  my /= static_cast<double>(used);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = first; k < n; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t k = first; k < n; ++k) {
    const double r = y[k] - (fit.intercept + fit.slope * x[k]);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(used));
  return fit;
}

SubChannelPlan plan_for(const SimConfig& cfg) {
  const auto outcome =
      build_plan(allocate(cfg.dof, cfg.mode), cfg.relay_antennas);
  if (!outcome.feasible()) {
    throw InfeasibleDemand(outcome.n_s, outcome.relay_antennas);
  }
  return *outcome.plan;
}

SweepResult simulate(const SimConfig& cfg) {
  validate(cfg, 1);
  return sample_grid(cfg);
}

SweepResult run_sweep(const SimConfig& cfg) {
  validate(cfg, 2);
  SweepResult out = sample_grid(cfg);
  if (cfg.noise == Noise::kOff) return out;  // rates unbounded; no slopes

  std::vector<double> x;
  for (double db : out.snr_db) x.push_back(std::log2(db_to_linear(db)));
  out.slopes_fitted = true;
  out.sum_dof = 0.0;
  for (std::size_t k = 0; k < out.streams.size(); ++k) {
    std::vector<double> y;
    for (const auto& row : out.samples) y.push_back(row[k].rate_bits);
    out.stream_fits.push_back(fit_top_half(x, y));
    out.sum_dof += out.stream_fits.back().slope;
  }
  out.sum_fit = fit_top_half(x, out.sum_rate);
  return out;
}

SerTable run_ser(const SimConfig& cfg) {
  if (cfg.constellation != Constellation::kQpsk) {
    throw InvalidInput("SER runs need the qpsk constellation");
  }
  SimConfig dd = cfg;
  dd.cancellation = Cancellation::kDecisionDirected;
  const SweepResult r = simulate(dd);
  SerTable out;
  out.snr_db = r.snr_db;
  out.streams = r.streams;
  for (const auto& row : r.samples) {
    std::vector<double> ser;
    for (const auto& s : row) ser.push_back(s.ser.value_or(0.0));
    out.ser.push_back(std::move(ser));
  }
  return out;
}

InseparabilityReport inseparability_experiment(
    int relay_antennas, const std::optional<DofTuple>& tuple) {
  if (relay_antennas < 3) {
    throw ContractError("inseparability experiment needs N >= 3");
  }
  DofTuple d;
  if (tuple) {
    d = *tuple;
  } else {
    const double n = relay_antennas;
    d = DofTuple({n - 1, 0, 1, n - 2, n - 2, 0});
  }
  if (!region_contains(d, relay_antennas)) {
    throw ContractError("witness " + d.to_string() +
                        " lies outside the DoF region for N=" +
                        std::to_string(relay_antennas) +
                        "; pass an explicit in-region tuple");
  }
  InseparabilityReport r;
  r.relay_antennas = relay_antennas;
  r.tuple = d;
  r.joint = build_plan(allocate(d, Mode::kJoint), relay_antennas);
  r.separable = build_plan(allocate(d, Mode::kSeparable), relay_antennas);
  return r;
}

}  // namespace ychan
