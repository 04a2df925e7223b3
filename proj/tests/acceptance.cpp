// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "ychan/allocator.hpp"
#include "ychan/dof.hpp"
#include "ychan/phy.hpp"
#include "ychan/serialize.hpp"
#include "ychan/sim.hpp"
#include "ychan/zero_forcing.hpp"

namespace {

using namespace ychan;

struct Verdict {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Verdict()> body;
};

struct CliRun {
  int code;
  std::string out;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ychan");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str()};
}

const DofTuple kToy({2, 0, 1, 1, 1, 0});

// Every integer tuple in the region for N <= 3, plus 10^4 uniformly drawn
// in-region tuples (rejection sampling) for each N in 4..8.
std::vector<std::pair<int, DofTuple>> region_corpus() {
  std::vector<std::pair<int, DofTuple>> out;
  for (int n = 1; n <= 3; ++n) {
    const int b = n + 1;
    for (int code = 0; code < b * b * b * b * b * b; ++code) {
      std::array<double, 6> v{};
      int c = code;
      for (auto& x : v) {
        x = c % b;
        c /= b;
      }
      const DofTuple d(v);
      if (region_contains(d, n)) out.emplace_back(n, d);
    }
  }
  std::mt19937_64 rng(20240601);
  for (int n = 4; n <= 8; ++n) {
    std::uniform_int_distribution<int> u(0, n);
    int kept = 0;
    while (kept < 10000) {
      std::array<double, 6> v{};
      for (auto& x : v) x = u(rng);
      const DofTuple d(v);
      if (!region_contains(d, n)) continue;
      out.emplace_back(n, d);
      ++kept;
    }
  }
  return out;
}

Verdict toy_allocation() {
  const auto r = run_cli({"allocate", "--dof", "2,0,1,1,1,0", "-N", "3", "--mode", "joint"});
  const auto j = Json::parse(r.out);
  const bool ok = r.code == cli::kExitOk &&
                  j["two_cycle"] == Json::parse(R"({"12":1,"13":0,"23":0})") &&
                  j["three_cycle"] == Json::parse(R"({"123":1,"132":0})") &&
                  j["uni"] == Json::parse(
                      R"({"12":0,"13":0,"21":0,"23":0,"31":0,"32":0})") &&
                  j["n_s"] == 3 && j["feasible"] == true;
  return {ok, "n_s=" + j["n_s"].dump() + " feasible=" + j["feasible"].dump()};
}

Verdict inseparability() {
  const auto r = run_cli({"allocate", "--dof", "2,0,1,1,1,0", "-N", "3", "--mode", "separable"});
  const auto j = Json::parse(r.out);
  const double uni_dims = unidirectional_dim_bound(kToy);
  const bool ok = r.code == cli::kExitInfeasible && j["n_s"] == 4 &&
                  j["feasible"] == false && uni_dims == 5.0;
  return {ok, "n_s=" + j["n_s"].dump() + " feasible=" + j["feasible"].dump() +
                  " uni_dims=" + format_double(uni_dims)};
}

Verdict optimality(const std::vector<std::pair<int, DofTuple>>& corpus) {
  std::size_t violations = 0;
  for (const auto& [n, d] : corpus) {
    if (subchannels_required(allocate(d, Mode::kJoint)) > n) ++violations;
  }
  return {violations == 0, std::to_string(corpus.size()) + " tuples, " +
                               std::to_string(violations) + " violations"};
}

Verdict closed_form(const std::vector<std::pair<int, DofTuple>>& corpus) {
  std::size_t mismatches = 0;
  for (const auto& [n, d] : corpus) {
    for (auto mode : {Mode::kJoint, Mode::kSeparable}) {
      const auto a = allocate(d, mode);
      if (subchannels_required(a) != subchannel_cost(a)) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(2 * corpus.size()) + " allocations, " +
                               std::to_string(mismatches) + " mismatches"};
}

Verdict sum_dof_witness() {
  std::string bad;
  for (int n = 1; n <= 8; ++n) {
    const auto w = sum_dof_plan(n);
    bool ok = region_contains(w.tuple, n) && w.tuple.sum() == 2.0 * n &&
              w.plan.total_subchannels == n &&
              static_cast<int>(w.plan.entries.size()) == n;
    for (const auto& e : w.plan.entries) ok = ok && std::holds_alternative<BiDir>(e);
    if (!ok) bad += " N=" + std::to_string(n);
  }
  return {bad.empty(), bad.empty() ? "N=1..8 ok" : "failed:" + bad};
}

// Power: each channel gets 10^4 QPSK draws of per-slot variance rho/N; the
// per-channel empirical power is averaged over the channel draws. A single
// channel's 10^4-draw estimate scatters by ~1% on its own (cross terms are
// large when V's columns are correlated), so it is reported but not gated;
// the analytic per-channel power (rho/N)||V||_F^2 is gated at 1e-9.
Verdict diagonalization() {
  double worst_v = 0.0, worst_u = 0.0, worst_power = 0.0, worst_exact = 0.0;
  double worst_single = 0.0;
  const std::array<std::pair<int, int>, 3> shapes{{{3, 3}, {4, 3}, {5, 2}}};
  const double rho = 1.0;
  constexpr int kChannels = 1000;
  constexpr int kSymbols = 10000;
  for (const auto& [m, n] : shapes) {
    std::mt19937_64 rng(derive_seed(77, m, n));
    std::bernoulli_distribution bit(0.5);
    const double amp = std::sqrt(rho / n / 2.0);
    std::array<double, 3> power{};
    for (int c = 0; c < kChannels; ++c) {
      const auto ch = sample_channels(m, n, derive_seed(7, m, n, c));
      for (int i = 0; i < 3; ++i) {
        const auto v = zf_precoder(ch.uplink[i]);
        const auto u = zf_postcoder(ch.downlink[i]);
        const CMatrix eye = CMatrix::Identity(n, n);
        worst_v = std::max(worst_v, (ch.uplink[i] * v.matrix - v.alpha * eye).norm() /
                                        (v.alpha * eye.norm()));
        worst_u = std::max(worst_u, (u.matrix * ch.downlink[i] - eye).norm() / eye.norm());
        worst_exact = std::max(
            worst_exact, std::abs(rho / n * v.matrix.squaredNorm() - rho) / rho);
        double p = 0.0;
        CVector a(n);
        for (int k = 0; k < kSymbols; ++k) {
          for (int s = 0; s < n; ++s) {
            a(s) = cd(bit(rng) ? amp : -amp, bit(rng) ? amp : -amp);
          }
          p += (v.matrix * a).squaredNorm();
        }
        p /= kSymbols;
        worst_single = std::max(worst_single, std::abs(p - rho) / rho);
        power[i] += p;
      }
    }
    for (double p : power) {
      worst_power = std::max(worst_power, std::abs(p / kChannels - rho) / rho);
    }
  }
  const bool ok = worst_v <= 1e-9 && worst_u <= 1e-9 && worst_exact <= 1e-9 &&
                  worst_power <= 0.01;
  return {ok, "max resid HV=" + format_double(worst_v) +
                  " UD=" + format_double(worst_u) +
                  " analytic power dev=" + format_double(worst_exact) +
                  " empirical power dev=" + format_double(worst_power) +
                  " (single channel max " + format_double(worst_single) + ")"};
}

Verdict noiseless_recovery() {
  const auto plan = *build_plan(allocate(kToy, Mode::kJoint), 3).plan;
  std::size_t checked = 0, failed = 0;
  for (int c = 0; c < 100; ++c) {
    const auto ch = sample_channels(3, 3, derive_seed(11, c));
    const auto coders = build_coders(ch, 1e6, plan);
    Rng rng(derive_seed(12, c));
    for (int t = 0; t < 100; ++t) {
      const auto symbols = draw_symbols(plan, coders, Constellation::kGaussian, rng);
      const auto r = run_round(ch, coders, plan, symbols, Noise::kOff, rng);
      for (const auto& s : r.streams) {
        ++checked;
        if (!s.exact) ++failed;
      }
    }
  }
  return {failed == 0 && checked == 100 * 100 * 5,
          std::to_string(checked) + " symbols, " + std::to_string(failed) +
              " not recovered"};
}

SimConfig toy_config() {
  SimConfig cfg;
  cfg.dof = kToy;
  cfg.mode = Mode::kJoint;
  cfg.snr_grid_db = {40, 50, 60, 70, 80};
  cfg.trials_per_point = 200;
  return cfg;
}

Verdict dof_slopes() {
  const auto r = run_sweep(toy_config());
  bool ok = r.slopes_fitted;
  std::string slopes;
  for (const auto& f : r.stream_fits) {
    ok = ok && f.slope >= 0.9 && f.slope <= 1.1;
    slopes += " " + format_double(std::round(f.slope * 1e4) / 1e4);
  }
  ok = ok && r.sum_dof >= 4.5 && r.sum_dof <= 5.5 && r.sum_fit.slope >= 4.5 &&
       r.sum_fit.slope <= 5.5;
  return {ok, "slopes" + slopes + " sum_dof=" +
                  format_double(std::round(r.sum_dof * 1e4) / 1e4) +
                  " sum_fit=" + format_double(std::round(r.sum_fit.slope * 1e4) / 1e4)};
}

Verdict ser_collapse() {
  auto cfg = toy_config();
  cfg.snr_grid_db = {0, 60};
  cfg.trials_per_point = 10000;
  cfg.constellation = Constellation::kQpsk;
  const auto t = run_ser(cfg);
  double worst_high = 0.0, best_low = 0.0;
  for (double s : t.ser[1]) worst_high = std::max(worst_high, s);
  for (double s : t.ser[0]) best_low = std::max(best_low, s);
  return {worst_high == 0.0 && best_low > 0.01,
          "max SER@60dB=" + format_double(worst_high) +
              " max SER@0dB=" + format_double(best_low)};
}

Verdict determinism() {
  const auto dir = std::filesystem::temp_directory_path();
  bool ok = true;
  std::string detail;
  for (const std::string fmt : {"csv", "json"}) {
    std::array<std::string, 2> bytes;
    for (int k = 0; k < 2; ++k) {
      const auto path = dir / ("ychan_accept_" + std::to_string(k) + "." + fmt);
      const auto r = run_cli({"sweep", "--snr", "20:10:60", "--trials", "50",
                              "--seed", "99", "--constellation", "qpsk",
                              "--format", fmt, "--out", path.string()});
      ok = ok && r.code == cli::kExitOk;
      bytes[k] = read_file(path);
      std::filesystem::remove(path);
    }
    ok = ok && !bytes[0].empty() && bytes[0] == bytes[1];
    detail += fmt + " " + std::to_string(bytes[0].size()) + " bytes " +
              (bytes[0] == bytes[1] ? "identical; " : "DIFFER; ");
  }
  return {ok, detail};
}

}  // namespace

int main() {
  std::vector<std::pair<int, DofTuple>> corpus;
  const std::vector<Criterion> criteria = {
      {1, "toy allocation", 1.0, toy_allocation},
      {2, "inseparability", 1.0, inseparability},
      {3, "joint-mode optimality", 120.0,
       [&] {
         corpus = region_corpus();
         return optimality(corpus);
       }},
      {4, "closed-form vs strategy cost", 120.0, [&] { return closed_form(corpus); }},
      {5, "sum-DoF witness", 1.0, sum_dof_witness},
      {6, "zero-forcing diagonalization", 60.0, diagonalization},
      {7, "noiseless end-to-end", 30.0, noiseless_recovery},
      {8, "DoF slopes", 300.0, dof_slopes},
      {9, "SER collapse", 300.0, ser_collapse},
      {10, "determinism", 60.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.body();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit_s) {
      v.pass = false;
      v.detail += " [over time limit]";
    }
    if (!v.pass) ++failures;
    std::printf("%s %2d %-30s %8.3fs  %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name,
                secs, v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
