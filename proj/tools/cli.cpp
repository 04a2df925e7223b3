#include "cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>

#include "ychan/allocator.hpp"
#include "ychan/dof.hpp"
#include "ychan/error.hpp"
#include "ychan/serialize.hpp"
#include "ychan/sim.hpp"

namespace ychan::cli {

namespace {

struct Common {
  std::string format;
  std::string out;
  std::optional<std::uint64_t> seed;
};

struct SimFlags {
  std::string config;
  std::optional<int> user_antennas;
  std::optional<int> relay_antennas;
  std::string dof;
  std::string mode;
  std::string snr;
  std::optional<int> trials;
  std::string constellation;
  std::string cancellation;
  std::string power_split;
  std::optional<int> channel_draws;
  bool noiseless = false;
};

void add_common(CLI::App* cmd, Common& c, const std::string& default_format,
                std::vector<std::string> formats) {
  c.format = default_format;
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember(std::move(formats)));
  cmd->add_option("--out", c.out, "Write output to this file instead of stdout");
  cmd->add_option("--seed", c.seed, "Seed (default: $YCHAN_SEED)");
}

void add_sim_flags(CLI::App* cmd, SimFlags& f) {
  cmd->add_option("--config", f.config, "SimConfig JSON file");
  cmd->add_option("-M,--user-antennas", f.user_antennas, "Antennas per user");
  cmd->add_option("-N,--relay-antennas", f.relay_antennas, "Relay antennas");
  cmd->add_option("--dof", f.dof, "d12,d13,d21,d23,d31,d32");
  cmd->add_option("--mode", f.mode, "joint or separable")
      ->check(CLI::IsMember({"joint", "separable"}));
  cmd->add_option("--snr", f.snr,
                  "SNR grid in dB: start:step:stop or a comma list");
  cmd->add_option("--trials", f.trials, "Trials per SNR point");
  cmd->add_option("--constellation", f.constellation, "gaussian or qpsk")
      ->check(CLI::IsMember({"gaussian", "qpsk"}));
  cmd->add_option("--cancellation", f.cancellation,
                  "genie or decision-directed")
      ->check(CLI::IsMember({"genie", "decision-directed"}));
  cmd->add_option("--power-split", f.power_split, "uniform or active-only")
      ->check(CLI::IsMember({"uniform", "active-only"}));
  cmd->add_option("--channel-draws", f.channel_draws,
                  "Channel realizations averaged per point");
  cmd->add_flag("--noiseless", f.noiseless, "Disable all noise");
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("YCHAN_SEED");
  if (!s || !*s) return std::nullopt;
  std::uint64_t v = 0;
  const std::string text(s);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw InvalidInput("YCHAN_SEED='" + text + "' is not an unsigned integer");
  }
  return v;
}

std::optional<std::uint64_t> effective_seed(const Common& c) {
  return c.seed ? c.seed : env_seed();
}

double parse_number(const std::string& token) {
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (token.empty() || res.ec != std::errc() ||
      res.ptr != token.data() + token.size()) {
    throw InvalidInput("malformed SNR value '" + token + "'");
  }
  return v;
}

std::vector<double> parse_snr_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.size() != 3) {
      throw InvalidInput("SNR range '" + text + "' must be start:step:stop");
    }
    const double start = parse_number(parts[0]);
    const double step = parse_number(parts[1]);
    const double stop = parse_number(parts[2]);
    if (!(step > 0.0)) throw InvalidInput("SNR step must be positive");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long k = 0; k <= count; ++k) grid.push_back(start + step * k);
    return grid;
  }
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ',')) grid.push_back(parse_number(p));
  return grid;
}

SimConfig build_config(const SimFlags& f, const Common& c) {
  SimConfig cfg;
  cfg.dof = DofTuple({2, 0, 1, 1, 1, 0});
  cfg.snr_grid_db = {40, 50, 60, 70, 80};
  if (!f.config.empty()) cfg = sim_config_from_json(Json::parse(read_file(f.config)));
  if (f.user_antennas) cfg.user_antennas = *f.user_antennas;
  if (f.relay_antennas) cfg.relay_antennas = *f.relay_antennas;
  if (!f.dof.empty()) cfg.dof = parse_dof(f.dof);
  if (!f.mode.empty()) cfg.mode = parse_mode(f.mode);
  if (!f.snr.empty()) cfg.snr_grid_db = parse_snr_grid(f.snr);
  if (f.trials) cfg.trials_per_point = *f.trials;
  if (!f.constellation.empty()) {
    cfg.constellation = parse_constellation(f.constellation);
  }
  if (!f.cancellation.empty()) {
    cfg.cancellation = parse_cancellation(f.cancellation);
  }
  if (!f.power_split.empty()) {
    cfg.power_split = f.power_split == "uniform" ? PowerSplit::kUniform
                                                 : PowerSplit::kActiveOnly;
  }
  if (f.channel_draws) cfg.channel_draws = *f.channel_draws;
  if (f.noiseless) cfg.noise = Noise::kOff;
  if (const auto seed = effective_seed(c)) {
    cfg.channel_seed = *seed;
    cfg.noise_seed = derive_seed(*seed, 1);
  }
  return cfg;
}

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
  } else {
    write_file(c.out, text);
  }
}

std::string pair_label(const Pair& p) {
  return std::to_string(p.src) + std::to_string(p.dst);
}

std::string perm_label(const std::array<int, 3>& p) {
  return "(" + std::to_string(p[0]) + "," + std::to_string(p[1]) + "," +
         std::to_string(p[2]) + ")";
}

std::string num(double x) { return format_double(x); }

// ---- check ---------------------------------------------------------------

std::string check_text(const DofTuple& d, int n,
                       const std::vector<RegionBound>& violated) {
  std::string s = violated.empty() ? "IN REGION\n" : "OUT OF REGION\n";
  for (const auto& b : violated) {
    const auto pairs = b.pairs();
    s += "violated p=" + perm_label(b.perm) + ": d" + pair_label(pairs[0]) +
         "+d" + pair_label(pairs[1]) + "+d" + pair_label(pairs[2]) + " = " +
         num(b.lhs(d)) + " > " + std::to_string(n) + "\n";
  }
  return s;
}

Json check_json(const DofTuple& d, int n,
                const std::vector<RegionBound>& violated) {
  Json v = Json::array();
  for (const auto& b : violated) {
    v.push_back(Json{{"perm", b.perm}, {"lhs", b.lhs(d)}, {"rhs", b.rhs}});
  }
  return Json{{"dof", to_json(d)},
              {"relay_antennas", n},
              {"in_region", violated.empty()},
              {"violated", std::move(v)}};
}

// ---- allocate / plan -----------------------------------------------------

std::string plan_entry_text(const PlanEntry& e) {
  if (const auto* b = std::get_if<BiDir>(&e)) {
    return "sub " + std::to_string(b->sub) + ": bidir (" +
           std::to_string(b->pair.src) + "," + std::to_string(b->pair.dst) + ")";
  }
  if (const auto* c = std::get_if<Cyclic>(&e)) {
    return "subs " + std::to_string(c->subs[0]) + "," +
           std::to_string(c->subs[1]) + ": cyclic " + perm_label(c->cycle);
  }
  const auto& u = std::get<Uni>(e);
  return "sub " + std::to_string(u.sub) + ": uni (" +
         std::to_string(u.pair.src) + "," + std::to_string(u.pair.dst) + ")";
}

std::string allocation_text(const PlanOutcome& o) {
  const auto& a = o.allocation;
  std::string s = "mode: " + to_string(a.mode) + "\n";
  s += "dof: " + a.demand().to_string() + "\n";
  s += "two_cycle:";
  for (std::size_t c = 0; c < kTwoCycles.size(); ++c) {
    s += " " + pair_label(kTwoCycles[c]) + "=" + std::to_string(a.two_cycle[c]);
  }
  s += "\nthree_cycle:";
  for (std::size_t c = 0; c < kThreeCycles.size(); ++c) {
    const auto& v = kThreeCycles[c];
    s += " " + std::to_string(v[0]) + std::to_string(v[1]) +
         std::to_string(v[2]) + "=" + std::to_string(a.three_cycle[c]);
  }
  s += "\nuni:";
  for (std::size_t k = 0; k < kPairs.size(); ++k) {
    s += " " + pair_label(kPairs[k]) + "=" + std::to_string(a.uni[k]);
  }
  s += "\nn_s: " + std::to_string(o.n_s) + "\n";
  s += "relay_antennas: " + std::to_string(o.relay_antennas) + "\n";
  s += std::string("feasible: ") + (o.feasible() ? "true" : "false") + "\n";
  if (o.plan) {
    s += "plan:\n";
    for (const auto& e : o.plan->entries) s += "  " + plan_entry_text(e) + "\n";
  } else {
    s += "infeasible: requires " + std::to_string(o.n_s) +
         " sub-channels, relay has " + std::to_string(o.relay_antennas) + "\n";
  }
  return s;
}

// Sub-channel view: one row per relay dimension, idle ones included.
Json subchannel_table(const PlanOutcome& o) {
  std::vector<Json> rows(static_cast<std::size_t>(o.relay_antennas));
  for (int s = 0; s < o.relay_antennas; ++s) {
    rows[s] = Json{{"sub", s}, {"kind", "idle"}};
  }
  if (o.plan) {
    for (const auto& e : o.plan->entries) {
      if (const auto* b = std::get_if<BiDir>(&e)) {
        rows[b->sub] = Json{{"sub", b->sub},
                            {"kind", "bidir"},
                            {"pair", {b->pair.src, b->pair.dst}}};
      } else if (const auto* c = std::get_if<Cyclic>(&e)) {
        const auto& v = c->cycle;
        rows[c->subs[0]] = Json{{"sub", c->subs[0]},
                                {"kind", "cyclic"},
                                {"cycle", v},
                                {"carries", {pair_label({v[0], v[1]}),
                                             pair_label({v[1], v[2]})}}};
        rows[c->subs[1]] = Json{{"sub", c->subs[1]},
                                {"kind", "cyclic"},
                                {"cycle", v},
                                {"carries", {pair_label({v[1], v[2]}),
                                             pair_label({v[2], v[0]})}}};
      } else {
        const auto& u = std::get<Uni>(e);
        rows[u.sub] = Json{{"sub", u.sub},
                           {"kind", "uni"},
                           {"pair", {u.pair.src, u.pair.dst}}};
      }
    }
  }
  return Json{{"relay_antennas", o.relay_antennas},
              {"n_s", o.n_s},
              {"feasible", o.feasible()},
              {"subchannels", o.plan ? Json(rows) : Json::array()}};
}

std::string subchannel_text(const Json& table) {
  std::string s = "relay_antennas: " +
                  std::to_string(table["relay_antennas"].get<int>()) + "\n";
  s += "n_s: " + std::to_string(table["n_s"].get<int>()) + "\n";
  s += std::string("feasible: ") +
       (table["feasible"].get<bool>() ? "true" : "false") + "\n";
  for (const auto& row : table["subchannels"]) {
    s += "sub " + std::to_string(row["sub"].get<int>()) + ": " +
         row["kind"].get<std::string>();
    if (row.contains("pair")) {
      s += " " + std::to_string(row["pair"][0].get<int>()) + "->" +
           std::to_string(row["pair"][1].get<int>());
    }
    if (row.contains("carries")) {
      s += " " + perm_label(row["cycle"].get<std::array<int, 3>>()) +
           " carries v" + row["carries"][0].get<std::string>() + "+v" +
           row["carries"][1].get<std::string>();
    }
    s += "\n";
  }
  return s;
}

// ---- simulate / sweep ----------------------------------------------------

std::string sweep_text(const SweepResult& r) {
  std::ostringstream os;
  os << "snr_db  stream  strategy  sinr_db  rate_bits  ser\n";
  for (std::size_t p = 0; p < r.samples.size(); ++p) {
    for (std::size_t k = 0; k < r.streams.size(); ++k) {
      const auto& s = r.samples[p][k];
      os << num(r.snr_db[p]) << "  " << pair_label(r.streams[k].pair) << "  "
         << to_string(r.streams[k].strategy) << "  " << num(s.sinr_db) << "  "
         << num(s.rate_bits) << "  " << (s.ser ? num(*s.ser) : "-") << "\n";
    }
  }
  if (r.slopes_fitted) {
    os << "slopes:\n";
    for (std::size_t k = 0; k < r.streams.size(); ++k) {
      os << "  " << pair_label(r.streams[k].pair) << " "
         << to_string(r.streams[k].strategy) << " "
         << num(r.stream_fits[k].slope) << " (rms "
         << num(r.stream_fits[k].rms_residual) << ")\n";
    }
    os << "sum_dof: " << num(r.sum_dof) << "\n";
  } else {
    os << "slopes: not fitted\n";
  }
  return os.str();
}

std::string infeasible_text(const InfeasibleDemand& e) {
  return "infeasible: requires " + std::to_string(e.required()) +
         " sub-channels, relay has " + std::to_string(e.available()) + "\n";
}

Json infeasible_json(const InfeasibleDemand& e) {
  return Json{{"feasible", false},
              {"n_s", e.required()},
              {"relay_antennas", e.available()}};
}

std::string insep_text(const InseparabilityReport& r) {
  std::string s = "dof: " + r.tuple.to_string() + "\n";
  s += "relay_antennas: " + std::to_string(r.relay_antennas) + "\n";
  s += "joint n_s: " + std::to_string(r.joint.n_s) +
       (r.joint.feasible() ? " feasible\n" : " infeasible\n");
  s += "separable n_s: " + std::to_string(r.separable.n_s) +
       (r.separable.feasible() ? " feasible\n" : " infeasible\n");
  s += std::string("inseparable: ") + (r.inseparable() ? "true" : "false") +
       "\n";
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"MIMO Y-channel DoF region, allocation and link simulation"};
  app.require_subcommand(1, 1);

  // check
  Common check_c;
  std::string check_dof;
  int check_n = 0;
  auto* check = app.add_subcommand("check", "Test a DoF tuple against the region");
  check->add_option("--dof", check_dof, "d12,d13,d21,d23,d31,d32")->required();
  check->add_option("-N,--relay-antennas", check_n, "Relay antennas")->required();
  add_common(check, check_c, "text", {"text", "json"});

  // allocate / plan
  Common alloc_c;
  std::string alloc_dof;
  int alloc_n = 0;
  std::string alloc_mode = "joint";
  auto* alloc = app.add_subcommand("allocate", "Split a demand over strategies");
  alloc->add_option("--dof", alloc_dof, "d12,d13,d21,d23,d31,d32")->required();
  alloc->add_option("-N,--relay-antennas", alloc_n, "Relay antennas")->required();
  alloc->add_option("--mode", alloc_mode, "joint or separable")
      ->check(CLI::IsMember({"joint", "separable"}));
  add_common(alloc, alloc_c, "json", {"json", "text"});

  Common plan_c;
  std::string plan_dof;
  int plan_n = 0;
  std::string plan_mode = "joint";
  auto* plan = app.add_subcommand("plan", "Show the sub-channel assignment");
  plan->add_option("--dof", plan_dof, "d12,d13,d21,d23,d31,d32")->required();
  plan->add_option("-N,--relay-antennas", plan_n, "Relay antennas")->required();
  plan->add_option("--mode", plan_mode, "joint or separable")
      ->check(CLI::IsMember({"joint", "separable"}));
  add_common(plan, plan_c, "text", {"json", "text"});

  // simulate / sweep
  Common sim_c;
  SimFlags sim_f;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo link simulation");
  add_sim_flags(sim, sim_f);
  add_common(sim, sim_c, "text", {"json", "csv", "text"});

  Common sweep_c;
  SimFlags sweep_f;
  auto* sweep = app.add_subcommand("sweep", "SNR sweep with DoF slope fits");
  add_sim_flags(sweep, sweep_f);
  add_common(sweep, sweep_c, "csv", {"json", "csv", "text"});

  // inseparability
  Common insep_c;
  int insep_n = 3;
  std::string insep_dof;
  auto* insep =
      app.add_subcommand("inseparability", "Joint vs separable sub-channel coding");
  insep->add_option("-N,--relay-antennas", insep_n, "Relay antennas");
  insep->add_option("--dof", insep_dof, "Explicit witness tuple");
  add_common(insep, insep_c, "text", {"json", "text"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (check->parsed()) {
      effective_seed(check_c);
      const DofTuple d = parse_dof(check_dof);
      const auto violated = violated_bounds(d, check_n);
      emit(check_c,
           check_c.format == "json" ? check_json(d, check_n, violated).dump(2) + "\n"
                                    : check_text(d, check_n, violated),
           out);
      return violated.empty() ? kExitOk : kExitInfeasible;
    }
    if (alloc->parsed()) {
      effective_seed(alloc_c);
      const auto o =
          build_plan(allocate(parse_dof(alloc_dof), parse_mode(alloc_mode)),
                     alloc_n);
      emit(alloc_c,
           alloc_c.format == "json" ? to_json(o).dump(2) + "\n"
                                    : allocation_text(o),
           out);
      return o.feasible() ? kExitOk : kExitInfeasible;
    }
    if (plan->parsed()) {
      effective_seed(plan_c);
      const auto o =
          build_plan(allocate(parse_dof(plan_dof), parse_mode(plan_mode)), plan_n);
      const Json table = subchannel_table(o);
      emit(plan_c,
           plan_c.format == "json" ? table.dump(2) + "\n" : subchannel_text(table),
           out);
      return o.feasible() ? kExitOk : kExitInfeasible;
    }
    if (sim->parsed() || sweep->parsed()) {
      const bool is_sweep = sweep->parsed();
      const Common& c = is_sweep ? sweep_c : sim_c;
      const SimConfig cfg = build_config(is_sweep ? sweep_f : sim_f, c);
      try {
        const SweepResult r = is_sweep ? run_sweep(cfg) : simulate(cfg);
        std::string text;
        if (c.format == "json") {
          text = Json{{"config", to_json(cfg)}, {"result", to_json(r)}}.dump(2) +
                 "\n";
        } else if (c.format == "csv") {
          text = sweep_csv(r);
        } else {
          text = sweep_text(r);
        }
        emit(c, text, out);
        return kExitOk;
      } catch (const InfeasibleDemand& e) {
        emit(c,
             c.format == "json" ? infeasible_json(e).dump(2) + "\n"
                                : infeasible_text(e),
             out);
        return kExitInfeasible;
      }
    }
    if (insep->parsed()) {
      effective_seed(insep_c);
      std::optional<DofTuple> witness;
      if (!insep_dof.empty()) witness = parse_dof(insep_dof);
      const auto r = inseparability_experiment(insep_n, witness);
      emit(insep_c,
           insep_c.format == "json" ? to_json(r).dump(2) + "\n" : insep_text(r),
           out);
      return kExitOk;
    }
  } catch (const InvalidInput& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace ychan::cli
