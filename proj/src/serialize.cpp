#include "ychan/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "ychan/error.hpp"

namespace ychan {

namespace {

std::string pair_key(int i, int j) { return std::to_string(i) + std::to_string(j); }

std::string cycle_key(const std::array<int, 3>& c) {
  return std::to_string(c[0]) + std::to_string(c[1]) + std::to_string(c[2]);
}

Json number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

double number_from(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw InvalidInput("expected a number, got " + j.dump());
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidInput("malformed number '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidInput("malformed integer '" + s + "'");
  }
  return v;
}

Strategy parse_strategy(const std::string& s) {
  if (s == "bidir") return Strategy::kBiDir;
  if (s == "cyclic") return Strategy::kCyclic;
  if (s == "uni") return Strategy::kUni;
  throw InvalidInput("unknown strategy '" + s + "'");
}

Json matrix_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from(const Json& j, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) {
    throw InvalidInput("matrix must have " + std::to_string(rows) + " rows");
  }
  CMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols) {
      throw InvalidInput("matrix row must have " + std::to_string(cols) +
                         " entries");
    }
    for (int c = 0; c < cols; ++c) {
      const auto& e = j[r][c];
      m(r, c) = {e.at(0).get<double>(), e.at(1).get<double>()};
    }
  }
  return m;
}

Json stream_json(const StreamInfo& s) {
  return Json{{"src", s.pair.src},
              {"dst", s.pair.dst},
              {"strategy", to_string(s.strategy)}};
}

Json fit_json(const LineFit& f) {
  return Json{{"slope", number(f.slope)},
              {"intercept", number(f.intercept)},
              {"rms_residual", number(f.rms_residual)}};
}

LineFit fit_from(const Json& j) {
  return {number_from(j.at("slope")), number_from(j.at("intercept")),
          number_from(j.at("rms_residual"))};
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

Json to_json(const DofTuple& d) {
  Json j = Json::array();
  for (double x : d.values()) j.push_back(x);
  return j;
}

DofTuple dof_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 6) {
    throw InvalidInput("DoF tuple must be a JSON array of six numbers");
  }
  std::array<double, 6> v{};
  for (std::size_t k = 0; k < 6; ++k) {
    if (!j[k].is_number()) {
      throw InvalidInput("DoF tuple component " + j[k].dump() +
                         " is not a number");
    }
    v[k] = j[k].get<double>();
  }
  return DofTuple(v);
}

Json to_json(const Allocation& a) {
  Json j;
  j["mode"] = to_string(a.mode);
  Json two;
  for (std::size_t c = 0; c < kTwoCycles.size(); ++c) {
    two[pair_key(kTwoCycles[c].src, kTwoCycles[c].dst)] = a.two_cycle[c];
  }
  Json three;
  for (std::size_t c = 0; c < kThreeCycles.size(); ++c) {
    three[cycle_key(kThreeCycles[c])] = a.three_cycle[c];
  }
  Json uni;
  for (std::size_t k = 0; k < kPairs.size(); ++k) {
    uni[pair_key(kPairs[k].src, kPairs[k].dst)] = a.uni[k];
  }
  j["two_cycle"] = std::move(two);
  j["three_cycle"] = std::move(three);
  j["uni"] = std::move(uni);
  return j;
}

Allocation allocation_from_json(const Json& j) {
  Allocation a;
  a.mode = parse_mode(j.at("mode").get<std::string>());
  for (std::size_t c = 0; c < kTwoCycles.size(); ++c) {
    a.two_cycle[c] =
        j.at("two_cycle").at(pair_key(kTwoCycles[c].src, kTwoCycles[c].dst));
  }
  for (std::size_t c = 0; c < kThreeCycles.size(); ++c) {
    a.three_cycle[c] = j.at("three_cycle").at(cycle_key(kThreeCycles[c]));
  }
  for (std::size_t k = 0; k < kPairs.size(); ++k) {
    a.uni[k] = j.at("uni").at(pair_key(kPairs[k].src, kPairs[k].dst));
  }
  return a;
}

Json to_json(const SubChannelPlan& plan) {
  Json entries = Json::array();
  for (const auto& e : plan.entries) {
    if (const auto* b = std::get_if<BiDir>(&e)) {
      entries.push_back(Json{{"kind", "bidir"},
                             {"pair", {b->pair.src, b->pair.dst}},
                             {"sub", b->sub}});
    } else if (const auto* c = std::get_if<Cyclic>(&e)) {
      entries.push_back(Json{{"kind", "cyclic"},
                             {"cycle", {c->cycle[0], c->cycle[1], c->cycle[2]}},
                             {"subs", {c->subs[0], c->subs[1]}}});
    } else {
      const auto& u = std::get<Uni>(e);
      entries.push_back(Json{{"kind", "uni"},
                             {"pair", {u.pair.src, u.pair.dst}},
                             {"sub", u.sub}});
    }
  }
  return entries;
}

SubChannelPlan plan_from_json(const Json& j, int total_subchannels) {
  SubChannelPlan plan;
  plan.total_subchannels = total_subchannels;
  for (const auto& e : j) {
    const auto kind = e.at("kind").get<std::string>();
    if (kind == "bidir") {
      plan.entries.emplace_back(
          BiDir{{e.at("pair").at(0), e.at("pair").at(1)}, e.at("sub")});
    } else if (kind == "cyclic") {
      const auto& c = e.at("cycle");
      const auto& s = e.at("subs");
      plan.entries.emplace_back(Cyclic{{c.at(0), c.at(1), c.at(2)},
                                       {s.at(0), s.at(1)}});
    } else if (kind == "uni") {
      plan.entries.emplace_back(
          Uni{{e.at("pair").at(0), e.at("pair").at(1)}, e.at("sub")});
    } else {
      throw InvalidInput("unknown plan entry kind '" + kind + "'");
    }
  }
  return plan;
}

Json to_json(const PlanOutcome& outcome) {
  Json j = to_json(outcome.allocation);
  j["plan"] = outcome.plan ? to_json(*outcome.plan) : Json(nullptr);
  j["n_s"] = outcome.n_s;
  j["feasible"] = outcome.feasible();
  j["relay_antennas"] = outcome.relay_antennas;
  j["dof"] = to_json(outcome.allocation.demand());
  j["schema_version"] = kSchemaVersion;
  return j;
}

PlanOutcome plan_outcome_from_json(const Json& j) {
  PlanOutcome out;
  out.allocation = allocation_from_json(j);
  out.n_s = j.at("n_s");
  out.relay_antennas = j.at("relay_antennas");
  if (!j.at("plan").is_null()) {
    out.plan = plan_from_json(j.at("plan"), out.n_s);
  }
  if (out.feasible() != j.at("feasible").get<bool>()) {
    throw InvalidInput("'feasible' disagrees with the presence of a plan");
  }
  return out;
}

Json to_json(const ChannelSet& ch) {
  Json up = Json::array();
  Json down = Json::array();
  for (int i = 0; i < kUsers; ++i) {
    up.push_back(matrix_json(ch.uplink[i]));
    down.push_back(matrix_json(ch.downlink[i]));
  }
  return Json{{"schema_version", kSchemaVersion},
              {"M", ch.user_antennas},
              {"N", ch.relay_antennas},
              {"uplink", std::move(up)},
              {"downlink", std::move(down)}};
}

ChannelSet channels_from_json(const Json& j) {
  ChannelSet ch;
  ch.user_antennas = j.at("M");
  ch.relay_antennas = j.at("N");
  for (int i = 0; i < kUsers; ++i) {
    ch.uplink[i] = matrix_from(j.at("uplink").at(i), ch.relay_antennas,
                               ch.user_antennas);
    ch.downlink[i] = matrix_from(j.at("downlink").at(i), ch.user_antennas,
                                 ch.relay_antennas);
  }
  return ch;
}

Json to_json(const SimConfig& cfg) {
  return Json{{"schema_version", kSchemaVersion},
              {"M", cfg.user_antennas},
              {"N", cfg.relay_antennas},
              {"dof", to_json(cfg.dof)},
              {"mode", to_string(cfg.mode)},
              {"snr_grid_db", cfg.snr_grid_db},
              {"trials_per_point", cfg.trials_per_point},
              {"channel_seed", cfg.channel_seed},
              {"noise_seed", cfg.noise_seed},
              {"cancellation", to_string(cfg.cancellation)},
              {"constellation", to_string(cfg.constellation)},
              {"noise", cfg.noise == Noise::kOn},
              {"power_split", cfg.power_split == PowerSplit::kUniform
                                  ? "uniform"
                                  : "active-only"},
              {"channel_draws", cfg.channel_draws}};
}

SimConfig sim_config_from_json(const Json& j) {
  static const std::set<std::string> known = {
      "schema_version", "M",           "N",             "dof",
      "mode",           "snr_grid_db", "trials_per_point", "channel_seed",
      "noise_seed",     "cancellation", "constellation", "noise",
      "power_split",    "channel_draws"};
  if (!j.is_object()) throw InvalidInput("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      throw InvalidInput("unknown config key '" + key + "'");
    }
  }
  SimConfig cfg;
  try {
    if (j.contains("M")) cfg.user_antennas = j["M"];
    if (j.contains("N")) cfg.relay_antennas = j["N"];
    if (j.contains("dof")) cfg.dof = dof_from_json(j["dof"]);
    if (j.contains("mode")) cfg.mode = parse_mode(j["mode"]);
    if (j.contains("snr_grid_db")) {
      cfg.snr_grid_db = j["snr_grid_db"].get<std::vector<double>>();
    }
    if (j.contains("trials_per_point")) {
      cfg.trials_per_point = j["trials_per_point"];
    }
    if (j.contains("channel_seed")) cfg.channel_seed = j["channel_seed"];
    if (j.contains("noise_seed")) cfg.noise_seed = j["noise_seed"];
    if (j.contains("cancellation")) {
      cfg.cancellation = parse_cancellation(j["cancellation"]);
    }
    if (j.contains("constellation")) {
      cfg.constellation = parse_constellation(j["constellation"]);
    }
    if (j.contains("noise")) {
      cfg.noise = j["noise"].get<bool>() ? Noise::kOn : Noise::kOff;
    }
    if (j.contains("power_split")) {
      const auto s = j["power_split"].get<std::string>();
      if (s == "uniform") {
        cfg.power_split = PowerSplit::kUniform;
      } else if (s == "active-only") {
        cfg.power_split = PowerSplit::kActiveOnly;
      } else {
        throw InvalidInput("unknown power_split '" + s + "'");
      }
    }
    if (j.contains("channel_draws")) cfg.channel_draws = j["channel_draws"];
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("bad config value: ") + e.what());
  }
  return cfg;
}

Json to_json(const SweepResult& r) {
  Json streams = Json::array();
  for (const auto& s : r.streams) streams.push_back(stream_json(s));
  Json samples = Json::array();
  for (const auto& row : r.samples) {
    Json jr = Json::array();
    for (const auto& s : row) {
      jr.push_back(Json{{"sinr_db", number(s.sinr_db)},
                        {"rate_bits", number(s.rate_bits)},
                        {"ser", s.ser ? number(*s.ser) : Json(nullptr)}});
    }
    samples.push_back(std::move(jr));
  }
  Json sum_rate = Json::array();
  for (double x : r.sum_rate) sum_rate.push_back(number(x));
  Json j{{"schema_version", kSchemaVersion},
         {"snr_db", r.snr_db},
         {"streams", std::move(streams)},
         {"samples", std::move(samples)},
         {"sum_rate", std::move(sum_rate)},
         {"slopes_fitted", r.slopes_fitted}};
  if (r.slopes_fitted) {
    Json fits = Json::array();
    for (const auto& f : r.stream_fits) fits.push_back(fit_json(f));
    j["stream_fits"] = std::move(fits);
    j["sum_fit"] = fit_json(r.sum_fit);
    j["sum_dof"] = number(r.sum_dof);
  }
  return j;
}

SweepResult sweep_from_json(const Json& j) {
  SweepResult r;
  r.snr_db = j.at("snr_db").get<std::vector<double>>();
  for (const auto& s : j.at("streams")) {
    r.streams.push_back({{s.at("src"), s.at("dst")},
                         parse_strategy(s.at("strategy"))});
  }
  for (const auto& jr : j.at("samples")) {
    std::vector<StreamSample> row;
    for (const auto& s : jr) {
      StreamSample x;
      x.sinr_db = number_from(s.at("sinr_db"));
      x.rate_bits = number_from(s.at("rate_bits"));
      if (!s.at("ser").is_null()) x.ser = number_from(s.at("ser"));
      row.push_back(x);
    }
    r.samples.push_back(std::move(row));
  }
  for (const auto& x : j.at("sum_rate")) r.sum_rate.push_back(number_from(x));
  r.slopes_fitted = j.at("slopes_fitted");
  if (r.slopes_fitted) {
    for (const auto& f : j.at("stream_fits")) r.stream_fits.push_back(fit_from(f));
    r.sum_fit = fit_from(j.at("sum_fit"));
    r.sum_dof = number_from(j.at("sum_dof"));
  }
  return r;
}

Json to_json(const SerTable& t) {
  Json streams = Json::array();
  for (const auto& s : t.streams) streams.push_back(stream_json(s));
  return Json{{"schema_version", kSchemaVersion},
              {"snr_db", t.snr_db},
              {"streams", std::move(streams)},
              {"ser", t.ser}};
}

Json to_json(const InseparabilityReport& r) {
  return Json{{"schema_version", kSchemaVersion},
              {"relay_antennas", r.relay_antennas},
              {"dof", to_json(r.tuple)},
              {"joint", to_json(r.joint)},
              {"separable", to_json(r.separable)},
              {"inseparable", r.inseparable()}};
}

std::string sweep_csv(const SweepResult& r) {
  std::string out = std::string(kSweepCsvHeader) + "\n";
  for (std::size_t p = 0; p < r.samples.size(); ++p) {
    for (std::size_t k = 0; k < r.streams.size(); ++k) {
      const auto& s = r.samples[p][k];
      out += format_double(r.snr_db[p]) + "," +
             std::to_string(r.streams[k].pair.src) + "," +
             std::to_string(r.streams[k].pair.dst) + "," +
             to_string(r.streams[k].strategy) + "," + format_double(s.sinr_db) +
             "," + format_double(s.rate_bits) + "," +
             (s.ser ? format_double(*s.ser) : std::string()) + "\n";
    }
  }
  return out;
}

SweepResult sweep_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kSweepCsvHeader) {
    throw InvalidInput("sweep CSV must start with the header '" +
                       std::string(kSweepCsvHeader) + "'");
  }
  SweepResult r;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != 7) {
      throw InvalidInput("sweep CSV row needs 7 fields: '" + line + "'");
    }
    const double snr = parse_double(cells[0]);
    const StreamInfo info{{parse_int(cells[1]), parse_int(cells[2])},
                          parse_strategy(cells[3])};
    StreamSample s;
    s.sinr_db = parse_double(cells[4]);
    s.rate_bits = parse_double(cells[5]);
    if (!cells[6].empty()) s.ser = parse_double(cells[6]);

    if (r.snr_db.empty() || r.snr_db.back() != snr) {
      r.snr_db.push_back(snr);
      r.samples.emplace_back();
    }
    if (r.snr_db.size() == 1) r.streams.push_back(info);
    const std::size_t k = r.samples.back().size();
    if (k >= r.streams.size() || !(r.streams[k] == info)) {
      throw InvalidInput("sweep CSV streams differ between SNR points");
    }
    r.samples.back().push_back(s);
  }
  for (const auto& row : r.samples) {
    if (row.size() != r.streams.size()) {
      throw InvalidInput("sweep CSV has a ragged SNR point");
    }
    double sum = 0.0;
    for (const auto& s : row) sum += s.rate_bits;
    r.sum_rate.push_back(sum);
  }
  return r;
}

std::string ser_csv(const SerTable& t) {
  std::string out = "snr_db,stream_src,stream_dst,strategy,ser\n";
  for (std::size_t p = 0; p < t.snr_db.size(); ++p) {
    for (std::size_t k = 0; k < t.streams.size(); ++k) {
      out += format_double(t.snr_db[p]) + "," +
             std::to_string(t.streams[k].pair.src) + "," +
             std::to_string(t.streams[k].pair.dst) + "," +
             to_string(t.streams[k].strategy) + "," +
             format_double(t.ser[p][k]) + "\n";
    }
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  os << content;
  os.flush();
  if (!os) throw Error("failed writing '" + path.string() + "'");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace ychan
