#include "ychan/serialize.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>

#include "ychan/error.hpp"

namespace ychan {
namespace {

const DofTuple kToy({2, 0, 1, 1, 1, 0});

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ychan_" + name);
}

TEST(AllocationJson, ToySchema) {
  const auto j = to_json(build_plan(allocate(kToy, Mode::kJoint), 3));
  EXPECT_EQ(j["mode"], "joint");
  EXPECT_EQ(j["two_cycle"], Json::parse(R"({"12":1,"13":0,"23":0})"));
  EXPECT_EQ(j["three_cycle"], Json::parse(R"({"123":1,"132":0})"));
  EXPECT_EQ(j["uni"],
            Json::parse(R"({"12":0,"13":0,"21":0,"23":0,"31":0,"32":0})"));
  EXPECT_EQ(j["plan"], Json::parse(R"([{"kind":"bidir","pair":[1,2],"sub":0},
                                      {"kind":"cyclic","cycle":[1,2,3],"subs":[1,2]}])"));
  EXPECT_EQ(j["n_s"], 3);
  EXPECT_EQ(j["feasible"], true);
}

TEST(AllocationJson, InfeasibleHasNullPlan) {
  const auto j = to_json(build_plan(allocate(kToy, Mode::kSeparable), 3));
  EXPECT_TRUE(j["plan"].is_null());
  EXPECT_EQ(j["n_s"], 4);
  EXPECT_EQ(j["feasible"], false);
}

TEST(AllocationJson, RoundTripProperty) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> u(0, 3);
  for (int t = 0; t < 500; ++t) {
    std::array<double, 6> v{};
    for (auto& x : v) x = u(rng);
    const auto mode = t % 2 ? Mode::kJoint : Mode::kSeparable;
    const auto o = build_plan(allocate(DofTuple(v), mode), 1 + t % 6);
    const auto back = plan_outcome_from_json(Json::parse(to_json(o).dump()));
    EXPECT_EQ(back.allocation, o.allocation);
    EXPECT_EQ(back.n_s, o.n_s);
    EXPECT_EQ(back.relay_antennas, o.relay_antennas);
    EXPECT_EQ(back.plan, o.plan);
  }
}

TEST(DofJson, ArrayOfSix) {
  EXPECT_EQ(to_json(kToy).dump(), "[2.0,0.0,1.0,1.0,1.0,0.0]");
  EXPECT_EQ(dof_from_json(Json::parse("[2,0,1,1,1,0]")), kToy);
  EXPECT_THROW(dof_from_json(Json::parse("[1,2]")), InvalidInput);
  EXPECT_THROW(dof_from_json(Json::parse("[1,2,3,4,5,\"x\"]")), InvalidInput);
}

TEST(ChannelJson, RowMajorPairsRoundTrip) {
  const auto ch = sample_channels(4, 2, 3);
  const auto j = to_json(ch);
  ASSERT_EQ(j["uplink"][0].size(), 2u);     // N rows
  ASSERT_EQ(j["uplink"][0][0].size(), 4u);  // M columns
  EXPECT_EQ(j["uplink"][0][1][2][0].get<double>(), ch.uplink[0](1, 2).real());
  EXPECT_EQ(j["uplink"][0][1][2][1].get<double>(), ch.uplink[0](1, 2).imag());
  const auto back = channels_from_json(Json::parse(j.dump()));
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(back.uplink[i], ch.uplink[i]);
    EXPECT_EQ(back.downlink[i], ch.downlink[i]);
  }
}

TEST(SimConfigJson, RoundTripAndValidation) {
  SimConfig cfg;
  cfg.dof = kToy;
  cfg.snr_grid_db = {0, 12.5, 30};
  cfg.channel_seed = 18446744073709551615ull;
  cfg.constellation = Constellation::kQpsk;
  cfg.cancellation = Cancellation::kDecisionDirected;
  cfg.power_split = PowerSplit::kActiveOnly;
  cfg.noise = Noise::kOff;
  EXPECT_EQ(sim_config_from_json(Json::parse(to_json(cfg).dump())), cfg);
  EXPECT_THROW(sim_config_from_json(Json::parse(R"({"trials":3})")), InvalidInput);
  EXPECT_THROW(sim_config_from_json(Json::parse(R"({"mode":"both"})")), InvalidInput);
  const auto partial = sim_config_from_json(Json::parse(R"({"N":2})"));
  EXPECT_EQ(partial.relay_antennas, 2);
  EXPECT_EQ(partial.user_antennas, 3);
}

SweepResult small_sweep(Noise noise, Constellation c) {
  SimConfig cfg;
  cfg.dof = kToy;
  cfg.snr_grid_db = {10, 20, 30};
  cfg.trials_per_point = 10;
  cfg.noise = noise;
  cfg.constellation = c;
  return run_sweep(cfg);
}

TEST(SweepCsv, HeaderExact) {
  const auto csv = sweep_csv(small_sweep(Noise::kOn, Constellation::kGaussian));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "snr_db,stream_src,stream_dst,strategy,sinr_db,rate_bits,ser");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3 * 5);
}

TEST(SweepCsv, RoundTripLossless) {
  for (auto c : {Constellation::kGaussian, Constellation::kQpsk}) {
    auto r = small_sweep(Noise::kOn, c);
    const auto back = sweep_from_csv(sweep_csv(r));
    r.slopes_fitted = false;
    r.stream_fits.clear();
    r.sum_fit = {};
    r.sum_dof = 0.0;
    EXPECT_EQ(back, r);
    EXPECT_EQ(sweep_csv(back), sweep_csv(r));
  }
  EXPECT_THROW(sweep_from_csv("snr,x\n"), InvalidInput);
}

TEST(SweepJson, RoundTripLossless) {
  for (auto noise : {Noise::kOn, Noise::kOff}) {
    const auto r = small_sweep(noise, Constellation::kQpsk);
    const auto text = to_json(r).dump();
    EXPECT_EQ(sweep_from_json(Json::parse(text)), r);
  }
}

TEST(FormatDouble, ShortestRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 1e300, -2.5e-310, 123456789.0}) {
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Files, WriteReadAndErrorContext) {
  const auto p = temp_path("rt.json");
  write_file(p, "hello\n");
  EXPECT_EQ(read_file(p), "hello\n");
  std::filesystem::remove(p);
  try {
    write_file("/nonexistent-dir/x.csv", "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/x.csv"),
              std::string::npos);
  }
  EXPECT_THROW(read_file("/nonexistent-dir/y.json"), Error);
}

TEST(Files, PersistedAllocationRereads) {
  const auto o = build_plan(allocate(kToy, Mode::kJoint), 3);
  const auto p = temp_path("alloc.json");
  write_file(p, to_json(o).dump(2));
  const auto back = plan_outcome_from_json(Json::parse(read_file(p)));
  EXPECT_EQ(back.allocation, o.allocation);
  EXPECT_EQ(back.plan, o.plan);
  std::filesystem::remove(p);
}

}  // namespace
}  // namespace ychan
