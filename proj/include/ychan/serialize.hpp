#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ychan/allocator.hpp"
#include "ychan/phy.hpp"
#include "ychan/sim.hpp"

namespace ychan {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Exact CSV header of persisted sweeps.
inline constexpr const char* kSweepCsvHeader =
    "snr_db,stream_src,stream_dst,strategy,sinr_db,rate_bits,ser";

// Six numbers in tuple order.
Json to_json(const DofTuple& d);
DofTuple dof_from_json(const Json& j);

// Allocation plus plan: {"mode", "two_cycle", "three_cycle", "uni", "plan",
// "n_s", "feasible", ...}. "plan" is null when infeasible.
Json to_json(const PlanOutcome& outcome);
PlanOutcome plan_outcome_from_json(const Json& j);

Json to_json(const Allocation& a);
Allocation allocation_from_json(const Json& j);

Json to_json(const SubChannelPlan& plan);
SubChannelPlan plan_from_json(const Json& j, int total_subchannels);

// Matrices as arrays of rows of [re, im] pairs.
Json to_json(const ChannelSet& ch);
ChannelSet channels_from_json(const Json& j);

Json to_json(const SimConfig& cfg);
// Missing keys keep their defaults; unknown keys are rejected.
SimConfig sim_config_from_json(const Json& j);

Json to_json(const SweepResult& r);
SweepResult sweep_from_json(const Json& j);

Json to_json(const SerTable& t);
Json to_json(const InseparabilityReport& r);

// One row per (point, stream).
std::string sweep_csv(const SweepResult& r);
// Rebuilds snr grid, streams, samples and sum rates; fits are not in CSV.
SweepResult sweep_from_csv(const std::string& text);

std::string ser_csv(const SerTable& t);

// Shortest text that parses back to the same double ("inf", "-inf", "nan"
// for non-finite values).
std::string format_double(double x);

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace ychan
