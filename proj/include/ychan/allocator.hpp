#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ychan/dof.hpp"

namespace ychan {

enum class Mode { kJoint, kSeparable };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

// Two-cycle order: (1,2), (1,3), (2,3).
inline constexpr std::array<Pair, 3> kTwoCycles = {{{1, 2}, {1, 3}, {2, 3}}};
// Three-cycle order: (1,2,3), (1,3,2).
inline constexpr std::array<std::array<int, 3>, 2> kThreeCycles = {
    {{1, 2, 3}, {1, 3, 2}}};

/// Per-strategy DoF split of an integer demand.
///
/// Residual consistency: d_ij = two_cycle(i,j) + three_cycle(c containing
/// i->j) + uni(i,j) for every ordered pair.
struct Allocation {
  Mode mode = Mode::kJoint;
  std::array<int, 3> two_cycle{};    // indexed like kTwoCycles
  std::array<int, 2> three_cycle{};  // indexed like kThreeCycles
  std::array<int, 6> uni{};          // indexed like kPairs

  int two(int i, int j) const;
  int uni_at(int i, int j) const { return uni[pair_index(i, j)]; }

  // Reconstructs the demanded tuple from the split.
  DofTuple demand() const;

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

// Which three-cycle slot (0 or 1) carries edge i->j.
std::size_t three_cycle_of(int i, int j);

struct TwoCycleStep {
  std::array<int, 3> two_cycle{};
  DofTuple residual;
};

struct ThreeCycleStep {
  std::array<int, 2> three_cycle{};
  DofTuple residual;
};

TwoCycleStep allocate_two_cycles(const DofTuple& d);
ThreeCycleStep allocate_three_cycles(const DofTuple& residual);

// Full greedy pipeline: pairs first, then (joint only) three-cycles, and the
// rest goes uni-directional. Feasibility is not checked here.
Allocation allocate(const DofTuple& d, Mode mode);

// Sub-channel count in closed form: sum d - sum two-cycles - sum three-cycles.
int subchannels_required(const Allocation& a);

// Same count from the per-strategy dimension costs (1, 2, 1).
int subchannel_cost(const Allocation& a);

struct BiDir {
  Pair pair;  // i < j
  int sub = 0;

  friend bool operator==(const BiDir&, const BiDir&) = default;
};

struct Cyclic {
  std::array<int, 3> cycle{};
  std::array<int, 2> subs{};

  friend bool operator==(const Cyclic&, const Cyclic&) = default;
};

struct Uni {
  Pair pair;
  int sub = 0;

  friend bool operator==(const Uni&, const Uni&) = default;
};

using PlanEntry = std::variant<BiDir, Cyclic, Uni>;

struct SubChannelPlan {
  std::vector<PlanEntry> entries;
  int total_subchannels = 0;

  friend bool operator==(const SubChannelPlan&, const SubChannelPlan&) = default;
};

struct Infeasible {
  int required = 0;
  int available = 0;
};

/// Result of build_plan: either a concrete plan or the infeasibility report.
struct PlanOutcome {
  Allocation allocation;
  int relay_antennas = 0;
  int n_s = 0;
  std::optional<SubChannelPlan> plan;

  bool feasible() const { return plan.has_value(); }
  Infeasible report() const { return {n_s, relay_antennas}; }
};

// Indices go bi-directional, cyclic, uni; lexicographic within each class.
PlanOutcome build_plan(const Allocation& a, int relay_antennas);

struct SumDofWitness {
  DofTuple tuple;
  SubChannelPlan plan;
};

// 2N DoF from bi-directional exchanges only. `split` gives the number of
// sub-channels per two-cycle (kTwoCycles order) and must sum to N.
SumDofWitness sum_dof_plan(int relay_antennas);
SumDofWitness sum_dof_plan(int relay_antennas, const std::array<int, 3>& split);

}  // namespace ychan
