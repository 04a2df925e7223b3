#include "ychan/allocator.hpp"

#include <algorithm>
#include <numeric>

#include "ychan/error.hpp"

namespace ychan {

namespace {

std::array<int, 6> to_ints(const DofTuple& d) {
  if (!d.is_integer()) {
    throw IntegralityError("allocation needs an integer DoF tuple, got " +
                           d.to_string());
  }
  std::array<int, 6> out{};
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = static_cast<int>(d[k]);
  }
  return out;
}

DofTuple to_tuple(const std::array<int, 6>& v) {
  std::array<double, 6> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return DofTuple(out);
}

std::size_t two_cycle_slot(int i, int j) {
  const int lo = std::min(i, j);
  const int hi = std::max(i, j);
  return lo == 1 ? static_cast<std::size_t>(hi - 2) : 2;
}

}  // namespace

std::string to_string(Mode m) {
  return m == Mode::kJoint ? "joint" : "separable";
}

Mode parse_mode(const std::string& s) {
  if (s == "joint") return Mode::kJoint;
  if (s == "separable") return Mode::kSeparable;
  throw InvalidInput("unknown mode '" + s + "' (expected joint or separable)");
}

std::size_t three_cycle_of(int i, int j) {
  // (1,2,3) carries 1->2, 2->3, 3->1.
  return (j - i + 3) % 3 == 1 ? 0 : 1;
}

int Allocation::two(int i, int j) const { return two_cycle[two_cycle_slot(i, j)]; }

DofTuple Allocation::demand() const {
  std::array<int, 6> d{};
  for (std::size_t k = 0; k < kPairs.size(); ++k) {
    const auto [i, j] = kPairs[k];
    d[k] = two(i, j) + three_cycle[three_cycle_of(i, j)] + uni[k];
  }
  return to_tuple(d);
}

TwoCycleStep allocate_two_cycles(const DofTuple& d) {
  auto r = to_ints(d);
  TwoCycleStep step;
  for (std::size_t c = 0; c < kTwoCycles.size(); ++c) {
    const auto [i, j] = kTwoCycles[c];
    const int amount = std::min(r[pair_index(i, j)], r[pair_index(j, i)]);
    step.two_cycle[c] = amount;
    r[pair_index(i, j)] -= amount;
    r[pair_index(j, i)] -= amount;
  }
  step.residual = to_tuple(r);
  return step;
}

ThreeCycleStep allocate_three_cycles(const DofTuple& residual) {
  auto r = to_ints(residual);
  for (const auto& [i, j] : kTwoCycles) {
    if (r[pair_index(i, j)] > 0 && r[pair_index(j, i)] > 0) {
      throw ContractError("three-cycle allocation needs a residual free of "
                          "two-cycles; (" +
                          std::to_string(i) + "," + std::to_string(j) +
                          ") remains in " + residual.to_string());
    }
  }
  ThreeCycleStep step;
  for (std::size_t c = 0; c < kThreeCycles.size(); ++c) {
    const auto& v = kThreeCycles[c];
    const std::array<std::size_t, 3> edges = {pair_index(v[0], v[1]),
                                              pair_index(v[1], v[2]),
                                              pair_index(v[2], v[0])};
    const int amount = std::min({r[edges[0]], r[edges[1]], r[edges[2]]});
    step.three_cycle[c] = amount;
    for (auto e : edges) r[e] -= amount;
  }
  step.residual = to_tuple(r);
  return step;
}

Allocation allocate(const DofTuple& d, Mode mode) {
  Allocation a;
  a.mode = mode;
  auto paired = allocate_two_cycles(d);
  a.two_cycle = paired.two_cycle;
  DofTuple rest = paired.residual;
  if (mode == Mode::kJoint) {
    auto cycled = allocate_three_cycles(rest);
    a.three_cycle = cycled.three_cycle;
    rest = cycled.residual;
  }
  a.uni = to_ints(rest);
  return a;
}

int subchannels_required(const Allocation& a) {
  const auto d = to_ints(a.demand());
  return std::accumulate(d.begin(), d.end(), 0) -
         std::accumulate(a.two_cycle.begin(), a.two_cycle.end(), 0) -
         std::accumulate(a.three_cycle.begin(), a.three_cycle.end(), 0);
}

int subchannel_cost(const Allocation& a) {
  return std::accumulate(a.two_cycle.begin(), a.two_cycle.end(), 0) +
         2 * std::accumulate(a.three_cycle.begin(), a.three_cycle.end(), 0) +
         std::accumulate(a.uni.begin(), a.uni.end(), 0);
}

PlanOutcome build_plan(const Allocation& a, int relay_antennas) {
  if (relay_antennas < 1) {
    throw InvalidInput("relay antenna count must be >= 1");
  }
  PlanOutcome out;
  out.allocation = a;
  out.relay_antennas = relay_antennas;
  out.n_s = subchannels_required(a);
  if (out.n_s > relay_antennas) return out;

  SubChannelPlan plan;
  int next = 0;
  for (std::size_t c = 0; c < kTwoCycles.size(); ++c) {
    for (int n = 0; n < a.two_cycle[c]; ++n) {
      plan.entries.emplace_back(BiDir{kTwoCycles[c], next++});
    }
  }
  for (std::size_t c = 0; c < kThreeCycles.size(); ++c) {
    for (int n = 0; n < a.three_cycle[c]; ++n) {
      plan.entries.emplace_back(Cyclic{kThreeCycles[c], {next, next + 1}});
      next += 2;
    }
  }
  for (std::size_t k = 0; k < kPairs.size(); ++k) {
    for (int n = 0; n < a.uni[k]; ++n) {
      plan.entries.emplace_back(Uni{kPairs[k], next++});
    }
  }
  plan.total_subchannels = next;
  out.plan = std::move(plan);
  return out;
}

SumDofWitness sum_dof_plan(int relay_antennas) {
  return sum_dof_plan(relay_antennas, {relay_antennas, 0, 0});
}

SumDofWitness sum_dof_plan(int relay_antennas,
                           const std::array<int, 3>& split) {
  if (relay_antennas < 1) {
    throw InvalidInput("relay antenna count must be >= 1");
  }
  if (std::any_of(split.begin(), split.end(), [](int x) { return x < 0; }) ||
      std::accumulate(split.begin(), split.end(), 0) != relay_antennas) {
    throw InvalidInput("sum-DoF split must be non-negative and sum to N=" +
                       std::to_string(relay_antennas));
  }
  Allocation a;
  a.mode = Mode::kSeparable;
  a.two_cycle = split;
  auto outcome = build_plan(a, relay_antennas);
  return {a.demand(), *outcome.plan};
}

}  // namespace ychan
