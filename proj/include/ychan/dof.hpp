#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ychan {

inline constexpr int kUsers = 3;

// Ordered user pair (source, destination), users numbered 1..3.
struct Pair {
  int src = 1;
  int dst = 2;

  friend bool operator==(const Pair&, const Pair&) = default;
};

// The six ordered pairs in tuple order (12, 13, 21, 23, 31, 32).
inline constexpr std::array<Pair, 6> kPairs = {
    {{1, 2}, {1, 3}, {2, 1}, {2, 3}, {3, 1}, {3, 2}}};

// Position of d_ij inside a DofTuple.
constexpr std::size_t pair_index(int i, int j) {
  // Row i contributes two slots; the destination skips i itself.
  return static_cast<std::size_t>(2 * (i - 1) + (j < i ? j - 1 : j - 2));
}

/// Demand vector d = (d12, d13, d21, d23, d31, d32).
///
/// Components are non-negative reals; construction rejects anything else.
class DofTuple {
 public:
  DofTuple() = default;
  explicit DofTuple(const std::array<double, 6>& values);

  double operator()(int i, int j) const { return v_[pair_index(i, j)]; }
  double operator[](std::size_t k) const { return v_[k]; }
  const std::array<double, 6>& values() const { return v_; }

  bool is_integer() const;
  double sum() const;

  // Relabel users: user u becomes perm[u-1].
  DofTuple relabeled(const std::array<int, 3>& perm) const;

  std::string to_string() const;

  friend bool operator==(const DofTuple&, const DofTuple&) = default;

 private:
  std::array<double, 6> v_{};
};

// Parses "d12,d13,d21,d23,d31,d32". Throws InvalidInput naming the bad token.
DofTuple parse_dof(std::string_view text);

/// One face of the region: d_{p1p2} + d_{p1p3} + d_{p2p3} <= N.
struct RegionBound {
  std::array<int, 3> perm{1, 2, 3};
  int rhs = 1;

  std::array<Pair, 3> pairs() const {
    return {{{perm[0], perm[1]}, {perm[0], perm[2]}, {perm[1], perm[2]}}};
  }
  double lhs(const DofTuple& d) const;
};

// All six permutations of {1,2,3} in lexicographic order.
const std::array<std::array<int, 3>, 6>& permutations();

std::array<RegionBound, 6> region_bounds(int relay_antennas);

/// Bounds violated by d. Integer tuples compare exactly; real tuples use a
/// 1e-9 slack so points on a face are inside.
std::vector<RegionBound> violated_bounds(const DofTuple& d, int relay_antennas);

bool region_contains(const DofTuple& d, int relay_antennas);

// Sum of the bounds for p=(1,2,3) and p=(3,2,1): the largest component sum
// reachable inside the region.
int sum_dof(int relay_antennas);

// Relay dimensions consumed if every stream were forwarded on its own.
double unidirectional_dim_bound(const DofTuple& d);

/// Message-flow graph: an edge i->j for every d_ij > 0.
class FlowGraph {
 public:
  FlowGraph() = default;
  explicit FlowGraph(const std::array<double, 6>& weights);

  bool has_edge(int i, int j) const { return w_[pair_index(i, j)] > 0.0; }
  double weight(int i, int j) const { return w_[pair_index(i, j)]; }
  std::vector<Pair> edges() const;
  std::size_t edge_count() const { return edges().size(); }

 private:
  std::array<double, 6> w_{};
};

FlowGraph build_flow_graph(const DofTuple& d);
FlowGraph build_flow_graph(const RegionBound& b);

enum class CycleKind { kTwo, kThree };

// Cycle in canonical rotation (smallest vertex first). Two-cycles leave
// vertices[2] = 0.
struct CycleId {
  CycleKind kind = CycleKind::kTwo;
  std::array<int, 3> vertices{};

  std::size_t length() const { return kind == CycleKind::kTwo ? 2 : 3; }
  std::vector<Pair> edges() const;
  std::string to_string() const;

  friend bool operator==(const CycleId&, const CycleId&) = default;
};

CycleId canonical_cycle(std::vector<int> vertices);

// The five cycles possible on three nodes, in reporting order.
const std::array<CycleId, 5>& all_cycles();

std::vector<CycleId> enumerate_cycles(const FlowGraph& g);

struct BoundProperties {
  std::size_t edge_count = 0;
  bool has_cycles = false;
};

BoundProperties check_bound_properties(const RegionBound& b);

}  // namespace ychan
