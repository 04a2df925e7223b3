#include "ychan/dof.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ychan/error.hpp"

namespace ychan {

namespace {

constexpr double kRealSlack = 1e-9;

bool all_integer(const std::array<double, 6>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::floor(x) == x; });
}

std::string format_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

DofTuple::DofTuple(const std::array<double, 6>& values) : v_(values) {
  for (std::size_t k = 0; k < v_.size(); ++k) {
    if (!std::isfinite(v_[k]) || v_[k] < 0.0) {
      throw InvalidInput("DoF component d" + std::to_string(kPairs[k].src) +
                         std::to_string(kPairs[k].dst) +
                         " must be a finite non-negative number, got " +
                         format_number(v_[k]));
    }
  }
}

bool DofTuple::is_integer() const { return all_integer(v_); }

double DofTuple::sum() const {
  return std::accumulate(v_.begin(), v_.end(), 0.0);
}

DofTuple DofTuple::relabeled(const std::array<int, 3>& perm) const {
  std::array<double, 6> out{};
  for (std::size_t k = 0; k < kPairs.size(); ++k) {
    const auto [i, j] = kPairs[k];
    out[pair_index(perm[i - 1], perm[j - 1])] = v_[k];
  }
  return DofTuple(out);
}

std::string DofTuple::to_string() const {
  std::string s = "(";
  for (std::size_t k = 0; k < v_.size(); ++k) {
    if (k) s += ",";
    s += format_number(v_[k]);
  }
  return s + ")";
}

DofTuple parse_dof(std::string_view text) {
  std::array<double, 6> values{};
  std::size_t count = 0;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    std::string token(text.substr(
        start, comma == std::string_view::npos ? std::string_view::npos
                                               : comma - start));
    // Trim surrounding blanks.
    const auto first = token.find_first_not_of(" \t");
    const auto last = token.find_last_not_of(" \t");
    token = first == std::string::npos ? "" : token.substr(first, last - first + 1);

    double value = 0.0;
    const auto res =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || res.ec != std::errc() ||
        res.ptr != token.data() + token.size()) {
      throw InvalidInput("malformed DoF component '" + token + "' in '" +
                         std::string(text) + "'");
    }
    if (count == values.size()) {
      throw InvalidInput("DoF tuple '" + std::string(text) +
                         "' has more than six components");
    }
    values[count++] = value;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (count != values.size()) {
    throw InvalidInput("DoF tuple '" + std::string(text) + "' has " +
                       std::to_string(count) +
                       " components, expected six (d12,d13,d21,d23,d31,d32)");
  }
  return DofTuple(values);
}

double RegionBound::lhs(const DofTuple& d) const {
  double s = 0.0;
  for (const auto& p : pairs()) s += d(p.src, p.dst);
  return s;
}

const std::array<std::array<int, 3>, 6>& permutations() {
  static const auto perms = [] {
    std::array<std::array<int, 3>, 6> out{};
    std::array<int, 3> p{1, 2, 3};
    std::size_t k = 0;
    do {
      out[k++] = p;
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
  }();
  return perms;
}

std::array<RegionBound, 6> region_bounds(int relay_antennas) {
  if (relay_antennas < 1) {
    throw InvalidInput("relay antenna count must be >= 1, got " +
                       std::to_string(relay_antennas));
  }
  std::array<RegionBound, 6> out{};
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = RegionBound{permutations()[k], relay_antennas};
  }
  return out;
}

std::vector<RegionBound> violated_bounds(const DofTuple& d,
                                         int relay_antennas) {
  const double slack = d.is_integer() ? 0.0 : kRealSlack;
  std::vector<RegionBound> out;
  for (const auto& b : region_bounds(relay_antennas)) {
    if (b.lhs(d) > static_cast<double>(b.rhs) + slack) out.push_back(b);
  }
  return out;
}

bool region_contains(const DofTuple& d, int relay_antennas) {
  return violated_bounds(d, relay_antennas).empty();
}

int sum_dof(int relay_antennas) {
  if (relay_antennas < 1) {
    throw InvalidInput("relay antenna count must be >= 1");
  }
  return 2 * relay_antennas;
}

double unidirectional_dim_bound(const DofTuple& d) { return d.sum(); }

FlowGraph::FlowGraph(const std::array<double, 6>& weights) : w_(weights) {}

std::vector<Pair> FlowGraph::edges() const {
  std::vector<Pair> out;
  for (std::size_t k = 0; k < kPairs.size(); ++k) {
    if (w_[k] > 0.0) out.push_back(kPairs[k]);
  }
  return out;
}

FlowGraph build_flow_graph(const DofTuple& d) { return FlowGraph(d.values()); }

FlowGraph build_flow_graph(const RegionBound& b) {
  std::array<double, 6> w{};
  for (const auto& p : b.pairs()) w[pair_index(p.src, p.dst)] = 1.0;
  return FlowGraph(w);
}

std::vector<Pair> CycleId::edges() const {
  const std::size_t n = length();
  std::vector<Pair> out;
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back({vertices[k], vertices[(k + 1) % n]});
  }
  return out;
}

std::string CycleId::to_string() const {
  std::string s = "(";
  for (std::size_t k = 0; k < length(); ++k) {
    if (k) s += ",";
    s += std::to_string(vertices[k]);
  }
  return s + ")";
}

CycleId canonical_cycle(std::vector<int> vertices) {
  if (vertices.size() != 2 && vertices.size() != 3) {
    throw InvalidInput("cycles on three nodes have length 2 or 3");
  }
  std::rotate(vertices.begin(),
              std::min_element(vertices.begin(), vertices.end()),
              vertices.end());
  CycleId c;
  c.kind = vertices.size() == 2 ? CycleKind::kTwo : CycleKind::kThree;
  std::copy(vertices.begin(), vertices.end(), c.vertices.begin());
  return c;
}

const std::array<CycleId, 5>& all_cycles() {
  static const std::array<CycleId, 5> cycles = {{
      {CycleKind::kTwo, {1, 2, 0}},
      {CycleKind::kTwo, {1, 3, 0}},
      {CycleKind::kTwo, {2, 3, 0}},
      {CycleKind::kThree, {1, 2, 3}},
      {CycleKind::kThree, {1, 3, 2}},
  }};
  return cycles;
}

std::vector<CycleId> enumerate_cycles(const FlowGraph& g) {
  std::vector<CycleId> out;
  for (const auto& c : all_cycles()) {
    const auto e = c.edges();
    if (std::all_of(e.begin(), e.end(),
                    [&](const Pair& p) { return g.has_edge(p.src, p.dst); })) {
      out.push_back(c);
    }
  }
  return out;
}

BoundProperties check_bound_properties(const RegionBound& b) {
  const FlowGraph g = build_flow_graph(b);
  return {g.edge_count(), !enumerate_cycles(g).empty()};
}

}  // namespace ychan
