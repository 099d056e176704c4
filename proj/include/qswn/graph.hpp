#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace qswn {

// A shortcut between two ring vertices, 1-based with first < second.
struct Shortcut {
  int first = 0;
  int second = 0;

  friend bool operator==(const Shortcut&, const Shortcut&) = default;
  friend auto operator<=>(const Shortcut&, const Shortcut&) = default;
};

// Ring of n vertices with nearest-neighbour edges plus extra shortcut links.
//
// Invariants (checked on construction):
//   * n >= 3
//   * each shortcut has 1 <= first < second <= n
//   * no shortcut duplicates a ring edge (second - first not in {1, n-1})
//   * no pair appears twice
// Shortcuts are kept in generation order; serialization sorts them.
class SmallWorldGraph {
 public:
  SmallWorldGraph(int n, std::vector<Shortcut> shortcuts, std::uint64_t seed = 0,
                  bool strict_endpoints = false);

  int n() const noexcept { return n_; }
  const std::vector<Shortcut>& shortcuts() const noexcept { return shortcuts_; }
  std::size_t shortcut_count() const noexcept { return shortcuts_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  bool strict_endpoints() const noexcept { return strict_endpoints_; }

  // Degree of a 1-based vertex including both ring neighbours.
  std::vector<int> degrees() const;

  // Edge list: header `n <N> shortcuts <L> seed <seed>` followed by sorted pairs.
  void write_edge_list(std::ostream& out) const;
  std::string edge_list() const;
  static SmallWorldGraph read_edge_list(std::istream& in);

 private:
  int n_;
  std::vector<Shortcut> shortcuts_;
  std::uint64_t seed_;
  bool strict_endpoints_;
};

// True when {a, b} (1-based, a != b) is a ring edge of an n-cycle.
bool is_ring_edge(int n, int a, int b) noexcept;

// Number of vertex pairs not joined by a ring edge: n(n-3)/2.
std::uint64_t eligible_pair_count(int n);

// Largest shortcut count accepted by generate_small_world.
std::uint64_t shortcut_capacity(int n, bool strict_endpoints);

// round(p * n), ties away from zero.
std::size_t shortcut_count_from_density(int n, double p);

// Draws shortcut_count distinct eligible pairs uniformly without replacement.
// In strict mode every vertex carries at most one shortcut; pairs are then drawn
// sequentially, each uniform over the pairs still compatible with earlier ones.
SmallWorldGraph generate_small_world(int n, std::size_t shortcut_count, std::uint64_t seed,
                                     bool strict_endpoints = false);

}  // namespace qswn
