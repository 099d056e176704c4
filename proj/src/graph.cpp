#include "qswn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "qswn/error.hpp"
#include "qswn/rng.hpp"

namespace qswn {

namespace {

std::uint64_t pair_key(int a, int b) {
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

Shortcut ordered(int a, int b) { return a < b ? Shortcut{a, b} : Shortcut{b, a}; }

void require_ring_size(int n) {
  if (n < 3) throw DomainError("small-world graph needs n >= 3, got " + std::to_string(n));
}

std::vector<Shortcut> all_eligible_pairs(int n) {
  std::vector<Shortcut> pairs;
  pairs.reserve(eligible_pair_count(n));
  for (int a = 1; a <= n; ++a) {
    for (int b = a + 2; b <= n; ++b) {
      if (!is_ring_edge(n, a, b)) pairs.push_back({a, b});
    }
  }
  return pairs;
}

// Non-strict: rejection sampling of uniform vertex pairs while the requested
// count is at most half of the eligible set, otherwise a partial shuffle of
// the enumerated pairs.
std::vector<Shortcut> sample_free(int n, std::size_t count, Rng& rng) {
  const std::uint64_t eligible = eligible_pair_count(n);
  std::vector<Shortcut> chosen;
  chosen.reserve(count);
  if (2 * count <= eligible) {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(2 * count);
    while (chosen.size() < count) {
      const int a = static_cast<int>(rng.below(n)) + 1;
      const int b = static_cast<int>(rng.below(n)) + 1;
      if (a == b || is_ring_edge(n, a, b)) continue;
      const Shortcut s = ordered(a, b);
      if (seen.insert(pair_key(s.first, s.second)).second) chosen.push_back(s);
    }
    return chosen;
  }
  std::vector<Shortcut> pairs = all_eligible_pairs(n);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pairs.size() - i));
    std::swap(pairs[i], pairs[j]);
    chosen.push_back(pairs[i]);
  }
  return chosen;
}

// One attempt at a strict (vertex-disjoint) draw; empty optional-like result
// signalled by returning false when the remaining free vertices admit no pair.
bool sample_strict_attempt(int n, std::size_t count, Rng& rng, std::vector<Shortcut>& chosen) {
  chosen.clear();
  std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
  constexpr int kRejectionTries = 64;
  while (chosen.size() < count) {
    bool placed = false;
    for (int attempt = 0; attempt < kRejectionTries && !placed; ++attempt) {
      const int a = static_cast<int>(rng.below(n)) + 1;
      const int b = static_cast<int>(rng.below(n)) + 1;
      if (a == b || used[a] || used[b] || is_ring_edge(n, a, b)) continue;
      chosen.push_back(ordered(a, b));
      used[a] = used[b] = 1;
      placed = true;
    }
    if (placed) continue;
    std::vector<Shortcut> candidates;
    for (int a = 1; a <= n; ++a) {
      if (used[a]) continue;
      for (int b = a + 2; b <= n; ++b) {
        if (!used[b] && !is_ring_edge(n, a, b)) candidates.push_back({a, b});
      }
    }
    if (candidates.empty()) return false;
    const Shortcut s = candidates[rng.below(candidates.size())];
    chosen.push_back(s);
    used[s.first] = used[s.second] = 1;
  }
  return true;
}

}  // namespace

SmallWorldGraph::SmallWorldGraph(int n, std::vector<Shortcut> shortcuts, std::uint64_t seed,
                                 bool strict_endpoints)
    : n_(n), shortcuts_(std::move(shortcuts)), seed_(seed), strict_endpoints_(strict_endpoints) {
  require_ring_size(n);
  if (shortcuts_.size() > shortcut_capacity(n, strict_endpoints)) {
    throw CapacityError("graph holds more shortcuts than its capacity");
  }
  std::unordered_set<std::uint64_t> seen;
  std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
  for (const Shortcut& s : shortcuts_) {
    if (s.first < 1 || s.second > n || s.first >= s.second) {
      throw DomainError("shortcut (" + std::to_string(s.first) + ", " + std::to_string(s.second) +
                        ") violates 1 <= first < second <= n");
    }
    if (is_ring_edge(n, s.first, s.second)) {
      throw DomainError("shortcut (" + std::to_string(s.first) + ", " + std::to_string(s.second) +
                        ") duplicates a ring edge");
    }
    if (!seen.insert(pair_key(s.first, s.second)).second) {
      throw DomainError("duplicate shortcut (" + std::to_string(s.first) + ", " +
                        std::to_string(s.second) + ")");
    }
    if (strict_endpoints) {
      if (used[s.first] || used[s.second]) {
        throw DomainError("strict graph reuses a shortcut endpoint");
      }
      used[s.first] = used[s.second] = 1;
    }
  }
}

std::vector<int> SmallWorldGraph::degrees() const {
  std::vector<int> deg(static_cast<std::size_t>(n_), 2);
  for (const Shortcut& s : shortcuts_) {
    ++deg[s.first - 1];
    ++deg[s.second - 1];
  }
  return deg;
}

void SmallWorldGraph::write_edge_list(std::ostream& out) const {
  std::vector<Shortcut> sorted = shortcuts_;
  std::sort(sorted.begin(), sorted.end());
  out << "n " << n_ << " shortcuts " << sorted.size() << " seed " << seed_ << '\n';
  for (const Shortcut& s : sorted) out << s.first << ' ' << s.second << '\n';
}

std::string SmallWorldGraph::edge_list() const {
  std::ostringstream out;
  write_edge_list(out);
  return out.str();
}

SmallWorldGraph SmallWorldGraph::read_edge_list(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw DomainError("edge list: missing header line");
  std::istringstream hs(header);
  std::string kn, ks, kseed;
  long long n = 0;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  if (!(hs >> kn >> n >> ks >> count >> kseed >> seed) || kn != "n" || ks != "shortcuts" ||
      kseed != "seed") {
    throw DomainError("edge list: malformed header '" + header + "'");
  }
  std::vector<Shortcut> shortcuts;
  shortcuts.reserve(count);
  int a = 0, b = 0;
  while (shortcuts.size() < count && in >> a >> b) shortcuts.push_back({a, b});
  if (shortcuts.size() != count) {
    throw DomainError("edge list: header announces " + std::to_string(count) + " shortcuts, found " +
                      std::to_string(shortcuts.size()));
  }
  return SmallWorldGraph(static_cast<int>(n), std::move(shortcuts), seed);
}

bool is_ring_edge(int n, int a, int b) noexcept {
  const int d = a > b ? a - b : b - a;
  return d == 1 || d == n - 1;
}

std::uint64_t eligible_pair_count(int n) {
  require_ring_size(n);
  const auto m = static_cast<std::uint64_t>(n);
  return m * (m - 3) / 2;
}

std::uint64_t shortcut_capacity(int n, bool strict_endpoints) {
  const std::uint64_t eligible = eligible_pair_count(n);
  if (!strict_endpoints) return eligible;
  return std::min<std::uint64_t>(eligible, static_cast<std::uint64_t>(n) / 2);
}

std::size_t shortcut_count_from_density(int n, double p) {
  require_ring_size(n);
  if (!(p >= 0.0) || !std::isfinite(p)) {
    throw DomainError("shortcut density must be a finite p >= 0");
  }
  const double product = p * static_cast<double>(n);
  if (product > static_cast<double>(eligible_pair_count(n))) {
    throw CapacityError("p*n = " + std::to_string(product) + " exceeds n(n-3)/2 = " +
                        std::to_string(eligible_pair_count(n)));
  }
  return static_cast<std::size_t>(std::round(product));
}

SmallWorldGraph generate_small_world(int n, std::size_t shortcut_count, std::uint64_t seed,
                                     bool strict_endpoints) {
  require_ring_size(n);
  const std::uint64_t capacity = shortcut_capacity(n, strict_endpoints);
  if (shortcut_count > capacity) {
    throw CapacityError("requested " + std::to_string(shortcut_count) + " shortcuts but n = " +
                        std::to_string(n) + " holds at most " + std::to_string(capacity) +
                        (strict_endpoints ? " vertex-disjoint ones" : ""));
  }
  Rng rng(seed);
  std::vector<Shortcut> chosen;
  if (!strict_endpoints) {
    chosen = sample_free(n, shortcut_count, rng);
  } else {
    constexpr int kMaxRestarts = 10000;
    int restarts = 0;
    while (!sample_strict_attempt(n, shortcut_count, rng, chosen)) {
      if (++restarts == kMaxRestarts) {
        throw CapacityError("could not place " + std::to_string(shortcut_count) +
                            " vertex-disjoint shortcuts on n = " + std::to_string(n));
      }
    }
  }
  return SmallWorldGraph(n, std::move(chosen), seed, strict_endpoints);
}

}  // namespace qswn
