#pragma once
// Ring occupancy model and the structural queries everything else is built on:
// holes, node blocks, d.blocks, symmetry classification.

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace ringgather {

using NodeIndex = int;

// Raised when a protocol rule or a safety monitor is broken at run time.
// `property` names the broken rule, e.g. "periodicity" or "scheduler-contract".
class protocol_error : public std::runtime_error {
 public:
  protocol_error(std::string property, const std::string& message)
      : std::runtime_error(message), property_(std::move(property)) {}
  const std::string& property() const { return property_; }

 private:
  std::string property_;
};

inline NodeIndex wrap(int i, int n) {
  int m = i % n;
  return m < 0 ? m + n : m;
}

// Edges walked clockwise (increasing index) from `from` to `to`.
inline int cw_distance(int n, NodeIndex from, NodeIndex to) { return wrap(to - from, n); }

// Graph distance on the ring, i.e. the shorter arc.
inline int ring_distance(int n, NodeIndex a, NodeIndex b) {
  int d = cw_distance(n, a, b);
  return std::min(d, n - d);
}

// Robot counts per node. k is the total; a node with count >= 2 hosts a tower.
class Configuration {
 public:
  Configuration() = default;
  Configuration(int n, std::vector<int> occupancy);

  // One robot per listed node; listing a node twice stacks a tower on it.
  static Configuration from_nodes(int n, const std::vector<NodeIndex>& nodes);

  int n() const { return n_; }
  int k() const { return k_; }
  int count(NodeIndex v) const { return occ_[wrap(v, n_)]; }
  bool occupied(NodeIndex v) const { return count(v) > 0; }
  bool tower_at(NodeIndex v) const { return count(v) >= 2; }
  const std::vector<int>& occupancy() const { return occ_; }
  std::vector<NodeIndex> occupied_nodes() const;  // ascending
  int occupied_count() const;

  void add_robots(NodeIndex v, int how_many);
  void move_robot(NodeIndex from, NodeIndex to);  // unconditional, may build a tower

  // Canonical text form "n=10;occ=1,1,1,0,0,1,0,1,0,0". parse() accepts exactly
  // what text() emits.
  std::string text() const;
  static Configuration parse(const std::string& s);

  bool operator==(const Configuration& other) const = default;

 private:
  int n_ = 0;
  int k_ = 0;
  std::vector<int> occ_;
};

// Maximal run of empty nodes; `start` is its first node clockwise.
struct Hole {
  NodeIndex start = 0;
  int size = 0;
  bool operator==(const Hole&) const = default;
};

// Maximal run of consecutive occupied nodes (size 1 allowed).
struct NodeBlock {
  NodeIndex start = 0;
  int size = 0;
  bool operator==(const NodeBlock&) const = default;
};

// Maximal chain of occupied nodes spaced exactly d apart, size >= 2. Members
// are listed in clockwise chain order. Occupied nodes in no chain are isolated.
struct DBlock {
  std::vector<NodeIndex> members;
  bool operator==(const DBlock&) const = default;
};

struct DBlockDecomposition {
  int d = 0;
  std::vector<DBlock> blocks;        // ordered by first member, ascending
  std::vector<NodeIndex> isolated;   // ascending
};

std::vector<Hole> holes(const Configuration& c);            // requires k >= 1
std::vector<NodeBlock> node_blocks(const Configuration& c); // requires k >= 1
int inter_distance(const Configuration& c);                 // requires two occupied nodes
DBlockDecomposition d_blocks(const Configuration& c);       // requires two occupied nodes

enum class SymmetryKind { Rigid, Symmetric, Periodic };

// For Symmetric, `reflection` is the smallest t in [0, n) whose map
// i -> (t - i) mod n fixes the occupied pattern. When the pattern is not
// periodic that map is unique, which several move rules rely on.
struct SymmetryClass {
  SymmetryKind kind = SymmetryKind::Rigid;
  int reflection = -1;
};

SymmetryClass classify_symmetry(const Configuration& c);

// True when the reflection map i -> (t - i) mod n fixes node v.
inline bool reflection_fixes(int n, int t, NodeIndex v) { return wrap(t - v, n) == wrap(v, n); }

bool is_gathered(const Configuration& c);

Configuration rotated(const Configuration& c, int r);    // node i moves to i + r
Configuration reflected(const Configuration& c, int t);  // node i moves to t - i

}  // namespace ringgather
