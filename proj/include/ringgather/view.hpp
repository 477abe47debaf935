#pragma once
// What a robot can see: the segment-distance sequence around the ring in both
// directions (towers are invisible remotely), plus the multiplicity bit for
// its own node.

#include <compare>

#include "ringgather/ring.hpp"

namespace ringgather {

// `sequence` is the lexicographic maximum of the two direction sequences and
// always sums to n. `symmetric` marks the case where both directions agree.
// Comparison deliberately ignores the multiplicity bit; see compare_views.
struct View {
  std::vector<int> sequence;
  bool multiplicity = false;
  bool symmetric = false;

  bool operator==(const View&) const = default;
};

// The raw distance sequence seen from `robot` walking in one direction.
// step = +1 walks clockwise, -1 counterclockwise.
std::vector<int> direction_sequence(const Configuration& c, NodeIndex robot, int step);

View view_at(const Configuration& c, NodeIndex robot);  // requires an occupied node

// Lexicographic order on the sequences only. Sequences of different length
// never belong to the same ring instant, so that case is rejected.
std::strong_ordering compare_views(const View& a, const View& b);

// All candidates whose view is maximal among the candidates.
std::vector<NodeIndex> max_view_nodes(const Configuration& c,
                                      const std::vector<NodeIndex>& candidates);

}  // namespace ringgather
