#pragma once
// First-phase movement rules. They drive a tower-free configuration toward a
// single block of consecutive robots, classified by the d.block landscape.

#include <optional>

#include "ringgather/ring.hpp"

namespace ringgather {

enum class Phase1Type { Type1, Type2, Type3a, Type3b };

const char* phase1_type_name(Phase1Type t);

// A robot and the adjacent node it wants; `alt` is present only when the rule
// genuinely cannot prefer a side and the scheduler breaks the tie. By
// convention `target` is then the clockwise neighbor and `alt` the
// counterclockwise one.
struct MoveIntent {
  NodeIndex robot = 0;
  NodeIndex target = 0;
  std::optional<NodeIndex> alt;

  bool scheduler_choice() const { return alt.has_value(); }
  bool operator==(const MoveIntent&) const = default;
};

// Preconditions for both functions: tower-free, k >= 3, not periodic, and the
// pattern is not one of the second-phase classes (the executor dispatches).
// A tower raises protocol_error("phase1-tower"); so does a periodic pattern,
// which the rules cannot orient.
Phase1Type classify_phase1(const Configuration& c);

// The complete mover set for the configuration, ordered by robot node. Raises
// protocol_error("protocol-stuck") if the rules produce no mover.
std::vector<MoveIntent> phase1_moves(const Configuration& c);

}  // namespace ringgather
