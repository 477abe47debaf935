#pragma once
// Second-phase classes and movement rules. Once the occupied pattern matches
// one of these shapes the robots funnel onto a single tower-construction node,
// and that node never changes until gathering completes.

#include <optional>

#include "ringgather/phase1.hpp"
#include "ringgather/ring.hpp"

namespace ringgather {

enum class CspVariant { SingleBlock, BlockLeader, SemiSingleBlock, SemiTwin, SemiBlockLeader };

// Pattern-level class of the second phase. b0 carries the single parameter of
// one-parameter variants; b1 is used by BlockLeader and SemiBlockLeader. vt is
// the tower-construction node whenever the shape pins one down (a two-node
// SingleBlock does not; there the tower itself marks the spot).
struct CspClass {
  CspVariant variant = CspVariant::SingleBlock;
  int b0 = 0;
  int b1 = 0;
  std::optional<NodeIndex> vt;

  std::string label() const;
  bool operator==(const CspClass&) const = default;
};

// Classification looks at the occupied pattern only (towers invisible). For
// patterns with fewer than four empty nodes the shapes can overlap; then the
// matches must agree or the classification is refused. Such patterns are
// outside the protocol's k < n-3 bound and never generated.
std::optional<CspClass> classify_csp(const Configuration& c);

// Complete mover set, ordered by robot node. Ground truth is consulted for
// the two things the pattern cannot express: nodes already holding a tower
// never move, and in a two-node SingleBlock the single robot is found by its
// count. Intents may target an occupied node; that is how towers grow.
std::vector<MoveIntent> phase2_moves(const Configuration& c, const CspClass& cls);

}  // namespace ringgather
