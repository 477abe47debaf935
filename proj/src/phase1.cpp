#include "ringgather/phase1.hpp"

#include <cassert>

#include "ringgather/view.hpp"

namespace ringgather {

const char* phase1_type_name(Phase1Type t) {
  switch (t) {
    case Phase1Type::Type1: return "Type1";
    case Phase1Type::Type2: return "Type2";
    case Phase1Type::Type3a: return "Type3a";
    case Phase1Type::Type3b: return "Type3b";
  }
  return "?";
}

namespace {

struct Neighbor {
  NodeIndex node;
  int dist;
};

// Nearest occupied node walking from `from` in the given direction, and how
// many edges away it is.
Neighbor next_occupied(const Configuration& c, NodeIndex from, int step) {
  int n = c.n();
  NodeIndex at = from;
  int dist = 0;
  do {
    at = wrap(at + step, n);
    ++dist;
  } while (!c.occupied(at));
  return {at, dist};
}

void check_preconditions(const Configuration& c) {
  if (c.k() < 3) throw std::invalid_argument("first phase needs at least three robots");
  for (NodeIndex v = 0; v < c.n(); ++v)
    if (c.tower_at(v))
      throw protocol_error("phase1-tower", "tower present in a first-phase configuration");
  if (classify_symmetry(c).kind == SymmetryKind::Periodic)
    throw protocol_error("phase1-periodic", "periodic pattern reached the first-phase rules");
}

bool all_blocks_same_size(const DBlockDecomposition& dec) {
  for (const DBlock& b : dec.blocks)
    if (b.members.size() != dec.blocks.front().members.size()) return false;
  return true;
}

int biggest_block_size(const DBlockDecomposition& dec) {
  size_t best = 0;
  for (const DBlock& b : dec.blocks) best = std::max(best, b.members.size());
  return static_cast<int>(best);
}

std::vector<bool> biggest_membership(const Configuration& c, const DBlockDecomposition& dec) {
  std::vector<bool> in_biggest(c.n(), false);
  int best = biggest_block_size(dec);
  for (const DBlock& b : dec.blocks)
    if (static_cast<int>(b.members.size()) == best)
      for (NodeIndex v : b.members) in_biggest[v] = true;
  return in_biggest;
}

Phase1Type classify_unchecked(const Configuration& c, const DBlockDecomposition& dec) {
  if (dec.d > 1 && dec.blocks.size() == 1 && dec.isolated.empty()) return Phase1Type::Type1;
  if (dec.isolated.empty() && all_blocks_same_size(dec)) return Phase1Type::Type2;

  std::vector<bool> in_biggest = biggest_membership(c, dec);
  for (NodeIndex r : dec.isolated)
    if (in_biggest[next_occupied(c, r, +1).node] || in_biggest[next_occupied(c, r, -1).node])
      return Phase1Type::Type3a;
  return Phase1Type::Type3b;
}

MoveIntent step_intent(const Configuration& c, NodeIndex robot, int step) {
  return {robot, wrap(robot + step, c.n()), std::nullopt};
}

// Direction pick for a robot pulled equally both ways: the side whose distance
// sequence is lexicographically larger wins, an exact tie is left to the
// scheduler.
MoveIntent pulled_both_ways(const Configuration& c, NodeIndex robot) {
  std::vector<int> cw = direction_sequence(c, robot, +1);
  std::vector<int> ccw = direction_sequence(c, robot, -1);
  if (cw == ccw) return {robot, wrap(robot + 1, c.n()), wrap(robot - 1, c.n())};
  return step_intent(c, robot, cw > ccw ? +1 : -1);
}

MoveIntent toward_nearest_biggest(const Configuration& c, NodeIndex robot,
                                  const std::vector<bool>& in_biggest) {
  Neighbor cw = next_occupied(c, robot, +1);
  Neighbor ccw = next_occupied(c, robot, -1);
  bool cw_ok = in_biggest[cw.node];
  bool ccw_ok = in_biggest[ccw.node];
  assert(cw_ok || ccw_ok);
  if (cw_ok && (!ccw_ok || cw.dist < ccw.dist)) return step_intent(c, robot, +1);
  if (ccw_ok && (!cw_ok || ccw.dist < cw.dist)) return step_intent(c, robot, -1);
  return pulled_both_ways(c, robot);
}

std::vector<MoveIntent> type1_moves(const Configuration& c, const DBlockDecomposition& dec) {
  const std::vector<NodeIndex>& m = dec.blocks.front().members;
  size_t mid = m.size() / 2;
  // Both neighbors of the axis robot step toward it through the d-sized gaps.
  std::vector<MoveIntent> out{step_intent(c, m[mid - 1], +1), step_intent(c, m[mid + 1], -1)};
  if (out[1].robot < out[0].robot) std::swap(out[0], out[1]);
  return out;
}

struct Border {
  NodeIndex node;
  int outward;  // +1 or -1
};

std::vector<MoveIntent> type2_moves(const Configuration& c, const DBlockDecomposition& dec) {
  std::vector<Border> borders;
  for (const DBlock& b : dec.blocks) {
    borders.push_back({b.members.front(), -1});
    borders.push_back({b.members.back(), +1});
  }

  std::vector<View> views;
  views.reserve(borders.size());
  for (const Border& b : borders) views.push_back(view_at(c, b.node));

  std::vector<size_t> order(borders.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    auto cmp = compare_views(views[a], views[b]);
    if (cmp != 0) return cmp > 0;
    return borders[a].node < borders[b].node;
  });

  // Walk the distinct view values from the top. A rank whose two robots face
  // each other across one shared gap sits on the axis of symmetry and
  // withdraws; the next rank is tried instead.
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i + 1;
    while (j < order.size() && compare_views(views[order[i]], views[order[j]]) == 0) ++j;
    std::vector<Border> rank;
    for (size_t t = i; t < j; ++t) rank.push_back(borders[order[t]]);

    bool face_to_face = false;
    if (rank.size() == 2) {
      const Border& a = rank[0];
      const Border& b = rank[1];
      face_to_face = next_occupied(c, a.node, a.outward).node == b.node &&
                     next_occupied(c, b.node, b.outward).node == a.node;
    }
    if (!face_to_face) {
      std::vector<MoveIntent> out;
      for (const Border& b : rank) out.push_back(step_intent(c, b.node, b.outward));
      std::sort(out.begin(), out.end(),
                [](const MoveIntent& a, const MoveIntent& b) { return a.robot < b.robot; });
      return out;
    }
    i = j;
  }
  throw protocol_error("protocol-stuck", "every border rank withdrew in a Type2 configuration");
}

std::vector<MoveIntent> type3_moves(const Configuration& c, const DBlockDecomposition& dec,
                                    Phase1Type type) {
  std::vector<bool> in_biggest = biggest_membership(c, dec);

  std::vector<NodeIndex> candidates;
  if (type == Phase1Type::Type3a) {
    // Isolated robots one hole away from a biggest block, nearest ones first.
    int best_dist = c.n() + 1;
    std::vector<std::pair<NodeIndex, int>> qualified;
    for (NodeIndex r : dec.isolated) {
      Neighbor cw = next_occupied(c, r, +1);
      Neighbor ccw = next_occupied(c, r, -1);
      int dist = c.n() + 1;
      if (in_biggest[cw.node]) dist = std::min(dist, cw.dist);
      if (in_biggest[ccw.node]) dist = std::min(dist, ccw.dist);
      if (dist <= c.n()) {
        qualified.push_back({r, dist});
        best_dist = std::min(best_dist, dist);
      }
    }
    for (auto [r, dist] : qualified)
      if (dist == best_dist) candidates.push_back(r);
  } else {
    // No such isolated robot exists; the pull falls on block robots outside
    // the biggest blocks that sit one hole away from one.
    for (const DBlock& b : dec.blocks) {
      if (in_biggest[b.members.front()]) continue;
      for (NodeIndex r : {b.members.front(), b.members.back()})
        if (in_biggest[next_occupied(c, r, +1).node] ||
            in_biggest[next_occupied(c, r, -1).node])
          candidates.push_back(r);
    }
  }

  std::vector<MoveIntent> out;
  for (NodeIndex r : max_view_nodes(c, candidates))
    out.push_back(toward_nearest_biggest(c, r, in_biggest));
  std::sort(out.begin(), out.end(),
            [](const MoveIntent& a, const MoveIntent& b) { return a.robot < b.robot; });
  if (out.empty())
    throw protocol_error("protocol-stuck", "no mover in a Type3 configuration");
  return out;
}

}  // namespace

Phase1Type classify_phase1(const Configuration& c) {
  check_preconditions(c);
  return classify_unchecked(c, d_blocks(c));
}

std::vector<MoveIntent> phase1_moves(const Configuration& c) {
  check_preconditions(c);
  DBlockDecomposition dec = d_blocks(c);
  switch (classify_unchecked(c, dec)) {
    case Phase1Type::Type1: return type1_moves(c, dec);
    case Phase1Type::Type2: return type2_moves(c, dec);
    case Phase1Type::Type3a: return type3_moves(c, dec, Phase1Type::Type3a);
    case Phase1Type::Type3b: return type3_moves(c, dec, Phase1Type::Type3b);
  }
  throw std::logic_error("unreachable");
}

}  // namespace ringgather
