#include "ringgather/phase2.hpp"

#include <cassert>

namespace ringgather {

std::string CspClass::label() const {
  switch (variant) {
    case CspVariant::SingleBlock: return "Csb(" + std::to_string(b0) + ")";
    case CspVariant::BlockLeader:
      return "Cbl(" + std::to_string(b0) + "," + std::to_string(b1) + ")";
    case CspVariant::SemiSingleBlock: return "Cssb(" + std::to_string(b0) + ")";
    case CspVariant::SemiTwin: return "Cst(" + std::to_string(b0) + ")";
    case CspVariant::SemiBlockLeader:
      return "Csbl(" + std::to_string(b0) + "," + std::to_string(b1) + ")";
  }
  return "?";
}

namespace {

struct Match {
  CspClass cls;
  std::vector<MoveIntent> movers;  // pattern-level; ground-truth filtering comes later
};

struct Run {
  NodeIndex start;
  int size;
  NodeIndex back;
  int gap_after;  // empty nodes between this run and the next one clockwise
};

// j-th node of a run counted 1-based from one of its ends, walking inward.
NodeIndex nth_from_start(int n, const Run& r, int j) { return wrap(r.start + j - 1, n); }
NodeIndex nth_from_back(int n, const Run& r, int j) { return wrap(r.back - j + 1, n); }

void match_two_runs(const Configuration& c, const Run& left, const Run& right,
                    std::vector<Match>& out) {
  // `left` precedes the shared size-1 hole clockwise.
  int n = c.n();
  NodeIndex hole = wrap(left.back + 1, n);

  for (bool b2_is_left : {true, false}) {
    const Run& B2 = b2_is_left ? left : right;
    const Run& B1 = b2_is_left ? right : left;

    if (B2.size == 1 && B1.size >= 2 && B1.size % 2 == 0) {
      CspClass cls{CspVariant::SemiSingleBlock, B1.size, 0, std::nullopt};
      cls.vt = b2_is_left ? nth_from_start(n, B1, B1.size / 2) : nth_from_back(n, B1, B1.size / 2);
      out.push_back({cls, {{B2.start, hole, std::nullopt}}});
    }
    if (B2.size == B1.size + 2) {
      NodeIndex vt = b2_is_left ? B2.back : B2.start;
      NodeIndex mover = b2_is_left ? wrap(vt - 1, n) : wrap(vt + 1, n);
      out.push_back({{CspVariant::SemiTwin, B1.size, 0, vt}, {{mover, vt, std::nullopt}}});
    }
  }
}

void match_three_runs(const Configuration& c, const Run& prev, const Run& b0, const Run& next,
                      std::vector<Match>& out) {
  // Both holes flanking b0 have size 1 here; prev and next are its flankers.
  int n = c.n();
  NodeIndex hole_before = wrap(b0.start - 1, n);
  NodeIndex hole_after = wrap(b0.back + 1, n);

  if (b0.size % 2 == 1 && prev.size == next.size) {
    CspClass cls{CspVariant::BlockLeader, b0.size, prev.size,
                 nth_from_start(n, b0, (b0.size + 1) / 2)};
    out.push_back({cls, {{prev.back, hole_before, std::nullopt},
                         {next.start, hole_after, std::nullopt}}});
  }
  if (b0.size % 2 == 0) {
    for (bool b2_is_next : {true, false}) {
      const Run& B2 = b2_is_next ? next : prev;
      const Run& B1 = b2_is_next ? prev : next;
      if (B2.size != B1.size + 1) continue;
      CspClass cls{CspVariant::SemiBlockLeader, b0.size, B1.size, std::nullopt};
      cls.vt = b2_is_next ? nth_from_back(n, b0, b0.size / 2) : nth_from_start(n, b0, b0.size / 2);
      NodeIndex mover = b2_is_next ? B2.start : B2.back;
      NodeIndex target = b2_is_next ? hole_after : hole_before;
      out.push_back({cls, {{mover, target, std::nullopt}}});
    }
  }
}

std::optional<Match> match_pattern(const Configuration& c) {
  if (c.k() < 1) return std::nullopt;
  std::vector<NodeBlock> nb = node_blocks(c);
  int n = c.n();
  int m = static_cast<int>(nb.size());
  if (nb[0].size == n) return std::nullopt;  // fully occupied ring, no holes to shape it

  std::vector<Run> runs;
  for (int i = 0; i < m; ++i) {
    Run r{nb[i].start, nb[i].size, wrap(nb[i].start + nb[i].size - 1, n), 0};
    r.gap_after = cw_distance(n, r.back, nb[(i + 1) % m].start) - 1;
    runs.push_back(r);
  }

  std::vector<Match> matches;
  if (m == 1) {
    const Run& r = runs[0];
    if (r.size == 1) {
      matches.push_back({{CspVariant::SingleBlock, 1, 0, r.start}, {}});
    } else if (r.size == 2) {
      matches.push_back({{CspVariant::SingleBlock, 2, 0, std::nullopt}, {}});
    } else if (r.size % 2 == 1) {
      NodeIndex vt = nth_from_start(n, r, (r.size + 1) / 2);
      matches.push_back({{CspVariant::SingleBlock, r.size, 0, vt},
                         {{wrap(vt - 1, n), vt, std::nullopt}, {wrap(vt + 1, n), vt, std::nullopt}}});
    }
  } else if (m == 2) {
    for (int i = 0; i < 2; ++i)
      if (runs[i].gap_after == 1) match_two_runs(c, runs[i], runs[(i + 1) % 2], matches);
  } else if (m == 3) {
    for (int i = 0; i < 3; ++i)
      if (runs[(i + 2) % 3].gap_after == 1 && runs[i].gap_after == 1)
        match_three_runs(c, runs[(i + 2) % 3], runs[i], runs[(i + 1) % 3], matches);
  }

  if (matches.empty()) return std::nullopt;
  // Overlapping shapes must agree on everything; this only triggers for
  // patterns with fewer than four empty nodes.
  for (const Match& m2 : matches)
    if (!(m2.cls == matches.front().cls)) return std::nullopt;
  return matches.front();
}

}  // namespace

std::optional<CspClass> classify_csp(const Configuration& c) {
  auto m = match_pattern(c);
  if (!m) return std::nullopt;
  return m->cls;
}

std::vector<MoveIntent> phase2_moves(const Configuration& c, const CspClass& cls) {
  auto m = match_pattern(c);
  if (!m || !(m->cls == cls))
    throw std::invalid_argument("configuration does not match the given class");

  std::vector<MoveIntent> out;
  if (cls.variant == CspVariant::SingleBlock && cls.b0 == 2) {
    // The robot that is alone on its node walks onto the neighboring tower.
    std::vector<NodeBlock> nb = node_blocks(c);
    NodeIndex a = nb[0].start;
    NodeIndex b = wrap(a + 1, c.n());
    if (c.count(a) == 1) out.push_back({a, b, std::nullopt});
    if (c.count(b) == 1) out.push_back({b, a, std::nullopt});
  } else {
    for (const MoveIntent& mi : m->movers)
      if (!c.tower_at(mi.robot)) out.push_back(mi);
  }
  std::sort(out.begin(), out.end(),
            [](const MoveIntent& a, const MoveIntent& b) { return a.robot < b.robot; });
  return out;
}

}  // namespace ringgather
