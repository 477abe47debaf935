#include "ringgather/view.hpp"

namespace ringgather {

std::vector<int> direction_sequence(const Configuration& c, NodeIndex robot, int step) {
  if (!c.occupied(robot)) throw std::invalid_argument("views exist only for occupied nodes");
  int n = c.n();
  std::vector<int> seq;
  NodeIndex at = robot;
  do {
    int dist = 0;
    NodeIndex next = at;
    do {
      next = wrap(next + step, n);
      ++dist;
    } while (!c.occupied(next));
    seq.push_back(dist);
    at = next;
  } while (at != robot);
  return seq;
}

View view_at(const Configuration& c, NodeIndex robot) {
  std::vector<int> cw = direction_sequence(c, robot, +1);
  std::vector<int> ccw = direction_sequence(c, robot, -1);
  View v;
  v.symmetric = (cw == ccw);
  v.sequence = cw >= ccw ? std::move(cw) : std::move(ccw);
  v.multiplicity = c.tower_at(robot);
  return v;
}

std::strong_ordering compare_views(const View& a, const View& b) {
  if (a.sequence.size() != b.sequence.size())
    throw std::invalid_argument("views of different length are not comparable");
  return std::lexicographical_compare_three_way(a.sequence.begin(), a.sequence.end(),
                                                b.sequence.begin(), b.sequence.end());
}

std::vector<NodeIndex> max_view_nodes(const Configuration& c,
                                      const std::vector<NodeIndex>& candidates) {
  if (candidates.empty()) return {};
  std::vector<View> views;
  views.reserve(candidates.size());
  for (NodeIndex v : candidates) views.push_back(view_at(c, v));
  const View* best = &views[0];
  for (const View& v : views)
    if (compare_views(v, *best) > 0) best = &v;
  std::vector<NodeIndex> out;
  for (size_t i = 0; i < candidates.size(); ++i)
    if (compare_views(views[i], *best) == 0) out.push_back(candidates[i]);
  return out;
}

}  // namespace ringgather
