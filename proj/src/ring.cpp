#include "ringgather/ring.hpp"

#include <charconv>

namespace ringgather {

Configuration::Configuration(int n, std::vector<int> occupancy) : n_(n), occ_(std::move(occupancy)) {
  if (n < 1) throw std::invalid_argument("ring size must be at least 1");
  if (static_cast<int>(occ_.size()) != n)
    throw std::invalid_argument("occupancy vector size does not match ring size");
  k_ = 0;
  for (int c : occ_) {
    if (c < 0) throw std::invalid_argument("occupancy entries must be non-negative");
    k_ += c;
  }
}

Configuration Configuration::from_nodes(int n, const std::vector<NodeIndex>& nodes) {
  if (n < 1) throw std::invalid_argument("ring size must be at least 1");
  std::vector<int> occ(n, 0);
  for (NodeIndex v : nodes) {
    if (v < 0 || v >= n) throw std::invalid_argument("node index out of range");
    ++occ[v];
  }
  return Configuration(n, std::move(occ));
}

std::vector<NodeIndex> Configuration::occupied_nodes() const {
  std::vector<NodeIndex> out;
  for (int i = 0; i < n_; ++i)
    if (occ_[i] > 0) out.push_back(i);
  return out;
}

int Configuration::occupied_count() const {
  int w = 0;
  for (int c : occ_)
    if (c > 0) ++w;
  return w;
}

void Configuration::add_robots(NodeIndex v, int how_many) {
  if (how_many < 0) throw std::invalid_argument("cannot add a negative robot count");
  occ_[wrap(v, n_)] += how_many;
  k_ += how_many;
}

void Configuration::move_robot(NodeIndex from, NodeIndex to) {
  NodeIndex f = wrap(from, n_), t = wrap(to, n_);
  if (occ_[f] == 0) throw std::invalid_argument("no robot on the source node");
  --occ_[f];
  ++occ_[t];
}

std::string Configuration::text() const {
  std::string s = "n=" + std::to_string(n_) + ";occ=";
  for (int i = 0; i < n_; ++i) {
    if (i) s += ',';
    s += std::to_string(occ_[i]);
  }
  return s;
}

namespace {

int parse_int(const std::string& s, size_t& pos) {
  int value = 0;
  const char* begin = s.data() + pos;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr == begin) throw std::invalid_argument("malformed configuration text");
  pos += static_cast<size_t>(ptr - begin);
  return value;
}

void expect(const std::string& s, size_t& pos, const char* lit) {
  size_t len = std::char_traits<char>::length(lit);
  if (s.compare(pos, len, lit) != 0) throw std::invalid_argument("malformed configuration text");
  pos += len;
}

}  // namespace

Configuration Configuration::parse(const std::string& s) {
  size_t pos = 0;
  expect(s, pos, "n=");
  int n = parse_int(s, pos);
  if (n < 1) throw std::invalid_argument("malformed configuration text");
  expect(s, pos, ";occ=");
  std::vector<int> occ;
  occ.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (i) expect(s, pos, ",");
    occ.push_back(parse_int(s, pos));
  }
  if (pos != s.size()) throw std::invalid_argument("malformed configuration text");
  return Configuration(n, std::move(occ));
}

std::vector<Hole> holes(const Configuration& c) {
  if (c.k() < 1) throw std::invalid_argument("holes require at least one occupied node");
  int n = c.n();
  std::vector<Hole> out;
  for (int i = 0; i < n; ++i) {
    if (c.occupied(i) || !c.occupied(wrap(i - 1, n))) continue;
    int size = 0;
    for (int j = i; !c.occupied(j) && size < n; j = wrap(j + 1, n)) ++size;
    out.push_back({i, size});
  }
  std::sort(out.begin(), out.end(), [](const Hole& a, const Hole& b) { return a.start < b.start; });
  return out;
}

std::vector<NodeBlock> node_blocks(const Configuration& c) {
  if (c.k() < 1) throw std::invalid_argument("node blocks require at least one occupied node");
  int n = c.n();
  std::vector<NodeBlock> out;
  bool all_occupied = true;
  for (int i = 0; i < n; ++i)
    if (!c.occupied(i)) all_occupied = false;
  if (all_occupied) {
    out.push_back({0, n});
    return out;
  }
  for (int i = 0; i < n; ++i) {
    if (!c.occupied(i) || c.occupied(wrap(i - 1, n))) continue;
    int size = 0;
    for (int j = i; c.occupied(j); j = wrap(j + 1, n)) ++size;
    out.push_back({i, size});
  }
  std::sort(out.begin(), out.end(),
            [](const NodeBlock& a, const NodeBlock& b) { return a.start < b.start; });
  return out;
}

int inter_distance(const Configuration& c) {
  std::vector<NodeIndex> occ = c.occupied_nodes();
  int w = static_cast<int>(occ.size());
  if (w < 2) throw std::invalid_argument("inter-distance requires two occupied nodes");
  int n = c.n();
  int best = n;
  for (int i = 0; i < w; ++i) {
    int gap = cw_distance(n, occ[i], occ[(i + 1) % w]);
    best = std::min(best, std::min(gap, n - gap));
  }
  return best;
}

DBlockDecomposition d_blocks(const Configuration& c) {
  DBlockDecomposition out;
  out.d = inter_distance(c);
  int n = c.n();
  int d = out.d;

  std::vector<NodeIndex> occ = c.occupied_nodes();
  std::vector<bool> in_block(n, false);
  std::vector<NodeIndex> starts;
  for (NodeIndex v : occ)
    if (!c.occupied(wrap(v - d, n))) starts.push_back(v);

  if (starts.empty()) {
    // Every occupied node has an occupied predecessor at distance d, so the
    // whole pattern is one cyclic chain. Open it at the lowest occupied node.
    starts.push_back(occ.front());
  }

  for (NodeIndex s : starts) {
    DBlock b;
    for (NodeIndex v = s; c.occupied(v) && !in_block[v]; v = wrap(v + d, n)) {
      b.members.push_back(v);
      in_block[v] = true;
    }
    if (b.members.size() >= 2)
      out.blocks.push_back(std::move(b));
    else if (b.members.size() == 1)
      in_block[b.members[0]] = false;
  }
  for (NodeIndex v : occ)
    if (!in_block[v]) out.isolated.push_back(v);

  std::sort(out.blocks.begin(), out.blocks.end(),
            [](const DBlock& a, const DBlock& b) { return a.members.front() < b.members.front(); });
  return out;
}

SymmetryClass classify_symmetry(const Configuration& c) {
  int n = c.n();
  auto same_under_rotation = [&](int r) {
    for (int i = 0; i < n; ++i)
      if (c.occupied(i) != c.occupied(wrap(i + r, n))) return false;
    return true;
  };
  for (int r = 1; r < n; ++r)
    if (same_under_rotation(r)) return {SymmetryKind::Periodic, -1};

  auto same_under_reflection = [&](int t) {
    for (int i = 0; i < n; ++i)
      if (c.occupied(i) != c.occupied(wrap(t - i, n))) return false;
    return true;
  };
  // The map only depends on t mod n, so the smallest fixing t lies in [0, n).
  for (int t = 0; t < n; ++t)
    if (same_under_reflection(t)) return {SymmetryKind::Symmetric, t};

  return {SymmetryKind::Rigid, -1};
}

bool is_gathered(const Configuration& c) { return c.k() >= 1 && c.occupied_count() == 1; }

Configuration rotated(const Configuration& c, int r) {
  int n = c.n();
  std::vector<int> occ(n, 0);
  for (int i = 0; i < n; ++i) occ[wrap(i + r, n)] = c.occupancy()[i];
  return Configuration(n, std::move(occ));
}

Configuration reflected(const Configuration& c, int t) {
  int n = c.n();
  std::vector<int> occ(n, 0);
  for (int i = 0; i < n; ++i) occ[wrap(t - i, n)] = c.occupancy()[i];
  return Configuration(n, std::move(occ));
}

}  // namespace ringgather
