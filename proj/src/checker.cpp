#include "ringgather/checker.hpp"

#include <algorithm>
#include <climits>
#include <deque>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

// State space layout: a state is the multiset of robot records plus the
// threshold flag. A record is (node, activity tag, round-completed bit); the
// tag says whether the robot is ready to look or holds a pending stay or a
// pending one-step move, clockwise or counterclockwise. Robots are anonymous,
// so the multiset view is exact, and folding out the ring's rotations and
// reflections on top of it is exact as well because every protocol rule
// commutes with them (a reflection swaps the two move directions).
//
// Liveness needs no fairness parameter. A fair schedule closes rounds forever,
// so an infinite fair execution must traverse some round-closing transition on
// a cycle; if no such transition lies on a cycle, every fair execution leaves
// the non-gathered region, and the worst round count is the heaviest path
// through the condensation counting round-closing transitions.

namespace ringgather {

namespace {

constexpr int kMaxPackRing = 16;
constexpr int kMaxPackRobots = 9;

enum : std::uint8_t { TagReady = 0, TagStay = 1, TagCw = 2, TagCcw = 3 };

struct Rec {
    std::uint8_t pos = 0;
    std::uint8_t tag = 0;
    std::uint8_t done = 0;
};

inline std::uint8_t rec_byte(const Rec& r) {
    return static_cast<std::uint8_t>(r.pos << 3 | r.tag << 1 | r.done);
}

inline Rec rec_from_byte(std::uint8_t b) {
    return Rec{static_cast<std::uint8_t>(b >> 3), static_cast<std::uint8_t>((b >> 1) & 3),
               static_cast<std::uint8_t>(b & 1)};
}

inline bool same_rec(const Rec& a, const Rec& b) { return rec_byte(a) == rec_byte(b); }

struct MState {
    std::vector<Rec> recs;  // sorted by rec_byte
    bool flag = false;
};

void sort_recs(std::vector<Rec>& recs) {
    std::sort(recs.begin(), recs.end(),
              [](const Rec& a, const Rec& b) { return rec_byte(a) < rec_byte(b); });
}

std::uint64_t pack(const std::vector<Rec>& recs, bool flag) {
    std::uint64_t key = flag ? 1ull << 63 : 0;
    for (size_t i = 0; i < recs.size(); ++i)
        key |= static_cast<std::uint64_t>(rec_byte(recs[i])) << (7 * i);
    return key;
}

MState unpack(std::uint64_t key, int k) {
    MState s;
    s.flag = (key >> 63) & 1;
    s.recs.reserve(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i)
        s.recs.push_back(rec_from_byte((key >> (7 * i)) & 0x7f));
    return s;
}

// Rotation by t, or the reflection i -> t - i (which swaps move directions).
struct Transform {
    bool refl = false;
    int t = 0;
};

Rec transformed(const Rec& r, const Transform& g, int n) {
    Rec out = r;
    if (g.refl) {
        out.pos = static_cast<std::uint8_t>(wrap(g.t - r.pos, n));
        if (r.tag == TagCw)
            out.tag = TagCcw;
        else if (r.tag == TagCcw)
            out.tag = TagCw;
    } else {
        out.pos = static_cast<std::uint8_t>(wrap(r.pos + g.t, n));
    }
    return out;
}

std::uint64_t canonical_key(const MState& s, int n, Transform* best_out = nullptr) {
    std::uint64_t best = ~0ull;
    Transform best_g;
    std::vector<Rec> tmp(s.recs.size());
    for (int refl = 0; refl < 2; ++refl) {
        for (int t = 0; t < n; ++t) {
            Transform g{refl != 0, t};
            for (size_t i = 0; i < s.recs.size(); ++i)
                tmp[i] = transformed(s.recs[i], g, n);
            sort_recs(tmp);
            std::uint64_t key = pack(tmp, s.flag);
            if (key < best) {
                best = key;
                best_g = g;
            }
        }
    }
    if (best_out)
        *best_out = best_g;
    return best;
}

Configuration config_of(const MState& s, int n) {
    std::vector<int> occ(static_cast<size_t>(n), 0);
    for (const Rec& r : s.recs)
        ++occ[r.pos];
    return Configuration(n, std::move(occ));
}

MState initial_mstate(const Configuration& c) {
    MState s;
    for (NodeIndex v : c.occupied_nodes())
        for (int i = 0; i < c.count(v); ++i)
            s.recs.push_back(Rec{static_cast<std::uint8_t>(v), TagReady, 0});
    s.flag = initial_threshold_flag(c);
    return s;
}

struct EdgeOut {
    MState child;
    bool closure = false;
};

struct Expanded {
    std::vector<EdgeOut> edges;
    std::string err_prop;  // decide failure while looking, empty when none
    std::string err_msg;
    Rec err_rec;
};

Expanded expand(const MState& s, int n) {
    Expanded out;
    Configuration c = config_of(s, n);
    auto cls = classify_csp(c);

    bool have_moves = false;
    std::vector<MoveIntent> moves;
    auto intent_for = [&](NodeIndex pos) -> const MoveIntent* {
        for (const MoveIntent& mi : moves)
            if (mi.robot == pos)
                return &mi;
        return nullptr;
    };

    auto push_look = [&](size_t i, std::uint8_t tag) {
        MState child = s;
        child.recs[i].tag = tag;
        sort_recs(child.recs);
        out.edges.push_back({std::move(child), false});
    };

    auto push_intent = [&](size_t i, const MoveIntent& mi) {
        const Rec& r = s.recs[i];
        NodeIndex cw = wrap(r.pos + 1, n);
        NodeIndex ccw = wrap(r.pos - 1, n);
        if (mi.scheduler_choice()) {
            if (mi.target != cw || *mi.alt != ccw)
                throw std::logic_error("two-way intent is not the adjacent pair");
            push_look(i, TagCw);
            push_look(i, TagCcw);
            return;
        }
        if (mi.target == cw)
            push_look(i, TagCw);
        else if (mi.target == ccw)
            push_look(i, TagCcw);
        else
            throw std::logic_error("protocol produced a non-adjacent move");
    };

    for (size_t i = 0; i < s.recs.size(); ++i) {
        if (i > 0 && same_rec(s.recs[i], s.recs[i - 1]))
            continue;  // identical robots act identically
        const Rec& r = s.recs[i];

        if (r.tag == TagReady) {
            bool towered = c.tower_at(r.pos);
            if (cls) {
                if (towered) {
                    push_look(i, TagStay);
                    continue;
                }
                if (!have_moves) {
                    moves = phase2_moves(c, *cls);
                    have_moves = true;
                }
                const MoveIntent* mi = intent_for(r.pos);
                if (mi)
                    push_intent(i, *mi);
                else
                    push_look(i, TagStay);
            } else {
                if (towered) {
                    out.err_prop = "phase1-tower";
                    out.err_msg = "robot observed its own tower outside the second phase";
                    out.err_rec = r;
                    return out;
                }
                if (!have_moves) {
                    try {
                        moves = phase1_moves(c);
                    } catch (const protocol_error& e) {
                        out.err_prop = e.property();
                        out.err_msg = e.what();
                        out.err_rec = r;
                        return out;
                    }
                    have_moves = true;
                }
                const MoveIntent* mi = intent_for(r.pos);
                if (mi)
                    push_intent(i, *mi);
                else
                    push_look(i, TagStay);
            }
        } else {
            MState child = s;
            Rec& cr = child.recs[i];
            if (r.tag == TagCw)
                cr.pos = static_cast<std::uint8_t>(wrap(r.pos + 1, n));
            else if (r.tag == TagCcw)
                cr.pos = static_cast<std::uint8_t>(wrap(r.pos - 1, n));
            cr.tag = TagReady;
            cr.done = 1;
            bool closure = std::all_of(child.recs.begin(), child.recs.end(),
                                       [](const Rec& x) { return x.done != 0; });
            if (closure)
                for (Rec& x : child.recs)
                    x.done = 0;
            if (!child.flag && single_block_pattern(config_of(child, n)))
                child.flag = true;
            sort_recs(child.recs);
            out.edges.push_back({std::move(child), closure});
        }
    }
    return out;
}

// Components come back numbered in reverse topological order of the
// condensation: every edge that crosses components goes from a higher id to a
// lower one.
std::vector<std::int32_t> tarjan_scc(
    const std::vector<std::vector<std::pair<std::int32_t, std::uint8_t>>>& adj,
    int& scc_count) {
    int n = static_cast<int>(adj.size());
    std::vector<std::int32_t> idx(n, -1), low(n, 0), comp(n, -1);
    std::vector<std::uint8_t> onstk(n, 0);
    std::vector<std::int32_t> stk;
    struct Frame {
        std::int32_t v;
        size_t ei;
    };
    std::vector<Frame> call;
    std::int32_t counter = 0;
    scc_count = 0;

    for (int root = 0; root < n; ++root) {
        if (idx[root] != -1)
            continue;
        idx[root] = low[root] = counter++;
        stk.push_back(root);
        onstk[root] = 1;
        call.push_back({root, 0});
        while (!call.empty()) {
            Frame& f = call.back();
            bool descended = false;
            while (f.ei < adj[f.v].size()) {
                std::int32_t w = adj[f.v][f.ei].first;
                ++f.ei;
                if (idx[w] == -1) {
                    idx[w] = low[w] = counter++;
                    stk.push_back(w);
                    onstk[w] = 1;
                    call.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (onstk[w])
                    low[f.v] = std::min(low[f.v], idx[w]);
            }
            if (descended)
                continue;
            std::int32_t v = call.back().v;
            call.pop_back();
            if (!call.empty())
                low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == idx[v]) {
                for (;;) {
                    std::int32_t w = stk.back();
                    stk.pop_back();
                    onstk[w] = 0;
                    comp[w] = scc_count;
                    if (w == v)
                        break;
                }
                ++scc_count;
            }
        }
    }
    return comp;
}

struct ExploreParams {
    int n = 0;
    long round_limit = 0;
    std::uint64_t state_budget = 0;
    bool canonicalize = true;
    bool collect_patterns = false;
    std::function<bool(const Configuration&, const MState&)> absorb;
};

struct ExploreOutcome {
    Verdict verdict = Verdict::Inconclusive;
    std::uint64_t states = 0;
    std::uint64_t transitions = 0;
    long max_closures = -1;
    std::string vprop;
    std::string vmsg;
    std::uint64_t vkey = 0;
    long vdepth = 0;
    bool has_final_rec = false;
    Rec final_rec;
    bool liveness = false;
    std::set<std::string> patterns;
    std::set<std::string> absorbed_labels;
    std::string note;
};

ExploreOutcome explore(MState initial, const ExploreParams& p) {
    ExploreOutcome out;
    sort_recs(initial.recs);
    int k = static_cast<int>(initial.recs.size());

    auto key_of = [&](const MState& s) -> std::uint64_t {
        if (p.canonicalize)
            return canonical_key(s, p.n);
        std::vector<Rec> recs = s.recs;
        sort_recs(recs);
        return pack(recs, s.flag);
    };

    std::unordered_map<std::uint64_t, std::int32_t> index;
    std::vector<std::uint64_t> keys;
    std::vector<std::int32_t> depth;
    std::vector<std::uint8_t> terminal;
    std::vector<std::vector<std::pair<std::int32_t, std::uint8_t>>> adj;

    // Inserts the state, running monitors at discovery. Returns its index, or
    // -1 after recording a safety finding.
    auto discover = [&](const MState& s, std::int32_t d) -> std::int32_t {
        std::uint64_t key = key_of(s);
        auto [it, fresh] = index.try_emplace(key, static_cast<std::int32_t>(keys.size()));
        if (!fresh)
            return it->second;
        keys.push_back(key);
        depth.push_back(d);
        adj.emplace_back();
        Configuration c = config_of(s, p.n);
        bool absorbed = p.absorb && p.absorb(c, s);
        terminal.push_back(absorbed ? 1 : 0);
        if (p.collect_patterns)
            out.patterns.insert(classify_label(c));
        if (absorbed)
            out.absorbed_labels.insert(classify_label(c));
        if (auto v = check_config_safety(c, s.flag)) {
            out.vprop = v->property;
            out.vmsg = v->message;
            out.vkey = key;
            out.vdepth = d;
            return -1;
        }
        return it->second;
    };

    if (discover(initial, 0) < 0) {
        out.states = keys.size();
        out.verdict = Verdict::Falsified;
        return out;
    }

    for (std::int32_t cur = 0; cur < static_cast<std::int32_t>(keys.size()); ++cur) {
        if (p.state_budget && keys.size() > p.state_budget) {
            out.states = keys.size();
            out.note = "state budget exceeded after " + std::to_string(keys.size()) + " states";
            out.verdict = Verdict::Inconclusive;
            return out;
        }
        if (terminal[static_cast<size_t>(cur)])
            continue;
        MState s = unpack(keys[static_cast<size_t>(cur)], k);
        Expanded ex = expand(s, p.n);
        if (!ex.err_prop.empty()) {
            out.vprop = ex.err_prop;
            out.vmsg = ex.err_msg;
            out.vkey = keys[static_cast<size_t>(cur)];
            out.vdepth = depth[static_cast<size_t>(cur)];
            out.has_final_rec = true;
            out.final_rec = ex.err_rec;
            out.states = keys.size();
            out.verdict = Verdict::Falsified;
            return out;
        }
        for (EdgeOut& e : ex.edges) {
            std::int32_t cidx = discover(e.child, depth[static_cast<size_t>(cur)] + 1);
            if (cidx < 0) {
                out.states = keys.size();
                out.verdict = Verdict::Falsified;
                return out;
            }
            adj[static_cast<size_t>(cur)].push_back({cidx, e.closure ? std::uint8_t{1} : std::uint8_t{0}});
            ++out.transitions;
        }
    }
    out.states = keys.size();

    int scc_count = 0;
    std::vector<std::int32_t> comp = tarjan_scc(adj, scc_count);

    for (size_t u = 0; u < adj.size(); ++u) {
        for (const auto& e : adj[u]) {
            if (e.second && comp[u] == comp[static_cast<size_t>(e.first)]) {
                out.vprop = "liveness-livelock";
                out.vmsg = "a fair schedule can close rounds forever inside class " +
                           classify_label(config_of(unpack(keys[u], k), p.n));
                out.liveness = true;
                out.verdict = Verdict::Falsified;
                return out;
            }
        }
    }

    // Heaviest closure count along any path from the initial state. Cross-
    // component edges run from higher component id to lower, so descending id
    // order is topological.
    std::vector<std::vector<std::int32_t>> bucket(static_cast<size_t>(scc_count));
    for (size_t u = 0; u < comp.size(); ++u)
        bucket[static_cast<size_t>(comp[u])].push_back(static_cast<std::int32_t>(u));
    std::vector<long> dist(static_cast<size_t>(scc_count), LONG_MIN);
    dist[static_cast<size_t>(comp[0])] = 0;
    long max_closures = 0;
    for (int cidx = scc_count - 1; cidx >= 0; --cidx) {
        long base = dist[static_cast<size_t>(cidx)];
        if (base == LONG_MIN)
            continue;
        max_closures = std::max(max_closures, base);
        for (std::int32_t u : bucket[static_cast<size_t>(cidx)]) {
            for (const auto& e : adj[static_cast<size_t>(u)]) {
                int c2 = comp[static_cast<size_t>(e.first)];
                if (c2 == cidx)
                    continue;
                dist[static_cast<size_t>(c2)] =
                    std::max(dist[static_cast<size_t>(c2)], base + e.second);
            }
        }
    }
    out.max_closures = max_closures;

    if (max_closures > p.round_limit) {
        out.vprop = "liveness-round-bound";
        out.vmsg = "a schedule needs " + std::to_string(max_closures) +
                   " rounds, over the limit of " + std::to_string(p.round_limit);
        out.liveness = true;
        out.verdict = Verdict::Falsified;
        return out;
    }

    out.verdict = Verdict::Verified;
    return out;
}

std::uint8_t robot_tag(const RobotState& r, int n) {
    if (r.ready())
        return TagReady;
    if (r.pending->stay)
        return TagStay;
    return r.pending->target == wrap(r.pos + 1, n) ? TagCw : TagCcw;
}

MState project(const ExecutionState& st) {
    MState s;
    int n = st.config.n();
    for (int i = 0; i < st.k(); ++i) {
        const RobotState& r = st.robots[static_cast<size_t>(i)];
        s.recs.push_back(Rec{static_cast<std::uint8_t>(r.pos), robot_tag(r, n),
                             static_cast<std::uint8_t>((st.completed_mask >> i) & 1)});
    }
    s.flag = st.first_single_1block_seen;
    return s;
}

struct FoundTranscript {
    std::vector<SchedulerAction> actions;
    bool found = false;
    std::string note;
};

// Breadth-first search through concrete executor states for one whose
// multiset key matches the finding, recording the actions that got there.
// Robot identities matter here, so this is only run once a finding exists.
FoundTranscript find_transcript(const Configuration& initial, std::uint64_t target_key,
                                bool canonical, bool has_final, const Rec& final_rec,
                                long max_depth, std::uint64_t budget) {
    FoundTranscript res;
    int n = initial.n();

    auto multiset_key = [&](const ExecutionState& st) -> std::uint64_t {
        MState s = project(st);
        if (canonical)
            return canonical_key(s, n);
        sort_recs(s.recs);
        return pack(s.recs, s.flag);
    };
    auto ident_key = [&](const ExecutionState& st) -> std::uint64_t {
        MState s = project(st);  // robot order preserved
        return pack(s.recs, s.flag);
    };

    struct Node {
        ExecutionState st;
        long depth;
        std::int64_t parent;
        SchedulerAction act;
    };
    std::deque<Node> nodes;
    std::unordered_map<std::uint64_t, char> seen;

    ExecutionState start = make_initial_state(initial);
    seen.emplace(ident_key(start), 1);
    nodes.push_back({std::move(start), 0, -1, {}});

    std::int64_t match = -1;
    for (std::int64_t cur = 0; cur < static_cast<std::int64_t>(nodes.size()); ++cur) {
        if (budget && nodes.size() > budget) {
            res.note = "transcript search budget exceeded";
            return res;
        }
        if (multiset_key(nodes[static_cast<size_t>(cur)].st) == target_key) {
            match = cur;
            break;
        }
        if (nodes[static_cast<size_t>(cur)].depth >= max_depth)
            continue;
        ExecutionState st = nodes[static_cast<size_t>(cur)].st;
        for (int r = 0; r < st.k(); ++r) {
            bool ready = st.robots[static_cast<size_t>(r)].ready();
            int resolutions = ready ? 2 : 1;
            for (int choice = 0; choice < resolutions; ++choice) {
                SchedulerAction a{r, ready ? ActionKind::LookCompute : ActionKind::ExecuteMove,
                                  choice};
                ExecutionState next = st;
                try {
                    apply(next, a);
                } catch (const protocol_error&) {
                    continue;  // error edges end at the parent, which is matched above
                }
                if (seen.emplace(ident_key(next), 1).second)
                    nodes.push_back({std::move(next), nodes[static_cast<size_t>(cur)].depth + 1,
                                     cur, a});
            }
        }
    }
    if (match < 0) {
        if (res.note.empty())
            res.note = "no concrete path found within the depth bound";
        return res;
    }

    std::vector<SchedulerAction> actions;
    for (std::int64_t i = match; nodes[static_cast<size_t>(i)].parent >= 0;
         i = nodes[static_cast<size_t>(i)].parent)
        actions.push_back(nodes[static_cast<size_t>(i)].act);
    std::reverse(actions.begin(), actions.end());

    if (has_final) {
        // The finding's acting record is in canonical coordinates; pull it
        // back through the transform that canonicalized the matched state.
        const ExecutionState& st = nodes[static_cast<size_t>(match)].st;
        Transform g;
        if (canonical)
            canonical_key(project(st), n, &g);
        Rec concrete;
        if (g.refl) {
            concrete.pos = static_cast<std::uint8_t>(wrap(g.t - final_rec.pos, n));
            concrete.tag = final_rec.tag;
            if (final_rec.tag == TagCw)
                concrete.tag = TagCcw;
            else if (final_rec.tag == TagCcw)
                concrete.tag = TagCw;
        } else {
            concrete.pos = static_cast<std::uint8_t>(wrap(final_rec.pos - g.t, n));
            concrete.tag = final_rec.tag;
        }
        concrete.done = final_rec.done;

        int who = -1;
        MState proj = project(st);
        for (int r = 0; r < st.k(); ++r) {
            if (same_rec(proj.recs[static_cast<size_t>(r)], concrete)) {
                who = r;
                break;
            }
        }
        if (who < 0) {
            res.note = "acting robot not found in the matched state";
            return res;
        }
        actions.push_back({who, ActionKind::LookCompute, 0});
    }

    res.actions = std::move(actions);
    res.found = true;
    return res;
}

std::optional<Violation> run_transcript(const Configuration& initial,
                                        const std::vector<SchedulerAction>& actions) {
    ExecutionState st = make_initial_state(initial);
    if (auto v = check_safety(st))
        return v;
    for (const SchedulerAction& a : actions) {
        try {
            apply(st, a);
        } catch (const protocol_error& e) {
            return Violation{e.property(), e.what()};
        }
        if (auto v = check_safety(st))
            return v;
    }
    return std::nullopt;
}

bool gathered_settled(const Configuration& c, const MState& s) {
    if (!is_gathered(c))
        return false;
    // Pending stays cannot move anyone off the tower and every later look
    // re-decides stay, so they do not block absorption. Without this an
    // adversary that pipelines look against move walks the gathered states
    // in a cycle that never passes through full readiness, and the search
    // would call that a livelock.
    for (const Rec& r : s.recs)
        if (r.tag == TagCw || r.tag == TagCcw)
            return false;
    return true;
}

}  // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Verified:
        return "verified";
    case Verdict::Falsified:
        return "falsified";
    case Verdict::Inconclusive:
        return "inconclusive";
    }
    return "unknown";
}

std::vector<Configuration> enumerate_initials(int n, int k) {
    if (n < 1 || k < 1 || k > n)
        throw std::invalid_argument("enumerate_initials: need 1 <= k <= n");

    auto is_rep = [&](const Configuration& c) {
        const std::vector<int>& occ = c.occupancy();
        for (int t = 0; t < n; ++t) {
            if (rotated(c, t).occupancy() < occ)
                return false;
            if (reflected(c, t).occupancy() < occ)
                return false;
        }
        return true;
    };

    std::vector<Configuration> out;
    std::vector<int> pick(static_cast<size_t>(k));
    std::iota(pick.begin(), pick.end(), 0);
    for (;;) {
        std::vector<int> occ(static_cast<size_t>(n), 0);
        for (int v : pick)
            occ[static_cast<size_t>(v)] = 1;
        Configuration c(n, occ);
        if (classify_symmetry(c).kind != SymmetryKind::Periodic && is_rep(c))
            out.push_back(std::move(c));

        int i = k - 1;
        while (i >= 0 && pick[static_cast<size_t>(i)] == n - k + i)
            --i;
        if (i < 0)
            break;
        ++pick[static_cast<size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            pick[static_cast<size_t>(j)] = pick[static_cast<size_t>(j - 1)] + 1;
    }
    std::sort(out.begin(), out.end(), [](const Configuration& a, const Configuration& b) {
        return a.occupancy() < b.occupancy();
    });
    return out;
}

CheckReport check_instance(const Configuration& initial, const CheckOptions& opts) {
    CheckReport rep;
    rep.initials = 1;
    int n = initial.n();
    int k = initial.k();
    if (n > kMaxPackRing || k > kMaxPackRobots) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "instance exceeds the packed encoding (needs n <= 16 and k <= 9)";
        return rep;
    }

    ExploreParams p;
    p.n = n;
    p.round_limit = opts.round_limit > 0 ? opts.round_limit : 10L * n * n;
    p.state_budget = opts.state_budget;
    p.canonicalize = opts.canonicalize;
    p.collect_patterns = opts.collect_patterns;
    p.absorb = gathered_settled;

    ExploreOutcome eo = explore(initial_mstate(initial), p);
    rep.states = eo.states;
    rep.transitions = eo.transitions;
    rep.max_rounds = eo.max_closures;
    rep.patterns.assign(eo.patterns.begin(), eo.patterns.end());
    rep.note = eo.note;
    rep.verdict = eo.verdict;

    if (eo.verdict == Verdict::Falsified) {
        CheckViolation v;
        v.property = eo.vprop;
        v.message = eo.vmsg;
        v.initial = initial;
        v.depth = eo.vdepth;
        if (eo.liveness) {
            v.transcript_note = "infinite-schedule finding, no finite repro";
        } else if (opts.want_transcript) {
            FoundTranscript ft = find_transcript(initial, eo.vkey, opts.canonicalize,
                                                 eo.has_final_rec, eo.final_rec, eo.vdepth,
                                                 500000);
            if (ft.found) {
                v.transcript = std::move(ft.actions);
                v.depth = static_cast<long>(v.transcript.size());
                auto replayed = run_transcript(initial, v.transcript);
                if (!replayed || replayed->property != v.property)
                    v.transcript_note = "replay did not reproduce the finding";
            } else {
                v.transcript_note = ft.note;
            }
        }
        rep.violation = std::move(v);
    }
    return rep;
}

CheckReport check_all(int n, int k, const CheckOptions& opts) {
    CheckReport total;
    total.verdict = Verdict::Verified;
    std::set<std::string> patterns;
    for (const Configuration& c : enumerate_initials(n, k)) {
        CheckReport r = check_instance(c, opts);
        ++total.initials;
        total.states += r.states;
        total.transitions += r.transitions;
        total.max_rounds = std::max(total.max_rounds, r.max_rounds);
        patterns.insert(r.patterns.begin(), r.patterns.end());
        if (r.verdict == Verdict::Falsified) {
            total.verdict = Verdict::Falsified;
            total.violation = std::move(r.violation);
            total.note = r.note;
            break;
        }
        if (r.verdict == Verdict::Inconclusive && total.verdict == Verdict::Verified) {
            total.verdict = Verdict::Inconclusive;
            total.note = r.note;
        }
    }
    total.patterns.assign(patterns.begin(), patterns.end());
    return total;
}

namespace {

std::string class_name(CspVariant v, int b0, int b1) {
    return CspClass{v, b0, b1, std::nullopt}.label();
}

// Occupied-pattern layouts, one robot per node, placed from node 0. Returns
// nothing when the shape plus its outer hole does not fit the ring.
std::optional<Configuration> build_shape(int n, CspVariant variant, int b0, int b1) {
    std::vector<int> occ(static_cast<size_t>(n), 0);
    auto blk = [&](int start, int len) {
        for (int i = 0; i < len; ++i)
            occ[static_cast<size_t>(start + i)] = 1;
    };
    int width = 0;
    switch (variant) {
    case CspVariant::SingleBlock:
        width = b0;
        if (width >= n)
            return std::nullopt;
        blk(0, b0);
        break;
    case CspVariant::BlockLeader:
        width = b0 + 2 * b1 + 2;
        if (width >= n)
            return std::nullopt;
        blk(0, b1);
        blk(b1 + 1, b0);
        blk(b1 + b0 + 2, b1);
        break;
    case CspVariant::SemiTwin:
        width = 2 * b0 + 3;
        if (width >= n)
            return std::nullopt;
        blk(0, b0 + 2);
        blk(b0 + 3, b0);
        break;
    case CspVariant::SemiSingleBlock:
        width = b0 + 2;
        if (width >= n)
            return std::nullopt;
        blk(0, b0);
        occ[static_cast<size_t>(b0 + 1)] = 1;
        break;
    case CspVariant::SemiBlockLeader:
        width = b0 + 2 * b1 + 3;
        if (width >= n)
            return std::nullopt;
        blk(0, b1 + 1);
        blk(b1 + 2, b0);
        blk(b1 + b0 + 3, b1);
        break;
    }
    return Configuration(n, occ);
}

std::vector<std::string> expected_next(const CspClass& cls) {
    using V = CspVariant;
    switch (cls.variant) {
    case V::SingleBlock:
        if (cls.b0 >= 5)
            return {class_name(V::SemiTwin, (cls.b0 - 3) / 2, 0)};
        if (cls.b0 == 3)
            return {class_name(V::SingleBlock, 2, 0)};
        if (cls.b0 == 2)
            return {class_name(V::SingleBlock, 1, 0)};
        return {};
    case V::BlockLeader:
        if (cls.b1 >= 2)
            return {class_name(V::SemiBlockLeader, cls.b0 + 1, cls.b1 - 1)};
        return {class_name(V::SemiSingleBlock, cls.b0 + 1, 0)};
    case V::SemiTwin:
        return {class_name(V::BlockLeader, 1, cls.b0)};
    case V::SemiSingleBlock:
        return {class_name(V::SingleBlock, cls.b0 + 1, 0)};
    case V::SemiBlockLeader:
        return {class_name(V::BlockLeader, cls.b0 + 1, cls.b1)};
    }
    return {};
}

// tower_extra robots go on the tower node (node 0 for the two-node
// SingleBlock, whose tower spot is wherever the tower stands).
LemmaHop run_hop(int n, CspVariant variant, int b0, int b1, int tower_extra, long hop_bound) {
    LemmaHop hop;
    hop.n = n;
    hop.towered = tower_extra > 0;
    hop.seed = class_name(variant, b0, b1) + (hop.towered ? "+tower" : "");

    auto built = build_shape(n, variant, b0, b1);
    if (!built) {
        hop.note = "shape does not fit the ring";
        return hop;
    }
    auto cls = classify_csp(*built);
    if (!cls || cls->variant != variant || cls->b0 != b0 || cls->b1 != b1) {
        hop.note = "seed did not classify as intended";
        return hop;
    }

    Configuration cfg = *built;
    if (tower_extra > 0) {
        if (cls->vt)
            cfg.add_robots(*cls->vt, tower_extra);
        else if (variant == CspVariant::SingleBlock && b0 == 2)
            cfg.add_robots(0, tower_extra);
        else {
            hop.note = "class pins no tower node";
            return hop;
        }
    }
    hop.k = cfg.k();
    hop.expected = expected_next(*cls);
    if (hop.expected.empty()) {
        hop.note = "terminal class, nothing to hop to";
        return hop;
    }

    std::string seed_label = cls->label();
    ExploreParams p;
    p.n = n;
    p.round_limit = hop_bound;
    p.canonicalize = true;
    p.absorb = [seed_label](const Configuration& c, const MState&) {
        return classify_label(c) != seed_label;
    };

    ExploreOutcome eo = explore(initial_mstate(cfg), p);
    hop.worst_rounds = eo.max_closures;
    hop.reached = eo.absorbed_labels;
    bool subset = true;
    for (const std::string& got : hop.reached)
        if (std::find(hop.expected.begin(), hop.expected.end(), got) == hop.expected.end())
            subset = false;
    hop.ok = eo.verdict == Verdict::Verified && subset && !hop.reached.empty();
    if (eo.verdict != Verdict::Verified)
        hop.note = !eo.vprop.empty() ? eo.vprop + ": " + eo.vmsg : eo.note;
    else if (!subset)
        hop.note = "reached a class outside the expected set";
    return hop;
}

}  // namespace

LemmaReport lemma_suite(int max_k) {
    if (max_k < 3)
        throw std::invalid_argument("lemma_suite: need max_k >= 3");
    if (max_k > kMaxPackRobots)
        max_k = kMaxPackRobots;

    LemmaReport rep;
    using V = CspVariant;

    for (int k = 3; k <= max_k; k += 2) {
        int n = k + 5;

        // Tower-free seeds with exactly k robots.
        rep.hops.push_back(run_hop(n, V::SingleBlock, k, 0, 0, rep.hop_round_bound));
        for (int b0 = 1; b0 + 2 <= k; b0 += 2)
            rep.hops.push_back(run_hop(n, V::BlockLeader, b0, (k - b0) / 2, 0, rep.hop_round_bound));
        rep.hops.push_back(run_hop(n, V::SemiSingleBlock, k - 1, 0, 0, rep.hop_round_bound));
        for (int b0 = 2; b0 <= k - 3; b0 += 2)
            rep.hops.push_back(
                run_hop(n, V::SemiBlockLeader, b0, (k - 1 - b0) / 2, 0, rep.hop_round_bound));

        // Seeds with the tower already standing. A tower-free SemiTwin needs
        // an even robot count, so it only appears here.
        rep.hops.push_back(run_hop(n, V::SingleBlock, 2, 0, k - 2, rep.hop_round_bound));
        if (k >= 5) {
            rep.hops.push_back(run_hop(n, V::SingleBlock, k - 2, 0, 2, rep.hop_round_bound));
            rep.hops.push_back(run_hop(n, V::SemiTwin, (k - 3) / 2, 0, 1, rep.hop_round_bound));
            for (int b0 = 1; b0 + 2 <= k - 2; b0 += 2)
                rep.hops.push_back(
                    run_hop(n, V::BlockLeader, b0, (k - 2 - b0) / 2, 2, rep.hop_round_bound));
            if (k - 3 >= 2)
                rep.hops.push_back(run_hop(n, V::SemiSingleBlock, k - 3, 0, 2, rep.hop_round_bound));
        }
        for (int b0 = 2; b0 <= k - 5; b0 += 2)
            rep.hops.push_back(
                run_hop(n, V::SemiBlockLeader, b0, (k - 3 - b0) / 2, 2, rep.hop_round_bound));

        // Full descent from the widest block to gathering.
        LemmaChain chain;
        chain.n = n;
        chain.k = k;
        auto start = build_shape(n, V::SingleBlock, k, 0);
        if (start) {
            ExploreParams p;
            p.n = n;
            p.round_limit = 10L * n * n;
            p.canonicalize = true;
            p.absorb = gathered_settled;
            ExploreOutcome eo = explore(initial_mstate(*start), p);
            chain.worst_rounds = eo.max_closures;
            chain.ok = eo.verdict == Verdict::Verified;
        }
        rep.chains.push_back(chain);
        if (chain.worst_rounds > 0)
            rep.chain_round_coefficient =
                std::max(rep.chain_round_coefficient,
                         static_cast<double>(chain.worst_rounds) / (static_cast<double>(k) * k));
    }

    rep.all_ok = !rep.hops.empty();
    for (const LemmaHop& h : rep.hops)
        if (!h.ok)
            rep.all_ok = false;
    for (const LemmaChain& ch : rep.chains)
        if (!ch.ok)
            rep.all_ok = false;
    return rep;
}

}  // namespace ringgather
