#include "ringgather/executor.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace ringgather {

Decision decide(const Configuration& c, NodeIndex robot, bool local_multiplicity) {
    if (!c.occupied(robot))
        throw std::invalid_argument("decide: robot node is not occupied");

    if (auto cls = classify_csp(c)) {
        // Inside the second phase a robot that sees its own tower holds still;
        // everyone else follows the per-class move rule.
        if (local_multiplicity)
            return Decision::stay();
        for (const MoveIntent& mi : phase2_moves(c, *cls))
            if (mi.robot == robot)
                return Decision::move(mi.target);
        return Decision::stay();
    }

    if (local_multiplicity)
        throw protocol_error("phase1-tower",
                             "robot observed its own tower outside the second phase");
    for (const MoveIntent& mi : phase1_moves(c)) {
        if (mi.robot != robot)
            continue;
        if (mi.scheduler_choice())
            return Decision::choice(mi.target, *mi.alt);
        return Decision::move(mi.target);
    }
    return Decision::stay();
}

bool single_block_pattern(const Configuration& c) {
    auto blocks = node_blocks(c);
    return blocks.size() == 1 && blocks.front().size >= 2;
}

bool towers_legally_placed(const Configuration& c) {
    std::vector<NodeIndex> towered;
    for (NodeIndex v : c.occupied_nodes())
        if (c.tower_at(v))
            towered.push_back(v);
    if (towered.empty())
        return true;

    auto cls = classify_csp(c);
    if (!cls)
        return false;
    if (cls->variant == CspVariant::SingleBlock && cls->b0 == 2) {
        // The two-node endgame: one node carries the tower, the other a single
        // robot about to join it.
        if (towered.size() != 1)
            return false;
        auto occ = c.occupied_nodes();
        NodeIndex other = occ[0] == towered[0] ? occ[1] : occ[0];
        return c.count(other) == 1;
    }
    if (!cls->vt)
        return false;
    return towered.size() == 1 && towered[0] == *cls->vt;
}

bool initial_threshold_flag(const Configuration& c) {
    if (single_block_pattern(c))
        return true;
    if (classify_csp(c) && towers_legally_placed(c))
        return true;
    return false;
}

ExecutionState make_initial_state(const Configuration& c) {
    std::vector<NodeIndex> positions;
    for (NodeIndex v : c.occupied_nodes())
        for (int i = 0; i < c.count(v); ++i)
            positions.push_back(v);
    return make_initial_state(c, positions);
}

bool ExecutionState::quiescent() const {
    for (const RobotState& r : robots)
        if (!r.ready())
            return false;
    return true;
}

namespace {

// Termination test for the run loop. Requiring full quiescence here would let
// a scheduler that pipelines look against move keep the run alive forever on
// a finished tower; a pending stay is harmless because every look at the
// gathered configuration decides stay again. Only a move intent from an older
// snapshot can still break the tower, so only those block the verdict.
bool gathering_is_final(const ExecutionState& st) {
    if (!is_gathered(st.config))
        return false;
    for (const RobotState& r : st.robots)
        if (r.pending && !r.pending->stay)
            return false;
    return true;
}

}  // namespace

ExecutionState make_initial_state(const Configuration& c,
                                  const std::vector<NodeIndex>& positions) {
    if (Configuration::from_nodes(c.n(), positions) != c)
        throw std::invalid_argument(
            "make_initial_state: robot positions do not match the configuration");
    if (positions.size() > 32)
        throw std::invalid_argument(
            "make_initial_state: more than 32 robots exceeds the round mask");

    ExecutionState st;
    st.config = c;
    st.robots.reserve(positions.size());
    for (NodeIndex p : positions)
        st.robots.push_back(RobotState{p, std::nullopt});
    st.step = 0;
    st.rounds = 0;
    st.completed_mask = 0;
    st.last_completion_step.assign(positions.size(), 0);
    st.first_single_1block_seen = initial_threshold_flag(c);
    return st;
}

std::string classify_label(const Configuration& c, int* phase_out) {
    if (auto cls = classify_csp(c)) {
        if (phase_out)
            *phase_out = 2;
        return cls->label();
    }
    if (phase_out)
        *phase_out = 1;
    try {
        return phase1_type_name(classify_phase1(c));
    } catch (const protocol_error&) {
        return "invalid";
    }
}

TraceEvent apply(ExecutionState& st, const SchedulerAction& action) {
    int k = st.k();
    if (action.robot < 0 || action.robot >= k)
        throw protocol_error("scheduler-contract", "robot index out of range");

    RobotState& r = st.robots[static_cast<size_t>(action.robot)];

    TraceEvent ev;
    ev.step = st.step;
    ev.robot = action.robot;
    ev.kind = action.kind;
    ev.stayed = false;
    ev.before = st.config;
    ev.cls = classify_label(st.config, &ev.phase);

    if (action.kind == ActionKind::LookCompute) {
        if (!r.ready())
            throw protocol_error("scheduler-contract",
                                 "look scheduled while an intent is still pending");
        Decision d = decide(st.config, r.pos, st.config.tower_at(r.pos));
        PendingIntent p;
        p.stay = false;
        p.target = r.pos;
        p.snapshot_step = st.step;
        switch (d.kind) {
        case Decision::Kind::Stay:
            p.stay = true;
            break;
        case Decision::Kind::Move:
            p.target = d.target;
            break;
        case Decision::Kind::Choice:
            if (action.choice_resolution == 0)
                p.target = d.target;
            else if (action.choice_resolution == 1)
                p.target = d.alt;
            else
                throw protocol_error("scheduler-contract",
                                     "two-way decision left unresolved");
            break;
        }
        r.pending = p;
    } else {
        if (r.ready())
            throw protocol_error("scheduler-contract",
                                 "move scheduled for a robot with no pending intent");
        PendingIntent p = *r.pending;
        r.pending.reset();
        if (!p.stay) {
            st.config.move_robot(r.pos, p.target);
            r.pos = p.target;
        }
        ev.stayed = p.stay;
        st.completed_mask |= 1u << action.robot;
        st.last_completion_step[static_cast<size_t>(action.robot)] = st.step + 1;
        uint32_t full = k == 32 ? 0xffffffffu : (1u << k) - 1u;
        if (st.completed_mask == full) {
            st.completed_mask = 0;
            ++st.rounds;
        }
    }

    ++st.step;
    if (!st.first_single_1block_seen && single_block_pattern(st.config))
        st.first_single_1block_seen = true;
    ev.after = st.config;
    return ev;
}

std::optional<Violation> check_config_safety(const Configuration& c, bool threshold_flag) {
    if (classify_symmetry(c).kind == SymmetryKind::Periodic)
        return Violation{"periodicity", "configuration became periodic"};

    bool any_tower = false;
    for (NodeIndex v : c.occupied_nodes())
        if (c.tower_at(v)) {
            any_tower = true;
            break;
        }
    if (!any_tower)
        return std::nullopt;

    if (!threshold_flag)
        return Violation{"tower-before-block",
                         "tower created before the first single-block pattern"};
    if (!towers_legally_placed(c))
        return Violation{"tower-placement",
                         "tower outside the designated construction node"};
    return std::nullopt;
}

std::optional<Violation> check_safety(const ExecutionState& st) {
    return check_config_safety(st.config, st.first_single_1block_seen);
}

std::string format_trace_event(const TraceEvent& ev) {
    std::ostringstream os;
    const char* kind = "look";
    if (ev.kind == ActionKind::ExecuteMove)
        kind = ev.stayed ? "stay" : "move";
    os << "step=" << ev.step << " robot=" << ev.robot << " kind=" << kind
       << " phase=" << ev.phase << " class=" << ev.cls
       << " before=" << ev.before.text() << " after=" << ev.after.text();
    return os.str();
}

void validate_initial_config(const Configuration& c) {
    int n = c.n();
    int k = c.k();
    for (NodeIndex v : c.occupied_nodes())
        if (c.tower_at(v))
            throw std::invalid_argument("initial configuration must be tower-free");
    if (k % 2 == 0)
        throw std::invalid_argument("robot count must be odd");
    if (k <= 2)
        throw std::invalid_argument("need more than two robots");
    if (k >= n - 3)
        throw std::invalid_argument("need at least four empty nodes (k < n-3)");
    if (classify_symmetry(c).kind == SymmetryKind::Periodic)
        throw std::invalid_argument("initial configuration must not be periodic");
}

const char* outcome_name(Outcome o) {
    switch (o) {
    case Outcome::Gathered:
        return "gathered";
    case Outcome::RoundLimit:
        return "round-limit";
    case Outcome::Violation:
        return "violation";
    }
    return "unknown";
}

RunResult run(const Configuration& initial, Scheduler& sched, const RunLimits& limits) {
    if (limits.fairness_bound < 1)
        throw std::invalid_argument("fairness bound must be at least 1");
    if (limits.round_limit < 0)
        throw std::invalid_argument("round limit must be non-negative");
    if (limits.validate_initial)
        validate_initial_config(initial);

    ExecutionState st = make_initial_state(initial);
    RunResult res;
    res.outcome = Outcome::RoundLimit;

    if (auto v = check_safety(st)) {
        res.outcome = Outcome::Violation;
        res.violation = v;
        res.rounds = 0;
        res.steps = 0;
        return res;
    }

    for (;;) {
        if (gathering_is_final(st)) {
            res.outcome = Outcome::Gathered;
            break;
        }
        if (st.rounds > limits.round_limit) {
            res.outcome = Outcome::RoundLimit;
            break;
        }

        SchedulerAction action = sched.next(st);
        if (limits.record_transcript)
            res.transcript.push_back(action);

        try {
            TraceEvent ev = apply(st, action);
            if (limits.record_trace)
                res.trace.push_back(ev);
        } catch (const protocol_error& e) {
            res.outcome = Outcome::Violation;
            res.violation = Violation{e.property(), e.what()};
            break;
        }

        if (auto v = check_safety(st)) {
            res.outcome = Outcome::Violation;
            res.violation = v;
            break;
        }

        std::optional<Violation> starved;
        for (int r = 0; r < st.k(); ++r) {
            if (st.step - st.last_completion_step[static_cast<size_t>(r)] >=
                limits.fairness_bound) {
                starved = Violation{"scheduler-contract",
                                    "robot " + std::to_string(r) +
                                        " exceeded the fairness bound"};
                break;
            }
        }
        if (starved) {
            res.outcome = Outcome::Violation;
            res.violation = starved;
            break;
        }
    }

    res.rounds = st.rounds;
    res.steps = st.step;
    return res;
}

uint64_t bounded_pick(std::mt19937_64& rng, uint64_t bound) {
    if (bound == 0)
        throw std::invalid_argument("bounded_pick: bound must be positive");
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
        uint64_t x = rng();
        if (x < limit)
            return x % bound;
    }
}

}  // namespace ringgather
