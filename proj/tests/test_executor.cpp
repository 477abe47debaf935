#include "doctest.h"

#include <array>
#include <tuple>

#include "ringgather/executor.hpp"

using namespace ringgather;

namespace {

std::vector<std::tuple<int, int, int>> action_tuples(const std::vector<SchedulerAction>& a) {
    std::vector<std::tuple<int, int, int>> out;
    for (const SchedulerAction& x : a)
        out.push_back({x.robot, static_cast<int>(x.kind), x.choice_resolution});
    return out;
}

}  // namespace

TEST_CASE("a robot's decision follows the phase rules it can see") {
    Configuration tower_phase = Configuration::from_nodes(8, {0, 0, 1});
    Decision d = decide(tower_phase, 0, true);
    CHECK(d.kind == Decision::Stay);
    d = decide(tower_phase, 1, false);
    CHECK(d.kind == Decision::Move);
    CHECK(d.target == 0);

    Configuration spread = Configuration::from_nodes(11, {0, 2, 4, 6, 8});
    d = decide(spread, 2, false);
    CHECK(d.kind == Decision::Move);
    CHECK(d.target == 3);
    d = decide(spread, 0, false);
    CHECK(d.kind == Decision::Stay);

    Configuration torn = Configuration::from_nodes(11, {0, 1, 2, 5, 8, 9, 10});
    d = decide(torn, 5, false);
    CHECK(d.kind == Decision::Choice);
    CHECK(d.target == 6);
    CHECK(d.alt == 4);

    // A tower under a robot outside the second phase breaks the protocol's
    // own invariant and is reported, not acted on.
    Configuration bad = Configuration::from_nodes(12, {0, 0, 2, 6});
    try {
        decide(bad, 0, true);
        FAIL("expected a protocol_error");
    } catch (const protocol_error& e) {
        CHECK(e.property() == "phase1-tower");
    }

    Configuration stalled = Configuration::from_nodes(9, {0, 1, 4, 5});
    try {
        decide(stalled, 0, false);
        FAIL("expected a protocol_error");
    } catch (const protocol_error& e) {
        CHECK(e.property() == "protocol-stuck");
    }
}

TEST_CASE("initial states number robots by node, towers consecutively") {
    Configuration c = Configuration::from_nodes(9, {1, 1, 4});
    ExecutionState st = make_initial_state(c);
    REQUIRE(st.k() == 3);
    CHECK(st.robots[0].pos == 1);
    CHECK(st.robots[1].pos == 1);
    CHECK(st.robots[2].pos == 4);
    CHECK(st.step == 0);
    CHECK(st.rounds == 0);
    CHECK(st.quiescent());
    CHECK(st.last_completion_step == std::vector<long>{0, 0, 0});

    ExecutionState permuted = make_initial_state(c, {4, 1, 1});
    CHECK(permuted.robots[0].pos == 4);
    CHECK(permuted.robots[1].pos == 1);

    CHECK_THROWS_AS(make_initial_state(c, {0, 1, 2}), std::invalid_argument);
    std::vector<NodeIndex> crowd(33);
    for (int i = 0; i < 33; ++i)
        crowd[static_cast<size_t>(i)] = i;
    CHECK_THROWS_AS(make_initial_state(Configuration::from_nodes(40, crowd), crowd),
                    std::invalid_argument);
}

TEST_CASE("the engine rejects actions that break the scheduler contract") {
    ExecutionState st = make_initial_state(Configuration::from_nodes(8, {0, 2, 4}));
    auto expect_contract = [&](const SchedulerAction& a, const char* msg) {
        try {
            apply(st, a);
            FAIL("expected a protocol_error for: ", msg);
        } catch (const protocol_error& e) {
            CHECK(e.property() == "scheduler-contract");
            CHECK(std::string(e.what()) == msg);
        }
    };

    expect_contract({3, ActionKind::LookCompute, 0}, "robot index out of range");
    expect_contract({1, ActionKind::ExecuteMove, 0},
                    "move scheduled for a robot with no pending intent");
    apply(st, {1, ActionKind::LookCompute, 0});
    expect_contract({1, ActionKind::LookCompute, 0},
                    "look scheduled while an intent is still pending");

    ExecutionState torn = make_initial_state(Configuration::from_nodes(11, {0, 1, 2, 5, 8, 9, 10}));
    try {
        apply(torn, {3, ActionKind::LookCompute, 7});
        FAIL("expected a protocol_error");
    } catch (const protocol_error& e) {
        CHECK(std::string(e.what()) == "two-way decision left unresolved");
    }
    apply(torn, {3, ActionKind::LookCompute, 1});  // 1 picks the counterclockwise side
    REQUIRE(torn.robots[3].pending);
    CHECK(torn.robots[3].pending->target == 4);
}

TEST_CASE("trace events print one self-contained line per action") {
    ExecutionState st = make_initial_state(Configuration::parse("n=6;occ=1,1,1,0,0,0"));
    TraceEvent look = apply(st, {1, ActionKind::LookCompute, 0});
    CHECK(format_trace_event(look) ==
          "step=0 robot=1 kind=look phase=2 class=Csb(3) "
          "before=n=6;occ=1,1,1,0,0,0 after=n=6;occ=1,1,1,0,0,0");
    TraceEvent stay = apply(st, {1, ActionKind::ExecuteMove, 0});
    CHECK(format_trace_event(stay) ==
          "step=1 robot=1 kind=stay phase=2 class=Csb(3) "
          "before=n=6;occ=1,1,1,0,0,0 after=n=6;occ=1,1,1,0,0,0");
    apply(st, {0, ActionKind::LookCompute, 0});
    TraceEvent move = apply(st, {0, ActionKind::ExecuteMove, 0});
    CHECK(format_trace_event(move) ==
          "step=3 robot=0 kind=move phase=2 class=Csb(3) "
          "before=n=6;occ=1,1,1,0,0,0 after=n=6;occ=0,2,1,0,0,0");
}

TEST_CASE("labels name the second-phase class or the first-phase type") {
    int phase = 0;
    CHECK(classify_label(Configuration::from_nodes(8, {0, 1, 2}), &phase) == "Csb(3)");
    CHECK(phase == 2);
    CHECK(classify_label(Configuration::from_nodes(11, {0, 2, 4, 6, 8}), &phase) == "Type1");
    CHECK(phase == 1);
    CHECK(classify_label(Configuration::from_nodes(12, {0, 1, 2, 6, 9})) == "Type3a");
    CHECK(classify_label(Configuration::from_nodes(8, {0, 2, 4, 6})) == "invalid");
    CHECK(classify_label(Configuration::from_nodes(8, {0, 0, 3})) == "invalid");
}

TEST_CASE("the threshold flag starts set only where towers are already fine") {
    CHECK(initial_threshold_flag(Configuration::from_nodes(8, {0, 1, 2})));
    CHECK(initial_threshold_flag(Configuration::from_nodes(8, {0, 0, 1})));
    CHECK(initial_threshold_flag(Configuration::from_nodes(6, {0, 0, 0})));
    // A mid-chain shape such as Cbl(1,1) counts as past the threshold even
    // before any block of two exists: a run seeded there builds its tower
    // further down the chain without ever revisiting the single-block entry.
    CHECK(initial_threshold_flag(Configuration::from_nodes(9, {0, 2, 4})));
    CHECK_FALSE(initial_threshold_flag(Configuration::from_nodes(12, {0, 1, 2, 6, 9})));
    CHECK_FALSE(initial_threshold_flag(Configuration::from_nodes(8, {0, 0, 3})));
}

TEST_CASE("safety monitors flag periodicity and misplaced towers") {
    auto viol = [](const Configuration& c, bool flag) {
        auto v = check_config_safety(c, flag);
        return v ? v->property : std::string("none");
    };

    CHECK(viol(Configuration::from_nodes(8, {0, 2, 4, 6}), true) == "periodicity");
    CHECK(viol(Configuration::from_nodes(8, {0, 0, 3}), false) == "tower-before-block");
    CHECK(viol(Configuration::from_nodes(8, {0, 0, 3}), true) == "tower-placement");
    CHECK(viol(Configuration::from_nodes(8, {0, 1, 1, 2}), false) == "tower-before-block");
    CHECK(viol(Configuration::from_nodes(8, {0, 1, 1, 2}), true) == "none");
    CHECK(viol(Configuration::from_nodes(8, {0, 0, 1, 2}), true) == "tower-placement");
    CHECK(viol(Configuration::from_nodes(9, {0, 2, 4}), false) == "none");

    auto msg = check_config_safety(Configuration::from_nodes(8, {0, 2, 4, 6}), false);
    REQUIRE(msg);
    CHECK(msg->message == "configuration became periodic");
}

TEST_CASE("initial configurations are vetted against the standing assumptions") {
    CHECK_THROWS_WITH_AS(validate_initial_config(Configuration::from_nodes(9, {0, 0, 3})),
                         "initial configuration must be tower-free", std::invalid_argument);
    CHECK_THROWS_WITH_AS(validate_initial_config(Configuration::from_nodes(10, {0, 1, 3, 5})),
                         "robot count must be odd", std::invalid_argument);
    CHECK_THROWS_WITH_AS(validate_initial_config(Configuration::from_nodes(8, {0})),
                         "need more than two robots", std::invalid_argument);
    CHECK_THROWS_WITH_AS(validate_initial_config(Configuration::from_nodes(8, {0, 1, 2, 3, 4})),
                         "need at least four empty nodes (k < n-3)", std::invalid_argument);
    CHECK_THROWS_WITH_AS(validate_initial_config(Configuration::from_nodes(9, {0, 3, 6})),
                         "initial configuration must not be periodic", std::invalid_argument);
    CHECK_NOTHROW(validate_initial_config(Configuration::from_nodes(9, {0, 2, 4})));
}

TEST_CASE("lockstep and round-robin gather a three-robot block in one round") {
    Configuration c = Configuration::from_nodes(7, {0, 1, 2});
    RunLimits limits;
    limits.round_limit = 100;
    limits.fairness_bound = 9;
    limits.record_trace = true;

    for (const char* name : {"synchronous", "round_robin"}) {
        CAPTURE(name);
        auto sched = make_scheduler(name, limits.fairness_bound, 1);
        RunResult res = run(c, *sched, limits);
        CHECK(res.outcome == Outcome::Gathered);
        CHECK(res.rounds == 1);
        CHECK(res.steps == 6);
        REQUIRE_FALSE(res.trace.empty());
        CHECK(res.trace.back().after == Configuration::from_nodes(7, {1, 1, 1}));
    }
}

TEST_CASE("the watchdog catches a scheduler that starves a robot") {
    Configuration c = Configuration::from_nodes(9, {0, 2, 4});
    RunLimits limits;
    limits.round_limit = 1000;
    limits.fairness_bound = 9;
    auto sched = make_scheduler("unfair_stub", limits.fairness_bound, 0);
    RunResult res = run(c, *sched, limits);
    CHECK(res.outcome == Outcome::Violation);
    REQUIRE(res.violation);
    CHECK(res.violation->property == "scheduler-contract");
    CHECK(res.violation->message == "robot 0 exceeded the fairness bound");
}

TEST_CASE("a zero round limit stops after the first full round") {
    Configuration c = Configuration::from_nodes(9, {0, 2, 4, 6, 8});
    RunLimits limits;
    limits.round_limit = 0;
    limits.fairness_bound = 15;
    auto sched = make_scheduler("round_robin", limits.fairness_bound, 0);
    RunResult res = run(c, *sched, limits);
    CHECK(res.outcome == Outcome::RoundLimit);
    CHECK(res.rounds == 1);
}

TEST_CASE("run vets its limits and its initial configuration") {
    Configuration c = Configuration::from_nodes(9, {0, 2, 4});
    auto sched = make_scheduler("round_robin", 9, 0);
    RunLimits limits;
    limits.fairness_bound = 0;
    limits.round_limit = 10;
    CHECK_THROWS_AS(run(c, *sched, limits), std::invalid_argument);
    limits.fairness_bound = 9;
    limits.round_limit = -1;
    CHECK_THROWS_AS(run(c, *sched, limits), std::invalid_argument);

    limits.round_limit = 100;
    Configuration even_k = Configuration::from_nodes(9, {0, 1, 2, 3});
    CHECK_THROWS_AS(run(even_k, *sched, limits), std::invalid_argument);

    // Opting out of the vetting runs the protocol outside its contract; on
    // this pattern both border ranks face each other and the rules stall.
    limits.validate_initial = false;
    RunResult res = run(even_k, *sched, limits);
    CHECK(res.outcome == Outcome::Violation);
    REQUIRE(res.violation);
    CHECK(res.violation->property == "protocol-stuck");
}

TEST_CASE("unknown scheduler names are rejected") {
    CHECK_THROWS_AS(make_scheduler("does_not_exist", 3, 0), std::invalid_argument);
    CHECK(scheduler_names() ==
          std::vector<std::string>{"round_robin", "synchronous", "random_fair",
                                   "adversarial_split", "unfair_stub"});
}

TEST_CASE("randomized fair schedulers always gather within the round budget") {
    struct Instance {
        int n;
        std::vector<NodeIndex> nodes;
    };
    const Instance instances[] = {
        {9, {0, 2, 4}},
        {11, {0, 2, 4, 6, 8}},
        {12, {0, 1, 2, 6, 9}},
        {11, {0, 1, 2, 5, 8, 9, 10}},
    };
    for (const Instance& inst : instances) {
        Configuration c = Configuration::from_nodes(inst.n, inst.nodes);
        RunLimits limits;
        limits.round_limit = 10L * inst.n * inst.n;
        limits.fairness_bound = 3 * c.k();
        for (const char* name : {"random_fair", "adversarial_split"}) {
            for (std::uint64_t seed = 0; seed < 50; ++seed) {
                CAPTURE(inst.n);
                CAPTURE(name);
                CAPTURE(seed);
                auto sched = make_scheduler(name, limits.fairness_bound, seed);
                RunResult res = run(c, *sched, limits);
                REQUIRE(res.outcome == Outcome::Gathered);
                CHECK(res.rounds <= limits.round_limit);
            }
        }
    }
}

TEST_CASE("a stale intent from an older snapshot still lands correctly") {
    // Seeded mid-protocol: a bigger twin about to grow a tower at node 2.
    // The threshold flag is set by hand, standing in for the single block the
    // protocol went through before reaching this shape.
    ExecutionState st = make_initial_state(Configuration::from_nodes(9, {0, 1, 2, 4}));
    st.first_single_1block_seen = true;
    CHECK(classify_label(st.config) == "Cst(1)");

    auto step = [&](int robot, ActionKind kind) {
        apply(st, {robot, kind, 0});
        CHECK_FALSE(check_safety(st).has_value());
    };

    step(1, ActionKind::LookCompute);
    step(1, ActionKind::ExecuteMove);
    CHECK(st.config == Configuration::from_nodes(9, {0, 2, 2, 4}));
    CHECK(classify_label(st.config) == "Cbl(1,1)");

    step(0, ActionKind::LookCompute);  // robot 0 snapshots the twin-flanked block
    REQUIRE(st.robots[0].pending);
    CHECK(st.robots[0].pending->target == 1);
    CHECK(st.robots[0].pending->snapshot_step == 2);

    step(3, ActionKind::LookCompute);
    step(3, ActionKind::ExecuteMove);
    CHECK(st.config == Configuration::from_nodes(9, {0, 2, 2, 3}));
    CHECK(classify_label(st.config) == "Cssb(2)");

    // The configuration moved on underneath robot 0, but its aged intent is
    // exactly what the fresh rule asks of it here.
    step(0, ActionKind::ExecuteMove);
    CHECK(st.config == Configuration::from_nodes(9, {1, 2, 2, 3}));
    CHECK(classify_label(st.config) == "Csb(3)");

    step(0, ActionKind::LookCompute);
    step(0, ActionKind::ExecuteMove);
    CHECK(classify_label(st.config) == "Csb(2)");
    step(3, ActionKind::LookCompute);
    step(3, ActionKind::ExecuteMove);
    CHECK(is_gathered(st.config));
    CHECK(st.config.count(2) == 4);
}

TEST_CASE("recorded transcripts replay to the same result") {
    Configuration c = Configuration::from_nodes(11, {0, 2, 4, 6, 8});
    RunLimits limits;
    limits.round_limit = 1000;
    limits.fairness_bound = 15;
    limits.record_trace = true;
    limits.record_transcript = true;

    auto sched = make_scheduler("random_fair", limits.fairness_bound, 7);
    RunResult first = run(c, *sched, limits);
    REQUIRE(first.outcome == Outcome::Gathered);
    REQUIRE_FALSE(first.transcript.empty());

    auto sched_again = make_scheduler("random_fair", limits.fairness_bound, 7);
    RunResult second = run(c, *sched_again, limits);
    CHECK(action_tuples(second.transcript) == action_tuples(first.transcript));

    ReplayScheduler replay(first.transcript);
    RunResult replayed = run(c, replay, limits);
    CHECK(replayed.outcome == first.outcome);
    CHECK(replayed.rounds == first.rounds);
    CHECK(replayed.steps == first.steps);
    CHECK(replay.exhausted());
    REQUIRE_FALSE(replayed.trace.empty());
    CHECK(replayed.trace.back().after == first.trace.back().after);

    ReplayScheduler empty({});
    CHECK_THROWS_AS(empty.next(make_initial_state(c)), std::out_of_range);
}

TEST_CASE("bounded draws are uniform, deterministic, and reject a zero bound") {
    std::mt19937_64 rng(42);
    CHECK_THROWS_AS(bounded_pick(rng, 0), std::invalid_argument);
    for (int i = 0; i < 10; ++i)
        CHECK(bounded_pick(rng, 1) == 0);

    std::mt19937_64 a(9), b(9);
    for (int i = 0; i < 100; ++i)
        CHECK(bounded_pick(a, 1000) == bounded_pick(b, 1000));

    std::mt19937_64 u(7);
    std::array<int, 6> buckets{};
    for (int i = 0; i < 60000; ++i)
        ++buckets[bounded_pick(u, 6)];
    for (int count : buckets) {
        CHECK(count > 9000);
        CHECK(count < 11000);
    }
}
