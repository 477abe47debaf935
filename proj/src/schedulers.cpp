#include <algorithm>
#include <climits>
#include <stdexcept>

#include "ringgather/executor.hpp"

namespace ringgather {

namespace {

SchedulerAction action_for(const ExecutionState& st, int robot, int resolution = 0) {
    ActionKind kind = st.robots[static_cast<size_t>(robot)].ready()
                          ? ActionKind::LookCompute
                          : ActionKind::ExecuteMove;
    return SchedulerAction{robot, kind, resolution};
}

// Earliest-deadline bookkeeping shared by the randomized policies. A robot's
// deadline is the last step by which its next cycle must complete; `work` is
// the number of actions that takes (2 when it still has to look). min_margin
// is the worst slack if the robots were served strictly by deadline, so as
// long as it stays positive one action can safely go elsewhere.
struct EdfInfo {
    long min_margin = 0;
    int head = 0;  // earliest deadline, ties to the lowest robot index
};

EdfInfo edf_info(const ExecutionState& st, int fairness_bound) {
    struct Item {
        long deadline;
        int robot;
        long work;
    };
    std::vector<Item> items;
    items.reserve(static_cast<size_t>(st.k()));
    for (int r = 0; r < st.k(); ++r) {
        long work = st.robots[static_cast<size_t>(r)].ready() ? 2 : 1;
        items.push_back({st.last_completion_step[static_cast<size_t>(r)] + fairness_bound,
                         r, work});
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        return a.deadline != b.deadline ? a.deadline < b.deadline : a.robot < b.robot;
    });

    EdfInfo info;
    info.head = items.front().robot;
    info.min_margin = LONG_MAX;
    long cum = 0;
    for (const Item& it : items) {
        cum += it.work;
        info.min_margin = std::min(info.min_margin, it.deadline - st.step - cum);
    }
    return info;
}

class RoundRobinScheduler : public Scheduler {
 public:
    SchedulerAction next(const ExecutionState& st) override {
        if (cursor_ >= st.k())
            cursor_ = 0;
        const RobotState& r = st.robots[static_cast<size_t>(cursor_)];
        SchedulerAction a = action_for(st, cursor_);
        // Stay on the robot through its look so the following call executes
        // the move; advance once the cycle is done.
        if (!r.ready())
            cursor_ = (cursor_ + 1) % st.k();
        return a;
    }

 private:
    int cursor_ = 0;
};

// Lockstep: everybody looks against the same configuration, then everybody
// moves. Ties resolve clockwise.
class SynchronousScheduler : public Scheduler {
 public:
    SchedulerAction next(const ExecutionState& st) override {
        for (;;) {
            if (!moving_) {
                for (int r = 0; r < st.k(); ++r)
                    if (st.robots[static_cast<size_t>(r)].ready())
                        return action_for(st, r);
                moving_ = true;
            } else {
                for (int r = 0; r < st.k(); ++r)
                    if (!st.robots[static_cast<size_t>(r)].ready())
                        return action_for(st, r);
                moving_ = false;
            }
        }
    }

 private:
    bool moving_ = false;
};

// Uniformly random actions, except that a robot whose deadline slack has run
// out is served first. Serving the earliest deadline never lowers anyone
// else's slack, so the fairness bound holds for every seed.
class RandomFairScheduler : public Scheduler {
 public:
    RandomFairScheduler(int fairness_bound, std::uint64_t seed)
        : fairness_(fairness_bound), rng_(seed) {}

    SchedulerAction next(const ExecutionState& st) override {
        EdfInfo e = edf_info(st, fairness_);
        int robot = e.min_margin <= 0
                        ? e.head
                        : static_cast<int>(bounded_pick(rng_, static_cast<std::uint64_t>(st.k())));
        int resolution = static_cast<int>(bounded_pick(rng_, 2));
        return action_for(st, robot, resolution);
    }

 private:
    int fairness_;
    std::mt19937_64 rng_;
};

// Worst-case flavored policy for exercising stale intents: let every ready
// robot look against the same configuration, then hold one of the pending
// movers back while the rest execute and re-look, so its intent ages as far
// as the fairness bound allows.
class AdversarialSplitScheduler : public Scheduler {
 public:
    AdversarialSplitScheduler(int fairness_bound, std::uint64_t seed)
        : fairness_(fairness_bound), rng_(seed) {}

    SchedulerAction next(const ExecutionState& st) override {
        EdfInfo e = edf_info(st, fairness_);
        if (e.min_margin <= 0) {
            if (delayed_ == e.head)
                delayed_ = -1;
            return action_for(st, e.head);
        }

        for (int r = 0; r < st.k(); ++r)
            if (st.robots[static_cast<size_t>(r)].ready())
                return action_for(st, r, static_cast<int>(bounded_pick(rng_, 2)));

        // All intents are in. Pick a robot to starve if we have none, chosen
        // among the movers (a held stay would stress nothing).
        std::vector<int> movers;
        for (int r = 0; r < st.k(); ++r) {
            const RobotState& rs = st.robots[static_cast<size_t>(r)];
            if (!rs.ready() && !rs.pending->stay)
                movers.push_back(r);
        }
        if (delayed_ < 0 && movers.size() >= 2)
            delayed_ = movers[bounded_pick(rng_, movers.size())];

        for (int r = 0; r < st.k(); ++r)
            if (!st.robots[static_cast<size_t>(r)].ready() && r != delayed_)
                return action_for(st, r);

        int r = delayed_;
        delayed_ = -1;
        return action_for(st, r);
    }

 private:
    int fairness_;
    std::mt19937_64 rng_;
    int delayed_ = -1;
};

// Deliberately broken: never schedules robot 0. Exists so the fairness
// watchdog has something to catch in tests and demos.
class UnfairStubScheduler : public Scheduler {
 public:
    SchedulerAction next(const ExecutionState& st) override {
        if (st.k() < 2)
            return action_for(st, 0);
        if (cursor_ >= st.k() || cursor_ == 0)
            cursor_ = 1;
        const RobotState& r = st.robots[static_cast<size_t>(cursor_)];
        SchedulerAction a = action_for(st, cursor_);
        if (!r.ready())
            cursor_ = cursor_ + 1 >= st.k() ? 1 : cursor_ + 1;
        return a;
    }

 private:
    int cursor_ = 1;
};

}  // namespace

std::unique_ptr<Scheduler> make_scheduler(const std::string& name, int fairness_bound,
                                          std::uint64_t seed) {
    if (name == "round_robin")
        return std::make_unique<RoundRobinScheduler>();
    if (name == "synchronous")
        return std::make_unique<SynchronousScheduler>();
    if (name == "random_fair")
        return std::make_unique<RandomFairScheduler>(fairness_bound, seed);
    if (name == "adversarial_split")
        return std::make_unique<AdversarialSplitScheduler>(fairness_bound, seed);
    if (name == "unfair_stub")
        return std::make_unique<UnfairStubScheduler>();
    throw std::invalid_argument("unknown scheduler \"" + name +
                                "\" (try round_robin, synchronous, random_fair, "
                                "adversarial_split, unfair_stub)");
}

std::vector<std::string> scheduler_names() {
    return {"round_robin", "synchronous", "random_fair", "adversarial_split", "unfair_stub"};
}

}  // namespace ringgather
