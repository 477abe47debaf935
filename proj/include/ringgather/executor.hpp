#pragma once
// Asynchronous execution engine. Look and Compute are fused into one atomic
// step; only the Move may be delayed, so a robot is either Ready or holding a
// pending intent computed from an older snapshot. Moves are applied
// unconditionally, towers and all.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>

#include "ringgather/phase2.hpp"
#include "ringgather/ring.hpp"

namespace ringgather {

// What a single robot decided after looking: stay put, move to an adjacent
// node, or a two-way tie the scheduler resolves (cw first, ccw second).
struct Decision {
  enum Kind { Stay, Move, Choice } kind = Stay;
  NodeIndex target = -1;
  NodeIndex alt = -1;

  static Decision stay() { return {Stay, -1, -1}; }
  static Decision move(NodeIndex t) { return {Move, t, -1}; }
  static Decision choice(NodeIndex cw, NodeIndex ccw) { return {Choice, cw, ccw}; }
};

// The full protocol as a single robot runs it: second-phase rules when the
// pattern matches one of the tower classes, first-phase rules otherwise. The
// robot's own multiplicity bit is the only thing it knows beyond the pattern.
Decision decide(const Configuration& c, NodeIndex robot, bool local_multiplicity);

enum class ActionKind { LookCompute, ExecuteMove };

struct SchedulerAction {
  int robot = 0;
  ActionKind kind = ActionKind::LookCompute;
  // Consumed only when the look produces a Choice: 0 picks the clockwise
  // target, 1 the counterclockwise one.
  int choice_resolution = 0;
};

struct PendingIntent {
  bool stay = false;
  NodeIndex target = -1;
  long snapshot_step = 0;  // when the look happened, for staleness probes
};

struct RobotState {
  NodeIndex pos = 0;
  std::optional<PendingIntent> pending;
  bool ready() const { return !pending.has_value(); }
};

struct ExecutionState {
  Configuration config;
  std::vector<RobotState> robots;
  long step = 0;
  long rounds = 0;
  bool first_single_1block_seen = false;
  // Round bookkeeping and the fairness clock, both in scheduler steps.
  std::uint32_t completed_mask = 0;
  std::vector<long> last_completion_step;

  int k() const { return static_cast<int>(robots.size()); }
  bool quiescent() const;
};

// Robots are numbered by ascending node; towers get consecutive numbers. The
// second form fixes an explicit numbering (used to probe anonymity).
ExecutionState make_initial_state(const Configuration& c);
ExecutionState make_initial_state(const Configuration& c, const std::vector<NodeIndex>& positions);

struct TraceEvent {
  long step = 0;
  int robot = 0;
  ActionKind kind = ActionKind::LookCompute;
  bool stayed = false;  // distinguishes a stay from a move when kind is ExecuteMove
  int phase = 0;
  std::string cls;
  Configuration before;
  Configuration after;
};

std::string format_trace_event(const TraceEvent& ev);

// One scheduler action against the state. Raises protocol_error for protocol
// violations discovered while deciding and for malformed actions
// ("scheduler-contract"). Safety monitors run separately; see check_safety.
TraceEvent apply(ExecutionState& st, const SchedulerAction& action);

struct Violation {
  std::string property;
  std::string message;
};

// Ground-truth monitors, checked after every step (and on the initial state):
// no tower before the first single-block pattern, never periodic, and towers
// confined to the tower-construction node of the current class.
std::optional<Violation> check_safety(const ExecutionState& st);

// Same monitors on a bare configuration plus the threshold flag; the
// exhaustive checker shares this with the runtime monitors.
std::optional<Violation> check_config_safety(const Configuration& c, bool threshold_flag);

// True when all occupied nodes form one consecutive run of length >= 2.
bool single_block_pattern(const Configuration& c);

// True when every tower sits where the current second-phase class builds its
// tower (no towers at all also qualifies).
bool towers_legally_placed(const Configuration& c);

// Starting value of first_single_1block_seen: set for single-block patterns
// and for legally towered second-phase seeds, clear for everything else so an
// illegally placed tower trips the monitor immediately.
bool initial_threshold_flag(const Configuration& c);

// Label (and phase number) the trace carries for a configuration.
std::string classify_label(const Configuration& c, int* phase_out = nullptr);

class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual SchedulerAction next(const ExecutionState& st) = 0;
};

// Built-in policies: round_robin, synchronous, random_fair, adversarial_split,
// plus unfair_stub which deliberately starves robot 0 so the fairness watchdog
// can be demonstrated. Unknown names raise invalid_argument.
std::unique_ptr<Scheduler> make_scheduler(const std::string& name, int fairness_bound,
                                          std::uint64_t seed);
std::vector<std::string> scheduler_names();

// Fixed action list, for replaying transcripts in tests.
class ReplayScheduler : public Scheduler {
 public:
  explicit ReplayScheduler(std::vector<SchedulerAction> actions)
      : actions_(std::move(actions)) {}
  bool exhausted() const { return next_ >= actions_.size(); }
  SchedulerAction next(const ExecutionState&) override {
    if (exhausted()) throw std::out_of_range("replay transcript exhausted");
    return actions_[next_++];
  }

 private:
  std::vector<SchedulerAction> actions_;
  size_t next_ = 0;
};

enum class Outcome { Gathered, RoundLimit, Violation };

const char* outcome_name(Outcome o);

struct RunLimits {
  long round_limit = 0;
  int fairness_bound = 0;
  bool validate_initial = true;
  bool record_trace = false;
  bool record_transcript = false;
};

struct RunResult {
  Outcome outcome = Outcome::Gathered;
  long rounds = 0;
  long steps = 0;
  std::optional<Violation> violation;
  std::vector<TraceEvent> trace;
  std::vector<SchedulerAction> transcript;
};

// Checked against the protocol's standing assumptions: tower-free, odd k,
// 2 < k < n-3, not periodic. Raises invalid_argument with the failed bound.
void validate_initial_config(const Configuration& c);

RunResult run(const Configuration& initial, Scheduler& sched, const RunLimits& limits);

// Deterministic replacement for uniform_int_distribution (whose output is
// implementation-defined): uniform draw from [0, bound) by rejection.
std::uint64_t bounded_pick(std::mt19937_64& rng, std::uint64_t bound);

}  // namespace ringgather
