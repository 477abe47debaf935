#pragma once
// Exhaustive exploration of every scheduler interleaving on small instances.
// Safety monitors run on each reachable state; liveness comes from cycle
// analysis over round-closing transitions, so the verdict covers all fair
// schedules at once instead of sampling them.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ringgather/executor.hpp"

namespace ringgather {

enum class Verdict { Verified, Falsified, Inconclusive };

const char* verdict_name(Verdict v);

struct CheckOptions {
  long round_limit = 0;            // 0 picks 10 * n * n
  bool canonicalize = true;        // fold out rotations and reflections
  std::uint64_t state_budget = 0;  // explored-state cap, 0 means unlimited
  bool collect_patterns = false;   // record every class label seen
  bool want_transcript = true;     // reconstruct a concrete repro on falsification
};

struct CheckViolation {
  std::string property;
  std::string message;
  Configuration initial;
  long depth = 0;  // scheduler actions from the initial state, when known
  // Concrete action list reproducing the violation through the executor.
  // Liveness findings describe infinite schedules, so they carry none.
  std::vector<SchedulerAction> transcript;
  std::string transcript_note;
};

struct CheckReport {
  Verdict verdict = Verdict::Inconclusive;
  std::uint64_t states = 0;
  std::uint64_t transitions = 0;
  std::uint64_t initials = 0;
  // Worst round count over every schedule and every explored start, known
  // when the exploration completed without a safety finding.
  long max_rounds = -1;
  std::optional<CheckViolation> violation;
  std::vector<std::string> patterns;  // sorted class labels, when collected
  std::string note;
};

// Tower-free, non-periodic k-robot patterns on an n-ring, one representative
// per rotation/reflection orbit, in ascending occupancy order.
std::vector<Configuration> enumerate_initials(int n, int k);

CheckReport check_instance(const Configuration& initial, const CheckOptions& opts);

// Runs every enumerated initial, stopping at the first falsification.
CheckReport check_all(int n, int k, const CheckOptions& opts);

// Absorption measurements over the tower-phase chain. Each hop seeds one
// class shape (optionally with its tower already standing), explores every
// schedule, and demands that the first class change lands in `expected`
// within the hop round bound. Chains run a full block-to-gathering descent
// and record the worst round count.
struct LemmaHop {
  std::string seed;  // class label, "+tower" suffix when seeded with one
  int n = 0;
  int k = 0;
  bool towered = false;
  std::vector<std::string> expected;
  std::set<std::string> reached;
  long worst_rounds = -1;
  bool ok = false;
  std::string note;
};

struct LemmaChain {
  int n = 0;
  int k = 0;
  long worst_rounds = -1;
  bool ok = false;
};

struct LemmaReport {
  std::vector<LemmaHop> hops;
  std::vector<LemmaChain> chains;
  long hop_round_bound = 3;
  // max over chains of worst_rounds / k^2, the measured quadratic constant
  double chain_round_coefficient = 0.0;
  bool all_ok = false;
};

// Covers every class shape constructible with an odd robot count up to
// max_k (capped at 9 by the packed state encoding), each on a ring five
// nodes wider than the robot count.
LemmaReport lemma_suite(int max_k);

}  // namespace ringgather
