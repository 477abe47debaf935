// Command-line front end: batch simulation, exhaustive checking, the class
// absorption suite, initial-configuration enumeration, and scaling stats.
// Exit codes: 0 clean, 1 usage or operational error, 2 protocol finding
// (violation, falsification, or an unfinished run).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ringgather/checker.hpp"
#include "ringgather/executor.hpp"

using nlohmann::json;
using namespace ringgather;

namespace {

void write_file_atomic(const std::string& path, const std::string& content) {
    std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        os << content;
        if (!os)
            throw std::runtime_error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

int default_jobs(int count) {
    unsigned hw = std::thread::hardware_concurrency();
    int jobs = hw ? static_cast<int>(hw) : 1;
    return std::max(1, std::min(jobs, count));
}

// Runs fn(0..count-1) across jobs threads; results must go to preallocated
// slots so no synchronization is needed beyond the work counter.
template <typename F>
void parallel_for(int count, int jobs, F&& fn) {
    if (count <= 0)
        return;
    if (jobs <= 1) {
        for (int i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::future<void>> futures;
    futures.reserve(static_cast<size_t>(jobs));
    for (int t = 0; t < jobs; ++t)
        futures.push_back(std::async(std::launch::async, [&]() {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1))
                fn(i);
        }));
    for (auto& f : futures)
        f.get();
}

Configuration random_initial(int n, int k, std::mt19937_64& rng) {
    std::vector<NodeIndex> nodes(static_cast<size_t>(n));
    std::iota(nodes.begin(), nodes.end(), 0);
    for (int tries = 0; tries < 100000; ++tries) {
        for (int i = 0; i < k; ++i) {
            int j = i + static_cast<int>(bounded_pick(rng, static_cast<std::uint64_t>(n - i)));
            std::swap(nodes[static_cast<size_t>(i)], nodes[static_cast<size_t>(j)]);
        }
        Configuration c = Configuration::from_nodes(
            n, std::vector<NodeIndex>(nodes.begin(), nodes.begin() + k));
        try {
            validate_initial_config(c);
            return c;
        } catch (const std::invalid_argument&) {
        }
    }
    throw std::runtime_error("could not sample a valid initial configuration");
}

json violation_json(const Violation& v) {
    return json{{"property", v.property}, {"message", v.message}};
}

json transcript_json(const std::vector<SchedulerAction>& actions) {
    json arr = json::array();
    for (const SchedulerAction& a : actions)
        arr.push_back(json{{"robot", a.robot},
                           {"kind", a.kind == ActionKind::LookCompute ? "look" : "move"},
                           {"choice", a.choice_resolution}});
    return arr;
}

struct SimulateArgs {
    std::string initial_text;
    int n = 0;
    int k = 0;
    std::string scheduler = "random_fair";
    int fairness = 0;
    std::uint64_t seed = 0;
    long round_limit = 0;
    int runs = 1;
    int jobs = 0;
    std::string trace_path;
    std::string report_path;
    bool allow_invalid = false;
};

int cmd_simulate(const SimulateArgs& args) {
    std::optional<Configuration> fixed;
    if (!args.initial_text.empty()) {
        fixed = Configuration::parse(args.initial_text);
        if (!args.allow_invalid)
            validate_initial_config(*fixed);
    } else if (args.n <= 0 || args.k <= 0) {
        std::cerr << "simulate: give --initial or both --n and --k\n";
        return 1;
    }
    if (!args.trace_path.empty() && args.runs != 1) {
        std::cerr << "simulate: --trace needs exactly one run\n";
        return 1;
    }

    struct RunRecord {
        std::uint64_t seed = 0;
        Configuration initial;
        RunResult result;
    };
    std::vector<RunRecord> records(static_cast<size_t>(args.runs));

    auto one = [&](int i) {
        RunRecord& rec = records[static_cast<size_t>(i)];
        rec.seed = args.seed + static_cast<std::uint64_t>(i);
        if (fixed) {
            rec.initial = *fixed;
        } else {
            std::mt19937_64 rng(rec.seed);
            rec.initial = random_initial(args.n, args.k, rng);
        }
        int n = rec.initial.n();
        int k = rec.initial.k();
        RunLimits limits;
        limits.fairness_bound = args.fairness > 0 ? args.fairness : 3 * k;
        limits.round_limit = args.round_limit > 0 ? args.round_limit : 10L * n * n;
        limits.validate_initial = false;  // already validated or deliberately skipped
        limits.record_trace = !args.trace_path.empty();
        auto sched = make_scheduler(args.scheduler, limits.fairness_bound, rec.seed);
        rec.result = run(rec.initial, *sched, limits);
    };
    int jobs = args.jobs > 0 ? args.jobs : default_jobs(args.runs);
    parallel_for(args.runs, jobs, one);

    int gathered = 0;
    long worst_rounds = 0;
    for (const RunRecord& rec : records) {
        if (rec.result.outcome == Outcome::Gathered) {
            ++gathered;
            worst_rounds = std::max(worst_rounds, rec.result.rounds);
        }
        std::cout << "seed=" << rec.seed << " outcome=" << outcome_name(rec.result.outcome)
                  << " rounds=" << rec.result.rounds << " steps=" << rec.result.steps
                  << " initial=" << rec.initial.text();
        if (rec.result.violation)
            std::cout << " violation=" << rec.result.violation->property << " ("
                      << rec.result.violation->message << ")";
        std::cout << "\n";
    }
    std::cout << "gathered " << gathered << "/" << args.runs;
    if (gathered)
        std::cout << ", worst rounds " << worst_rounds;
    std::cout << "\n";

    if (!args.trace_path.empty()) {
        std::ostringstream os;
        for (const TraceEvent& ev : records[0].result.trace)
            os << format_trace_event(ev) << "\n";
        os << "outcome=" << outcome_name(records[0].result.outcome)
           << " rounds=" << records[0].result.rounds << " steps=" << records[0].result.steps
           << "\n";
        write_file_atomic(args.trace_path, os.str());
    }

    if (!args.report_path.empty()) {
        json runs_j = json::array();
        for (const RunRecord& rec : records) {
            json r{{"seed", rec.seed},
                   {"initial", rec.initial.text()},
                   {"outcome", outcome_name(rec.result.outcome)},
                   {"rounds", rec.result.rounds},
                   {"steps", rec.result.steps}};
            if (rec.result.violation)
                r["violation"] = violation_json(*rec.result.violation);
            runs_j.push_back(std::move(r));
        }
        json rep{{"command", "simulate"},
                 {"scheduler", args.scheduler},
                 {"runs", args.runs},
                 {"results", std::move(runs_j)}};
        write_file_atomic(args.report_path, rep.dump(2) + "\n");
    }

    return gathered == args.runs ? 0 : 2;
}

struct CheckArgs {
    std::string initial_text;
    int n = 0;
    int k = 0;
    long round_limit = 0;
    std::uint64_t state_budget = 0;
    bool no_canonical = false;
    bool patterns = false;
    int jobs = 0;
    std::string report_path;
    bool allow_invalid = false;
};

void print_check_report(const CheckReport& rep) {
    std::cout << "verdict=" << verdict_name(rep.verdict) << " initials=" << rep.initials
              << " states=" << rep.states << " transitions=" << rep.transitions;
    if (rep.max_rounds >= 0)
        std::cout << " max_rounds=" << rep.max_rounds;
    std::cout << "\n";
    if (!rep.note.empty())
        std::cout << "note: " << rep.note << "\n";
    if (rep.violation) {
        const CheckViolation& v = *rep.violation;
        std::cout << "violation: " << v.property << " (" << v.message << ")\n"
                  << "  initial: " << v.initial.text() << "\n"
                  << "  depth: " << v.depth << "\n";
        if (!v.transcript.empty()) {
            std::cout << "  repro:";
            for (const SchedulerAction& a : v.transcript) {
                std::cout << " " << (a.kind == ActionKind::LookCompute ? "look" : "move") << ":"
                          << a.robot;
                if (a.kind == ActionKind::LookCompute && a.choice_resolution)
                    std::cout << "/ccw";
            }
            std::cout << "\n";
        }
        if (!v.transcript_note.empty())
            std::cout << "  transcript: " << v.transcript_note << "\n";
    }
    if (!rep.patterns.empty()) {
        std::cout << "patterns:";
        for (const std::string& p : rep.patterns)
            std::cout << " " << p;
        std::cout << "\n";
    }
}

json check_report_json(const CheckReport& rep) {
    json j{{"verdict", verdict_name(rep.verdict)},
           {"initials", rep.initials},
           {"states", rep.states},
           {"transitions", rep.transitions},
           {"max_rounds", rep.max_rounds}};
    if (!rep.note.empty())
        j["note"] = rep.note;
    if (rep.violation) {
        const CheckViolation& v = *rep.violation;
        json vj{{"property", v.property},
                {"message", v.message},
                {"initial", v.initial.text()},
                {"depth", v.depth},
                {"transcript", transcript_json(v.transcript)}};
        if (!v.transcript_note.empty())
            vj["transcript_note"] = v.transcript_note;
        j["violation"] = std::move(vj);
    }
    if (!rep.patterns.empty())
        j["patterns"] = rep.patterns;
    return j;
}

int cmd_check(const CheckArgs& args) {
    CheckOptions opts;
    opts.round_limit = args.round_limit;
    opts.state_budget = args.state_budget;
    opts.canonicalize = !args.no_canonical;
    opts.collect_patterns = args.patterns;

    CheckReport rep;
    if (!args.initial_text.empty()) {
        Configuration c = Configuration::parse(args.initial_text);
        if (!args.allow_invalid)
            validate_initial_config(c);
        rep = check_instance(c, opts);
    } else if (args.n > 0 && args.k > 0) {
        // Same semantics as the library's all-initials check, fanned out
        // across threads; reporting keeps enumeration order.
        std::vector<Configuration> initials = enumerate_initials(args.n, args.k);
        std::vector<CheckReport> parts(initials.size());
        auto one = [&](int i) {
            parts[static_cast<size_t>(i)] =
                check_instance(initials[static_cast<size_t>(i)], opts);
        };
        int count = static_cast<int>(initials.size());
        int jobs = args.jobs > 0 ? args.jobs : default_jobs(count);
        parallel_for(count, jobs, one);

        rep.verdict = Verdict::Verified;
        std::set<std::string> pats;
        for (CheckReport& part : parts) {
            ++rep.initials;
            rep.states += part.states;
            rep.transitions += part.transitions;
            rep.max_rounds = std::max(rep.max_rounds, part.max_rounds);
            pats.insert(part.patterns.begin(), part.patterns.end());
            if (part.verdict == Verdict::Falsified && rep.verdict != Verdict::Falsified) {
                rep.verdict = Verdict::Falsified;
                rep.violation = std::move(part.violation);
                rep.note = part.note;
            } else if (part.verdict == Verdict::Inconclusive && rep.verdict == Verdict::Verified) {
                rep.verdict = Verdict::Inconclusive;
                rep.note = part.note;
            }
        }
        rep.patterns.assign(pats.begin(), pats.end());
    } else {
        std::cerr << "check: give --initial or both --n and --k\n";
        return 1;
    }

    print_check_report(rep);
    if (!args.report_path.empty()) {
        json j = check_report_json(rep);
        j["command"] = "check";
        write_file_atomic(args.report_path, j.dump(2) + "\n");
    }
    switch (rep.verdict) {
    case Verdict::Verified:
        return 0;
    case Verdict::Falsified:
        return 2;
    case Verdict::Inconclusive:
        return 1;
    }
    return 1;
}

int cmd_lemmas(int max_k, const std::string& report_path) {
    LemmaReport rep = lemma_suite(max_k);
    for (const LemmaHop& h : rep.hops) {
        std::cout << (h.ok ? "ok  " : "FAIL") << " hop " << h.seed << " n=" << h.n
                  << " k=" << h.k << " rounds=" << h.worst_rounds << " reached=";
        bool first = true;
        for (const std::string& r : h.reached) {
            std::cout << (first ? "" : ",") << r;
            first = false;
        }
        if (!h.note.empty())
            std::cout << " note=" << h.note;
        std::cout << "\n";
    }
    for (const LemmaChain& ch : rep.chains)
        std::cout << (ch.ok ? "ok  " : "FAIL") << " chain k=" << ch.k << " n=" << ch.n
                  << " rounds=" << ch.worst_rounds << "\n";
    std::cout << "hop bound " << rep.hop_round_bound << ", chain coefficient "
              << rep.chain_round_coefficient << ", " << (rep.all_ok ? "all ok" : "FAILURES")
              << "\n";

    if (!report_path.empty()) {
        json hops = json::array();
        for (const LemmaHop& h : rep.hops)
            hops.push_back(json{{"seed", h.seed},
                                {"n", h.n},
                                {"k", h.k},
                                {"towered", h.towered},
                                {"expected", h.expected},
                                {"reached", std::vector<std::string>(h.reached.begin(),
                                                                     h.reached.end())},
                                {"worst_rounds", h.worst_rounds},
                                {"ok", h.ok},
                                {"note", h.note}});
        json chains = json::array();
        for (const LemmaChain& ch : rep.chains)
            chains.push_back(json{{"n", ch.n},
                                  {"k", ch.k},
                                  {"worst_rounds", ch.worst_rounds},
                                  {"ok", ch.ok}});
        json j{{"command", "lemmas"},
               {"hop_round_bound", rep.hop_round_bound},
               {"chain_round_coefficient", rep.chain_round_coefficient},
               {"all_ok", rep.all_ok},
               {"hops", std::move(hops)},
               {"chains", std::move(chains)}};
        write_file_atomic(report_path, j.dump(2) + "\n");
    }
    return rep.all_ok ? 0 : 2;
}

int cmd_enumerate(int n, int k, bool list, const std::string& report_path) {
    std::vector<Configuration> initials = enumerate_initials(n, k);
    std::cout << "initials: " << initials.size() << "\n";
    if (list)
        for (const Configuration& c : initials)
            std::cout << c.text() << "\n";
    if (!report_path.empty()) {
        json arr = json::array();
        for (const Configuration& c : initials)
            arr.push_back(c.text());
        json j{{"command", "enumerate"},
               {"n", n},
               {"k", k},
               {"count", initials.size()},
               {"initials", std::move(arr)}};
        write_file_atomic(report_path, j.dump(2) + "\n");
    }
    return 0;
}

struct StatsArgs {
    int k = 5;
    std::vector<int> n_values{12, 24, 48};
    int runs = 50;
    std::string scheduler = "random_fair";
    int fairness = 0;
    std::uint64_t seed = 0;
    long round_limit = 0;
    int jobs = 0;
    std::string report_path;
};

int cmd_stats(const StatsArgs& args) {
    struct Cell {
        long rounds = 0;
        Outcome outcome = Outcome::Gathered;
    };

    json per_n = json::array();
    std::vector<double> xs, ys;
    bool trouble = false;

    for (size_t ni = 0; ni < args.n_values.size(); ++ni) {
        int n = args.n_values[ni];
        std::vector<Cell> cells(static_cast<size_t>(args.runs));
        auto one = [&](int i) {
            std::uint64_t run_seed =
                args.seed + static_cast<std::uint64_t>(i) +
                static_cast<std::uint64_t>(n) * 1000003ull;
            std::mt19937_64 rng(run_seed);
            Configuration initial = random_initial(n, args.k, rng);
            RunLimits limits;
            limits.fairness_bound = args.fairness > 0 ? args.fairness : 3 * args.k;
            limits.round_limit = args.round_limit > 0 ? args.round_limit : 10L * n * n;
            limits.validate_initial = false;
            auto sched = make_scheduler(args.scheduler, limits.fairness_bound, run_seed);
            RunResult res = run(initial, *sched, limits);
            cells[static_cast<size_t>(i)] = Cell{res.rounds, res.outcome};
        };
        int jobs = args.jobs > 0 ? args.jobs : default_jobs(args.runs);
        parallel_for(args.runs, jobs, one);

        long total = 0, worst = 0;
        int ok = 0;
        for (const Cell& c : cells) {
            if (c.outcome == Outcome::Gathered) {
                ++ok;
                total += c.rounds;
                worst = std::max(worst, c.rounds);
            } else {
                trouble = true;
            }
        }
        double mean = ok ? static_cast<double>(total) / ok : 0.0;
        std::cout << "n=" << n << " k=" << args.k << " gathered=" << ok << "/" << args.runs
                  << " mean_rounds=" << mean << " worst_rounds=" << worst << "\n";
        per_n.push_back(json{{"n", n},
                             {"gathered", ok},
                             {"runs", args.runs},
                             {"mean_rounds", mean},
                             {"worst_rounds", worst}});
        if (ok && mean > 0) {
            xs.push_back(std::log(static_cast<double>(n)));
            ys.push_back(std::log(mean));
        }
    }

    double slope = 0;
    if (xs.size() >= 2) {
        double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
        double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
        double num = 0, den = 0;
        for (size_t i = 0; i < xs.size(); ++i) {
            num += (xs[i] - mx) * (ys[i] - my);
            den += (xs[i] - mx) * (xs[i] - mx);
        }
        slope = den > 0 ? num / den : 0;
    }
    std::cout << "round growth exponent (log-log slope): " << slope << "\n";

    if (!args.report_path.empty()) {
        json j{{"command", "stats"},
               {"k", args.k},
               {"scheduler", args.scheduler},
               {"runs_per_n", args.runs},
               {"per_n", std::move(per_n)},
               {"exponent", slope}};
        write_file_atomic(args.report_path, j.dump(2) + "\n");
    }
    return trouble ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asynchronous ring gathering: simulator, exhaustive checker, stats"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Run the protocol under a scheduler");
    simulate->add_option("--initial", sim.initial_text, "Initial configuration, e.g. n=10;occ=1,0,1,...");
    simulate->add_option("--n", sim.n, "Ring size for sampled initials");
    simulate->add_option("--k", sim.k, "Robot count for sampled initials");
    simulate->add_option("--scheduler", sim.scheduler, "Scheduling policy")
        ->check(CLI::IsMember(scheduler_names()));
    simulate->add_option("--fairness", sim.fairness, "Fairness bound F (default 3k)");
    simulate->add_option("--seed", sim.seed, "Base seed; run i uses seed+i");
    simulate->add_option("--round-limit", sim.round_limit, "Round cap (default 10n^2)");
    simulate->add_option("--runs", sim.runs, "Number of runs")->check(CLI::PositiveNumber);
    simulate->add_option("--jobs", sim.jobs, "Worker threads (default: cores)");
    simulate->add_option("--trace", sim.trace_path, "Write the step trace here (single run)");
    simulate->add_option("--report", sim.report_path, "Write a JSON report here");
    simulate->add_flag("--allow-invalid-initial", sim.allow_invalid,
                       "Skip initial validation, letting the monitors judge it");

    CheckArgs chk;
    CLI::App* check = app.add_subcommand("check", "Exhaustively check all schedules");
    check->add_option("--initial", chk.initial_text, "Single initial configuration");
    check->add_option("--n", chk.n, "Ring size for the all-initials sweep");
    check->add_option("--k", chk.k, "Robot count for the all-initials sweep");
    check->add_option("--round-limit", chk.round_limit, "Round bound (default 10n^2)");
    check->add_option("--state-budget", chk.state_budget, "Explored-state cap, 0 = unlimited");
    check->add_flag("--no-canonical", chk.no_canonical,
                    "Skip rotation/reflection folding (cross-check mode)");
    check->add_flag("--patterns", chk.patterns, "Collect every class label seen");
    check->add_option("--jobs", chk.jobs, "Worker threads (default: cores)");
    check->add_option("--report", chk.report_path, "Write a JSON report here");
    check->add_flag("--allow-invalid-initial", chk.allow_invalid,
                    "Skip initial validation, letting the monitors judge it");

    int lemmas_max_k = 9;
    std::string lemmas_report;
    CLI::App* lemmas = app.add_subcommand("lemmas", "Class absorption and descent measurements");
    lemmas->add_option("--max-k", lemmas_max_k, "Largest robot count (odd, capped at 9)");
    lemmas->add_option("--report", lemmas_report, "Write a JSON report here");

    int enum_n = 0, enum_k = 0;
    bool enum_list = false;
    std::string enum_report;
    CLI::App* enumerate = app.add_subcommand("enumerate", "Count distinct initial configurations");
    enumerate->add_option("--n", enum_n, "Ring size")->required();
    enumerate->add_option("--k", enum_k, "Robot count")->required();
    enumerate->add_flag("--list", enum_list, "Print every representative");
    enumerate->add_option("--report", enum_report, "Write a JSON report here");

    StatsArgs stats;
    CLI::App* stats_cmd = app.add_subcommand("stats", "Round growth across ring sizes");
    stats_cmd->add_option("--k", stats.k, "Robot count");
    stats_cmd->add_option("--n", stats.n_values, "Ring sizes to sample");
    stats_cmd->add_option("--runs", stats.runs, "Runs per ring size")->check(CLI::PositiveNumber);
    stats_cmd->add_option("--scheduler", stats.scheduler, "Scheduling policy")
        ->check(CLI::IsMember(scheduler_names()));
    stats_cmd->add_option("--fairness", stats.fairness, "Fairness bound F (default 3k)");
    stats_cmd->add_option("--seed", stats.seed, "Base seed");
    stats_cmd->add_option("--round-limit", stats.round_limit, "Round cap (default 10n^2)");
    stats_cmd->add_option("--jobs", stats.jobs, "Worker threads (default: cores)");
    stats_cmd->add_option("--report", stats.report_path, "Write a JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Collapse the parser's assorted exit codes onto the documented
        // contract: 0 for --help, 1 for anything wrong with the invocation.
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (simulate->parsed())
            return cmd_simulate(sim);
        if (check->parsed())
            return cmd_check(chk);
        if (lemmas->parsed())
            return cmd_lemmas(lemmas_max_k, lemmas_report);
        if (enumerate->parsed())
            return cmd_enumerate(enum_n, enum_k, enum_list, enum_report);
        if (stats_cmd->parsed())
            return cmd_stats(stats);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
