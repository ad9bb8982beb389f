// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. `--only 1,2,5` restricts the run.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "wsp/bench.hpp"
#include "wsp/gen.hpp"
#include "wsp/oracle.hpp"
#include "wsp/pattern.hpp"
#include "wsp/pb.hpp"
#include "wsp/random.hpp"
#include "wsp/solver.hpp"

using namespace wsp;
using wsp::testing::plan_of;

namespace {

// Pinned limits.
constexpr double kQuickLimitSeconds = 1.0;
constexpr double kOracleLimitSeconds = 120.0;
constexpr double kPatternLimitSeconds = 60.0;
constexpr int kFptSeeds = 500;
constexpr int kPbSeeds = 200;
constexpr int kPatternPairs = 10000;
constexpr int kMaxBellSteps = 6;
constexpr double kK15InstanceLimit = 60.0;
constexpr double kK15MeanLimit = 10.0;
constexpr double kK20InstanceLimit = 600.0;
constexpr std::uint64_t kSuiteSeed = 7;
constexpr const char* kK15Grid = "k=15:d=10,20,30:b=2..32..2";
constexpr const char* kK20Grid = "k=20:d=10,20,30:b=10..38..2";
constexpr int kLowBMax = 18;   // low-b third: b = 10..18
constexpr int kHighBMin = 30;  // high-b third: b = 30..38

struct Verdict {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail.clear();
        if (!detail.empty()) detail += "; ";
        detail += why;
        pass = false;
    }
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void within(Verdict& v, Clock::time_point t0, double limit) {
    const double spent = since(t0);
    if (spent >= limit) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "took %.2f s, limit %.0f s", spent, limit);
        v.fail(buf);
    }
}

// ----------------------------------------------------------------------------

Verdict worked_example() {
    const auto t0 = Clock::now();
    Verdict v;
    const auto inst = wsp::testing::instance1();
    struct Row {
        const char* name;
        Plan plan;
        bool authorized, eligible, complete;
    };
    const Row rows[] = {
        {"pi1", plan_of({1, 2, 4, 5}), true, false, true},
        {"pi2", plan_of({1, 1, 4, 5}), false, true, true},
        {"pi3", plan_of({1, 0, 4, 5}), true, true, false},
        {"pi4", plan_of({2, 2, 4, 5}), true, true, true},
    };
    for (const auto& r : rows) {
        const bool a = is_authorized(inst, r.plan);
        const bool e = is_eligible(inst, r.plan);
        const bool c = r.plan.is_complete();
        if (a != r.authorized || e != r.eligible || c != r.complete) v.fail(std::string(r.name) + " misclassified");
        if (is_valid_complete(inst, r.plan) != (r.authorized && r.eligible && r.complete)) {
            v.fail(std::string(r.name) + " valid-complete mismatch");
        }
    }
    within(v, t0, kQuickLimitSeconds);
    if (v.pass) v.detail = "4 plans classified";
    return v;
}

Verdict instance1_end_to_end() {
    const auto t0 = Clock::now();
    Verdict v;
    const auto inst = wsp::testing::instance1();
    const SolveReport r = solve(inst);
    if (r.outcome != Outcome::satisfiable || !r.witness) {
        v.fail("solver did not return sat");
    } else if (!diagnose(inst, *r.witness).ok()) {
        v.fail("verifier rejected the witness");
    }
    const auto brute = oracle::brute_solve(inst);
    if (brute.witnesses.size() != 6) v.fail("oracle found " + std::to_string(brute.witnesses.size()) + " plans");
    std::set<std::vector<std::uint8_t>> patterns;
    for (const Plan& w : brute.witnesses) {
        const Pattern p = encode(w);
        patterns.insert({p.values().begin(), p.values().end()});
    }
    if (patterns != std::set<std::vector<std::uint8_t>>{{1, 1, 2, 3}}) v.fail("eligible complete patterns differ");
    within(v, t0, kQuickLimitSeconds);
    if (v.pass) v.detail = "sat, witness verified, 6 plans, pattern 1,1,2,3";
    return v;
}

Verdict fpt_oracle_equivalence() {
    const auto t0 = Clock::now();
    Verdict v;
    gen::SmallParams params;  // k in [2,5], n in [2,8], every constraint kind
    int agree = 0;
    int sat = 0;
    for (int seed = 0; seed < kFptSeeds; ++seed) {
        const auto inst = gen::generate_small(params, static_cast<std::uint64_t>(seed));
        const bool expected = oracle::brute_solve(inst).satisfiable;
        const SolveReport on = solve(inst, SolverConfig{});
        const SolveReport off = solve(inst, SolverConfig::plain());
        const bool ok = (on.outcome == Outcome::satisfiable) == expected &&
                        (off.outcome == Outcome::satisfiable) == expected &&
                        on.outcome != Outcome::budget_exceeded && off.outcome != Outcome::budget_exceeded &&
                        (!on.witness || is_valid_complete(inst, *on.witness)) &&
                        (!off.witness || is_valid_complete(inst, *off.witness));
        agree += ok ? 1 : 0;
        sat += expected ? 1 : 0;
        if (!ok && v.pass) v.fail("disagreement at seed " + std::to_string(seed));
    }
    within(v, t0, kOracleLimitSeconds);
    if (v.pass) {
        v.detail = std::to_string(agree) + "/" + std::to_string(kFptSeeds) + " agree with toggles on and off (" +
                   std::to_string(sat) + " sat)";
    }
    return v;
}

Verdict pb_equivalence() {
    const auto t0 = Clock::now();
    Verdict v;
    gen::SmallParams params;
    params.allow_equals = false;
    params.max_steps = 4;
    params.max_users = 4;
    params.max_pb_variables = oracle::kMaxPbVariables;
    int agree = 0;
    for (int seed = 0; seed < kPbSeeds; ++seed) {
        const auto inst = gen::generate_small(params, static_cast<std::uint64_t>(seed));
        const pb::Model m = pb::encode(inst);
        const auto wsp_result = oracle::brute_solve(inst);
        const auto pb_result = oracle::brute_pb(m, true);
        bool ok = wsp_result.satisfiable == pb_result.satisfiable;
        for (const auto& a : pb_result.all) ok = ok && is_valid_complete(inst, pb::decode_solution(m, a));
        for (const auto& w : wsp_result.witnesses) ok = ok && pb::satisfies(m, pb::plan_to_assignment(m, w));
        agree += ok ? 1 : 0;
        if (!ok && v.pass) v.fail("disagreement at seed " + std::to_string(seed));
    }
    within(v, t0, kOracleLimitSeconds);
    if (v.pass) v.detail = std::to_string(agree) + "/" + std::to_string(kPbSeeds) + " micro instances agree";
    return v;
}

Plan random_plan(Rng& rng, int k, int n) {
    Plan p(k);
    for (int s = 0; s < k; ++s) {
        if (rng.below(4) != 0) p.assign(StepId{s}, UserId{static_cast<int>(rng.below(n))});
    }
    return p;
}

bool equivalent_by_definition(const Plan& a, const Plan& b) {
    if (a.assigned_steps() != b.assigned_steps()) return false;
    for (StepId s : a.assigned_steps()) {
        for (StepId t : a.assigned_steps()) {
            if ((a.user(s) == a.user(t)) != (b.user(s) == b.user(t))) return false;
        }
    }
    return true;
}

Verdict pattern_properties() {
    const auto t0 = Clock::now();
    Verdict v;

    // (a) encoding agrees with the direct equivalence test.
    Rng rng(5001);
    for (int i = 0; i < kPatternPairs; ++i) {
        const int k = static_cast<int>(rng.between(1, 5));
        const Plan a = random_plan(rng, k, 3);
        Plan b = random_plan(rng, k, 3);
        if (rng.below(2) == 0) {
            std::vector<int> perm(3);
            std::iota(perm.begin(), perm.end(), 0);
            rng.shuffle(std::span<int>(perm));
            b = Plan(k);
            for (StepId s : a.assigned_steps()) b.assign(s, UserId{perm[a.user(s)->index]});
        }
        if ((encode(a) == encode(b)) != equivalent_by_definition(a, b)) {
            v.fail("(a) mismatch on pair " + std::to_string(i));
            break;
        }
    }

    // (b) patterns per assigned set of size m number B_m.
    for (int m = 0; m <= kMaxBellSteps; ++m) {
        PatternSet set(kMaxBellSteps);
        std::vector<int> users(m, 0);
        while (true) {
            Plan p(kMaxBellSteps);
            for (int i = 0; i < m; ++i) p.assign(StepId{i}, UserId{users[i]});
            set.insert(encode(p), p);
            int i = m - 1;
            while (i >= 0 && ++users[i] == m) users[i--] = 0;
            if (i < 0) break;
        }
        if (set.size() != oracle::bell_number(m) || set.size() != oracle::enumerate_partitions(m).size()) {
            v.fail("(b) " + std::to_string(set.size()) + " patterns for m=" + std::to_string(m));
        }
    }
    if (oracle::bell_number(3) != 5 || oracle::bell_number(4) != 15 || oracle::bell_number(6) != 203) {
        v.fail("(b) Bell recurrence");
    }

    // (c) invariance under user permutations.
    Rng perm_rng(5003);
    for (int i = 0; i < kPatternPairs; ++i) {
        const int k = static_cast<int>(perm_rng.between(1, 10));
        const int n = static_cast<int>(perm_rng.between(1, 12));
        const Plan p = random_plan(perm_rng, k, n);
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        perm_rng.shuffle(std::span<int>(perm));
        Plan q(k);
        for (StepId s : p.assigned_steps()) q.assign(s, UserId{perm[p.user(s)->index]});
        if (encode(p) != encode(q)) {
            v.fail("(c) mismatch on pair " + std::to_string(i));
            break;
        }
    }
    within(v, t0, kPatternLimitSeconds);
    if (v.pass) v.detail = "10^4 pairs for (a) and (c), B_0..B_6 for (b)";
    return v;
}

// ----------------------------------------------------------------------------
// Benchmarks

std::vector<bench::Row> run_grid(const char* grid, double limit, bool useless_pruning) {
    std::vector<bench::Entry> entries;
    for (auto& e : gen::generate_suite(gen::parse_grid(grid), kSuiteSeed)) {
        entries.push_back({e.label, e.params.k, gen::generate(e.params), ""});
    }
    bench::Options opts;
    opts.config.time_limit_seconds = limit;
    opts.config.enable_useless_pruning = useless_pruning;
    std::vector<bench::Row> rows;
    for (const auto& entry : entries) {
        rows.push_back(bench::run_one(entry, opts.config));
        const auto& r = rows.back();
        std::fprintf(stderr, "  %s %s %.2f s, %llu patterns\n", r.label.c_str(), r.output.c_str(), r.cpu_seconds,
                     static_cast<unsigned long long>(r.patterns));
    }
    return rows;
}

std::string describe_rows(const std::vector<bench::Row>& rows) {
    std::map<std::string, int> count;
    double total = 0.0;
    for (const auto& r : rows) {
        ++count[r.output];
        total += r.cpu_seconds;
    }
    std::ostringstream out;
    out << rows.size() << " instances";
    for (const auto& [o, c] : count) out << ", " << c << " " << o;
    char buf[64];
    std::snprintf(buf, sizeof buf, ", mean %.2f s", rows.empty() ? 0.0 : total / rows.size());
    out << buf;
    return out.str();
}

int undecided(const std::vector<bench::Row>& rows) {
    return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const bench::Row& r) {
        return r.output != "sat" && r.output != "unsat";
    }));
}

struct Benchmarks {
    std::vector<bench::Row> k15;
    std::vector<bench::Row> k20;
    bool have_k15 = false;
    bool have_k20 = false;

    const std::vector<bench::Row>& get_k15() {
        if (!have_k15) {
            std::fprintf(stderr, "running %s\n", kK15Grid);
            k15 = run_grid(kK15Grid, kK15InstanceLimit, true);
            have_k15 = true;
        }
        return k15;
    }
    const std::vector<bench::Row>& get_k20() {
        if (!have_k20) {
            std::fprintf(stderr, "running %s\n", kK20Grid);
            k20 = run_grid(kK20Grid, kK20InstanceLimit, true);
            have_k20 = true;
        }
        return k20;
    }
};

Verdict k15_benchmark(Benchmarks& b) {
    Verdict v;
    const auto& rows = b.get_k15();
    if (rows.size() != 48) v.fail("expected 48 instances, got " + std::to_string(rows.size()));
    if (int u = undecided(rows)) v.fail(std::to_string(u) + " undecided");
    double total = 0.0;
    for (const auto& r : rows) total += r.cpu_seconds;
    const double mean = rows.empty() ? 0.0 : total / rows.size();
    if (mean > kK15MeanLimit) v.fail("mean time above 10 s");
    const std::string summary = describe_rows(rows);
    v.detail = v.pass ? summary : v.detail + " (" + summary + ")";
    return v;
}

int b_of(const std::string& label) { return std::stoi(label.substr(label.find('-') + 1)); }
int d_of(const std::string& label) { return std::stoi(label.substr(label.find('.') + 1)); }

Verdict k20_benchmark(Benchmarks& b) {
    Verdict v;
    const auto& rows = b.get_k20();
    if (rows.size() != 45) v.fail("expected 45 instances, got " + std::to_string(rows.size()));
    if (int u = undecided(rows)) v.fail(std::to_string(u) + " undecided");

    // Mean patterns over unsat rows, low-b third against high-b third, per d.
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_d;
    for (const auto& r : rows) {
        if (r.output != "unsat") continue;
        const int bb = b_of(r.label);
        if (bb <= kLowBMax) by_d[d_of(r.label)].first.push_back(static_cast<double>(r.patterns));
        if (bb >= kHighBMin) by_d[d_of(r.label)].second.push_back(static_cast<double>(r.patterns));
    }
    auto mean = [](const std::vector<double>& xs) { return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size(); };
    int compared = 0;
    std::ostringstream trend;
    for (const auto& [d, sides] : by_d) {
        const auto& [low, high] = sides;
        if (low.empty() || high.empty()) continue;
        ++compared;
        trend << " d=" << d << ": " << static_cast<long long>(mean(low)) << " -> " << static_cast<long long>(mean(high));
        if (!(mean(low) > mean(high))) v.fail("no decline for d=" + std::to_string(d));
    }
    if (compared == 0) v.fail("no d with unsat instances in both thirds");
    const std::string summary = describe_rows(rows) + ";" + trend.str();
    v.detail = v.pass ? summary : v.detail + " (" + summary + ")";
    return v;
}

Verdict unsat_reporting(Benchmarks& b) {
    Verdict v;
    static const std::regex triple(R"(^(\d+): (\d+)→(\d+)$)");
    int checked = 0;
    auto check_rows = [&](const std::vector<bench::Row>& rows) {
        for (const auto& r : rows) {
            if (r.output != "unsat") continue;
            ++checked;
            const std::string t = bench::unsat_triple(r.n_users, r.n_w, r.n_useless);
            std::smatch m;
            if (!std::regex_match(t, m, triple)) {
                v.fail(r.label + " malformed triple " + t);
            } else if (std::stoull(m[2]) + std::stoull(m[3]) > std::stoull(m[1])) {
                v.fail(r.label + " n_w + n_u exceeds n");
            }
        }
    };
    check_rows(b.get_k15());
    if (b.have_k20) check_rows(b.k20);

    std::fprintf(stderr, "running %s with useless-user pruning off\n", kK15Grid);
    const auto plain = run_grid(kK15Grid, kK15InstanceLimit, false);
    const auto& with = b.get_k15();
    int same = 0;
    for (std::size_t i = 0; i < plain.size() && i < with.size(); ++i) {
        if (plain[i].n_useless != 0) v.fail(plain[i].label + " reports useless users with pruning off");
        if (plain[i].output == with[i].output) {
            ++same;
        } else {
            v.fail(plain[i].label + " outcome changed: " + with[i].output + " vs " + plain[i].output);
        }
    }
    if (plain.size() != with.size()) v.fail("row counts differ");
    if (v.pass) {
        v.detail = std::to_string(checked) + " unsat triples well formed, " + std::to_string(same) + "/" +
                   std::to_string(with.size()) + " outcomes unchanged without pruning";
    }
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app("Acceptance checks for the wsp solver");
    std::vector<int> only;
    app.add_option("--only", only, "Run only these criteria")->delimiter(',')->check(CLI::Range(1, 8));
    CLI11_PARSE(app, argc, argv);

    Benchmarks benchmarks;
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"worked example classification", worked_example},
        {"Instance 1 end to end", instance1_end_to_end},
        {"FPT solver agrees with brute force", fpt_oracle_equivalence},
        {"PB reduction agrees with brute force", pb_equivalence},
        {"pattern properties", pattern_properties},
        {"k=15 grid decided, mean <= 10 s", [&] { return k15_benchmark(benchmarks); }},
        {"k=20 grid decided within 600 s each, pattern trend", [&] { return k20_benchmark(benchmarks); }},
        {"unsat triples and --no-useless neutrality", [&] { return unsat_reporting(benchmarks); }},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), number) == only.end()) continue;
        const auto t0 = Clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.fail(std::string("exception: ") + e.what());
        }
        std::printf("%s %d %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", number, criteria[i].first, v.detail.c_str(),
                    since(t0));
        std::fflush(stdout);
        failures += v.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
