// wsp: generate, solve, encode, verify and benchmark workflow instances.

#include <unistd.h>

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "wsp/bench.hpp"
#include "wsp/gen.hpp"
#include "wsp/instance_io.hpp"
#include "wsp/oracle.hpp"
#include "wsp/pattern.hpp"
#include "wsp/pb.hpp"
#include "wsp/random.hpp"
#include "wsp/solver.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitSat = 10;
constexpr int kExitUnsat = 20;
constexpr int kExitBudget = 30;
constexpr int kExitError = 1;
constexpr int kExitInvalid = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool use_color() {
    const char* env = std::getenv("WSP_COLOR");
    if (env != nullptr && std::string(env) == "0") return false;
    return isatty(STDOUT_FILENO) != 0;
}

std::string paint(const std::string& text, const char* code) {
    static const bool color = use_color();
    return color ? std::string("\x1b[") + code + "m" + text + "\x1b[0m" : text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text) || !out.flush()) throw std::runtime_error("cannot write " + path.string());
}

wsp::WorkflowInstance load_instance(const std::string& path) {
    try {
        return wsp::parse_instance(read_file(path));
    } catch (const wsp::ParseError& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

std::string plan_list(const wsp::Plan& plan) {
    std::string out = wsp::format_plan(plan);
    for (char& c : out) {
        if (c == ' ') c = ',';
    }
    return out;
}

void print_diagnostics(const wsp::WorkflowInstance& inst, const wsp::PlanDiagnostics& d) {
    for (wsp::StepId s : d.unassigned) std::cout << "unassigned " << wsp::step_name(s) << '\n';
    for (auto [u, s] : d.unauthorized) {
        std::cout << "unauthorized (" << wsp::user_name(u) << ',' << wsp::step_name(s) << ")\n";
    }
    for (std::size_t i : d.violated) std::cout << "violated " << wsp::describe(inst.constraints()[i]) << '\n';
}

// ============================================================================
// generate
// ============================================================================

struct GenerateArgs {
    wsp::gen::GenParams params;
    std::optional<std::uint64_t> seed;
    std::string grid;
    std::string out;
};

int cmd_generate(CLI::App& cmd, const GenerateArgs& a) {
    if (!a.seed) throw UsageError("--seed is required");
    if (!a.grid.empty()) {
        for (const char* flag : {"--steps", "--users", "--density", "--counting-b"}) {
            if (cmd.count(flag) > 0) throw UsageError(std::string(flag) + " cannot be combined with --grid");
        }
        wsp::gen::Grid grid = wsp::gen::parse_grid(a.grid);
        if (cmd.count("--r") > 0) grid.r = a.params.r;
        if (cmd.count("--scope-t") > 0) grid.t = a.params.t;
        const fs::path dir = a.out.empty() ? fs::path(".") : fs::path(a.out);
        fs::create_directories(dir);
        std::vector<wsp::gen::ManifestRow> manifest;
        for (const auto& entry : wsp::gen::generate_suite(grid, *a.seed)) {
            const fs::path file = entry.label + ".wsp";
            write_file(dir / file, wsp::serialize_instance(wsp::gen::generate(entry.params)));
            manifest.push_back({entry.label, entry.params, file.string()});
        }
        write_file(dir / "manifest.csv", wsp::gen::format_manifest(manifest));
        std::cout << manifest.size() << " instances written to " << dir.string() << '\n';
        return 0;
    }
    wsp::gen::GenParams p = a.params;
    p.seed = *a.seed;
    const std::string text = wsp::serialize_instance(wsp::gen::generate(p));
    if (a.out.empty() || a.out == "-") {
        std::cout << text;
    } else {
        write_file(a.out, text);
    }
    return 0;
}

// ============================================================================
// solve
// ============================================================================

struct Toggles {
    bool no_useless = false;
    bool no_pairs = false;
    bool no_dynamic = false;
    std::optional<double> time_limit;
    std::optional<std::uint64_t> node_limit;
    std::optional<std::uint64_t> order_seed;

    wsp::SolverConfig config() const {
        wsp::SolverConfig cfg;
        cfg.enable_useless_pruning = !no_useless;
        cfg.enable_pair_propagation = !no_pairs;
        cfg.enable_dynamic_order = !no_dynamic;
        cfg.time_limit_seconds = time_limit;
        cfg.node_limit = node_limit;
        cfg.user_order_seed = order_seed;
        return cfg;
    }
};

void add_toggles(CLI::App* cmd, Toggles& t) {
    cmd->add_flag("--no-useless", t.no_useless, "Disable useless-user pruning");
    cmd->add_flag("--no-pairs", t.no_pairs, "Disable pair propagation");
    cmd->add_flag("--no-dynamic", t.no_dynamic, "Disable dynamic user ordering");
    cmd->add_option("--time-limit", t.time_limit, "Seconds per solve")->check(CLI::PositiveNumber);
    cmd->add_option("--node-limit", t.node_limit, "Candidate extensions per solve");
}

struct SolveArgs {
    std::string instance;
    bool proof_check = false;
    Toggles toggles;
};

int cmd_solve(const SolveArgs& a) {
    const wsp::WorkflowInstance inst = load_instance(a.instance);
    const wsp::SolveReport r = wsp::solve(inst, a.toggles.config());

    auto stats = [&](const std::string& users) {
        std::printf("time: %.3f s\n", r.elapsed_seconds);
        std::cout << "users: " << users << '\n';
        std::cout << "patterns: " << r.patterns_generated << '\n';
    };
    switch (r.outcome) {
        case wsp::Outcome::satisfiable: {
            std::cout << "outcome: " << paint("sat", "32") << '\n';
            stats(std::to_string(r.users_processed));
            std::cout << "pattern: " << wsp::encode(*r.witness).to_string() << '\n';
            std::cout << "witness: " << plan_list(*r.witness) << '\n';
            if (a.proof_check) {
                if (!wsp::is_valid_complete(inst, *r.witness)) {
                    std::cout << "proof-check: " << paint("FAILED", "31") << '\n';
                    print_diagnostics(inst, wsp::diagnose(inst, *r.witness));
                    return kExitError;
                }
                std::cout << "proof-check: ok\n";
            }
            return kExitSat;
        }
        case wsp::Outcome::unsatisfiable:
            std::cout << "outcome: " << paint("unsat", "31") << '\n';
            stats(wsp::bench::unsat_triple(r.n_users, r.n_w, r.n_useless));
            return kExitUnsat;
        case wsp::Outcome::budget_exceeded:
            std::cout << "outcome: " << paint("budget_exceeded", "33") << '\n';
            stats(std::to_string(r.users_processed));
            return kExitBudget;
    }
    return kExitError;
}

// ============================================================================
// encode
// ============================================================================

struct EncodeArgs {
    std::string instance;
    std::string out;
    bool check = false;
    int micro = 50;
    std::uint64_t seed = 1;
};

// brute_pb and brute_solve must agree; witnesses and decoded assignments must check out.
bool cross_check(const wsp::WorkflowInstance& inst, std::string& why) {
    const wsp::pb::Model model = wsp::pb::encode(inst);
    const auto wsp_result = wsp::oracle::brute_solve(inst);
    const auto pb_result = wsp::oracle::brute_pb(model);
    if (wsp_result.satisfiable != pb_result.satisfiable) {
        why = std::string("brute_solve says ") + (wsp_result.satisfiable ? "sat" : "unsat") + ", brute_pb says " +
              (pb_result.satisfiable ? "sat" : "unsat");
        return false;
    }
    if (pb_result.assignment) {
        const wsp::Plan plan = wsp::pb::decode_solution(model, *pb_result.assignment);
        if (!wsp::is_valid_complete(inst, plan)) {
            why = "decoded plan " + wsp::format_plan(plan) + " is not valid";
            return false;
        }
    }
    for (const auto& w : wsp_result.witnesses) {
        if (!wsp::pb::satisfies(model, wsp::pb::plan_to_assignment(model, w))) {
            why = "witness " + wsp::format_plan(w) + " does not satisfy the model";
            return false;
        }
    }
    return true;
}

int cmd_encode(CLI::App& cmd, const EncodeArgs& a) {
    if (a.check && a.instance.empty()) {
        wsp::gen::SmallParams params;
        params.allow_equals = false;
        params.max_steps = 4;
        params.max_users = 4;
        params.max_pb_variables = wsp::oracle::kMaxPbVariables;
        int agree = 0;
        for (int i = 0; i < a.micro; ++i) {
            const auto inst = wsp::gen::generate_small(params, wsp::splitmix64(a.seed + static_cast<std::uint64_t>(i)));
            std::string why;
            if (cross_check(inst, why)) {
                ++agree;
            } else {
                std::cout << "instance " << i << ": " << why << '\n';
            }
        }
        std::cout << "oracle agreement: " << agree << '/' << a.micro << '\n';
        return agree == a.micro ? 0 : kExitError;
    }
    if (a.instance.empty()) throw UsageError("an instance file is required");
    if (cmd.count("--micro") > 0) throw UsageError("--micro needs --check-against-oracle without an instance");

    const wsp::WorkflowInstance inst = load_instance(a.instance);
    const wsp::pb::Model model = wsp::pb::encode(inst);
    for (const auto& w : model.warnings) std::cerr << "warning: " << w << '\n';
    const auto files = wsp::pb::emit_opb(model);
    const fs::path base = a.out.empty() ? fs::path(a.instance).replace_extension() : fs::path(a.out);
    fs::path opb = base, map = base;
    opb += ".opb";
    map += ".map";
    write_file(opb, files.opb);
    write_file(map, files.map);
    std::cout << model.variables.size() << " variables, " << model.rows.size() << " rows: " << opb.string() << ", "
              << map.string() << '\n';
    if (a.check) {
        std::string why;
        if (!cross_check(inst, why)) {
            std::cout << "oracle disagreement: " << why << '\n';
            return kExitError;
        }
        std::cout << "oracle agreement: 1/1\n";
    }
    return 0;
}

// ============================================================================
// verify
// ============================================================================

struct VerifyArgs {
    std::string instance;
    std::string plan;
    std::string map;
    std::string assignment;
    bool oracle = false;
};

int cmd_verify(const VerifyArgs& a) {
    const wsp::WorkflowInstance inst = load_instance(a.instance);
    wsp::Plan plan;
    if (!a.plan.empty()) {
        if (!a.map.empty() || !a.assignment.empty()) throw UsageError("give either --plan or --map with --assignment");
        try {
            plan = wsp::parse_plan(read_file(a.plan), inst);
        } catch (const wsp::ParseError& e) {
            throw std::runtime_error(a.plan + ": " + e.what());
        }
    } else if (!a.map.empty() && !a.assignment.empty()) {
        // The map fixes variable meanings; rows come from encoding the instance.
        const wsp::pb::Model model = wsp::pb::encode(inst);
        const wsp::pb::Model mapped = wsp::pb::parse_opb(wsp::pb::emit_opb(model).opb, read_file(a.map));
        if (!(mapped == model)) throw std::runtime_error(a.map + " does not belong to " + a.instance);
        const wsp::pb::Assignment values = wsp::pb::parse_assignment(read_file(a.assignment), model);
        if (!wsp::pb::satisfies(model, values)) std::cout << "assignment violates some PB row\n";
        try {
            plan = wsp::pb::decode_solution(model, values);
        } catch (const wsp::pb::MalformedAssignment& e) {
            std::cout << "invalid: " << e.what() << '\n';
            return kExitInvalid;
        }
        std::cout << "decoded: " << plan_list(plan) << '\n';
    } else {
        throw UsageError("give --plan, or --map with --assignment");
    }

    const wsp::PlanDiagnostics d = wsp::diagnose(inst, plan);
    if (a.oracle) {
        const auto result = wsp::oracle::brute_solve(inst);
        std::cout << "oracle: " << (result.satisfiable ? "sat" : "unsat") << ", " << result.witnesses.size()
                  << " valid complete plans\n";
    }
    if (d.ok()) {
        std::cout << paint("valid", "32") << '\n';
        return 0;
    }
    std::cout << paint("invalid", "31") << '\n';
    print_diagnostics(inst, d);
    return kExitInvalid;
}

// ============================================================================
// bench
// ============================================================================

struct BenchArgs {
    std::string grid;
    std::optional<std::uint64_t> seed;
    std::string manifest;
    std::string out;
    int parallel = 1;
    Toggles toggles;
};

int cmd_bench(const BenchArgs& a) {
    std::vector<wsp::bench::Entry> entries;
    if (!a.grid.empty() == !a.manifest.empty()) throw UsageError("give exactly one of --grid and --manifest");
    if (!a.grid.empty()) {
        if (!a.seed) throw UsageError("--seed is required with --grid");
        for (const auto& e : wsp::gen::generate_suite(wsp::gen::parse_grid(a.grid), *a.seed)) {
            entries.push_back({e.label, e.params.k, wsp::gen::generate(e.params), {}});
        }
    } else {
        const fs::path dir = fs::path(a.manifest).parent_path();
        for (const auto& row : wsp::gen::parse_manifest(read_file(a.manifest))) {
            const fs::path path = fs::path(row.path).is_absolute() ? fs::path(row.path) : dir / row.path;
            entries.push_back({row.label, row.params.k, std::nullopt, path.string()});
        }
    }
    wsp::bench::Options options;
    options.config = a.toggles.config();
    options.parallel = a.parallel;
    const auto rows = wsp::bench::run(entries, options);
    const std::string text = wsp::bench::format_csv(rows) + wsp::bench::format_summary(wsp::bench::summarize(rows));
    if (a.out.empty() || a.out == "-") {
        std::cout << text;
    } else {
        write_file(a.out, text);
    }
    for (const auto& r : rows) {
        if (r.output == "error") std::cerr << r.label << ": " << r.error << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Workflow satisfiability with counting constraints"};
    app.require_subcommand(1);

    GenerateArgs gen_args;
    auto* gen = app.add_subcommand("generate", "Generate a random instance or a grid of instances");
    gen->add_option("--steps", gen_args.params.k, "Number of steps k")->check(CLI::Range(1, 64));
    gen->add_option("--users", gen_args.params.n, "Number of users n")->check(CLI::NonNegativeNumber);
    gen->add_option("--density", gen_args.params.d, "Not-equals density in percent")->check(CLI::Range(0, 100));
    gen->add_option("--counting-b", gen_args.params.b, "At-most and at-least constraints, b of each")
        ->check(CLI::NonNegativeNumber);
    gen->add_option("--r", gen_args.params.r, "Counting threshold")->capture_default_str();
    gen->add_option("--scope-t", gen_args.params.t, "Counting scope size")->capture_default_str();
    gen->add_option("--seed", gen_args.seed, "Random seed (required)");
    gen->add_option("--grid", gen_args.grid, "Suite, e.g. k=15:d=10,20,30:b=2..32..2");
    gen->add_option("--out", gen_args.out, "Output file, or directory with --grid");

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "Decide an instance with the pattern-based search");
    solve->add_option("instance", solve_args.instance, "Instance file")->required();
    solve->add_flag("--proof-check", solve_args.proof_check, "Re-verify the witness");
    solve->add_option("--seed", solve_args.toggles.order_seed, "Shuffle the initial user order");
    add_toggles(solve, solve_args.toggles);

    EncodeArgs encode_args;
    auto* encode = app.add_subcommand("encode", "Write the pseudo-Boolean model as .opb and .map");
    encode->add_option("instance", encode_args.instance, "Instance file");
    encode->add_option("--out", encode_args.out, "Output path without extension");
    encode->add_flag("--check-against-oracle", encode_args.check,
                     "Compare exhaustive PB and WSP search (on seeded micro instances if no instance is given)");
    encode->add_option("--micro", encode_args.micro, "Micro instances to check")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    encode->add_option("--seed", encode_args.seed, "Seed for micro instances")->capture_default_str();

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "Check a plan, or a PB assignment, against an instance");
    verify->add_option("instance", verify_args.instance, "Instance file")->required();
    verify->add_option("--plan", verify_args.plan, "Plan file (s1=u2 s2=u2 ...)");
    verify->add_option("--map", verify_args.map, "Variable map from encode");
    verify->add_option("--assignment", verify_args.assignment, "Solver assignment line (x1 -x2 ...)");
    verify->add_flag("--oracle", verify_args.oracle, "Also count valid complete plans exhaustively");

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "Solve a grid or manifest and report CSV");
    bench->add_option("--grid", bench_args.grid, "Suite, e.g. k=15:d=10,20,30:b=2..32..2");
    bench->add_option("--seed", bench_args.seed, "Suite seed for --grid");
    bench->add_option("--manifest", bench_args.manifest, "Manifest written by generate --grid");
    bench->add_option("--out", bench_args.out, "CSV output file");
    bench->add_option("--parallel", bench_args.parallel, "Worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_toggles(bench, bench_args.toggles);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitError;
    }

    try {
        if (*gen) return cmd_generate(*gen, gen_args);
        if (*solve) return cmd_solve(solve_args);
        if (*encode) return cmd_encode(*encode, encode_args);
        if (*verify) return cmd_verify(verify_args);
        if (*bench) return cmd_bench(bench_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return kExitError;
}
