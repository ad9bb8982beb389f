#include "wsp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "wsp/instance_io.hpp"

namespace wsp::bench {

std::string unsat_triple(std::uint64_t n, std::uint64_t n_w, std::uint64_t n_useless) {
    return std::to_string(n) + ": " + std::to_string(n_w) + "→" + std::to_string(n_useless);
}

namespace {

WorkflowInstance load(const Entry& entry) {
    if (entry.instance) return *entry.instance;
    std::ifstream in(entry.path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + entry.path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_instance(text.str());
}

}  // namespace

Row run_one(const Entry& entry, const SolverConfig& cfg) {
    Row row;
    row.label = entry.label;
    row.k = entry.k;
    try {
        const WorkflowInstance inst = load(entry);
        row.k = inst.step_count();
        const SolveReport report = solve(inst, cfg);
        row.output = std::string(to_string(report.outcome));
        row.cpu_seconds = report.elapsed_seconds;
        row.users_processed = report.users_processed;
        row.patterns = report.patterns_generated;
        row.n_users = report.n_users;
        row.n_w = report.n_w;
        row.n_useless = report.n_useless;
    } catch (const std::exception& e) {
        row.output = "error";
        row.error = e.what();
    }
    return row;
}

std::vector<Row> run(const std::vector<Entry>& entries, const Options& options) {
    std::vector<Row> rows(entries.size());
    const int workers = std::max(1, std::min<int>(options.parallel, static_cast<int>(entries.size())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < entries.size(); ++i) rows[i] = run_one(entries[i], options.config);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < entries.size();) rows[i] = run_one(entries[i], options.config);
    };
    {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return rows;
}

std::string format_csv(const std::vector<Row>& rows) {
    std::ostringstream out;
    out << "label,output,cpu_seconds,users,patterns,n_w,n_useless\n";
    char seconds[32];
    for (const auto& r : rows) {
        std::snprintf(seconds, sizeof seconds, "%.3f", r.cpu_seconds);
        out << r.label << ',' << r.output << ',';
        if (r.output == "error") {
            out << ",,,,\n";
            continue;
        }
        out << seconds << ',';
        if (r.output == "unsat") {
            out << unsat_triple(r.n_users, r.n_w, r.n_useless) << ',' << r.patterns << ',' << r.n_w << ','
                << r.n_useless << '\n';
        } else {
            out << r.users_processed << ',' << r.patterns << ",,\n";
        }
    }
    return out.str();
}

std::vector<Summary> summarize(const std::vector<Row>& rows) {
    static const char* const kOrder[] = {"sat", "unsat", "budget_exceeded", "error"};
    std::map<int, std::vector<const Row*>> by_k;
    for (const auto& r : rows) by_k[r.k].push_back(&r);

    std::vector<Summary> out;
    auto add = [&](int k, const std::string& label, const std::vector<const Row*>& group) {
        if (group.empty()) return;
        double total = 0.0;
        for (const Row* r : group) total += r->cpu_seconds;
        out.push_back({k, label, static_cast<int>(group.size()), total / static_cast<double>(group.size())});
    };
    for (const auto& [k, group] : by_k) {
        add(k, "all", group);
        for (const char* outcome : kOrder) {
            std::vector<const Row*> subset;
            for (const Row* r : group) {
                if (r->output == outcome) subset.push_back(r);
            }
            add(k, outcome, subset);
        }
    }
    return out;
}

std::string format_summary(const std::vector<Summary>& summary) {
    std::ostringstream out;
    out << "# k,output,instances,mean_seconds\n";
    char seconds[32];
    for (const auto& s : summary) {
        std::snprintf(seconds, sizeof seconds, "%.3f", s.mean_seconds);
        out << "# " << s.k << ',' << s.output << ',' << s.instances << ',' << seconds << '\n';
    }
    return out.str();
}

}  // namespace wsp::bench
