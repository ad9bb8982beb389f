#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wsp/model.hpp"
#include "wsp/solver.hpp"

namespace wsp::bench {

/// One instance to run: either already in memory or read from `path`.
struct Entry {
    std::string label;
    int k = 0;
    std::optional<WorkflowInstance> instance;
    std::string path;
};

struct Options {
    SolverConfig config;
    /// Worker threads; 1 runs in the calling thread.
    int parallel = 1;
};

struct Row {
    std::string label;
    int k = 0;
    /// "sat", "unsat", "budget_exceeded" or "error".
    std::string output;
    double cpu_seconds = 0.0;
    std::uint64_t users_processed = 0;
    std::uint64_t patterns = 0;
    std::uint64_t n_users = 0;
    std::uint64_t n_w = 0;
    std::uint64_t n_useless = 0;
    std::string error;
};

/// `n: n_w → n_u`, e.g. "200: 71→68".
std::string unsat_triple(std::uint64_t n, std::uint64_t n_w, std::uint64_t n_useless);

Row run_one(const Entry& entry, const SolverConfig& cfg);

/// Rows come back in entry order whatever the worker count.
std::vector<Row> run(const std::vector<Entry>& entries, const Options& options);

/// CSV `label,output,cpu_seconds,users,patterns,n_w,n_useless`. For unsat
/// rows `users` holds the triple; n_w and n_useless are empty unless unsat.
std::string format_csv(const std::vector<Row>& rows);

struct Summary {
    int k = 0;
    std::string output;  // "all", "sat", "unsat", ...
    int instances = 0;
    double mean_seconds = 0.0;
};

/// Per k: all instances, then each outcome present, in fixed outcome order.
std::vector<Summary> summarize(const std::vector<Row>& rows);

/// `#`-prefixed lines meant to follow the CSV rows.
std::string format_summary(const std::vector<Summary>& summary);

}  // namespace wsp::bench
