#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wsp/model.hpp"
#include "wsp/pb.hpp"

namespace wsp::oracle {

class CapExceeded : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultCap = 10'000'000;

struct BruteResult {
    bool satisfiable = false;
    /// Every valid complete plan, lexicographic in step-major user index.
    std::vector<Plan> witnesses;
    /// Complete authorized assignments examined.
    std::uint64_t examined = 0;
};

/// Tries every authorized complete assignment. Throws CapExceeded when the
/// product of |A(s)| exceeds `cap`.
BruteResult brute_solve(const WorkflowInstance& inst, std::uint64_t cap = kDefaultCap);

inline constexpr int kMaxPbVariables = 24;

struct PbResult {
    bool satisfiable = false;
    std::optional<pb::Assignment> assignment;  // first satisfying one in counting order
    /// All satisfying assignments, when requested.
    std::vector<pb::Assignment> all;
};

/// Exhaustive 0/1 search. Throws CapExceeded above kMaxPbVariables variables.
PbResult brute_pb(const pb::Model& model, bool collect_all = false);

/// A set partition of {0..m-1}: blocks in order of their smallest element,
/// each block ascending.
using Partition = std::vector<std::vector<int>>;

/// Every partition exactly once. m <= 12.
std::vector<Partition> enumerate_partitions(int m);

/// Via the recurrence B(n+1) = sum C(n,i) B(i). m <= 25.
std::uint64_t bell_number(int m);

}  // namespace wsp::oracle
