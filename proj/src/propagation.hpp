#pragma once

// Bitmask form of the constraints and the at-most propagation shared by the
// search loop and check_and_propagate().

#include <cstdint>
#include <span>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "wsp/solver.hpp"

namespace wsp::detail {

struct CountingMask {
    int r;
    std::uint64_t scope;
    std::size_t source;  // index into inst.constraints()
};

struct PairLink {
    std::size_t other;  // index into CompiledConstraints::at_most
    std::uint64_t marked;
};

struct CompiledConstraints {
    explicit CompiledConstraints(const WorkflowInstance& inst, std::span<const ConstraintPair> pairs);

    std::vector<std::uint64_t> not_equals;
    std::vector<std::pair<int, int>> equals;
    std::vector<CountingMask> at_most;
    std::vector<CountingMask> at_least;
    /// Steps in a not-equals constraint with step s.
    std::vector<std::uint64_t> ne_neighbours;
    /// pair_links[i] lists pairs (i, j) with j > i.
    std::vector<std::vector<PairLink>> pair_links;
};

/// Collects up to `cap` distinct users in detection order.
struct Detected {
    std::size_t cap = SIZE_MAX;
    std::vector<UserId> useful;
    std::vector<UserId> super_useful;

    void clear() {
        useful.clear();
        super_useful.clear();
    }
    static void note(std::vector<UserId>& list, std::size_t cap, int u) {
        if (list.size() >= cap) return;
        for (UserId v : list) {
            if (v.index == u) return;
        }
        list.push_back(UserId{u});
    }
};

class Propagator {
public:
    Propagator(const WorkflowInstance& inst, const CompiledConstraints& cc, bool single, bool pairs);

    /// Users that may still receive steps, in processing order.
    void reset(std::span<const UserId> remaining);

    /// `used[i]` is the number of distinct users on the assigned steps of
    /// at_most[i]. Returns false when an at-most constraint is violated or
    /// propagation proves the plan cannot be completed by the remaining
    /// users.
    ///
    /// The single-user inference relies on the search never revisiting a
    /// processed user: with r-1 users on the scope, every open scope step
    /// must go to the same fresh user.
    bool run(std::uint64_t assigned, std::span<const std::uint8_t> used, Detected& out);

private:
    static constexpr int kNone = -1;

    /// First remaining user authorized for all of `open`, or kNone when there
    /// is none or two steps of `open` are bound by a not-equals constraint.
    int carrier(std::uint64_t open);

    const WorkflowInstance& inst_;
    const CompiledConstraints& cc_;
    bool single_;
    bool pairs_;
    std::vector<UserId> remaining_;
    absl::flat_hash_map<std::uint64_t, int> cache_;
    std::vector<std::uint8_t> tight_;
};

}  // namespace wsp::detail
