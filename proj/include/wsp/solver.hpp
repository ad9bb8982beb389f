#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wsp/model.hpp"
#include "wsp/pattern.hpp"

namespace wsp {

struct SolverConfig {
    /// Drop remaining users dominated by a user that extended no pattern.
    bool enable_useless_pruning = true;
    /// Propagate pairs of intersecting at-most constraints.
    bool enable_pair_propagation = true;
    /// Move the first (super-)useful user to the front of the remaining list.
    bool enable_dynamic_order = true;
    /// Single at-most propagation. Off turns the search into the bare
    /// pattern enumeration, which keeps every valid partial plan.
    bool enable_atmost_propagation = true;
    /// Before extending, try to finish each pattern with the current user
    /// alone. Changes which witness is found, never the outcome.
    bool enable_early_completion = true;
    /// Seeded shuffle of the initial user order; input order when unset.
    std::optional<std::uint64_t> user_order_seed;
    /// Budget on candidate extensions examined.
    std::optional<std::uint64_t> node_limit;
    std::optional<double> time_limit_seconds;

    /// Every heuristic off.
    static SolverConfig plain() {
        SolverConfig cfg;
        cfg.enable_useless_pruning = false;
        cfg.enable_pair_propagation = false;
        cfg.enable_dynamic_order = false;
        cfg.enable_atmost_propagation = false;
        cfg.enable_early_completion = false;
        return cfg;
    }
};

/// Two at-most constraints (indices into the instance's constraint list)
/// whose scopes share `marked`.
struct ConstraintPair {
    std::size_t first = 0;
    std::size_t second = 0;
    StepId marked;
    friend bool operator==(const ConstraintPair&, const ConstraintPair&) = default;
};

enum class Outcome { satisfiable, unsatisfiable, budget_exceeded };

std::string_view to_string(Outcome o);

struct SolveReport {
    Outcome outcome = Outcome::unsatisfiable;
    std::optional<Plan> witness;
    std::uint64_t users_processed = 0;
    std::uint64_t patterns_generated = 0;
    /// Users whose iteration added no pattern.
    std::uint64_t n_w = 0;
    /// Users removed as useless.
    std::uint64_t n_useless = 0;
    std::uint64_t n_users = 0;
    std::uint64_t nodes = 0;
    double elapsed_seconds = 0.0;
};

/// Constraints relevant to one user's iteration (indices into the
/// instance's constraint list).
struct ConstraintView {
    std::vector<std::size_t> not_equals;  // both steps in A(u)
    std::vector<std::size_t> equals;      // some step in A(u)
    std::vector<std::size_t> at_most;     // all
    std::vector<std::size_t> at_least;    // scope meets A(u)
};

ConstraintView preprocess_for_user(const WorkflowInstance& inst, UserId u);

/// One pair per unordered pair of at-most constraints with intersecting
/// scopes; the marked step is the lowest common step.
std::vector<ConstraintPair> build_pairs(const WorkflowInstance& inst);

struct PropagationResult {
    bool eligible = true;
    std::vector<UserId> useful;
    std::vector<UserId> super_useful;
};

/// Eligibility of `candidate` followed by at-most and pair propagation
/// against `remaining_users`, the users still to be processed in order.
/// Propagation assumes no user of `candidate` is ever assigned again.
PropagationResult check_and_propagate(const WorkflowInstance& inst, const Plan& candidate,
                                      std::span<const UserId> remaining_users,
                                      std::span<const ConstraintPair> pairs, const SolverConfig& cfg = {});

/// Removes and returns every remaining user whose authorizations are
/// contained in those of `failed`.
std::vector<UserId> prune_useless(const WorkflowInstance& inst, std::vector<UserId>& remaining_users, UserId failed);

/// First super-useful user still remaining, else first useful one, else the
/// head; the choice is moved to the front of `remaining_users`, which must
/// be nonempty.
UserId choose_next_user(std::vector<UserId>& remaining_users, std::span<const UserId> useful,
                        std::span<const UserId> super_useful);

/// The pattern-based search, one user per step(). Exposed so callers can
/// observe the pattern set between iterations; solve() runs it to the end.
class FptSearch {
public:
    FptSearch(const WorkflowInstance& inst, SolverConfig cfg);
    ~FptSearch();
    FptSearch(const FptSearch&) = delete;
    FptSearch& operator=(const FptSearch&) = delete;

    bool done() const;
    /// Processes the next user.
    void step();

    const PatternSet& patterns() const;
    std::span<const UserId> processed_users() const;
    std::span<const UserId> remaining_users() const;
    SolveReport report() const;

private:
    struct State;
    std::unique_ptr<State> state_;
};

SolveReport solve(const WorkflowInstance& inst, const SolverConfig& cfg = {});

}  // namespace wsp
