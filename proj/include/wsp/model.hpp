#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace wsp {

/// Steps are stored as bits of a 64-bit word, so an instance has at most 64.
inline constexpr int kMaxSteps = 64;

struct StepId {
    int index = 0;
    friend auto operator<=>(const StepId&, const StepId&) = default;
};

struct UserId {
    int index = 0;
    friend auto operator<=>(const UserId&, const UserId&) = default;
};

/// A set of steps as a fixed-width bitmask.
class StepSet {
public:
    class iterator {
    public:
        using value_type = StepId;
        using difference_type = std::ptrdiff_t;

        iterator() = default;
        explicit iterator(std::uint64_t rest) : rest_(rest) {}

        StepId operator*() const { return StepId{std::countr_zero(rest_)}; }
        iterator& operator++() {
            rest_ &= rest_ - 1;
            return *this;
        }
        iterator operator++(int) {
            auto old = *this;
            ++*this;
            return old;
        }
        friend bool operator==(const iterator&, const iterator&) = default;

    private:
        std::uint64_t rest_ = 0;
    };

    constexpr StepSet() = default;
    constexpr explicit StepSet(std::uint64_t bits) : bits_(bits) {}

    static constexpr StepSet first_n(int k) {
        return StepSet(k >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << k) - 1));
    }
    static constexpr StepSet single(StepId s) { return StepSet(std::uint64_t{1} << s.index); }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr int size() const { return std::popcount(bits_); }
    constexpr bool contains(StepId s) const { return (bits_ >> s.index) & 1U; }
    constexpr bool is_subset_of(StepSet other) const { return (bits_ & ~other.bits_) == 0; }
    constexpr bool intersects(StepSet other) const { return (bits_ & other.bits_) != 0; }

    constexpr void insert(StepId s) { bits_ |= std::uint64_t{1} << s.index; }
    constexpr void erase(StepId s) { bits_ &= ~(std::uint64_t{1} << s.index); }

    /// Lowest-indexed member; the set must be nonempty.
    constexpr StepId front() const { return StepId{std::countr_zero(bits_)}; }

    iterator begin() const { return iterator(bits_); }
    iterator end() const { return iterator(0); }

    friend constexpr StepSet operator|(StepSet a, StepSet b) { return StepSet(a.bits_ | b.bits_); }
    friend constexpr StepSet operator&(StepSet a, StepSet b) { return StepSet(a.bits_ & b.bits_); }
    friend constexpr StepSet operator-(StepSet a, StepSet b) { return StepSet(a.bits_ & ~b.bits_); }
    constexpr StepSet& operator|=(StepSet o) {
        bits_ |= o.bits_;
        return *this;
    }
    constexpr StepSet& operator&=(StepSet o) {
        bits_ &= o.bits_;
        return *this;
    }
    friend constexpr bool operator==(StepSet, StepSet) = default;

private:
    std::uint64_t bits_ = 0;
};

// ============================================================================
// Constraints
// ============================================================================

struct NotEquals {
    StepId first;
    StepId second;
    friend bool operator==(const NotEquals&, const NotEquals&) = default;
};

struct Equals {
    StepId first;
    StepId second;
    friend bool operator==(const Equals&, const Equals&) = default;
};

/// At most `r` distinct users perform the steps of `scope`.
struct AtMost {
    int r = 1;
    StepSet scope;
    friend bool operator==(const AtMost&, const AtMost&) = default;
};

/// At least `r` distinct users perform the steps of `scope`.
struct AtLeast {
    int r = 1;
    StepSet scope;
    friend bool operator==(const AtLeast&, const AtLeast&) = default;
};

using Constraint = std::variant<NotEquals, Equals, AtMost, AtLeast>;

/// Throws std::invalid_argument if `c` is malformed for an instance with `k` steps.
void validate_constraint(const Constraint& c, int k);

/// Tuple notation used in diagnostics, e.g. "(s1,s2,=)" or "(3,{s1,s2,s3},<=)".
std::string describe(const Constraint& c);

std::string step_name(StepId s);
std::string user_name(UserId u);

// ============================================================================
// Instance
// ============================================================================

/// Steps, users, authorization lists and constraints. Immutable once built.
class WorkflowInstance {
public:
    WorkflowInstance() = default;

    /// `auth_by_user[u]` is A(u). Throws std::invalid_argument on out-of-range
    /// steps or malformed constraints.
    WorkflowInstance(int steps, std::vector<StepSet> auth_by_user, std::vector<Constraint> constraints);

    int step_count() const { return k_; }
    int user_count() const { return static_cast<int>(auth_by_user_.size()); }
    StepSet all_steps() const { return StepSet::first_n(k_); }

    StepSet auth(UserId u) const { return auth_by_user_[u.index]; }
    std::span<const StepSet> auth_by_user() const { return auth_by_user_; }
    /// A(s), ascending user order.
    std::span<const UserId> users_for(StepId s) const { return auth_by_step_[s.index]; }
    bool is_authorized(UserId u, StepId s) const { return auth_by_user_[u.index].contains(s); }

    std::span<const Constraint> constraints() const { return constraints_; }

    friend bool operator==(const WorkflowInstance& a, const WorkflowInstance& b) {
        return a.k_ == b.k_ && a.auth_by_user_ == b.auth_by_user_ && a.constraints_ == b.constraints_;
    }

private:
    int k_ = 0;
    std::vector<StepSet> auth_by_user_;
    std::vector<std::vector<UserId>> auth_by_step_;
    std::vector<Constraint> constraints_;
};

// ============================================================================
// Plans
// ============================================================================

/// Partial map from steps to users over a fixed number of steps.
class Plan {
public:
    Plan() = default;
    explicit Plan(int steps) : user_of_(steps, -1) {}

    int step_count() const { return static_cast<int>(user_of_.size()); }

    void assign(StepId s, UserId u) { user_of_[s.index] = u.index; }
    void unassign(StepId s) { user_of_[s.index] = -1; }
    bool is_assigned(StepId s) const { return user_of_[s.index] >= 0; }
    std::optional<UserId> user(StepId s) const {
        int u = user_of_[s.index];
        return u >= 0 ? std::optional<UserId>(UserId{u}) : std::nullopt;
    }

    StepSet assigned_steps() const;
    bool is_complete() const { return assigned_steps() == StepSet::first_n(step_count()); }
    /// Distinct users, ascending.
    std::vector<UserId> users_used() const;

    friend bool operator==(const Plan&, const Plan&) = default;

private:
    std::vector<int> user_of_;
};

bool is_authorized(const WorkflowInstance& inst, const Plan& plan);

/// Monotone violation: once a plan violates `c`, every extension does too.
/// An at-least constraint is violated when its distinct users plus its
/// unassigned steps fall short of r.
bool violates(const Constraint& c, const Plan& plan);

bool is_eligible(const WorkflowInstance& inst, const Plan& plan);
bool is_valid_complete(const WorkflowInstance& inst, const Plan& plan);

/// Everything that keeps a plan from being a valid complete plan.
struct PlanDiagnostics {
    std::vector<StepId> unassigned;
    std::vector<std::pair<UserId, StepId>> unauthorized;
    std::vector<std::size_t> violated;  // indices into inst.constraints()

    bool ok() const { return unassigned.empty() && unauthorized.empty() && violated.empty(); }
};

PlanDiagnostics diagnose(const WorkflowInstance& inst, const Plan& plan);

}  // namespace wsp
