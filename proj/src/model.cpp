#include "wsp/model.hpp"

#include <algorithm>

namespace wsp {

namespace {

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

void check_step(StepId s, int k) {
    if (s.index < 0 || s.index >= k) {
        throw std::invalid_argument("step index " + std::to_string(s.index + 1) + " out of range");
    }
}

void check_counting(int r, StepSet scope, int k, const char* kind) {
    if ((scope - StepSet::first_n(k)).bits() != 0) {
        throw std::invalid_argument(std::string(kind) + " scope references a step beyond s" + std::to_string(k));
    }
    if (scope.size() < 2) {
        throw std::invalid_argument(std::string(kind) + " scope needs at least two steps");
    }
    if (r < 1 || r > scope.size()) {
        throw std::invalid_argument(std::string(kind) + " threshold " + std::to_string(r) + " outside [1, " +
                                    std::to_string(scope.size()) + "]");
    }
}

/// Distinct users over the assigned steps of `scope`, and the unassigned count.
std::pair<int, int> scope_usage(const Plan& plan, StepSet scope) {
    std::vector<int> seen;
    int open = 0;
    for (StepId s : scope) {
        if (auto u = plan.user(s)) {
            if (std::find(seen.begin(), seen.end(), u->index) == seen.end()) {
                seen.push_back(u->index);
            }
        } else {
            ++open;
        }
    }
    return {static_cast<int>(seen.size()), open};
}

std::string scope_text(StepSet scope) {
    std::string out = "{";
    bool first = true;
    for (StepId s : scope) {
        if (!first) out += ',';
        out += step_name(s);
        first = false;
    }
    return out + "}";
}

}  // namespace

std::string step_name(StepId s) { return "s" + std::to_string(s.index + 1); }
std::string user_name(UserId u) { return "u" + std::to_string(u.index + 1); }

void validate_constraint(const Constraint& c, int k) {
    std::visit(overloaded{
                   [k](const NotEquals& ne) {
                       check_step(ne.first, k);
                       check_step(ne.second, k);
                       if (ne.first == ne.second) throw std::invalid_argument("not-equals on a single step");
                   },
                   [k](const Equals& eq) {
                       check_step(eq.first, k);
                       check_step(eq.second, k);
                       if (eq.first == eq.second) throw std::invalid_argument("equals on a single step");
                   },
                   [k](const AtMost& am) { check_counting(am.r, am.scope, k, "at-most"); },
                   [k](const AtLeast& al) { check_counting(al.r, al.scope, k, "at-least"); },
               },
               c);
}

std::string describe(const Constraint& c) {
    return std::visit(
        overloaded{
            [](const NotEquals& ne) { return "(" + step_name(ne.first) + "," + step_name(ne.second) + ",!=)"; },
            [](const Equals& eq) { return "(" + step_name(eq.first) + "," + step_name(eq.second) + ",=)"; },
            [](const AtMost& am) { return "(" + std::to_string(am.r) + "," + scope_text(am.scope) + ",<=)"; },
            [](const AtLeast& al) { return "(" + std::to_string(al.r) + "," + scope_text(al.scope) + ",>=)"; },
        },
        c);
}

WorkflowInstance::WorkflowInstance(int steps, std::vector<StepSet> auth_by_user, std::vector<Constraint> constraints)
    : k_(steps), auth_by_user_(std::move(auth_by_user)), constraints_(std::move(constraints)) {
    if (k_ < 1 || k_ > kMaxSteps) {
        throw std::invalid_argument("step count must lie in [1, " + std::to_string(kMaxSteps) + "]");
    }
    const StepSet all = StepSet::first_n(k_);
    auth_by_step_.assign(k_, {});
    for (int u = 0; u < user_count(); ++u) {
        if (!auth_by_user_[u].is_subset_of(all)) {
            throw std::invalid_argument("authorization of " + user_name(UserId{u}) + " references an unknown step");
        }
        for (StepId s : auth_by_user_[u]) auth_by_step_[s.index].push_back(UserId{u});
    }
    for (const auto& c : constraints_) validate_constraint(c, k_);
}

StepSet Plan::assigned_steps() const {
    StepSet out;
    for (int s = 0; s < step_count(); ++s) {
        if (user_of_[s] >= 0) out.insert(StepId{s});
    }
    return out;
}

std::vector<UserId> Plan::users_used() const {
    std::vector<UserId> out;
    for (int u : user_of_) {
        if (u >= 0) out.push_back(UserId{u});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool is_authorized(const WorkflowInstance& inst, const Plan& plan) {
    for (int s = 0; s < plan.step_count(); ++s) {
        if (auto u = plan.user(StepId{s}); u && !inst.is_authorized(*u, StepId{s})) return false;
    }
    return true;
}

bool violates(const Constraint& c, const Plan& plan) {
    return std::visit(overloaded{
                          [&](const NotEquals& ne) {
                              auto a = plan.user(ne.first);
                              auto b = plan.user(ne.second);
                              return a && b && *a == *b;
                          },
                          [&](const Equals& eq) {
                              auto a = plan.user(eq.first);
                              auto b = plan.user(eq.second);
                              return a && b && *a != *b;
                          },
                          [&](const AtMost& am) { return scope_usage(plan, am.scope).first > am.r; },
                          [&](const AtLeast& al) {
                              auto [used, open] = scope_usage(plan, al.scope);
                              return used + open < al.r;
                          },
                      },
                      c);
}

bool is_eligible(const WorkflowInstance& inst, const Plan& plan) {
    return std::none_of(inst.constraints().begin(), inst.constraints().end(),
                        [&](const Constraint& c) { return violates(c, plan); });
}

bool is_valid_complete(const WorkflowInstance& inst, const Plan& plan) {
    return plan.step_count() == inst.step_count() && plan.is_complete() && is_authorized(inst, plan) &&
           is_eligible(inst, plan);
}

PlanDiagnostics diagnose(const WorkflowInstance& inst, const Plan& plan) {
    PlanDiagnostics d;
    for (int s = 0; s < inst.step_count(); ++s) {
        StepId step{s};
        auto u = s < plan.step_count() ? plan.user(step) : std::nullopt;
        if (!u) {
            d.unassigned.push_back(step);
        } else if (!inst.is_authorized(*u, step)) {
            d.unauthorized.emplace_back(*u, step);
        }
    }
    for (std::size_t i = 0; i < inst.constraints().size(); ++i) {
        if (violates(inst.constraints()[i], plan)) d.violated.push_back(i);
    }
    return d;
}

}  // namespace wsp
