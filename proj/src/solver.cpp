#include "wsp/solver.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <stdexcept>

#include "propagation.hpp"
#include "wsp/random.hpp"

namespace wsp {

std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::satisfiable: return "sat";
        case Outcome::unsatisfiable: return "unsat";
        case Outcome::budget_exceeded: return "budget_exceeded";
    }
    return "?";
}

ConstraintView preprocess_for_user(const WorkflowInstance& inst, UserId u) {
    ConstraintView view;
    const StepSet a = inst.auth(u);
    for (std::size_t i = 0; i < inst.constraints().size(); ++i) {
        const Constraint& c = inst.constraints()[i];
        if (auto* ne = std::get_if<NotEquals>(&c)) {
            if (a.contains(ne->first) && a.contains(ne->second)) view.not_equals.push_back(i);
        } else if (auto* eq = std::get_if<Equals>(&c)) {
            if (a.contains(eq->first) || a.contains(eq->second)) view.equals.push_back(i);
        } else if (std::holds_alternative<AtMost>(c)) {
            view.at_most.push_back(i);
        } else if (auto* al = std::get_if<AtLeast>(&c)) {
            if (al->scope.intersects(a)) view.at_least.push_back(i);
        }
    }
    return view;
}

std::vector<ConstraintPair> build_pairs(const WorkflowInstance& inst) {
    std::vector<ConstraintPair> pairs;
    auto cs = inst.constraints();
    for (std::size_t i = 0; i < cs.size(); ++i) {
        auto* a = std::get_if<AtMost>(&cs[i]);
        if (!a) continue;
        for (std::size_t j = i + 1; j < cs.size(); ++j) {
            auto* b = std::get_if<AtMost>(&cs[j]);
            if (!b) continue;
            StepSet common = a->scope & b->scope;
            if (!common.empty()) pairs.push_back({i, j, common.front()});
        }
    }
    return pairs;
}

std::vector<UserId> prune_useless(const WorkflowInstance& inst, std::vector<UserId>& remaining_users, UserId failed) {
    std::vector<UserId> removed;
    const StepSet dominant = inst.auth(failed);
    std::erase_if(remaining_users, [&](UserId v) {
        if (!inst.auth(v).is_subset_of(dominant)) return false;
        removed.push_back(v);
        return true;
    });
    return removed;
}

UserId choose_next_user(std::vector<UserId>& remaining_users, std::span<const UserId> useful,
                        std::span<const UserId> super_useful) {
    if (remaining_users.empty()) throw std::invalid_argument("no remaining users to choose from");
    auto pick = [&](std::span<const UserId> candidates) {
        for (UserId v : candidates) {
            auto it = std::find(remaining_users.begin(), remaining_users.end(), v);
            if (it != remaining_users.end()) {
                std::rotate(remaining_users.begin(), it, it + 1);
                return true;
            }
        }
        return false;
    };
    if (!pick(super_useful)) pick(useful);
    return remaining_users.front();
}

namespace {

std::vector<std::uint8_t> at_most_usage(const detail::CompiledConstraints& cc, const Plan& plan) {
    std::vector<std::uint8_t> used;
    for (const auto& am : cc.at_most) {
        std::vector<int> seen;
        for (std::uint64_t rest = am.scope; rest; rest &= rest - 1) {
            if (auto v = plan.user(StepId{std::countr_zero(rest)})) {
                if (std::find(seen.begin(), seen.end(), v->index) == seen.end()) seen.push_back(v->index);
            }
        }
        used.push_back(static_cast<std::uint8_t>(seen.size()));
    }
    return used;
}

}  // namespace

PropagationResult check_and_propagate(const WorkflowInstance& inst, const Plan& candidate,
                                      std::span<const UserId> remaining_users,
                                      std::span<const ConstraintPair> pairs, const SolverConfig& cfg) {
    PropagationResult result;
    auto cs = inst.constraints();
    auto fails = [&](auto is_kind) {
        return std::any_of(cs.begin(), cs.end(),
                           [&](const Constraint& c) { return is_kind(c) && violates(c, candidate); });
    };

    // (1) not-equals and equals, (2) at-most with propagation, (3) at-least.
    if (fails([](const Constraint& c) { return std::holds_alternative<NotEquals>(c) || std::holds_alternative<Equals>(c); })) {
        result.eligible = false;
        return result;
    }
    detail::CompiledConstraints cc(inst, pairs);
    detail::Propagator prop(inst, cc, cfg.enable_atmost_propagation, cfg.enable_pair_propagation);
    prop.reset(remaining_users);
    detail::Detected found;
    if (!prop.run(candidate.assigned_steps().bits(), at_most_usage(cc, candidate), found)) {
        result.eligible = false;
        return result;
    }
    if (fails([](const Constraint& c) { return std::holds_alternative<AtLeast>(c); })) {
        result.eligible = false;
        return result;
    }
    result.useful = std::move(found.useful);
    result.super_useful = std::move(found.super_useful);
    return result;
}

// ============================================================================
// FptSearch
// ============================================================================

struct FptSearch::State {
    using Clock = std::chrono::steady_clock;

    State(const WorkflowInstance& i, SolverConfig c)
        : inst(i),
          cfg(std::move(c)),
          k(i.step_count()),
          all(StepSet::first_n(i.step_count()).bits()),
          pairs(cfg.enable_pair_propagation ? build_pairs(i) : std::vector<ConstraintPair>{}),
          cc(i, pairs),
          prop(i, cc, cfg.enable_atmost_propagation, cfg.enable_pair_propagation),
          patterns(i.step_count()),
          started(Clock::now()) {
        if (i.user_count() > 65535) throw std::invalid_argument("at most 65535 users are supported");
        if (cfg.node_limit && *cfg.node_limit == 0) throw std::invalid_argument("node limit must be positive");
        if (cfg.time_limit_seconds && !(*cfg.time_limit_seconds > 0)) {
            throw std::invalid_argument("time limit must be positive");
        }
        for (int u = 0; u < i.user_count(); ++u) remaining.push_back(UserId{u});
        if (cfg.user_order_seed) {
            Rng rng(*cfg.user_order_seed);
            rng.shuffle(std::span<UserId>(remaining));
        }
        patterns.insert(Pattern::zero(k), Plan(k));
        found.cap = 4;
        report.n_users = static_cast<std::uint64_t>(i.user_count());
        if (remaining.empty()) finish(Outcome::unsatisfiable);
    }

    bool out_of_budget() {
        if (cfg.node_limit && report.nodes >= *cfg.node_limit) return true;
        if (cfg.time_limit_seconds) {
            std::chrono::duration<double> spent = Clock::now() - started;
            if (spent.count() >= *cfg.time_limit_seconds) return true;
        }
        return false;
    }

    void finish(Outcome o) {
        report.outcome = o;
        report.elapsed_seconds = std::chrono::duration<double>(Clock::now() - started).count();
        finished = true;
    }

    void step();

    const WorkflowInstance& inst;
    SolverConfig cfg;
    int k;
    std::uint64_t all;
    std::vector<ConstraintPair> pairs;
    detail::CompiledConstraints cc;
    detail::Propagator prop;
    PatternSet patterns;
    std::vector<UserId> remaining;
    std::vector<UserId> processed;
    detail::Detected found;
    SolveReport report;
    Clock::time_point started;
    bool finished = false;
    std::uint64_t work = 0;
};

void FptSearch::State::step() {
    if (finished) return;
    if (out_of_budget()) return finish(Outcome::budget_exceeded);

    const UserId u = remaining.front();
    remaining.erase(remaining.begin());
    processed.push_back(u);
    ++report.users_processed;

    const std::uint64_t auth_u = inst.auth(u).bits();
    prop.reset(remaining);
    found.clear();

    // Per-user preprocessing.
    std::vector<std::uint64_t> ne_u;
    for (std::uint64_t m : cc.not_equals) {
        if ((m & auth_u) == m) ne_u.push_back(m);
    }
    std::vector<std::pair<int, int>> eq_u;
    for (auto [a, b] : cc.equals) {
        if (((auth_u >> a) | (auth_u >> b)) & 1U) eq_u.emplace_back(a, b);
    }
    std::vector<const detail::CountingMask*> al_u;
    for (const auto& al : cc.at_least) {
        if (al.scope & auth_u) al_u.push_back(&al);
    }

    const std::size_t n_am = cc.at_most.size();
    std::vector<std::uint8_t> used_am(n_am);
    std::vector<std::uint8_t> used_next(n_am);
    std::vector<std::uint8_t> used_al(al_u.size());
    std::array<std::uint64_t, kMaxSteps> positions{};
    std::vector<std::uint8_t> next_key(k);
    std::vector<std::uint16_t> next_users(k);
    std::array<std::uint8_t, kMaxSteps + 1> relabel{};

    // Bit (x_s - 1) for every assigned scope step; popcount = distinct users.
    auto usage = [&](std::span<const std::uint8_t> x, std::uint64_t scope) {
        std::uint64_t labels = 0;
        for (std::uint64_t rest = scope; rest; rest &= rest - 1) {
            std::uint8_t v = x[std::countr_zero(rest)];
            if (v) labels |= std::uint64_t{1} << (v - 1);
        }
        return static_cast<std::uint8_t>(std::popcount(labels));
    };

    // Checks in order: (1) not-equals, equals, (2) at-most with propagation,
    // (3) at-least touched by the extension. used_am and used_al must hold
    // the usage of the pattern being extended.
    auto admissible = [&](std::uint64_t assigned, std::uint64_t ext) {
        for (std::uint64_t mask : ne_u) {
            if ((ext & mask) == mask) return false;
        }
        for (auto [a, b] : eq_u) {
            bool in_a = (ext >> a) & 1U;
            bool in_b = (ext >> b) & 1U;
            if (in_a != in_b && ((assigned >> (in_a ? b : a)) & 1U)) return false;
        }
        const std::uint64_t next_assigned = assigned | ext;
        for (std::size_t i = 0; i < n_am; ++i) {
            used_next[i] = used_am[i] + ((cc.at_most[i].scope & ext) ? 1 : 0);
        }
        if (!prop.run(next_assigned, used_next, found)) return false;
        for (std::size_t i = 0; i < al_u.size(); ++i) {
            const auto& al = *al_u[i];
            if (!(al.scope & ext)) continue;
            int reach = used_al[i] + 1 + std::popcount(al.scope & ~next_assigned);
            if (reach < al.r) return false;
        }
        return true;
    };

    auto assigned_of = [&](std::span<const std::uint8_t> x) {
        std::uint64_t assigned = 0;
        for (int s = 0; s < k; ++s) {
            if (x[s]) assigned |= std::uint64_t{1} << s;
        }
        return assigned;
    };

    auto complete_with = [&](std::size_t p, std::uint64_t ext) {
        Plan witness = patterns.representative(p);
        for (std::uint64_t rest = ext; rest; rest &= rest - 1) witness.assign(StepId{std::countr_zero(rest)}, u);
        if (!is_valid_complete(inst, witness)) throw std::logic_error("search produced an invalid witness");
        report.witness = std::move(witness);
        finish(Outcome::satisfiable);
    };

    const std::size_t pattern_count = patterns.size();
    if (cfg.enable_early_completion) {
        for (std::size_t p = 0; p < pattern_count; ++p) {
            if ((++work & 0xFFF) == 0 && out_of_budget()) return finish(Outcome::budget_exceeded);
            auto x = patterns.key(p);
            const std::uint64_t assigned = assigned_of(x);
            const std::uint64_t open = all & ~assigned;
            if (!open || (open & ~auth_u)) continue;
            if (cfg.node_limit && report.nodes >= *cfg.node_limit) return finish(Outcome::budget_exceeded);
            ++report.nodes;
            for (std::size_t i = 0; i < n_am; ++i) used_am[i] = usage(x, cc.at_most[i].scope);
            for (std::size_t i = 0; i < al_u.size(); ++i) used_al[i] = usage(x, al_u[i]->scope);
            if (admissible(assigned, open)) return complete_with(p, open);
        }
    }

    PatternBatch batch(k);
    for (std::size_t p = 0; p < pattern_count; ++p) {
        if ((++work & 0xFFF) == 0 && out_of_budget()) return finish(Outcome::budget_exceeded);

        auto x = patterns.key(p);
        const std::uint64_t assigned = assigned_of(x);
        std::uint64_t open_u = auth_u & ~assigned;
        if (!open_u) continue;

        for (std::size_t i = 0; i < n_am; ++i) used_am[i] = usage(x, cc.at_most[i].scope);
        for (std::size_t i = 0; i < al_u.size(); ++i) used_al[i] = usage(x, al_u[i]->scope);

        // Drop steps that every extension containing them would fail on:
        // a full at-most scope, a scope one user short whose open steps u
        // cannot all take, or an equals partner already assigned.
        for (std::size_t i = 0; i < n_am; ++i) {
            const auto& am = cc.at_most[i];
            if (used_am[i] >= am.r ||
                (cfg.enable_atmost_propagation && used_am[i] + 1 == am.r && (am.scope & ~assigned & ~auth_u))) {
                open_u &= ~am.scope;
            }
        }
        for (auto [a, b] : eq_u) {
            if ((assigned >> b) & 1U) open_u &= ~(std::uint64_t{1} << a);
            if ((assigned >> a) & 1U) open_u &= ~(std::uint64_t{1} << b);
        }
        if (!open_u) continue;

        const int m = std::popcount(open_u);
        if (m > 62) throw std::invalid_argument("too many open authorized steps to enumerate");
        {
            int j = 0;
            for (std::uint64_t rest = open_u; rest; rest &= rest - 1) positions[j++] = rest & -rest;
        }

        // Subsets of open_u by increasing size, then ascending mask value
        // (Gosper's hack over local indices; deposit preserves order).
        for (int size = 1; size <= m; ++size) {
            for (std::uint64_t local = (std::uint64_t{1} << size) - 1; local < (std::uint64_t{1} << m);) {
                std::uint64_t ext = 0;
                for (std::uint64_t rest = local; rest; rest &= rest - 1) ext |= positions[std::countr_zero(rest)];
                {
                    std::uint64_t t = local | (local - 1);
                    local = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(local) + 1));
                }

                if (cfg.node_limit && report.nodes >= *cfg.node_limit) return finish(Outcome::budget_exceeded);
                ++report.nodes;
                if ((++work & 0xFFF) == 0 && out_of_budget()) return finish(Outcome::budget_exceeded);

                const std::uint64_t next_assigned = assigned | ext;
                if (!admissible(assigned, ext)) continue;

                if (next_assigned == all) return complete_with(p, ext);

                // Min-vector of the extension: renumber blocks by first appearance.
                relabel.fill(0);
                std::uint8_t next_label = 1;
                std::uint8_t ext_label = 0;
                auto users = patterns.block_users(p);
                for (int s = 0; s < k; ++s) {
                    if ((ext >> s) & 1U) {
                        if (!ext_label) {
                            ext_label = next_label++;
                            next_users[ext_label - 1] = static_cast<std::uint16_t>(u.index);
                        }
                        next_key[s] = ext_label;
                    } else if (x[s]) {
                        std::uint8_t& label = relabel[x[s]];
                        if (!label) {
                            label = next_label++;
                            next_users[label - 1] = users[x[s] - 1];
                        }
                        next_key[s] = label;
                    } else {
                        next_key[s] = 0;
                    }
                }
                if (patterns.contains(next_key)) continue;
                batch.insert(next_key, next_users);
            }
        }
    }

    if (batch.empty()) {
        ++report.n_w;
        if (cfg.enable_useless_pruning) report.n_useless += prune_useless(inst, remaining, u).size();
    } else {
        patterns.merge(std::move(batch));
    }
    report.patterns_generated = patterns.size();

    if (remaining.empty()) return finish(Outcome::unsatisfiable);
    if (cfg.enable_dynamic_order) choose_next_user(remaining, found.useful, found.super_useful);
}

FptSearch::FptSearch(const WorkflowInstance& inst, SolverConfig cfg)
    : state_(std::make_unique<State>(inst, std::move(cfg))) {}

FptSearch::~FptSearch() = default;

bool FptSearch::done() const { return state_->finished; }

void FptSearch::step() { state_->step(); }

const PatternSet& FptSearch::patterns() const { return state_->patterns; }

std::span<const UserId> FptSearch::processed_users() const { return state_->processed; }

std::span<const UserId> FptSearch::remaining_users() const { return state_->remaining; }

SolveReport FptSearch::report() const {
    SolveReport r = state_->report;
    r.patterns_generated = state_->patterns.size();
    if (!state_->finished) {
        r.elapsed_seconds = std::chrono::duration<double>(State::Clock::now() - state_->started).count();
    }
    return r;
}

SolveReport solve(const WorkflowInstance& inst, const SolverConfig& cfg) {
    FptSearch search(inst, cfg);
    while (!search.done()) search.step();
    return search.report();
}

}  // namespace wsp
