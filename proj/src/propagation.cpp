#include "propagation.hpp"

#include <bit>

namespace wsp::detail {

CompiledConstraints::CompiledConstraints(const WorkflowInstance& inst, std::span<const ConstraintPair> pairs)
    : ne_neighbours(inst.step_count(), 0) {
    std::vector<std::size_t> at_most_slot(inst.constraints().size(), SIZE_MAX);
    for (std::size_t i = 0; i < inst.constraints().size(); ++i) {
        const Constraint& c = inst.constraints()[i];
        if (auto* ne = std::get_if<NotEquals>(&c)) {
            int a = ne->first.index;
            int b = ne->second.index;
            not_equals.push_back((std::uint64_t{1} << a) | (std::uint64_t{1} << b));
            ne_neighbours[a] |= std::uint64_t{1} << b;
            ne_neighbours[b] |= std::uint64_t{1} << a;
        } else if (auto* eq = std::get_if<Equals>(&c)) {
            equals.emplace_back(eq->first.index, eq->second.index);
        } else if (auto* am = std::get_if<AtMost>(&c)) {
            at_most_slot[i] = at_most.size();
            at_most.push_back({am->r, am->scope.bits(), i});
        } else if (auto* al = std::get_if<AtLeast>(&c)) {
            at_least.push_back({al->r, al->scope.bits(), i});
        }
    }
    pair_links.resize(at_most.size());
    for (const ConstraintPair& p : pairs) {
        std::size_t a = at_most_slot.at(p.first);
        std::size_t b = at_most_slot.at(p.second);
        if (a == SIZE_MAX || b == SIZE_MAX) throw std::invalid_argument("constraint pair over a non at-most constraint");
        if (a > b) std::swap(a, b);
        pair_links[a].push_back({b, std::uint64_t{1} << p.marked.index});
    }
}

Propagator::Propagator(const WorkflowInstance& inst, const CompiledConstraints& cc, bool single, bool pairs)
    : inst_(inst), cc_(cc), single_(single), pairs_(pairs), tight_(cc.at_most.size(), 0) {}

void Propagator::reset(std::span<const UserId> remaining) {
    remaining_.assign(remaining.begin(), remaining.end());
    cache_.clear();
}

int Propagator::carrier(std::uint64_t open) {
    auto [it, fresh] = cache_.try_emplace(open, kNone);
    if (!fresh) return it->second;
    for (std::uint64_t rest = open; rest; rest &= rest - 1) {
        if (cc_.ne_neighbours[std::countr_zero(rest)] & open) return kNone;
    }
    for (UserId v : remaining_) {
        if ((open & ~inst_.auth(v).bits()) == 0) {
            it->second = v.index;
            break;
        }
    }
    return it->second;
}

bool Propagator::run(std::uint64_t assigned, std::span<const std::uint8_t> used, Detected& out) {
    const auto& am = cc_.at_most;
    for (std::size_t i = 0; i < am.size(); ++i) {
        if (used[i] > am[i].r) return false;
    }
    if (!single_ && !pairs_) return true;

    bool any_tight = false;
    for (std::size_t i = 0; i < am.size(); ++i) {
        const std::uint64_t open = am[i].scope & ~assigned;
        // Processed users never come back, so an open step in a full scope
        // would bring in user r+1.
        if (single_ && open && used[i] >= am[i].r) return false;
        tight_[i] = used[i] + 1 == am[i].r && std::popcount(open) >= 2;
        if (!tight_[i]) continue;
        any_tight = true;
        if (single_) {
            int v = carrier(open);
            if (v == kNone) return false;
            Detected::note(out.useful, out.cap, v);
        }
    }
    if (!pairs_ || !any_tight) return true;

    for (std::size_t i = 0; i < am.size(); ++i) {
        if (!tight_[i]) continue;
        for (const PairLink& link : cc_.pair_links[i]) {
            if (!tight_[link.other] || (link.marked & assigned)) continue;
            int v = carrier((am[i].scope | am[link.other].scope) & ~assigned);
            if (v == kNone) return false;
            Detected::note(out.super_useful, out.cap, v);
        }
    }
    return true;
}

}  // namespace wsp::detail
