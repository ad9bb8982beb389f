#include "wsp/oracle.hpp"

#include <bit>
#include <string>

namespace wsp::oracle {

BruteResult brute_solve(const WorkflowInstance& inst, std::uint64_t cap) {
    const int k = inst.step_count();
    std::uint64_t product = 1;
    for (int s = 0; s < k; ++s) {
        auto size = static_cast<std::uint64_t>(inst.users_for(StepId{s}).size());
        if (size == 0) return {};
        if (product > cap / size) throw CapExceeded("more than " + std::to_string(cap) + " authorized assignments");
        product *= size;
    }

    BruteResult result;
    std::vector<std::size_t> choice(k, 0);
    Plan plan(k);
    for (int s = 0; s < k; ++s) plan.assign(StepId{s}, inst.users_for(StepId{s})[0]);
    while (true) {
        ++result.examined;
        if (is_eligible(inst, plan)) result.witnesses.push_back(plan);
        // Odometer with the last step fastest, so step s1 is most significant.
        int s = k - 1;
        for (; s >= 0; --s) {
            auto users = inst.users_for(StepId{s});
            if (++choice[s] < users.size()) {
                plan.assign(StepId{s}, users[choice[s]]);
                break;
            }
            choice[s] = 0;
            plan.assign(StepId{s}, users[0]);
        }
        if (s < 0) break;
    }
    result.satisfiable = !result.witnesses.empty();
    return result;
}

namespace {

// Row as bit masks over the variables (bit i-1 for variable i).
struct MaskRow {
    std::uint32_t positive = 0;
    std::uint32_t negative = 0;
    pb::Relation relation = pb::Relation::eq;
    int bound = 0;

    bool holds(std::uint32_t bits) const {
        int lhs = std::popcount(bits & positive) - std::popcount(bits & negative);
        switch (relation) {
            case pb::Relation::eq: return lhs == bound;
            case pb::Relation::ge: return lhs >= bound;
            case pb::Relation::le: return lhs <= bound;
        }
        return false;
    }
};

}  // namespace

PbResult brute_pb(const pb::Model& model, bool collect_all) {
    const int n = static_cast<int>(model.variables.size());
    if (n > kMaxPbVariables) {
        throw CapExceeded(std::to_string(n) + " variables, more than " + std::to_string(kMaxPbVariables));
    }
    std::vector<MaskRow> rows;
    for (const auto& row : model.rows) {
        MaskRow m{0, 0, row.relation, row.bound};
        for (const auto& t : row.terms) {
            // Coefficients are +-1 and a variable appears at most once per row.
            (t.coefficient > 0 ? m.positive : m.negative) |= std::uint32_t{1} << (t.var - 1);
        }
        rows.push_back(m);
    }

    PbResult result;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t bits = 0; bits < total; ++bits) {
        bool ok = true;
        for (const auto& r : rows) {
            if (!r.holds(static_cast<std::uint32_t>(bits))) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        pb::Assignment a(n + 1, 0);
        for (int i = 0; i < n; ++i) a[i + 1] = (bits >> i) & 1U;
        if (!result.satisfiable) result.assignment = a;
        result.satisfiable = true;
        if (!collect_all) break;
        result.all.push_back(std::move(a));
    }
    return result;
}

namespace {

void extend(int next, int m, Partition& current, std::vector<Partition>& out) {
    if (next == m) {
        out.push_back(current);
        return;
    }
    // By index: the recursion below may grow `current`.
    for (std::size_t b = 0; b < current.size(); ++b) {
        current[b].push_back(next);
        extend(next + 1, m, current, out);
        current[b].pop_back();
    }
    current.push_back({next});
    extend(next + 1, m, current, out);
    current.pop_back();
}

}  // namespace

std::vector<Partition> enumerate_partitions(int m) {
    if (m < 0 || m > 12) throw std::invalid_argument("partition enumeration needs 0 <= m <= 12");
    std::vector<Partition> out;
    Partition current;
    extend(0, m, current, out);
    return out;
}

std::uint64_t bell_number(int m) {
    if (m < 0 || m > 25) throw std::invalid_argument("bell_number needs 0 <= m <= 25");
    std::vector<std::uint64_t> bell{1};
    for (int n = 0; n < m; ++n) {
        std::uint64_t next = 0;
        std::uint64_t binom = 1;  // C(n, i)
        for (int i = 0; i <= n; ++i) {
            next += binom * bell[i];
            binom = binom * (n - i) / (i + 1);
        }
        bell.push_back(next);
    }
    return bell[m];
}

}  // namespace wsp::oracle
