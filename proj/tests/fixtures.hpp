#pragma once

#include <string>
#include <vector>

#include "wsp/instance_io.hpp"
#include "wsp/model.hpp"

namespace wsp::testing {

inline constexpr const char* kInstance1 = R"(wsp 1
steps 4
users 6
auth u1: s1
auth u2: s1 s2 s3 s4
auth u3: s2
auth u4: s3 s4
auth u5: s3 s4
auth u6: s3 s4
eq s1 s2
ne s2 s3
ne s3 s4
ne s1 s4
)";

inline WorkflowInstance instance1() { return parse_instance(kInstance1); }

/// 1-based user numbers per step, 0 for unassigned.
inline Plan plan_of(std::vector<int> users) {
    Plan p(static_cast<int>(users.size()));
    for (int s = 0; s < static_cast<int>(users.size()); ++s) {
        if (users[s] > 0) p.assign(StepId{s}, UserId{users[s] - 1});
    }
    return p;
}

inline StepSet steps_of(std::initializer_list<int> one_based) {
    StepSet q;
    for (int s : one_based) q.insert(StepId{s - 1});
    return q;
}

}  // namespace wsp::testing
