#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wsp/model.hpp"

namespace wsp::gen {

struct GenParams {
    int k = 15;          // steps
    int n = 150;         // users
    int d = 10;          // not-equals density, percent of C(k,2)
    int b = 0;           // at-most constraints, and as many at-least constraints
    int r = 3;           // counting threshold
    int t = 5;           // counting scope size
    std::uint64_t seed = 0;
};

/// Throws std::invalid_argument unless 1 <= t <= k, 1 <= r < t, 0 <= d <= 100, b >= 0.
void validate(const GenParams& p);

/// round-half-up(d/100 * C(k,2))
int not_equals_count(int k, int d);

/// Largest authorization list a generated user may get: ceil(k/2).
constexpr int max_auth_size(int k) { return (k + 1) / 2; }

/// Draw order from one seeded generator: each user's |A(u)| uniform in
/// [1, ceil(k/2)] then a uniform subset of that size; the not-equals pairs;
/// the b at-most scopes; the b at-least scopes. Scopes are independent
/// uniform t-subsets. Constraints are stored not-equals first (sorted),
/// then at-most, then at-least.
WorkflowInstance generate(const GenParams& p);

/// Tiny random instances for differential testing against the oracles.
struct SmallParams {
    int min_steps = 2, max_steps = 5;
    int min_users = 2, max_users = 8;
    bool allow_equals = true;
    /// Redraw until the PB reduction has at most this many variables (0: no limit).
    int max_pb_variables = 0;
};

/// Each step goes to each user with probability 1/2; a handful of
/// constraints of every kind with random scopes and thresholds.
WorkflowInstance generate_small(const SmallParams& p, std::uint64_t seed);

struct Grid {
    std::vector<int> k;
    std::vector<int> d;
    std::vector<int> b;
    int r = 3;
    int t = 5;
    int users_per_step = 10;
};

/// Parses `k=15:d=10,20,30:b=2..32..2`. Values are comma lists or
/// `lo..hi[..step]` ranges; every key is required.
Grid parse_grid(std::string_view text);

struct SuiteEntry {
    std::string label;  // "k-b.d", e.g. "20-12.30"
    GenParams params;
};

/// One entry per (k, b, d), in that nesting order, with n = 10k and a seed
/// derived from `seed` and the triple.
std::vector<SuiteEntry> generate_suite(const Grid& grid, std::uint64_t seed);

struct ManifestRow {
    std::string label;
    GenParams params;
    std::string path;
};

/// CSV `label,k,n,b,d,seed,path` with a header line.
std::string format_manifest(const std::vector<ManifestRow>& rows);
std::vector<ManifestRow> parse_manifest(std::string_view text);

}  // namespace wsp::gen
