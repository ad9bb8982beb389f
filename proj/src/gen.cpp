#include "wsp/gen.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "wsp/instance_io.hpp"
#include "wsp/random.hpp"

namespace wsp::gen {

namespace {

int to_int(std::string_view s, const char* what) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::invalid_argument(std::string("bad ") + what + " '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t end = s.find(sep, pos);
        out.push_back(s.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
        if (end == std::string_view::npos) break;
        pos = end + 1;
    }
    return out;
}

std::vector<int> parse_values(std::string_view text) {
    std::vector<int> values;
    for (std::string_view item : split(text, ',')) {
        if (auto dots = item.find(".."); dots != std::string_view::npos) {
            auto parts = std::vector<std::string_view>{};
            std::string_view rest = item;
            while ((dots = rest.find("..")) != std::string_view::npos) {
                parts.push_back(rest.substr(0, dots));
                rest = rest.substr(dots + 2);
            }
            parts.push_back(rest);
            if (parts.size() > 3) throw std::invalid_argument("bad range '" + std::string(item) + "'");
            int lo = to_int(parts[0], "range start");
            int hi = to_int(parts[1], "range end");
            int step = parts.size() == 3 ? to_int(parts[2], "range step") : 1;
            if (step <= 0 || hi < lo) throw std::invalid_argument("bad range '" + std::string(item) + "'");
            for (int v = lo; v <= hi; v += step) values.push_back(v);
        } else {
            values.push_back(to_int(item, "value"));
        }
    }
    return values;
}

StepSet draw_subset(Rng& rng, std::vector<int>& steps, int size) {
    rng.partial_shuffle(std::span<int>(steps), static_cast<std::size_t>(size));
    StepSet out;
    for (int i = 0; i < size; ++i) out.insert(StepId{steps[i]});
    return out;
}

}  // namespace

void validate(const GenParams& p) {
    if (p.k < 1 || p.k > kMaxSteps) throw std::invalid_argument("steps must lie in [1, 64]");
    if (p.n < 0) throw std::invalid_argument("users must be non-negative");
    if (p.d < 0 || p.d > 100) throw std::invalid_argument("density must lie in [0, 100]");
    if (p.b < 0) throw std::invalid_argument("counting-constraint count must be non-negative");
    if (p.b > 0) {
        if (p.t < 1 || p.t > p.k) throw std::invalid_argument("scope size t must lie in [1, k]");
        if (p.r < 1 || p.r >= p.t) throw std::invalid_argument("threshold r must lie in [1, t)");
    }
}

int not_equals_count(int k, int d) {
    const long long pairs = static_cast<long long>(k) * (k - 1) / 2;
    return static_cast<int>((pairs * d * 2 + 100) / 200);
}

WorkflowInstance generate(const GenParams& p) {
    validate(p);
    Rng rng(p.seed);
    std::vector<int> steps(p.k);

    std::vector<StepSet> auth(p.n);
    for (auto& a : auth) {
        std::iota(steps.begin(), steps.end(), 0);
        int size = static_cast<int>(rng.between(1, max_auth_size(p.k)));
        a = draw_subset(rng, steps, size);
    }

    std::vector<Constraint> constraints;
    std::vector<std::pair<int, int>> all_pairs;
    for (int s = 0; s < p.k; ++s) {
        for (int t = s + 1; t < p.k; ++t) all_pairs.emplace_back(s, t);
    }
    const int ne_count = not_equals_count(p.k, p.d);
    rng.partial_shuffle(std::span<std::pair<int, int>>(all_pairs), static_cast<std::size_t>(ne_count));
    std::vector<std::pair<int, int>> chosen(all_pairs.begin(), all_pairs.begin() + ne_count);
    std::sort(chosen.begin(), chosen.end());
    for (auto [s, t] : chosen) constraints.emplace_back(NotEquals{StepId{s}, StepId{t}});

    for (int i = 0; i < p.b; ++i) {
        std::iota(steps.begin(), steps.end(), 0);
        constraints.emplace_back(AtMost{p.r, draw_subset(rng, steps, p.t)});
    }
    for (int i = 0; i < p.b; ++i) {
        std::iota(steps.begin(), steps.end(), 0);
        constraints.emplace_back(AtLeast{p.r, draw_subset(rng, steps, p.t)});
    }
    return WorkflowInstance(p.k, std::move(auth), std::move(constraints));
}

WorkflowInstance generate_small(const SmallParams& p, std::uint64_t seed) {
    if (p.min_steps < 2 || p.max_steps < p.min_steps || p.max_steps > kMaxSteps || p.min_users < 1 ||
        p.max_users < p.min_users) {
        throw std::invalid_argument("bad small-instance ranges");
    }
    Rng rng(seed);
    while (true) {
        const int k = static_cast<int>(rng.between(p.min_steps, p.max_steps));
        const int n = static_cast<int>(rng.between(p.min_users, p.max_users));
        std::vector<StepSet> auth(n);
        for (auto& a : auth) a = StepSet(rng.next() & StepSet::first_n(k).bits());

        auto two_steps = [&] {
            int s = static_cast<int>(rng.below(k));
            int t = static_cast<int>(rng.below(k - 1));
            if (t >= s) ++t;
            return std::pair{StepId{s}, StepId{t}};
        };
        auto scope = [&] {
            StepSet q;
            while (q.size() < 2) q = StepSet(rng.next() & StepSet::first_n(k).bits());
            return q;
        };

        std::vector<Constraint> constraints;
        for (int i = static_cast<int>(rng.below(4)); i > 0; --i) {
            auto [s, t] = two_steps();
            constraints.emplace_back(NotEquals{s, t});
        }
        if (p.allow_equals) {
            for (int i = static_cast<int>(rng.below(3)); i > 0; --i) {
                auto [s, t] = two_steps();
                constraints.emplace_back(Equals{s, t});
            }
        }
        for (int i = static_cast<int>(rng.below(3)); i > 0; --i) {
            StepSet q = scope();
            constraints.emplace_back(AtMost{static_cast<int>(rng.between(1, q.size())), q});
        }
        for (int i = static_cast<int>(rng.below(3)); i > 0; --i) {
            StepSet q = scope();
            constraints.emplace_back(AtLeast{static_cast<int>(rng.between(1, q.size())), q});
        }

        WorkflowInstance inst(k, std::move(auth), std::move(constraints));
        if (p.max_pb_variables <= 0) return inst;
        // Variables of the reduction: X per authorization, Z/Y per user meeting a counting scope.
        int vars = 0;
        for (StepSet a : inst.auth_by_user()) {
            vars += a.size();
            for (const auto& c : inst.constraints()) {
                if (const auto* m = std::get_if<AtMost>(&c); m && a.intersects(m->scope)) ++vars;
                if (const auto* l = std::get_if<AtLeast>(&c); l && a.intersects(l->scope)) ++vars;
            }
        }
        if (vars <= p.max_pb_variables) return inst;
    }
}

Grid parse_grid(std::string_view text) {
    Grid grid;
    bool has_k = false, has_d = false, has_b = false;
    for (std::string_view part : split(text, ':')) {
        auto eq = part.find('=');
        if (eq == std::string_view::npos) throw std::invalid_argument("grid part '" + std::string(part) + "' lacks '='");
        std::string_view key = part.substr(0, eq);
        std::string_view value = part.substr(eq + 1);
        if (key == "k") {
            grid.k = parse_values(value), has_k = true;
        } else if (key == "d") {
            grid.d = parse_values(value), has_d = true;
        } else if (key == "b") {
            grid.b = parse_values(value), has_b = true;
        } else if (key == "r") {
            grid.r = to_int(value, "r");
        } else if (key == "t") {
            grid.t = to_int(value, "t");
        } else {
            throw std::invalid_argument("unknown grid key '" + std::string(key) + "'");
        }
    }
    if (!has_k || !has_d || !has_b) throw std::invalid_argument("grid needs k=, d= and b=");
    return grid;
}

std::vector<SuiteEntry> generate_suite(const Grid& grid, std::uint64_t seed) {
    if (grid.k.empty() || grid.d.empty() || grid.b.empty()) throw std::invalid_argument("empty grid");
    std::vector<SuiteEntry> out;
    for (int k : grid.k) {
        for (int b : grid.b) {
            for (int d : grid.d) {
                GenParams p;
                p.k = k;
                p.n = grid.users_per_step * k;
                p.d = d;
                p.b = b;
                p.r = grid.r;
                p.t = grid.t;
                std::uint64_t mix = splitmix64(seed);
                mix = splitmix64(mix ^ static_cast<std::uint64_t>(k));
                mix = splitmix64(mix ^ static_cast<std::uint64_t>(b));
                p.seed = splitmix64(mix ^ static_cast<std::uint64_t>(d));
                validate(p);
                out.push_back({std::to_string(k) + "-" + std::to_string(b) + "." + std::to_string(d), p});
            }
        }
    }
    return out;
}

std::string format_manifest(const std::vector<ManifestRow>& rows) {
    std::ostringstream out;
    out << "label,k,n,b,d,seed,path\n";
    for (const auto& row : rows) {
        const auto& p = row.params;
        out << row.label << ',' << p.k << ',' << p.n << ',' << p.b << ',' << p.d << ',' << p.seed << ',' << row.path
            << '\n';
    }
    return out.str();
}

std::vector<ManifestRow> parse_manifest(std::string_view text) {
    std::vector<ManifestRow> rows;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.starts_with("label,")) continue;
        auto f = split(line, ',');
        if (f.size() != 7) throw ParseError(line_no, "expected 7 manifest fields");
        ManifestRow row;
        row.label = std::string(f[0]);
        try {
            row.params.k = to_int(f[1], "k");
            row.params.n = to_int(f[2], "n");
            row.params.b = to_int(f[3], "b");
            row.params.d = to_int(f[4], "d");
            std::uint64_t seed = 0;
            auto [ptr, ec] = std::from_chars(f[5].data(), f[5].data() + f[5].size(), seed);
            if (ec != std::errc() || ptr != f[5].data() + f[5].size()) throw std::invalid_argument("bad seed");
            row.params.seed = seed;
        } catch (const std::invalid_argument& e) {
            throw ParseError(line_no, e.what());
        }
        row.path = std::string(f[6]);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace wsp::gen
