#include "wsp/instance_io.hpp"

#include <charconv>
#include <optional>
#include <sstream>
#include <vector>

namespace wsp {

namespace {

std::vector<std::string_view> split_words(std::string_view line) {
    std::vector<std::string_view> words;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) words.push_back(line.substr(i, j - i));
        i = j;
    }
    return words;
}

std::optional<int> to_int(std::string_view s) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

/// Parses `<prefix><n>` with 1 <= n <= limit into a 0-based index.
int parse_name(std::string_view word, char prefix, int limit, int line) {
    if (word.size() < 2 || word[0] != prefix) {
        throw ParseError(line, "expected " + std::string(1, prefix) + "<n>, got '" + std::string(word) + "'");
    }
    auto value = to_int(word.substr(1));
    if (!value) throw ParseError(line, "bad identifier '" + std::string(word) + "'");
    if (*value < 1 || *value > limit) {
        throw ParseError(line, "'" + std::string(word) + "' out of range (1.." + std::to_string(limit) + ")");
    }
    return *value - 1;
}

int parse_count(std::string_view word, int line) {
    auto value = to_int(word);
    if (!value || *value < 0) throw ParseError(line, "expected a non-negative count, got '" + std::string(word) + "'");
    return *value;
}

struct Lines {
    std::string_view text;
    std::size_t pos = 0;
    int number = 0;

    /// Next line with comments stripped; skips blank lines.
    std::optional<std::vector<std::string_view>> next() {
        while (pos < text.size()) {
            std::size_t end = text.find('\n', pos);
            if (end == std::string_view::npos) end = text.size();
            std::string_view line = text.substr(pos, end - pos);
            pos = end + 1;
            ++number;
            if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
            auto words = split_words(line);
            if (!words.empty()) return words;
        }
        return std::nullopt;
    }
};

std::string scope_words(StepSet scope) {
    std::string out;
    for (StepId s : scope) out += " " + step_name(s);
    return out;
}

}  // namespace

WorkflowInstance parse_instance(std::string_view text) {
    Lines lines{text};

    auto expect_header = [&](std::string_view key) {
        auto words = lines.next();
        if (!words) throw ParseError(lines.number, "unexpected end of input, expected '" + std::string(key) + "'");
        if ((*words)[0] != key || words->size() != 2) {
            throw ParseError(lines.number, "expected '" + std::string(key) + " <value>'");
        }
        return parse_count((*words)[1], lines.number);
    };

    if (expect_header("wsp") != 1) throw ParseError(lines.number, "unsupported format version");
    const int k = expect_header("steps");
    if (k < 1 || k > kMaxSteps) {
        throw ParseError(lines.number, "step count must lie in [1, " + std::to_string(kMaxSteps) + "]");
    }
    const int n = expect_header("users");

    std::vector<StepSet> auth(n);
    std::vector<bool> seen(n, false);
    std::vector<Constraint> constraints;

    while (auto words = lines.next()) {
        const int line = lines.number;
        const std::string_view key = (*words)[0];
        auto step_at = [&](std::size_t i) { return StepId{parse_name((*words)[i], 's', k, line)}; };

        if (key == "auth") {
            if (words->size() < 2 || (*words)[1].empty() || (*words)[1].back() != ':') {
                throw ParseError(line, "expected 'auth u<n>: <steps>'");
            }
            std::string_view who = (*words)[1];
            const int u = parse_name(who.substr(0, who.size() - 1), 'u', n, line);
            if (seen[u]) throw ParseError(line, "duplicate auth line for u" + std::to_string(u + 1));
            seen[u] = true;
            for (std::size_t i = 2; i < words->size(); ++i) {
                StepId s = step_at(i);
                if (auth[u].contains(s)) throw ParseError(line, "step listed twice");
                auth[u].insert(s);
            }
        } else if (key == "ne" || key == "eq") {
            if (words->size() != 3) throw ParseError(line, "expected '" + std::string(key) + " s<i> s<j>'");
            StepId a = step_at(1);
            StepId b = step_at(2);
            if (a == b) throw ParseError(line, "constraint needs two different steps");
            if (key == "ne") {
                constraints.emplace_back(NotEquals{a, b});
            } else {
                constraints.emplace_back(Equals{a, b});
            }
        } else if (key == "atmost" || key == "atleast") {
            if (words->size() < 2) throw ParseError(line, "expected '" + std::string(key) + " <r> <steps>'");
            auto r = to_int((*words)[1]);
            if (!r) throw ParseError(line, "bad threshold '" + std::string((*words)[1]) + "'");
            StepSet scope;
            for (std::size_t i = 2; i < words->size(); ++i) {
                StepId s = step_at(i);
                if (scope.contains(s)) throw ParseError(line, "step listed twice in scope");
                scope.insert(s);
            }
            if (scope.size() < 2) throw ParseError(line, "scope needs at least two steps");
            if (*r < 1 || *r > scope.size()) {
                throw ParseError(line, "threshold " + std::to_string(*r) + " outside [1, " +
                                           std::to_string(scope.size()) + "]");
            }
            if (key == "atmost") {
                constraints.emplace_back(AtMost{*r, scope});
            } else {
                constraints.emplace_back(AtLeast{*r, scope});
            }
        } else {
            throw ParseError(line, "unknown directive '" + std::string(key) + "'");
        }
    }

    return WorkflowInstance(k, std::move(auth), std::move(constraints));
}

std::string serialize_instance(const WorkflowInstance& inst) {
    std::ostringstream out;
    out << "wsp 1\n";
    out << "steps " << inst.step_count() << "\n";
    out << "users " << inst.user_count() << "\n";
    for (int u = 0; u < inst.user_count(); ++u) {
        out << "auth " << user_name(UserId{u}) << ":" << scope_words(inst.auth(UserId{u})) << "\n";
    }
    for (const auto& c : inst.constraints()) {
        if (auto* ne = std::get_if<NotEquals>(&c)) {
            out << "ne " << step_name(ne->first) << " " << step_name(ne->second) << "\n";
        } else if (auto* eq = std::get_if<Equals>(&c)) {
            out << "eq " << step_name(eq->first) << " " << step_name(eq->second) << "\n";
        } else if (auto* am = std::get_if<AtMost>(&c)) {
            out << "atmost " << am->r << scope_words(am->scope) << "\n";
        } else if (auto* al = std::get_if<AtLeast>(&c)) {
            out << "atleast " << al->r << scope_words(al->scope) << "\n";
        }
    }
    return out.str();
}

Plan parse_plan(std::string_view text, const WorkflowInstance& inst) {
    Plan plan(inst.step_count());
    Lines lines{text};
    while (auto words = lines.next()) {
        for (std::string_view word : *words) {
            auto eq = word.find('=');
            if (eq == std::string_view::npos) {
                throw ParseError(lines.number, "expected s<i>=u<j>, got '" + std::string(word) + "'");
            }
            StepId s{parse_name(word.substr(0, eq), 's', inst.step_count(), lines.number)};
            UserId u{parse_name(word.substr(eq + 1), 'u', inst.user_count(), lines.number)};
            if (plan.is_assigned(s)) throw ParseError(lines.number, step_name(s) + " assigned twice");
            plan.assign(s, u);
        }
    }
    return plan;
}

std::string format_plan(const Plan& plan) {
    std::string out;
    for (int s = 0; s < plan.step_count(); ++s) {
        if (auto u = plan.user(StepId{s})) {
            if (!out.empty()) out += ' ';
            out += step_name(StepId{s}) + "=" + user_name(*u);
        }
    }
    return out;
}

}  // namespace wsp
