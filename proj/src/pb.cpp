#include "wsp/pb.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <sstream>

#include "wsp/instance_io.hpp"

namespace wsp::pb {

namespace {

int parse_int(std::string_view s, int line) {
    int value = 0;
    const char* begin = s.data();
    if (!s.empty() && s[0] == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || begin == s.data() + s.size()) {
        throw ParseError(line, "expected an integer, got '" + std::string(s) + "'");
    }
    return value;
}

int parse_named(std::string_view s, char prefix, int line) {
    if (s.size() < 2 || s[0] != prefix) {
        throw ParseError(line, "expected " + std::string(1, prefix) + "<n>, got '" + std::string(s) + "'");
    }
    int v = parse_int(s.substr(1), line);
    if (v < 1) throw ParseError(line, "index must be positive in '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> words_of(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        out.push_back(text.substr(pos, end - pos));
        pos = end + 1;
    }
    return out;
}

const char* relation_text(Relation r) {
    switch (r) {
        case Relation::eq: return "=";
        case Relation::ge: return ">=";
        case Relation::le: return "<=";
    }
    return "?";
}

bool row_holds(const Row& row, const Assignment& values) {
    int lhs = 0;
    for (const Term& t : row.terms) lhs += t.coefficient * values[t.var];
    switch (row.relation) {
        case Relation::eq: return lhs == row.bound;
        case Relation::ge: return lhs >= row.bound;
        case Relation::le: return lhs <= row.bound;
    }
    return false;
}

}  // namespace

bool Model::trivially_unsat() const {
    for (const Row& r : rows) {
        if (r.origin == Origin::pb1 && r.terms.empty()) return true;
    }
    return false;
}

Model encode(const WorkflowInstance& inst) {
    auto cs = inst.constraints();
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (std::holds_alternative<Equals>(cs[i])) {
            throw UnsupportedConstraint(i, "equals constraint " + describe(cs[i]) + " (constraint " +
                                               std::to_string(i + 1) + ") has no pseudo-Boolean encoding");
        }
    }

    Model model;
    model.step_count = inst.step_count();
    const int k = inst.step_count();
    const int n = inst.user_count();

    auto add = [&](Variable v) {
        v.index = static_cast<int>(model.variables.size()) + 1;
        model.variables.push_back(v);
        return v.index;
    };

    // X: step-major, users ascending.
    std::vector<std::vector<int>> x_var(n, std::vector<int>(k, 0));
    for (int s = 0; s < k; ++s) {
        for (UserId u : inst.users_for(StepId{s})) {
            x_var[u.index][s] = add({0, VarKind::x, u, StepId{s}, 0});
        }
    }
    // Z then Y: constraint-major, users ascending.
    std::map<std::pair<std::size_t, int>, int> zy_var;
    for (VarKind kind : {VarKind::z, VarKind::y}) {
        for (std::size_t c = 0; c < cs.size(); ++c) {
            StepSet scope;
            if (kind == VarKind::z) {
                if (auto* al = std::get_if<AtLeast>(&cs[c])) scope = al->scope;
            } else if (auto* am = std::get_if<AtMost>(&cs[c])) {
                scope = am->scope;
            }
            if (scope.empty()) continue;
            for (int u = 0; u < n; ++u) {
                if (inst.auth(UserId{u}).intersects(scope)) {
                    zy_var[{c, u}] = add({0, kind, UserId{u}, StepId{}, c});
                }
            }
        }
    }

    // PB1
    for (int s = 0; s < k; ++s) {
        Row row{{}, Relation::eq, 1, Origin::pb1};
        for (UserId u : inst.users_for(StepId{s})) row.terms.push_back({1, x_var[u.index][s]});
        if (row.terms.empty()) {
            model.warnings.push_back(step_name(StepId{s}) + " has no authorized user; the model is trivially unsatisfiable");
        }
        model.rows.push_back(std::move(row));
    }
    // PB2
    for (const Constraint& c : cs) {
        auto* ne = std::get_if<NotEquals>(&c);
        if (!ne) continue;
        for (UserId u : inst.users_for(ne->first)) {
            if (!inst.is_authorized(u, ne->second)) continue;
            model.rows.push_back({{{1, x_var[u.index][ne->first.index]}, {1, x_var[u.index][ne->second.index]}},
                                  Relation::le,
                                  1,
                                  Origin::pb2});
        }
    }
    // PB3, PB4
    std::vector<Row> pb4;
    for (std::size_t c = 0; c < cs.size(); ++c) {
        auto* al = std::get_if<AtLeast>(&cs[c]);
        if (!al) continue;
        Row total{{}, Relation::ge, al->r, Origin::pb4};
        for (int u = 0; u < n; ++u) {
            auto it = zy_var.find({c, u});
            if (it == zy_var.end()) continue;
            Row row{{{1, it->second}}, Relation::le, 0, Origin::pb3};
            for (StepId s : inst.auth(UserId{u}) & al->scope) row.terms.push_back({-1, x_var[u][s.index]});
            model.rows.push_back(std::move(row));
            total.terms.push_back({1, it->second});
        }
        pb4.push_back(std::move(total));
    }
    model.rows.insert(model.rows.end(), pb4.begin(), pb4.end());
    // PB5, PB6
    std::vector<Row> pb6;
    for (std::size_t c = 0; c < cs.size(); ++c) {
        auto* am = std::get_if<AtMost>(&cs[c]);
        if (!am) continue;
        Row total{{}, Relation::le, am->r, Origin::pb6};
        for (StepId s : am->scope) {
            for (UserId u : inst.users_for(s)) {
                model.rows.push_back(
                    {{{1, x_var[u.index][s.index]}, {-1, zy_var.at({c, u.index})}}, Relation::le, 0, Origin::pb5});
            }
        }
        for (int u = 0; u < n; ++u) {
            if (auto it = zy_var.find({c, u}); it != zy_var.end()) total.terms.push_back({1, it->second});
        }
        pb6.push_back(std::move(total));
    }
    model.rows.insert(model.rows.end(), pb6.begin(), pb6.end());
    return model;
}

OpbFiles emit_opb(const Model& model) {
    OpbFiles out;
    std::ostringstream opb;
    opb << "* #variable= " << model.variables.size() << " #constraint= " << model.rows.size() << "\n";
    std::optional<Origin> group;
    for (const Row& row : model.rows) {
        if (row.origin != group) {
            group = row.origin;
            opb << "* PB" << static_cast<int>(row.origin) << "\n";
        }
        for (const Term& t : row.terms) opb << (t.coefficient >= 0 ? "+" : "") << t.coefficient << " x" << t.var << " ";
        opb << relation_text(row.relation) << " " << row.bound << " ;\n";
    }
    out.opb = opb.str();

    std::ostringstream map;
    for (const Variable& v : model.variables) {
        map << "x" << v.index << " = ";
        switch (v.kind) {
            case VarKind::x: map << "X " << user_name(v.user) << " " << step_name(v.step); break;
            case VarKind::z: map << "Z " << user_name(v.user) << " c" << v.constraint + 1; break;
            case VarKind::y: map << "Y " << user_name(v.user) << " c" << v.constraint + 1; break;
        }
        map << "\n";
    }
    out.map = map.str();
    return out;
}

Model parse_opb(std::string_view opb, std::string_view map) {
    Model model;
    int line_no = 0;
    for (std::string_view line : lines_of(map)) {
        ++line_no;
        auto w = words_of(line);
        if (w.empty()) continue;
        if (w.size() != 5 || w[1] != "=") throw ParseError(line_no, "expected 'x<i> = <kind> u<j> <target>'");
        Variable v;
        v.index = parse_named(w[0], 'x', line_no);
        if (v.index != static_cast<int>(model.variables.size()) + 1) throw ParseError(line_no, "variables out of order");
        v.user = UserId{parse_named(w[3], 'u', line_no) - 1};
        if (w[2] == "X") {
            v.kind = VarKind::x;
            v.step = StepId{parse_named(w[4], 's', line_no) - 1};
        } else if (w[2] == "Z" || w[2] == "Y") {
            v.kind = w[2] == "Z" ? VarKind::z : VarKind::y;
            v.constraint = static_cast<std::size_t>(parse_named(w[4], 'c', line_no) - 1);
        } else {
            throw ParseError(line_no, "unknown variable kind '" + std::string(w[2]) + "'");
        }
        model.variables.push_back(v);
    }

    line_no = 0;
    std::optional<std::pair<int, int>> header;
    Origin origin = Origin::pb1;
    for (std::string_view line : lines_of(opb)) {
        ++line_no;
        auto w = words_of(line);
        if (w.empty()) continue;
        if (w[0] == "*" || w[0].front() == '*') {
            if (w.size() == 5 && w[1] == "#variable=" && w[3] == "#constraint=") {
                header = {parse_int(w[2], line_no), parse_int(w[4], line_no)};
            } else if (w.size() == 2 && w[1].starts_with("PB")) {
                int g = parse_int(w[1].substr(2), line_no);
                if (g < 1 || g > 6) throw ParseError(line_no, "unknown row group");
                origin = static_cast<Origin>(g);
            }
            continue;
        }
        if (w.size() < 3 || w.back() != ";") throw ParseError(line_no, "row must end with ';'");
        Row row;
        row.origin = origin;
        std::size_t i = 0;
        for (; i + 1 < w.size() && w[i] != "=" && w[i] != ">=" && w[i] != "<="; i += 2) {
            int coef = parse_int(w[i], line_no);
            if (coef != 1 && coef != -1) throw ParseError(line_no, "only unit coefficients are supported");
            int var = parse_named(w[i + 1], 'x', line_no);
            if (var > static_cast<int>(model.variables.size())) throw ParseError(line_no, "unknown variable");
            row.terms.push_back({coef, var});
        }
        if (i + 3 != w.size()) throw ParseError(line_no, "malformed row");
        row.relation = w[i] == "=" ? Relation::eq : (w[i] == ">=" ? Relation::ge : Relation::le);
        row.bound = parse_int(w[i + 1], line_no);
        model.rows.push_back(std::move(row));
    }
    if (!header) throw ParseError(1, "missing '* #variable= N #constraint= M' header");
    if (header->first != static_cast<int>(model.variables.size()) ||
        header->second != static_cast<int>(model.rows.size())) {
        throw ParseError(1, "header counts do not match the file");
    }
    model.step_count = static_cast<int>(
        std::count_if(model.rows.begin(), model.rows.end(), [](const Row& r) { return r.origin == Origin::pb1; }));
    return model;
}

Assignment parse_assignment(std::string_view text, const Model& model) {
    Assignment values(model.variables.size() + 1, 0);
    int line_no = 0;
    for (std::string_view line : lines_of(text)) {
        ++line_no;
        for (std::string_view w : words_of(line)) {
            if (w == "v") continue;
            bool negative = w.front() == '-';
            if (negative) w.remove_prefix(1);
            int var = 0;
            try {
                var = parse_named(w, 'x', line_no);
            } catch (const ParseError& e) {
                throw MalformedAssignment(e.what());
            }
            if (var > static_cast<int>(model.variables.size())) {
                throw MalformedAssignment("literal x" + std::to_string(var) + " names an unknown variable");
            }
            values[var] = negative ? 0 : 1;
        }
    }
    return values;
}

std::string format_assignment(const Assignment& values) {
    std::string out;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (i > 1) out += ' ';
        out += (values[i] ? "x" : "-x") + std::to_string(i);
    }
    return out;
}

bool satisfies(const Model& model, const Assignment& values) {
    if (values.size() != model.variables.size() + 1) return false;
    return std::all_of(model.rows.begin(), model.rows.end(), [&](const Row& r) { return row_holds(r, values); });
}

Plan decode_solution(const Model& model, const Assignment& values) {
    if (values.size() != model.variables.size() + 1) {
        throw MalformedAssignment("assignment does not cover the model's variables");
    }
    Plan plan(model.step_count);
    int step = 0;
    for (const Row& row : model.rows) {
        if (row.origin != Origin::pb1) continue;
        int chosen = 0;
        int count = 0;
        for (const Term& t : row.terms) {
            if (values[t.var]) {
                chosen = t.var;
                ++count;
            }
        }
        if (count != 1) {
            throw MalformedAssignment(step_name(StepId{step}) + " has " + std::to_string(count) +
                                      " assigned users, expected exactly one");
        }
        const Variable& v = model.variables[chosen - 1];
        plan.assign(v.step, v.user);
        ++step;
    }
    return plan;
}

Assignment plan_to_assignment(const Model& model, const Plan& plan) {
    Assignment values(model.variables.size() + 1, 0);
    for (const Variable& v : model.variables) {
        if (v.kind == VarKind::x && plan.user(v.step) == v.user) values[v.index] = 1;
    }
    for (const Row& row : model.rows) {
        if (row.origin == Origin::pb3) {
            // z - sum x <= 0: z is 1 iff some x on the row is 1
            int z = row.terms.front().var;
            for (std::size_t i = 1; i < row.terms.size(); ++i) {
                if (values[row.terms[i].var]) values[z] = 1;
            }
        } else if (row.origin == Origin::pb5) {
            // x - y <= 0
            if (values[row.terms[0].var]) values[row.terms[1].var] = 1;
        }
    }
    if (!satisfies(model, values)) throw std::logic_error("plan does not map to a satisfying assignment");
    return values;
}

}  // namespace wsp::pb
