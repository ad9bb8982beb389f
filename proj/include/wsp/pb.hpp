#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wsp/model.hpp"

namespace wsp::pb {

/// X{u,s}: u performs s. Z{u,c}: u performs a step of at-least c.
/// Y{u,c}: u performs a step of at-most c.
enum class VarKind { x, z, y };

struct Variable {
    int index = 0;  // 1-based
    VarKind kind = VarKind::x;
    UserId user;
    StepId step;                 // X only
    std::size_t constraint = 0;  // Z/Y only; index into the instance's constraints
    friend bool operator==(const Variable&, const Variable&) = default;
};

enum class Relation { eq, ge, le };

/// Which family of the reduction a row belongs to.
enum class Origin { pb1 = 1, pb2, pb3, pb4, pb5, pb6 };

struct Term {
    int coefficient = 1;  // +1 or -1
    int var = 0;          // 1-based
    friend bool operator==(const Term&, const Term&) = default;
};

struct Row {
    std::vector<Term> terms;
    Relation relation = Relation::eq;
    int bound = 0;
    Origin origin = Origin::pb1;
    friend bool operator==(const Row&, const Row&) = default;
};

struct Model {
    int step_count = 0;
    std::vector<Variable> variables;  // variables[i].index == i + 1
    /// PB1 rows come first, one per step in step order.
    std::vector<Row> rows;
    std::vector<std::string> warnings;

    /// Some step has no authorized user, so its PB1 row reads 0 = 1.
    bool trivially_unsat() const;

    friend bool operator==(const Model& a, const Model& b) {
        return a.step_count == b.step_count && a.variables == b.variables && a.rows == b.rows;
    }
};

/// 0/1 value per variable; slot 0 is unused so values[i] belongs to x<i>.
using Assignment = std::vector<std::uint8_t>;

class UnsupportedConstraint : public std::runtime_error {
public:
    UnsupportedConstraint(std::size_t index, const std::string& what) : std::runtime_error(what), index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

class MalformedAssignment : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Builds the reduction. Equals constraints are rejected. Z and Y variables
/// exist only for users authorized for some step of the constraint.
Model encode(const WorkflowInstance& inst);

struct OpbFiles {
    std::string opb;
    std::string map;
};

/// OPB text (`* #variable= N #constraint= M` header, `* PBi` group
/// comments, one `;`-terminated row per line) and the variable map
/// (`x3 = X u2 s1`).
OpbFiles emit_opb(const Model& model);

/// Reads what emit_opb() writes. Throws wsp::ParseError.
Model parse_opb(std::string_view opb, std::string_view map);

/// Whitespace-separated literals `x3 -x4 ...`, optionally prefixed by `v`.
/// Unlisted variables are 0.
Assignment parse_assignment(std::string_view text, const Model& model);
std::string format_assignment(const Assignment& values);

bool satisfies(const Model& model, const Assignment& values);

/// Each step goes to the unique user whose X variable is 1. Throws
/// MalformedAssignment when a PB1 row does not hold.
Plan decode_solution(const Model& model, const Assignment& values);

/// Forward direction of the reduction for a valid complete plan. Throws
/// std::logic_error if the result does not satisfy the model.
Assignment plan_to_assignment(const Model& model, const Plan& plan);

}  // namespace wsp::pb
