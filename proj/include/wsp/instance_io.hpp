#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "wsp/model.hpp"

namespace wsp {

/// Syntax or semantic error in a text input, with its 1-based line.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

/// Reads the `wsp 1` instance format:
///
///     wsp 1
///     steps 4
///     users 6
///     auth u1: s1
///     ne s2 s3
///     atmost 3 s1 s2 s3 s4 s5
///
/// `#` starts a comment. Users without an `auth` line are authorized for nothing.
WorkflowInstance parse_instance(std::string_view text);

/// Canonical text: header, one `auth` line per user in order, then the
/// constraints in stored order with ascending scopes.
std::string serialize_instance(const WorkflowInstance& inst);

/// Reads `s1=u2 s2=u2 ...` (whitespace separated, `#` comments allowed).
Plan parse_plan(std::string_view text, const WorkflowInstance& inst);

/// Writes the assigned steps as `s1=u2 s2=u2 ...`.
std::string format_plan(const Plan& plan);

}  // namespace wsp
