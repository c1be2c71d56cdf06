#pragma once

#include <stdexcept>
#include <string>

namespace fnmnet {

// Malformed or inconsistent input: bad JSON, syntax errors, category
// violations, references to undeclared places or constants.
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A configured cap was exceeded. Messages always name the cap so callers can
// tell which knob to raise.
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An operation was called outside its documented precondition (for example
// firing a disabled transition, or translating a net that is not statically
// reduced).
struct precondition_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Syntax error with source position, thrown by the .fnm parser.
struct parse_error : input_error {
    parse_error(const std::string& msg, int line, int col)
        : input_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          line(line),
          col(col) {}
    int line;
    int col;
};

}  // namespace fnmnet
