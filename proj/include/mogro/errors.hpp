#pragma once

#include <stdexcept>
#include <string>

namespace mogro {

// Caller handed us something that violates an operation's contract
// (bad dimensions, NaN entries, non-symmetric matrix, ...).
struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Configuration-level problem: a parameter combination that can never work.
struct invalid_config : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Right-hand side lies outside the column space of a singular system.
struct inconsistent_system : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tabular ingestion errors.
struct schema_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct rank_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mogro
