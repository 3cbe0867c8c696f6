#pragma once

#include <stdexcept>
#include <string>

namespace walloid {

// Bad arguments: unknown vertex ids, malformed structures, role mismatches.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A size precondition is not met. The message names the required bound so
// callers (and the CLI, via exit code 3) can distinguish "input too small
// for the guarantee" from a plain input error.
struct RefusalError : std::runtime_error {
    explicit RefusalError(const std::string& what) : std::runtime_error(what) {}
};

// An internal invariant failed. Indicates a bug, not a user mistake.
struct IntegrityError : std::runtime_error {
    explicit IntegrityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace walloid
