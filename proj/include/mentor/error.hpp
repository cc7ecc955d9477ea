#pragma once

#include <stdexcept>
#include <string>

namespace mentor {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad parameters, empty inputs, mismatched robot/genome shapes.
struct ConfigError : Error {
    using Error::Error;
};

struct ShapeError : Error {
    using Error::Error;
};

struct InvalidGenome : Error {
    using Error::Error;
};

struct InvalidScenario : Error {
    using Error::Error;
};

// Malformed text input; the message names the offending line or key.
struct ParseError : Error {
    using Error::Error;
};

}  // namespace mentor
