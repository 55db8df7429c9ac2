#pragma once

#include <stdexcept>

namespace ghz {

// Invalid arguments use std::invalid_argument; engine logic bugs use
// std::logic_error. The types below are the recoverable runtime failures.

class GenerationFailed : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Unreachable : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class SamplingExhausted : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class PreconditionViolation : public std::logic_error {
    using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ghz
