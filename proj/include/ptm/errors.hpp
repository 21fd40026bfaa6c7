#pragma once

#include <stdexcept>
#include <string>

namespace ptm {

// Error categories. The CLI maps each to a distinct exit code
// (config -> 2, io/parse -> 3, contract -> 4).

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data: bad magic numbers, truncated payloads, count mismatches.
class ParseError : public IoError {
public:
    explicit ParseError(const std::string& msg) : IoError(msg) {}
};

// A caller broke an API precondition.
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

} // namespace ptm
