#pragma once

#include <stdexcept>
#include <string>

namespace nlps {

// Invalid user-supplied configuration or parameters (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values encountered while building an initial condition.
class InitError : public std::runtime_error {
public:
    explicit InitError(const std::string& msg) : std::runtime_error(msg) {}
};

// The explicit scheme produced a non-finite cell (CLI exit code 2).
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(long step, int cell_i, int cell_j, double suggested_dt,
                const std::string& msg)
        : std::runtime_error(msg),
          step(step),
          cell_i(cell_i),
          cell_j(cell_j),
          suggested_dt(suggested_dt) {}

    long step;
    int cell_i;
    int cell_j;
    double suggested_dt;
};

// Malformed snapshot bytes (CLI exit code 3).
class FormatError : public std::runtime_error {
public:
    FormatError(std::size_t byte_offset, const std::string& msg)
        : std::runtime_error(msg), byte_offset(byte_offset) {}

    std::size_t byte_offset;
};

// Filesystem failures (CLI exit code 3).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace nlps
