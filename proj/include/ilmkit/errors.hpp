#ifndef ILMKIT_ERRORS_HPP
#define ILMKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ilm {

// Thrown on malformed arguments or contract violations (CLI exit code 2
// when raised while reading a config, 3 when raised while reading data).
struct input_error : std::runtime_error {
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct config_error : input_error {
    explicit config_error(const std::string& msg) : input_error(msg) {}
};

struct data_error : input_error {
    explicit data_error(const std::string& msg) : input_error(msg) {}
};

// Numerical failures: no finite initial state, degenerate pilot run, ...
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ilm

#endif
