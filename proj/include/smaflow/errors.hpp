#pragma once

#include <stdexcept>
#include <string>

namespace smaflow {

// Bad user input: mesh sizes, material constants, config files.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A linear or nonlinear solve did not reach its tolerance.
struct SolverError : std::runtime_error {
    double residual;
    int iterations;

    SolverError(const std::string& msg, double res, int iters)
        : std::runtime_error(msg), residual(res), iterations(iters) {}
};

}  // namespace smaflow
