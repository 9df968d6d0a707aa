#pragma once

#include <stdexcept>
#include <string>

namespace pbda {

// Bad inputs or configuration. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failure while processing inputs that passed validation (solver divergence,
// broken files, I/O). The CLI maps this to exit code 2.
class PipelineError : public std::runtime_error {
public:
    explicit PipelineError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pbda
