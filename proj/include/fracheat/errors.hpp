#pragma once

#include <stdexcept>
#include <string>

namespace fracheat {

enum class ErrorKind {
    invalid_input,
    domain,
    symmetry,
    degenerate_input,
    convergence,
    decay_mismatch,
    invalid_angle,
    precondition,
    resolution,
    construction_failed,
    config,
    io,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace fracheat
