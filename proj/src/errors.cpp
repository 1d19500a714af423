#include "fracheat/errors.hpp"

namespace fracheat {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::invalid_input: return "invalid_input";
        case ErrorKind::domain: return "domain";
        case ErrorKind::symmetry: return "symmetry";
        case ErrorKind::degenerate_input: return "degenerate_input";
        case ErrorKind::convergence: return "convergence";
        case ErrorKind::decay_mismatch: return "decay_mismatch";
        case ErrorKind::invalid_angle: return "invalid_angle";
        case ErrorKind::precondition: return "precondition";
        case ErrorKind::resolution: return "resolution";
        case ErrorKind::construction_failed: return "construction_failed";
        case ErrorKind::config: return "config";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

}  // namespace fracheat
