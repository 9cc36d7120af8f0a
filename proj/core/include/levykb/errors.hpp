#ifndef LEVYKB_ERRORS_HPP
#define LEVYKB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace levykb {

// Parameter outside the supported regime (e.g. stable alpha not in (1,2)).
struct regime_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Bad time grid (dt <= 0, zero steps, horizon mismatch).
struct grid_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Two paths/grids that must align do not.
struct alignment_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Second moment requested from an infinite-variance model.
struct infinite_variance_error : std::domain_error {
    using std::domain_error::domain_error;
};

// A matrix that must be invertible is singular; message names the offender.
struct singularity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// D(t)D(t)^T (or another normalizer) has an eigenvalue below the floor.
struct degeneracy_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tabulated density grid cannot resolve the requested integral.
struct resolution_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A cutoff ladder failed its convergence declaration.
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Riccati solution norm exceeded the blow-up threshold.
struct instability_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Incompatible model shapes or variant/solution mismatch.
struct model_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Duplicate competitor registration.
struct registration_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Config file violates the schema; message carries the field path.
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace levykb

#endif
