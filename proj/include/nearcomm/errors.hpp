#pragma once

#include <stdexcept>
#include <string>

namespace nearcomm {

// Base type for every failure the library reports.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Violated operation contract (bad inputs, out-of-range parameters).
class PreconditionViolation : public Error {
public:
    using Error::Error;
};

// Iterative solver gave up; carries the final off-diagonal norm.
class ConvergenceFailure : public Error {
public:
    ConvergenceFailure(const std::string& msg, double off_norm)
        : Error(msg), off_diagonal_norm(off_norm) {}
    double off_diagonal_norm;
};

// Block index sets that fail to partition {0,...,M-1}.
class InvalidPartition : public Error {
public:
    using Error::Error;
};

// Malformed input files (JSON / CSV); message carries file and field info.
class ParseError : public Error {
public:
    using Error::Error;
};

// Global tolerance scale, settable once from the CLI via --tol.
double tolerance_scale();
void set_tolerance_scale(double s);

// Default tolerances (already multiplied by the global scale).
double herm_tol(int dim);        // Hermiticity slack on ingestion
double proj_tol(int dim);        // idempotency slack for projections
double degeneracy_tol(double op_norm);  // eigenvalue grouping width

}  // namespace nearcomm
