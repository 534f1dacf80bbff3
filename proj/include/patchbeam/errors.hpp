#ifndef PATCHBEAM_ERRORS_HPP
#define PATCHBEAM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace patchbeam {

// Bad or inconsistent run configuration (unknown key, malformed value, ...).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Geometry that cannot be meshed (degenerate spec, patch outside section,
// grading that would fold elements).
struct MeshError : std::runtime_error {
    explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

// Material field that fails the admissibility requirements (loss of symmetry
// or of uniform positivity of the quadratic form).
struct MaterialError : std::runtime_error {
    explicit MaterialError(const std::string& what) : std::runtime_error(what) {}
};

// A penalty block came out without a positive smallest eigenvalue; signals a
// truncation or mesh problem in the capacitary computation.
struct CoercivityError : std::runtime_error {
    explicit CoercivityError(const std::string& what) : std::runtime_error(what) {}
};

// Iterative or direct solve failure; carries the last residual seen so the
// harness can report it.
struct SolveError : std::runtime_error {
    SolveError(const std::string& what, double residual_, int iterations_)
        : std::runtime_error(what), residual(residual_), iterations(iterations_) {}
    double residual = 0.0;
    int iterations = 0;
};

}  // namespace patchbeam

#endif
