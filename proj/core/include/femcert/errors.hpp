#pragma once

#include <stdexcept>
#include <string>

namespace femcert {

// Invalid mesh data: parse failures, bad orientation, degenerate or
// non-manifold triangles, shape parameters outside the admissible range.
class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Linear solver or eigensolver failure (non-convergence, singular system,
// indefinite Gram matrix).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace femcert
