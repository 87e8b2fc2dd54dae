#pragma once

#include <complex>
#include <string>
#include <vector>

#include "amoebalab/superform.hpp"

namespace amoebalab {

// Residual of one correspondence identity between the tropical calculus and
// the complex side, evaluated at a torus point z in (C*)^m. Supported tags:
// "dprime", "dsecond", "involution", "homomorphism", "integral". The
// homomorphism check wedges psi with phi (psi itself when phi is null); the
// integral check compares the two sides over the unit box centered at Log z.
double theta_residual(const SuperForm& psi, const std::vector<std::complex<double>>& z,
                      const std::string& which, const SuperForm* phi = nullptr);

}  // namespace amoebalab
