#pragma once

#include <complex>
#include <vector>

namespace amoebalab {

struct RootResult {
  std::vector<std::complex<double>> roots;
  bool converged = false;
  int iterations = 0;
};

// All complex roots of c[0] + c[1] w + ... + c[d] w^d by Aberth-Ehrlich
// simultaneous iteration. The caller is responsible for stripping leading
// zero coefficients; c must have degree >= 1 with c.back() != 0.
RootResult aberth_roots(const std::vector<std::complex<double>>& c, double tol = 1e-12,
                        int max_iter = 200);

}  // namespace amoebalab
