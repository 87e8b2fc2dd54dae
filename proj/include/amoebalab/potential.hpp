#pragma once

#include "amoebalab/superform.hpp"

namespace amoebalab {

struct PotentialOptions {
  double eps_cells = 3.0;        // mollifier radius in grid cells (>= 2)
  double closed_rel_tol = 1e-6;  // discrete-curl cancellation bound
  double convexity_tol = 1e-9;   // allowed midpoint-convexity violation
  bool enforce_checks = true;    // throw on closedness/convexity failure
};

struct PotentialResult {
  GridField R;                  // recovered potential on grid nodes
  double path_residual = 0.0;   // max |R_x1-first - R_x2-first| over nodes
  double closedness_rel = 0.0;  // relative curl of the mollified row one-forms
  double second_diff_l1 = 0.0;  // relative L1 error of mixed second differences
  double convexity_gap = 0.0;   // most negative midpoint-convexity margin (>= 0 good)
  double mollified_total = 0.0;

  // Mollified densities h_jk at nodes (index j*2+k), for diagnostics.
  std::array<GridField, 4> densities;
};

// Recovers a convex potential R with d'd"R equal to the input current, up to
// an affine function. Input masses are mollified by a compactly supported
// radial bump (radius eps_cells), first primitives g_j and the second
// primitive R are accumulated along axis-ordered paths from the grid corner
// (x1 leg first, then x2), and the result is normalized to R(center) = 0,
// grad R(center) = 0. The opposite path order is also computed and the
// worst nodewise difference reported as path_residual.
PotentialResult potential_from_current(const SuperCurrent11& S,
                                       const PotentialOptions& opt = PotentialOptions{});

}  // namespace amoebalab
