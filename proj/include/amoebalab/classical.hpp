#pragma once

#include <vector>

#include "amoebalab/convex.hpp"
#include "amoebalab/geometry2d.hpp"
#include "amoebalab/laurent.hpp"

namespace amoebalab {

struct AmoebaRaster {
  Grid2 grid;
  CellMask mask;            // dilated by one cell
  int fibers = 0;           // x1 sample columns
  int angles = 0;           // theta1 samples per column
  int degenerate_fibers = 0;  // fibers where F vanished identically in z2
};

// Marks the cells hit by Log of the zero set: for each fiber x1 and each
// angle theta1, the roots z2 of F(e^{x1+i theta1}, z2) mark (x1, log|z2|).
// A degenerate fiber (F identically zero there) occupies its whole column.
AmoebaRaster rasterize_amoeba(const LaurentPolynomial& F, const Box2& box, int n1,
                              int n2, int fibers, int angles);

// Mean of log|F| over the torus |z_j| = e^{x_j}, by tensor-product midpoint
// quadrature with nq nodes per axis. The dominant monomial is factored out
// before logs are taken so large |x| cannot overflow.
double ronkin_value_fixed(const LaurentPolynomial& F, const Vec2& x, int nq);

// Doubles nq until two successive values agree below tol (spectrally fast off
// the amoeba) or nq exceeds nq_max; returns the last value.
double ronkin_value(const LaurentPolynomial& F, const Vec2& x, int nq = 256,
                    double tol = 1e-8, int nq_max = 4096);

// High-accuracy evaluator: the inner z2 average is Jensen's formula on each
// fiber (exact), the outer theta1 average is an adaptively doubled midpoint
// rule. Accurate on the amoeba itself, where the tensor rule stalls.
double ronkin_value_fiber(const LaurentPolynomial& F, const Vec2& x,
                          double tol = 3e-9, int n0 = 512, int n_max = 1 << 17);

// Torus average of Re(z_j dF/dz_j / F); equals the Ronkin gradient. Jitters x
// by up to 1e-6 and retries when a quadrature node lands on a zero of F.
Vec2 ronkin_gradient(const LaurentPolynomial& F, const Vec2& x, int nq = 256,
                     double tol = 1e-9, int nq_max = 4096);

struct ComponentOrder {
  int label = 0;
  Vec2 probe;              // cell center farthest from the mask
  Vec2 raw;                // quadrature gradient at the probe
  int rounded[2] = {0, 0};
  double rounding_distance = 0.0;
  bool under_resolved = false;  // rounding distance > 0.1
};

struct OrderMapResult {
  std::vector<ComponentOrder> orders;
  bool integers_distinct = true;
  bool inside_newton_polytope = true;  // rounded orders vs. support_polytope(F)
};

OrderMapResult order_map_classical(const LaurentPolynomial& F,
                                   const AmoebaRaster& raster,
                                   const ComponentMap& components, int nq = 256);

struct MongeAmpereMass {
  double mass = 0.0;               // area of the hull of gradient samples
  int samples = 0;
  int outside_newton = 0;          // samples beyond N_F by more than `slack`
  double slack = 0.05;
  bool flagged = false;
  std::vector<Vec2> gradients;
};

// Samples grad R on an eval_n x eval_n grid over the raster box (quadrature
// gradient off the amoeba, finite differences of the fiberwise Ronkin value
// on it) and returns the area of the convex hull of the samples.
MongeAmpereMass ma_total_mass_classical(const LaurentPolynomial& F,
                                        const AmoebaRaster& raster,
                                        int eval_n = 25, int nq = 256);

}  // namespace amoebalab
