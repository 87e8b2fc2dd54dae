#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "amoebalab/convex.hpp"
#include "amoebalab/geometry2d.hpp"
#include "amoebalab/potential.hpp"
#include "amoebalab/superform.hpp"

namespace amoebalab {

// Genus-0 curve data: marked points p_k on the plane (infinity is implicit)
// and two logarithmic differentials w_j = sum_k a_jk dz/(z - p_k) with real
// residues a_jk. The residue of w_j at infinity is -(row sum), stored here.
struct MarkedSphere {
  std::vector<std::complex<double>> points;
  std::vector<std::vector<double>> residues;  // residues[j][k], 2 rows
  std::complex<double> base_point;
  double inf_residue[2] = {0.0, 0.0};  // -(row sums)
  bool all_zero = false;               // every residue zero (degenerate)
};

MarkedSphere build_marked_sphere(const std::vector<std::complex<double>>& points,
                                 const std::vector<std::vector<double>>& residues,
                                 std::complex<double> base_point);

// x_j = sum_k a_jk (log|z - p_k| - log|z0 - p_k|). Path independent by
// construction; throws when z is within 1e-12 of a marked point.
Vec2 log_map(const MarkedSphere& MS, std::complex<double> z);

struct RankResult {
  int rank = 0;
  int dim_L = 0;           // complex dimension of the span of phi(z)
  int dim_L_cap_conj = 0;  // dimension of the intersection with its conjugate
  std::complex<double> phi1, phi2;  // phi_j(z) = sum_k a_jk / (z - p_k)
};

// Rank of the differential of log_map at z: 2 dim L - dim(L cap conj L).
RankResult jacobian_rank(const MarkedSphere& MS, std::complex<double> z);

struct FanReport {
  std::vector<Vec2> rays;      // v_k = (-a_1k, -a_2k) per finite marked point
  Vec2 v_inf;                  // (sum_k a_1k, sum_k a_2k)
  std::vector<int> zero_rays;  // indices of zero rays (s = infinity slot)
  int dim = 0;                 // 1 if any ray is nonzero
};

FanReport asymptotic_fan(const MarkedSphere& MS);

// Dense point sample of the union of fan rays clipped to the box, for
// Hausdorff comparisons. Includes the origin; zero rays contribute nothing.
std::vector<Vec2> fan_support_sample(const FanReport& fan, const Box2& box,
                                     int per_ray = 512);

struct NondegeneracyResult {
  bool nondegenerate = false;  // some residue row is nonzero
  int fan_dim = 0;
  bool criteria_agree = false;  // row criterion vs. fan-dimension criterion
};

NondegeneracyResult nondegeneracy(const MarkedSphere& MS);

struct FanLimitEntry {
  double t = 0.0;
  double hausdorff = 0.0;
  int amoeba_points = 0;
};

struct FanLimitReport {
  std::vector<FanLimitEntry> entries;
  bool nonincreasing = true;  // within 10% slack
  double fitted_c = 0.0;      // max over t of t * d(t)
  double first_over_last = 0.0;
};

// Samples the amoeba of (1/t) omega for each t, intersects with the box and
// measures the Hausdorff distance to the fan support. Equal t values reuse
// the same substream, so repeats are bit-identical.
FanLimitReport verify_fan_limit(const MarkedSphere& MS,
                                const std::vector<double>& t_list, const Box2& box,
                                int samples, std::uint64_t seed = 1);

struct GeneralizedRaster {
  Grid2 grid;
  CellMask mask;  // dilated by one cell
  int samples = 0;
  int in_box = 0;
  double min_pole_dist = 0.0;  // over samples mapped into the box
  double max_abs_z = 0.0;      // over samples mapped into the box
};

GeneralizedRaster rasterize_generalized(const MarkedSphere& MS, const Box2& box,
                                        int n1, int n2, int samples,
                                        std::uint64_t seed = 1);

struct HessianMeasure {
  SuperCurrent11 current;
  long long samples = 0;
  std::uint64_t seed = 0;
  double delta = 0.0;           // requested excluded-disk radius
  double delta_effective = 0.0;  // smallest radius actually used
  double log_r_cut = 0.0;        // far-field cutoff, log scale
  double tail_mass = 0.0;        // trace mass sampled outside the box
  double noise_rel = 0.0;        // split-half estimate of relative MC error
  long long excluded = 0;        // samples inside excluded disks
};

// Monte-Carlo pushforward of the curve's Hessian current onto grid cells.
// Per sample, the 2x2 cell deposit is (1/2pi) [[|G1|^2, -Re(G1 conj G2)],
// [-Re(G1 conj G2), |G2|^2]] with G1, G2 built from the second and first
// residue rows; the deposit is positive semidefinite by construction.
HessianMeasure hessian_pushforward(const MarkedSphere& MS, const Box2& box, int n1,
                                   int n2, long long samples, double delta = 1e-3,
                                   std::uint64_t seed = 1);

struct GeneralizedRonkin {
  HessianMeasure hessian;
  PotentialResult potential;
  double noise_floor = 0.0;  // MC noise scale used to widen recovery checks
};

// hessian_pushforward followed by potential_from_current, with the recovery
// tolerances widened to the measured Monte-Carlo noise.
GeneralizedRonkin ronkin_generalized(const MarkedSphere& MS, const Box2& box,
                                     int n1, int n2, long long samples,
                                     double delta = 1e-3, std::uint64_t seed = 1);

struct GeneralizedOrder {
  int label = 0;
  Vec2 nu;
  double fit_residual = 0.0;  // max |R - fit| over the fitted nodes
  int cells = 0;
};

struct GeneralizedOrderResult {
  std::vector<GeneralizedOrder> orders;
  bool distinct = true;  // pairwise gaps above 0.05
};

// Least-squares affine fit of R over each component's deep cells; the slope
// is the order. Components with fewer than 6 deep cells are an error.
GeneralizedOrderResult order_map_generalized(const GridField& R,
                                             const ComponentMap& components,
                                             const CellMask& mask);

Polytope newton_polytope_generalized(const std::vector<GeneralizedOrder>& orders);

struct RecessionCheck {
  int label = 0;
  Vec2 nu;
  int classified = 0;  // 1 vertex, 2 facet interior, 3 polytope interior, 0 inconclusive
  double mismatch_deg = 0.0;
  bool pass = false;
};

struct RecessionReport {
  std::vector<RecessionCheck> checks;
  bool all_pass = true;       // over the conclusive entries
  int inconclusive = 0;
};

// For each component, compares the empirical recession cone with the normal
// cone of N at the classified location of nu(C). Pass threshold 3 degrees.
RecessionReport verify_recession_theorem(const ComponentMap& components,
                                         const Polytope& N,
                                         const std::vector<GeneralizedOrder>& orders,
                                         double pass_deg = 3.0);

struct GeneralizedMass {
  double mass = 0.0;  // area of the hull of interior finite-difference gradients
  int samples = 0;
  int outside_newton = 0;  // gradients beyond the 0.05-dilated hull(orders)
  bool flagged = false;
};

GeneralizedMass ma_total_mass_generalized(const GridField& R, const Polytope& N,
                                          int margin_nodes = 4);

}  // namespace amoebalab
