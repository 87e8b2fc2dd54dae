#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "amoebalab/geometry2d.hpp"
#include "amoebalab/poly.hpp"

namespace amoebalab {

// Strictly increasing index subsets of {0,..,m-1} encoded as bitmasks.
using IndexSet = std::uint32_t;

// Sign of dx_k ^ dx_J brought to increasing order; 0 if k is already in J.
int insert_sign(int k, IndexSet J);
// Sign of dx_A ^ dx_B brought to increasing order; 0 when A and B overlap.
int merge_sign(IndexSet A, IndexSet B);
int set_cardinality(IndexSet s);
std::vector<int> set_indices(IndexSet s);

enum class CoeffMode { Exact, Sampled };

// Coefficient of one (J,K) basis pair: either an exact polynomial in x or a
// node-sampled field on a 2d grid.
struct CoefficientField {
  CoeffMode mode = CoeffMode::Exact;
  Poly poly;
  GridField field;

  static CoefficientField exact(Poly p) {
    CoefficientField c;
    c.poly = std::move(p);
    return c;
  }
  static CoefficientField sampled(GridField f) {
    CoefficientField c;
    c.mode = CoeffMode::Sampled;
    c.field = std::move(f);
    return c;
  }
};

// Bidegree (p,q) superform: sum over ordered index pairs (J,K) of
// f_JK dx_J (x) dx_K. Missing pairs are zero.
struct SuperForm {
  int m = 2;
  int p = 0, q = 0;
  std::map<std::pair<IndexSet, IndexSet>, CoefficientField> coef;
  bool boundary_flagged = false;  // sampled-mode derivatives used one-sided stencils

  void add(IndexSet J, IndexSet K, CoefficientField c, double scale = 1.0);
  bool is_zero(double tol = 0.0) const;
};

SuperForm make_exact_form(int m, int p, int q);

SuperForm dprime(const SuperForm& w);
SuperForm dsecond(const SuperForm& w);
SuperForm wedge(const SuperForm& a, const SuperForm& b);
SuperForm involution_I(const SuperForm& w);

struct VolumeConvention {
  double c = 1.0;  // volume form mu = c dx
};

// Integral of a bidegree (m,m) form over a box, with the orientation sign
// (-1)^{m(m-1)/2}. Exact coefficients integrate in closed form; sampled
// coefficients by tensor trapezoid.
double tropical_integral(const SuperForm& w, const std::vector<double>& lo,
                         const std::vector<double>& hi,
                         const VolumeConvention& conv = VolumeConvention{});

// Discrete (1,1)-supercurrent on a grid: per-cell masses mu_jk, row-major.
struct SuperCurrent11 {
  Grid2 grid;
  std::array<std::vector<double>, 4> masses;  // index j*2+k

  SuperCurrent11() = default;
  explicit SuperCurrent11(const Grid2& g) : grid(g) {
    for (auto& v : masses) v.assign(static_cast<std::size_t>(g.cell_count()), 0.0);
  }
  double& mass(int j, int k, int cell) {
    return masses[static_cast<std::size_t>(j * 2 + k)][static_cast<std::size_t>(cell)];
  }
  double mass(int j, int k, int cell) const {
    return masses[static_cast<std::size_t>(j * 2 + k)][static_cast<std::size_t>(cell)];
  }
  double total_abs_mass() const;
  double max_cell_mass() const;
};

bool is_symmetric(const SuperCurrent11& S, double tol);

// Pairing of S against trials random compactly supported test forms of
// bidegree (1,0); true iff every value >= -tol * total |mass|.
bool is_positive(const SuperCurrent11& S, int trials, double tol, std::uint64_t seed = 12345);

// Cell masses of d'd"f for an exact polynomial f (Hessian sampled at cell
// centers times cell area).
SuperCurrent11 current_from_hessian(const Poly& f, const Grid2& grid);

}  // namespace amoebalab
