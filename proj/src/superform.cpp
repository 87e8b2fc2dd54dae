#include "amoebalab/superform.hpp"

#include <cmath>
#include <stdexcept>

#include "amoebalab/util.hpp"

namespace amoebalab {

int set_cardinality(IndexSet s) { return __builtin_popcount(s); }

std::vector<int> set_indices(IndexSet s) {
  std::vector<int> out;
  for (int k = 0; s; ++k, s >>= 1)
    if (s & 1u) out.push_back(k);
  return out;
}

int insert_sign(int k, IndexSet J) {
  IndexSet bit = 1u << k;
  if (J & bit) return 0;
  // dx_k has to move past every index in J smaller than k.
  int below = __builtin_popcount(J & (bit - 1u));
  return (below % 2 == 0) ? 1 : -1;
}

int merge_sign(IndexSet A, IndexSet B) {
  if (A & B) return 0;
  int sign = 1;
  // Move elements of A into B from the largest down; each insertion is a
  // single dx moving past the smaller elements of the accumulated set.
  std::vector<int> as = set_indices(A);
  IndexSet acc = B;
  for (auto it = as.rbegin(); it != as.rend(); ++it) {
    int s = insert_sign(*it, acc);
    sign *= s;
    acc |= (1u << *it);
  }
  return sign;
}

namespace {

CoefficientField coeff_add(const CoefficientField& a, const CoefficientField& b,
                           double scale_b) {
  if (a.mode != b.mode) throw std::invalid_argument("superform: mixed coefficient modes");
  CoefficientField out = a;
  if (a.mode == CoeffMode::Exact) {
    out.poly = a.poly + b.poly * scale_b;
  } else {
    if (!a.field.grid.same_layout(b.field.grid))
      throw std::invalid_argument("superform: grid mismatch");
    for (std::size_t i = 0; i < out.field.values.size(); ++i)
      out.field.values[i] += scale_b * b.field.values[i];
  }
  return out;
}

CoefficientField coeff_scale(const CoefficientField& a, double s) {
  CoefficientField out = a;
  if (a.mode == CoeffMode::Exact) {
    out.poly = a.poly * s;
  } else {
    for (double& v : out.field.values) v *= s;
  }
  return out;
}

CoefficientField coeff_mul(const CoefficientField& a, const CoefficientField& b) {
  if (a.mode != b.mode) throw std::invalid_argument("superform: mixed coefficient modes");
  CoefficientField out = a;
  if (a.mode == CoeffMode::Exact) {
    out.poly = a.poly * b.poly;
  } else {
    if (!a.field.grid.same_layout(b.field.grid))
      throw std::invalid_argument("superform: grid mismatch");
    for (std::size_t i = 0; i < out.field.values.size(); ++i)
      out.field.values[i] *= b.field.values[i];
  }
  return out;
}

// Nodewise partial derivative along axis k, central in the interior and
// one-sided at the boundary.
GridField field_partial(const GridField& f, int k, bool& used_boundary) {
  const Grid2& g = f.grid;
  GridField out(g);
  double h = (k == 0) ? g.h1() : g.h2();
  for (int j = 0; j <= g.n2; ++j) {
    for (int i = 0; i <= g.n1; ++i) {
      int n = (k == 0) ? g.n1 : g.n2;
      int t = (k == 0) ? i : j;
      double v;
      if (t == 0) {
        v = (k == 0 ? f.at(1, j) - f.at(0, j) : f.at(i, 1) - f.at(i, 0)) / h;
        used_boundary = true;
      } else if (t == n) {
        v = (k == 0 ? f.at(n, j) - f.at(n - 1, j) : f.at(i, n) - f.at(i, n - 1)) / h;
        used_boundary = true;
      } else {
        v = (k == 0 ? f.at(t + 1, j) - f.at(t - 1, j) : f.at(i, t + 1) - f.at(i, t - 1)) /
            (2 * h);
      }
      out.at(i, j) = v;
    }
  }
  return out;
}

CoefficientField coeff_partial(const CoefficientField& c, int k, bool& used_boundary) {
  CoefficientField out = c;
  if (c.mode == CoeffMode::Exact) {
    out.poly = c.poly.partial(k);
  } else {
    if (k > 1) throw std::invalid_argument("superform: sampled mode is two-dimensional");
    out.field = field_partial(c.field, k, used_boundary);
  }
  return out;
}

bool coeff_is_zero(const CoefficientField& c, double tol) {
  if (c.mode == CoeffMode::Exact) return c.poly.max_abs_coeff() <= tol;
  for (double v : c.field.values)
    if (std::fabs(v) > tol) return false;
  return true;
}

}  // namespace

void SuperForm::add(IndexSet J, IndexSet K, CoefficientField c, double scale) {
  if (scale != 1.0) c = coeff_scale(c, scale);
  auto key = std::make_pair(J, K);
  auto it = coef.find(key);
  if (it == coef.end())
    coef.emplace(key, std::move(c));
  else
    it->second = coeff_add(it->second, c, 1.0);
}

bool SuperForm::is_zero(double tol) const {
  for (const auto& [jk, c] : coef)
    if (!coeff_is_zero(c, tol)) return false;
  return true;
}

SuperForm make_exact_form(int m, int p, int q) {
  SuperForm w;
  w.m = m;
  w.p = p;
  w.q = q;
  return w;
}

SuperForm dprime(const SuperForm& w) {
  SuperForm out = make_exact_form(w.m, w.p + 1, w.q);
  out.boundary_flagged = w.boundary_flagged;
  for (const auto& [jk, c] : w.coef) {
    auto [J, K] = jk;
    for (int k = 0; k < w.m; ++k) {
      int s = insert_sign(k, J);
      if (s == 0) continue;
      CoefficientField dc = coeff_partial(c, k, out.boundary_flagged);
      out.add(J | (1u << k), K, std::move(dc), s);
    }
  }
  return out;
}

SuperForm dsecond(const SuperForm& w) {
  SuperForm out = make_exact_form(w.m, w.p, w.q + 1);
  out.boundary_flagged = w.boundary_flagged;
  double pref = (w.p % 2 == 0) ? 1.0 : -1.0;
  for (const auto& [jk, c] : w.coef) {
    auto [J, K] = jk;
    for (int k = 0; k < w.m; ++k) {
      int s = insert_sign(k, K);
      if (s == 0) continue;
      CoefficientField dc = coeff_partial(c, k, out.boundary_flagged);
      out.add(J, K | (1u << k), std::move(dc), pref * s);
    }
  }
  return out;
}

SuperForm wedge(const SuperForm& a, const SuperForm& b) {
  if (a.m != b.m) throw std::invalid_argument("wedge: ambient dimension mismatch");
  SuperForm out = make_exact_form(a.m, a.p + b.p, a.q + b.q);
  out.boundary_flagged = a.boundary_flagged || b.boundary_flagged;
  double cross = ((a.q * b.p) % 2 == 0) ? 1.0 : -1.0;
  for (const auto& [jk1, c1] : a.coef) {
    for (const auto& [jk2, c2] : b.coef) {
      auto [J1, K1] = jk1;
      auto [J2, K2] = jk2;
      int sj = merge_sign(J1, J2);
      int sk = merge_sign(K1, K2);
      if (sj == 0 || sk == 0) continue;
      out.add(J1 | J2, K1 | K2, coeff_mul(c1, c2), cross * sj * sk);
    }
  }
  return out;
}

SuperForm involution_I(const SuperForm& w) {
  SuperForm out = make_exact_form(w.m, w.q, w.p);
  out.boundary_flagged = w.boundary_flagged;
  double s = ((w.p * w.q) % 2 == 0) ? 1.0 : -1.0;
  for (const auto& [jk, c] : w.coef) {
    auto [J, K] = jk;
    out.add(K, J, coeff_scale(c, s));
  }
  return out;
}

double tropical_integral(const SuperForm& w, const std::vector<double>& lo,
                         const std::vector<double>& hi, const VolumeConvention& conv) {
  if (w.p != w.m || w.q != w.m)
    throw std::invalid_argument("tropical_integral: bidegree must be (m,m)");
  if (conv.c <= 0) throw std::invalid_argument("tropical_integral: need c > 0");
  IndexSet full = (1u << w.m) - 1u;
  auto it = w.coef.find(std::make_pair(full, full));
  double sign = ((w.m * (w.m - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
  if (it == w.coef.end()) return 0.0;

  const CoefficientField& c = it->second;
  // Stored coefficient is f * c^2 for the density f against mu (x) mu.
  double raw;
  if (c.mode == CoeffMode::Exact) {
    raw = c.poly.integrate_box(lo, hi);
  } else {
    const Grid2& g = c.field.grid;
    if (w.m != 2) throw std::invalid_argument("tropical_integral: sampled mode is 2d");
    if (lo.size() != 2 || lo[0] != g.box.lo1 || hi[0] != g.box.hi1 || lo[1] != g.box.lo2 ||
        hi[1] != g.box.hi2)
      throw std::invalid_argument("tropical_integral: region must match the sample grid");
    raw = 0.0;
    for (int j = 0; j <= g.n2; ++j) {
      double wj = (j == 0 || j == g.n2) ? 0.5 : 1.0;
      for (int i = 0; i <= g.n1; ++i) {
        double wi = (i == 0 || i == g.n1) ? 0.5 : 1.0;
        raw += wi * wj * c.field.at(i, j);
      }
    }
    raw *= g.h1() * g.h2();
  }
  return sign * raw / conv.c;
}

double SuperCurrent11::total_abs_mass() const {
  double s = 0.0;
  for (const auto& v : masses)
    for (double x : v) s += std::fabs(x);
  return s;
}

double SuperCurrent11::max_cell_mass() const {
  double s = 0.0;
  for (const auto& v : masses)
    for (double x : v) s = std::max(s, std::fabs(x));
  return s;
}

bool is_symmetric(const SuperCurrent11& S, double tol) {
  double worst = 0.0;
  for (std::size_t c = 0; c < S.masses[0].size(); ++c)
    worst = std::max(worst, std::fabs(S.masses[1][c] - S.masses[2][c]));
  return worst <= tol * S.max_cell_mass();
}

bool is_positive(const SuperCurrent11& S, int trials, double tol, std::uint64_t seed) {
  const Grid2& g = S.grid;
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> ux(g.box.lo1, g.box.hi1);
  std::uniform_real_distribution<double> uy(g.box.lo2, g.box.hi2);
  std::uniform_real_distribution<double> uamp(-2.0, 2.0);
  double min_r = 2.0 * std::max(g.h1(), g.h2());
  double max_r = 0.5 * std::min(g.box.width1(), g.box.width2());
  std::uniform_real_distribution<double> ur(min_r, std::max(min_r * 1.5, max_r));

  double total = S.total_abs_mass();
  // Pairing sign for T[beta ^ I(beta)], assembled from the generic sign
  // rules: wedge cross sign, slotwise merge signs, integration sign, and
  // the (-1)^{(m-p)(m-p-1)/2} prefactor of the positivity pairing (here +1).
  const double cross = -1.0;                                   // (-1)^{q p'} with q=p'=1
  const double int_sign = -1.0;                                // (-1)^{m(m-1)/2}, m=2
  for (int t = 0; t < trials; ++t) {
    // beta = b1 dx1 + b2 dx2 with independent radial bump coefficients.
    struct Bump {
      Vec2 c;
      double r, a;
    };
    Bump b[2];
    for (auto& bb : b) bb = {Vec2{ux(rng), uy(rng)}, ur(rng), uamp(rng)};
    auto eval_bump = [](const Bump& bb, const Vec2& p) {
      double r = dist(p, bb.c) / bb.r;
      if (r >= 1.0) return 0.0;
      return bb.a * std::exp(-1.0 / (1.0 - r * r));
    };
    double value = 0.0;
    for (int cj = 0; cj < g.n2; ++cj) {
      for (int ci = 0; ci < g.n1; ++ci) {
        Vec2 p = g.cell_center(ci, cj);
        double bv[2] = {eval_bump(b[0], p), eval_bump(b[1], p)};
        if (bv[0] == 0.0 && bv[1] == 0.0) continue;
        int cell = g.cell_index(ci, cj);
        for (int j = 0; j < 2; ++j) {
          for (int k = 0; k < 2; ++k) {
            for (int a = 0; a < 2; ++a) {
              for (int bidx = 0; bidx < 2; ++bidx) {
                int sj = merge_sign(1u << j, 1u << a);
                int sk = merge_sign(1u << k, 1u << bidx);
                if (sj == 0 || sk == 0) continue;
                value += cross * int_sign * sj * sk * S.mass(j, k, cell) * bv[a] * bv[bidx];
              }
            }
          }
        }
      }
    }
    if (value < -tol * total) return false;
  }
  return true;
}

SuperCurrent11 current_from_hessian(const Poly& f, const Grid2& grid) {
  if (f.dim() != 2) throw std::invalid_argument("current_from_hessian: need m = 2");
  SuperCurrent11 S(grid);
  Poly H[2][2];
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) H[j][k] = f.partial(j).partial(k);
  double area = grid.cell_area();
  for (int cj = 0; cj < grid.n2; ++cj) {
    for (int ci = 0; ci < grid.n1; ++ci) {
      Vec2 p = grid.cell_center(ci, cj);
      int cell = grid.cell_index(ci, cj);
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) S.mass(j, k, cell) = H[j][k].eval({p.x, p.y}) * area;
    }
  }
  return S;
}

}  // namespace amoebalab
