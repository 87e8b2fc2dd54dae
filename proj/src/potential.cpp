#include "amoebalab/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace amoebalab {

namespace {

// Cumulative trapezoid along a 1d sequence of node values with spacing h;
// out[0] = 0.
void cumtrapz(const std::vector<double>& v, double h, std::vector<double>& out) {
  out.assign(v.size(), 0.0);
  for (std::size_t i = 1; i < v.size(); ++i)
    out[i] = out[i - 1] + 0.5 * h * (v[i - 1] + v[i]);
}

}  // namespace

PotentialResult potential_from_current(const SuperCurrent11& S, const PotentialOptions& opt) {
  const Grid2& g = S.grid;
  if (opt.eps_cells < 2.0)
    throw std::invalid_argument("potential_from_current: mollifier radius must be >= 2 cells");
  const int min_cells = 2 * (static_cast<int>(opt.eps_cells) + 1);
  if (g.n1 < min_cells || g.n2 < min_cells)
    throw std::invalid_argument("potential_from_current: grid too small for the mollifier");
  if (opt.enforce_checks && !is_symmetric(S, 1e-6))
    throw std::runtime_error("potential_from_current: input current is not symmetric");

  PotentialResult res;
  const int N1 = g.n1 + 1, N2 = g.n2 + 1;
  const double h1 = g.h1(), h2 = g.h2();

  // Mollification: radial bump rho(r) ~ exp(-1/(1-r^2)), physical radius
  // eps_cells * min cell side, renormalized per node so a constant density
  // is reproduced exactly up to the box edge.
  const double L = opt.eps_cells * std::min(h1, h2);
  const int rx = static_cast<int>(std::ceil(L / h1)) + 1;
  const int ry = static_cast<int>(std::ceil(L / h2)) + 1;
  auto bump = [L](double d) {
    double r = d / L;
    if (r >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - r * r));
  };

  for (auto& d : res.densities) d = GridField(g);
  const double cell_area = g.cell_area();
  for (int j = 0; j < N2; ++j) {
    for (int i = 0; i < N1; ++i) {
      Vec2 node = g.node(i, j);
      double w = 0.0;
      double acc[4] = {0, 0, 0, 0};
      for (int cj = std::max(0, j - ry); cj <= std::min(g.n2 - 1, j + ry); ++cj) {
        for (int ci = std::max(0, i - rx); ci <= std::min(g.n1 - 1, i + rx); ++ci) {
          double k = bump(dist(node, g.cell_center(ci, cj)));
          if (k == 0.0) continue;
          int cell = g.cell_index(ci, cj);
          w += k * cell_area;
          for (int t = 0; t < 4; ++t)
            acc[t] += k * S.masses[static_cast<std::size_t>(t)][static_cast<std::size_t>(cell)];
        }
      }
      for (int t = 0; t < 4; ++t)
        res.densities[static_cast<std::size_t>(t)].at(i, j) = (w > 0) ? acc[t] / w : 0.0;
    }
  }
  {
    double tot = 0.0;
    for (int j = 0; j < N2; ++j)
      for (int i = 0; i < N1; ++i)
        tot += std::fabs(res.densities[0].at(i, j)) + std::fabs(res.densities[3].at(i, j));
    res.mollified_total = tot * cell_area;
  }

  // Nodes this close to an edge see a clipped, renormalized mollifier rather
  // than a true convolution, so derivative identities are only meaningful
  // outside that band.
  const int mclean1 = std::min(rx + 2, (N1 - 1) / 3);
  const int mclean2 = std::min(ry + 2, (N2 - 1) / 3);

  // d''-closedness of the mollified row one-forms h_j1 dx1 + h_j2 dx2,
  // measured as a cancellation ratio of the discrete curl.
  {
    double worst = 0.0, scale = 0.0;
    for (int row = 0; row < 2; ++row) {
      const GridField& a = res.densities[static_cast<std::size_t>(row * 2)];      // dx1 part
      const GridField& b = res.densities[static_cast<std::size_t>(row * 2 + 1)];  // dx2 part
      for (int j = std::max(1, mclean2); j < N2 - std::max(1, mclean2); ++j) {
        for (int i = std::max(1, mclean1); i < N1 - std::max(1, mclean1); ++i) {
          double da = (a.at(i, j + 1) - a.at(i, j - 1)) / (2 * h2);
          double db = (b.at(i + 1, j) - b.at(i - 1, j)) / (2 * h1);
          worst = std::max(worst, std::fabs(da - db));
          scale = std::max(scale, std::fabs(da) + std::fabs(db));
        }
      }
    }
    res.closedness_rel = (scale > 0) ? worst / scale : 0.0;
    if (opt.enforce_checks && res.closedness_rel > opt.closed_rel_tol)
      throw std::runtime_error(
          "potential_from_current: d''-closedness violation above tolerance (invalid "
          "input current)");
  }

  // Double path integration anchored at the center node, so paths to interior
  // targets never run along the edge bands. Leg order a: x1 along the center
  // row, then x2 up the column. Leg order b: x2 along the center column, then
  // x1 across the row.
  const int ic = g.n1 / 2, jc = g.n2 / 2;
  auto shift0 = [](std::vector<double>& v, int k) {
    double v0 = v[static_cast<std::size_t>(k)];
    for (double& x : v) x -= v0;
  };
  auto integrate = [&](bool x1_first) {
    // First primitives g_row, row = 0,1, then the second primitive from
    // (g_0, g_1) along the same path discipline.
    std::array<GridField, 3> prim;
    for (int pass = 0; pass < 3; ++pass) {
      prim[static_cast<std::size_t>(pass)] = GridField(g);
      GridField& out = prim[static_cast<std::size_t>(pass)];
      auto f1 = [&](int i, int j) {
        return pass < 2 ? res.densities[static_cast<std::size_t>(pass * 2)].at(i, j)
                        : prim[0].at(i, j);
      };
      auto f2 = [&](int i, int j) {
        return pass < 2 ? res.densities[static_cast<std::size_t>(pass * 2 + 1)].at(i, j)
                        : prim[1].at(i, j);
      };
      if (x1_first) {
        std::vector<double> mid(static_cast<std::size_t>(N1)), t1;
        for (int i = 0; i < N1; ++i) mid[static_cast<std::size_t>(i)] = f1(i, jc);
        cumtrapz(mid, h1, t1);
        shift0(t1, ic);
        for (int i = 0; i < N1; ++i) {
          std::vector<double> col(static_cast<std::size_t>(N2)), t2;
          for (int j = 0; j < N2; ++j) col[static_cast<std::size_t>(j)] = f2(i, j);
          cumtrapz(col, h2, t2);
          shift0(t2, jc);
          for (int j = 0; j < N2; ++j)
            out.at(i, j) = t1[static_cast<std::size_t>(i)] + t2[static_cast<std::size_t>(j)];
        }
      } else {
        std::vector<double> mid(static_cast<std::size_t>(N2)), t2;
        for (int j = 0; j < N2; ++j) mid[static_cast<std::size_t>(j)] = f2(ic, j);
        cumtrapz(mid, h2, t2);
        shift0(t2, jc);
        for (int j = 0; j < N2; ++j) {
          std::vector<double> row_v(static_cast<std::size_t>(N1)), t1;
          for (int i = 0; i < N1; ++i) row_v[static_cast<std::size_t>(i)] = f1(i, j);
          cumtrapz(row_v, h1, t1);
          shift0(t1, ic);
          for (int i = 0; i < N1; ++i)
            out.at(i, j) = t2[static_cast<std::size_t>(j)] + t1[static_cast<std::size_t>(i)];
        }
      }
    }
    return prim[2];
  };

  GridField Ra = integrate(true);
  GridField Rb = integrate(false);
  for (int j = std::max(1, mclean2); j < N2 - std::max(1, mclean2); ++j)
    for (int i = std::max(1, mclean1); i < N1 - std::max(1, mclean1); ++i)
      res.path_residual = std::max(res.path_residual, std::fabs(Ra.at(i, j) - Rb.at(i, j)));

  // Normalize the x1-first result: R(center) = 0, grad R(center) = 0.
  res.R = std::move(Ra);
  {
    Vec2 pc = g.node(ic, jc);
    double gx = (res.R.at(ic + 1, jc) - res.R.at(ic - 1, jc)) / (2 * h1);
    double gy = (res.R.at(ic, jc + 1) - res.R.at(ic, jc - 1)) / (2 * h2);
    double r0 = res.R.at(ic, jc);
    for (int j = 0; j < N2; ++j) {
      for (int i = 0; i < N1; ++i) {
        Vec2 p = g.node(i, j);
        res.R.at(i, j) -= r0 + gx * (p.x - pc.x) + gy * (p.y - pc.y);
      }
    }
  }

  // Reconstruction check: discrete second differences against the mollified
  // densities, relative L1 over interior nodes.
  {
    double err = 0.0, denom = 0.0;
    for (int j = std::max(1, mclean2); j < N2 - std::max(1, mclean2); ++j) {
      for (int i = std::max(1, mclean1); i < N1 - std::max(1, mclean1); ++i) {
        double d11 =
            (res.R.at(i + 1, j) - 2 * res.R.at(i, j) + res.R.at(i - 1, j)) / (h1 * h1);
        double d22 =
            (res.R.at(i, j + 1) - 2 * res.R.at(i, j) + res.R.at(i, j - 1)) / (h2 * h2);
        double d12 = (res.R.at(i + 1, j + 1) - res.R.at(i + 1, j - 1) -
                      res.R.at(i - 1, j + 1) + res.R.at(i - 1, j - 1)) /
                     (4 * h1 * h2);
        double t11 = res.densities[0].at(i, j);
        double t12 = 0.5 * (res.densities[1].at(i, j) + res.densities[2].at(i, j));
        double t22 = res.densities[3].at(i, j);
        err += std::fabs(d11 - t11) + std::fabs(d22 - t22) + 2 * std::fabs(d12 - t12);
        denom += std::fabs(t11) + std::fabs(t22) + 2 * std::fabs(t12);
      }
    }
    res.second_diff_l1 = (denom > 0) ? err / denom : 0.0;
  }

  // Midpoint convexity along grid axes and diagonals.
  {
    double worst = 0.0;
    auto margin = [&](double a, double mid, double b) {
      double m = 0.5 * (a + b) - mid;
      if (m < worst) worst = m;
    };
    for (int j = std::max(1, mclean2); j < N2 - std::max(1, mclean2); ++j) {
      for (int i = std::max(1, mclean1); i < N1 - std::max(1, mclean1); ++i) {
        margin(res.R.at(i - 1, j), res.R.at(i, j), res.R.at(i + 1, j));
        margin(res.R.at(i, j - 1), res.R.at(i, j), res.R.at(i, j + 1));
        margin(res.R.at(i - 1, j - 1), res.R.at(i, j), res.R.at(i + 1, j + 1));
        margin(res.R.at(i - 1, j + 1), res.R.at(i, j), res.R.at(i + 1, j - 1));
      }
    }
    res.convexity_gap = worst;
    if (opt.enforce_checks && worst < -opt.convexity_tol)
      throw std::runtime_error(
          "potential_from_current: negativity detected (non-convex recovery)");
  }

  return res;
}

}  // namespace amoebalab
