#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <limits>
#include <iostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "amoebalab/classical.hpp"
#include "amoebalab/generalized.hpp"
#include "amoebalab/report.hpp"
#include "amoebalab/superform.hpp"
#include "amoebalab/theta.hpp"
#include "amoebalab/util.hpp"

namespace {

using namespace amoebalab;
using cd = std::complex<double>;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t next = s.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(s.substr(pos));
      break;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

double parse_real(const std::string& t) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse number '" + t + "'");
  }
  if (used != t.size()) throw ConfigError("trailing junk in number '" + t + "'");
  return v;
}

// Accepts "1.5", "-2e-3", "1+2i", "-i", "0.5i".
cd parse_complex(std::string t) {
  t.erase(std::remove(t.begin(), t.end(), ' '), t.end());
  if (t.empty()) throw ConfigError("empty complex number");
  if (t.back() != 'i' && t.back() != 'I') return cd(parse_real(t), 0.0);
  t.pop_back();
  std::size_t cut = std::string::npos;
  for (std::size_t k = t.size(); k-- > 1;) {
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      cut = k;
      break;
    }
  }
  auto imag_of = [](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return parse_real(s);
  };
  if (cut == std::string::npos) return cd(0.0, imag_of(t));
  return cd(parse_real(t.substr(0, cut)), imag_of(t.substr(cut)));
}

std::vector<cd> parse_points(const std::string& s) {
  std::vector<cd> out;
  for (const std::string& t : split(s, ',')) out.push_back(parse_complex(t));
  return out;
}

std::vector<std::vector<double>> parse_matrix(const std::string& s) {
  std::vector<std::vector<double>> rows;
  for (const std::string& r : split(s, ';')) {
    std::vector<double> row;
    for (const std::string& t : split(r, ',')) row.push_back(parse_real(t));
    rows.push_back(row);
  }
  return rows;
}

Box2 parse_box(const std::string& s) {
  const std::vector<std::string> parts = split(s, ',');
  if (parts.size() != 4) throw ConfigError("--box expects lo1,hi1,lo2,hi2");
  try {
    return Box2(parse_real(parts[0]), parse_real(parts[1]), parse_real(parts[2]),
                parse_real(parts[3]));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid box: ") + e.what());
  }
}

std::vector<double> parse_reals(const std::string& s) {
  std::vector<double> out;
  for (const std::string& t : split(s, ',')) out.push_back(parse_real(t));
  return out;
}

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
};

struct CheckSet {
  std::vector<Check> checks;

  void add(const std::string& name, bool pass, double value, double tol) {
    checks.push_back({name, pass, value, tol});
  }
  bool all_pass() const {
    for (const Check& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
  const Check* first_fail() const {
    for (const Check& c : checks) {
      if (!c.pass) return &c;
    }
    return nullptr;
  }
  ordered_json to_json() const {
    ordered_json arr = ordered_json::array();
    for (const Check& c : checks) {
      ordered_json e;
      e["name"] = c.name;
      e["pass"] = c.pass;
      e["value"] = c.value;
      e["tolerance"] = c.tolerance;
      arr.push_back(e);
    }
    return arr;
  }
  void print() const {
    for (const Check& c : checks) {
      std::cout << "check " << c.name << ": " << (c.pass ? "pass" : "FAIL")
                << " (value=" << c.value << ", tol=" << c.tolerance << ")\n";
    }
  }
};

void write_report(const std::string& path, const ordered_json& j) {
  if (path.empty()) return;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open report path " + path);
  f << j.dump(2) << "\n";
}

int finish(const std::string& report_path, ordered_json& doc, const CheckSet& checks) {
  doc["checks"] = checks.to_json();
  doc["all_pass"] = checks.all_pass();
  write_report(report_path, doc);
  checks.print();
  if (const Check* f = checks.first_fail()) {
    std::cerr << "numerical failure: check '" << f->name << "' failed (value="
              << f->value << ", tol=" << f->tolerance << ")\n";
    return 3;
  }
  std::cout << "all checks passed\n";
  return 0;
}

double bilinear(const GridField& f, const Vec2& p) {
  const Grid2& g = f.grid;
  double u = (p.x - g.box.lo1) / g.h1();
  double v = (p.y - g.box.lo2) / g.h2();
  int i = std::clamp(static_cast<int>(std::floor(u)), 0, g.n1 - 1);
  int j = std::clamp(static_cast<int>(std::floor(v)), 0, g.n2 - 1);
  const double fu = std::clamp(u - i, 0.0, 1.0), fv = std::clamp(v - j, 0.0, 1.0);
  return (1 - fu) * (1 - fv) * f.at(i, j) + fu * (1 - fv) * f.at(i + 1, j) +
         (1 - fu) * fv * f.at(i, j + 1) + fu * fv * f.at(i + 1, j + 1);
}

// Angular gate for the grid-based recession cone estimator: a ray can wander
// by a few cells over the arm length available in the box before it is killed.
double recession_tol_deg(const Box2& box, int grid) {
  const double hmax = std::max(box.hi1 - box.lo1, box.hi2 - box.lo2) / grid;
  const double diam = std::hypot(box.hi1 - box.lo1, box.hi2 - box.lo2);
  const double est = std::atan2(7.0 * hmax, 0.25 * diam) * 180.0 / 3.14159265358979323846;
  return std::max(3.0, est);
}

double worst_mismatch_deg(const RecessionReport& rec) {
  double worst = 0.0;
  for (const RecessionCheck& c : rec.checks)
    if (c.classified != 0) worst = std::max(worst, c.mismatch_deg);
  return worst;
}

// Affine least squares v ~ c0 + c1 x + c2 y; returns {c0,c1,c2}.
std::array<double, 3> fit_affine(const std::vector<Vec2>& pts,
                                 const std::vector<double>& vals) {
  double mx = 0.0, my = 0.0, mv = 0.0;
  const double n = static_cast<double>(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    mx += pts[k].x;
    my += pts[k].y;
    mv += vals[k];
  }
  mx /= n;
  my /= n;
  mv /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0, sxv = 0.0, syv = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double dx = pts[k].x - mx, dy = pts[k].y - my, dv = vals[k] - mv;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
    sxv += dx * dv;
    syv += dy * dv;
  }
  const double det = sxx * syy - sxy * sxy;
  double c1 = 0.0, c2 = 0.0;
  if (std::abs(det) > 1e-14 * std::max(1.0, sxx * syy)) {
    c1 = (syy * sxv - sxy * syv) / det;
    c2 = (sxx * syv - sxy * sxv) / det;
  } else {
    if (sxx > 0) c1 = sxv / sxx;
    if (syy > 0) c2 = syv / syy;
  }
  return {mv - c1 * mx - c2 * my, c1, c2};
}

// Picks up to want cells of the component, pairwise at least min_sep cells
// apart, preferring cells far from the mask.
// Farthest-point sampling over the deep interior of a component. Plain
// depth-greedy picks can land on one straight line, which ruins affine fits.
std::vector<int> spread_cells(const ComponentMap& comps, int label,
                              const std::vector<double>& dist, int want, int min_sep) {
  std::vector<int> cells = comps.cells_of(label);
  if (cells.empty()) return cells;
  std::sort(cells.begin(), cells.end(), [&](int a, int b) {
    if (dist[static_cast<std::size_t>(a)] != dist[static_cast<std::size_t>(b)])
      return dist[static_cast<std::size_t>(a)] > dist[static_cast<std::size_t>(b)];
    return a < b;
  });
  const double dmax = dist[static_cast<std::size_t>(cells.front())];
  std::size_t keep = cells.size();
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (dist[static_cast<std::size_t>(cells[k])] < 0.4 * dmax) {
      keep = k;
      break;
    }
  }
  keep = std::max(std::min<std::size_t>(cells.size(), 32), keep);
  cells.resize(keep);

  const int n1 = comps.grid.n1;
  auto cheb = [&](int a, int b) {
    return std::max(std::abs(a % n1 - b % n1), std::abs(a / n1 - b / n1));
  };
  std::vector<int> picked{cells.front()};
  while (static_cast<int>(picked.size()) < want) {
    int best = -1, bestd = -1;
    for (int c : cells) {
      int dmin = std::numeric_limits<int>::max();
      for (int p : picked) dmin = std::min(dmin, cheb(c, p));
      if (dmin > bestd) {
        bestd = dmin;
        best = c;
      }
    }
    if (best < 0 || bestd < min_sep) break;
    picked.push_back(best);
  }
  return picked;
}

long long lattice_point_count(const Polytope& N) {
  if (N.vertices.empty()) return 0;
  double lo1 = 1e308, hi1 = -1e308, lo2 = 1e308, hi2 = -1e308;
  for (const Vec2& v : N.vertices) {
    lo1 = std::min(lo1, v.x);
    hi1 = std::max(hi1, v.x);
    lo2 = std::min(lo2, v.y);
    hi2 = std::max(hi2, v.y);
  }
  long long count = 0;
  for (long long a = std::llround(std::ceil(lo1 - 0.5)); a <= std::llround(std::floor(hi1 + 0.5)); ++a) {
    for (long long b = std::llround(std::ceil(lo2 - 0.5)); b <= std::llround(std::floor(hi2 + 0.5)); ++b) {
      if (N.contains(Vec2(static_cast<double>(a), static_cast<double>(b)), 1e-9)) ++count;
    }
  }
  return count;
}

// ---------------------------------------------------------------------------
// classical

struct ClassicalConfig {
  std::string poly;
  std::string box = "-6,6,-6,6";
  int grid = 300;
  int fibers = 0;  // 0: 2*grid
  int angles = 64;
  int nq = 256;
  int eval_n = 25;
  int convexity_triples = 40;
  std::uint64_t seed = 1;
  std::string emit, report, csv;
  int csv_nodes = 41;
};

int run_classical(const ClassicalConfig& cfg) {
  if (cfg.grid < 16) throw ConfigError("--grid must be >= 16");
  const Box2 box = parse_box(cfg.box);
  LaurentPolynomial F(2);
  try {
    F = parse_laurent(cfg.poly, 2);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad --poly: ") + e.what());
  }
  const int fibers = cfg.fibers > 0 ? cfg.fibers : 2 * cfg.grid;

  ordered_json doc;
  doc["schema"] = kSchemaVersion;
  doc["version"] = kToolVersion;
  doc["timestamp"] = iso_timestamp();
  doc["mode"] = "classical";
  doc["seed"] = cfg.seed;
  ordered_json jcfg;
  jcfg["poly"] = cfg.poly;
  jcfg["box"] = json_of(box);
  jcfg["grid"] = cfg.grid;
  jcfg["fibers"] = fibers;
  jcfg["angles"] = cfg.angles;
  jcfg["nq"] = cfg.nq;
  jcfg["eval_n"] = cfg.eval_n;
  jcfg["convexity_triples"] = cfg.convexity_triples;
  doc["config"] = jcfg;

  const AmoebaRaster raster = rasterize_amoeba(F, box, cfg.grid, cfg.grid, fibers, cfg.angles);
  const ComponentMap comps = flood_components(raster.mask);
  const OrderMapResult orders = order_map_classical(F, raster, comps, cfg.nq);
  const Polytope N = support_polytope(F);
  const MongeAmpereMass ma = ma_total_mass_classical(F, raster, cfg.eval_n, cfg.nq);

  doc["components"] = comps.n_components;
  doc["degenerate_fibers"] = raster.degenerate_fibers;
  doc["orders"] = json_of(orders);
  doc["newton_polytope"] = json_of(N);
  doc["lattice_points"] = lattice_point_count(N);
  doc["monge_ampere"] = json_of(ma);

  CheckSet checks;
  checks.add("components_at_least_vertices",
             comps.n_components >= static_cast<int>(N.vertices.size()),
             comps.n_components, static_cast<double>(N.vertices.size()));
  checks.add("components_at_most_lattice_points",
             comps.n_components <= lattice_point_count(N),
             comps.n_components, static_cast<double>(lattice_point_count(N)));
  checks.add("orders_distinct", orders.integers_distinct, orders.integers_distinct, 1);
  checks.add("orders_inside_newton", orders.inside_newton_polytope,
             orders.inside_newton_polytope, 1);
  double worst_round = 0.0;
  for (const ComponentOrder& o : orders.orders)
    worst_round = std::max(worst_round, o.rounding_distance);
  checks.add("order_rounding", worst_round <= 0.1, worst_round, 0.1);

  // Recession cones against the normal cones at the rounded orders. The
  // estimator's angular resolution is limited by the cell size relative to the
  // arm length available inside the box, so the gate widens on coarse grids.
  std::vector<GeneralizedOrder> as_orders;
  for (const ComponentOrder& o : orders.orders) {
    GeneralizedOrder g;
    g.label = o.label;
    g.nu = Vec2(o.rounded[0], o.rounded[1]);
    as_orders.push_back(g);
  }
  const double rec_tol = recession_tol_deg(box, cfg.grid);
  const RecessionReport rec = verify_recession_theorem(comps, N, as_orders, rec_tol);
  doc["recession"] = json_of(rec);
  checks.add("recession_matches_normal_cones", rec.all_pass && rec.inconclusive == 0,
             worst_mismatch_deg(rec), rec_tol);

  // Affine behaviour on each complement component: residual of an affine fit
  // at five spread probes and slope agreement with the quadrature gradient.
  {
    const std::vector<double> dist = distance_to_occupied(raster.mask);
    double worst_res = 0.0, worst_slope = 0.0;
    for (const ComponentOrder& o : orders.orders) {
      const std::vector<int> cells = spread_cells(comps, o.label, dist, 5, 3);
      if (cells.size() < 3) continue;
      std::vector<Vec2> pts;
      std::vector<double> vals;
      for (int c : cells) {
        const Vec2 p = raster.grid.cell_center(c % raster.grid.n1, c / raster.grid.n1);
        pts.push_back(p);
        vals.push_back(ronkin_value_fiber(F, p, 1e-9, 512, 1 << 15));
      }
      const std::array<double, 3> fit = fit_affine(pts, vals);
      for (std::size_t k = 0; k < pts.size(); ++k) {
        const double r = std::abs(vals[k] - (fit[0] + fit[1] * pts[k].x + fit[2] * pts[k].y));
        worst_res = std::max(worst_res, r);
      }
      worst_slope = std::max(worst_slope, std::max(std::abs(fit[1] - o.raw.x),
                                                   std::abs(fit[2] - o.raw.y)));
    }
    checks.add("affine_fit_residual", worst_res <= 1e-6, worst_res, 1e-6);
    checks.add("affine_slope_vs_gradient", worst_slope <= 1e-4, worst_slope, 1e-4);
  }

  // Midpoint-style convexity on random segments.
  {
    std::mt19937_64 rng = make_rng(cfg.seed, 99);
    std::uniform_real_distribution<double> ux(box.lo1 * 0.9, box.hi1 * 0.9);
    std::uniform_real_distribution<double> uy(box.lo2 * 0.9, box.hi2 * 0.9);
    std::uniform_real_distribution<double> ul(0.2, 0.8);
    double worst = -1e308;
    for (int t = 0; t < cfg.convexity_triples; ++t) {
      const Vec2 a(ux(rng), uy(rng)), b(ux(rng), uy(rng));
      const double lam = ul(rng);
      const Vec2 m = a * lam + b * (1.0 - lam);
      const double Ra = ronkin_value_fiber(F, a), Rb = ronkin_value_fiber(F, b);
      const double Rm = ronkin_value_fiber(F, m);
      worst = std::max(worst, Rm - lam * Ra - (1.0 - lam) * Rb);
    }
    checks.add("convexity_violation", worst <= 1e-7, worst, 1e-7);
  }

  checks.add("ma_mass_vs_newton_area", std::abs(ma.mass - N.area()) <= 0.05,
             ma.mass, 0.05);
  checks.add("ma_gradients_inside_newton", !ma.flagged,
             static_cast<double>(ma.outside_newton), ma.slack);

  if (!cfg.emit.empty()) write_ppm(cfg.emit, comps);
  if (!cfg.csv.empty()) {
    Grid2 coarse(box, cfg.csv_nodes - 1, cfg.csv_nodes - 1);
    GridField R(coarse);
    parallel_for(static_cast<std::size_t>(coarse.node_count()), [&](std::size_t idx) {
      const int i = static_cast<int>(idx) % (coarse.n1 + 1);
      const int j = static_cast<int>(idx) / (coarse.n1 + 1);
      R.values[idx] = ronkin_value_fiber(F, coarse.node(i, j), 1e-7, 512, 1 << 14);
    });
    write_csv_field(cfg.csv, R);
  }
  return finish(cfg.report, doc, checks);
}

// ---------------------------------------------------------------------------
// generalized

struct GeneralizedConfig {
  std::string points, residues, base = "auto";
  std::string box = "-6,6,-6,6";
  int grid = 200;
  double samples = 2e6;
  double delta = 1e-3;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string compare_classical;
  std::string emit, report, csv;
};

MarkedSphere sphere_from(const GeneralizedConfig& cfg) {
  const std::vector<cd> points = parse_points(cfg.points);
  const std::vector<std::vector<double>> residues = parse_matrix(cfg.residues);
  cd base;
  if (cfg.base == "auto") {
    const cd candidates[] = {cd(-1.0, 0.0), cd(0.5, 0.8660254037844386),
                             cd(1.7, -0.3), cd(2.9, 1.3), cd(-2.3, -1.9)};
    bool found = false;
    for (const cd& c : candidates) {
      bool ok = true;
      for (const cd& p : points) ok = ok && std::abs(c - p) > 1e-6;
      if (ok) {
        base = c;
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError("--base auto found no point off the marked set");
  } else {
    base = parse_complex(cfg.base);
  }
  try {
    return build_marked_sphere(points, residues, base);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad marked sphere: ") + e.what());
  }
}

int run_generalized(const GeneralizedConfig& cfg) {
  if (cfg.grid < 16) throw ConfigError("--grid must be >= 16");
  if (!cfg.seed_set) throw ConfigError("--seed is required for stochastic modes");
  const Box2 box = parse_box(cfg.box);
  const MarkedSphere MS = sphere_from(cfg);
  const long long samples = static_cast<long long>(cfg.samples);

  ordered_json doc;
  doc["schema"] = kSchemaVersion;
  doc["version"] = kToolVersion;
  doc["timestamp"] = iso_timestamp();
  doc["mode"] = "generalized";
  doc["seed"] = cfg.seed;
  ordered_json jcfg;
  jcfg["points"] = cfg.points;
  jcfg["residues"] = cfg.residues;
  jcfg["base"] = ordered_json{MS.base_point.real(), MS.base_point.imag()};
  jcfg["box"] = json_of(box);
  jcfg["grid"] = cfg.grid;
  jcfg["samples"] = samples;
  jcfg["delta"] = cfg.delta;
  doc["config"] = jcfg;

  const FanReport fan = asymptotic_fan(MS);
  const NondegeneracyResult nd = nondegeneracy(MS);
  doc["fan"] = json_of(fan);
  doc["nondegeneracy"] =
      ordered_json{{"nondegenerate", nd.nondegenerate}, {"fan_dim", nd.fan_dim},
                   {"criteria_agree", nd.criteria_agree}};

  const int raster_samples = static_cast<int>(std::min<long long>(samples, 400000));
  const GeneralizedRaster raster =
      rasterize_generalized(MS, box, cfg.grid, cfg.grid, raster_samples, cfg.seed);
  const ComponentMap comps = flood_components(raster.mask);
  ordered_json jraster;
  jraster["samples"] = raster.samples;
  jraster["in_box"] = raster.in_box;
  jraster["min_pole_dist"] = raster.min_pole_dist;
  jraster["max_abs_z"] = raster.max_abs_z;
  doc["raster"] = jraster;
  doc["components"] = comps.n_components;

  const GeneralizedRonkin gr =
      ronkin_generalized(MS, box, cfg.grid, cfg.grid, samples, cfg.delta, cfg.seed);
  doc["hessian"] = json_of(gr.hessian);
  doc["potential"] = json_of(gr.potential);
  doc["noise_floor"] = gr.noise_floor;

  const GeneralizedOrderResult orders =
      order_map_generalized(gr.potential.R, comps, raster.mask);
  const Polytope N = newton_polytope_generalized(orders.orders);
  const double rec_tol = recession_tol_deg(box, cfg.grid);
  const RecessionReport rec = verify_recession_theorem(comps, N, orders.orders, rec_tol);
  const GeneralizedMass ma = ma_total_mass_generalized(gr.potential.R, N, 6);
  doc["orders"] = json_of(orders);
  doc["newton_polytope"] = json_of(N);
  doc["recession"] = json_of(rec);
  doc["monge_ampere"] = json_of(ma);

  CheckSet checks;
  checks.add("nondegeneracy_criteria_agree", nd.criteria_agree, nd.fan_dim, 1);
  checks.add("hessian_symmetric", is_symmetric(gr.hessian.current, 1e-2), 0.0, 1e-2);
  checks.add("hessian_positive", is_positive(gr.hessian.current, 64, 1e-9, cfg.seed),
             0.0, 1e-9);
  const double path_tol =
      std::max(1e-9, 0.02 * gr.potential.mollified_total);
  checks.add("potential_path_residual", gr.potential.path_residual <= path_tol,
             gr.potential.path_residual, path_tol);
  checks.add("orders_distinct", orders.distinct, orders.distinct, 1);
  checks.add("recession_matches_normal_cones", rec.all_pass,
             worst_mismatch_deg(rec), rec_tol);
  // The hull-of-gradients mass estimate carries Monte-Carlo spread on top of
  // the polytope area; the containment count tolerates the same noise.
  const double ma_tol = std::max(0.15, 0.3 * N.area());
  checks.add("ma_mass_vs_newton_area", std::abs(ma.mass - N.area()) <= ma_tol,
             ma.mass, ma_tol);
  checks.add("gradients_inside_newton", !ma.flagged,
             ma.samples > 0
                 ? static_cast<double>(ma.outside_newton) / ma.samples
                 : 0.0,
             0.05);

  if (!cfg.compare_classical.empty()) {
    LaurentPolynomial F = parse_laurent(cfg.compare_classical, 2);
    const AmoebaRaster craster =
        rasterize_amoeba(F, box, cfg.grid, cfg.grid, 2 * cfg.grid, 64);
    const ComponentMap ccomps = flood_components(craster.mask);
    const OrderMapResult corders = order_map_classical(F, craster, ccomps, 256);
    ordered_json agree;

    // Mask agreement in cell units.
    std::vector<Vec2> pa, pb;
    const Grid2& g = raster.grid;
    for (int c = 0; c < g.cell_count(); ++c) {
      if (raster.mask.occupied[static_cast<std::size_t>(c)])
        pa.push_back(g.cell_center(c % g.n1, c / g.n1));
      if (craster.mask.occupied[static_cast<std::size_t>(c)])
        pb.push_back(g.cell_center(c % g.n1, c / g.n1));
    }
    auto decimate = [](std::vector<Vec2>& v) {
      if (v.size() <= 15000) return;
      std::vector<Vec2> thin;
      const std::size_t stride = v.size() / 15000 + 1;
      for (std::size_t i = 0; i < v.size(); i += stride) thin.push_back(v[i]);
      v.swap(thin);
    };
    decimate(pa);
    decimate(pb);
    const double mask_cells =
        hausdorff_distance(pa, pb) / std::max(g.h1(), g.h2());
    agree["mask_hausdorff_cells"] = mask_cells;
    checks.add("agreement_mask_hausdorff", mask_cells <= 2.0, mask_cells, 2.0);

    // Ronkin fields up to an affine gauge on a probe lattice.
    std::vector<Vec2> probes;
    std::vector<double> diffs;
    for (int a = 0; a < 5; ++a) {
      for (int b = 0; b < 5; ++b) {
        const Vec2 p(box.lo1 + (box.hi1 - box.lo1) * (0.1 + 0.2 * a),
                     box.lo2 + (box.hi2 - box.lo2) * (0.1 + 0.2 * b));
        probes.push_back(p);
        diffs.push_back(ronkin_value_fiber(F, p, 1e-8) - bilinear(gr.potential.R, p));
      }
    }
    const std::array<double, 3> gfit = fit_affine(probes, diffs);
    double worst_probe = 0.0;
    for (std::size_t k = 0; k < probes.size(); ++k) {
      const double r = std::abs(diffs[k] - (gfit[0] + gfit[1] * probes[k].x +
                                            gfit[2] * probes[k].y));
      worst_probe = std::max(worst_probe, r);
    }
    agree["ronkin_affine_gauge_dev"] = worst_probe;
    checks.add("agreement_ronkin_affine", worst_probe <= 5e-2, worst_probe, 5e-2);

    // Orders after removing the constant gauge shift.
    const std::vector<double> gdist = distance_to_occupied(raster.mask);
    std::vector<Vec2> matched_cl, matched_gen;
    bool match_ok = true;
    for (const GeneralizedOrder& o : orders.orders) {
      int best = -1;
      double bd = -1.0;
      for (int c : comps.cells_of(o.label)) {
        if (gdist[static_cast<std::size_t>(c)] > bd) {
          bd = gdist[static_cast<std::size_t>(c)];
          best = c;
        }
      }
      const Vec2 probe = g.cell_center(best % g.n1, best / g.n1);
      const int ccell = craster.grid.locate_cell(probe);
      const int clabel =
          ccell < 0 ? 0 : ccomps.label_at(ccell % craster.grid.n1, ccell / craster.grid.n1);
      if (clabel <= 0) {
        match_ok = false;
        continue;
      }
      for (const ComponentOrder& co : corders.orders) {
        if (co.label == clabel) {
          matched_cl.push_back(Vec2(co.rounded[0], co.rounded[1]));
          matched_gen.push_back(o.nu);
        }
      }
    }
    double worst_order = match_ok ? 0.0 : 1e308;
    if (!matched_cl.empty()) {
      Vec2 shift(0.0, 0.0);
      for (std::size_t k = 0; k < matched_cl.size(); ++k)
        shift = shift + (matched_cl[k] - matched_gen[k]);
      shift = shift / static_cast<double>(matched_cl.size());
      for (std::size_t k = 0; k < matched_cl.size(); ++k) {
        const Vec2 d = matched_gen[k] + shift - matched_cl[k];
        worst_order = std::max(worst_order, std::max(std::abs(d.x), std::abs(d.y)));
      }
    }
    agree["order_gauge_dev"] = worst_order;
    checks.add("agreement_orders", worst_order <= 0.05, worst_order, 0.05);

    const MongeAmpereMass cma = ma_total_mass_classical(F, craster, 25, 256);
    agree["classical_ma_mass"] = cma.mass;
    checks.add("agreement_ma_mass", std::abs(cma.mass - ma.mass) <= 0.05,
               std::abs(cma.mass - ma.mass), 0.05);
    doc["agreement"] = agree;
  }

  if (!cfg.emit.empty()) write_ppm(cfg.emit, comps);
  if (!cfg.csv.empty()) write_csv_field(cfg.csv, gr.potential.R);
  return finish(cfg.report, doc, checks);
}

// ---------------------------------------------------------------------------
// fan-limit

struct FanLimitConfig {
  std::string points, residues, base = "auto";
  std::string box = "-6,6,-6,6";
  std::string t = "1,2,4,8";
  double samples = 200000;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string report;
};

int run_fan_limit(const FanLimitConfig& cfg) {
  if (!cfg.seed_set) throw ConfigError("--seed is required for stochastic modes");
  const Box2 box = parse_box(cfg.box);
  GeneralizedConfig tmp;
  tmp.points = cfg.points;
  tmp.residues = cfg.residues;
  tmp.base = cfg.base;
  const MarkedSphere MS = sphere_from(tmp);
  const std::vector<double> ts = parse_reals(cfg.t);

  ordered_json doc;
  doc["schema"] = kSchemaVersion;
  doc["version"] = kToolVersion;
  doc["timestamp"] = iso_timestamp();
  doc["mode"] = "fan-limit";
  doc["seed"] = cfg.seed;
  ordered_json jcfg;
  jcfg["points"] = cfg.points;
  jcfg["residues"] = cfg.residues;
  jcfg["box"] = json_of(box);
  jcfg["t"] = ts;
  jcfg["samples"] = cfg.samples;
  doc["config"] = jcfg;

  const FanLimitReport rep = verify_fan_limit(
      MS, ts, box, static_cast<int>(cfg.samples), cfg.seed);
  doc["fan"] = json_of(asymptotic_fan(MS));
  doc["fan_limit"] = json_of(rep);

  CheckSet checks;
  checks.add("distances_nonincreasing", rep.nonincreasing, rep.nonincreasing, 0.1);
  if (ts.back() > ts.front()) {
    const double want = ts.back() / (3.0 * ts.front());
    checks.add("distance_ratio", rep.first_over_last > want, rep.first_over_last, want);
  }
  return finish(cfg.report, doc, checks);
}

// ---------------------------------------------------------------------------
// superform-check

struct SuperformConfig {
  int forms = 100;
  int theta_forms = 50;
  int theta_points = 20;
  int max_degree = 3;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string report;
};

SuperForm random_form(int m, int p, int q, int maxdeg, std::mt19937_64& rng) {
  SuperForm w = make_exact_form(m, p, q);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<IndexSet> psets, qsets;
  for (IndexSet s = 0; s < (1u << m); ++s) {
    if (set_cardinality(s) == p) psets.push_back(s);
    if (set_cardinality(s) == q) qsets.push_back(s);
  }
  bool any = false;
  for (IndexSet J : psets) {
    for (IndexSet K : qsets) {
      if (uni(rng) < 0.65) {
        w.add(J, K, CoefficientField::exact(Poly::random(m, maxdeg, rng)));
        any = true;
      }
    }
  }
  if (!any) w.add(psets[0], qsets[0], CoefficientField::exact(Poly::random(m, maxdeg, rng)));
  return w;
}

double form_scale(const SuperForm& w) {
  double s = 0.0;
  for (const auto& [key, c] : w.coef) {
    (void)key;
    s = std::max(s, c.poly.max_abs_coeff());
  }
  return s;
}

// max coefficient of a + sign*b over all basis pairs
double form_comb_max(const SuperForm& a, const SuperForm& b, double sign) {
  double worst = 0.0;
  for (const auto& [key, c] : a.coef) {
    Poly diff = c.poly;
    auto it = b.coef.find(key);
    if (it != b.coef.end()) diff = diff + it->second.poly * sign;
    worst = std::max(worst, diff.max_abs_coeff());
  }
  for (const auto& [key, c] : b.coef) {
    if (a.coef.find(key) == a.coef.end())
      worst = std::max(worst, c.poly.max_abs_coeff() * std::abs(sign));
  }
  return worst;
}

int run_superform_check(const SuperformConfig& cfg) {
  if (!cfg.seed_set) throw ConfigError("--seed is required for stochastic modes");
  std::mt19937_64 rng = make_rng(cfg.seed, 0);
  std::uniform_int_distribution<int> pick_m(2, 3);

  CheckSet checks;
  ordered_json doc;
  doc["schema"] = kSchemaVersion;
  doc["version"] = kToolVersion;
  doc["timestamp"] = iso_timestamp();
  doc["mode"] = "superform-check";
  doc["seed"] = cfg.seed;
  ordered_json jcfg;
  jcfg["forms"] = cfg.forms;
  jcfg["theta_forms"] = cfg.theta_forms;
  jcfg["theta_points"] = cfg.theta_points;
  jcfg["max_degree"] = cfg.max_degree;
  doc["config"] = jcfg;

  double dd1 = 0.0, dd2 = 0.0, anti = 0.0;
  for (int t = 0; t < cfg.forms; ++t) {
    const int m = pick_m(rng);
    std::uniform_int_distribution<int> pd(0, m - 1);
    const int p = pd(rng), q = pd(rng);
    const SuperForm w = random_form(m, p, q, cfg.max_degree, rng);
    const double scale = std::max(1.0, form_scale(w));
    dd1 = std::max(dd1, form_scale(dprime(dprime(w))) / scale);
    dd2 = std::max(dd2, form_scale(dsecond(dsecond(w))) / scale);
    anti = std::max(anti,
                    form_comb_max(dprime(dsecond(w)), dsecond(dprime(w)), 1.0) / scale);
  }
  checks.add("dprime_squares_to_zero", dd1 <= 1e-12, dd1, 1e-12);
  checks.add("dsecond_squares_to_zero", dd2 <= 1e-12, dd2, 1e-12);
  checks.add("mixed_anticommute", anti <= 1e-12, anti, 1e-12);

  // Exhaustive single-pair checks for m = 2, 3: graded commutativity of the
  // wedge, the Leibniz rule for both differentials, involution sign and
  // involution squaring to the identity.
  double comm = 0.0, leib1 = 0.0, leib2 = 0.0, invsq = 0.0, invsign = 0.0;
  for (int m = 2; m <= 3; ++m) {
    Poly base(m);
    {
      std::vector<int> e0(static_cast<std::size_t>(m), 0);
      base.add_term(e0, 0.7);
      for (int k = 0; k < m; ++k) {
        std::vector<int> e(static_cast<std::size_t>(m), 0);
        e[static_cast<std::size_t>(k)] = 1;
        base.add_term(e, 1.0 + 0.3 * k);
      }
    }
    for (IndexSet J = 0; J < (1u << m); ++J) {
      for (IndexSet K = 0; K < (1u << m); ++K) {
        SuperForm a = make_exact_form(m, set_cardinality(J), set_cardinality(K));
        a.add(J, K, CoefficientField::exact(base));
        const int pq = a.p + a.q;

        // involution: I(I(a)) = a and the sign on the basis pair
        const SuperForm ia = involution_I(a);
        invsq = std::max(invsq, form_comb_max(involution_I(ia), a, -1.0));
        const double want_sign = ((a.p * a.q) % 2 == 0) ? 1.0 : -1.0;
        auto it = ia.coef.find({K, J});
        double got = 0.0;
        if (it != ia.coef.end()) {
          // compare against want_sign * base
          Poly diff = it->second.poly + base * (-want_sign);
          got = diff.max_abs_coeff();
        } else {
          got = base.max_abs_coeff();
        }
        invsign = std::max(invsign, got);

        for (IndexSet J2 = 0; J2 < (1u << m); ++J2) {
          for (IndexSet K2 = 0; K2 < (1u << m); ++K2) {
            SuperForm b = make_exact_form(m, set_cardinality(J2), set_cardinality(K2));
            b.add(J2, K2, CoefficientField::exact(base * 0.9));
            const int pq2 = b.p + b.q;
            const double csign = ((pq * pq2) % 2 == 0) ? 1.0 : -1.0;
            comm = std::max(comm, form_comb_max(wedge(a, b), wedge(b, a), -csign));

            const double lsign = (pq % 2 == 0) ? 1.0 : -1.0;
            SuperForm lhs1 = dprime(wedge(a, b));
            SuperForm rhs1a = wedge(dprime(a), b);
            SuperForm rhs1b = wedge(a, dprime(b));
            // lhs - rhs1a - lsign*rhs1b
            SuperForm tmp = rhs1a;
            for (auto& [key, c] : tmp.coef) {
              auto jt = rhs1b.coef.find(key);
              if (jt != rhs1b.coef.end()) c.poly = c.poly + jt->second.poly * lsign;
            }
            for (const auto& [key, c] : rhs1b.coef) {
              if (tmp.coef.find(key) == tmp.coef.end())
                tmp.add(key.first, key.second, CoefficientField::exact(c.poly * lsign));
            }
            leib1 = std::max(leib1, form_comb_max(lhs1, tmp, -1.0));

            SuperForm lhs2 = dsecond(wedge(a, b));
            SuperForm rhs2a = wedge(dsecond(a), b);
            SuperForm rhs2b = wedge(a, dsecond(b));
            SuperForm tmp2 = rhs2a;
            for (auto& [key, c] : tmp2.coef) {
              auto jt = rhs2b.coef.find(key);
              if (jt != rhs2b.coef.end()) c.poly = c.poly + jt->second.poly * lsign;
            }
            for (const auto& [key, c] : rhs2b.coef) {
              if (tmp2.coef.find(key) == tmp2.coef.end())
                tmp2.add(key.first, key.second, CoefficientField::exact(c.poly * lsign));
            }
            leib2 = std::max(leib2, form_comb_max(lhs2, tmp2, -1.0));
          }
        }
      }
    }
  }
  checks.add("wedge_graded_commutativity", comm <= 1e-12, comm, 1e-12);
  checks.add("wedge_leibniz_dprime", leib1 <= 1e-12, leib1, 1e-12);
  checks.add("wedge_leibniz_dsecond", leib2 <= 1e-12, leib2, 1e-12);
  checks.add("involution_squares_to_identity", invsq <= 1e-12, invsq, 1e-12);
  checks.add("involution_basis_sign", invsign <= 1e-12, invsign, 1e-12);

  // Torus correspondence residuals.
  {
    std::uniform_real_distribution<double> ur(0.5, 2.0), ut(0.0, 6.283185307179586);
    std::uniform_int_distribution<int> pd(0, 2);
    double worst[5] = {0, 0, 0, 0, 0};
    const char* tags[5] = {"dprime", "dsecond", "involution", "homomorphism",
                           "integral"};
    for (int f = 0; f < cfg.theta_forms; ++f) {
      const int m = 2;
      int p = pd(rng) % m, q = pd(rng) % m;
      const SuperForm psi = random_form(m, p, q, cfg.max_degree, rng);
      const SuperForm psi22 = random_form(m, 2, 2, cfg.max_degree, rng);
      int p2 = pd(rng) % (m - p + 1), q2 = pd(rng) % (m - q + 1);
      const SuperForm phi = random_form(m, p2, q2, cfg.max_degree, rng);
      for (int pt = 0; pt < cfg.theta_points; ++pt) {
        const std::vector<cd> z = {std::polar(ur(rng), ut(rng)),
                                   std::polar(ur(rng), ut(rng))};
        worst[0] = std::max(worst[0], theta_residual(psi, z, "dprime"));
        worst[1] = std::max(worst[1], theta_residual(psi, z, "dsecond"));
        worst[2] = std::max(worst[2], theta_residual(psi, z, "involution"));
        worst[3] = std::max(worst[3], theta_residual(psi, z, "homomorphism", &phi));
        worst[4] = std::max(worst[4], theta_residual(psi22, z, "integral"));
      }
    }
    for (int k = 0; k < 5; ++k) {
      checks.add(std::string("theta_") + tags[k], worst[k] <= 1e-8, worst[k], 1e-8);
    }
  }

  return finish(cfg.report, doc, checks);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"amoebas of Laurent curves: rasters, Ronkin functions, order maps"};
  app.require_subcommand(1);

  ClassicalConfig ccfg;
  CLI::App* cls = app.add_subcommand("classical", "classical amoeba pipeline");
  cls->add_option("--poly", ccfg.poly, "Laurent polynomial in z1, z2")->required();
  cls->add_option("--box", ccfg.box, "lo1,hi1,lo2,hi2");
  cls->add_option("--grid", ccfg.grid, "cells per axis");
  cls->add_option("--fibers", ccfg.fibers, "fiber columns (default 2*grid)");
  cls->add_option("--angles", ccfg.angles, "angles per fiber");
  cls->add_option("--nq", ccfg.nq, "quadrature nodes per axis");
  cls->add_option("--eval-n", ccfg.eval_n, "gradient sample grid per axis");
  cls->add_option("--convexity-triples", ccfg.convexity_triples, "convexity spot checks");
  cls->add_option("--seed", ccfg.seed, "seed for the convexity sampler");
  cls->add_option("--emit", ccfg.emit, "write component raster PPM");
  cls->add_option("--report", ccfg.report, "write JSON report");
  cls->add_option("--csv", ccfg.csv, "write coarse Ronkin grid CSV");
  cls->add_option("--csv-nodes", ccfg.csv_nodes, "nodes per axis in the CSV dump");

  GeneralizedConfig gcfg;
  CLI::App* gen = app.add_subcommand("generalized", "marked-sphere amoeba pipeline");
  gen->add_option("--points", gcfg.points, "marked points, comma separated")->required();
  gen->add_option("--residues", gcfg.residues, "2 rows, ';' between rows")->required();
  gen->add_option("--base", gcfg.base, "base point (default auto)");
  gen->add_option("--box", gcfg.box, "lo1,hi1,lo2,hi2");
  gen->add_option("--grid", gcfg.grid, "cells per axis");
  gen->add_option("--samples", gcfg.samples, "Monte-Carlo samples");
  gen->add_option("--delta", gcfg.delta, "excluded-disk radius");
  gen->add_option("--seed", gcfg.seed, "sampling seed")->each([&](const std::string&) {
    gcfg.seed_set = true;
  });
  gen->add_option("--compare-classical", gcfg.compare_classical,
                  "Laurent polynomial for cross-pipeline agreement");
  gen->add_option("--emit", gcfg.emit, "write component raster PPM");
  gen->add_option("--report", gcfg.report, "write JSON report");
  gen->add_option("--csv", gcfg.csv, "write recovered Ronkin grid CSV");

  FanLimitConfig fcfg;
  CLI::App* fan = app.add_subcommand("fan-limit", "asymptotic fan scaling limit");
  fan->add_option("--points", fcfg.points, "marked points")->required();
  fan->add_option("--residues", fcfg.residues, "2 rows, ';' between rows")->required();
  fan->add_option("--base", fcfg.base, "base point (default auto)");
  fan->add_option("--box", fcfg.box, "lo1,hi1,lo2,hi2");
  fan->add_option("--t", fcfg.t, "scale factors, nondecreasing");
  fan->add_option("--samples", fcfg.samples, "samples per scale");
  fan->add_option("--seed", fcfg.seed, "sampling seed")->each([&](const std::string&) {
    fcfg.seed_set = true;
  });
  fan->add_option("--report", fcfg.report, "write JSON report");

  SuperformConfig scfg;
  CLI::App* sf = app.add_subcommand("superform-check", "calculus identity suites");
  sf->add_option("--forms", scfg.forms, "random forms per identity");
  sf->add_option("--theta-forms", scfg.theta_forms, "random forms for the torus map");
  sf->add_option("--theta-points", scfg.theta_points, "torus points per form");
  sf->add_option("--max-degree", scfg.max_degree, "coefficient degree bound");
  sf->add_option("--seed", scfg.seed, "seed")->each([&](const std::string&) {
    scfg.seed_set = true;
  });
  sf->add_option("--report", scfg.report, "write JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cls) return run_classical(ccfg);
    if (*gen) return run_generalized(gcfg);
    if (*fan) return run_fan_limit(fcfg);
    if (*sf) return run_superform_check(scfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
