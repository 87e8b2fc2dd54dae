#include "amoebalab/theta.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace amoebalab {

namespace {

using cd = std::complex<double>;

// Polynomial in x with complex coefficients, kept as two real polynomials.
struct CPoly {
  Poly re, im;

  CPoly() = default;
  explicit CPoly(int m) : re(m), im(m) {}
  CPoly(Poly r, Poly i) : re(std::move(r)), im(std::move(i)) {}

  CPoly operator+(const CPoly& o) const { return {re + o.re, im + o.im}; }
  CPoly operator*(const CPoly& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  CPoly scale(cd s) const {
    return {re * s.real() - im * s.imag(), re * s.imag() + im * s.real()};
  }
  CPoly partial(int k) const { return {re.partial(k), im.partial(k)}; }
  cd eval(const std::vector<double>& x) const { return {re.eval(x), im.eval(x)}; }
};

// Complex-side form written in the logarithmic basis dz_J/z_J ^ dzbar_K/zbar_K
// with coefficients that are functions of x = Log z.
struct CForm {
  int m = 2;
  int p = 0, q = 0;
  std::map<std::pair<IndexSet, IndexSet>, CPoly> coef;

  void add(IndexSet J, IndexSet K, const CPoly& c, cd scale = 1.0) {
    auto key = std::make_pair(J, K);
    CPoly sc = c.scale(scale);
    auto it = coef.find(key);
    if (it == coef.end())
      coef.emplace(key, sc);
    else
      it->second = it->second + sc;
  }
};

cd ipow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

const double kSqrtPi = std::sqrt(M_PI);

// Theta(f dx_J (x) dx_K) = i^q / (2 sqrt(pi))^{p+q} f(Log z) dz_J/z_J ^ dzbar_K/zbar_K.
CForm theta_map(const SuperForm& w) {
  CForm out;
  out.m = w.m;
  out.p = w.p;
  out.q = w.q;
  cd c = ipow(w.q) / std::pow(2.0 * kSqrtPi, w.p + w.q);
  for (const auto& [jk, field] : w.coef) {
    if (field.mode != CoeffMode::Exact)
      throw std::invalid_argument("theta_residual: exact coefficients required");
    out.add(jk.first, jk.second, CPoly(field.poly, Poly(w.m)), c);
  }
  return out;
}

// d(g(Log z))/dz_k = (1/2) (d_k g)(Log z) / z_k, so the holomorphic
// differential acts in the logarithmic basis with a 1/2 per derivative.
CForm cpartial(const CForm& f) {
  CForm out;
  out.m = f.m;
  out.p = f.p + 1;
  out.q = f.q;
  for (const auto& [jk, g] : f.coef) {
    auto [J, K] = jk;
    for (int k = 0; k < f.m; ++k) {
      int s = insert_sign(k, J);
      if (s == 0) continue;
      out.add(J | (1u << k), K, g.partial(k), 0.5 * static_cast<double>(s));
    }
  }
  return out;
}

CForm cpartial_bar(const CForm& f) {
  CForm out;
  out.m = f.m;
  out.p = f.p;
  out.q = f.q + 1;
  double cross = (f.p % 2 == 0) ? 1.0 : -1.0;  // dzbar_k passes the dz block
  for (const auto& [jk, g] : f.coef) {
    auto [J, K] = jk;
    for (int k = 0; k < f.m; ++k) {
      int s = insert_sign(k, K);
      if (s == 0) continue;
      out.add(J, K | (1u << k), g.partial(k), 0.5 * cross * s);
    }
  }
  return out;
}

CForm cwedge(const CForm& a, const CForm& b) {
  CForm out;
  out.m = a.m;
  out.p = a.p + b.p;
  out.q = a.q + b.q;
  double cross = ((a.q * b.p) % 2 == 0) ? 1.0 : -1.0;  // dzbar_{K1} passes dz_{J2}
  for (const auto& [jk1, g1] : a.coef) {
    for (const auto& [jk2, g2] : b.coef) {
      int sj = merge_sign(jk1.first, jk2.first);
      int sk = merge_sign(jk1.second, jk2.second);
      if (sj == 0 || sk == 0) continue;
      out.add(jk1.first | jk2.first, jk1.second | jk2.second, g1 * g2,
              cross * sj * sk);
    }
  }
  return out;
}

// Complex conjugate: coefficients conjugate (they are functions of |z_j|
// only), dz and dzbar blocks swap, reordering costs (-1)^{pq}.
CForm cconj(const CForm& f) {
  CForm out;
  out.m = f.m;
  out.p = f.q;
  out.q = f.p;
  double s = ((f.p * f.q) % 2 == 0) ? 1.0 : -1.0;
  for (const auto& [jk, g] : f.coef) {
    CPoly gc(g.re, g.im * -1.0);
    out.add(jk.second, jk.first, gc, s);
  }
  return out;
}

CForm cscale(const CForm& f, cd s) {
  CForm out;
  out.m = f.m;
  out.p = f.p;
  out.q = f.q;
  for (const auto& [jk, g] : f.coef) out.add(jk.first, jk.second, g, s);
  return out;
}

double max_entry_diff(const CForm& a, const CForm& b, const std::vector<double>& x) {
  double worst = 0.0;
  auto scan = [&](const CForm& f, const CForm& g) {
    for (const auto& [jk, c] : f.coef) {
      cd va = c.eval(x);
      cd vb = 0.0;
      auto it = g.coef.find(jk);
      if (it != g.coef.end()) vb = it->second.eval(x);
      worst = std::max(worst, std::abs(va - vb));
    }
  };
  scan(a, b);
  scan(b, a);
  return worst;
}

}  // namespace

double theta_residual(const SuperForm& psi, const std::vector<cd>& z,
                      const std::string& which, const SuperForm* phi) {
  if (static_cast<int>(z.size()) != psi.m)
    throw std::invalid_argument("theta_residual: point dimension mismatch");
  std::vector<double> x;
  for (const cd& zj : z) {
    if (zj == cd(0.0)) throw std::invalid_argument("theta_residual: zero coordinate");
    x.push_back(std::log(std::abs(zj)));
  }

  if (which == "dprime") {
    CForm lhs = theta_map(dprime(psi));
    CForm rhs = cscale(cpartial(theta_map(psi)), cd(1.0 / kSqrtPi, 0.0));
    return max_entry_diff(lhs, rhs, x);
  }
  if (which == "dsecond") {
    CForm lhs = theta_map(dsecond(psi));
    CForm rhs = cscale(cpartial_bar(theta_map(psi)), cd(0.0, 1.0 / kSqrtPi));
    return max_entry_diff(lhs, rhs, x);
  }
  if (which == "involution") {
    CForm lhs = theta_map(involution_I(psi));
    CForm rhs = cscale(cconj(theta_map(psi)), ipow(psi.p + psi.q));
    return max_entry_diff(lhs, rhs, x);
  }
  if (which == "homomorphism") {
    const SuperForm& other = phi ? *phi : psi;
    CForm lhs = theta_map(wedge(psi, other));
    CForm rhs = cwedge(theta_map(psi), theta_map(other));
    return max_entry_diff(lhs, rhs, x);
  }
  if (which == "integral") {
    if (psi.p != psi.m || psi.q != psi.m)
      throw std::invalid_argument("theta_residual: integral tag needs bidegree (m,m)");
    // Unit box centered at Log z.
    std::vector<double> lo = x, hi = x;
    for (double& v : lo) v -= 0.5;
    for (double& v : hi) v += 0.5;

    // Left side: integrate Theta(psi) over Log^{-1}(U). In fiber coordinates
    // each pair dz_j/z_j ^ dzbar_j/zbar_j contributes -2i dx_j ^ dtheta_j,
    // collecting the pairs costs the shuffle sign (-1)^{m(m-1)/2}, and every
    // theta_j integrates to 2pi.
    CForm th = theta_map(psi);
    IndexSet full = (1u << psi.m) - 1u;
    auto it = th.coef.find(std::make_pair(full, full));
    cd lhs = 0.0;
    if (it != th.coef.end()) {
      double shuffle = ((psi.m * (psi.m - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
      cd pair_factor = std::pow(cd(0.0, -2.0), psi.m);
      double fiber = std::pow(2.0 * M_PI, psi.m);
      CPoly g = it->second;
      cd coef_int(g.re.integrate_box(lo, hi), g.im.integrate_box(lo, hi));
      lhs = shuffle * pair_factor * fiber * coef_int;
    }
    double rhs = tropical_integral(psi, lo, hi);
    return std::abs(lhs - cd(rhs, 0.0));
  }
  throw std::invalid_argument("theta_residual: unknown identity tag '" + which + "'");
}

}  // namespace amoebalab
