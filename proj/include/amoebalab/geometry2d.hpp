#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace amoebalab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double xx, double yy) : x(xx), y(yy) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  Vec2 unit() const {
    double n = norm();
    return n > 0 ? Vec2{x / n, y / n} : Vec2{0, 0};
  }
  double angle() const { return std::atan2(y, x); }
};

inline double dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

struct Box2 {
  double lo1 = 0, hi1 = 0, lo2 = 0, hi2 = 0;

  Box2() = default;
  Box2(double a, double b, double c, double d) : lo1(a), hi1(b), lo2(c), hi2(d) {
    if (!(a < b) || !(c < d)) throw std::invalid_argument("box: need lo < hi on both axes");
  }
  double width1() const { return hi1 - lo1; }
  double width2() const { return hi2 - lo2; }
  bool contains(const Vec2& p) const {
    return p.x >= lo1 && p.x <= hi1 && p.y >= lo2 && p.y <= hi2;
  }
  Vec2 center() const { return {0.5 * (lo1 + hi1), 0.5 * (lo2 + hi2)}; }
  double diameter() const { return std::hypot(width1(), width2()); }
};

// A rectangular grid over a box: n1 x n2 cells, (n1+1) x (n2+1) nodes.
// Cell (i,j) spans [lo1+i*h1, lo1+(i+1)*h1] x [lo2+j*h2, ...]; indices are
// row-major with the x2 row index outermost: idx = j*n1 + i for cells and
// idx = j*(n1+1) + i for nodes.
struct Grid2 {
  Box2 box;
  int n1 = 0, n2 = 0;

  Grid2() = default;
  Grid2(const Box2& b, int c1, int c2) : box(b), n1(c1), n2(c2) {
    if (c1 < 1 || c2 < 1) throw std::invalid_argument("grid: need at least one cell per axis");
  }
  double h1() const { return box.width1() / n1; }
  double h2() const { return box.width2() / n2; }
  double cell_area() const { return h1() * h2(); }
  int cell_count() const { return n1 * n2; }
  int node_count() const { return (n1 + 1) * (n2 + 1); }

  Vec2 node(int i, int j) const { return {box.lo1 + i * h1(), box.lo2 + j * h2()}; }
  Vec2 cell_center(int i, int j) const {
    return {box.lo1 + (i + 0.5) * h1(), box.lo2 + (j + 0.5) * h2()};
  }
  int cell_index(int i, int j) const { return j * n1 + i; }
  int node_index(int i, int j) const { return j * (n1 + 1) + i; }

  // Cell containing p, or -1 if outside the box. Points on the far edges
  // belong to the last cell.
  int locate_cell(const Vec2& p) const {
    if (!box.contains(p)) return -1;
    int i = static_cast<int>((p.x - box.lo1) / h1());
    int j = static_cast<int>((p.y - box.lo2) / h2());
    if (i >= n1) i = n1 - 1;
    if (j >= n2) j = n2 - 1;
    return cell_index(i, j);
  }

  bool same_layout(const Grid2& o) const {
    return n1 == o.n1 && n2 == o.n2 && box.lo1 == o.box.lo1 && box.hi1 == o.box.hi1 &&
           box.lo2 == o.box.lo2 && box.hi2 == o.box.hi2;
  }
};

// Scalar field sampled on grid nodes, row-major (x2 rows from low to high).
struct GridField {
  Grid2 grid;
  std::vector<double> values;

  GridField() = default;
  explicit GridField(const Grid2& g, double fill = 0.0)
      : grid(g), values(static_cast<std::size_t>(g.node_count()), fill) {}

  double& at(int i, int j) { return values[static_cast<std::size_t>(grid.node_index(i, j))]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(grid.node_index(i, j))]; }
};

// Occupancy mask over grid cells (1 = occupied).
struct CellMask {
  Grid2 grid;
  std::vector<std::uint8_t> occupied;

  CellMask() = default;
  explicit CellMask(const Grid2& g)
      : grid(g), occupied(static_cast<std::size_t>(g.cell_count()), 0) {}

  bool at(int i, int j) const {
    return occupied[static_cast<std::size_t>(grid.cell_index(i, j))] != 0;
  }
  void set(int i, int j, bool v = true) {
    occupied[static_cast<std::size_t>(grid.cell_index(i, j))] = v ? 1 : 0;
  }
  bool get(int cell) const { return occupied[static_cast<std::size_t>(cell)] != 0; }
  void set(int cell) { occupied[static_cast<std::size_t>(cell)] = 1; }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto v : occupied) c += (v != 0);
    return c;
  }
};

}  // namespace amoebalab
