#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dpp {

struct Interval {
  double lo;
  double hi;
};

// Axis-aligned box prod_i [lo_i, hi_i].
class Window {
 public:
  explicit Window(std::vector<Interval> axes);

  // [-half_side, half_side]^d
  static Window centered_cube(int dimension, double half_side);

  int dimension() const { return static_cast<int>(axes_.size()); }
  const Interval& axis(int i) const { return axes_[i]; }
  const std::vector<Interval>& axes() const { return axes_; }
  double side(int i) const { return axes_[i].hi - axes_[i].lo; }
  double min_side() const;
  double volume() const;
  bool contains(std::span<const double> point) const;
  Window translated(std::span<const double> shift) const;

  friend bool operator==(const Window& a, const Window& b);

 private:
  std::vector<Interval> axes_;
};

// Finite point configuration observed in a window. Coordinates are stored
// point-major: point i occupies [i*d, (i+1)*d).
class PointPattern {
 public:
  explicit PointPattern(Window window);
  PointPattern(Window window, std::vector<double> coordinates);

  const Window& window() const { return window_; }
  int dimension() const { return window_.dimension(); }
  std::size_t size() const { return coords_.size() / window_.dimension(); }
  bool empty() const { return coords_.empty(); }
  std::span<const double> point(std::size_t i) const;
  const std::vector<double>& coordinates() const { return coords_; }

  // Throws ConfigError when the point is outside the window.
  void add(std::span<const double> point);

  // No two points coincide.
  bool is_simple() const;

  PointPattern translated(std::span<const double> shift) const;

 private:
  Window window_;
  std::vector<double> coords_;
};

}  // namespace dpp
