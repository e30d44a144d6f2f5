#include "dpp/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "dpp/error.hpp"

namespace dpp {

Window::Window(std::vector<Interval> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw ConfigError("window needs at least one axis");
  for (const Interval& a : axes_) {
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || !(a.hi > a.lo)) {
      throw ConfigError(fmt::format("invalid window axis [{}, {}]", a.lo, a.hi));
    }
  }
}

Window Window::centered_cube(int dimension, double half_side) {
  if (dimension < 1) throw ConfigError("window dimension must be positive");
  return Window(std::vector<Interval>(dimension, Interval{-half_side, half_side}));
}

double Window::min_side() const {
  double s = side(0);
  for (int i = 1; i < dimension(); ++i) s = std::min(s, side(i));
  return s;
}

double Window::volume() const {
  double v = 1.0;
  for (int i = 0; i < dimension(); ++i) v *= side(i);
  return v;
}

bool Window::contains(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != dimension()) return false;
  for (int i = 0; i < dimension(); ++i) {
    if (!(point[i] >= axes_[i].lo && point[i] <= axes_[i].hi)) return false;
  }
  return true;
}

Window Window::translated(std::span<const double> shift) const {
  if (static_cast<int>(shift.size()) != dimension()) {
    throw ConfigError("shift dimension does not match the window");
  }
  std::vector<Interval> axes = axes_;
  for (int i = 0; i < dimension(); ++i) {
    axes[i].lo += shift[i];
    axes[i].hi += shift[i];
  }
  return Window(std::move(axes));
}

bool operator==(const Window& a, const Window& b) {
  if (a.dimension() != b.dimension()) return false;
  for (int i = 0; i < a.dimension(); ++i) {
    if (a.axes_[i].lo != b.axes_[i].lo || a.axes_[i].hi != b.axes_[i].hi) return false;
  }
  return true;
}

PointPattern::PointPattern(Window window) : window_(std::move(window)) {}

PointPattern::PointPattern(Window window, std::vector<double> coordinates)
    : window_(std::move(window)), coords_(std::move(coordinates)) {
  const std::size_t d = window_.dimension();
  if (coords_.size() % d != 0) {
    throw ConfigError("coordinate count is not a multiple of the dimension");
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (!window_.contains(point(i))) {
      throw ConfigError(fmt::format("point {} lies outside the window", i));
    }
  }
}

std::span<const double> PointPattern::point(std::size_t i) const {
  const std::size_t d = window_.dimension();
  return std::span<const double>(coords_).subspan(i * d, d);
}

void PointPattern::add(std::span<const double> p) {
  if (!window_.contains(p)) throw ConfigError("point lies outside the window");
  coords_.insert(coords_.end(), p.begin(), p.end());
}

bool PointPattern::is_simple() const {
  const std::size_t d = window_.dimension();
  std::vector<std::size_t> order(size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(coords_.begin() + a * d, coords_.begin() + (a + 1) * d,
                                        coords_.begin() + b * d, coords_.begin() + (b + 1) * d);
  };
  std::sort(order.begin(), order.end(), less);
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (!less(order[i - 1], order[i])) return false;
  }
  return true;
}

PointPattern PointPattern::translated(std::span<const double> shift) const {
  Window w = window_.translated(shift);
  std::vector<double> coords = coords_;
  const std::size_t d = window_.dimension();
  for (std::size_t i = 0; i < coords.size(); ++i) coords[i] += shift[i % d];
  // Construct without re-validating: a shifted point may round past the
  // shifted boundary by one ulp.
  PointPattern out(std::move(w));
  out.coords_ = std::move(coords);
  return out;
}

}  // namespace dpp
