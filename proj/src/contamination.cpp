#include "dpp/contamination.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "dpp/error.hpp"

namespace dpp {

namespace {

void check_rho(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw ConfigError(fmt::format("contamination fraction {} is outside [0, 1)", rho));
  }
}

bool overlaps(const Window& a, const Window& b) {
  for (int i = 0; i < a.dimension(); ++i) {
    if (a.axis(i).hi <= b.axis(i).lo || b.axis(i).hi <= a.axis(i).lo) return false;
  }
  return true;
}

void add_uniform_points(std::vector<double>& coords, const Window& region, std::size_t count,
                        RngStream& rng) {
  for (std::size_t p = 0; p < count; ++p) {
    for (int i = 0; i < region.dimension(); ++i) {
      coords.push_back(rng.uniform(region.axis(i).lo, region.axis(i).hi));
    }
  }
}

}  // namespace

std::string to_string(ContaminationKind kind) {
  switch (kind) {
    case ContaminationKind::none: return "none";
    case ContaminationKind::add_subsquare: return "add-subsquare";
    case ContaminationKind::delete_subsquare: return "delete-subsquare";
    case ContaminationKind::add_uniform: return "add-uniform";
    case ContaminationKind::delete_uniform: return "delete-uniform";
  }
  return "none";
}

ContaminationKind parse_contamination_kind(const std::string& name) {
  for (const auto kind :
       {ContaminationKind::none, ContaminationKind::add_subsquare,
        ContaminationKind::delete_subsquare, ContaminationKind::add_uniform,
        ContaminationKind::delete_uniform}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown contamination kind '" + name + "'");
}

std::size_t contamination_count(double rho, std::size_t m) {
  check_rho(rho);
  return static_cast<std::size_t>(std::nearbyint(rho * static_cast<double>(m)));
}

std::vector<Window> place_squares(const Window& window, int count, double side,
                                  RngStream& rng) {
  if (count < 1) throw ConfigError("at least one sub-square is required");
  if (!(side > 0.0)) throw ConfigError("sub-square side must be positive");
  if (side > window.min_side()) {
    throw ConfigError(fmt::format("sub-square side {} exceeds the window side {}", side,
                                  window.min_side()));
  }
  const int d = window.dimension();
  std::vector<Window> placed;
  std::vector<Interval> axes(d);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    for (int i = 0; i < d; ++i) {
      const double lo = rng.uniform(window.axis(i).lo, window.axis(i).hi - side);
      axes[i] = {lo, lo + side};
    }
    Window candidate(axes);
    bool clear = true;
    for (const Window& w : placed) clear = clear && !overlaps(w, candidate);
    if (!clear) continue;
    placed.push_back(std::move(candidate));
    if (static_cast<int>(placed.size()) == count) return placed;
  }
  throw NumericError(fmt::format("could not place {} disjoint sub-squares of side {} ({} placed)",
                                 count, side, placed.size()));
}

ContaminationResult contaminate_add(const PointPattern& pattern, const ContaminationSpec& spec,
                                    RngStream& rng) {
  check_rho(spec.rho);
  const Window& window = pattern.window();
  ContaminationResult result{pattern, {}, 0, 0};
  const std::size_t n_add = contamination_count(spec.rho, pattern.size());
  if (spec.rho == 0.0) return result;
  if (!(spec.side_fraction > 0.0 && spec.side_fraction <= 1.0)) {
    throw ConfigError("sub-square side fraction must lie in (0, 1]");
  }
  double side = spec.side_fraction * window.side(0);
  for (int i = 1; i < window.dimension(); ++i) {
    side = std::min(side, spec.side_fraction * window.side(i));
  }
  result.regions = place_squares(window, spec.squares, side, rng);

  std::vector<double> coords = pattern.coordinates();
  const std::size_t s = result.regions.size();
  for (std::size_t q = 0; q < s; ++q) {
    const std::size_t share = n_add / s + (q < n_add % s ? 1 : 0);
    add_uniform_points(coords, result.regions[q], share, rng);
  }
  result.pattern = PointPattern(window, std::move(coords));
  result.added = n_add;
  return result;
}

ContaminationResult contaminate_delete(const PointPattern& pattern,
                                       const ContaminationSpec& spec, RngStream& rng) {
  check_rho(spec.rho);
  ContaminationResult result{pattern, {}, 0, 0};
  if (spec.rho == 0.0) return result;
  const Window& window = pattern.window();
  if (spec.squares < 1) throw ConfigError("at least one sub-square is required");
  const int d = window.dimension();
  const double side = std::pow(spec.rho * window.volume() / spec.squares, 1.0 / d);
  result.regions = place_squares(window, spec.squares, side, rng);

  std::vector<double> coords;
  coords.reserve(pattern.coordinates().size());
  for (std::size_t p = 0; p < pattern.size(); ++p) {
    const auto x = pattern.point(p);
    bool inside = false;
    for (const Window& w : result.regions) inside = inside || w.contains(x);
    if (inside) {
      ++result.removed;
    } else {
      coords.insert(coords.end(), x.begin(), x.end());
    }
  }
  result.pattern = PointPattern(window, std::move(coords));
  return result;
}

ContaminationResult contaminate_uniform(const PointPattern& pattern, ContaminationKind kind,
                                        double rho, RngStream& rng) {
  check_rho(rho);
  const Window& window = pattern.window();
  const std::size_t m = pattern.size();
  const std::size_t count = contamination_count(rho, m);
  ContaminationResult result{pattern, {}, 0, 0};
  if (count == 0) return result;

  if (kind == ContaminationKind::add_uniform) {
    std::vector<double> coords = pattern.coordinates();
    add_uniform_points(coords, window, count, rng);
    result.pattern = PointPattern(window, std::move(coords));
    result.added = count;
    return result;
  }
  if (kind != ContaminationKind::delete_uniform) {
    throw ConfigError("uniform contamination must be add-uniform or delete-uniform");
  }
  // Partial Fisher-Yates: the first `count` slots become the deleted subset.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(m - i));
    std::swap(order[i], order[j]);
  }
  std::vector<bool> drop(m, false);
  for (std::size_t i = 0; i < count; ++i) drop[order[i]] = true;
  std::vector<double> coords;
  coords.reserve((m - count) * window.dimension());
  for (std::size_t p = 0; p < m; ++p) {
    if (drop[p]) continue;
    const auto x = pattern.point(p);
    coords.insert(coords.end(), x.begin(), x.end());
  }
  result.pattern = PointPattern(window, std::move(coords));
  result.removed = count;
  return result;
}

ContaminationResult contaminate(const PointPattern& pattern, const ContaminationSpec& spec,
                                RngStream& rng) {
  switch (spec.kind) {
    case ContaminationKind::none: return {pattern, {}, 0, 0};
    case ContaminationKind::add_subsquare: return contaminate_add(pattern, spec, rng);
    case ContaminationKind::delete_subsquare: return contaminate_delete(pattern, spec, rng);
    case ContaminationKind::add_uniform:
    case ContaminationKind::delete_uniform:
      return contaminate_uniform(pattern, spec.kind, spec.rho, rng);
  }
  throw ConfigError("unknown contamination kind");
}

}  // namespace dpp
