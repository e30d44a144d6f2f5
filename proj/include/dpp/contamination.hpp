#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dpp/geometry.hpp"
#include "dpp/rng.hpp"

namespace dpp {

enum class ContaminationKind { none, add_subsquare, delete_subsquare, add_uniform, delete_uniform };

std::string to_string(ContaminationKind kind);
// Accepts the names produced by to_string; throws ConfigError otherwise.
ContaminationKind parse_contamination_kind(const std::string& name);

struct ContaminationSpec {
  ContaminationKind kind = ContaminationKind::none;
  double rho = 0.0;
  int squares = 1;
  // Side of each added sub-square relative to the window side (n/5 on
  // [-n, n] is 0.1). Deleted sub-squares get their size from rho instead.
  double side_fraction = 0.1;
};

struct ContaminationResult {
  PointPattern pattern;
  std::vector<Window> regions;  // sub-squares used, empty for uniform kinds
  std::size_t added = 0;
  std::size_t removed = 0;
};

// round(rho m), ties to even.
std::size_t contamination_count(double rho, std::size_t m);

// `count` pairwise disjoint cubes of side `side` inside the window, each
// centre uniform over the admissible region. Throws NumericError after 10^4
// rejected attempts.
std::vector<Window> place_squares(const Window& window, int count, double side, RngStream& rng);

ContaminationResult contaminate_add(const PointPattern& pattern, const ContaminationSpec& spec,
                                    RngStream& rng);
ContaminationResult contaminate_delete(const PointPattern& pattern,
                                       const ContaminationSpec& spec, RngStream& rng);
ContaminationResult contaminate_uniform(const PointPattern& pattern, ContaminationKind kind,
                                        double rho, RngStream& rng);

// Dispatches on spec.kind.
ContaminationResult contaminate(const PointPattern& pattern, const ContaminationSpec& spec,
                                RngStream& rng);

}  // namespace dpp
