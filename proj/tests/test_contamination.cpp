#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "dpp/contamination.hpp"
#include "dpp/error.hpp"
#include "dpp/sampler.hpp"

using dpp::ContaminationKind;
using dpp::ContaminationSpec;

namespace {

dpp::PointPattern poisson(double intensity, double half, std::uint64_t seed) {
  dpp::RngStream rng(seed);
  return dpp::sample_poisson(intensity, dpp::Window::centered_cube(2, half), rng);
}

bool disjoint(const dpp::Window& a, const dpp::Window& b) {
  for (int i = 0; i < a.dimension(); ++i) {
    if (a.axis(i).hi <= b.axis(i).lo || b.axis(i).hi <= a.axis(i).lo) return true;
  }
  return false;
}

bool inside(const dpp::Window& outer, const dpp::Window& inner) {
  for (int i = 0; i < outer.dimension(); ++i) {
    if (inner.axis(i).lo < outer.axis(i).lo || inner.axis(i).hi > outer.axis(i).hi) return false;
  }
  return true;
}

// Points of `a` not present in `b`, compared coordinate-wise.
std::vector<std::vector<double>> difference(const dpp::PointPattern& a, const dpp::PointPattern& b) {
  std::vector<std::vector<double>> pb;
  for (std::size_t i = 0; i < b.size(); ++i) pb.emplace_back(b.point(i).begin(), b.point(i).end());
  std::sort(pb.begin(), pb.end());
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::vector<double> x(a.point(i).begin(), a.point(i).end());
    if (!std::binary_search(pb.begin(), pb.end(), x)) out.push_back(x);
  }
  return out;
}

}  // namespace

TEST_SUITE("contamination") {
  TEST_CASE("kind names round trip") {
    for (const auto kind : {ContaminationKind::none, ContaminationKind::add_subsquare,
                            ContaminationKind::delete_subsquare, ContaminationKind::add_uniform,
                            ContaminationKind::delete_uniform}) {
      CHECK(dpp::parse_contamination_kind(dpp::to_string(kind)) == kind);
    }
    CHECK(dpp::to_string(ContaminationKind::add_subsquare) == "add-subsquare");
    CHECK_THROWS_AS(dpp::parse_contamination_kind("shuffle"), dpp::ConfigError);
  }

  TEST_CASE("rounding of the contamination count") {
    CHECK(dpp::contamination_count(0.05, 200) == 10u);
    CHECK(dpp::contamination_count(0.5, 5) == 2u);  // 2.5 rounds to even
    CHECK(dpp::contamination_count(0.5, 7) == 4u);  // 3.5 rounds to even
    CHECK(dpp::contamination_count(0.0, 500) == 0u);
    CHECK_THROWS_AS(dpp::contamination_count(1.0, 10), dpp::ConfigError);
    CHECK_THROWS_AS(dpp::contamination_count(-0.1, 10), dpp::ConfigError);
  }

  TEST_CASE("zero fraction leaves the pattern unchanged") {
    const auto p = poisson(50.0, 1.0, 3);
    dpp::RngStream rng(1);
    for (const auto kind : {ContaminationKind::add_subsquare, ContaminationKind::delete_subsquare,
                            ContaminationKind::add_uniform, ContaminationKind::delete_uniform}) {
      const auto r = dpp::contaminate(p, {kind, 0.0, 1, 0.1}, rng);
      CHECK(r.pattern.coordinates() == p.coordinates());
      CHECK(r.added == 0u);
      CHECK(r.removed == 0u);
    }
    const auto none = dpp::contaminate(p, {}, rng);
    CHECK(none.pattern.coordinates() == p.coordinates());
  }

  TEST_CASE("addition in one sub-square") {
    std::vector<double> c;
    dpp::RngStream g(2);
    for (int i = 0; i < 200; ++i) c.insert(c.end(), {g.uniform(-1.0, 1.0), g.uniform(-1.0, 1.0)});
    const dpp::PointPattern p(dpp::Window::centered_cube(2, 1.0), c);
    dpp::RngStream rng(4);
    const auto r = dpp::contaminate_add(p, {ContaminationKind::add_subsquare, 0.05, 1, 0.1}, rng);
    CHECK(r.added == 10u);
    CHECK(r.pattern.size() == 210u);
    REQUIRE(r.regions.size() == 1u);
    CHECK(r.regions[0].side(0) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(r.regions[0].side(1) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(inside(p.window(), r.regions[0]));
    const auto extra = difference(r.pattern, p);
    CHECK(extra.size() == 10u);
    for (const auto& x : extra) CHECK(r.regions[0].contains(x));
    const double std_before = p.size() / 4.0;
    const double std_after = r.pattern.size() / 4.0;
    CHECK(std_after - std_before == doctest::Approx(10.0 / 4.0));
  }

  TEST_CASE("addition split across several sub-squares") {
    const auto p = poisson(50.0, 2.0, 5);
    for (const int squares : {2, 4}) {
      for (const double side : {0.05, 0.1, 0.2}) {
        dpp::RngStream rng(squares * 100 + static_cast<int>(side * 100));
        const auto r = dpp::contaminate_add(
            p, {ContaminationKind::add_subsquare, 0.1, squares, side}, rng);
        const std::size_t n_add = dpp::contamination_count(0.1, p.size());
        CHECK(r.pattern.size() == p.size() + n_add);
        REQUIRE(r.regions.size() == static_cast<std::size_t>(squares));
        std::vector<std::size_t> per(squares, 0);
        for (const auto& x : difference(r.pattern, p)) {
          int hits = 0;
          for (int q = 0; q < squares; ++q) {
            if (r.regions[q].contains(x)) {
              ++per[q];
              ++hits;
            }
          }
          CHECK(hits == 1);
        }
        const auto [lo, hi] = std::minmax_element(per.begin(), per.end());
        CHECK(*hi - *lo <= 1u);
        for (int a = 0; a < squares; ++a) {
          CHECK(inside(p.window(), r.regions[a]));
          for (int b = a + 1; b < squares; ++b) CHECK(disjoint(r.regions[a], r.regions[b]));
        }
      }
    }
  }

  TEST_CASE("deletion removes exactly the points in the sub-squares") {
    const auto p = poisson(50.0, 2.0, 6);
    for (const int squares : {1, 2, 4}) {
      dpp::RngStream rng(squares);
      const auto r =
          dpp::contaminate_delete(p, {ContaminationKind::delete_subsquare, 0.1, squares, 0.1}, rng);
      REQUIRE(r.regions.size() == static_cast<std::size_t>(squares));
      double area = 0.0;
      for (const auto& w : r.regions) area += w.volume();
      CHECK(area == doctest::Approx(0.1 * 16.0).epsilon(1e-12));
      const auto gone = difference(p, r.pattern);
      CHECK(gone.size() == r.removed);
      CHECK(r.pattern.size() + r.removed == p.size());
      for (const auto& x : gone) {
        bool in = false;
        for (const auto& w : r.regions) in = in || w.contains(x);
        CHECK(in);
      }
      for (std::size_t i = 0; i < r.pattern.size(); ++i) {
        for (const auto& w : r.regions) CHECK_FALSE(w.contains(r.pattern.point(i)));
      }
      for (int a = 0; a < squares; ++a) {
        for (int b = a + 1; b < squares; ++b) CHECK(disjoint(r.regions[a], r.regions[b]));
      }
    }
  }

  TEST_CASE("deleted fraction on Poisson input equals rho") {
    double removed = 0.0;
    double total = 0.0;
    for (int i = 0; i < 2000; ++i) {
      auto rng = dpp::RngStream::derive(71, i);
      const auto p = dpp::sample_poisson(50.0, dpp::Window::centered_cube(2, 1.0), rng);
      const auto r =
          dpp::contaminate_delete(p, {ContaminationKind::delete_subsquare, 0.1, 1, 0.1}, rng);
      removed += static_cast<double>(r.removed);
      total += static_cast<double>(p.size());
    }
    // removed count per draw is Poisson(0.1 * 200)
    const double mean = removed / 2000.0;
    CHECK(std::abs(mean - 20.0) < 3.0 * std::sqrt(20.0 / 2000.0));
    CHECK(removed / total == doctest::Approx(0.1).epsilon(0.03));
  }

  TEST_CASE("uniform addition and deletion") {
    const auto p = poisson(50.0, 1.0, 8);
    const std::size_t k = dpp::contamination_count(0.05, p.size());
    dpp::RngStream rng(9);
    const auto add = dpp::contaminate_uniform(p, ContaminationKind::add_uniform, 0.05, rng);
    CHECK(add.pattern.size() == p.size() + k);
    CHECK(add.regions.empty());
    const auto del = dpp::contaminate_uniform(p, ContaminationKind::delete_uniform, 0.05, rng);
    CHECK(del.pattern.size() == p.size() - k);
    CHECK(difference(p, del.pattern).size() == k);
    CHECK(difference(del.pattern, p).empty());
    CHECK_THROWS_AS(dpp::contaminate_uniform(p, ContaminationKind::add_subsquare, 0.05, rng),
                    dpp::ConfigError);
  }

  TEST_CASE("uniform deletion picks every point with equal probability") {
    // 10 points, delete 3: each point is removed with probability 0.3
    std::vector<double> c;
    for (int i = 0; i < 10; ++i) c.insert(c.end(), {0.1 * i - 0.5, 0.0});
    const dpp::PointPattern p(dpp::Window::centered_cube(2, 1.0), c);
    std::vector<int> hits(10, 0);
    const int reps = 20000;
    for (int r = 0; r < reps; ++r) {
      auto rng = dpp::RngStream::derive(12, r);
      const auto out = dpp::contaminate_uniform(p, ContaminationKind::delete_uniform, 0.3, rng);
      for (const auto& x : difference(p, out.pattern)) {
        ++hits[static_cast<int>(std::lround((x[0] + 0.5) * 10.0))];
      }
    }
    const double se = std::sqrt(0.3 * 0.7 / reps);
    for (const int h : hits) CHECK(std::abs(static_cast<double>(h) / reps - 0.3) < 4.0 * se);
  }

  TEST_CASE("placement errors") {
    const auto w = dpp::Window::centered_cube(2, 1.0);
    dpp::RngStream rng(1);
    CHECK_THROWS_AS(dpp::place_squares(w, 1, 2.5, rng), dpp::ConfigError);
    CHECK_THROWS_AS(dpp::place_squares(w, 0, 0.1, rng), dpp::ConfigError);
    // five squares of side 1.5 cannot be disjoint in a 2 x 2 window
    CHECK_THROWS_AS(dpp::place_squares(w, 5, 1.5, rng), dpp::NumericError);
    const auto p = poisson(50.0, 1.0, 2);
    CHECK_THROWS_AS(
        dpp::contaminate_add(p, {ContaminationKind::add_subsquare, 0.05, 1, 1.5}, rng),
        dpp::ConfigError);
  }

  TEST_CASE("contamination is deterministic under a fixed seed") {
    const auto p = poisson(50.0, 1.0, 10);
    for (const auto kind : {ContaminationKind::add_subsquare, ContaminationKind::delete_subsquare,
                            ContaminationKind::add_uniform, ContaminationKind::delete_uniform}) {
      dpp::RngStream a(33);
      dpp::RngStream b(33);
      const ContaminationSpec spec{kind, 0.1, 2, 0.1};
      CHECK(dpp::contaminate(p, spec, a).pattern.coordinates() ==
            dpp::contaminate(p, spec, b).pattern.coordinates());
    }
  }
}
