#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpp/geometry.hpp"
#include "dpp/kernel.hpp"
#include "dpp/rng.hpp"

namespace dpp {

inline constexpr double kEigenvalueClip = 1e-9;

// Periodic spectral approximation of a stationary DPP on a box: one
// eigenvalue F(C)(k / L) per lattice frequency k in {-T..T}^d. Lattice
// indices run lexicographically with the first axis slowest.
//
// The sampler uses the real Fourier basis: the zero frequency is the
// constant, a frequency whose first non-zero component is positive maps to
// sqrt(2) cos(2 pi k.(x - a) / L), its mirror -k maps to the sine of the
// same phase. Each lattice frequency therefore owns one real eigenfunction.
class SpectralModel {
 public:
  SpectralModel(Window window, int truncation, std::vector<double> eigenvalues,
                std::string digest = {});

  const Window& window() const { return window_; }
  int truncation() const { return truncation_; }
  int dimension() const { return window_.dimension(); }
  std::size_t size() const { return eigenvalues_.size(); }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  double eigenvalue_sum() const { return eigenvalue_sum_; }
  // Sum of beta (1 - beta): exact variance of the count on the torus.
  double count_variance() const;
  // Lattice frequency of index i.
  std::vector<int> frequency(std::size_t index) const;
  // Identifies kernel, window and truncation; empty for hand-built models.
  const std::string& digest() const { return digest_; }

 private:
  Window window_;
  int truncation_;
  std::vector<double> eigenvalues_;
  double eigenvalue_sum_;
  std::string digest_;
};

// T = ceil(32 * longest side), i.e. 64 per axis on [-1, 1]^d.
int default_truncation(const Window& window);

// Throws ConfigError when R >= shortest side (periodization would alias the
// kernel support) or the kernel is not admissible (R > M).
SpectralModel build_spectral_model(const KernelSpec& spec, const Window& window,
                                   int truncation);

struct SamplerOptions {
  std::uint64_t max_proposals_per_point = 1'000'000;
  // Relative residual below which the complement basis is re-orthonormalized.
  double reorthogonalize_below = 1e-8;
};

// Bernoulli selection of eigenfunctions followed by sequential sampling of
// the projection DPP, each point drawn by rejection against the uniform
// density. Throws NumericError if a point exhausts its proposal budget.
PointPattern sample_dpp(const SpectralModel& model, RngStream& rng,
                        const SamplerOptions& options = {});

// Homogeneous Poisson process on the window.
PointPattern sample_poisson(double intensity, const Window& window, RngStream& rng);

}  // namespace dpp
