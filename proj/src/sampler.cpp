#include "dpp/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "dpp/digest.hpp"
#include "dpp/error.hpp"

namespace dpp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t lattice_size(int truncation, int dimension) {
  std::size_t n = 1;
  for (int i = 0; i < dimension; ++i) n *= static_cast<std::size_t>(2 * truncation + 1);
  return n;
}

void lattice_point(std::size_t index, int truncation, int dimension, int* out) {
  const std::size_t side = 2 * truncation + 1;
  for (int i = dimension - 1; i >= 0; --i) {
    out[i] = static_cast<int>(index % side) - truncation;
    index /= side;
  }
}

// +1 when the first non-zero component is positive, -1 when negative, 0 at
// the origin.
int orientation(const int* k, int dimension) {
  for (int i = 0; i < dimension; ++i) {
    if (k[i] > 0) return 1;
    if (k[i] < 0) return -1;
  }
  return 0;
}

enum class Wave : std::uint8_t { constant, cosine, sine };

// Selected real eigenfunctions, each stored with its canonical (positive)
// frequency.
struct SelectedBasis {
  int dimension = 0;
  std::vector<int> freq;  // point-major, dimension entries per function
  std::vector<Wave> wave;
  std::vector<int> max_abs;  // per axis
  double bound = 0.0;        // sup_x sum_j phi_j(x)^2

  std::size_t size() const { return wave.size(); }
};

SelectedBasis select_functions(const SpectralModel& model, RngStream& rng) {
  const int d = model.dimension();
  const int t = model.truncation();
  const double volume = model.window().volume();
  SelectedBasis basis;
  basis.dimension = d;
  basis.max_abs.assign(d, 0);

  std::vector<int> k(d);
  // Pairs keyed by lattice index of the canonical frequency, to tighten the
  // envelope when both the cosine and the sine of one frequency are drawn.
  std::unordered_set<std::size_t> canonical_seen;
  bool has_constant = false;
  const auto& beta = model.eigenvalues();
  const std::size_t total = beta.size();
  for (std::size_t index = 0; index < total; ++index) {
    if (!(rng.uniform() < beta[index])) continue;
    lattice_point(index, t, d, k.data());
    const int o = orientation(k.data(), d);
    if (o == 0) {
      basis.wave.push_back(Wave::constant);
      has_constant = true;
      basis.freq.insert(basis.freq.end(), k.begin(), k.end());
      continue;
    }
    if (o < 0) {
      for (int& v : k) v = -v;
    }
    basis.wave.push_back(o > 0 ? Wave::cosine : Wave::sine);
    basis.freq.insert(basis.freq.end(), k.begin(), k.end());
    for (int i = 0; i < d; ++i) basis.max_abs[i] = std::max(basis.max_abs[i], std::abs(k[i]));
    // Mirror of index i in the lattice is total - 1 - i.
    canonical_seen.insert(o > 0 ? index : total - 1 - index);
  }
  basis.bound = ((has_constant ? 1.0 : 0.0) + 2.0 * canonical_seen.size()) / volume;
  return basis;
}

// Values of the selected eigenfunctions at a point.
class BasisEvaluator {
 public:
  BasisEvaluator(const SelectedBasis& basis, const Window& window)
      : basis_(basis), window_(window) {
    const int d = basis.dimension;
    offsets_.resize(d + 1, 0);
    for (int i = 0; i < d; ++i) offsets_[i + 1] = offsets_[i] + basis.max_abs[i] + 1;
    cos_.resize(offsets_[d]);
    sin_.resize(offsets_[d]);
    norm_ = std::sqrt(1.0 / window.volume());
  }

  void evaluate(std::span<const double> x, Eigen::Ref<Eigen::VectorXd> out) {
    const int d = basis_.dimension;
    for (int i = 0; i < d; ++i) {
      const double step = kTwoPi * (x[i] - window_.axis(i).lo) / window_.side(i);
      double* c = cos_.data() + offsets_[i];
      double* s = sin_.data() + offsets_[i];
      const int top = basis_.max_abs[i];
      // Angle addition from exp(i step); the drift is O(k eps).
      const double c1 = std::cos(step);
      const double s1 = std::sin(step);
      c[0] = 1.0;
      s[0] = 0.0;
      for (int k = 1; k <= top; ++k) {
        c[k] = c[k - 1] * c1 - s[k - 1] * s1;
        s[k] = s[k - 1] * c1 + c[k - 1] * s1;
      }
    }
    const double root2 = std::numbers::sqrt2 * norm_;
    const std::size_t n = basis_.size();
    for (std::size_t j = 0; j < n; ++j) {
      const int* k = basis_.freq.data() + j * d;
      if (basis_.wave[j] == Wave::constant) {
        out[j] = norm_;
        continue;
      }
      // exp(i sum_a theta_a) as a product of per-axis unit complex numbers.
      double re = 1.0;
      double im = 0.0;
      for (int a = 0; a < d; ++a) {
        const int ka = k[a];
        const double c = cos_[offsets_[a] + std::abs(ka)];
        const double s = ka < 0 ? -sin_[offsets_[a] - ka] : sin_[offsets_[a] + ka];
        const double nre = re * c - im * s;
        im = re * s + im * c;
        re = nre;
      }
      out[j] = root2 * (basis_.wave[j] == Wave::cosine ? re : im);
    }
  }

 private:
  const SelectedBasis& basis_;
  const Window& window_;
  std::vector<int> offsets_;
  std::vector<double> cos_;
  std::vector<double> sin_;
  double norm_;
};

// Orthonormal columns spanning the coefficient directions not yet explained
// by accepted points. Reflections are deferred in blocks and kept in
// compact WY form, basis (I - Y T Y^T), so the n x m update runs as matrix
// products instead of one rank-one pass per point.
class Complement {
 public:
  explicit Complement(Eigen::Index n)
      : basis_(Eigen::MatrixXd::Identity(n, n)),
        y_(Eigen::MatrixXd::Zero(n, kBlock)),
        t_(Eigen::MatrixXd::Zero(kBlock, kBlock)),
        base_(n) {}

  Eigen::Index rank() const { return base_ - pending_; }

  // Coordinates of the columns of v; the first rank() rows are meaningful.
  void project(const Eigen::MatrixXd& v, Eigen::MatrixXd& out) {
    out.noalias() = basis_.leftCols(base_).transpose() * v;
    if (pending_ == 0) return;
    const auto y = y_.topLeftCorner(base_, pending_);
    const auto t = t_.topLeftCorner(pending_, pending_);
    inner_.noalias() = y.transpose() * out;
    scaled_.noalias() = t.transpose() * inner_;
    out.noalias() -= y * scaled_;
  }

  // Reflects the current coordinates so that w lands on the last column,
  // then drops that column.
  void remove(const Eigen::Ref<const Eigen::VectorXd>& w) {
    const Eigen::Index m = rank();
    const Eigen::Index k = pending_;
    const double w_norm = w.norm();
    auto y = y_.col(k).head(base_);
    y.setZero();
    y.head(m) = w;
    y(m - 1) += w(m - 1) >= 0.0 ? w_norm : -w_norm;
    const double norm2 = y.squaredNorm();
    const double tau = norm2 > 0.0 ? 2.0 / norm2 : 0.0;
    if (k > 0) {
      coupling_.noalias() = y_.topLeftCorner(base_, k).transpose() * y;
      t_.col(k).head(k).noalias() = -tau * (t_.topLeftCorner(k, k) * coupling_);
    }
    t_(k, k) = tau;
    ++pending_;
    if (pending_ == kBlock) flush();
  }

  void flush() {
    if (pending_ == 0) return;
    const Eigen::Index m = rank();
    const auto y = y_.topLeftCorner(base_, pending_);
    const auto t = t_.topLeftCorner(pending_, pending_);
    inner_.noalias() = basis_.leftCols(base_) * y;
    scaled_.noalias() = inner_ * t;
    basis_.leftCols(m).noalias() -= scaled_ * y.topRows(m).transpose();
    base_ = m;
    pending_ = 0;
  }

  void reorthonormalize() {
    flush();
    auto kept = basis_.leftCols(base_);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(kept);
    kept = qr.householderQ() * Eigen::MatrixXd::Identity(basis_.rows(), base_);
  }

 private:
  static constexpr Eigen::Index kBlock = 32;

  Eigen::MatrixXd basis_;
  Eigen::MatrixXd y_;
  Eigen::MatrixXd t_;
  Eigen::MatrixXd inner_;
  Eigen::MatrixXd scaled_;
  Eigen::VectorXd coupling_;
  Eigen::Index base_;
  Eigen::Index pending_ = 0;
};

}  // namespace

SpectralModel::SpectralModel(Window window, int truncation, std::vector<double> eigenvalues,
                             std::string digest)
    : window_(std::move(window)),
      truncation_(truncation),
      eigenvalues_(std::move(eigenvalues)),
      digest_(std::move(digest)) {
  if (truncation_ < 0) throw ConfigError("truncation must be non-negative");
  if (eigenvalues_.size() != lattice_size(truncation_, window_.dimension())) {
    throw ConfigError("eigenvalue count does not match the truncated lattice");
  }
  eigenvalue_sum_ = 0.0;
  for (const double b : eigenvalues_) {
    if (!(b >= 0.0 && b < 1.0)) throw ConfigError("eigenvalues must lie in [0, 1)");
    eigenvalue_sum_ += b;
  }
}

double SpectralModel::count_variance() const {
  double v = 0.0;
  for (const double b : eigenvalues_) v += b * (1.0 - b);
  return v;
}

std::vector<int> SpectralModel::frequency(std::size_t index) const {
  std::vector<int> k(dimension());
  lattice_point(index, truncation_, dimension(), k.data());
  return k;
}

int default_truncation(const Window& window) {
  double longest = 0.0;
  for (int i = 0; i < window.dimension(); ++i) longest = std::max(longest, window.side(i));
  return static_cast<int>(std::ceil(32.0 * longest - 1e-9));
}

SpectralModel build_spectral_model(const KernelSpec& spec, const Window& window,
                                   int truncation) {
  const int d = window.dimension();
  if (spec.dimension() != d) throw ConfigError("kernel and window dimensions differ");
  if (truncation < 1) throw ConfigError("truncation must be at least 1");
  if (spec.range() >= window.min_side()) {
    throw ConfigError(fmt::format(
        "kernel range {} is not below the shortest window side {}", spec.range(),
        window.min_side()));
  }
  if (spec.range() > spec.max_range() * (1.0 + 1e-12)) {
    throw ConfigError(fmt::format("kernel range {} exceeds the admissible maximum {}",
                                  spec.range(), spec.max_range()));
  }

  const std::size_t total = lattice_size(truncation, d);
  std::vector<double> beta(total);
  std::unordered_map<double, double> by_radius;
  std::vector<int> k(d);
  for (std::size_t index = 0; index < total; ++index) {
    lattice_point(index, truncation, d, k.data());
    double rho2 = 0.0;
    for (int i = 0; i < d; ++i) {
      const double f = k[i] / window.side(i);
      rho2 += f * f;
    }
    auto [it, inserted] = by_radius.try_emplace(rho2, 0.0);
    if (inserted) it->second = spec.fourier(std::sqrt(rho2));
    beta[index] = std::clamp(it->second, 0.0, 1.0 - kEigenvalueClip);
  }

  std::string description = fmt::format("bessel d={} lambda={} R={} T={}", d, spec.intensity(),
                                        spec.range(), truncation);
  for (const Interval& a : window.axes()) description += fmt::format(" [{},{}]", a.lo, a.hi);
  return SpectralModel(window, truncation, std::move(beta), digest_hex(description));
}

PointPattern sample_dpp(const SpectralModel& model, RngStream& rng,
                        const SamplerOptions& options) {
  const Window& window = model.window();
  const int d = window.dimension();
  const SelectedBasis basis = select_functions(model, rng);
  const Eigen::Index n = static_cast<Eigen::Index>(basis.size());
  if (n == 0) return PointPattern(window);

  BasisEvaluator evaluator(basis, window);
  const double volume = window.volume();

  // The density of the next point is |complement^T v(x)|^2 / m with m the
  // remaining rank.
  Complement complement(n);
  Eigen::MatrixXd values;
  Eigen::MatrixXd gathered;
  Eigen::MatrixXd projected;
  std::vector<double> thresholds;
  std::vector<Eigen::Index> survivors;
  std::vector<double> proposals;
  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(n) * d);

  for (Eigen::Index m = n; m > 0; --m) {
    // Expected number of uniform proposals per accepted point is
    // |W| bound / m. Small batches waste little after an acceptance.
    const double expected = basis.bound * volume / static_cast<double>(m);
    const Eigen::Index batch =
        std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::ceil(0.35 * expected)), 1, 1024);
    values.resize(n, batch);
    proposals.resize(static_cast<std::size_t>(batch) * d);
    thresholds.resize(batch);

    std::uint64_t tried = 0;
    Eigen::Index accepted = -1;
    while (accepted < 0) {
      // Each proposal is accepted when u bound < |complement^T v(x)|^2.
      // Since that density never exceeds |v(x)|^2, proposals failing
      // u bound < |v(x)|^2 are dropped before the projection.
      survivors.clear();
      for (Eigen::Index b = 0; b < batch; ++b) {
        double* x = proposals.data() + b * d;
        for (int i = 0; i < d; ++i) x[i] = rng.uniform(window.axis(i).lo, window.axis(i).hi);
        thresholds[b] = rng.uniform() * basis.bound;
        evaluator.evaluate(std::span<const double>(x, d), values.col(b));
        if (thresholds[b] < values.col(b).squaredNorm()) survivors.push_back(b);
      }
      tried += static_cast<std::uint64_t>(batch);
      if (!survivors.empty()) {
        const auto s = static_cast<Eigen::Index>(survivors.size());
        gathered.resize(n, s);
        for (Eigen::Index j = 0; j < s; ++j) gathered.col(j) = values.col(survivors[j]);
        complement.project(gathered, projected);
        for (Eigen::Index j = 0; j < s; ++j) {
          if (thresholds[survivors[j]] < projected.col(j).head(m).squaredNorm()) {
            accepted = j;
            break;
          }
        }
      }
      if (accepted < 0 && tried >= options.max_proposals_per_point) {
        throw NumericError(fmt::format(
            "projection sampling stalled: point {} of {} rejected {} proposals "
            "(remaining rank {}, envelope {:g})",
            n - m + 1, n, tried, m, basis.bound));
      }
    }

    const double* x = proposals.data() + survivors[accepted] * d;
    coords.insert(coords.end(), x, x + d);
    if (m == 1) break;

    const auto w = projected.col(accepted).head(m);
    const double residual = w.norm() / gathered.col(accepted).norm();
    complement.remove(w);
    if (residual < options.reorthogonalize_below) complement.reorthonormalize();
  }
  return PointPattern(window, std::move(coords));
}

PointPattern sample_poisson(double intensity, const Window& window, RngStream& rng) {
  if (!(intensity >= 0.0)) throw ConfigError("Poisson intensity must be non-negative");
  PointPattern pattern(window);
  const double mean = intensity * window.volume();
  if (mean == 0.0) return pattern;
  std::poisson_distribution<long long> count_dist(mean);
  const long long count = count_dist(rng);
  const int d = window.dimension();
  std::vector<double> coords(static_cast<std::size_t>(count) * d);
  for (long long p = 0; p < count; ++p) {
    for (int i = 0; i < d; ++i) {
      coords[p * d + i] = rng.uniform(window.axis(i).lo, window.axis(i).hi);
    }
  }
  return PointPattern(window, std::move(coords));
}

}  // namespace dpp
