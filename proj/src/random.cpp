#include "gaincert/random.hpp"

#include <cmath>
#include <stdexcept>

namespace gaincert {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : root_(seed), state_(seed) {}

std::uint64_t Rng::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double Rng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_gaussian() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_gauss_;
  }
  const double u1 = next_double();
  const double u2 = next_double();
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  const double a = 2.0 * 3.14159265358979323846 * u2;
  cached_gauss_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

Rng Rng::split(std::uint64_t tag) const {
  return Rng(mix64(root_ + (tag + 1) * kGolden));
}

Matrix random_gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.next_gaussian();
  }
  return m;
}

Matrix random_orthogonal(std::size_t dim, Rng& rng) {
  Matrix g = random_gaussian(dim, dim, rng);
  Matrix q(dim, dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<double> v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = g(i, j);
    for (std::size_t k = 0; k < j; ++k) {
      double dot = 0.0;
      for (std::size_t i = 0; i < dim; ++i) dot += q(i, k) * v[i];
      for (std::size_t i = 0; i < dim; ++i) v[i] -= dot * q(i, k);
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
      // A gaussian column collapsing under projection is essentially
      // impossible; fall back to a basis vector and re-orthogonalize.
      for (std::size_t i = 0; i < dim; ++i) v[i] = (i == j) ? 1.0 : 0.0;
      for (std::size_t k = 0; k < j; ++k) {
        double dot = 0.0;
        for (std::size_t i = 0; i < dim; ++i) dot += q(i, k) * v[i];
        for (std::size_t i = 0; i < dim; ++i) v[i] -= dot * q(i, k);
      }
      norm = 0.0;
      for (double x : v) norm += x * x;
      norm = std::sqrt(norm);
    }
    for (std::size_t i = 0; i < dim; ++i) q(i, j) = v[i] / norm;
  }
  return q;
}

SpdMatrix random_spd(std::size_t dim, double log10_lo, double log10_hi, Rng& rng) {
  if (dim == 0) throw std::invalid_argument("random_spd: dimension must be at least 1");
  if (log10_lo > log10_hi) {
    throw std::invalid_argument("random_spd: eigenvalue range is inverted");
  }
  const Matrix q = random_orthogonal(dim, rng);
  std::vector<double> mu(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    mu[i] = std::pow(10.0, log10_lo + rng.next_double() * (log10_hi - log10_lo));
  }
  Matrix qd(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) qd(i, j) = q(i, j) * mu[j];
  }
  return SpdMatrix(SymmetricMatrix(qd * transpose(q)));
}

SpdMatrix random_spd(std::size_t dim, double log10_lo, double log10_hi, std::uint64_t seed) {
  Rng rng(seed);
  return random_spd(dim, log10_lo, log10_hi, rng);
}

}  // namespace gaincert
