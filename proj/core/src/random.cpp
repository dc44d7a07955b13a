#include "rds/random.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <vector>

namespace rds {

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * parts.size());
  for (std::uint64_t p : parts) {
    words.push_back(static_cast<std::uint32_t>(p & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

std::uint64_t fnv1a(std::span<const unsigned char> bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a(const std::string& text) {
  return fnv1a(std::span<const unsigned char>(
      reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

std::uint64_t hash_coordinates(const Vector& v) {
  std::vector<unsigned char> bytes(sizeof(double) * static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    // +0.0 and -0.0 must hash identically.
    const double x = v[i] == 0.0 ? 0.0 : v[i];
    std::memcpy(bytes.data() + sizeof(double) * static_cast<std::size_t>(i), &x, sizeof(double));
  }
  return fnv1a(bytes);
}

Vector gaussian_vector(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = normal(rng);
  return a;
}

Vector random_unit_vector(Eigen::Index n, Rng& rng) {
  for (;;) {
    Vector v = gaussian_vector(n, rng);
    const double norm = v.norm();
    if (norm > 1e-300) return v / norm;
  }
}

Matrix haar_stiefel(Eigen::Index n, Eigen::Index m, Rng& rng) {
  if (m > n) throw InvalidArgument("haar_stiefel: more columns than rows");
  for (;;) {
    Matrix g = gaussian_matrix(n, m, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    const Matrix r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    bool degenerate = false;
    for (Eigen::Index i = 0; i < m; ++i)
      if (std::abs(r(i, i)) < 1e-12) degenerate = true;
    if (degenerate) continue;
    Matrix q = qr.householderQ() * Matrix::Identity(n, m);
    for (Eigen::Index i = 0; i < m; ++i)
      if (r(i, i) < 0.0) q.col(i) = -q.col(i);
    return q;
  }
}

Matrix haar_orthogonal(Eigen::Index m, Rng& rng) { return haar_stiefel(m, m, rng); }

}  // namespace rds
