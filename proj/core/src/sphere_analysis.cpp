#include "rds/sphere_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>

#include "rds/euclidean_pss.hpp"
#include "rds/geometry.hpp"
#include "rds/io.hpp"
#include "rds/random.hpp"
#include "rds/tangent_pss.hpp"

namespace rds {
namespace {

constexpr double kZeroCoord = 1e-12;
constexpr double kUnitTol = 1e-12;

struct Canonical {
  Vector y;  // |x| sorted in nonincreasing order
  int support = 0;
};

Canonical canonicalize(const Vector& x) {
  const auto n = x.size();
  if (n < 3) throw InvalidArgument("sphere cm: n must be >= 3");
  if (!x.allFinite()) throw InvalidArgument("sphere cm: non-finite point");
  if (std::abs(x.norm() - 1.0) > kUnitTol) throw InvalidArgument("sphere cm: point is not on the unit sphere");
  Canonical c;
  c.y = x.cwiseAbs();
  std::sort(c.y.begin(), c.y.end(), std::greater<>());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (c.y[i] <= kZeroCoord) c.y[i] = 0.0;
    else ++c.support;
  }
  return c;
}

// All 2^k signed sums of `values`, ascending.
std::vector<double> sorted_signed_sums(std::span<const double> values) {
  std::vector<double> sums{0.0}, lo, hi;
  sums.reserve(std::size_t{1} << values.size());
  for (double v : values) {
    lo.resize(sums.size());
    hi.resize(sums.size());
    for (std::size_t s = 0; s < sums.size(); ++s) {
      lo[s] = sums[s] - v;
      hi[s] = sums[s] + v;
    }
    sums.resize(2 * lo.size());
    std::merge(lo.begin(), lo.end(), hi.begin(), hi.end(), sums.begin());
  }
  return sums;
}

// Largest l + r <= limit over ascending lists.
std::optional<double> best_pair_sum_below(const std::vector<double>& left, const std::vector<double>& right,
                                          double limit) {
  std::optional<double> best;
  std::size_t p = right.size();
  for (double a : left) {
    while (p > 0 && a + right[p - 1] > limit) --p;
    if (p == 0) break;
    const double s = a + right[p - 1];
    if (!best || s > *best) best = s;
  }
  return best;
}

std::vector<double> without(std::span<const double> values, std::size_t skip) {
  std::vector<double> out;
  for (std::size_t j = 0; j < values.size(); ++j)
    if (j != skip) out.push_back(values[j]);
  return out;
}

// Squared 2-norm of the extreme point with free index i, given the best
// admissible signed sum of the remaining a_j = y_j sqrt(1 - y_j^2).
double extreme_norm2(const Vector& y, int i, double signed_sum) {
  const auto n = y.size();
  double base = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    if (j != i) base += 1.0 - y[j] * y[j];
  const double cap = 1.0 - y[i] * y[i];
  const double nu2 = std::min(signed_sum * signed_sum / (y[i] * y[i]), cap);
  return base + nu2;
}

struct FreeIndex {
  std::vector<double> a;  // a_j over the support
  double total = 0.0;
};

FreeIndex weights(const Canonical& c) {
  FreeIndex w;
  for (int j = 0; j < c.support; ++j) {
    w.a.push_back(c.y[j] * std::sqrt(1.0 - c.y[j] * c.y[j]));
    w.total += w.a.back();
  }
  return w;
}

// Bound and tolerance of the admissibility test |sum_{j != i} e_j a_j| <= y_i sqrt(1 - y_i^2).
double admissible_limit(const FreeIndex& w, int i) {
  const double bound = w.a[i];
  return bound + 1e-12 * (bound + w.total - w.a[i]);
}

/// tau^2 = max over free indices i of extreme_norm2, where `best_sum(i,
/// limit)` returns the largest signed sum of {a_j : j != i} not above limit.
template <typename BestSum>
double tau_squared(const Canonical& c, BestSum&& best_sum, bool prune) {
  const auto n = c.y.size();
  if (c.support == 1) return static_cast<double>(n - 1);
  const FreeIndex w = weights(c);
  std::vector<std::pair<double, int>> order;
  for (int i = 0; i < c.support; ++i) {
    const double rest = w.total - w.a[i];
    const double yi2 = c.y[i] * c.y[i];
    order.emplace_back(n - 2.0 + yi2 + std::min(1.0 - yi2, rest * rest / yi2), i);
  }
  if (prune) std::sort(order.begin(), order.end(), std::greater<>());
  double tau2 = -1.0;
  for (const auto& [upper, i] : order) {
    if (prune && upper < tau2 - 1e-15) break;
    const double limit = admissible_limit(w, i);
    const std::optional<double> s = best_sum(i, limit);
    if (!s || *s < -limit) continue;
    tau2 = std::max(tau2, extreme_norm2(c.y, i, *s));
  }
  if (tau2 < 0.0) throw NumericalFailure("sphere cm: no feasible extreme point");
  return tau2;
}

double tau_squared_split(const Canonical& c) {
  const FreeIndex w = weights(c);
  const std::span<const double> all(w.a);
  const std::size_t half = all.size() / 2;
  const std::span<const double> head = all.first(half), tail = all.subspan(half);
  const std::vector<double> head_sums = sorted_signed_sums(head), tail_sums = sorted_signed_sums(tail);
  auto best_sum = [&](int i, double limit) {
    const auto idx = static_cast<std::size_t>(i);
    if (idx < half) return best_pair_sum_below(sorted_signed_sums(without(head, idx)), tail_sums, limit);
    return best_pair_sum_below(head_sums, sorted_signed_sums(without(tail, idx - half)), limit);
  };
  return tau_squared(c, best_sum, true);
}

}  // namespace

SphereCmResult cm_projected_plusminus_exact(const Vector& x, int max_support) {
  const Canonical c = canonicalize(x);
  if (c.support > max_support) {
    std::ostringstream os;
    os << "cm_projected_plusminus_exact: support size " << c.support << " exceeds budget " << max_support
       << "; use the generic tangent cosine measure";
    throw BudgetExceeded(os.str());
  }
  const double n = static_cast<double>(x.size());
  SphereCmResult out;
  out.x = x;
  out.support_size = c.support;
  out.tau = std::sqrt(c.support == 1 ? static_cast<double>(x.size() - 1) : tau_squared_split(c));
  out.cm = 1.0 / out.tau;
  out.lower_bound = 1.0 / std::sqrt(n - 1.0);
  out.upper_bound = 1.0 / std::sqrt(n - 2.0 + c.y[0] * c.y[0]);
  return out;
}

double cm_projected_plusminus_bruteforce(const Vector& x) {
  const Canonical c = canonicalize(x);
  const FreeIndex w = weights(c);
  auto brute = [&](int i, double limit) -> std::optional<double> {
    const std::vector<double> values = without(w.a, static_cast<std::size_t>(i));
    std::optional<double> best;
    const std::size_t patterns = std::size_t{1} << values.size();
    for (std::size_t mask = 0; mask < patterns; ++mask) {
      double s = 0.0;
      for (std::size_t j = 0; j < values.size(); ++j) s += (mask >> j & 1U) ? values[j] : -values[j];
      if (s <= limit && (!best || s > *best)) best = s;
    }
    return best;
  };
  return 1.0 / std::sqrt(tau_squared(c, brute, false));
}

CrossCheckResult cross_check_generic(const Vector& x) {
  const int n = static_cast<int>(x.size());
  CrossCheckResult out;
  out.exact = cm_projected_plusminus_exact(x).cm;
  const ManifoldPoint point(Manifold::unit_sphere(n), x);
  const TangentPollingSet set = projected_pss(point, pss_plus_minus(Matrix::Identity(n, n)));
  out.generic = tangent_cosine_measure(set, tangent_basis(point, BasisMode::canonical())).cosine_measure;
  out.gap = std::abs(out.exact - out.generic);
  return out;
}

Vector special_point(int n, int k) {
  if (k < 1 || k > n) throw InvalidArgument("special_point: k must lie in [1, n]");
  Vector x = Vector::Zero(n);
  x.head(k).setConstant(1.0 / std::sqrt(static_cast<double>(k)));
  return x;
}

double special_point_cm(int n, int k) {
  if (k % 2 == 1) return 1.0 / std::sqrt(n - 2.0 + 1.0 / k);
  return 1.0 / std::sqrt(n - 1.0);
}

std::vector<HeatmapRow> sphere_heatmap(int resolution) {
  if (resolution < 8) throw InvalidArgument("sphere_heatmap: resolution must be >= 8");
  std::vector<HeatmapRow> rows;
  rows.reserve(static_cast<std::size_t>(resolution) * resolution);
  for (int i = 0; i < resolution; ++i) {
    const double theta = std::numbers::pi * i / (resolution - 1);
    for (int j = 0; j < resolution; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / resolution;
      Vector x(3);
      x << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta);
      x /= x.norm();
      rows.push_back({theta, phi, x, cm_projected_plusminus_exact(x).cm});
    }
  }
  return rows;
}

std::vector<RangeScanRow> cm_range_scan(std::span<const int> n_list, int samples_per_n, std::uint64_t seed) {
  if (samples_per_n < 1) throw InvalidArgument("cm_range_scan: samples_per_n must be >= 1");
  std::vector<RangeScanRow> rows;
  for (int n : n_list) {
    if (n < 3) throw InvalidArgument("cm_range_scan: every n must be >= 3");
    RangeScanRow row;
    row.n = n;
    row.lower = 1.0 / std::sqrt(n - 1.0);
    row.upper = std::sqrt(static_cast<double>(n)) / (n - 1.0);
    row.value_k1 = cm_projected_plusminus_exact(special_point(n, 1)).cm;
    row.value_k_nminus1 = cm_projected_plusminus_exact(special_point(n, n - 1)).cm;
    row.value_k_n = cm_projected_plusminus_exact(special_point(n, n)).cm;
    Rng rng(derive_seed({seed, static_cast<std::uint64_t>(n)}));
    double sum = 0.0;
    for (int s = 0; s < samples_per_n; ++s) sum += cm_projected_plusminus_exact(random_unit_vector(n, rng)).cm;
    row.mean_random = sum / samples_per_n;
    row.samples = samples_per_n;
    rows.push_back(row);
  }
  return rows;
}

std::vector<CorollaryRow> corollary_table(std::span<const int> n_list) {
  std::vector<CorollaryRow> rows;
  for (int n : n_list) {
    if (n < 2) throw InvalidArgument("corollary_table: n must be >= 2");
    CorollaryRow row;
    row.n = n;
    row.chi_projected = 2.0 * n * (n - 1.0);
    row.chi_intrinsic = 2.0 * (n - 1.0) * (n - 1.0);
    const Vector e = special_point(n, n);
    const ManifoldPoint point(Manifold::unit_sphere(n), e);
    const TangentPollingSet set = projected_pss(point, pss_plus_minus(Matrix::Identity(n, n)));
    row.witness_cardinality = set.cardinality();
    row.witness_cm = n >= 3 ? cm_projected_plusminus_exact(e).cm
                            : tangent_cosine_measure(set, tangent_basis(point, BasisMode::canonical())).cosine_measure;
    row.witness_chi = row.witness_cardinality / (row.witness_cm * row.witness_cm);
    rows.push_back(row);
  }
  return rows;
}

std::string heatmap_csv(const std::vector<HeatmapRow>& rows) {
  std::ostringstream os;
  os << "theta,phi,x1,x2,x3,cm\n";
  for (const HeatmapRow& r : rows)
    os << format_double(r.theta) << ',' << format_double(r.phi) << ',' << format_double(r.x[0]) << ','
       << format_double(r.x[1]) << ',' << format_double(r.x[2]) << ',' << format_double(r.cm) << '\n';
  return os.str();
}

std::string range_scan_csv(const std::vector<RangeScanRow>& rows) {
  std::ostringstream os;
  os << "n,lower,upper_at_k1,value_k1,value_k_nminus1,value_k_n,mean_random\n";
  for (const RangeScanRow& r : rows)
    os << r.n << ',' << format_double(r.lower) << ',' << format_double(r.upper) << ',' << format_double(r.value_k1)
       << ',' << format_double(r.value_k_nminus1) << ',' << format_double(r.value_k_n) << ','
       << format_double(r.mean_random) << '\n';
  return os.str();
}

std::string corollary_csv(const std::vector<CorollaryRow>& rows) {
  std::ostringstream os;
  os << "n,chi_projected,chi_intrinsic,witness_cardinality,witness_cm,witness_chi\n";
  for (const CorollaryRow& r : rows)
    os << r.n << ',' << format_double(r.chi_projected) << ',' << format_double(r.chi_intrinsic) << ','
       << r.witness_cardinality << ',' << format_double(r.witness_cm) << ',' << format_double(r.witness_chi) << '\n';
  return os.str();
}

}  // namespace rds
