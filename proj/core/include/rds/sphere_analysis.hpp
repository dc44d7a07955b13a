#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rds/types.hpp"

namespace rds {

/// Exact cosine measure of the projected +/- coordinate basis at a point of
/// S^{n-1}, with the worst-case bounds that bracket it.
struct SphereCmResult {
  Vector x;
  int support_size = 0;  // nonzero coordinates (|x_i| > 1e-12)
  double tau = 0.0;      // max 2-norm over the polytope Q_x
  double cm = 0.0;       // 1 / tau
  double lower_bound = 0.0;  // 1/sqrt(n-1)
  double upper_bound = 0.0;  // 1/sqrt(n-2+|x|_inf^2)
};

inline constexpr int kDefaultMaxSupport = 40;

/// cm_x of the projected +/- basis via the extreme points of
///   Q_x = {u : |u_i| <= sqrt(1 - x_i^2), u^T x = 0}.
/// Coordinates are first sorted by magnitude and made nonnegative (the value
/// is invariant under signed permutations). For each free index i the best
/// sign pattern of the remaining support is found by a meet-in-the-middle
/// search over signed sums, which returns the same optimum as the plain
/// 2^{k-1} enumeration.
SphereCmResult cm_projected_plusminus_exact(const Vector& x, int max_support = kDefaultMaxSupport);

/// Reference implementation enumerating all 2^{k-1} sign patterns per index.
/// Exponential; test and cross-check use only.
double cm_projected_plusminus_bruteforce(const Vector& x);

struct CrossCheckResult {
  double exact = 0.0;
  double generic = 0.0;
  double gap = 0.0;
};

/// Compares the structured computation with the generic tangent cosine
/// measure of the actually projected set.
CrossCheckResult cross_check_generic(const Vector& x);

/// x with k leading coordinates equal to 1/sqrt(k), rest zero.
Vector special_point(int n, int k);

/// 1/sqrt(n-2+1/k) for odd k, 1/sqrt(n-1) for even k.
double special_point_cm(int n, int k);

struct HeatmapRow {
  double theta = 0.0;
  double phi = 0.0;
  Vector x;
  double cm = 0.0;
};

/// Equiangular (theta, phi) grid on S^2; theta in [0, pi] (resolution
/// samples, both poles included), phi in [0, 2 pi) (resolution samples).
std::vector<HeatmapRow> sphere_heatmap(int resolution);

struct RangeScanRow {
  int n = 0;
  double lower = 0.0;
  double upper = 0.0;  // sqrt(n)/(n-1)
  double value_k1 = 0.0;
  double value_k_nminus1 = 0.0;
  double value_k_n = 0.0;
  double mean_random = 0.0;
  int samples = 0;
};

std::vector<RangeScanRow> cm_range_scan(std::span<const int> n_list, int samples_per_n, std::uint64_t seed);

struct CorollaryRow {
  int n = 0;
  double chi_projected = 0.0;  // 2n(n-1)
  double chi_intrinsic = 0.0;  // 2(n-1)^2
  int witness_cardinality = 0;  // projected set size at (1,...,1)/sqrt(n)
  double witness_cm = 0.0;
  double witness_chi = 0.0;
};

std::vector<CorollaryRow> corollary_table(std::span<const int> n_list);

std::string heatmap_csv(const std::vector<HeatmapRow>& rows);
std::string range_scan_csv(const std::vector<RangeScanRow>& rows);
std::string corollary_csv(const std::vector<CorollaryRow>& rows);

}  // namespace rds
