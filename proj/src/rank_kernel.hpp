#pragma once

// Internal kernel-sum machinery shared by the estimator and the test
// statistic. All sums are arranged so that the estimate is bit-identical
// under column permutations and strictly monotone per-column maps:
//  - pairwise kernel factors are multiplied in sorted order,
//  - the per-rank row-sum table is symmetrized so entry r equals entry
//    n+1-r exactly (a decreasing map sends rank r to n+1-r).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

namespace cgkdm::detail {

inline double ipow_seq(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

// Canonical-order product of small factor arrays: ascending by value, so the
// result does not depend on the incoming (column) order. Insertion sort keeps
// the per-pair cost low in the O(d n^2) loops.
inline double sorted_product(double* f, int d) {
  for (int a = 1; a < d; ++a) {
    const double key = f[a];
    int b = a - 1;
    while (b >= 0 && f[b] > key) {
      f[b + 1] = f[b];
      --b;
    }
    f[b + 1] = key;
  }
  double p = 1.0;
  for (int a = 0; a < d; ++a) p *= f[a];
  return p;
}

struct RankKernelTables {
  int n;
  double sigma;
  // e1[m] = exp(-(m / (n sigma))^2 / 2) for m = 0..n-1.
  std::vector<double> e1;
  // t1n[r] = (1/n) sum_l e1[|r - l|] for r = 1..n (index 0 unused).
  std::vector<double> t1n;

  RankKernelTables(int n_in, double sigma_in) : n(n_in), sigma(sigma_in) {
    e1.resize(static_cast<std::size_t>(n));
    const double inv = 1.0 / (n * sigma);
    for (int m = 0; m < n; ++m) {
      const double z = m * inv;
      e1[static_cast<std::size_t>(m)] = std::exp(-0.5 * z * z);
    }
    t1n.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (int r = 1; 2 * r <= n + 1; ++r) {
      double s = 0.0;
      for (int l = 1; l <= n; ++l) s += e1[static_cast<std::size_t>(std::abs(r - l))];
      t1n[static_cast<std::size_t>(r)] = s / n;
      t1n[static_cast<std::size_t>(n + 1 - r)] = s / n;
    }
  }

  // s1 = (2/n^2) sum_{i<j} k(Y_i, Y_j) + 1/n.
  double s1(const Eigen::MatrixXi& ranks) const {
    const int d = static_cast<int>(ranks.cols());
    double acc = 0.0;
    if (d == 2) {
      for (int i = 0; i < n; ++i) {
        const int a = ranks(i, 0), b = ranks(i, 1);
        for (int j = i + 1; j < n; ++j) {
          acc += e1[static_cast<std::size_t>(std::abs(a - ranks(j, 0)))] *
                 e1[static_cast<std::size_t>(std::abs(b - ranks(j, 1)))];
        }
      }
    } else {
      std::vector<double> f(static_cast<std::size_t>(d));
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          for (int c = 0; c < d; ++c) {
            f[static_cast<std::size_t>(c)] =
                e1[static_cast<std::size_t>(std::abs(ranks(i, c) - ranks(j, c)))];
          }
          acc += sorted_product(f.data(), d);
        }
      }
    }
    return 2.0 * acc / (static_cast<double>(n) * n) + 1.0 / n;
  }

  // s2 = (1/n) sum_i prod_c t1n[rank_{i,c}].
  double s2(const Eigen::MatrixXi& ranks) const {
    const int d = static_cast<int>(ranks.cols());
    double acc = 0.0;
    std::vector<double> f(static_cast<std::size_t>(d));
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < d; ++c) {
        f[static_cast<std::size_t>(c)] = t1n[static_cast<std::size_t>(ranks(i, c))];
      }
      acc += sorted_product(f.data(), d);
    }
    return acc / n;
  }

  // v1 = (2/n^2) sum_{m=1}^{n-1} (n - m) e1[m]^d + 1/n.
  double v1(int d) const {
    double acc = 0.0;
    for (int m = 1; m < n; ++m) {
      acc += (n - m) * ipow_seq(e1[static_cast<std::size_t>(m)], d);
    }
    return 2.0 * acc / (static_cast<double>(n) * n) + 1.0 / n;
  }

  // v2 = (1/n) sum_r t1n[r]^d.
  double v2(int d) const {
    double acc = 0.0;
    for (int r = 1; r <= n; ++r) acc += ipow_seq(t1n[static_cast<std::size_t>(r)], d);
    return acc / n;
  }

  // v3 = ((2/n^2) sum_{m=1}^{n-1} (n - m) e1[m] + 1/n)^d.
  double v3(int d) const {
    double acc = 0.0;
    for (int m = 1; m < n; ++m) acc += (n - m) * e1[static_cast<std::size_t>(m)];
    return ipow_seq(2.0 * acc / (static_cast<double>(n) * n) + 1.0 / n, d);
  }
};

}  // namespace cgkdm::detail
