#include "cgkdm/estimator.hpp"

#include <cmath>

#include "cgkdm/errors.hpp"
#include "cgkdm/rng.hpp"
#include "rank_kernel.hpp"

namespace cgkdm {

EstimatorTerms estimator_terms(const PseudoSample& p, Bandwidth b) {
  if (p.n() < 2 || p.dim() < 2) {
    throw InvalidInput("estimator needs n >= 2, d >= 2");
  }
  const detail::RankKernelTables t(p.n(), b.sigma);
  const int d = p.dim();
  return EstimatorTerms{t.s1(p.ranks()), t.s2(p.ranks()), t.v1(d), t.v2(d),
                        t.v3(d)};
}

double estimate(const PseudoSample& p, Bandwidth b) {
  const EstimatorTerms t = estimator_terms(p, b);
  const double num = t.numerator();
  const double den = t.denominator();
  return std::sqrt((num < 0.0 ? 0.0 : num) / den);
}

CenteredGram centered_grams(const PseudoSample& p, Bandwidth b) {
  if (p.dim() != 2) throw DimNot2("centered Gram form requires d = 2");
  const int n = p.n();
  const detail::RankKernelTables t(n, b.sigma);
  CenteredGram g;
  for (int coord = 0; coord < 2; ++coord) {
    Eigen::MatrixXd k(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        k(i, j) = t.e1[static_cast<std::size_t>(
            std::abs(p.ranks()(i, coord) - p.ranks()(j, coord)))];
      }
    }
    const Eigen::VectorXd rowm = k.rowwise().mean();
    const Eigen::VectorXd colm = k.colwise().mean();
    const double grand = k.mean();
    Eigen::MatrixXd centered =
        k - rowm.replicate(1, n) - colm.transpose().replicate(n, 1);
    centered.array() += grand;
    (coord == 0 ? g.v : g.w) = std::move(centered);
  }
  return g;
}

double estimate_dim2_centered(const PseudoSample& p, Bandwidth b) {
  const CenteredGram g = centered_grams(p, b);
  const double vw = (g.v.array() * g.w.array()).sum();
  const double vv = (g.v.array() * g.v.array()).sum();
  const double ww = (g.w.array() * g.w.array()).sum();
  return vw / std::sqrt(vv * ww);
}

namespace {

// Kernel between one pseudo-observation row and a point of [0,1]^d.
double row_kernel(const Eigen::MatrixXd& a, int i, const Eigen::MatrixXd& c,
                  int j, double two_s2) {
  const double d2 = (a.row(i) - c.row(j)).squaredNorm();
  return std::exp(-d2 / two_s2);
}

Eigen::MatrixXd uniform_cube(int count, int d, RandomStream& rs) {
  Eigen::MatrixXd u(count, d);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < d; ++j) u(i, j) = rs.uniform();
  }
  return u;
}

}  // namespace

double estimate_type_u(const PseudoSample& p, Bandwidth b, std::uint64_t seed) {
  const int n = p.n();
  const int d = p.dim();
  if (n < 2) throw InvalidInput("type U estimator needs n >= 2");
  RandomStream rs(seed);
  const Eigen::MatrixXd u = uniform_cube(n, d, rs);
  const double two_s2 = 2.0 * b.sigma * b.sigma;
  const Eigen::MatrixXd& y = p.y();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      acc += row_kernel(y, i, y, j, two_s2) - row_kernel(y, i, u, j, two_s2) -
             row_kernel(y, j, u, i, two_s2) + row_kernel(u, i, u, j, two_s2);
    }
  }
  return acc / (static_cast<double>(n) * (n - 1));
}

double estimate_type_b(const PseudoSample& p, Bandwidth b, int m,
                       std::uint64_t seed) {
  if (m < 1) throw InvalidInput("type B estimator needs m >= 1");
  const int n = p.n();
  const int d = p.dim();
  RandomStream rs(seed);
  const Eigen::MatrixXd u = uniform_cube(m, d, rs);
  const double two_s2 = 2.0 * b.sigma * b.sigma;
  const Eigen::MatrixXd& y = p.y();
  double yy = 0.0, yu = 0.0, uu = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) yy += row_kernel(y, i, y, j, two_s2);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) yu += row_kernel(y, i, u, j, two_s2);
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) uu += row_kernel(u, i, u, j, two_s2);
  }
  const double value = yy / (static_cast<double>(n) * n) -
                       2.0 * yu / (static_cast<double>(m) * n) +
                       uu / (static_cast<double>(m) * m);
  return value < 0.0 ? 0.0 : value;
}

}  // namespace cgkdm
