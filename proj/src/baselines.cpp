#include "cgkdm/baselines.hpp"

#include <cmath>

#include "cgkdm/errors.hpp"
#include "cgkdm/estimator.hpp"

namespace cgkdm {

namespace {

double pearson_columns(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const int n = static_cast<int>(x.size());
  const double mx = x.mean();
  const double my = y.mean();
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dx = x(i) - mx;
    const double dy = y(i) - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw ZeroVariance("constant column in correlation");
  }
  return sxy / std::sqrt(sxx * syy);
}

void require_dim2(int d, const char* what) {
  if (d != 2) throw DimNot2(std::string(what) + " requires d = 2");
}

}  // namespace

double pearson(const Sample& s) {
  require_dim2(s.dim(), "pearson");
  return pearson_columns(s.data().col(0), s.data().col(1));
}

double spearman(const Sample& s) {
  require_dim2(s.dim(), "spearman");
  const PseudoSample p = rank_transform(s);
  return pearson_columns(p.y().col(0), p.y().col(1));
}

double kendall(const Sample& s) {
  require_dim2(s.dim(), "kendall");
  const PseudoSample p = rank_transform(s);  // enforces the tie policy
  const int n = p.n();
  long long concordant_minus_discordant = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int a = p.ranks()(i, 0) - p.ranks()(j, 0);
      const int b = p.ranks()(i, 1) - p.ranks()(j, 1);
      concordant_minus_discordant += ((a > 0) == (b > 0)) ? 1 : -1;
    }
  }
  return 2.0 * static_cast<double>(concordant_minus_discordant) /
         (static_cast<double>(n) * (n - 1));
}

double dcor(const Sample& s) {
  require_dim2(s.dim(), "dcor");
  const int n = s.n();
  auto centered_abs = [&](int col) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        a(i, j) = std::abs(s.data()(i, col) - s.data()(j, col));
      }
    }
    const Eigen::VectorXd rowm = a.rowwise().mean();
    const Eigen::VectorXd colm = a.colwise().mean();
    const double grand = a.mean();
    Eigen::MatrixXd c = a - rowm.replicate(1, n) - colm.transpose().replicate(n, 1);
    c.array() += grand;
    return c;
  };
  const Eigen::MatrixXd A = centered_abs(0);
  const Eigen::MatrixXd B = centered_abs(1);
  const double vxy = (A.array() * B.array()).mean();
  const double vxx = (A.array() * A.array()).mean();
  const double vyy = (B.array() * B.array()).mean();
  if (vxx == 0.0 || vyy == 0.0) {
    throw DegenerateSample("constant column gives zero distance variance");
  }
  const double r2 = vxy / std::sqrt(vxx * vyy);
  return r2 <= 0.0 ? 0.0 : std::sqrt(r2);
}

double mv_spearman_rho2(const PseudoSample& p) {
  const int n = p.n();
  const int d = p.dim();
  if (d < 2) throw InvalidDims("multivariate Spearman rho needs d >= 2");
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double prod = 1.0;
    for (int j = 0; j < d; ++j) prod *= p.y()(i, j);
    acc += prod;
  }
  const double two_d = std::ldexp(1.0, d);  // 2^d
  const double h = two_d * acc / n - 1.0;
  return (d + 1) / (two_d - (d + 1)) * h;
}

std::pair<double, double> cgkdm_weighted_dcor_check(const PseudoSample& p,
                                                    Bandwidth b) {
  if (p.dim() != 2) throw DimNot2("weighted dCor identity requires d = 2");
  const double direct = estimate(p, b);
  const double r2 = estimate_dim2_centered(p, b);
  return {direct, std::sqrt(r2 < 0.0 ? 0.0 : r2)};
}

}  // namespace cgkdm
