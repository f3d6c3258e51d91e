#include "cgkdm/datagen.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <numbers>

#include "cgkdm/errors.hpp"
#include "cgkdm/rng.hpp"

namespace cgkdm {

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  const int d = static_cast<int>(m_.rows());
  if (d < 2 || m_.cols() != d) throw InvalidDims("correlation matrix must be d x d, d >= 2");
  for (int i = 0; i < d; ++i) {
    if (std::abs(m_(i, i) - 1.0) > 1e-12) {
      throw InvalidInput("correlation matrix needs unit diagonal");
    }
    for (int j = 0; j < i; ++j) {
      if (std::abs(m_(i, j) - m_(j, i)) > 1e-12) {
        throw InvalidInput("correlation matrix must be symmetric");
      }
    }
  }
  // Try Cholesky first; fall back to an eigendecomposition for PSD matrices
  // that are singular (e.g. rho = 1).
  Eigen::LLT<Eigen::MatrixXd> llt(m_);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_);
  if (es.info() != Eigen::Success) throw NotPSD("eigendecomposition failed");
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() < -1e-10) {
    throw NotPSD("smallest eigenvalue " + std::to_string(ev.minCoeff()) +
                 " below -1e-10");
  }
  ev = ev.cwiseMax(0.0);
  factor_ = es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
}

CorrelationMatrix CorrelationMatrix::identity(int d) {
  return CorrelationMatrix(Eigen::MatrixXd::Identity(d, d));
}

CorrelationMatrix CorrelationMatrix::equicorrelated(int d, double rho) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(d, d, rho);
  m.diagonal().setOnes();
  return CorrelationMatrix(std::move(m));
}

CorrelationMatrix CorrelationMatrix::ar1(int d, double rho) {
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      m(i, j) = std::pow(rho, std::abs(i - j));
    }
  }
  return CorrelationMatrix(std::move(m));
}

namespace {

Eigen::MatrixXd standard_normal_matrix(int n, int d, RandomStream& rs) {
  Eigen::MatrixXd z(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) z(i, j) = rs.normal();
  }
  return z;
}

}  // namespace

Sample sample_mvn(const CorrelationMatrix& corr, int n, std::uint64_t seed) {
  RandomStream rs(seed);
  const Eigen::MatrixXd z = standard_normal_matrix(n, corr.dim(), rs);
  return Sample(z * corr.factor().transpose());
}

Sample sample_mvt(const CorrelationMatrix& corr, int dof, int n,
                  std::uint64_t seed) {
  if (dof < 1) throw InvalidInput("t degrees of freedom must be >= 1");
  RandomStream rs(seed);
  const int d = corr.dim();
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd z(d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) z(j) = rs.normal();
    const double w = std::sqrt(rs.chi_square(dof) / dof);
    x.row(i) = (corr.factor() * z).transpose() / w;
  }
  return Sample(std::move(x));
}

Scenario Scenario::bvn(double rho) { return {"bvn", rho, 2}; }
Scenario Scenario::mvn_equicorrelated(int d, double rho) {
  return {"mvn-equi", rho, d};
}
Scenario Scenario::mvn_ar1(int d, double rho) { return {"mvn-ar", rho, d}; }
Scenario Scenario::mvt_equicorrelated(int d, double rho, int dof) {
  Scenario s{"mvt-equi", rho, d};
  s.dof = dof;
  return s;
}
Scenario Scenario::named(const std::string& name, int d) {
  Scenario s;
  s.name = name;
  s.d = d;
  return s;
}
Scenario Scenario::monotone_orientation(const std::string& pattern) {
  Scenario s;
  s.name = "orientation";
  s.orientation = pattern;
  s.d = static_cast<int>(pattern.size());
  return s;
}

namespace {

Sample orientation_rows(const std::string& pattern, int n) {
  const int d = static_cast<int>(pattern.size());
  if (d < 2) throw InvalidInput("orientation pattern needs length >= 2");
  Eigen::MatrixXd x(n, d);
  for (int j = 0; j < d; ++j) {
    const char c = pattern[static_cast<std::size_t>(j)];
    double sign;
    if (c == '+' || c == 'u') {
      sign = 1.0;
    } else if (c == '-' || c == 'd') {
      sign = -1.0;
    } else {
      throw InvalidInput("orientation pattern characters must be + or -");
    }
    for (int i = 0; i < n; ++i) x(i, j) = sign * (i + 1);
  }
  return Sample(std::move(x));
}

Sample chained_uniform(int n, int d, double lo, double hi,
                       const std::function<double(const Eigen::VectorXd&)>& last,
                       RandomStream& rs) {
  if (d < 2) throw InvalidInput("scenario needs d >= 2");
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd head(d - 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j + 1 < d; ++j) {
      head(j) = rs.uniform(lo, hi);
      x(i, j) = head(j);
    }
    x(i, d - 1) = last(head) + rs.uniform(-1.0, 1.0);
  }
  return Sample(std::move(x));
}

}  // namespace

Sample sample_scenario(const Scenario& sc, int n, std::uint64_t seed) {
  RandomStream rs(seed);
  const std::string& id = sc.name;

  if (id == "bvn") {
    return sample_mvn(CorrelationMatrix::equicorrelated(2, sc.rho), n, seed);
  }
  if (id == "mvn-equi") {
    return sample_mvn(CorrelationMatrix::equicorrelated(sc.d, sc.rho), n, seed);
  }
  if (id == "mvn-ar") {
    return sample_mvn(CorrelationMatrix::ar1(sc.d, sc.rho), n, seed);
  }
  if (id == "mvt-equi") {
    return sample_mvt(CorrelationMatrix::equicorrelated(sc.d, sc.rho), sc.dof,
                      n, seed);
  }
  if (id == "linear-noise") {
    Eigen::MatrixXd x(n, 2);
    for (int i = 0; i < n; ++i) {
      x(i, 0) = rs.normal();
      x(i, 1) = x(i, 0) + 2.3 * rs.normal();
    }
    return Sample(std::move(x));
  }
  if (id == "cosine") {
    Eigen::MatrixXd x(n, 2);
    for (int i = 0; i < n; ++i) {
      x(i, 0) = rs.uniform(-1.0, 1.0);
      x(i, 1) = std::cos(2.0 * std::numbers::pi * x(i, 0)) + rs.uniform(-0.5, 0.5);
    }
    return Sample(std::move(x));
  }
  if (id == "additive-monotone") {
    return chained_uniform(n, sc.d, -10.0, 10.0,
                           [](const Eigen::VectorXd& h) { return h.sum(); }, rs);
  }
  if (id == "multiplicative-monotone") {
    return chained_uniform(n, sc.d, 0.0, 10.0,
                           [](const Eigen::VectorXd& h) { return h.prod(); }, rs);
  }
  if (id == "quadratic") {
    return chained_uniform(
        n, sc.d, -10.0, 10.0,
        [](const Eigen::VectorXd& h) { return h.squaredNorm(); }, rs);
  }
  if (id == "orientation") {
    return orientation_rows(sc.orientation, n);
  }

  // Stand-in shapes for the pictorial-only cases; recipes are our own.
  Eigen::MatrixXd x(n, 2);
  if (id == "fig3-h") {  // circle with radial noise
    for (int i = 0; i < n; ++i) {
      const double th = rs.uniform(0.0, 2.0 * std::numbers::pi);
      const double r = 1.0 + rs.uniform(-0.1, 0.1);
      x(i, 0) = r * std::cos(th);
      x(i, 1) = r * std::sin(th);
    }
  } else if (id == "fig3-i") {  // cross / X shape
    for (int i = 0; i < n; ++i) {
      const double t = rs.uniform(-1.0, 1.0);
      const double s = rs.uniform() < 0.5 ? 1.0 : -1.0;
      x(i, 0) = t;
      x(i, 1) = s * t + rs.uniform(-0.1, 0.1);
    }
  } else if (id == "fig3-j") {  // sine wave
    for (int i = 0; i < n; ++i) {
      x(i, 0) = rs.uniform(-1.0, 1.0);
      x(i, 1) = std::sin(4.0 * std::numbers::pi * x(i, 0)) + rs.uniform(-0.25, 0.25);
    }
  } else if (id == "fig3-k") {  // increasing staircase
    for (int i = 0; i < n; ++i) {
      x(i, 0) = rs.uniform(-1.0, 1.0);
      x(i, 1) = std::floor(2.0 * x(i, 0) + 2.0) + rs.uniform(-0.1, 0.1);
    }
  } else if (id == "fig3-l") {  // noisy increasing curve
    for (int i = 0; i < n; ++i) {
      x(i, 0) = rs.uniform(-1.0, 1.0);
      x(i, 1) = x(i, 0) * x(i, 0) * x(i, 0) + 0.15 * rs.normal();
    }
  } else if (id == "fig3-m") {  // noisy decreasing curve
    for (int i = 0; i < n; ++i) {
      x(i, 0) = rs.uniform(-1.0, 1.0);
      x(i, 1) = -x(i, 0) * x(i, 0) * x(i, 0) - 0.15 * rs.normal();
    }
  } else if (id == "fig3-n") {  // near-deterministic decreasing curve
    for (int i = 0; i < n; ++i) {
      x(i, 0) = rs.uniform(-1.0, 1.0);
      x(i, 1) = -x(i, 0) - 0.3 * x(i, 0) * x(i, 0) * x(i, 0) + rs.uniform(-0.02, 0.02);
    }
  } else {
    throw UnknownScenario("unknown scenario '" + id + "'");
  }
  return Sample(std::move(x));
}

}  // namespace cgkdm
