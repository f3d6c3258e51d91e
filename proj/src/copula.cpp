#include "cgkdm/copula.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "cgkdm/errors.hpp"
#include "cgkdm/rng.hpp"

namespace cgkdm {

Sample::Sample(Eigen::MatrixXd data, TieHandling ties)
    : data_(std::move(data)), ties_(ties) {
  if (data_.rows() < 2 || data_.cols() < 2) {
    throw InvalidDims("sample needs n >= 2 rows and d >= 2 columns, got " +
                      std::to_string(data_.rows()) + "x" +
                      std::to_string(data_.cols()));
  }
  if (!data_.allFinite()) {
    throw InvalidInput("sample contains non-finite entries");
  }
}

PseudoSample::PseudoSample(Eigen::MatrixXd y) {
  const int n = static_cast<int>(y.rows());
  const int d = static_cast<int>(y.cols());
  if (n < 1 || d < 1) throw InvalidDims("empty pseudo-sample");
  Eigen::MatrixXi ranks(n, d);
  std::vector<bool> seen(static_cast<std::size_t>(n));
  for (int j = 0; j < d; ++j) {
    std::fill(seen.begin(), seen.end(), false);
    for (int i = 0; i < n; ++i) {
      const double r = y(i, j) * n;
      const long long ri = std::llround(r);
      if (ri < 1 || ri > n || std::abs(r - static_cast<double>(ri)) > 1e-9) {
        throw InvalidInput("pseudo-sample entry off the {1/n,...,1} grid");
      }
      if (seen[static_cast<std::size_t>(ri - 1)]) {
        throw InvalidInput("pseudo-sample column is not a permutation");
      }
      seen[static_cast<std::size_t>(ri - 1)] = true;
      ranks(i, j) = static_cast<int>(ri);
    }
  }
  y_ = std::move(y);
  ranks_ = std::move(ranks);
}

PseudoSample PseudoSample::from_ranks(Eigen::MatrixXi ranks) {
  const int n = static_cast<int>(ranks.rows());
  const int d = static_cast<int>(ranks.cols());
  if (n < 1 || d < 1) throw InvalidDims("empty pseudo-sample");
  PseudoSample p;
  p.y_ = ranks.cast<double>() / static_cast<double>(n);
  p.ranks_ = std::move(ranks);
  // Validate the permutation property.
  std::vector<bool> seen(static_cast<std::size_t>(n));
  for (int j = 0; j < d; ++j) {
    std::fill(seen.begin(), seen.end(), false);
    for (int i = 0; i < n; ++i) {
      const int r = p.ranks_(i, j);
      if (r < 1 || r > n || seen[static_cast<std::size_t>(r - 1)]) {
        throw InvalidInput("ranks do not form a permutation of 1..n");
      }
      seen[static_cast<std::size_t>(r - 1)] = true;
    }
  }
  return p;
}

PseudoSample rank_transform(const Sample& s) {
  const int n = s.n();
  const int d = s.dim();
  Eigen::MatrixXi ranks(n, d);
  std::vector<int> order(static_cast<std::size_t>(n));

  // Tie-break keys: a deterministic pseudo-random value per cell, used only
  // under the Jitter policy. Equivalent to an infinitesimal perturbation.
  const bool jitter = s.ties().policy == TiePolicy::Jitter;
  RandomStream root(s.ties().jitter_seed);

  for (int j = 0; j < d; ++j) {
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::uint64_t> keys;
    if (jitter) {
      keys.resize(static_cast<std::size_t>(n));
      RandomStream col = root.substream(static_cast<std::uint64_t>(j));
      for (int i = 0; i < n; ++i) keys[static_cast<std::size_t>(i)] = col.next_u64();
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double xa = s.data()(a, j);
      const double xb = s.data()(b, j);
      if (xa != xb) return xa < xb;
      if (jitter)
        return keys[static_cast<std::size_t>(a)] < keys[static_cast<std::size_t>(b)];
      return a < b;
    });
    for (int k = 0; k + 1 < n; ++k) {
      if (s.data()(order[static_cast<std::size_t>(k)], j) ==
              s.data()(order[static_cast<std::size_t>(k + 1)], j) &&
          !jitter) {
        throw TiesPresent("ties in column " + std::to_string(j) +
                          "; continuous marginals assumed (use jitter policy)");
      }
    }
    for (int k = 0; k < n; ++k) ranks(order[static_cast<std::size_t>(k)], j) = k + 1;
  }
  return PseudoSample::from_ranks(std::move(ranks));
}

DiscreteDistribution::DiscreteDistribution(Eigen::MatrixXd atoms_in,
                                           Eigen::VectorXd weights_in)
    : atoms(std::move(atoms_in)), weights(std::move(weights_in)) {
  if (atoms.rows() != weights.size() || atoms.rows() == 0) {
    throw InvalidDims("atom/weight size mismatch");
  }
  if ((weights.array() < 0.0).any()) {
    throw InvalidInput("negative atom weight");
  }
  // Compensated summation: the 1e-12 contract is on the mathematical sum,
  // not on naive accumulation over possibly ~1e6 atoms.
  double sum = 0.0, comp = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    const double w = weights(i);
    const double t = sum + w;
    comp += std::abs(sum) >= std::abs(w) ? (sum - t) + w : (w - t) + sum;
    sum = t;
  }
  if (std::abs(sum + comp - 1.0) > 1e-12) {
    throw InvalidInput("atom weights must sum to 1");
  }
  if ((atoms.array() < 0.0).any() || (atoms.array() > 1.0).any()) {
    throw InvalidInput("atom coordinates must lie in [0,1]");
  }
}

DiscreteDistribution empirical_copula(const PseudoSample& p) {
  const int n = p.n();
  return DiscreteDistribution(
      p.y(), Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

DiscreteDistribution max_copula_grid(int n, int d) {
  if (n < 1 || d < 2) throw InvalidDims("max copula grid needs n >= 1, d >= 2");
  Eigen::MatrixXd atoms(n, d);
  for (int i = 0; i < n; ++i) {
    atoms.row(i).setConstant(static_cast<double>(i + 1) / n);
  }
  return DiscreteDistribution(
      std::move(atoms), Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

DiscreteDistribution product_copula_grid(int n, int d,
                                         std::int64_t atom_budget) {
  if (n < 1 || d < 2) throw InvalidDims("product copula grid needs n >= 1, d >= 2");
  double count_fp = 1.0;
  for (int j = 0; j < d; ++j) count_fp *= n;
  if (count_fp > static_cast<double>(atom_budget)) {
    throw BudgetExceeded("n^d = " + std::to_string(count_fp) +
                         " atoms exceeds budget " + std::to_string(atom_budget));
  }
  const std::int64_t count = static_cast<std::int64_t>(count_fp);
  Eigen::MatrixXd atoms(count, d);
  std::vector<int> idx(static_cast<std::size_t>(d), 1);
  for (std::int64_t row = 0; row < count; ++row) {
    for (int j = 0; j < d; ++j) {
      atoms(row, j) = static_cast<double>(idx[static_cast<std::size_t>(j)]) / n;
    }
    for (int j = d - 1; j >= 0; --j) {
      if (++idx[static_cast<std::size_t>(j)] <= n) break;
      idx[static_cast<std::size_t>(j)] = 1;
    }
  }
  return DiscreteDistribution(
      std::move(atoms),
      Eigen::VectorXd::Constant(count, 1.0 / static_cast<double>(count)));
}

}  // namespace cgkdm
