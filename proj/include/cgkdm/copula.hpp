#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace cgkdm {

// How to handle tied values inside a column. The measure assumes continuous
// marginals, so ties indicate a violated assumption; the default is to fail.
// Jitter breaks ties by a deterministic pseudo-random ordering keyed by the
// seed, so repeated runs give identical pseudo-observations.
enum class TiePolicy { Error, Jitter };

struct TieHandling {
  TiePolicy policy = TiePolicy::Error;
  std::uint64_t jitter_seed = 0;

  static TieHandling error() { return {TiePolicy::Error, 0}; }
  static TieHandling jitter(std::uint64_t seed) {
    return {TiePolicy::Jitter, seed};
  }
};

// Raw n x d data matrix with validated shape and finite entries.
class Sample {
 public:
  explicit Sample(Eigen::MatrixXd data, TieHandling ties = TieHandling::error());

  const Eigen::MatrixXd& data() const { return data_; }
  int n() const { return static_cast<int>(data_.rows()); }
  int dim() const { return static_cast<int>(data_.cols()); }
  const TieHandling& ties() const { return ties_; }

 private:
  Eigen::MatrixXd data_;
  TieHandling ties_;
};

// Normalized ranks Y with entries in {1/n, ..., 1}; every column is a
// permutation of the full grid. Integer ranks are kept alongside the real
// matrix since all kernel sums are functions of rank differences.
class PseudoSample {
 public:
  explicit PseudoSample(Eigen::MatrixXd y);

  static PseudoSample from_ranks(Eigen::MatrixXi ranks);

  const Eigen::MatrixXd& y() const { return y_; }
  const Eigen::MatrixXi& ranks() const { return ranks_; }  // values 1..n
  int n() const { return static_cast<int>(y_.rows()); }
  int dim() const { return static_cast<int>(y_.cols()); }

 private:
  PseudoSample() = default;
  Eigen::MatrixXd y_;
  Eigen::MatrixXi ranks_;
};

// Per-column ranks divided by n. Invariant under strictly increasing
// per-column maps; a strictly decreasing map sends y to (n+1)/n - y.
PseudoSample rank_transform(const Sample& s);

// Weighted atoms on [0,1]^d, used as the brute-force route for kernel
// distances on small instances.
struct DiscreteDistribution {
  Eigen::MatrixXd atoms;    // one atom per row
  Eigen::VectorXd weights;  // nonnegative, sums to 1 within 1e-12

  DiscreteDistribution(Eigen::MatrixXd atoms, Eigen::VectorXd weights);
  int size() const { return static_cast<int>(atoms.rows()); }
  int dim() const { return static_cast<int>(atoms.cols()); }
};

// Empirical copula C_n: one atom per pseudo-observation, weight 1/n.
DiscreteDistribution empirical_copula(const PseudoSample& p);

// M_n: atoms (i/n, ..., i/n) for i = 1..n, weight 1/n each.
DiscreteDistribution max_copula_grid(int n, int d);

// Pi_n: the full lattice of n^d points with weight n^-d. Materialization is
// for small-instance oracles only and is refused beyond the atom budget.
DiscreteDistribution product_copula_grid(int n, int d,
                                         std::int64_t atom_budget = 1000000);

}  // namespace cgkdm
