#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cgkdm/copula.hpp"
#include "cgkdm/kernel.hpp"

namespace cgkdm {

// T_{sigma,n} = n * gamma^2(C_n, Pi_n), the unnormalized squared-distance
// statistic for the multivariate independence test.
struct TestStatistic {
  double t;  // >= 0
  int n;
  int d;
  double sigma;
};

TestStatistic test_statistic(const PseudoSample& p, Bandwidth b);

// Draws of the null distribution of T for given (n, d, sigma). The null law
// is distribution-free: ranks of i.i.d. continuous data are uniform random
// permutations, which is what gets simulated. Deterministic per seed and
// independent of thread count.
std::vector<double> simulate_null(int n, int d, Bandwidth b, int reps,
                                  std::uint64_t seed);

enum class MomentSource { MonteCarloExact, Asymptotic };

struct NullMoments {
  double mean;      // > 0
  double variance;  // > 0
  MomentSource source;
  int n;            // 0 for asymptotic
  int d;
  double sigma;
  int reps;         // 0 for asymptotic
  std::uint64_t seed;
};

// Closed-form limits of E(T) and Var(T) under the null:
//   mean = 1 + (d-1) w3^d - d w3^(d-1)
//   var  = 2 [ w1^d + 2(d-1) w2^d - 2d w2^(d-1) w1 + d w3^(2d-2) w1
//              - (d-1) w3^(2d) + d(d-1) w3^(2d-4) (w3^2 - w2)^2 ]
// with w1 = kappa(sigma/sqrt(2)), w2 = int lambda^2, w3 = kappa(sigma).
NullMoments asymptotic_moments(int d, Bandwidth b);

// Versioned JSON-lines store of simulated null moments keyed by the full
// (n, d, sigma, reps, seed) tuple. Single-writer contract; in-process access
// is serialized internally.
class MomentCache {
 public:
  explicit MomentCache(std::filesystem::path dir);

  // CGKDM_CACHE_DIR when set, otherwise ./cgkdm-cache.
  static std::filesystem::path default_dir();

  std::optional<NullMoments> lookup(int n, int d, double sigma, int reps,
                                    std::uint64_t seed) const;
  void store(const NullMoments& m);
  const std::filesystem::path& file() const { return file_; }

 private:
  std::filesystem::path file_;
};

// Mean/variance of the simulated null, optionally served from / saved to the
// cache. The exact closed forms are not published; the distribution-free null
// makes simulated moments exact up to Monte Carlo error.
NullMoments exact_null_moments(int n, int d, Bandwidth b, int reps,
                               std::uint64_t seed, MomentCache* cache = nullptr);

// Gamma(alpha, beta) matched to mean and variance:
// alpha = mean^2/var, beta = var/mean.
struct GammaFit {
  double alpha;
  double beta;
  static GammaFit from_moments(double mean, double variance);
  double quantile(double p) const;
  double upper_tail(double t) const;  // P(T > t)
};

enum class TestMethod { SimulatedNull, GammaExact, GammaAsymptotic, Auto };

std::string to_string(TestMethod m);

struct TestReport {
  TestStatistic statistic;
  TestMethod method;   // resolved method (Auto is resolved by sample size)
  double cutoff;
  double p_value;
  bool reject;         // statistic.t > cutoff
  double level;
  int reps;
  std::uint64_t seed;
  MomentSource moment_source;  // meaningful for the gamma methods
};

// Level-alpha test of independence. Method resolution for Auto follows the
// sample-size guidance: n < 20 simulated null, n > 1000 asymptotic gamma,
// otherwise exact-moment gamma.
TestReport run_test(const PseudoSample& p, Bandwidth b, TestMethod method,
                    double level, int reps, std::uint64_t seed,
                    MomentCache* cache = nullptr);

}  // namespace cgkdm
