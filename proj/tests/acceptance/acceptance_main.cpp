// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exit code is the number of failures.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cgkdm/baselines.hpp"
#include "cgkdm/copula.hpp"
#include "cgkdm/datagen.hpp"
#include "cgkdm/errors.hpp"
#include "cgkdm/estimator.hpp"
#include "cgkdm/experiments.hpp"
#include "cgkdm/independence.hpp"
#include "cgkdm/kernel.hpp"
#include "cgkdm/parallel.hpp"
#include "cgkdm/rng.hpp"
#include "cgkdm/special.hpp"
#include "cgkdm/theory.hpp"

using namespace cgkdm;

namespace {

class Check {
 public:
  void require(bool ok, const std::string& detail) {
    if (!ok && first_failure_.empty()) first_failure_ = detail;
    ok_ = ok_ && ok;
  }
  bool ok() const { return ok_; }
  const std::string& detail() const { return first_failure_; }

 private:
  bool ok_ = true;
  std::string first_failure_;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

Eigen::MatrixXd random_matrix(int n, int d, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist;
  Eigen::MatrixXd m(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = dist(gen);
  }
  return m;
}

// Brute-force estimate over materialized grids. Cross terms enumerate every
// atom pair; the Pi_n self-term enumerates the one-dimensional grid pairwise
// and raises to the d-th power (Pi_n is a product measure; the identity
// against the fully materialized double sum is unit-tested).
double brute_force_estimate(const PseudoSample& p, double sigma) {
  const int n = p.n();
  const int d = p.dim();
  const double two_s2 = 2.0 * sigma * sigma;
  const DiscreteDistribution cn = empirical_copula(p);
  const DiscreteDistribution mn = max_copula_grid(n, d);
  const DiscreteDistribution pin = product_copula_grid(n, d);
  auto pair_sum = [&](const DiscreteDistribution& a, const DiscreteDistribution& b) {
    double acc = 0.0;
    for (int i = 0; i < a.size(); ++i) {
      double row = 0.0;
      for (int j = 0; j < b.size(); ++j) {
        row += b.weights(j) *
               std::exp(-(a.atoms.row(i) - b.atoms.row(j)).squaredNorm() / two_s2);
      }
      acc += a.weights(i) * row;
    }
    return acc;
  };
  double pi_one_dim = 0.0;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      const double diff = static_cast<double>(i - j) / n;
      pi_one_dim += std::exp(-diff * diff / two_s2);
    }
  }
  pi_one_dim /= static_cast<double>(n) * n;
  const double pi_self = std::pow(pi_one_dim, d);
  const double num = pair_sum(cn, cn) - 2.0 * pair_sum(cn, pin) + pi_self;
  const double den = pair_sum(mn, mn) - 2.0 * pair_sum(mn, pin) + pi_self;
  return std::sqrt(num / den);
}

// --------------------------------------------------------------------------

Check criterion1_oracle_equivalence() {
  Check c;
  const int fixtures = 200;
  std::vector<double> gaps(static_cast<std::size_t>(fixtures), 0.0);
  parallel_for_index(fixtures, [&](std::int64_t t) {
    std::mt19937 gen(9000u + static_cast<unsigned>(t));
    const int n = 2 + static_cast<int>(gen() % 19);   // 2..20
    const int d = 2 + static_cast<int>(gen() % 3);    // 2..4
    const double sigma = (t % 2 == 0) ? 0.2 : 1.0;
    const PseudoSample p =
        rank_transform(Sample(random_matrix(n, d, 500u + static_cast<unsigned>(t))));
    gaps[static_cast<std::size_t>(t)] =
        std::abs(estimate(p, Bandwidth(sigma)) - brute_force_estimate(p, sigma));
  });
  const double worst = *std::max_element(gaps.begin(), gaps.end());
  c.require(worst <= 1e-10, fmt("worst |closed form - oracle| = %.3e", worst));
  return c;
}

Check criterion2_dim2_identity() {
  Check c;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::mt19937 gen(4242u + static_cast<unsigned>(t));
    const int n = 5 + static_cast<int>(gen() % 96);  // 5..100
    const double sigma = (t % 2 == 0) ? 0.35 : 1.0;
    const PseudoSample p =
        rank_transform(Sample(random_matrix(n, 2, 700u + static_cast<unsigned>(t))));
    const double direct = estimate(p, Bandwidth(sigma));
    const double centered = estimate_dim2_centered(p, Bandwidth(sigma));
    worst = std::max(worst, std::abs(centered - direct * direct));
  }
  c.require(worst <= 1e-10, fmt("worst |centered - estimate^2| = %.3e", worst));
  return c;
}

Check criterion3_normalizer_mc() {
  Check c;
  for (const int d : {2, 5, 10}) {
    for (const double sigma : {0.2 * std::sqrt(d / 2.0), std::sqrt(d / 2.0)}) {
      const int reps = 1000000;
      const int batches = 100;
      std::vector<double> mean(batches, 0.0), sq(batches, 0.0);
      RandomStream root(20250101u + static_cast<std::uint64_t>(d));
      parallel_for_index(batches, [&](std::int64_t bi) {
        RandomStream rs = root.substream(static_cast<std::uint64_t>(bi) * 7919 +
                                         static_cast<std::uint64_t>(sigma * 1e6));
        const int count = reps / batches;
        const double two_s2 = 2.0 * sigma * sigma;
        std::vector<double> t(static_cast<std::size_t>(d)), tp(static_cast<std::size_t>(d));
        double acc = 0.0, acc2 = 0.0;
        for (int r = 0; r < count; ++r) {
          const double u = rs.uniform(), up = rs.uniform();
          for (auto& v : t) v = rs.uniform();
          for (auto& v : tp) v = rs.uniform();
          const double kss = std::exp(-d * (u - up) * (u - up) / two_s2);
          double d2 = 0.0;
          for (int k = 0; k < d; ++k) {
            const double diff = u - t[static_cast<std::size_t>(k)];
            d2 += diff * diff;
          }
          const double kst = std::exp(-d2 / two_s2);
          d2 = 0.0;
          for (int k = 0; k < d; ++k) {
            const double diff = t[static_cast<std::size_t>(k)] - tp[static_cast<std::size_t>(k)];
            d2 += diff * diff;
          }
          const double h = kss - 2.0 * kst + std::exp(-d2 / two_s2);
          acc += h;
          acc2 += h * h;
        }
        mean[static_cast<std::size_t>(bi)] = acc / count;
        sq[static_cast<std::size_t>(bi)] = acc2 / count;
      });
      double m = 0.0, s2 = 0.0;
      for (int bi = 0; bi < batches; ++bi) {
        m += mean[static_cast<std::size_t>(bi)];
        s2 += sq[static_cast<std::size_t>(bi)];
      }
      m /= batches;
      s2 = s2 / batches - m * m;
      const double se = std::sqrt(s2 / reps);
      const double inv = normalizer(Bandwidth(sigma), d).inv();
      c.require(std::abs(inv - m) <= 3.0 * se,
                "d=" + std::to_string(d) +
                    fmt(" sigma=%.3f: |gap| %.3e > 3*%.2e", sigma,
                        std::abs(inv - m), se));
    }
  }
  return c;
}

Check criterion4_monotone_exactness() {
  Check c;
  const char* patterns[8] = {"+++", "++-", "++++", "+++-",
                             "++--", "+++++", "++++-", "+++--"};
  const double rho_refs[8] = {1.0004, -0.3330, 1.0003, -0.0907,
                              -0.2120, 1.0003, 0.0155, -0.1076};
  std::vector<double> est_gap(8, 0.0), rho_gap(8, 0.0);
  parallel_for_index(8, [&](std::int64_t i) {
    const Sample s = sample_scenario(
        Scenario::monotone_orientation(patterns[static_cast<std::size_t>(i)]),
        10000, 1);
    const PseudoSample p = rank_transform(s);
    est_gap[static_cast<std::size_t>(i)] =
        std::abs(estimate(p, Bandwidth(1.0)) - 1.0);
    rho_gap[static_cast<std::size_t>(i)] =
        std::abs(mv_spearman_rho2(p) - rho_refs[static_cast<std::size_t>(i)]);
  });
  for (int i = 0; i < 8; ++i) {
    c.require(est_gap[static_cast<std::size_t>(i)] <= 1e-9,
              fmt("pattern %.0f: |I - 1| = %.3e", double(i),
                  est_gap[static_cast<std::size_t>(i)]));
    c.require(rho_gap[static_cast<std::size_t>(i)] <= 0.005,
              fmt("pattern %.0f: |rho - printed| = %.4f", double(i),
                  rho_gap[static_cast<std::size_t>(i)]));
  }
  return c;
}

Check criterion5_table1() {
  Check c;
  ExperimentConfig cfg;
  cfg.id = "table1";
  cfg.reps = 2000;
  cfg.n = 200;
  cfg.seed = 7;
  const ExperimentResult result = run_experiment(cfg);
  for (const ResultRow& row : result.rows) {
    const double gap = std::abs(row.value - *row.reference);
    c.require(gap <= 0.02, row.scenario + " " + row.metric +
                               fmt(": |%.4f - %.4f| > 0.02", row.value,
                                   *row.reference));
  }
  return c;
}

Check criterion6_bvn_bound() {
  Check c;
  for (const double sigma : {0.2, 1.0}) {
    const Bandwidth b(sigma);
    const HermiteSeries series = hermite_coeffs(b, 90);
    const double c2 = normalizer(b, 2).c_sigma_d;
    double prev = -1.0;
    for (int i = 0; i <= 10; ++i) {
      const double rho = i / 10.0;
      const double v = cgkdm_bvn(rho, series, c2);
      c.require(v + 1e-12 >= prev, fmt("sigma=%.1f: I(%.1f) decreases", sigma, rho));
      c.require(v <= rho + 1e-6,
                fmt("sigma=%.1f: I(%.1f)=%.6f above rho", sigma, rho, v));
      prev = v;
    }
    for (const double rho : {0.3, 0.7}) {
      const PopulationEstimate mc = cgkdm_population_mc(
          gaussian_copula_sampler(rho), b, 2, 2000000,
          91 + static_cast<std::uint64_t>(rho * 10));
      const double series_sq = std::pow(cgkdm_bvn(rho, series, c2), 2);
      c.require(std::abs(series_sq - mc.value) <= 3.0 * mc.std_error,
                fmt("sigma=%.1f rho=%.1f: |series^2 - MC| too big", sigma, rho));
    }
  }
  return c;
}

Check criterion7_sizes() {
  Check c;
  const std::filesystem::path cache_dir =
      std::filesystem::temp_directory_path() / "cgkdm-acceptance-cache7";
  ExperimentConfig cfg;
  cfg.id = "table4";
  cfg.reps = 20000;
  cfg.level = 0.05;
  cfg.seed = 11;
  cfg.cache_dir = cache_dir;
  const ExperimentResult result = run_experiment(cfg);
  for (const ResultRow& row : result.rows) {
    if (!row.note.empty()) {
      c.require(false, row.scenario + ": " + row.note);
      continue;
    }
    const double gap = std::abs(row.value - *row.reference);
    c.require(gap <= 0.01, row.params + fmt(": |size %.4f - %.4f| > 0.01",
                                            row.value, *row.reference));
  }
  std::filesystem::remove_all(cache_dir);
  return c;
}

Check criterion8_asymptotic_moments() {
  Check c;
  for (const auto& [d, sigma] : {std::pair<int, double>{2, 1.0}, {5, 1.58}}) {
    const Bandwidth b(sigma);
    const NullMoments asym = asymptotic_moments(d, b);
    const std::vector<double> ts = simulate_null(2000, d, b, 20000, 13);
    const SampleMoments sim = sample_moments(ts);
    const double mean_gap = std::abs(sim.mean - asym.mean) / asym.mean;
    const double var_gap = std::abs(sim.variance - asym.variance) / asym.variance;
    c.require(mean_gap <= 0.05,
              fmt("d=%.0f: mean relative gap %.3f > 0.05", double(d), mean_gap));
    c.require(var_gap <= 0.05,
              fmt("d=%.0f: variance relative gap %.3f > 0.05", double(d), var_gap));
  }
  return c;
}

Check criterion9_null_shape() {
  Check c;
  const Bandwidth b(0.2);
  const std::vector<double> ts = simulate_null(200, 2, b, 50000, 17);
  const SampleMoments m = sample_moments(ts);
  c.require(m.skewness > 0.5, fmt("null skewness %.3f not right-skewed", m.skewness));
  const GammaFit fit = GammaFit::from_moments(m.mean, m.variance);
  std::vector<double> sorted = ts;
  std::sort(sorted.begin(), sorted.end());
  double ks = 0.0;
  const double count = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double F = 1.0 - fit.upper_tail(sorted[i]);
    ks = std::max(ks, std::abs(F - static_cast<double>(i + 1) / count));
    ks = std::max(ks, std::abs(F - static_cast<double>(i) / count));
  }
  c.require(ks <= 0.03, fmt("gamma fit KS distance %.4f > 0.03", ks));

  // Alternative rho = 0.5: sqrt(n) (I_hat - I) close to symmetric.
  const double target = cgkdm_bvn(0.5, b, 60);
  const int reps = 5000;
  std::vector<double> scaled(static_cast<std::size_t>(reps));
  RandomStream root(19);
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(reps));
  for (auto& s : seeds) s = root.next_u64();
  parallel_for_index(reps, [&](std::int64_t r) {
    const Sample s = sample_mvn(CorrelationMatrix::equicorrelated(2, 0.5), 200,
                                seeds[static_cast<std::size_t>(r)]);
    scaled[static_cast<std::size_t>(r)] =
        std::sqrt(200.0) * (estimate(rank_transform(s), b) - target);
  });
  const double skew = sample_moments(scaled).skewness;
  c.require(std::abs(skew) <= 0.3,
            fmt("sqrt(n)(I_hat - I) skewness %.3f outside [-0.3, 0.3]", skew));
  return c;
}

Check criterion10_power_direction() {
  Check c;
  const std::filesystem::path cache_dir =
      std::filesystem::temp_directory_path() / "cgkdm-acceptance-cache10";
  ExperimentConfig cfg;
  cfg.id = "power-sweep";
  cfg.rho = 0.2;
  cfg.reps = 2000;
  cfg.seed = 23;
  cfg.cache_dir = cache_dir;
  const ExperimentResult bvn = run_experiment(cfg);
  double prev = -1.0;
  std::string prev_sigma;
  for (const ResultRow& row : bvn.rows) {
    c.require(row.note.empty(), row.params + ": " + row.note);
    if (!row.note.empty()) continue;
    const std::string sig = row.params.substr(0, row.params.find(";n="));
    if (sig != prev_sigma) {
      prev = -1.0;
      prev_sigma = sig;
    }
    c.require(row.value >= prev,
              row.params + fmt(": power %.3f below previous %.3f", row.value, prev));
    prev = row.value;
  }

  // Cosine scenario at n=200: the small bandwidth wins by at least 0.1.
  ExperimentConfig cosine;
  cosine.id = "power-sweep";
  cosine.scenario = "cosine";
  cosine.n_list = {200};
  cosine.sigmas = {0.2, 1.0};
  cosine.reps = 2000;
  cosine.seed = 29;
  cosine.cache_dir = cache_dir;
  const ExperimentResult cos_result = run_experiment(cosine);
  double power_small = -1.0, power_large = -1.0;
  for (const ResultRow& row : cos_result.rows) {
    c.require(row.note.empty(), row.params + ": " + row.note);
    if (row.params.find("sigma=0.2;") != std::string::npos) power_small = row.value;
    if (row.params.find("sigma=1;") != std::string::npos) power_large = row.value;
  }
  c.require(power_small >= power_large + 0.1,
            fmt("cosine: small-sigma power %.3f vs large-sigma %.3f", power_small,
                power_large));
  std::filesystem::remove_all(cache_dir);
  return c;
}

Check criterion11_property_suites() {
  Check c;
  // Permutation invariance, exact.
  for (int d : {2, 3, 5}) {
    const Eigen::MatrixXd x = random_matrix(41, d, 60u + static_cast<unsigned>(d));
    Eigen::MatrixXd perm(41, d);
    for (int col = 0; col < d; ++col) perm.col(col) = x.col((col + 1) % d);
    const double a = estimate(rank_transform(Sample(x)), Bandwidth(0.6));
    const double b = estimate(rank_transform(Sample(perm)), Bandwidth(0.6));
    c.require(a == b, fmt("permutation invariance violated at d=%.0f", double(d)));
  }
  // Monotone-transform invariance, exact.
  {
    const Eigen::MatrixXd x = random_matrix(37, 3, 71);
    Eigen::MatrixXd tx = x;
    for (int i = 0; i < tx.rows(); ++i) {
      tx(i, 0) = std::exp(tx(i, 0));
      tx(i, 1) = -std::atan(tx(i, 1));
      tx(i, 2) = 5.0 * tx(i, 2) + 2.0;
    }
    const double a = estimate(rank_transform(Sample(x)), Bandwidth(1.0));
    const double b = estimate(rank_transform(Sample(tx)), Bandwidth(1.0));
    c.require(a == b, "monotone-transform invariance violated");
  }
  // Range in d = 2.
  for (unsigned seed = 0; seed < 30; ++seed) {
    const PseudoSample p = rank_transform(Sample(random_matrix(60, 2, 80u + seed)));
    const double v = estimate(p, Bandwidth(0.4));
    c.require(v > 0.0 && v <= 1.0 + 1e-12, fmt("estimate %.6f outside (0,1]", v));
  }
  // Distribution-freeness of the null: uniform vs normal marginals.
  {
    const int reps = 5000, n = 50;
    std::vector<double> uni(static_cast<std::size_t>(reps)),
        nor(static_cast<std::size_t>(reps));
    RandomStream root(83);
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(reps));
    for (auto& s : seeds) s = root.next_u64();
    parallel_for_index(reps, [&](std::int64_t r) {
      RandomStream rs(seeds[static_cast<std::size_t>(r)]);
      Eigen::MatrixXd u(n, 2), g(n, 2);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < 2; ++j) {
          u(i, j) = rs.uniform();
          g(i, j) = rs.normal();
        }
      }
      uni[static_cast<std::size_t>(r)] =
          test_statistic(rank_transform(Sample(u)), Bandwidth(1.0)).t;
      nor[static_cast<std::size_t>(r)] =
          test_statistic(rank_transform(Sample(g)), Bandwidth(1.0)).t;
    });
    std::sort(uni.begin(), uni.end());
    std::sort(nor.begin(), nor.end());
    double dist = 0.0;
    std::size_t i = 0, j = 0;
    while (i < uni.size() && j < nor.size()) {
      if (uni[i] <= nor[j]) {
        ++i;
      } else {
        ++j;
      }
      dist = std::max(dist, std::abs(static_cast<double>(i) / uni.size() -
                                     static_cast<double>(j) / nor.size()));
    }
    const double en = std::sqrt(static_cast<double>(reps) / 2.0);
    const double lambda = (en + 0.12 + 0.11 / en) * dist;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * lambda * lambda);
      p += (k % 2 == 1 ? 2.0 * term : -2.0 * term);
      if (term < 1e-12) break;
    }
    c.require(p > 0.01, fmt("distribution-freeness KS p-value %.4f <= 0.01", p));
  }
  // Robustness: adding one row changes the square by O(1/n).
  {
    const Bandwidth b(0.7);
    const Eigen::MatrixXd big = random_matrix(406, 2, 97);
    auto i2_prefix = [&](int n) {
      const double v = estimate(rank_transform(Sample(big.topRows(n))), b);
      return v * v;
    };
    auto scaled_delta = [&](int n) {
      double acc = 0.0;
      for (int k = 0; k < 5; ++k) {
        acc += std::abs(i2_prefix(n + k + 1) - i2_prefix(n + k));
      }
      return n * acc / 5.0;
    };
    const double k50 = scaled_delta(50);
    for (int n : {100, 200, 400}) {
      const double kn = scaled_delta(n);
      c.require(kn < 1.5 * k50 + 0.05,
                fmt("robustness: n*delta at n=%.0f is %.4f vs fitted %.4f",
                    double(n), kn, k50));
    }
  }
  return c;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    std::function<Check()> run;
  };
  const std::vector<Entry> criteria = {
      {1, "oracle equivalence of the closed-form estimator", criterion1_oracle_equivalence},
      {2, "dimension-2 centered-Gram identity", criterion2_dim2_identity},
      {3, "normalizer quadrature vs Monte Carlo", criterion3_normalizer_mc},
      {4, "monotone exactness and multivariate Spearman column", criterion4_monotone_exactness},
      {5, "bivariate-normal comparison table, implemented columns", criterion5_table1},
      {6, "bivariate-normal series bound and MC agreement", criterion6_bvn_bound},
      {7, "size calibration of the exact-moment gamma test", criterion7_sizes},
      {8, "asymptotic null moments vs simulation", criterion8_asymptotic_moments},
      {9, "null shape: gamma adequacy and alternative normality", criterion9_null_shape},
      {10, "power direction in n and bandwidth sensitivity", criterion10_power_direction},
      {11, "property suites (invariance, range, freeness, robustness)", criterion11_property_suites},
  };
  int failures = 0;
  for (const Entry& entry : criteria) {
    Check result;
    try {
      result = entry.run();
    } catch (const std::exception& e) {
      result.require(false, std::string("exception: ") + e.what());
    }
    if (result.ok()) {
      std::printf("PASS criterion %2d: %s\n", entry.id, entry.name);
    } else {
      std::printf("FAIL criterion %2d: %s -- %s\n", entry.id, entry.name,
                  result.detail().c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  if (failures == 0) {
    std::printf("acceptance: all %d criteria passed\n",
                static_cast<int>(criteria.size()));
  } else {
    std::printf("acceptance: %d criteria FAILED\n", failures);
  }
  return failures;
}
