#include "cgkdm/independence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <mutex>
#include <numbers>

#include <json.hpp>

#include "cgkdm/errors.hpp"
#include "cgkdm/parallel.hpp"
#include "cgkdm/rng.hpp"
#include "cgkdm/special.hpp"
#include "rank_kernel.hpp"

namespace cgkdm {

namespace {
using nlohmann::json;
constexpr int kCacheVersion = 1;
}  // namespace

TestStatistic test_statistic(const PseudoSample& p, Bandwidth b) {
  if (p.n() < 2 || p.dim() < 2) {
    throw InvalidInput("test statistic needs n >= 2, d >= 2");
  }
  const detail::RankKernelTables tables(p.n(), b.sigma);
  const int d = p.dim();
  const double num = tables.s1(p.ranks()) - 2.0 * tables.s2(p.ranks()) +
                     tables.v3(d);
  const double t = p.n() * num;
  return TestStatistic{t < 0.0 ? 0.0 : t, p.n(), d, b.sigma};
}

std::vector<double> simulate_null(int n, int d, Bandwidth b, int reps,
                                  std::uint64_t seed) {
  if (reps < 1) throw InvalidInput("null simulation needs reps >= 1");
  if (n < 2 || d < 2) throw InvalidInput("null simulation needs n >= 2, d >= 2");
  const detail::RankKernelTables tables(n, b.sigma);
  const double v3 = tables.v3(d);
  std::vector<double> out(static_cast<std::size_t>(reps));
  RandomStream root(seed);
  parallel_for_index(reps, [&](std::int64_t r) {
    RandomStream rs = root.substream(static_cast<std::uint64_t>(r));
    Eigen::MatrixXi ranks(n, d);
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int c = 0; c < d; ++c) {
      for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i + 1;
      rs.shuffle(perm);
      for (int i = 0; i < n; ++i) ranks(i, c) = perm[static_cast<std::size_t>(i)];
    }
    const double num = tables.s1(ranks) - 2.0 * tables.s2(ranks) + v3;
    out[static_cast<std::size_t>(r)] = n * (num < 0.0 ? 0.0 : num);
  });
  return out;
}

NullMoments asymptotic_moments(int d, Bandwidth b) {
  if (d < 2) throw InvalidDims("asymptotic moments need d >= 2");
  const double w1 = kappa(Bandwidth(b.sigma / std::numbers::sqrt2));
  const double w2 = lambda_power_integral(b, 2);
  const double w3 = kappa(b);
  auto ipw = [](double x, int p) { return std::pow(x, p); };
  const double mean = 1.0 + (d - 1) * ipw(w3, d) - d * ipw(w3, d - 1);
  const double variance =
      2.0 * (ipw(w1, d) + 2.0 * (d - 1) * ipw(w2, d) -
             2.0 * d * ipw(w2, d - 1) * w1 + d * ipw(w3, 2 * d - 2) * w1 -
             (d - 1) * ipw(w3, 2 * d) +
             d * (d - 1) * ipw(w3, 2 * d - 4) * (w3 * w3 - w2) * (w3 * w3 - w2));
  if (!(mean > 0.0) || !(variance > 0.0)) {
    throw NonPositiveMoment(
        "asymptotic null moments degenerate for sigma=" +
        std::to_string(b.sigma) + ", d=" + std::to_string(d));
  }
  return NullMoments{mean, variance, MomentSource::Asymptotic, 0, d, b.sigma,
                     0, 0};
}

namespace {

std::mutex cache_mutex;

std::string sigma_key(double sigma) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", sigma);
  return buf;
}

}  // namespace

MomentCache::MomentCache(std::filesystem::path dir) {
  std::filesystem::create_directories(dir);
  file_ = dir / "null_moments.jsonl";
}

std::filesystem::path MomentCache::default_dir() {
  if (const char* env = std::getenv("CGKDM_CACHE_DIR")) {
    return std::filesystem::path(env);
  }
  return std::filesystem::path("cgkdm-cache");
}

std::optional<NullMoments> MomentCache::lookup(int n, int d, double sigma,
                                               int reps,
                                               std::uint64_t seed) const {
  std::lock_guard<std::mutex> lock(cache_mutex);
  std::ifstream in(file_);
  if (!in) return std::nullopt;
  std::string line;
  const std::string want_sigma = sigma_key(sigma);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded()) continue;
    if (rec.value("v", 0) != kCacheVersion) continue;
    if (rec.value("n", -1) != n || rec.value("d", -1) != d) continue;
    if (rec.value("reps", -1) != reps) continue;
    if (rec.value("seed", std::uint64_t(0)) != seed) continue;
    if (rec.value("sigma", std::string()) != want_sigma) continue;
    NullMoments m{rec.at("mean").get<double>(),
                  rec.at("variance").get<double>(),
                  MomentSource::MonteCarloExact,
                  n,
                  d,
                  sigma,
                  reps,
                  seed};
    return m;
  }
  return std::nullopt;
}

void MomentCache::store(const NullMoments& m) {
  std::lock_guard<std::mutex> lock(cache_mutex);
  std::ofstream out(file_, std::ios::app);
  if (!out) throw DataError("cannot write moment cache " + file_.string());
  json rec{{"v", kCacheVersion},
           {"n", m.n},
           {"d", m.d},
           {"sigma", sigma_key(m.sigma)},
           {"reps", m.reps},
           {"seed", m.seed},
           {"mean", m.mean},
           {"variance", m.variance},
           {"created_at", static_cast<std::int64_t>(std::time(nullptr))}};
  out << rec.dump() << '\n';
}

NullMoments exact_null_moments(int n, int d, Bandwidth b, int reps,
                               std::uint64_t seed, MomentCache* cache) {
  if (cache != nullptr) {
    if (auto hit = cache->lookup(n, d, b.sigma, reps, seed)) return *hit;
  }
  const std::vector<double> ts = simulate_null(n, d, b, reps, seed);
  const SampleMoments m = sample_moments(ts);
  if (!(m.mean > 0.0) || !(m.variance > 0.0)) {
    throw NonPositiveMoment("simulated null moments degenerate");
  }
  NullMoments out{m.mean, m.variance, MomentSource::MonteCarloExact,
                  n, d, b.sigma, reps, seed};
  if (cache != nullptr) cache->store(out);
  return out;
}

GammaFit GammaFit::from_moments(double mean, double variance) {
  if (!(mean > 0.0) || !(variance > 0.0)) {
    throw NonPositiveMoment("gamma fit needs positive mean and variance");
  }
  return GammaFit{mean * mean / variance, variance / mean};
}

double GammaFit::quantile(double p) const {
  return gamma_quantile(p, alpha, beta);
}

double GammaFit::upper_tail(double t) const {
  if (t <= 0.0) return 1.0;
  return regularized_gamma_q(alpha, t / beta);
}

std::string to_string(TestMethod m) {
  switch (m) {
    case TestMethod::SimulatedNull: return "SimulatedNull";
    case TestMethod::GammaExact: return "GammaExact";
    case TestMethod::GammaAsymptotic: return "GammaAsymptotic";
    case TestMethod::Auto: return "Auto";
  }
  return "?";
}

TestReport run_test(const PseudoSample& p, Bandwidth b, TestMethod method,
                    double level, int reps, std::uint64_t seed,
                    MomentCache* cache) {
  if (!(level > 0.0 && level < 1.0)) {
    throw InvalidInput("test level must be in (0,1)");
  }
  if (reps < 1) throw InvalidInput("reps must be >= 1");
  const TestStatistic stat = test_statistic(p, b);

  TestMethod resolved = method;
  if (method == TestMethod::Auto) {
    if (stat.n < 20) {
      resolved = TestMethod::SimulatedNull;
    } else if (stat.n > 1000) {
      resolved = TestMethod::GammaAsymptotic;
    } else {
      resolved = TestMethod::GammaExact;
    }
  }

  TestReport report;
  report.statistic = stat;
  report.method = resolved;
  report.level = level;
  report.reps = reps;
  report.seed = seed;

  if (resolved == TestMethod::SimulatedNull) {
    std::vector<double> null = simulate_null(stat.n, stat.d, b, reps, seed);
    std::sort(null.begin(), null.end());
    // (reps+1)-convention order statistic for the cutoff and the
    // add-one permutation-style p-value; never exactly zero.
    const std::size_t k = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(
            std::ceil((1.0 - level) * (reps + 1))) - 1,
        0, static_cast<std::ptrdiff_t>(null.size()) - 1));
    report.cutoff = null[k];
    const auto ge = static_cast<int>(
        null.end() - std::lower_bound(null.begin(), null.end(), stat.t));
    report.p_value = static_cast<double>(ge + 1) / (reps + 1);
    report.moment_source = MomentSource::MonteCarloExact;
  } else {
    NullMoments moments =
        resolved == TestMethod::GammaExact
            ? exact_null_moments(stat.n, stat.d, b, reps, seed, cache)
            : asymptotic_moments(stat.d, b);
    const GammaFit fit = GammaFit::from_moments(moments.mean, moments.variance);
    report.cutoff = fit.quantile(1.0 - level);
    report.p_value = fit.upper_tail(stat.t);
    report.moment_source = moments.source;
  }
  report.reject = stat.t > report.cutoff;
  return report;
}

}  // namespace cgkdm
