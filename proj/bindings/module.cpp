// Python bindings for the main operations: rank transform, the dependency
// measure and its comparison estimators, independence tests, theory values,
// baselines, and the synthetic data generators.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cgkdm/baselines.hpp"
#include "cgkdm/copula.hpp"
#include "cgkdm/csv.hpp"
#include "cgkdm/datagen.hpp"
#include "cgkdm/errors.hpp"
#include "cgkdm/estimator.hpp"
#include "cgkdm/independence.hpp"
#include "cgkdm/kernel.hpp"
#include "cgkdm/theory.hpp"

namespace py = pybind11;
using namespace cgkdm;

namespace {

TieHandling make_ties(const std::string& policy, std::uint64_t seed) {
  if (policy == "error") return TieHandling::error();
  if (policy == "jitter") return TieHandling::jitter(seed);
  throw InvalidInput("tie policy must be 'error' or 'jitter'");
}

Sample make_sample(const Eigen::MatrixXd& data, const std::string& ties,
                   std::uint64_t jitter_seed) {
  return Sample(data, make_ties(ties, jitter_seed));
}

PseudoSample pseudo_from_y(const Eigen::MatrixXd& y) { return PseudoSample(y); }

TestMethod method_from_string(const std::string& m) {
  if (m == "sim") return TestMethod::SimulatedNull;
  if (m == "gamma-exact") return TestMethod::GammaExact;
  if (m == "gamma-asym") return TestMethod::GammaAsymptotic;
  if (m == "auto") return TestMethod::Auto;
  throw InvalidInput("method must be sim|gamma-exact|gamma-asym|auto");
}

CopulaSampler sampler_from_name(const std::string& name, double rho) {
  if (name == "independent") return independent_sampler();
  if (name == "diagonal") return diagonal_sampler();
  if (name == "gaussian") return gaussian_copula_sampler(rho);
  if (name == "sign-pattern") return sign_pattern_sampler();
  throw InvalidInput("sampler must be independent|diagonal|gaussian|sign-pattern");
}

Scenario scenario_from_args(const std::string& name, int d, double rho, int dof,
                            const std::string& orientation) {
  if (name == "orientation") return Scenario::monotone_orientation(orientation);
  Scenario sc = Scenario::named(name, d);
  sc.rho = rho;
  sc.dof = dof;
  return sc;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Copula-based Gaussian kernel dependency measure";

  py::register_exception<Error>(m, "CgkdmError");

  // Rank transform operates on raw data; everything downstream takes the
  // normalized-rank matrix.
  m.def(
      "rank_transform",
      [](const Eigen::MatrixXd& data, const std::string& ties,
         std::uint64_t jitter_seed) {
        return rank_transform(make_sample(data, ties, jitter_seed)).y();
      },
      py::arg("data"), py::arg("ties") = "error", py::arg("jitter_seed") = 0);

  m.def(
      "estimate",
      [](const Eigen::MatrixXd& y, double sigma) {
        return estimate(pseudo_from_y(y), Bandwidth(sigma));
      },
      py::arg("y"), py::arg("sigma"));

  m.def(
      "estimator_terms",
      [](const Eigen::MatrixXd& y, double sigma) {
        const EstimatorTerms t = estimator_terms(pseudo_from_y(y), Bandwidth(sigma));
        return py::dict(py::arg("s1") = t.s1, py::arg("s2") = t.s2,
                        py::arg("v1") = t.v1, py::arg("v2") = t.v2,
                        py::arg("v3") = t.v3);
      },
      py::arg("y"), py::arg("sigma"));

  m.def(
      "estimate_dim2_centered",
      [](const Eigen::MatrixXd& y, double sigma) {
        return estimate_dim2_centered(pseudo_from_y(y), Bandwidth(sigma));
      },
      py::arg("y"), py::arg("sigma"));

  m.def(
      "estimate_type_u",
      [](const Eigen::MatrixXd& y, double sigma, std::uint64_t seed) {
        return estimate_type_u(pseudo_from_y(y), Bandwidth(sigma), seed);
      },
      py::arg("y"), py::arg("sigma"), py::arg("seed"));

  m.def(
      "estimate_type_b",
      [](const Eigen::MatrixXd& y, double sigma, int m_draws, std::uint64_t seed) {
        return estimate_type_b(pseudo_from_y(y), Bandwidth(sigma), m_draws, seed);
      },
      py::arg("y"), py::arg("sigma"), py::arg("m") = 1000, py::arg("seed") = 1);

  m.def("kappa", [](double sigma) { return kappa(Bandwidth(sigma)); },
        py::arg("sigma"));
  m.def(
      "lambda_fn",
      [](double x, double sigma) { return lambda_fn(x, Bandwidth(sigma)); },
      py::arg("x"), py::arg("sigma"));
  m.def(
      "normalizer",
      [](double sigma, int d, double tol) {
        const NormalizerTable t = normalizer(Bandwidth(sigma), d, tol);
        return py::dict(py::arg("sigma") = t.sigma, py::arg("d") = t.d,
                        py::arg("c_sigma_d") = t.c_sigma_d,
                        py::arg("quadrature_tol") = t.quadrature_tol);
      },
      py::arg("sigma"), py::arg("d"), py::arg("tol") = 1e-10);

  m.def(
      "gamma_sq",
      [](const Eigen::MatrixXd& atoms_p, const Eigen::VectorXd& weights_p,
         const Eigen::MatrixXd& atoms_q, const Eigen::VectorXd& weights_q,
         double sigma) {
        return gamma_sq(DiscreteDistribution(atoms_p, weights_p),
                        DiscreteDistribution(atoms_q, weights_q),
                        Bandwidth(sigma));
      },
      py::arg("atoms_p"), py::arg("weights_p"), py::arg("atoms_q"),
      py::arg("weights_q"), py::arg("sigma"));

  m.def(
      "test_statistic",
      [](const Eigen::MatrixXd& y, double sigma) {
        return test_statistic(pseudo_from_y(y), Bandwidth(sigma)).t;
      },
      py::arg("y"), py::arg("sigma"));

  m.def(
      "simulate_null",
      [](int n, int d, double sigma, int reps, std::uint64_t seed) {
        return simulate_null(n, d, Bandwidth(sigma), reps, seed);
      },
      py::arg("n"), py::arg("d"), py::arg("sigma"), py::arg("reps"),
      py::arg("seed"));

  m.def(
      "asymptotic_moments",
      [](int d, double sigma) {
        const NullMoments nm = asymptotic_moments(d, Bandwidth(sigma));
        return py::dict(py::arg("mean") = nm.mean,
                        py::arg("variance") = nm.variance);
      },
      py::arg("d"), py::arg("sigma"));

  m.def(
      "exact_null_moments",
      [](int n, int d, double sigma, int reps, std::uint64_t seed,
         const std::string& cache_dir) {
        std::optional<MomentCache> cache;
        if (!cache_dir.empty()) cache.emplace(cache_dir);
        const NullMoments nm = exact_null_moments(
            n, d, Bandwidth(sigma), reps, seed, cache ? &*cache : nullptr);
        return py::dict(py::arg("mean") = nm.mean,
                        py::arg("variance") = nm.variance,
                        py::arg("reps") = nm.reps, py::arg("seed") = nm.seed);
      },
      py::arg("n"), py::arg("d"), py::arg("sigma"), py::arg("reps"),
      py::arg("seed"), py::arg("cache_dir") = "");

  m.def(
      "run_test",
      [](const Eigen::MatrixXd& y, double sigma, const std::string& method,
         double level, int reps, std::uint64_t seed, const std::string& cache_dir) {
        std::optional<MomentCache> cache;
        if (!cache_dir.empty()) cache.emplace(cache_dir);
        const TestReport r =
            run_test(pseudo_from_y(y), Bandwidth(sigma),
                     method_from_string(method), level, reps, seed,
                     cache ? &*cache : nullptr);
        return py::dict(
            py::arg("t") = r.statistic.t, py::arg("n") = r.statistic.n,
            py::arg("d") = r.statistic.d, py::arg("sigma") = r.statistic.sigma,
            py::arg("method") = to_string(r.method),
            py::arg("cutoff") = r.cutoff, py::arg("p_value") = r.p_value,
            py::arg("reject") = r.reject, py::arg("level") = r.level,
            py::arg("reps") = r.reps, py::arg("seed") = r.seed);
      },
      py::arg("y"), py::arg("sigma"), py::arg("method") = "auto",
      py::arg("level") = 0.05, py::arg("reps") = 20000, py::arg("seed") = 1,
      py::arg("cache_dir") = "");

  m.def(
      "cgkdm_bvn",
      [](double rho, double sigma, int truncation, double tail_tol) {
        return cgkdm_bvn(rho, Bandwidth(sigma), truncation, tail_tol);
      },
      py::arg("rho"), py::arg("sigma"), py::arg("truncation") = 30,
      py::arg("tail_tol") = 1e-6);

  m.def(
      "hermite_coeffs",
      [](double sigma, int truncation) {
        return hermite_coeffs(Bandwidth(sigma), truncation).coeffs;
      },
      py::arg("sigma"), py::arg("truncation"));

  m.def(
      "population_mc",
      [](const std::string& sampler, double sigma, int d, int reps,
         std::uint64_t seed, double rho) {
        const PopulationEstimate e = cgkdm_population_mc(
            sampler_from_name(sampler, rho), Bandwidth(sigma), d, reps, seed);
        return py::dict(py::arg("value") = e.value,
                        py::arg("std_error") = e.std_error,
                        py::arg("replicates") = e.replicates,
                        py::arg("seed") = e.seed);
      },
      py::arg("sampler"), py::arg("sigma"), py::arg("d"), py::arg("reps"),
      py::arg("seed") = 1, py::arg("rho") = 0.0);

  // Baselines operate on raw two-column data except the multivariate rho.
  m.def(
      "pearson",
      [](const Eigen::MatrixXd& x) { return pearson(Sample(x)); }, py::arg("x"));
  m.def(
      "spearman",
      [](const Eigen::MatrixXd& x) { return spearman(Sample(x)); }, py::arg("x"));
  m.def(
      "kendall",
      [](const Eigen::MatrixXd& x) { return kendall(Sample(x)); }, py::arg("x"));
  m.def("dcor", [](const Eigen::MatrixXd& x) { return dcor(Sample(x)); },
        py::arg("x"));
  m.def(
      "mv_spearman_rho2",
      [](const Eigen::MatrixXd& y) { return mv_spearman_rho2(pseudo_from_y(y)); },
      py::arg("y"));

  m.def(
      "sample_mvn",
      [](const Eigen::MatrixXd& corr, int n, std::uint64_t seed) {
        return sample_mvn(CorrelationMatrix(corr), n, seed).data();
      },
      py::arg("corr"), py::arg("n"), py::arg("seed"));
  m.def(
      "sample_mvt",
      [](const Eigen::MatrixXd& corr, int dof, int n, std::uint64_t seed) {
        return sample_mvt(CorrelationMatrix(corr), dof, n, seed).data();
      },
      py::arg("corr"), py::arg("dof"), py::arg("n"), py::arg("seed"));
  m.def(
      "sample_scenario",
      [](const std::string& name, int n, std::uint64_t seed, int d, double rho,
         int dof, const std::string& orientation) {
        return sample_scenario(scenario_from_args(name, d, rho, dof, orientation),
                               n, seed)
            .data();
      },
      py::arg("name"), py::arg("n"), py::arg("seed") = 1, py::arg("d") = 2,
      py::arg("rho") = 0.0, py::arg("dof") = 3, py::arg("orientation") = "");

  m.def("load_csv", [](const std::string& path) { return load_csv(path); },
        py::arg("path"));

  m.attr("__version__") = "0.1.0";
}
