// cgkdm: copula-based Gaussian-kernel dependency measure, independence
// tests, and scripted reproductions of the numerical illustrations.
//
// Exit codes: 0 ok, 2 usage error, 3 data error, 4 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "cgkdm/baselines.hpp"
#include "cgkdm/csv.hpp"
#include "cgkdm/datagen.hpp"
#include "cgkdm/errors.hpp"
#include "cgkdm/estimator.hpp"
#include "cgkdm/experiments.hpp"
#include "cgkdm/independence.hpp"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct CommonOpts {
  std::string csv_path;
  double sigma = 1.0;
  std::string tie_policy = "error";
  std::uint64_t jitter_seed = 0;
};

cgkdm::Sample load_sample(const CommonOpts& opts) {
  const Eigen::MatrixXd data = cgkdm::load_csv(opts.csv_path);
  if (data.cols() < 2) {
    throw cgkdm::InvalidDims("need at least 2 numeric columns, got " +
                             std::to_string(data.cols()));
  }
  cgkdm::TieHandling ties = opts.tie_policy == "jitter"
                                ? cgkdm::TieHandling::jitter(opts.jitter_seed)
                                : cgkdm::TieHandling::error();
  return cgkdm::Sample(data, ties);
}

int run_measure(const CommonOpts& opts, bool baselines, const std::string& format) {
  const cgkdm::Sample s = load_sample(opts);
  const cgkdm::PseudoSample p = cgkdm::rank_transform(s);
  const cgkdm::Bandwidth b(opts.sigma);
  const double est = cgkdm::estimate(p, b);

  json out{{"n", p.n()}, {"d", p.dim()}, {"sigma", opts.sigma}, {"I", est}};
  if (baselines) {
    out["mv_spearman_rho2"] = cgkdm::mv_spearman_rho2(p);
    if (p.dim() == 2) {
      out["pearson"] = cgkdm::pearson(s);
      out["spearman"] = cgkdm::spearman(s);
      out["kendall"] = cgkdm::kendall(s);
      out["dcor"] = cgkdm::dcor(s);
    }
  }
  if (format == "json") {
    std::cout << out.dump(2) << '\n';
  } else {
    std::printf("I_sigma(sigma=%g, n=%d, d=%d) = %.6f\n", opts.sigma, p.n(),
                p.dim(), est);
    if (baselines) {
      std::printf("mv_spearman_rho2 = %.6f\n", out["mv_spearman_rho2"].get<double>());
      if (p.dim() == 2) {
        std::printf("pearson  = %.6f\n", out["pearson"].get<double>());
        std::printf("spearman = %.6f\n", out["spearman"].get<double>());
        std::printf("kendall  = %.6f\n", out["kendall"].get<double>());
        std::printf("dcor     = %.6f\n", out["dcor"].get<double>());
      }
    }
  }
  return 0;
}

cgkdm::TestMethod parse_method(const std::string& m) {
  if (m == "sim") return cgkdm::TestMethod::SimulatedNull;
  if (m == "gamma-exact") return cgkdm::TestMethod::GammaExact;
  if (m == "gamma-asym") return cgkdm::TestMethod::GammaAsymptotic;
  if (m == "auto") return cgkdm::TestMethod::Auto;
  throw CLI::ValidationError("--method must be sim|gamma-exact|gamma-asym|auto");
}

int run_test_cmd(const CommonOpts& opts, const std::string& method,
                 double level, int reps, std::uint64_t seed,
                 const std::string& cache_dir, const std::string& output) {
  const cgkdm::Sample s = load_sample(opts);
  const cgkdm::PseudoSample p = cgkdm::rank_transform(s);
  cgkdm::MomentCache cache(cache_dir.empty() ? cgkdm::MomentCache::default_dir()
                                             : std::filesystem::path(cache_dir));
  const cgkdm::TestReport report =
      cgkdm::run_test(p, cgkdm::Bandwidth(opts.sigma), parse_method(method),
                      level, reps, seed, &cache);
  json out{{"statistic",
            {{"t", report.statistic.t},
             {"n", report.statistic.n},
             {"d", report.statistic.d},
             {"sigma", report.statistic.sigma}}},
           {"method", cgkdm::to_string(report.method)},
           {"cutoff", report.cutoff},
           {"p_value", report.p_value},
           {"reject", report.reject},
           {"level", report.level},
           {"metadata",
            {{"reps", report.reps},
             {"seed", report.seed},
             {"moment_source",
              report.moment_source == cgkdm::MomentSource::MonteCarloExact
                  ? "MonteCarloExact"
                  : "Asymptotic"}}}};
  const std::string text = out.dump(2);
  if (output.empty()) {
    std::cout << text << '\n';
  } else {
    std::ofstream f(output);
    if (!f) throw cgkdm::DataError("cannot write " + output);
    f << text << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Copula-based Gaussian kernel dependency measure"};
  app.require_subcommand(1);

  // measure ------------------------------------------------------------
  CommonOpts measure_opts;
  bool measure_baselines = false;
  std::string measure_format = "text";
  CLI::App* measure = app.add_subcommand("measure", "Compute the dependency measure on a CSV file");
  measure->add_option("csv", measure_opts.csv_path, "input CSV (d >= 2 numeric columns)")->required();
  measure->add_option("--sigma", measure_opts.sigma, "kernel bandwidth")->check(CLI::PositiveNumber);
  measure->add_option("--ties", measure_opts.tie_policy, "tie policy: error|jitter")
      ->check(CLI::IsMember({"error", "jitter"}));
  measure->add_option("--jitter-seed", measure_opts.jitter_seed, "seed for the jitter tie policy");
  measure->add_flag("--baselines", measure_baselines, "also print classical measures");
  measure->add_option("--format", measure_format, "text|json")->check(CLI::IsMember({"text", "json"}));

  // test ---------------------------------------------------------------
  CommonOpts test_opts;
  std::string test_method = "auto";
  double test_level = 0.05;
  int test_reps = 20000;
  std::uint64_t test_seed = 1;
  std::string test_cache_dir;
  std::string test_output;
  CLI::App* test = app.add_subcommand("test", "Test the coordinates of a CSV sample for independence");
  test->add_option("csv", test_opts.csv_path, "input CSV")->required();
  test->add_option("--sigma", test_opts.sigma, "kernel bandwidth")->check(CLI::PositiveNumber);
  test->add_option("--method", test_method, "sim|gamma-exact|gamma-asym|auto")
      ->check(CLI::IsMember({"sim", "gamma-exact", "gamma-asym", "auto"}));
  test->add_option("--level", test_level, "test level")->check(CLI::Range(1e-9, 1.0 - 1e-9));
  test->add_option("--reps", test_reps, "null-simulation replicates")->check(CLI::PositiveNumber);
  test->add_option("--seed", test_seed, "RNG seed");
  test->add_option("--cache-dir", test_cache_dir, "null-moment cache directory");
  test->add_option("--ties", test_opts.tie_policy, "tie policy: error|jitter")
      ->check(CLI::IsMember({"error", "jitter"}));
  test->add_option("--jitter-seed", test_opts.jitter_seed, "seed for the jitter tie policy");
  test->add_option("--output", test_output, "write the JSON report here instead of stdout");

  // experiment ----------------------------------------------------------
  cgkdm::ExperimentConfig config;
  std::string experiment_id;
  std::string experiment_cache;
  CLI::App* experiment = app.add_subcommand("experiment", "Reproduce a table or figure as a result file");
  experiment->add_option("id", experiment_id,
                         "table1|table2|table4|fig1|fig2|size-sweep|power-sweep|variability")
      ->required();
  experiment->add_option("--reps", config.reps, "replicates (0 = experiment default)");
  experiment->add_option("--n", config.n, "sample size (0 = experiment default)");
  experiment->add_option("--d", config.d, "dimension");
  experiment->add_option("--sigma", config.sigmas, "kernel bandwidth(s)");
  experiment->add_option("--n-list", config.n_list, "sample sizes for sweeps");
  experiment->add_option("--level", config.level, "test level")->check(CLI::Range(1e-9, 1.0 - 1e-9));
  experiment->add_option("--rho", config.rho, "correlation parameter");
  experiment->add_option("--scenario", config.scenario, "scenario name for power-sweep");
  experiment->add_option("--seed", config.seed, "RNG seed");
  experiment->add_flag("--full", config.full_scale, "paper-scale replicate counts");
  experiment->add_option("--output", config.output, "result file path (default <id>.<format>)");
  experiment->add_option("--format", config.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  experiment->add_option("--cache-dir", experiment_cache, "null-moment cache directory");

  // gen ------------------------------------------------------------------
  std::string gen_name;
  std::string gen_output = "scenario.csv";
  std::string gen_orientation;
  int gen_n = 200, gen_d = 2, gen_dof = 3;
  double gen_rho = 0.0;
  std::uint64_t gen_seed = 1;
  CLI::App* gen = app.add_subcommand("gen", "Dump a synthetic scenario to CSV");
  gen->add_option("scenario", gen_name, "scenario name (see datagen catalogue)")->required();
  gen->add_option("--n", gen_n, "rows")->check(CLI::PositiveNumber);
  gen->add_option("--d", gen_d, "dimension");
  gen->add_option("--rho", gen_rho, "correlation parameter");
  gen->add_option("--dof", gen_dof, "t degrees of freedom");
  gen->add_option("--orientation", gen_orientation, "pattern like ++- for the orientation scenario");
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--output", gen_output, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (measure->parsed()) {
      return run_measure(measure_opts, measure_baselines, measure_format);
    }
    if (test->parsed()) {
      return run_test_cmd(test_opts, test_method, test_level, test_reps,
                          test_seed, test_cache_dir, test_output);
    }
    if (experiment->parsed()) {
      config.id = experiment_id;
      if (!experiment_cache.empty()) config.cache_dir = experiment_cache;
      if (config.output.empty()) {
        config.output = experiment_id + "." + config.format;
      }
      const cgkdm::ExperimentResult result = cgkdm::run_experiment(config);
      cgkdm::write_result(result, config.output, config.format);
      std::cout << "wrote " << result.rows.size() << " rows to "
                << config.output.string() << '\n';
      return 0;
    }
    if (gen->parsed()) {
      cgkdm::Scenario sc;
      if (gen_name == "orientation") {
        sc = cgkdm::Scenario::monotone_orientation(gen_orientation);
      } else {
        sc = cgkdm::Scenario::named(gen_name, gen_d);
        sc.rho = gen_rho;
        sc.dof = gen_dof;
      }
      const cgkdm::Sample s = cgkdm::sample_scenario(sc, gen_n, gen_seed);
      cgkdm::write_csv(gen_output, s.data());
      std::cout << "wrote " << s.n() << "x" << s.dim() << " sample to "
                << gen_output << '\n';
      return 0;
    }
  } catch (const cgkdm::InvalidInput& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const cgkdm::InvalidDims& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const cgkdm::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const cgkdm::TiesPresent& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const cgkdm::Error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}
