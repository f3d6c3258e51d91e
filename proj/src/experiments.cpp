#include "cgkdm/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>

#include <json.hpp>

#include "cgkdm/baselines.hpp"
#include "cgkdm/csv.hpp"
#include "cgkdm/datagen.hpp"
#include "cgkdm/errors.hpp"
#include "cgkdm/estimator.hpp"
#include "cgkdm/independence.hpp"
#include "cgkdm/parallel.hpp"
#include "cgkdm/rng.hpp"
#include "cgkdm/special.hpp"
#include "cgkdm/theory.hpp"

namespace cgkdm {

namespace {

using nlohmann::json;

std::string params_str(std::initializer_list<std::pair<std::string, std::string>> kv) {
  std::string out;
  for (const auto& [k, v] : kv) {
    if (!out.empty()) out += ';';
    out += k + "=" + v;
  }
  return out;
}

std::string fmt(double v) { return format_double(v); }

ResultRow mean_row(std::string scenario, std::string params, std::string metric,
                   const std::vector<double>& values,
                   std::optional<double> reference) {
  const SampleMoments m = sample_moments(values);
  ResultRow row;
  row.scenario = std::move(scenario);
  row.params = std::move(params);
  row.metric = std::move(metric);
  row.value = m.mean;
  row.std_error = std::sqrt(m.variance / static_cast<double>(values.size()));
  row.replicates = static_cast<int>(values.size());
  row.reference = reference;
  return row;
}

// ---------------------------------------------------------------------------
// table1: bivariate normal cases (a)-(g), implemented measure columns only.

struct Table1Case {
  char label;
  double rho;
  // printed values: I_1, I_0.2, pearson, kendall, spearman, dcor
  double ref[6];
};

constexpr Table1Case kTable1[] = {
    {'a', -1.0, {1.000, 1.000, -1.000, -1.000, -1.000, 1.000}},
    {'b', -0.8, {0.778, 0.649, -0.799, -0.590, -0.783, 0.758}},
    {'c', -0.4, {0.379, 0.294, -0.399, -0.262, -0.383, 0.374}},
    {'d', 0.0, {0.063, 0.112, 0.000, 0.001, 0.001, 0.122}},
    {'e', 0.4, {0.379, 0.294, 0.399, 0.262, 0.383, 0.374}},
    {'f', 0.8, {0.778, 0.649, 0.799, 0.590, 0.783, 0.758}},
    {'g', 1.0, {1.000, 1.000, 1.000, 1.000, 1.000, 1.000}},
};

void run_table1(const ExperimentConfig& cfg, std::vector<ResultRow>& rows) {
  const int n = cfg.n > 0 ? cfg.n : 200;
  const int reps = cfg.reps > 0 ? cfg.reps : (cfg.full_scale ? 10000 : 2000);
  const Bandwidth sig1(1.0), sig02(0.2);
  const char* metric_names[6] = {"I_1",     "I_0.2",    "pearson",
                                 "kendall", "spearman", "dcor"};
  for (const Table1Case& c : kTable1) {
    const std::string scenario = std::string("bvn-") + c.label;
    const std::string params =
        params_str({{"rho", fmt(c.rho)}, {"n", fmt(n)}, {"seed", fmt(double(cfg.seed))}});
    std::vector<std::array<double, 6>> vals(static_cast<std::size_t>(reps));
    RandomStream root(cfg.seed);
    RandomStream scen = root.substream(static_cast<std::uint64_t>(c.label));
    std::vector<std::uint64_t> rep_seeds(static_cast<std::size_t>(reps));
    for (int r = 0; r < reps; ++r) rep_seeds[static_cast<std::size_t>(r)] = scen.next_u64();
    parallel_for_index(reps, [&](std::int64_t r) {
      const Sample s = sample_mvn(CorrelationMatrix::equicorrelated(2, c.rho),
                                  n, rep_seeds[static_cast<std::size_t>(r)]);
      const PseudoSample p = rank_transform(s);
      auto& v = vals[static_cast<std::size_t>(r)];
      v[0] = estimate(p, sig1);
      v[1] = estimate(p, sig02);
      v[2] = pearson(s);
      v[3] = kendall(s);
      v[4] = spearman(s);
      v[5] = dcor(s);
    });
    for (int m = 0; m < 6; ++m) {
      std::vector<double> column(static_cast<std::size_t>(reps));
      for (int r = 0; r < reps; ++r) column[static_cast<std::size_t>(r)] = vals[static_cast<std::size_t>(r)][static_cast<std::size_t>(m)];
      rows.push_back(mean_row(scenario, params, metric_names[m], column, c.ref[m]));
    }
  }
}

// ---------------------------------------------------------------------------
// table2: deterministic monotone orientation patterns.

struct Table2Row {
  const char* pattern;
  double rho_ref;
};

constexpr Table2Row kTable2[] = {
    {"+++", 1.0004},   {"++-", -0.3330},  {"++++", 1.0003}, {"+++-", -0.0907},
    {"++--", -0.2120}, {"+++++", 1.0003}, {"++++-", 0.0155}, {"+++--", -0.1076},
};

void run_table2(const ExperimentConfig& cfg, std::vector<ResultRow>& rows) {
  const int n = cfg.n > 0 ? cfg.n : 10000;
  const double sigma = cfg.sigmas.empty() ? 1.0 : cfg.sigmas.front();
  for (const Table2Row& r : kTable2) {
    const Sample s =
        sample_scenario(Scenario::monotone_orientation(r.pattern), n, cfg.seed);
    const PseudoSample p = rank_transform(s);
    const std::string params = params_str({{"n", fmt(n)}, {"sigma", fmt(sigma)}});
    ResultRow est;
    est.scenario = std::string("orientation:") + r.pattern;
    est.params = params;
    est.metric = "I_sigma";
    est.value = estimate(p, Bandwidth(sigma));
    est.reference = 1.0;
    rows.push_back(est);
    ResultRow rho;
    rho.scenario = est.scenario;
    rho.params = params;
    rho.metric = "mv_spearman_rho2";
    rho.value = mv_spearman_rho2(p);
    rho.reference = r.rho_ref;
    rows.push_back(rho);
  }
}

// ---------------------------------------------------------------------------
// table4 / size-sweep: empirical size of the gamma-exact test under the null.

struct SizeCell {
  int d;
  double sigma;
  int n;
  std::optional<double> reference;
};

const std::map<std::pair<int, int>, std::map<int, double>>& table4_reference() {
  // keyed by (d, 10*sigma rounded) then n
  static const std::map<std::pair<int, int>, std::map<int, double>> ref = {
      {{2, 2}, {{20, 0.0529}, {30, 0.0520}, {60, 0.0523}, {100, 0.0521}, {500, 0.0518}}},
      {{2, 10}, {{20, 0.0531}, {30, 0.0520}, {60, 0.0502}, {100, 0.0497}, {500, 0.0500}}},
      {{5, 3}, {{20, 0.0564}, {30, 0.0550}, {60, 0.0552}, {100, 0.0541}, {500, 0.0542}}},
      {{5, 16}, {{20, 0.0499}, {30, 0.0499}, {60, 0.0506}, {100, 0.0500}, {500, 0.0503}}},
      {{10, 5}, {{20, 0.0598}, {30, 0.0567}, {60, 0.0557}, {100, 0.0544}, {500, 0.0539}}},
      {{10, 22}, {{20, 0.0513}, {30, 0.0513}, {60, 0.0504}, {100, 0.0507}, {500, 0.0506}}},
  };
  return ref;
}

std::optional<double> size_reference(int d, double sigma, int n) {
  const auto& ref = table4_reference();
  const auto it = ref.find({d, static_cast<int>(std::lround(10.0 * sigma))});
  if (it == ref.end()) return std::nullopt;
  const auto jt = it->second.find(n);
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

double empirical_size(int n, int d, Bandwidth b, double level, int reps,
                      std::uint64_t seed, MomentCache* cache) {
  const NullMoments moments =
      exact_null_moments(n, d, b, reps, seed, cache);
  const double cutoff =
      GammaFit::from_moments(moments.mean, moments.variance).quantile(1.0 - level);
  // Fresh draws, disjoint from the moment simulation stream.
  const std::vector<double> ts =
      simulate_null(n, d, b, reps, seed ^ 0x5ca1ab1eULL);
  int rejections = 0;
  for (double t : ts) rejections += t > cutoff ? 1 : 0;
  return static_cast<double>(rejections) / static_cast<double>(ts.size());
}

void run_sizes(const ExperimentConfig& cfg, std::vector<ResultRow>& rows,
               const std::vector<SizeCell>& cells) {
  const int reps = cfg.reps > 0 ? cfg.reps : (cfg.full_scale ? 100000 : 20000);
  MomentCache cache(cfg.cache_dir.empty() ? MomentCache::default_dir()
                                          : cfg.cache_dir);
  for (const SizeCell& cell : cells) {
    ResultRow row;
    row.scenario = "independent";
    row.params = params_str({{"d", fmt(cell.d)},
                             {"sigma", fmt(cell.sigma)},
                             {"n", fmt(cell.n)},
                             {"level", fmt(cfg.level)},
                             {"reps", fmt(reps)},
                             {"seed", fmt(double(cfg.seed))}});
    row.metric = "size";
    row.replicates = reps;
    row.reference = cell.reference;
    try {
      row.value = empirical_size(cell.n, cell.d, Bandwidth(cell.sigma),
                                 cfg.level, reps, cfg.seed, &cache);
      row.std_error = std::sqrt(row.value * (1.0 - row.value) / reps);
    } catch (const Error& e) {
      row.value = std::numeric_limits<double>::quiet_NaN();
      row.note = e.what();
    }
    rows.push_back(row);
  }
}

void run_table4(const ExperimentConfig& cfg, std::vector<ResultRow>& rows) {
  std::vector<SizeCell> cells;
  if (cfg.full_scale) {
    for (const auto& [key, by_n] : table4_reference()) {
      for (const auto& [n, ref] : by_n) {
        cells.push_back({key.first, key.second / 10.0, n, ref});
      }
    }
  } else {
    cells.push_back({2, 1.0, 100, size_reference(2, 1.0, 100)});
    cells.push_back({5, 1.58, 60, size_reference(5, 1.58, 60)});
  }
  run_sizes(cfg, rows, cells);
}

void run_size_sweep(const ExperimentConfig& cfg, std::vector<ResultRow>& rows) {
  const int d = cfg.d > 0 ? cfg.d : 2;
  std::vector<double> sigmas = cfg.sigmas;
  if (sigmas.empty()) sigmas = {std::sqrt(d / 2.0)};
  std::vector<int> ns = cfg.n_list;
  if (ns.empty()) ns = cfg.n > 0 ? std::vector<int>{cfg.n} : std::vector<int>{100};
  std::vector<SizeCell> cells;
  for (double s : sigmas) {
    for (int n : ns) cells.push_back({d, s, n, size_reference(d, s, n)});
  }
  run_sizes(cfg, rows, cells);
}

// ---------------------------------------------------------------------------
// fig1: population CGKDM against the bivariate normal correlation.

void run_fig1(const ExperimentConfig& cfg, std::vector<ResultRow>& rows) {
  const double sigma = cfg.sigmas.empty() ? 1.0 : cfg.sigmas.front();
  const Bandwidth b(sigma);
  const HermiteSeries series = hermite_coeffs(b, 90);
  const double c2 = normalizer(b, 2).c_sigma_d;
  for (int i = -20; i <= 20; ++i) {
    const double rho = i / 20.0;
    ResultRow row;
    row.scenario = "bvn";
    row.params = params_str({{"rho", fmt(rho)}, {"sigma", fmt(sigma)}});
    row.metric = "I_sigma";
    try {
      row.value = cgkdm_bvn(rho, series, c2, 1e-6);
    } catch (const Error& e) {
      row.value = std::numeric_limits<double>::quiet_NaN();
      row.note = e.what();
    }
    rows.push_back(row);
  }
}

// ---------------------------------------------------------------------------
// fig2: sampling distribution of the estimate under independence (squared)
// and under correlation 0.5.

void run_fig2(const ExperimentConfig& cfg, std::vector<ResultRow>& rows) {
  const int n = cfg.n > 0 ? cfg.n : 200;
  const int reps = cfg.reps > 0 ? cfg.reps : 5000;
  const double sigma = cfg.sigmas.empty() ? 0.2 : cfg.sigmas.front();
  const Bandwidth b(sigma);
  struct Panel {
    const char* name;
    double rho;
    bool squared;
  };
  for (const Panel panel : {Panel{"independent", 0.0, true},
                            Panel{"rho0.5", 0.5, false}}) {
    std::vector<double> vals(static_cast<std::size_t>(reps));
    RandomStream root(cfg.seed);
    RandomStream scen = root.substream(panel.squared ? 0 : 1);
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(reps));
    for (auto& s : seeds) s = scen.next_u64();
    parallel_for_index(reps, [&](std::int64_t r) {
      const Sample s = sample_mvn(
          CorrelationMatrix::equicorrelated(2, panel.rho), n,
          seeds[static_cast<std::size_t>(r)]);
      const double est = estimate(rank_transform(s), b);
      vals[static_cast<std::size_t>(r)] = panel.squared ? est * est : est;
    });
    const std::string params = params_str(
        {{"rho", fmt(panel.rho)}, {"n", fmt(n)}, {"sigma", fmt(sigma)}});
    const char* metric = panel.squared ? "I2" : "I";
    for (int r = 0; r < reps; ++r) {
      ResultRow row;
      row.scenario = panel.name;
      row.params = params;
      row.metric = metric;
      row.value = vals[static_cast<std::size_t>(r)];
      row.replicates = 1;
      rows.push_back(row);
    }
    const SampleMoments m = sample_moments(vals);
    for (const auto& [name, value] :
         std::initializer_list<std::pair<const char*, double>>{
             {"mean", m.mean}, {"sd", std::sqrt(m.variance)}, {"skewness", m.skewness}}) {
      ResultRow row;
      row.scenario = panel.name;
      row.params = params;
      row.metric = std::string(metric) + "_" + name;
      row.value = value;
      row.replicates = reps;
      rows.push_back(row);
    }
  }
}

// ---------------------------------------------------------------------------
// power-sweep: rejection rate against sample size for a scenario.

void run_power_sweep(const ExperimentConfig& cfg, std::vector<ResultRow>& rows) {
  const int d = cfg.d > 0 ? cfg.d : 2;
  Scenario scenario = Scenario::bvn(cfg.rho);
  if (!cfg.scenario.empty()) {
    scenario = Scenario::named(cfg.scenario, d);
    scenario.rho = cfg.rho;
    scenario.d = d;
  }
  std::vector<double> sigmas = cfg.sigmas;
  if (sigmas.empty()) {
    sigmas = {0.2 * std::sqrt(d / 2.0), std::sqrt(d / 2.0)};
  }
  std::vector<int> ns = cfg.n_list;
  if (ns.empty()) ns = {20, 60, 100, 500};
  const int reps = cfg.reps > 0 ? cfg.reps : (cfg.full_scale ? 10000 : 2000);
  const int null_reps = cfg.full_scale ? 100000 : 20000;
  MomentCache cache(cfg.cache_dir.empty() ? MomentCache::default_dir()
                                          : cfg.cache_dir);
  for (double sigma : sigmas) {
    const Bandwidth b(sigma);
    for (int n : ns) {
      ResultRow row;
      row.scenario = scenario.name;
      row.params = params_str({{"d", fmt(d)},
                               {"sigma", fmt(sigma)},
                               {"n", fmt(n)},
                               {"rho", fmt(scenario.rho)},
                               {"level", fmt(cfg.level)},
                               {"reps", fmt(reps)}});
      row.metric = "power";
      row.replicates = reps;
      try {
        const NullMoments moments =
            exact_null_moments(n, d, b, null_reps, cfg.seed, &cache);
        const double cutoff = GammaFit::from_moments(moments.mean, moments.variance)
                                  .quantile(1.0 - cfg.level);
        std::vector<int> reject(static_cast<std::size_t>(reps), 0);
        RandomStream root(cfg.seed);
        RandomStream scen = root.substream(static_cast<std::uint64_t>(n) * 31 +
                                           static_cast<std::uint64_t>(sigma * 1e6));
        std::vector<std::uint64_t> seeds(static_cast<std::size_t>(reps));
        for (auto& s : seeds) s = scen.next_u64();
        parallel_for_index(reps, [&](std::int64_t r) {
          const Sample s =
              sample_scenario(scenario, n, seeds[static_cast<std::size_t>(r)]);
          const TestStatistic t = test_statistic(rank_transform(s), b);
          reject[static_cast<std::size_t>(r)] = t.t > cutoff ? 1 : 0;
        });
        int total = 0;
        for (int v : reject) total += v;
        row.value = static_cast<double>(total) / reps;
        row.std_error = std::sqrt(row.value * (1.0 - row.value) / reps);
      } catch (const Error& e) {
        row.value = std::numeric_limits<double>::quiet_NaN();
        row.note = e.what();
      }
      rows.push_back(row);
    }
  }
}

// ---------------------------------------------------------------------------
// variability: quartiles of the squared estimators across replicates.

void run_variability(const ExperimentConfig& cfg, std::vector<ResultRow>& rows) {
  const int n = cfg.n > 0 ? cfg.n : 100;
  const int m = 1000;
  const int reps = cfg.reps > 0 ? cfg.reps : (cfg.full_scale ? 10000 : 2000);
  const double sigma = cfg.sigmas.empty() ? 1.0 : cfg.sigmas.front();
  const Bandwidth b(sigma);
  for (const double rho : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
    std::vector<double> i2(static_cast<std::size_t>(reps));
    std::vector<double> type_u(static_cast<std::size_t>(reps));
    std::vector<double> type_b(static_cast<std::size_t>(reps));
    RandomStream root(cfg.seed);
    RandomStream scen = root.substream(static_cast<std::uint64_t>(rho * 10.0));
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(reps));
    for (auto& s : seeds) s = scen.next_u64();
    parallel_for_index(reps, [&](std::int64_t r) {
      const std::uint64_t seed = seeds[static_cast<std::size_t>(r)];
      const Sample s =
          sample_mvn(CorrelationMatrix::equicorrelated(2, rho), n, seed);
      const PseudoSample p = rank_transform(s);
      const double est = estimate(p, b);
      i2[static_cast<std::size_t>(r)] = est * est;
      type_u[static_cast<std::size_t>(r)] = estimate_type_u(p, b, seed ^ 0xabcdULL);
      type_b[static_cast<std::size_t>(r)] = estimate_type_b(p, b, m, seed ^ 0xef01ULL);
    });
    struct Series {
      const char* name;
      std::vector<double>* values;
    };
    for (const Series series : {Series{"I2", &i2}, Series{"typeU", &type_u},
                                Series{"typeB", &type_b}}) {
      std::vector<double> sorted = *series.values;
      std::sort(sorted.begin(), sorted.end());
      auto quantile = [&](double q) {
        const double pos = q * (sorted.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        return lo + 1 < sorted.size()
                   ? sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac
                   : sorted.back();
      };
      const std::string params = params_str({{"rho", fmt(rho)},
                                             {"n", fmt(n)},
                                             {"m", fmt(m)},
                                             {"sigma", fmt(sigma)}});
      for (const auto& [stat, value] :
           std::initializer_list<std::pair<const char*, double>>{
               {"q25", quantile(0.25)},
               {"median", quantile(0.5)},
               {"q75", quantile(0.75)}}) {
        ResultRow row;
        row.scenario = series.name;
        row.params = params;
        row.metric = stat;
        row.value = value;
        row.replicates = reps;
        rows.push_back(row);
      }
    }
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult result;
  result.config = config;
  if (config.id == "table1") {
    run_table1(config, result.rows);
  } else if (config.id == "table2") {
    run_table2(config, result.rows);
  } else if (config.id == "table4") {
    run_table4(config, result.rows);
  } else if (config.id == "size-sweep") {
    run_size_sweep(config, result.rows);
  } else if (config.id == "fig1") {
    run_fig1(config, result.rows);
  } else if (config.id == "fig2") {
    run_fig2(config, result.rows);
  } else if (config.id == "power-sweep") {
    run_power_sweep(config, result.rows);
  } else if (config.id == "variability") {
    run_variability(config, result.rows);
  } else {
    throw InvalidInput("unknown experiment id '" + config.id + "'");
  }
  return result;
}

namespace {

json config_json(const ExperimentConfig& c) {
  json j{{"experiment", c.id}, {"seed", c.seed},     {"level", c.level},
         {"reps", c.reps},     {"n", c.n},           {"d", c.d},
         {"rho", c.rho},       {"full", c.full_scale}};
  j["sigmas"] = c.sigmas;
  j["n_list"] = c.n_list;
  if (!c.scenario.empty()) j["scenario"] = c.scenario;
  return j;
}

}  // namespace

void write_result(const ExperimentResult& result,
                  const std::filesystem::path& path,
                  const std::string& format) {
  const std::int64_t now = static_cast<std::int64_t>(std::time(nullptr));
  if (format == "json") {
    json doc{{"version", 1},
             {"config", config_json(result.config)},
             {"created_at", now}};
    json rows = json::array();
    for (const ResultRow& r : result.rows) {
      json row{{"scenario", r.scenario}, {"params", r.params},
               {"metric", r.metric},     {"value", r.value},
               {"replicates", r.replicates}};
      if (r.std_error) row["std_error"] = *r.std_error;
      if (r.reference) row["reference"] = *r.reference;
      if (!r.note.empty()) row["note"] = r.note;
      rows.push_back(row);
    }
    doc["rows"] = rows;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
    return;
  }
  if (format != "csv") throw InvalidInput("format must be csv or json");
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "# cgkdm result schema v1\n";
  out << "# config " << config_json(result.config).dump() << '\n';
  out << "# created_at " << now << '\n';
  out << "experiment,scenario,params,metric,value,std_error,replicates,reference,note\n";
  for (const ResultRow& r : result.rows) {
    out << result.config.id << ',' << r.scenario << ',' << r.params << ','
        << r.metric << ',' << format_double(r.value) << ',';
    if (r.std_error) out << format_double(*r.std_error);
    out << ',' << r.replicates << ',';
    if (r.reference) out << format_double(*r.reference);
    out << ',' << r.note << '\n';
  }
}

}  // namespace cgkdm
