#include "funcgen/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "funcgen/error.hpp"

namespace funcgen {

namespace fs = std::filesystem;

namespace {

enum SeedTag : std::uint64_t {
  kStep1Tag = 0x5354455031ULL,
  kStep2Tag = 0x5354455032ULL,
  kPooledTag = 0x504F4F4CULL,
  kMarginalTag = 0x4D41524731ULL,
  kOracleTag = 0x4F5241434CULL,
  kFigureTag = 0x464947ULL,
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// body(i) for i in [0, count) on up to `workers` threads; each index owns its output slot.
template <class Body>
void parallel_for(Index count, int workers, Body body) {
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (threads == 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::mutex mu;
  std::exception_ptr failure;
  Index next = 0;
  auto worker = [&] {
    for (;;) {
      Index i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (failure || next >= count) return;
        i = next++;
      }
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> decades(int hi, int lo) {
  std::vector<double> out;
  for (int e = hi; e >= lo; --e) out.push_back(std::pow(10.0, e));
  return out;
}

std::vector<LabeledSample> labeled(const std::vector<Domain>& ds) {
  std::vector<LabeledSample> out;
  out.reserve(ds.size());
  for (const auto& d : ds) out.push_back({d.xs, d.ys});
  return out;
}

std::string to_string(EvalMode m) { return m == EvalMode::noiseless ? "noiseless" : "noisy"; }
std::string to_string(EvalPoints p) { return p == EvalPoints::sample ? "sample" : "grid"; }

Json domains_meta(const std::vector<Domain>& ds) {
  Json out = Json::array();
  for (const auto& d : ds) out.push_back(Json{{"mu", d.spec.mu}, {"var", d.spec.var}, {"seed", d.spec.seed}});
  return out;
}

void write_split(const fs::path& dir, const std::vector<Domain>& ds, const ExperimentConfig& c, bool with_truth) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& d = ds[i];
    std::vector<std::string> header = {"x", "y"};
    std::vector<Vector> cols = {d.xs, d.ys};
    if (with_truth) {
      header.push_back("f_true");
      cols.push_back(d.f_true);
    }
    write_columns(dir / ("domain_" + std::to_string(i) + ".csv"), header, cols);
  }
  write_json(dir / "meta.json",
             Json{{"master_seed", c.master_seed}, {"domains", domains_meta(ds)}, {"noise_var", c.noise_var}});
}

std::vector<Domain> read_split(const fs::path& dir) {
  const Json meta = read_json(dir / "meta.json");
  std::vector<Domain> out;
  const auto& doms = meta.at("domains");
  for (std::size_t i = 0; i < doms.size(); ++i) {
    Domain d;
    d.spec.mu = doms[i].at("mu").get<double>();
    d.spec.var = doms[i].at("var").get<double>();
    d.spec.seed = doms[i].at("seed").get<std::uint64_t>();
    const CsvTable t = read_csv(dir / ("domain_" + std::to_string(i) + ".csv"));
    const Index rows = static_cast<Index>(t.rows.size());
    d.xs.resize(rows);
    d.ys.resize(rows);
    d.f_true.resize(rows);
    const bool has_truth = t.header.size() >= 3 && t.header[2] == "f_true";
    for (Index r = 0; r < rows; ++r) {
      const auto& row = t.rows[static_cast<std::size_t>(r)];
      if (row.size() < 2) throw ConfigError("malformed row in " + (dir / ("domain_" + std::to_string(i) + ".csv")).string());
      d.xs[r] = std::stod(row[0]);
      d.ys[r] = std::stod(row[1]);
      d.f_true[r] = has_truth ? std::stod(row[2]) : regression_target(d.xs[r], d.spec.mu);
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<EmpiricalEmbedding> embed_all(const std::vector<Domain>& ds, const KernelSpec& k) {
  std::vector<EmpiricalEmbedding> out;
  out.reserve(ds.size());
  for (const auto& d : ds) out.push_back(embed(d.xs, k));
  return out;
}

// Evaluation points and noiseless truth for one target domain.
struct EvalSet {
  Vector points;
  Vector truth;
};

EvalSet eval_set(const ExperimentConfig& c, const Domain& d) {
  if (c.eval_points == EvalPoints::sample)
    return {d.xs, c.eval_mode == EvalMode::noiseless ? d.f_true : d.ys};
  const Quadrature dense(1000);
  std::vector<double> pts;
  const Environment env = c.environment();
  for (const double t : dense.nodes())
    if (t >= d.spec.mu - env.half_width && t <= d.spec.mu + env.half_width) pts.push_back(t);
  EvalSet s;
  s.points = Eigen::Map<const Vector>(pts.data(), static_cast<Index>(pts.size()));
  s.truth = s.points.unaryExpr([mu = d.spec.mu](double x) { return regression_target(x, mu); });
  return s;
}

double mse(const Vector& a, const Vector& b) { return (a - b).squaredNorm() / static_cast<double>(a.size()); }

}  // namespace

void ExperimentConfig::validate() const {
  if (N < 1 || n < 1 || n_test_domains < 1) throw ConfigError("config: N, n and n_test_domains must be positive");
  if (q < 2) throw ConfigError("config: q must be at least 2");
  if (folds < 2) throw ConfigError("config: folds must be at least 2");
  if (noise_var < 0.0) throw ConfigError("config: noise_var must be non-negative");
  if (workers < 1) throw ConfigError("config: workers must be positive");
  if (schedule.mode == LambdaSchedule::Mode::theory) {
    if (!(schedule.c3 > 0.0 && schedule.c3 <= 1.0) || !(schedule.c6 > 0.0 && schedule.c6 <= 1.0))
      throw ConfigError("config: c3 and c6 must lie in (0, 1]");
  }
  try {
    embedding_kernel.validate();
    step1_grid.validate();
    step2_grid.validate();
    if (pooled) pooled_grid.validate();
    if (marginal) marginal_grid.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

Environment ExperimentConfig::environment() const {
  Environment env;
  env.noise_var = noise_var;
  env.master_seed = master_seed;
  return env;
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  for (const double l : {1e-1, 1e-2, 1e-3, 1e-4}) c.step1_grid.kernels.push_back(KernelSpec::gaussian(l));
  for (const double l : {1.0, 1e-1, 1e-2})
    for (const double p : {1.0, 2.0, 3.0, 5.0, 10.0}) c.step1_grid.kernels.push_back(KernelSpec::periodic(l, p));
  c.step1_grid.lambdas = decades(-1, -4);

  for (const double l : {1e-2, 1e-1, 1.0, 10.0}) c.step2_grid.kernels.push_back(KernelSpec::gaussian(l));
  c.step2_grid.lambdas = decades(-1, -10);

  for (const double l : {1.0, 5.0, 10.0}) c.pooled_grid.kernels.push_back(KernelSpec::gaussian(l));
  for (const double l : {1.0, 1e-1, 1e-2}) c.pooled_grid.kernels.push_back(KernelSpec::periodic(l, 1.0));
  c.pooled_grid.lambdas = decades(-1, -6);

  c.marginal_grid.embedding_kernels = {KernelSpec::gaussian(1e-2), KernelSpec::gaussian(1e-3),
                                       KernelSpec::periodic(1.0, 1.0)};
  c.marginal_grid.distribution_kernels = {KernelSpec::gaussian(1.0), KernelSpec::gaussian(1e3),
                                          KernelSpec::gaussian(1e-3)};
  for (int e = 3; e >= -3; --e) c.marginal_grid.input_kernels.push_back(KernelSpec::gaussian(std::pow(10.0, e)));
  for (const double l : {1.0, 1e-1, 1e-2}) c.marginal_grid.input_kernels.push_back(KernelSpec::periodic(l, 1.0));
  c.marginal_grid.lambdas = decades(3, -4);
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json baselines = Json::array();
  if (c.pooled) baselines.push_back("pooled");
  if (c.marginal) baselines.push_back("marginal");
  Json schedule{{"mode", c.schedule.mode == LambdaSchedule::Mode::cv ? "cv" : "theory"}};
  if (c.schedule.mode == LambdaSchedule::Mode::theory) {
    schedule["c3"] = c.schedule.c3;
    schedule["c6"] = c.schedule.c6;
  }
  return Json{{"N", c.N},
              {"n", c.n},
              {"n_test_domains", c.n_test_domains},
              {"q", c.q},
              {"master_seed", c.master_seed},
              {"noise_var", c.noise_var},
              {"embedding_kernel", to_json(c.embedding_kernel)},
              {"step1_grid", to_json(c.step1_grid)},
              {"step2_grid", to_json(c.step2_grid)},
              {"pooled_grid", to_json(c.pooled_grid)},
              {"marginal_grid", to_json(c.marginal_grid)},
              {"lambda_schedule", schedule},
              {"eval_mode", to_string(c.eval_mode)},
              {"eval_points", to_string(c.eval_points)},
              {"baselines", baselines},
              {"folds", c.folds},
              {"slope_scoring", to_string(c.slope_scoring)},
              {"center_outputs", c.center_outputs},
              {"workers", c.workers},
              {"max_marginal_points", c.max_marginal_points}};
}

ExperimentConfig config_from_json(const Json& j, ExperimentConfig c) {
  try {
    if (j.contains("N")) c.N = j["N"].get<Index>();
    if (j.contains("n")) c.n = j["n"].get<Index>();
    if (j.contains("n_test_domains")) c.n_test_domains = j["n_test_domains"].get<Index>();
    if (j.contains("q")) c.q = j["q"].get<Index>();
    if (j.contains("master_seed")) c.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("noise_var")) c.noise_var = j["noise_var"].get<double>();
    if (j.contains("embedding_kernel")) c.embedding_kernel = kernel_from_json(j["embedding_kernel"]);
    if (j.contains("step1_grid")) c.step1_grid = search_grid_from_json(j["step1_grid"]);
    if (j.contains("step2_grid")) c.step2_grid = search_grid_from_json(j["step2_grid"]);
    if (j.contains("pooled_grid")) c.pooled_grid = search_grid_from_json(j["pooled_grid"]);
    if (j.contains("marginal_grid")) c.marginal_grid = marginal_grid_from_json(j["marginal_grid"]);
    if (j.contains("lambda_schedule")) {
      const Json& s = j["lambda_schedule"];
      const std::string mode = s.value("mode", "cv");
      if (mode == "cv") {
        c.schedule.mode = LambdaSchedule::Mode::cv;
      } else if (mode == "theory") {
        c.schedule.mode = LambdaSchedule::Mode::theory;
      } else {
        throw ConfigError("config: unknown lambda_schedule mode '" + mode + "'");
      }
      c.schedule.c3 = s.value("c3", c.schedule.c3);
      c.schedule.c6 = s.value("c6", c.schedule.c6);
    }
    if (j.contains("eval_mode")) {
      const auto m = j["eval_mode"].get<std::string>();
      if (m != "noiseless" && m != "noisy") throw ConfigError("config: unknown eval_mode '" + m + "'");
      c.eval_mode = m == "noiseless" ? EvalMode::noiseless : EvalMode::noisy;
    }
    if (j.contains("eval_points")) {
      const auto m = j["eval_points"].get<std::string>();
      if (m != "sample" && m != "grid") throw ConfigError("config: unknown eval_points '" + m + "'");
      c.eval_points = m == "sample" ? EvalPoints::sample : EvalPoints::grid;
    }
    if (j.contains("baselines")) {
      c.pooled = c.marginal = false;
      for (const auto& b : j["baselines"]) {
        const auto name = b.get<std::string>();
        if (name == "pooled") c.pooled = true;
        else if (name == "marginal") c.marginal = true;
        else if (name != "none") throw ConfigError("config: unknown baseline '" + name + "'");
      }
    }
    if (j.contains("folds")) c.folds = j["folds"].get<int>();
    if (j.contains("slope_scoring")) c.slope_scoring = slope_scoring_from_string(j["slope_scoring"].get<std::string>());
    if (j.contains("center_outputs")) c.center_outputs = j["center_outputs"].get<bool>();
    if (j.contains("workers")) c.workers = j["workers"].get<int>();
    if (j.contains("max_marginal_points")) c.max_marginal_points = j["max_marginal_points"].get<Index>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
  return splitmix64(splitmix64(master ^ tag) + index);
}

Dataset generate_dataset(const ExperimentConfig& c) {
  const Environment env = c.environment();
  return {generate_sources(env, c.N, c.n), generate_targets(env, c.n_test_domains, c.n)};
}

Dataset run_generate(const ExperimentConfig& c, const fs::path& out_dir) {
  c.validate();
  Dataset d = generate_dataset(c);
  try {
    write_split(out_dir / "source", d.sources, c, false);
    write_split(out_dir / "target", d.targets, c, true);
  } catch (const fs::filesystem_error& e) {
    throw ConfigError(std::string("generate: ") + e.what());
  }
  return d;
}

Dataset load_dataset(const fs::path& data_dir) {
  if (!fs::exists(data_dir / "source" / "meta.json")) throw ConfigError("no dataset at " + data_dir.string());
  Dataset d;
  d.sources = read_split(data_dir / "source");
  if (fs::exists(data_dir / "target" / "meta.json")) d.targets = read_split(data_dir / "target");
  return d;
}

DomainModel fit_domain(const ExperimentConfig& c, const Vector& xs, const Vector& ys, std::uint64_t seed,
                       const std::string& id, CvReport* report) {
  SearchGrid grid = c.step1_grid;
  if (c.schedule.mode == LambdaSchedule::Mode::theory) grid.lambdas = {theory_lambda(xs.size(), c.schedule.c3)};
  KrrSelection sel = cv_krr(xs, ys, grid, c.folds, seed);
  DomainModel m{krr_fit(xs, ys, sel.kernel, sel.lambda), sel.kernel, sel.lambda, id};
  if (report) *report = std::move(sel.report);
  return m;
}

FittedModels fit_all(const ExperimentConfig& c, const std::vector<Domain>& sources) {
  c.validate();
  if (static_cast<Index>(sources.size()) < c.folds) throw ConfigError("fit: fewer source domains than folds");
  for (const auto& d : sources)
    if (d.xs.size() < c.folds) throw ConfigError("fit: a source domain has fewer points than folds");
  FittedModels m;
  const Index n_src = static_cast<Index>(sources.size());

  auto t0 = Clock::now();
  m.step1.resize(sources.size());
  m.step1_reports.resize(sources.size());
  try {
    parallel_for(n_src, c.workers, [&](Index i) {
      const auto& d = sources[static_cast<std::size_t>(i)];
      m.step1[static_cast<std::size_t>(i)] =
          fit_domain(c, d.xs, d.ys, derive_seed(c.master_seed, kStep1Tag, static_cast<std::uint64_t>(i)),
                     "source_" + std::to_string(i), &m.step1_reports[static_cast<std::size_t>(i)]);
    });
  } catch (const std::exception& e) {
    throw NumericalError(std::string("step 1 (domain ridge regression): ") + e.what(), 0.0);
  }
  m.timings["step1"] = seconds_since(t0);

  t0 = Clock::now();
  const Quadrature q(c.q);
  const auto ms = embed_all(sources, c.embedding_kernel);
  std::vector<RkhsFunction> fs;
  for (const auto& dm : m.step1) fs.push_back(dm.fit);
  SearchGrid grid = c.step2_grid;
  if (c.schedule.mode == LambdaSchedule::Mode::theory) grid.lambdas = {theory_lambda(n_src, c.schedule.c6)};
  try {
    SlopeSelection sel = cv_slope(ms, fs, grid, c.folds, q, derive_seed(c.master_seed, kStep2Tag, 0),
                                  c.slope_scoring, c.center_outputs);
    m.slope = fit_slope(ms, fs, sel.kernel, sel.lambda, q, c.center_outputs);
    m.slope_report = std::move(sel.report);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("step 2 (slope regression): ") + e.what(), e.condition_estimate());
  }
  m.timings["step2"] = seconds_since(t0);

  const auto samples = labeled(sources);
  if (c.pooled) {
    t0 = Clock::now();
    const LabeledSample all = pool(samples);
    KrrSelection sel = cv_krr(all.xs, all.ys, c.pooled_grid, c.folds, derive_seed(c.master_seed, kPooledTag, 0));
    m.pooled = DomainModel{pooled_fit(samples, sel.kernel, sel.lambda), sel.kernel, sel.lambda, "pooled"};
    m.pooled_report = std::move(sel.report);
    m.timings["pooled"] = seconds_since(t0);
  }
  if (c.marginal) {
    t0 = Clock::now();
    MarginalSelection sel = cv_marginal_transfer(samples, c.marginal_grid, c.folds,
                                                 derive_seed(c.master_seed, kMarginalTag, 0), c.max_marginal_points);
    m.marginal = marginal_transfer_fit(samples, sel.embedding_kernel, sel.distribution_kernel, sel.input_kernel,
                                       sel.lambda, c.max_marginal_points);
    m.marginal_report = std::move(sel.report);
    m.timings["marginal"] = seconds_since(t0);
  }
  return m;
}

void save_models(const FittedModels& m, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  Json step1 = Json::array();
  for (const auto& d : m.step1) step1.push_back(to_json(d));
  write_json(out_dir / "step1.json", Json{{"domains", step1}});
  Json reports = Json::array();
  for (const auto& r : m.step1_reports) reports.push_back(to_json(r));
  write_json(out_dir / "step1_cv.json", Json{{"reports", reports}});
  write_json(out_dir / "funcreg.json", to_json(m.slope));
  write_json(out_dir / "funcreg_cv.json", to_json(m.slope_report));
  if (m.pooled) {
    write_json(out_dir / "pooled.json", to_json(*m.pooled));
    write_json(out_dir / "pooled_cv.json", to_json(*m.pooled_report));
  }
  if (m.marginal) {
    write_json(out_dir / "marginal.json", to_json(*m.marginal));
    write_json(out_dir / "marginal_cv.json", to_json(*m.marginal_report));
  }
  write_json(out_dir / "timings.json", Json(m.timings));
}

FittedModels load_models(const fs::path& dir) {
  if (!fs::exists(dir / "funcreg.json") || !fs::exists(dir / "step1.json"))
    throw ConfigError("missing functional-regression model in " + dir.string());
  FittedModels m;
  const Json step1 = read_json(dir / "step1.json");
  for (const auto& d : step1.at("domains")) m.step1.push_back(domain_model_from_json(d));
  if (fs::exists(dir / "step1_cv.json")) {
    const Json reports = read_json(dir / "step1_cv.json");
    for (const auto& r : reports.at("reports")) m.step1_reports.push_back(cv_report_from_json(r));
  }
  m.slope = slope_operator_from_json(read_json(dir / "funcreg.json"));
  if (fs::exists(dir / "funcreg_cv.json")) m.slope_report = cv_report_from_json(read_json(dir / "funcreg_cv.json"));
  if (fs::exists(dir / "pooled.json")) {
    m.pooled = domain_model_from_json(read_json(dir / "pooled.json"));
    if (fs::exists(dir / "pooled_cv.json")) m.pooled_report = cv_report_from_json(read_json(dir / "pooled_cv.json"));
  }
  if (fs::exists(dir / "marginal.json")) {
    m.marginal = marginal_model_from_json(read_json(dir / "marginal.json"));
    if (fs::exists(dir / "marginal_cv.json"))
      m.marginal_report = cv_report_from_json(read_json(dir / "marginal_cv.json"));
  }
  if (fs::exists(dir / "timings.json")) m.timings = read_json(dir / "timings.json").get<std::map<std::string, double>>();
  return m;
}

FittedModels run_fit(const ExperimentConfig& c, const fs::path& data_dir, const fs::path& out_dir) {
  const Dataset d = load_dataset(data_dir);
  FittedModels m = fit_all(c, d.sources);
  save_models(m, out_dir);
  return m;
}

const MethodErrors& EvaluationReport::at(const std::string& method) const {
  for (const auto& m : methods)
    if (m.method == method) return m;
  throw ConfigError("evaluation report has no method '" + method + "'");
}

EvaluationReport evaluate(const ExperimentConfig& c, const FittedModels& m, const std::vector<Domain>& targets) {
  if (targets.empty()) throw ConfigError("evaluate: no target domains");
  if (c.pooled && !m.pooled) throw ConfigError("evaluate: pooled baseline enabled but no pooled model was fitted");
  if (c.marginal && !m.marginal) throw ConfigError("evaluate: marginal baseline enabled but no marginal model was fitted");
  const Index nt = static_cast<Index>(targets.size());
  std::vector<std::string> names = {"oracle", "parabola"};
  if (c.pooled) names.push_back("pooled");
  if (c.marginal) names.push_back("marginal");
  names.push_back("funcreg");

  EvaluationReport r;
  r.config = to_json(c);
  for (const auto& name : names) r.methods.push_back({name, Vector::Zero(nt), 0.0});
  auto slot = [&](const std::string& name) -> Vector& {
    for (auto& me : r.methods)
      if (me.method == name) return me.per_domain;
    throw std::logic_error("unknown method");
  };

  std::map<std::string, double> secs;
  for (const auto& name : names) secs[name] = 0.0;
  std::mutex timing_mu;
  auto timed = [&](const std::string& name, auto&& fn) {
    const auto t0 = Clock::now();
    fn();
    const double dt = seconds_since(t0);
    std::lock_guard<std::mutex> lock(timing_mu);
    secs[name] += dt;
  };

  parallel_for(nt, c.workers, [&](Index j) {
    const Domain& d = targets[static_cast<std::size_t>(j)];
    const EvalSet es = eval_set(c, d);
    timed("oracle", [&] {
      const DomainModel om =
          fit_domain(c, d.xs, d.ys, derive_seed(c.master_seed, kOracleTag, static_cast<std::uint64_t>(j)), "oracle");
      slot("oracle")[j] = mse(krr_eval(om.fit, es.points), es.truth);
    });
    timed("parabola", [&] {
      slot("parabola")[j] = mse(es.points.unaryExpr([](double x) { return parabola_reference(x); }), es.truth);
    });
    if (c.pooled) timed("pooled", [&] { slot("pooled")[j] = mse(krr_eval(m.pooled->fit, es.points), es.truth); });
    if (c.marginal)
      timed("marginal", [&] {
        slot("marginal")[j] = mse(marginal_transfer_predict(*m.marginal, d.xs, es.points), es.truth);
      });
    timed("funcreg", [&] {
      slot("funcreg")[j] = mse(predict(m.slope, embed(d.xs, m.slope.embedding_kernel()), es.points), es.truth);
    });
  });
  for (auto& me : r.methods) me.mean = me.per_domain.sum() / static_cast<double>(nt);
  for (const auto& [name, s] : secs) r.timings["evaluate_" + name] = s;
  for (const auto& [name, s] : m.timings) r.timings["fit_" + name] = s;
  return r;
}

void write_evaluation_csv(const EvaluationReport& r, const fs::path& path) {
  CsvTable t;
  t.header.push_back("method");
  const Index nt = r.methods.empty() ? 0 : r.methods.front().per_domain.size();
  for (Index j = 0; j < nt; ++j) t.header.push_back("domain_" + std::to_string(j));
  t.header.push_back("mean");
  for (const auto& me : r.methods) {
    std::vector<std::string> row = {me.method};
    for (Index j = 0; j < nt; ++j) row.push_back(format_double(me.per_domain[j]));
    row.push_back(format_double(me.mean));
    t.rows.push_back(std::move(row));
  }
  write_csv(path, t);
}

namespace {

Json report_json(const EvaluationReport& r) {
  Json methods = Json::array();
  for (const auto& me : r.methods)
    methods.push_back(Json{{"method", me.method}, {"mean", me.mean}, {"per_domain", to_json(me.per_domain)}});
  return Json{{"methods", methods}, {"config", r.config}, {"timings", r.timings}};
}

}  // namespace

EvaluationReport run_evaluate(const ExperimentConfig& c, const fs::path& data_dir, const fs::path& models_dir,
                              const fs::path& out_csv) {
  const Dataset d = load_dataset(data_dir);
  const FittedModels m = load_models(models_dir);
  EvaluationReport r = evaluate(c, m, d.targets);
  if (out_csv.has_parent_path()) fs::create_directories(out_csv.parent_path());
  write_evaluation_csv(r, out_csv);
  fs::path report_path = out_csv;
  report_path.replace_extension(".json");
  write_json(report_path, report_json(r));
  return r;
}

void write_figure_data(const ExperimentConfig& c, const Dataset& data, const FittedModels& m, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const Quadrature dense(1000);
  const Vector& x = dense.nodes();

  // (a) histogram densities of the source inputs, 20 bins on [0,1]
  {
    constexpr int kBins = 20;
    std::vector<std::string> header = {"x"};
    std::vector<Vector> cols = {x};
    for (std::size_t i = 0; i < data.sources.size(); ++i) {
      const Vector& xs = data.sources[i].xs;
      Vector counts = Vector::Zero(kBins);
      for (const double v : xs) counts[std::clamp(static_cast<int>(v * kBins), 0, kBins - 1)] += 1.0;
      counts *= static_cast<double>(kBins) / static_cast<double>(xs.size());
      header.push_back("domain_" + std::to_string(i));
      cols.push_back(x.unaryExpr([&](double t) { return counts[std::clamp(static_cast<int>(t * kBins), 0, kBins - 1)]; }));
    }
    write_columns(out_dir / "fig_a_input_densities.csv", header, cols);
  }
  // (b) step-1 fits
  {
    std::vector<std::string> header = {"x"};
    std::vector<Vector> cols = {x};
    for (std::size_t i = 0; i < m.step1.size(); ++i) {
      header.push_back("fit_" + std::to_string(i));
      cols.push_back(krr_eval(m.step1[i].fit, x));
    }
    write_columns(out_dir / "fig_b_domain_fits.csv", header, cols);
  }
  // (c) pooled fit and parabola
  {
    std::vector<std::string> header = {"x", "parabola"};
    std::vector<Vector> cols = {x, x.unaryExpr([](double t) { return parabola_reference(t); })};
    if (m.pooled) {
      header.push_back("pooled");
      cols.push_back(krr_eval(m.pooled->fit, x));
    }
    write_columns(out_dir / "fig_c_pooled_parabola.csv", header, cols);
  }
  // (d) four random targets: prediction and noiseless truth
  {
    std::vector<std::size_t> idx(data.targets.size());
    for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = j;
    std::mt19937_64 rng(derive_seed(c.master_seed, kFigureTag, 0));
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(std::min<std::size_t>(4, idx.size()));
    std::sort(idx.begin(), idx.end());
    std::vector<std::string> header = {"x"};
    std::vector<Vector> cols = {x};
    for (const std::size_t j : idx) {
      const Domain& d = data.targets[j];
      header.push_back("target_" + std::to_string(j) + "_funcreg");
      cols.push_back(predict(m.slope, embed(d.xs, m.slope.embedding_kernel()), x));
      header.push_back("target_" + std::to_string(j) + "_truth");
      cols.push_back(x.unaryExpr([mu = d.spec.mu](double t) { return regression_target(t, mu); }));
    }
    write_columns(out_dir / "fig_d_target_predictions.csv", header, cols);
  }
}

ReproduceSummary run_reproduce(const ExperimentConfig& base, const std::vector<std::uint64_t>& seeds,
                               const fs::path& out_dir) {
  if (seeds.empty()) throw ConfigError("reproduce: at least one seed is required");
  ReproduceSummary s;
  s.seeds = seeds;
  fs::create_directories(out_dir);
  for (const std::uint64_t seed : seeds) {
    ExperimentConfig c = base;
    c.master_seed = seed;
    const fs::path dir = out_dir / ("seed_" + std::to_string(seed));
    const Dataset data = run_generate(c, dir / "data");
    const FittedModels m = fit_all(c, data.sources);
    save_models(m, dir / "models");
    EvaluationReport r = evaluate(c, m, data.targets);
    write_evaluation_csv(r, dir / "evaluation.csv");
    write_json(dir / "evaluation.json", report_json(r));
    write_figure_data(c, data, m, dir / "figures");
    s.reports.push_back(std::move(r));
  }
  for (const auto& me : s.reports.front().methods) s.methods.push_back(me.method);

  CsvTable t{{"method", "seed", "mean_error"}, {}};
  for (const auto& name : s.methods) {
    double acc = 0.0;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const double v = s.reports[k].at(name).mean;
      acc += v;
      t.rows.push_back({name, std::to_string(seeds[k]), format_double(v)});
    }
    s.cross_seed_mean[name] = acc / static_cast<double>(seeds.size());
  }
  for (const auto& name : s.methods) t.rows.push_back({name, "mean", format_double(s.cross_seed_mean[name])});
  write_csv(out_dir / "summary.csv", t);
  return s;
}

}  // namespace funcgen
