#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "funcgen/error.hpp"
#include "funcgen/experiment.hpp"

using namespace funcgen;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("funcgen_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const fs::path& p) {
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

ExperimentConfig small_config() {
  ExperimentConfig c = default_config();
  c.N = 10;
  c.n = 25;
  c.n_test_domains = 4;
  c.q = 100;
  c.master_seed = 3;
  return c;
}

}  // namespace

TEST_CASE("generated files") {
  ExperimentConfig c = small_config();
  c.N = 2;
  c.n = 3;
  c.n_test_domains = 2;
  const fs::path a = scratch("gen_a"), b = scratch("gen_b");
  run_generate(c, a);
  run_generate(c, b);
  for (const auto* split : {"source", "target"}) {
    for (int i = 0; i < 2; ++i) {
      const fs::path f = a / split / ("domain_" + std::to_string(i) + ".csv");
      REQUIRE(fs::exists(f));
      CHECK(line_count(f) == 4);
      CHECK(slurp(f) == slurp(b / split / ("domain_" + std::to_string(i) + ".csv")));
    }
    CHECK(slurp(a / split / "meta.json") == slurp(b / split / "meta.json"));
  }
  CHECK(slurp(a / "source" / "domain_0.csv").rfind("x,y\n", 0) == 0);
  CHECK(slurp(a / "target" / "domain_0.csv").rfind("x,y,f_true\n", 0) == 0);

  const Json meta = read_json(a / "source" / "meta.json");
  CHECK(meta.at("master_seed").get<std::uint64_t>() == 3);
  CHECK(meta.at("noise_var").get<double>() == 0.02);
  CHECK(meta.at("domains").size() == 2);
}

TEST_CASE("datasets round-trip through disk") {
  const ExperimentConfig c = small_config();
  const fs::path dir = scratch("roundtrip");
  const Dataset d = run_generate(c, dir);
  const Dataset e = load_dataset(dir);
  REQUIRE(e.sources.size() == d.sources.size());
  REQUIRE(e.targets.size() == d.targets.size());
  for (std::size_t i = 0; i < d.sources.size(); ++i) {
    CHECK(e.sources[i].xs == d.sources[i].xs);
    CHECK(e.sources[i].ys == d.sources[i].ys);
    CHECK(e.sources[i].spec.mu == d.sources[i].spec.mu);
    CHECK(e.sources[i].spec.var == d.sources[i].spec.var);
    CHECK(e.sources[i].spec.seed == d.sources[i].spec.seed);
  }
  for (std::size_t i = 0; i < d.targets.size(); ++i) CHECK(e.targets[i].f_true == d.targets[i].f_true);
  for (const auto& dom : d.sources) {
    CHECK(dom.xs.minCoeff() >= 0.0);
    CHECK(dom.xs.maxCoeff() <= 1.0);
  }
  CHECK_THROWS_AS(load_dataset(dir / "missing"), ConfigError);
}

TEST_CASE("fit artifacts and determinism") {
  ExperimentConfig c = small_config();
  c.pooled = false;
  const fs::path data = scratch("fit_data"), m1 = scratch("fit_m1"), m2 = scratch("fit_m2");
  run_generate(c, data);
  run_fit(c, data, m1);
  run_fit(c, data, m2);
  for (const auto* f : {"step1.json", "step1_cv.json", "funcreg.json", "funcreg_cv.json"}) {
    CHECK(fs::exists(m1 / f));
    CHECK(slurp(m1 / f) == slurp(m2 / f));
  }
  CHECK(!fs::exists(m1 / "pooled.json"));
  CHECK(!fs::exists(m1 / "marginal.json"));

  const FittedModels loaded = load_models(m1);
  CHECK(loaded.step1.size() == 10);
  CHECK(!loaded.pooled);
  CHECK_THROWS_AS(load_models(scratch("fit_empty")), ConfigError);
  c.pooled = true;
  CHECK_THROWS_AS(evaluate(c, loaded, load_dataset(data).targets), ConfigError);
}

TEST_CASE("theory schedule is recorded in the model files") {
  ExperimentConfig c = small_config();
  c.pooled = false;
  c.schedule = {LambdaSchedule::Mode::theory, 1.0, 1.0};
  const fs::path data = scratch("theory_data"), models = scratch("theory_models");
  run_generate(c, data);
  run_fit(c, data, models);
  for (const auto& d : read_json(models / "step1.json").at("domains"))
    CHECK(d.at("lambda").get<double>() == doctest::Approx(1.0 / 5.0).epsilon(1e-15));
  CHECK(read_json(models / "funcreg.json").at("lambda").get<double>() ==
        doctest::Approx(1.0 / std::sqrt(10.0)).epsilon(1e-15));
}

TEST_CASE("evaluation rows") {
  const ExperimentConfig c = small_config();
  const fs::path data = scratch("eval_data"), models = scratch("eval_models");
  const Dataset d = run_generate(c, data);
  run_fit(c, data, models);
  const fs::path csv = scratch("eval_out") / "eval.csv";
  const EvaluationReport r = run_evaluate(c, data, models, csv);
  std::vector<std::string> names;
  for (const auto& me : r.methods) names.push_back(me.method);
  CHECK(names == std::vector<std::string>{"oracle", "parabola", "pooled", "funcreg"});
  for (const auto& me : r.methods) {
    double s = 0.0;
    for (Index j = 0; j < me.per_domain.size(); ++j) s += me.per_domain[j];
    CHECK(me.mean == s / static_cast<double>(me.per_domain.size()));
  }
  // Parabola error is the mean of the squared sine term over the target sample.
  for (std::size_t j = 0; j < d.targets.size(); ++j) {
    const Domain& t = d.targets[j];
    double ref = 0.0;
    for (const double x : t.xs) ref += std::pow(0.1 * std::sin(3.0 * x / (t.spec.mu * t.spec.mu)), 2);
    CHECK(r.at("parabola").per_domain[static_cast<Index>(j)] == doctest::Approx(ref / t.xs.size()).epsilon(1e-12));
  }
  CHECK(fs::exists(csv));
  CHECK(line_count(csv) == 5);
  const CsvTable t = read_csv(csv);
  CHECK(t.header.front() == "method");
  CHECK(t.header.back() == "mean");
  CHECK(t.header.size() == 6);
  const Json rep = read_json(fs::path(csv).replace_extension(".json"));
  CHECK(rep.at("timings").contains("fit_step1"));
  CHECK(rep.at("config").at("N").get<int>() == 10);
  for (const auto& me : r.methods)
    if (me.method != "oracle") CHECK(r.at("oracle").mean <= me.mean);
}

TEST_CASE("oracle interpolates noiseless labels") {
  ExperimentConfig c = small_config();
  c.noise_var = 0.0;
  c.step1_grid = {{KernelSpec::gaussian(0.1)}, {1e-12}};
  c.pooled = false;
  const Dataset d = generate_dataset(c);
  const FittedModels m = fit_all(c, d.sources);
  const EvaluationReport r = evaluate(c, m, d.targets);
  CHECK(r.at("oracle").mean <= 1e-8);
}

TEST_CASE("noisy evaluation adds about the noise variance") {
  ExperimentConfig c = small_config();
  c.pooled = false;
  c.n = 100;
  c.n_test_domains = 20;
  const Dataset d = generate_dataset(c);
  const FittedModels m = fit_all(c, d.sources);
  const double clean = evaluate(c, m, d.targets).at("oracle").mean;
  c.eval_mode = EvalMode::noisy;
  const double noisy = evaluate(c, m, d.targets).at("oracle").mean;
  CHECK(noisy - clean == doctest::Approx(0.02).epsilon(0.2));
}

TEST_CASE("grid evaluation points") {
  ExperimentConfig c = small_config();
  c.pooled = false;
  c.eval_points = EvalPoints::grid;
  const Dataset d = generate_dataset(c);
  const FittedModels m = fit_all(c, d.sources);
  const EvaluationReport r = evaluate(c, m, d.targets);
  CHECK(r.at("parabola").mean > 0.0);
  CHECK(std::isfinite(r.at("funcreg").mean));
}

TEST_CASE("reproduction outputs") {
  ExperimentConfig c = small_config();
  const fs::path out = scratch("repro");
  const ReproduceSummary s = run_reproduce(c, {1, 2}, out);
  CHECK(s.methods.size() == 4);
  CHECK(line_count(out / "summary.csv") == 1 + 4 * 2 + 4);
  const CsvTable t = read_csv(out / "summary.csv");
  CHECK(t.header == std::vector<std::string>{"method", "seed", "mean_error"});
  CHECK(t.rows.back()[1] == "mean");
  const fs::path fig = out / "seed_1" / "figures";
  for (const auto* f : {"fig_a_input_densities.csv", "fig_b_domain_fits.csv", "fig_c_pooled_parabola.csv",
                        "fig_d_target_predictions.csv"}) {
    const CsvTable ft = read_csv(fig / f);
    CHECK(ft.header.front() == "x");
    CHECK(ft.rows.size() == 1000);
  }
  CHECK(read_csv(fig / "fig_b_domain_fits.csv").header.size() == 11);
  CHECK(read_csv(fig / "fig_c_pooled_parabola.csv").header.size() == 3);
  CHECK(read_csv(fig / "fig_d_target_predictions.csv").header.size() == 9);
  CHECK(s.cross_seed_mean.at("funcreg") ==
        (s.reports[0].at("funcreg").mean + s.reports[1].at("funcreg").mean) / 2.0);
}

TEST_CASE("config files") {
  const ExperimentConfig c = small_config();
  const ExperimentConfig back = config_from_json(to_json(c));
  CHECK(to_json(back).dump() == to_json(c).dump());
  const ExperimentConfig partial = config_from_json(Json{{"N", 7}, {"baselines", Json::array({"marginal"})}});
  CHECK(partial.N == 7);
  CHECK(partial.n == 100);
  CHECK(!partial.pooled);
  CHECK(partial.marginal);
  CHECK_THROWS_AS(config_from_json(Json{{"q", 1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json{{"N", 0}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json{{"eval_mode", "loud"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json{{"baselines", Json::array({"mystery"})}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json{{"lambda_schedule", {{"mode", "theory"}, {"c3", 0.0}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json{{"N", "many"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json{{"step1_grid", {{"kernels", Json::array()}, {"lambdas", {1.0}}}}}),
                  ConfigError);
}

TEST_CASE("serialized models reload to identical predictions") {
  ExperimentConfig c = small_config();
  c.pooled = true;
  c.marginal = true;
  c.marginal_grid = {{KernelSpec::gaussian(0.1)}, {KernelSpec::gaussian(1.0)}, {KernelSpec::gaussian(0.3)}, {1e-2}};
  const Dataset d = generate_dataset(c);
  const FittedModels m = fit_all(c, d.sources);
  const fs::path dir = scratch("reload");
  save_models(m, dir);
  const FittedModels back = load_models(dir);
  const EvaluationReport a = evaluate(c, m, d.targets), b = evaluate(c, back, d.targets);
  for (const auto& me : a.methods) CHECK(b.at(me.method).per_domain == me.per_domain);
  CHECK(to_json(back.slope).dump() == to_json(m.slope).dump());
}
