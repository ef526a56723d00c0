#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "funcgen/error.hpp"
#include "funcgen/experiment.hpp"
#include "funcgen/selfcheck.hpp"

using namespace funcgen;
namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  int workers = 0;
  std::string baselines;
  std::string eval_mode;
  std::string lambda_schedule;
  std::optional<double> c3;
  std::optional<double> c6;
};

void add_common(CLI::App* app, CommonOptions& o, bool with_seed = true) {
  app->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  if (with_seed) app->add_option("--seed", o.seed, "master seed");
  app->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--baseline", o.baselines, "comma-separated baselines: pooled, marginal or none");
  app->add_option("--eval-mode", o.eval_mode, "noiseless or noisy")->check(CLI::IsMember({"noiseless", "noisy"}));
  app->add_option("--lambda-schedule", o.lambda_schedule, "cv or theory")->check(CLI::IsMember({"cv", "theory"}));
  app->add_option("--c3", o.c3, "exponent constant of the per-domain lambda");
  app->add_option("--c6", o.c6, "exponent constant of the slope lambda");
}

ExperimentConfig resolve(const CommonOptions& o) {
  Json j = o.config.empty() ? Json::object() : read_json(o.config);
  if (o.seed) j["master_seed"] = *o.seed;
  if (o.workers > 0) j["workers"] = o.workers;
  if (!o.baselines.empty()) {
    Json list = Json::array();
    std::stringstream ss(o.baselines);
    for (std::string item; std::getline(ss, item, ',');)
      if (!item.empty()) list.push_back(item);
    j["baselines"] = list;
  }
  if (!o.eval_mode.empty()) j["eval_mode"] = o.eval_mode;
  if (!o.lambda_schedule.empty() || o.c3 || o.c6) {
    Json s = j.value("lambda_schedule", Json::object());
    if (!o.lambda_schedule.empty()) s["mode"] = o.lambda_schedule;
    if (o.c3) s["c3"] = *o.c3;
    if (o.c6) s["c6"] = *o.c6;
    j["lambda_schedule"] = s;
  }
  return config_from_json(j);
}

void print_report(const EvaluationReport& r) {
  for (const auto& me : r.methods) std::printf("%-10s %.6g\n", me.method.c_str(), me.mean);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distribution-to-function regression experiments"};
  app.require_subcommand(1);

  CommonOptions gen_o, fit_o, eval_o, rep_o, self_o;
  std::string gen_out = "data", fit_data = "data", fit_out = "models";
  std::string eval_data = "data", eval_models = "models", eval_out = "evaluation.csv";
  std::string rep_out = "reproduce";
  std::vector<std::uint64_t> rep_seeds;
  std::uint64_t self_seed = 0;

  auto* gen = app.add_subcommand("generate", "write source and target domains");
  add_common(gen, gen_o);
  gen->add_option("--out", gen_out, "output directory");

  auto* fit = app.add_subcommand("fit", "fit step-1, functional regression and baselines");
  add_common(fit, fit_o);
  fit->add_option("--data", fit_data, "dataset directory");
  fit->add_option("--out", fit_out, "model directory");

  auto* ev = app.add_subcommand("evaluate", "score all methods on the target domains");
  add_common(ev, eval_o);
  ev->add_option("--data", eval_data, "dataset directory");
  ev->add_option("--models", eval_models, "model directory");
  ev->add_option("--out", eval_out, "CSV report path");

  auto* rep = app.add_subcommand("reproduce-paper", "full pipeline per seed, summary table and figure data");
  add_common(rep, rep_o, false);
  rep->add_option("--seed", rep_seeds, "master seed (repeatable)")->required()->take_all();
  rep->add_option("--out", rep_out, "output directory");

  auto* self = app.add_subcommand("selfcheck", "Monte Carlo property checks");
  self->add_option("--seed", self_seed, "seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const Dataset d = run_generate(resolve(gen_o), gen_out);
      std::printf("wrote %zu source and %zu target domains to %s\n", d.sources.size(), d.targets.size(),
                  gen_out.c_str());
    } else if (fit->parsed()) {
      const FittedModels m = run_fit(resolve(fit_o), fit_data, fit_out);
      std::printf("slope kernel %s, lambda %.3g\n", describe(m.slope.slope_kernel()).c_str(), m.slope.lambda());
      for (const auto& [stage, s] : m.timings) std::printf("%-10s %.2fs\n", stage.c_str(), s);
    } else if (ev->parsed()) {
      print_report(run_evaluate(resolve(eval_o), eval_data, eval_models, eval_out));
    } else if (rep->parsed()) {
      const ReproduceSummary s = run_reproduce(resolve(rep_o), rep_seeds, rep_out);
      for (const auto& name : s.methods) std::printf("%-10s %.6g\n", name.c_str(), s.cross_seed_mean.at(name));
    } else if (self->parsed()) {
      bool ok = true;
      for (const auto& r : run_selfcheck(self_seed)) {
        std::printf("%s  %-36s %.6g  (%s)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.value,
                    r.requirement.c_str());
        ok = ok && r.passed;
      }
      return ok ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s (condition estimate %.3g)\n", e.what(), e.condition_estimate());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
