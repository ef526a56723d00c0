#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "funcgen/baselines.hpp"
#include "funcgen/funcreg.hpp"
#include "funcgen/modelselect.hpp"
#include "funcgen/serialize.hpp"
#include "funcgen/synthdata.hpp"

namespace funcgen {

struct LambdaSchedule {
  enum class Mode { cv, theory };
  Mode mode = Mode::cv;
  double c3 = 1.0;
  double c6 = 1.0;
};

enum class EvalMode { noiseless, noisy };
enum class EvalPoints { sample, grid };

struct ExperimentConfig {
  Index N = 100;
  Index n = 100;
  Index n_test_domains = 20;
  Index q = 1000;
  std::uint64_t master_seed = 0;
  double noise_var = 0.02;
  KernelSpec embedding_kernel = KernelSpec::gaussian(0.05);
  SearchGrid step1_grid;
  SearchGrid step2_grid;
  SearchGrid pooled_grid;
  MarginalGrid marginal_grid;
  LambdaSchedule schedule;
  EvalMode eval_mode = EvalMode::noiseless;
  EvalPoints eval_points = EvalPoints::sample;
  bool pooled = true;
  bool marginal = false;
  int folds = 5;
  SlopeScoring slope_scoring = SlopeScoring::sample;
  bool center_outputs = false;
  int workers = 1;
  Index max_marginal_points = kDefaultMarginalPointCap;

  void validate() const;
  Environment environment() const;
};

/// The reference experiment: N = n = 100, 20 targets, q = 1000 and its CV grids.
ExperimentConfig default_config();

Json to_json(const ExperimentConfig& c);
/// Fields present in j override those of base.
ExperimentConfig config_from_json(const Json& j, ExperimentConfig base = default_config());

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index);

struct Dataset {
  std::vector<Domain> sources;
  std::vector<Domain> targets;
};

Dataset generate_dataset(const ExperimentConfig& c);

/// Writes <out>/source/{domain_<i>.csv, meta.json} and <out>/target/{domain_<i>.csv, meta.json}.
Dataset run_generate(const ExperimentConfig& c, const std::filesystem::path& out_dir);
Dataset load_dataset(const std::filesystem::path& data_dir);

struct FittedModels {
  std::vector<DomainModel> step1;
  std::vector<CvReport> step1_reports;
  SlopeOperator slope;
  CvReport slope_report;
  std::optional<DomainModel> pooled;
  std::optional<CvReport> pooled_report;
  std::optional<MarginalTransferModel> marginal;
  std::optional<CvReport> marginal_report;
  std::map<std::string, double> timings;
};

/// Step-1 fit for one labeled sample under the configured schedule (CV or theory lambda).
DomainModel fit_domain(const ExperimentConfig& c, const Vector& xs, const Vector& ys, std::uint64_t seed,
                       const std::string& id, CvReport* report = nullptr);

FittedModels fit_all(const ExperimentConfig& c, const std::vector<Domain>& sources);
void save_models(const FittedModels& m, const std::filesystem::path& out_dir);
FittedModels load_models(const std::filesystem::path& models_dir);

FittedModels run_fit(const ExperimentConfig& c, const std::filesystem::path& data_dir,
                     const std::filesystem::path& out_dir);

struct MethodErrors {
  std::string method;
  Vector per_domain;
  double mean = 0.0;
};

struct EvaluationReport {
  std::vector<MethodErrors> methods;
  Json config;
  std::map<std::string, double> timings;

  const MethodErrors& at(const std::string& method) const;
};

/// Mean squared error at each target's evaluation points for oracle (target-labeled
/// KRR), parabola, the enabled baselines and functional regression.
EvaluationReport evaluate(const ExperimentConfig& c, const FittedModels& m, const std::vector<Domain>& targets);

/// Columns: method, domain_<j>..., mean.
void write_evaluation_csv(const EvaluationReport& r, const std::filesystem::path& path);

EvaluationReport run_evaluate(const ExperimentConfig& c, const std::filesystem::path& data_dir,
                              const std::filesystem::path& models_dir, const std::filesystem::path& out_csv);

struct ReproduceSummary {
  std::vector<std::uint64_t> seeds;
  std::vector<EvaluationReport> reports;
  /// method -> cross-seed mean of the per-seed means.
  std::map<std::string, double> cross_seed_mean;
  std::vector<std::string> methods;
};

/// Full pipeline per seed under <out>/seed_<s>/, summary.csv and figure CSVs.
ReproduceSummary run_reproduce(const ExperimentConfig& base, const std::vector<std::uint64_t>& seeds,
                               const std::filesystem::path& out_dir);

/// Plot-ready CSVs for the four panels; x is a 1000-point midpoint grid.
void write_figure_data(const ExperimentConfig& c, const Dataset& data, const FittedModels& m,
                       const std::filesystem::path& out_dir);

}  // namespace funcgen
