#include "funcgen/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "funcgen/error.hpp"

namespace funcgen {

namespace fs = std::filesystem;

Json to_json(const KernelSpec& k) {
  Json j;
  j["family"] = to_string(k.family);
  if (k.family != KernelFamily::constant) j["l"] = k.lengthscale;
  if (k.family == KernelFamily::periodic) j["p"] = k.period;
  return j;
}

KernelSpec kernel_from_json(const Json& j) {
  KernelSpec k;
  k.family = kernel_family_from_string(j.at("family").get<std::string>());
  if (k.family != KernelFamily::constant) k.lengthscale = j.at("l").get<double>();
  if (k.family == KernelFamily::periodic) k.period = j.at("p").get<double>();
  k.validate();
  return k;
}

Json to_json(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vector_from_json(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

Json to_json(const RkhsFunction& f) {
  Json j;
  j["kernel"] = to_json(f.kernel());
  if (f.dim() == 1) {
    j["centers"] = to_json(Vector(f.centers().col(0)));
  } else {
    Json rows = Json::array();
    for (Index i = 0; i < f.centers().rows(); ++i) rows.push_back(to_json(Vector(f.centers().row(i).transpose())));
    j["centers"] = rows;
  }
  j["weights"] = to_json(f.weights());
  return j;
}

RkhsFunction rkhs_function_from_json(const Json& j) {
  const KernelSpec k = kernel_from_json(j.at("kernel"));
  const Json& c = j.at("centers");
  const Vector w = vector_from_json(j.at("weights"));
  if (c.empty() || !c.front().is_array()) return RkhsFunction(k, Points(vector_from_json(c)), w);
  const Index d = static_cast<Index>(c.front().size());
  Points centers(static_cast<Index>(c.size()), d);
  for (std::size_t i = 0; i < c.size(); ++i) centers.row(static_cast<Index>(i)) = vector_from_json(c[i]).transpose();
  return RkhsFunction(k, std::move(centers), w);
}

Json to_json(const DomainModel& m) {
  return Json{{"fit", to_json(m.fit)}, {"kernel", to_json(m.kernel)}, {"lambda", m.lambda}, {"sample_id", m.sample_id}};
}

DomainModel domain_model_from_json(const Json& j) {
  return DomainModel{rkhs_function_from_json(j.at("fit")), kernel_from_json(j.at("kernel")), j.at("lambda").get<double>(),
                     j.at("sample_id").get<std::string>()};
}

Json to_json(const SlopeOperator& op) {
  Json j;
  j["embedding_kernel"] = to_json(op.embedding_kernel());
  Json samples = Json::array();
  for (const auto& m : op.embeddings()) samples.push_back(to_json(m.sample()));
  j["embeddings"] = samples;
  j["slope_kernel"] = to_json(op.slope_kernel());
  j["lambda"] = op.lambda();
  j["q"] = op.quadrature().size();
  Json outs = Json::array();
  for (const auto& f : op.outputs()) outs.push_back(to_json(f));
  j["outputs"] = outs;
  j["centered"] = op.centered();
  return j;
}

SlopeOperator slope_operator_from_json(const Json& j) {
  const KernelSpec ek = kernel_from_json(j.at("embedding_kernel"));
  std::vector<EmpiricalEmbedding> ms;
  for (const auto& s : j.at("embeddings")) ms.push_back(embed(vector_from_json(s), ek));
  std::vector<RkhsFunction> fs;
  for (const auto& f : j.at("outputs")) fs.push_back(rkhs_function_from_json(f));
  return SlopeOperator(std::move(ms), std::move(fs), kernel_from_json(j.at("slope_kernel")), j.at("lambda").get<double>(),
                       Quadrature(j.at("q").get<Index>()), j.value("centered", false));
}

Json to_json(const MarginalTransferModel& m) {
  Json j;
  j["embedding_kernel"] = to_json(m.embedding_kernel);
  j["distribution_kernel"] = to_json(m.distribution_kernel);
  j["input_kernel"] = to_json(m.input_kernel);
  j["lambda"] = m.lambda;
  Json samples = Json::array();
  for (const auto& e : m.embeddings) samples.push_back(to_json(e.sample()));
  j["embeddings"] = samples;
  j["points"] = to_json(m.points);
  j["domain_of"] = m.domain_of;
  j["weights"] = to_json(m.weights);
  return j;
}

MarginalTransferModel marginal_model_from_json(const Json& j) {
  MarginalTransferModel m;
  m.embedding_kernel = kernel_from_json(j.at("embedding_kernel"));
  m.distribution_kernel = kernel_from_json(j.at("distribution_kernel"));
  m.input_kernel = kernel_from_json(j.at("input_kernel"));
  m.lambda = j.at("lambda").get<double>();
  for (const auto& s : j.at("embeddings")) m.embeddings.push_back(embed(vector_from_json(s), m.embedding_kernel));
  m.points = vector_from_json(j.at("points"));
  m.domain_of = j.at("domain_of").get<std::vector<Index>>();
  m.weights = vector_from_json(j.at("weights"));
  if (m.points.size() != m.weights.size() || m.domain_of.size() != static_cast<std::size_t>(m.points.size()))
    throw ConfigError("marginal model: inconsistent point, weight and domain counts");
  return m;
}

Json to_json(const CvReport& r) {
  Json cands = Json::array();
  for (const auto& c : r.candidates) {
    Json ks = Json::array();
    for (const auto& k : c.kernels) ks.push_back(to_json(k));
    cands.push_back(Json{{"kernels", ks}, {"lambda", c.lambda}, {"kernel_rank", c.kernel_rank}});
  }
  Json folds = Json::array();
  for (Index c = 0; c < r.fold_scores.rows(); ++c) folds.push_back(to_json(Vector(r.fold_scores.row(c).transpose())));
  return Json{{"candidates", cands}, {"mean_scores", r.mean_scores}, {"fold_scores", folds}, {"chosen", r.chosen}};
}

CvReport cv_report_from_json(const Json& j) {
  CvReport r;
  for (const auto& c : j.at("candidates")) {
    CvCandidate cand;
    for (const auto& k : c.at("kernels")) cand.kernels.push_back(kernel_from_json(k));
    cand.lambda = c.at("lambda").get<double>();
    cand.kernel_rank = c.at("kernel_rank").get<std::size_t>();
    r.candidates.push_back(cand);
  }
  auto as_double = [](const Json& v) {
    return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
  };
  for (const auto& s : j.at("mean_scores")) r.mean_scores.push_back(as_double(s));
  const Json& f = j.at("fold_scores");
  const Index folds = f.empty() ? 0 : static_cast<Index>(f.front().size());
  r.fold_scores.resize(static_cast<Index>(f.size()), folds);
  for (std::size_t c = 0; c < f.size(); ++c)
    for (Index k = 0; k < folds; ++k) r.fold_scores(static_cast<Index>(c), k) = as_double(f[c][static_cast<std::size_t>(k)]);
  r.chosen = j.at("chosen").get<std::size_t>();
  return r;
}

namespace {

Json kernels_to_json(const std::vector<KernelSpec>& ks) {
  Json out = Json::array();
  for (const auto& k : ks) out.push_back(to_json(k));
  return out;
}

std::vector<KernelSpec> kernels_from_json(const Json& j) {
  std::vector<KernelSpec> out;
  for (const auto& k : j) out.push_back(kernel_from_json(k));
  return out;
}

}  // namespace

Json to_json(const SearchGrid& g) { return Json{{"kernels", kernels_to_json(g.kernels)}, {"lambdas", g.lambdas}}; }

SearchGrid search_grid_from_json(const Json& j) {
  SearchGrid g{kernels_from_json(j.at("kernels")), j.at("lambdas").get<std::vector<double>>()};
  g.validate();
  return g;
}

Json to_json(const MarginalGrid& g) {
  return Json{{"embedding_kernels", kernels_to_json(g.embedding_kernels)},
              {"distribution_kernels", kernels_to_json(g.distribution_kernels)},
              {"input_kernels", kernels_to_json(g.input_kernels)},
              {"lambdas", g.lambdas}};
}

MarginalGrid marginal_grid_from_json(const Json& j) {
  MarginalGrid g{kernels_from_json(j.at("embedding_kernels")), kernels_from_json(j.at("distribution_kernels")),
                 kernels_from_json(j.at("input_kernels")), j.at("lambdas").get<std::vector<double>>()};
  g.validate();
  return g;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const fs::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  if (!out) throw ConfigError("write failed for " + path.string());
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  if (std::getline(in, line)) t.header = split(line);
  while (std::getline(in, line))
    if (!line.empty()) t.rows.push_back(split(line));
  return t;
}

void write_columns(const fs::path& path, const std::vector<std::string>& header, const std::vector<Vector>& columns) {
  if (header.size() != columns.size()) throw InvalidArgument("write_columns: header and column counts differ");
  CsvTable t{header, {}};
  const Index rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw InvalidArgument("write_columns: ragged columns");
  for (Index r = 0; r < rows; ++r) {
    std::vector<std::string> row;
    row.reserve(columns.size());
    for (const auto& c : columns) row.push_back(format_double(c[r]));
    t.rows.push_back(std::move(row));
  }
  write_csv(path, t);
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace funcgen
