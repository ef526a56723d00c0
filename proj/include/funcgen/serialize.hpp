#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "funcgen/baselines.hpp"
#include "funcgen/funcreg.hpp"
#include "funcgen/modelselect.hpp"

namespace funcgen {

using Json = nlohmann::json;

Json to_json(const KernelSpec& k);
KernelSpec kernel_from_json(const Json& j);

Json to_json(const RkhsFunction& f);
RkhsFunction rkhs_function_from_json(const Json& j);

Json to_json(const DomainModel& m);
DomainModel domain_model_from_json(const Json& j);

/// The coupling matrix and its factorization are rebuilt on load.
Json to_json(const SlopeOperator& op);
SlopeOperator slope_operator_from_json(const Json& j);

Json to_json(const MarginalTransferModel& m);
MarginalTransferModel marginal_model_from_json(const Json& j);

Json to_json(const CvReport& r);
CvReport cv_report_from_json(const Json& j);

Json to_json(const SearchGrid& g);
SearchGrid search_grid_from_json(const Json& j);

Json to_json(const MarginalGrid& g);
MarginalGrid marginal_grid_from_json(const Json& j);

Json to_json(const Vector& v);
Vector vector_from_json(const Json& j);

/// %.17g.
std::string format_double(double v);

/// Plain comma-separated table with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

/// Columns of doubles, first row is the header.
void write_columns(const std::filesystem::path& path, const std::vector<std::string>& header,
                   const std::vector<Vector>& columns);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

}  // namespace funcgen
