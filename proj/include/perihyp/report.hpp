#pragma once

#include <json.hpp>

#include <string>

#include "perihyp/certify.hpp"
#include "perihyp/ibvp.hpp"
#include "perihyp/model.hpp"
#include "perihyp/periodic.hpp"

namespace perihyp {

using Json = nlohmann::ordered_json;

/// Serializes with every floating-point value at 17 significant digits and
/// non-finite values as null, so identical inputs give identical bytes.
std::string dump_json(const Json& j, int indent = 2);
void write_json(const std::string& path, const Json& j);

Json to_json(const ValidationReport& r);
Json to_json(const GNorm& g);
Json to_json(const LyapunovCondition& c);
Json to_json(const CertificationReport& r);
/// Solve summary without the solution values.
Json to_json(const SolveReport& r);
Json to_json(const DecayEstimate& d);
Json to_json(const MmsResult& r);
Json to_json(const PerturbResult& r);

/// Columns x, t, u1..un; t outer, x inner.
void write_solution_csv(const std::string& path, const GridFunction& u);
/// Columns t, l2_norm, sup_norm.
void write_norms_csv(const std::string& path, const TrajectoryRecord& rec);
/// Columns iteration, increment.
void write_increments_csv(const std::string& path, const std::vector<double>& increments);
void write_mms_csv(const std::string& path, const MmsResult& r);
void write_perturb_csv(const std::string& path, const PerturbResult& r);

/// %.17g, or "nan"/"inf"/"-inf".
std::string format_number(double v);

}  // namespace perihyp
