#pragma once

// JSON interchange for the CLI. Non-finite doubles are written as the strings "inf", "-inf"
// and "nan" so that every document re-reads to the same values.

#include <json.hpp>

#include "discospec/inverse.hpp"
#include "discospec/problem.hpp"
#include "discospec/spectral_data.hpp"

namespace discospec {

using json = nlohmann::json;

json num(double v);
double get_num(const json& j);

void to_json(json& j, const Potential& q);
void from_json(const json& j, Potential& q);
void to_json(json& j, const ProblemSpec& p);
void from_json(const json& j, ProblemSpec& p);
void to_json(json& j, const PropagatorConfig& c);
void from_json(const json& j, PropagatorConfig& c);
void to_json(json& j, const Spectrum& s);
void from_json(const json& j, Spectrum& s);
void to_json(json& j, const SpectralSubset& s);
void from_json(const json& j, SpectralSubset& s);
void to_json(json& j, const ConditionReport& r);
void from_json(const json& j, ConditionReport& r);
void to_json(json& j, const Unknowns& u);
void from_json(const json& j, Unknowns& u);
void to_json(json& j, const DataFamily& f);
void from_json(const json& j, DataFamily& f);
void to_json(json& j, const Params& p);
void from_json(const json& j, Params& p);
void to_json(json& j, const InverseSetup& s);
void from_json(const json& j, InverseSetup& s);
void to_json(json& j, const InverseResult& r);
void from_json(const json& j, InverseResult& r);
void to_json(json& j, const ExperimentConfig& c);
void from_json(const json& j, ExperimentConfig& c);
void to_json(json& j, const ExperimentRow& r);
void from_json(const json& j, ExperimentRow& r);
void to_json(json& j, const ExperimentReport& r);
void from_json(const json& j, ExperimentReport& r);

/// Parse a file; syntax errors and missing keys surface as ContractError.
json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace discospec
