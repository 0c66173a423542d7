#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "hdx/dpt.hpp"
#include "hdx/lift.hpp"
#include "hdx/partite.hpp"
#include "hdx/spectral.hpp"
#include "hdx/ug.hpp"

namespace hdx {

using json = nlohmann::json;

// Value text: subspaces as their RREF encoding, opaque labels verbatim, plain ints otherwise.
std::string value_text(const PartiteDistribution& mu, Value v);

json to_json(const PartiteDistribution& mu);
json graph_summary(const WeightedGraph& g);
json to_json(const UGInstance& inst);
json to_json(const Assignment& a);
json to_json(const SpectralReport& r);
json to_json(const AuditResult& r);
json to_json(const EventStats& e);
json to_json(const LevelReport& r);
json to_json(const LiftReport& r);
// Face list plus hex-packed bits per face id.
json to_json(const DPTable& t);
std::string hex_bits(uint64_t bits, int k);
uint64_t parse_hex_bits(const std::string& s);

// Experiment configuration: a nested JSON document merged over defaults.
json default_config();
// Rejects unknown keys and type mismatches against the defaults; throws std::invalid_argument.
json merge_config(const json& user);
json load_config(const std::string& path);
// FNV-1a 64 of the canonical dump without seed/out/jobs, as 16 hex digits.
std::string config_hash(const json& config);

std::string fmt_double(double x);
std::string csv_line(const std::vector<std::string>& fields);

}  // namespace hdx
