#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "hdx/complex.hpp"
#include "hdx/io.hpp"
#include "hdx/partite.hpp"

namespace hdx {

// Whatever the building section describes: a distribution, a complex, a graph, or several.
struct Built {
  std::string family;
  std::string params;
  std::optional<PartiteDistribution> mu;
  std::shared_ptr<const SimplicialComplex> complex;
  std::optional<WeightedGraph> graph;
};

Built build_from_config(const json& building, Rng& rng);

// File name -> contents.
using Outputs = std::map<std::string, std::string>;

// `config` is the merged configuration (seed/out/jobs already overridden).
Outputs cmd_build(const json& config);
Outputs cmd_spectra(const json& config);
Outputs cmd_ug(const json& config);
Outputs cmd_dpt(const json& config);
Outputs cmd_lift(const json& config);

void write_outputs(const std::string& dir, const Outputs& outputs);

// Runs task(i) for i < n on `jobs` workers; results come back in index order. The first
// exception in index order is rethrown.
std::vector<std::string> run_ordered(size_t n, int jobs, const std::function<std::string(size_t)>& task);

}  // namespace hdx
