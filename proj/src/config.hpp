#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fields.hpp"
#include "killing.hpp"
#include "psi.hpp"
#include "verifier.hpp"

namespace abf {

using Json = nlohmann::json;

struct KillingSection {
  std::vector<std::string> xi_exprs;
  SymmetryParams params;
  bool has_params = false;
  double residual_tol = 1e-6;
};

// Parsed, validated run configuration. The JSON echo round-trips: parsing the
// emitted form yields a semantically identical config.
struct RunConfig {
  int dim = 4;
  MetricField metric;
  OneFormField oneform;
  PsiSpec psi;

  Json metric_json, oneform_json, psi_json, points_json;

  std::vector<Vec> point_list;  // explicit points, if given
  Vec box_min, box_max;         // random-point spec, if given
  int box_count = 0;
  bool has_box = false;

  ConeSampleConfig sampling;
  std::optional<Vec> reference_timelike;
  std::optional<KillingSection> killing;
  std::string output = "json";
  int verbosity = 0;

  RunConfig();

  // Points for a run: the explicit list, or box_count draws from the box
  // (seeded substream of `seed`).
  std::vector<Vec> resolve_points(uint64_t seed) const;

  Json to_json() const;
};

RunConfig parse_config(const Json& j);
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

}  // namespace abf
