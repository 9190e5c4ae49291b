#pragma once

// Name-based model construction from JSON parameter objects. Unknown keys
// and ill-typed values are ConfigErrors; omitted keys take the defaults
// listed by model_summaries().

#include <string>
#include <vector>

#include "json.hpp"

#include "gcs/models.hpp"

namespace gcs {

struct ModelSummary {
  std::string name;
  std::string description;
  /// Parameter keys with their default values.
  nlohmann::json defaults;
};

std::vector<ModelSummary> model_summaries();
std::vector<std::string> model_names();

/// Throws ConfigError for unknown names or parameters that fail validation.
SystemModel make_model(const std::string& name, const nlohmann::json& params);

/// A number is a constant input; objects are {"constant": v},
/// {"offset": o, "amplitude": a, "period": T} or {"table": [[t, v], ...], "period": T}.
InputSignal parse_input(const nlohmann::json& j);
/// "linear", "quadratic", "saturating" or {"table": [[t, a], ...]}.
ClassK parse_class_k(const nlohmann::json& j);

ProteinSynthesisParams parse_protein_params(const nlohmann::json& params);
/// `rfm` fixes every p_i to 1 and rejects a "ps" key.
PhosphorelayParams parse_phosphorelay_params(const nlohmann::json& params, bool rfm);
IrreversibleBindingParams parse_irreversible_params(const nlohmann::json& params);

}  // namespace gcs
