#pragma once

#include <optional>
#include <string>

#include "lapsekit/linear.hpp"
#include "lapsekit/trees.hpp"

namespace lapsekit {

enum class Family { logit, elanet, cart, rf, boost };

std::string family_name(Family family);
Family family_from_name(const std::string& name);

/// A persisted model: exactly one member is populated, per family. The schema
/// digest pins the data layout the model was trained on; eval refuses
/// mismatching inputs.
struct ModelArtifact {
    Family family = Family::rf;
    std::string schema_digest;
    std::optional<LinearFit> linear;
    std::optional<Tree> cart;
    std::optional<CartParams> cart_params;
    std::optional<Forest> forest;
    std::optional<BoostModel> boost;
};

/// Versioned line-oriented text format: header (family, params, schema hash),
/// then one node record per line for tree models.
void save_model(const ModelArtifact& artifact, const std::string& path);
ModelArtifact load_model(const std::string& path);

} // namespace lapsekit
