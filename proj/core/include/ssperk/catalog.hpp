#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "ssperk/optimizer.hpp"
#include "ssperk/tableau.hpp"

namespace ssperk {

/// Settings for optimized pairs (ids ending in -w).
struct OptimizedPairSettings {
  int seeds = 100;
  std::int64_t budget = 200000;
  std::uint64_t seed = 0;
};

/// Resolves any method id to a tableau. Published pairs come from the catalog;
/// optimized pairs are computed once per process and cached (thread-safe).
/// SSPERK(3,3) without a suffix resolves to its optimized pair.
[[nodiscard]] EmbeddedTableau resolve_method(const MethodId& id);
[[nodiscard]] EmbeddedTableau resolve_method(std::string_view id);

void set_optimized_pair_settings(const OptimizedPairSettings& settings);

/// Loads frozen optimized weights ({"<id>": [w...], ...}) into the cache.
void load_frozen_weights(const std::string& path);

/// Optimization spec used for an optimized id.
[[nodiscard]] OptimizationSpec optimization_spec_for(const MethodId& id);

/// JSON object {id, s, p, p_tilde, A (row-major), b, b_tilde, c, ssp_claimed}.
[[nodiscard]] std::string tableau_to_json(const EmbeddedTableau& t, int indent = 2);

}  // namespace ssperk
