#include "ssperk/catalog.hpp"

#include <fstream>
#include <map>
#include <mutex>

#include "json.hpp"
#include "ssperk/analysis.hpp"
#include "ssperk/error.hpp"

namespace ssperk {

namespace {

struct Cache {
  std::mutex mutex;
  std::map<std::string, Eigen::VectorXd> weights;
  OptimizedPairSettings settings;
};

Cache& cache() {
  static Cache c;
  return c;
}

MethodId canonical_optimized(MethodId id) {
  id.pair = PairKind::optimized;
  id.index = 0;
  return id;
}

EmbeddedTableau with_weights(const MethodId& id, const Eigen::VectorXd& w) {
  EmbeddedTableau t = base_method(id);
  t.b_hat = w;
  t.embedded_order = t.order - 1;
  t.id = to_string(id);
  return t;
}

}  // namespace

void set_optimized_pair_settings(const OptimizedPairSettings& settings) {
  auto& c = cache();
  const std::lock_guard lock(c.mutex);
  c.settings = settings;
}

OptimizationSpec optimization_spec_for(const MethodId& id) {
  OptimizationSpec spec;
  spec.tableau = base_method(id);
  spec.target_order = spec.tableau.order - 1;
  auto& c = cache();
  const std::lock_guard lock(c.mutex);
  spec.seeds = c.settings.seeds;
  spec.budget = c.settings.budget;
  spec.seed = c.settings.seed;
  return spec;
}

EmbeddedTableau resolve_method(const MethodId& raw) {
  MethodId id = raw;
  if (id.family == Family::ssp3 && id.stages == 3) id = canonical_optimized(id);
  if (id.pair != PairKind::optimized) return catalog_tableau(id);
  if (id.family == Family::literature)
    throw Error(ErrorCode::unsupported_variant, "literature pairs have fixed weights");

  const std::string key = to_string(id);
  auto& c = cache();
  {
    const std::lock_guard lock(c.mutex);
    if (auto it = c.weights.find(key); it != c.weights.end()) return with_weights(id, it->second);
  }
  const auto report = optimize_embedded(optimization_spec_for(id));
  if (!report.found)
    throw Error(ErrorCode::unsupported_variant, key + ": " + report.message);
  const std::lock_guard lock(c.mutex);
  const auto [it, inserted] = c.weights.emplace(key, report.w);
  return with_weights(id, it->second);
}

EmbeddedTableau resolve_method(std::string_view id) { return resolve_method(parse_method_id(id)); }

void load_frozen_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, path + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::parse_error, path + ": expected an object");
  std::map<std::string, Eigen::VectorXd> loaded;
  for (const auto& [key, value] : j.items()) {
    MethodId id = parse_method_id(key);
    if (id.family == Family::ssp3 && id.stages == 3) id = canonical_optimized(id);
    if (id.pair != PairKind::optimized)
      throw Error(ErrorCode::parse_error, key + " is not an optimized pair");
    const auto v = value.get<std::vector<double>>();
    const auto base = base_method(id);
    if (static_cast<int>(v.size()) != base.stages)
      throw Error(ErrorCode::dimension_mismatch, key + ": wrong number of weights");
    loaded[to_string(id)] = Eigen::Map<const Eigen::VectorXd>(v.data(), base.stages);
  }
  auto& c = cache();
  const std::lock_guard lock(c.mutex);
  for (auto& [k, w] : loaded) c.weights[k] = std::move(w);
}

std::string tableau_to_json(const EmbeddedTableau& t, int indent) {
  auto vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  nlohmann::json j;
  j["id"] = t.id;
  j["s"] = t.stages;
  j["p"] = t.order;
  j["p_tilde"] = t.embedded_order;
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < t.A.rows(); ++i) rows.push_back(vec(t.A.row(i).transpose()));
  j["A"] = rows;
  j["b"] = vec(t.b);
  j["b_tilde"] = t.b_hat ? nlohmann::json(vec(*t.b_hat)) : nlohmann::json(nullptr);
  j["c"] = vec(t.c);
  j["ssp_claimed"] = t.ssp_claimed ? nlohmann::json(*t.ssp_claimed) : nlohmann::json(nullptr);
  return j.dump(indent);
}

}  // namespace ssperk
