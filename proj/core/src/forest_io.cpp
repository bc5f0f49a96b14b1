#include <json.hpp>

#include "sarf/errors.hpp"
#include "sarf/forest.hpp"

namespace sarf {
namespace {

using nlohmann::json;

json params_to_json(const HyperParams& p) {
  json j;
  j["n_trees"] = p.n_trees;
  j["max_depth"] = p.max_depth ? json(*p.max_depth) : json(nullptr);
  j["min_samples_split"] = p.min_samples_split;
  j["min_samples_leaf"] = p.min_samples_leaf;
  if (p.max_features.rule == MaxFeatures::Rule::kFraction) {
    j["max_features"] = p.max_features.fraction;
  } else {
    j["max_features"] = p.max_features.to_string();
  }
  j["seed"] = p.seed;
  return j;
}

HyperParams params_from_json(const json& j) {
  HyperParams p;
  p.n_trees = j.at("n_trees").get<int>();
  p.max_depth = j.at("max_depth").is_null() ? std::nullopt : std::optional<int>(j.at("max_depth").get<int>());
  p.min_samples_split = j.at("min_samples_split").get<int>();
  p.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  const auto& mf = j.at("max_features");
  p.max_features = mf.is_string() ? MaxFeatures::parse(mf.get<std::string>()) : MaxFeatures::of(mf.get<double>());
  p.seed = j.at("seed").get<std::uint64_t>();
  p.validate();
  return p;
}

json node_to_json(const Tree& tree, std::int32_t id) {
  const auto& node = tree.nodes[static_cast<std::size_t>(id)];
  if (node.is_leaf()) return json{{"c", {node.counts[0], node.counts[1]}}};
  return json{{"f", node.feature},
              {"t", node.threshold},
              {"l", node_to_json(tree, node.left)},
              {"r", node_to_json(tree, node.right)}};
}

// Appends nodes in pre-order; internal counts are the sums of their children.
std::int32_t node_from_json(const json& j, Tree& tree, std::size_t n_features) {
  const auto id = static_cast<std::int32_t>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.contains("c")) {
    const auto& c = j.at("c");
    tree.nodes[static_cast<std::size_t>(id)].counts = {c.at(0).get<std::uint32_t>(), c.at(1).get<std::uint32_t>()};
    return id;
  }
  const int f = j.at("f").get<int>();
  if (f < 0 || static_cast<std::size_t>(f) >= n_features) throw DataError("model node feature index out of range");
  const double t = j.at("t").get<double>();
  const auto l = node_from_json(j.at("l"), tree, n_features);
  const auto r = node_from_json(j.at("r"), tree, n_features);
  auto& node = tree.nodes[static_cast<std::size_t>(id)];
  node.feature = f;
  node.threshold = t;
  node.left = l;
  node.right = r;
  const auto& ln = tree.nodes[static_cast<std::size_t>(l)];
  const auto& rn = tree.nodes[static_cast<std::size_t>(r)];
  node.counts = {ln.counts[0] + rn.counts[0], ln.counts[1] + rn.counts[1]};
  return id;
}

}  // namespace

std::string hyperparams_to_json(const HyperParams& params) { return params_to_json(params).dump(2); }

HyperParams hyperparams_from_json(std::string_view text) {
  try {
    return params_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid hyperparameter JSON: ") + e.what());
  }
}

std::string model_to_json(const ForestModel& model) {
  json j;
  j["format"] = "sarf-forest-v1";
  j["hyperparams"] = params_to_json(model.params);
  j["seed"] = model.params.seed;
  j["feature_names"] = model.feature_names;
  j["priors"] = model.priors;
  j["importances"] = model.importances;
  json trees = json::array();
  for (const auto& tree : model.trees) trees.push_back(node_to_json(tree, 0));
  j["trees"] = std::move(trees);
  return j.dump();
}

ForestModel model_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != "sarf-forest-v1") throw DataError("not a sarf forest model document");
    ForestModel model;
    model.params = params_from_json(j.at("hyperparams"));
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.priors = j.at("priors").get<std::array<double, 2>>();
    model.importances = j.at("importances").get<std::vector<double>>();
    for (const auto& t : j.at("trees")) {
      Tree tree;
      node_from_json(t, tree, model.feature_names.size());
      model.trees.push_back(std::move(tree));
    }
    if (model.trees.size() != static_cast<std::size_t>(model.params.n_trees)) {
      throw DataError("model tree count does not match n_trees");
    }
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid model JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("invalid model JSON: ") + e.what());
  }
}

}  // namespace sarf
