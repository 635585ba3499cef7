#include "genbench/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace genbench {

namespace {

using json = nlohmann::json;

std::size_t count_placeholders(std::string_view pattern) {
  std::size_t count = 0;
  for (auto pos = pattern.find("{}"); pos != std::string_view::npos;
       pos = pattern.find("{}", pos + 2)) {
    ++count;
  }
  return count;
}

template <typename T>
T required(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw ValidationError(std::string("manifest is missing '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("manifest field '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string_view to_string(ConceptGroup group) noexcept {
  switch (group) {
    case ConceptGroup::common: return "common";
    case ConceptGroup::fine_grained: return "fine_grained";
    case ConceptGroup::rare: return "rare";
  }
  return "unknown";
}

std::string_view to_string(MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::accuracy: return "accuracy";
    case MetricKind::mean_per_class: return "mean_per_class";
    case MetricKind::roc_auc: return "roc_auc";
    case MetricKind::map_11pt: return "map_11pt";
  }
  return "unknown";
}

ConceptGroup parse_concept_group(std::string_view name) {
  for (auto group : {ConceptGroup::common, ConceptGroup::fine_grained, ConceptGroup::rare}) {
    if (to_string(group) == name) return group;
  }
  throw ValidationError("unknown concept group '" + std::string(name) + "'");
}

MetricKind parse_metric_kind(std::string_view name) {
  for (auto kind : {MetricKind::accuracy, MetricKind::mean_per_class, MetricKind::roc_auc,
                    MetricKind::map_11pt}) {
    if (to_string(kind) == name) return kind;
  }
  throw ValidationError("unknown metric kind '" + std::string(name) + "'");
}

void check_manifest(const DatasetManifest& manifest) {
  if (manifest.categories.empty()) {
    throw ValidationError("manifest '" + manifest.name + "' lists no categories");
  }
  std::set<std::string_view> seen;
  for (const auto& category : manifest.categories) {
    if (category.empty()) throw ValidationError("manifest '" + manifest.name + "' has an empty category");
    if (!seen.insert(category).second) {
      throw ValidationError("manifest '" + manifest.name + "' repeats category '" + category + "'");
    }
  }
  if (count_placeholders(manifest.defined_template) != 1) {
    throw ValidationError("defined_template of '" + manifest.name +
                          "' must contain exactly one {} placeholder");
  }
}

DatasetManifest parse_manifest(const json& doc) {
  if (!doc.is_object()) throw ValidationError("manifest must be a JSON object");
  DatasetManifest manifest;
  manifest.name = required<std::string>(doc, "name");
  manifest.concept_group = parse_concept_group(required<std::string>(doc, "concept_group"));
  manifest.categories = required<std::vector<std::string>>(doc, "categories");
  manifest.defined_template = required<std::string>(doc, "defined_template");
  manifest.metric_kind = parse_metric_kind(required<std::string>(doc, "metric_kind"));
  manifest.validation_size = required<std::size_t>(doc, "validation_size");
  check_manifest(manifest);
  return manifest;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  const json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ValidationError("manifest '" + path.string() + "' is not valid JSON");
  return parse_manifest(doc);
}

json to_json(const DatasetManifest& manifest) {
  return json{{"name", manifest.name},
              {"concept_group", to_string(manifest.concept_group)},
              {"categories", manifest.categories},
              {"defined_template", manifest.defined_template},
              {"metric_kind", to_string(manifest.metric_kind)},
              {"validation_size", manifest.validation_size}};
}

std::string apply_template(std::string_view pattern, std::string_view value) {
  const auto pos = pattern.find("{}");
  if (pos == std::string_view::npos) throw ValidationError("template has no {} placeholder");
  std::string out;
  out.reserve(pattern.size() + value.size());
  out.append(pattern.substr(0, pos));
  out.append(value);
  out.append(pattern.substr(pos + 2));
  return out;
}

ValidationReport validate_manifest(const DatasetManifest& manifest, const EmbeddingSet& set) {
  using Kind = ValidationIssue::Kind;
  ValidationReport report;
  const auto& expected = manifest.categories;
  const auto& actual = set.class_names;

  if (expected.size() != actual.size()) {
    report.issues.push_back({Kind::category_count,
                             "manifest lists " + std::to_string(expected.size()) +
                                 " categories, embedding set has " + std::to_string(actual.size())});
  }

  const std::set<std::string> expected_set(expected.begin(), expected.end());
  const std::set<std::string> actual_set(actual.begin(), actual.end());
  if (expected_set == actual_set) {
    if (expected != actual) {
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (expected[i] != actual[i]) {
          report.issues.push_back({Kind::order_mismatch,
                                   "class order differs: index " + std::to_string(i) +
                                       " is '" + actual[i] + "' in the embedding set, '" +
                                       expected[i] + "' in the manifest"});
          break;
        }
      }
    }
  } else {
    for (const auto& name : expected) {
      if (!actual_set.contains(name)) {
        report.issues.push_back({Kind::name_mismatch, "category '" + name + "' missing from embedding set"});
      }
    }
    for (const auto& name : actual) {
      if (!expected_set.contains(name)) {
        report.issues.push_back({Kind::name_mismatch, "class '" + name + "' not listed in manifest"});
      }
    }
  }

  if (manifest.metric_kind == MetricKind::roc_auc) {
    if (expected.size() != 2) {
      report.issues.push_back({Kind::metric_shape,
                               "roc_auc needs exactly 2 categories, manifest lists " +
                                   std::to_string(expected.size())});
    } else if (actual.size() != 2) {
      report.issues.push_back({Kind::metric_shape,
                               "roc_auc needs exactly 2 classes, embedding set has " +
                                   std::to_string(actual.size())});
    }
  }
  return report;
}

}  // namespace genbench
