#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "genbench/embedstore.hpp"

namespace genbench {

enum class ConceptGroup { common, fine_grained, rare };
enum class MetricKind { accuracy, mean_per_class, roc_auc, map_11pt };

std::string_view to_string(ConceptGroup group) noexcept;
std::string_view to_string(MetricKind kind) noexcept;
ConceptGroup parse_concept_group(std::string_view name);
MetricKind parse_metric_kind(std::string_view name);

struct DatasetManifest {
  std::string name;
  ConceptGroup concept_group = ConceptGroup::common;
  std::vector<std::string> categories;
  std::string defined_template;  // exactly one "{}"
  MetricKind metric_kind = MetricKind::accuracy;
  std::size_t validation_size = 0;
};

/// Category list and template invariants. Throws ValidationError.
void check_manifest(const DatasetManifest& manifest);

DatasetManifest parse_manifest(const nlohmann::json& doc);
DatasetManifest load_manifest(const std::filesystem::path& path);
nlohmann::json to_json(const DatasetManifest& manifest);

/// Substitutes `value` for the single "{}" in `pattern`.
std::string apply_template(std::string_view pattern, std::string_view value);

struct ValidationIssue {
  enum class Kind { category_count, name_mismatch, order_mismatch, metric_shape };
  Kind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const noexcept { return issues.empty(); }
};

/// Compares a manifest against an embedding set. Problems are reported, not
/// thrown.
ValidationReport validate_manifest(const DatasetManifest& manifest, const EmbeddingSet& set);

}  // namespace genbench
