#pragma once

// Deterministic prompt compiler. Turns (manifest, category, strategy, count,
// seed) into generation prompts for each prompt strategy:
//   st  simple template       "a photo of {}"
//   dt  defined template      the manifest's dataset-specific template
//   ce  category enhancement  externally supplied sentences per category
//   rd  restrictive suffix    appended to the base prompt
//   np  negative prompts      sibling categories plus quality constraints
// rd and np are modifiers on an st/dt/ce base; alone they modify dt.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "genbench/manifest.hpp"

namespace genbench {

inline constexpr std::string_view kSimpleTemplate = "a photo of {}";
inline constexpr std::string_view kRestrictiveSuffix =
    ", ((sharp focus)), ((highly detailed)), ((hires))";
inline constexpr std::string_view kQualityNegatives = "bad shape, misfigured";
inline constexpr std::size_t kDefaultNegativeSiblings = 5;

enum class PromptBase { simple_template, defined_template, category_enhancement };

struct PromptStrategy {
  PromptBase base = PromptBase::simple_template;
  bool restrictive_description = false;
  bool negative_prompts = false;
  bool raw_name = false;  // st emits the bare category name
  std::size_t max_negative_siblings = kDefaultNegativeSiblings;

  /// Accepts "st", "dt", "ce", "rd", "np" and '+'-joined combinations such as
  /// "dt+np+rd". At most one base may be named.
  static PromptStrategy parse(std::string_view spec);
  /// Canonical label, e.g. "DT+NP+RD".
  std::string label() const;
};

struct PromptRecord {
  std::string positive;
  std::string negative;
  std::string category;
  /// Index of the producing template in the pool: base prompts first, then
  /// augmentation variants.
  std::int64_t seed_path = 0;

  bool operator==(const PromptRecord&) const = default;
};

using CeSentences = std::map<std::string, std::vector<std::string>, std::less<>>;

/// Neutral photo-style templates used to pad a prompt list up to the
/// requested count.
std::span<const std::string_view> augmentation_variants() noexcept;

std::vector<PromptRecord> render_prompts(const DatasetManifest& manifest, std::string_view category,
                                         const PromptStrategy& strategy, std::size_t n,
                                         std::uint64_t seed, const CeSentences* ce = nullptr);

/// Up to `max_siblings` other categories of the dataset (seeded sample when
/// there are more), followed by the global quality constraints.
std::string negative_prompt_for(const DatasetManifest& manifest, std::string_view category,
                                std::size_t max_siblings, std::uint64_t seed);

/// Line format: category<TAB>sentence. Blank lines are ignored.
CeSentences parse_ce_sentences(std::istream& in);
CeSentences load_ce_sentences(const std::filesystem::path& path);

/// One JSON object per line: {"category","negative","positive","seed_path"}.
std::string to_json_line(const PromptRecord& record);

}  // namespace genbench
