#include "genbench/promptgen.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <random>

#include "genbench/rng.hpp"

namespace genbench {

namespace {

using json = nlohmann::json;

// Keep in step with fixtures/prompt_variants.txt.
constexpr std::array<std::string_view, 8> kVariants = {
    "a close up photo of {}", "a bright photo of {}", "a cropped photo of {}",
    "a good photo of {}",     "a clean photo of {}",  "a centered photo of {}",
    "a photo of the large {}", "a photo of the small {}",
};

std::size_t category_index(const DatasetManifest& manifest, std::string_view category) {
  const auto it = std::ranges::find(manifest.categories, category);
  if (it == manifest.categories.end()) {
    throw ValidationError("category '" + std::string(category) + "' is not listed in manifest '" +
                          manifest.name + "'");
  }
  return static_cast<std::size_t>(it - manifest.categories.begin());
}

std::string lower(std::string_view text) {
  std::string out(text);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t");
  return std::string(text.substr(first, last - first + 1));
}

}  // namespace

PromptStrategy PromptStrategy::parse(std::string_view spec) {
  PromptStrategy strategy;
  bool have_base = false;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto end = spec.find('+', start);
    if (end == std::string_view::npos) end = spec.size();
    const auto token = lower(trim(spec.substr(start, end - start)));
    auto set_base = [&](PromptBase base) {
      if (have_base) throw ValidationError("prompt strategy '" + std::string(spec) + "' names two bases");
      strategy.base = base;
      have_base = true;
    };
    if (token == "st") {
      set_base(PromptBase::simple_template);
    } else if (token == "dt") {
      set_base(PromptBase::defined_template);
    } else if (token == "ce") {
      set_base(PromptBase::category_enhancement);
    } else if (token == "rd") {
      strategy.restrictive_description = true;
    } else if (token == "np") {
      strategy.negative_prompts = true;
    } else {
      throw ValidationError("unknown prompt strategy component '" + token + "' in '" +
                            std::string(spec) + "'");
    }
    start = end + 1;
  }
  // a bare modifier rides on the defined template
  if (!have_base) strategy.base = PromptBase::defined_template;
  return strategy;
}

std::string PromptStrategy::label() const {
  std::string out;
  switch (base) {
    case PromptBase::simple_template: out = "ST"; break;
    case PromptBase::defined_template: out = "DT"; break;
    case PromptBase::category_enhancement: out = "CE"; break;
  }
  if (negative_prompts) out += "+NP";
  if (restrictive_description) out += "+RD";
  return out;
}

std::span<const std::string_view> augmentation_variants() noexcept { return kVariants; }

std::string negative_prompt_for(const DatasetManifest& manifest, std::string_view category,
                                std::size_t max_siblings, std::uint64_t seed) {
  const auto self = category_index(manifest, category);
  std::vector<std::size_t> siblings;
  for (std::size_t i = 0; i < manifest.categories.size(); ++i) {
    if (i != self) siblings.push_back(i);
  }
  if (siblings.size() > max_siblings) {
    // partial Fisher-Yates, then back to manifest order
    std::mt19937_64 engine(seed);
    for (std::size_t i = 0; i < max_siblings; ++i) {
      const auto j = i + uniform_index(engine, siblings.size() - i);
      std::swap(siblings[i], siblings[j]);
    }
    siblings.resize(max_siblings);
    std::ranges::sort(siblings);
  }
  std::string out;
  for (auto index : siblings) {
    out += manifest.categories[index];
    out += ", ";
  }
  out += kQualityNegatives;
  return out;
}

std::vector<PromptRecord> render_prompts(const DatasetManifest& manifest, std::string_view category,
                                         const PromptStrategy& strategy, std::size_t n,
                                         std::uint64_t seed, const CeSentences* ce) {
  if (n == 0) throw ValidationError("prompt count must be positive");
  category_index(manifest, category);

  std::vector<std::string> pool;
  std::size_t base_count = 0;
  switch (strategy.base) {
    case PromptBase::simple_template:
      pool.push_back(strategy.raw_name ? std::string(category) : apply_template(kSimpleTemplate, category));
      base_count = 1;
      break;
    case PromptBase::defined_template:
      pool.push_back(apply_template(manifest.defined_template, category));
      base_count = 1;
      break;
    case PromptBase::category_enhancement: {
      if (ce == nullptr) {
        throw MissingResourceError("category enhancement needs a sentence file for '" + manifest.name + "'");
      }
      const auto it = ce->find(category);
      if (it == ce->end() || it->second.empty()) {
        throw MissingResourceError("sentence file has no sentences for category '" +
                                   std::string(category) + "'");
      }
      pool = it->second;
      base_count = pool.size();
      break;
    }
  }
  // CE pads from its own sentences; the photo variants would drop the expansion
  if (strategy.base != PromptBase::category_enhancement) {
    for (auto variant : kVariants) pool.push_back(apply_template(variant, category));
  }

  std::mt19937_64 engine(splitmix64(seed ^ fnv1a(category)));
  std::vector<PromptRecord> records;
  records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t path = i;
    if (i >= base_count) {
      path = strategy.base == PromptBase::category_enhancement
                 ? uniform_index(engine, pool.size())
                 : base_count + uniform_index(engine, pool.size() - base_count);
    }
    PromptRecord record;
    record.category = std::string(category);
    record.seed_path = static_cast<std::int64_t>(path);
    record.positive = pool[path];
    if (strategy.restrictive_description) record.positive += kRestrictiveSuffix;
    if (strategy.negative_prompts) {
      record.negative = negative_prompt_for(manifest, category, strategy.max_negative_siblings,
                                            splitmix64(seed + i));
    }
    records.push_back(std::move(record));
  }
  return records;
}

CeSentences parse_ce_sentences(std::istream& in) {
  CeSentences out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("expected category<TAB>sentence", number);
    auto category = line.substr(0, tab);
    auto sentence = line.substr(tab + 1);
    if (category.empty()) throw ParseError("empty category", number);
    if (sentence.empty()) throw ParseError("empty sentence", number);
    out[std::move(category)].push_back(std::move(sentence));
  }
  return out;
}

CeSentences load_ce_sentences(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingResourceError("cannot open sentence file '" + path.string() + "'");
  return parse_ce_sentences(in);
}

std::string to_json_line(const PromptRecord& record) {
  const json doc{{"category", record.category},
                 {"negative", record.negative},
                 {"positive", record.positive},
                 {"seed_path", record.seed_path}};
  return doc.dump();
}

}  // namespace genbench
