#pragma once

#include <map>
#include <string>
#include <vector>

#include "splearn/feature_space.hpp"

namespace splearn {

/// The prompt template files: meta_1.txt .. meta_N.txt (one per choice of the
/// "template" feature), paraphrase.txt and eval.txt. Meta templates carry the
/// placeholders [EXAMPLES], [ROLE1], [ROLE2], [DESCRIPTION]; the paraphrase
/// template carries [INSTRUCTION]; the evaluation template carries
/// [INSTRUCTION] and [INPUT].
struct TemplateSet {
  std::vector<std::string> meta;
  std::string paraphrase;
  std::string eval;

  static TemplateSet load(const std::string& directory);
};

/// Replaces every [KEY] from the map; any placeholder left afterwards is an
/// error naming the offending key.
std::string substitute_placeholders(
    const std::string& text, const std::map<std::string, std::string>& values);

/// Builds the meta prompt for x: picks the meta template selected by x's
/// "template" feature and substitutes the demonstration examples, role pair
/// and description selected by the other features. Role payloads are
/// "ROLE1|ROLE2"; a "(A, B)"-style choice label is parsed when no payload is
/// present; the "(empty)" description maps to an empty string.
std::string build_meta_prompt(const FeatureCatalog& catalog,
                              const FeatureVector& x,
                              const TemplateSet& templates);

/// True when x selects the paraphrasing feature (label on/yes/true/1).
bool paraphrase_enabled(const FeatureCatalog& catalog, const FeatureVector& x);

}  // namespace splearn
