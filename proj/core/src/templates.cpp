#include "splearn/templates.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace splearn {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("templates: cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(std::string s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c); };
  while (!s.empty() && is_space(s.front())) s.erase(s.begin());
  while (!s.empty() && is_space(s.back())) s.pop_back();
  return s;
}

}  // namespace

TemplateSet TemplateSet::load(const std::string& directory) {
  namespace fs = std::filesystem;
  const fs::path dir(directory);
  if (!fs::is_directory(dir))
    throw std::runtime_error("templates: '" + directory + "' is not a directory");
  TemplateSet t;
  for (int i = 1;; ++i) {
    const fs::path meta = dir / ("meta_" + std::to_string(i) + ".txt");
    if (!fs::exists(meta)) break;
    t.meta.push_back(read_file(meta));
  }
  if (t.meta.empty())
    throw std::runtime_error("templates: no meta_1.txt found in '" + directory + "'");
  t.paraphrase = read_file(dir / "paraphrase.txt");
  t.eval = read_file(dir / "eval.txt");
  return t;
}

std::string substitute_placeholders(
    const std::string& text, const std::map<std::string, std::string>& values) {
  std::string out = text;
  for (const auto& [key, value] : values) {
    const std::string needle = "[" + key + "]";
    std::size_t pos = 0;
    while ((pos = out.find(needle, pos)) != std::string::npos) {
      out.replace(pos, needle.size(), value);
      pos += value.size();
    }
  }
  // any [UPPERCASE_TOKEN] left is a template defect
  std::size_t open = 0;
  while ((open = out.find('[', open)) != std::string::npos) {
    const std::size_t close = out.find(']', open);
    if (close == std::string::npos) break;
    const std::string token = out.substr(open + 1, close - open - 1);
    const bool placeholder_like =
        !token.empty() &&
        std::all_of(token.begin(), token.end(), [](unsigned char c) {
          return std::isupper(c) || std::isdigit(c) || c == '_';
        });
    if (placeholder_like)
      throw std::runtime_error("templates: unresolved placeholder [" + token + "]");
    open = close + 1;
  }
  return out;
}

namespace {

int selected_choice(const FeatureCatalog& catalog, const FeatureVector& x, int g) {
  for (int c = 0; c < catalog.group_size(g); ++c)
    if (x.bits[catalog.offset(g) + c]) return c;
  throw std::invalid_argument("templates: no choice selected in group '" +
                              catalog.groups()[g].name + "'");
}

std::string choice_payload_or_label(const FeatureCatalog& catalog, int g, int c) {
  const auto& group = catalog.groups()[g];
  if (!group.payloads.empty()) return group.payloads[c];
  return group.choices[c];
}

std::pair<std::string, std::string> role_pair(const std::string& raw) {
  const auto bar = raw.find('|');
  if (bar != std::string::npos)
    return {trim(raw.substr(0, bar)), trim(raw.substr(bar + 1))};
  // "(A, B)" label form
  std::string s = trim(raw);
  if (!s.empty() && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw std::runtime_error("templates: role choice '" + raw +
                             "' is not a 'ROLE1|ROLE2' pair");
  return {trim(s.substr(0, comma)), trim(s.substr(comma + 1))};
}

}  // namespace

std::string build_meta_prompt(const FeatureCatalog& catalog,
                              const FeatureVector& x,
                              const TemplateSet& templates) {
  const int template_group = catalog.find_group("template");
  if (template_group < 0)
    throw std::invalid_argument("templates: catalog has no 'template' group");
  const int template_idx = selected_choice(catalog, x, template_group);
  if (template_idx >= static_cast<int>(templates.meta.size()))
    throw std::runtime_error("templates: meta template file " +
                             std::to_string(template_idx + 1) + " is missing");

  std::map<std::string, std::string> values;
  if (const int g = catalog.find_group("examples"); g >= 0)
    values["EXAMPLES"] = choice_payload_or_label(catalog, g, selected_choice(catalog, x, g));
  if (const int g = catalog.find_group("roles"); g >= 0) {
    const auto [r1, r2] =
        role_pair(choice_payload_or_label(catalog, g, selected_choice(catalog, x, g)));
    values["ROLE1"] = r1;
    values["ROLE2"] = r2;
  }
  if (const int g = catalog.find_group("description"); g >= 0) {
    std::string d = choice_payload_or_label(catalog, g, selected_choice(catalog, x, g));
    if (d == "(empty)") d.clear();
    values["DESCRIPTION"] = d;
  }
  return substitute_placeholders(templates.meta[template_idx], values);
}

bool paraphrase_enabled(const FeatureCatalog& catalog, const FeatureVector& x) {
  const int g = catalog.find_group("paraphrasing");
  if (g < 0) return false;
  std::string label = catalog.groups()[g].choices[selected_choice(catalog, x, g)];
  std::transform(label.begin(), label.end(), label.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return label == "on" || label == "yes" || label == "true" || label == "1";
}

}  // namespace splearn
