#include "splearn/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <vector>

namespace splearn {

namespace {

std::vector<std::string> clean_tokens(std::string_view text, bool drop_articles) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (unsigned char c : text) {
    if (std::ispunct(c)) continue;
    cleaned.push_back(static_cast<char>(std::tolower(c)));
  }
  std::istringstream ss(cleaned);
  std::vector<std::string> tokens;
  std::string tok;
  while (ss >> tok) {
    if (drop_articles && (tok == "a" || tok == "an" || tok == "the")) continue;
    tokens.push_back(tok);
  }
  return tokens;
}

}  // namespace

std::string normalize_answer(std::string_view text) {
  const auto tokens = clean_tokens(text, /*drop_articles=*/true);
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

double metric_exact_match(std::string_view response, std::string_view expected) {
  return normalize_answer(response) == normalize_answer(expected) ? 1.0 : 0.0;
}

double metric_f1(std::string_view response, std::string_view expected) {
  const auto resp = clean_tokens(response, /*drop_articles=*/false);
  const auto exp = clean_tokens(expected, /*drop_articles=*/false);
  if (resp.empty() && exp.empty()) return 1.0;
  if (resp.empty() || exp.empty()) return 0.0;
  std::map<std::string, int> counts;
  for (const auto& t : exp) ++counts[t];
  int overlap = 0;
  for (const auto& t : resp) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / resp.size();
  const double recall = static_cast<double>(overlap) / exp.size();
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace splearn
