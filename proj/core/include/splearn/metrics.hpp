#pragma once

#include <string>
#include <string_view>

namespace splearn {

/// Answer normalization for exact match: lowercase, strip punctuation,
/// collapse whitespace, drop the English articles a/an/the.
std::string normalize_answer(std::string_view text);

/// 1 iff the normalized strings are identical.
double metric_exact_match(std::string_view response, std::string_view expected);

/// Token-level F1 with multiset overlap on lowercased, punctuation-stripped
/// whitespace tokens (articles kept). 1 when both sides are empty, 0 when
/// exactly one is.
double metric_f1(std::string_view response, std::string_view expected);

}  // namespace splearn
