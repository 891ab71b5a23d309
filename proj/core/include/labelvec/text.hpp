#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace labelvec {

/// Term tokenizer shared by the LSA and word-vector engines: ASCII
/// lowercase, split on any non-alphanumeric byte, drop tokens shorter than
/// two characters.
std::vector<std::string> tokenize_terms(std::string_view text);

}  // namespace labelvec
