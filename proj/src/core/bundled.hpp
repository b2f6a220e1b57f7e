// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

namespace mlcspace::bundled {

// data/grammar_large.bnf
std::string_view grammar_large() noexcept;
// data/algorithms.tsv
std::string_view algorithm_table() noexcept;
// data/meka_names.txt
std::string_view meka_names() noexcept;

} // namespace mlcspace::bundled
