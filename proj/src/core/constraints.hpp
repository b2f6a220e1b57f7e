// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "core/bound_expr.hpp"
#include "core/config_model.hpp"

namespace mlcspace {

struct Finding {
    std::string code;    // "H1".."H14", "H0", "W1".."W4"
    std::string message; // what is wrong in this configuration
    std::string rule;    // the rule being enforced, stable per code
    bool operator==(Finding const&) const = default;
};

struct ValidationReport {
    enum class Verdict : std::uint8_t { Valid, Invalid };

    std::vector<Finding> violations; // hard, sorted by code
    std::vector<Finding> warnings;   // soft, sorted by code

    [[nodiscard]] Verdict verdict() const { return violations.empty() ? Verdict::Valid : Verdict::Invalid; }
    [[nodiscard]] bool valid() const { return violations.empty(); }
    [[nodiscard]] bool has(std::string_view code) const;
};

struct CodeInfo {
    char const* code;
    bool hard;
    char const* rule;
};

// Every code the validator can emit, in report order.
std::vector<CodeInfo> const& violation_codes();

ValidationReport validate(Configuration const& c, DatasetContext const& ctx,
                          TierRegistry const& reg = TierRegistry::bundled());

// Same checks, except that bounds depending on L or A and the label-count warning are skipped.
ValidationReport validate_without_context(Configuration const& c, TierRegistry const& reg = TierRegistry::bundled());

} // namespace mlcspace
