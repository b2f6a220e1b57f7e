// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "core/grammar.hpp"

namespace mlcspace {

enum class Tier : std::uint8_t { Small = 0, Medium = 1, Large = 2 };
enum class Level : std::uint8_t { Mlc, Slc };
enum class AlgorithmType : std::uint8_t {
    AlgorithmAdaptation,
    ProblemTransformation,
    MetaMlc,
    Trees,
    Rules,
    Lazy,
    Functions,
    Bayes,
    Preprocessing,
    MetaSlc
};

std::string_view to_string(Tier t);
std::optional<Tier> parse_tier(std::string_view s); // case-insensitive
TierLabel tier_label(Tier t);

struct AlgorithmRecord {
    std::string id;
    std::string acronym;
    std::string name;
    Level level {Level::Mlc};
    AlgorithmType type {AlgorithmType::ProblemTransformation};
    std::array<bool, 3> tiers {};
    int hp_count {0};
    std::vector<std::string> marker_tokens;
    std::vector<std::string> marker_nonterminals;

    [[nodiscard]] bool in(Tier t) const { return tiers[static_cast<std::size_t>(t)]; }
    [[nodiscard]] bool is_meta() const { return type == AlgorithmType::MetaMlc || type == AlgorithmType::MetaSlc; }
};

class TierRegistry {
public:
    // Tab-separated table; see data/algorithms.tsv for the column layout.
    static TierRegistry parse(std::string_view tsv);
    static TierRegistry const& bundled();

    [[nodiscard]] std::vector<AlgorithmRecord> const& algorithms() const noexcept { return records_; }
    [[nodiscard]] AlgorithmRecord const* find(std::string_view id) const;
    [[nodiscard]] AlgorithmRecord const& at(std::string_view id) const; // throws UnknownAlgorithm
    [[nodiscard]] AlgorithmRecord const* by_token(std::string_view token) const;
    [[nodiscard]] AlgorithmRecord const* by_nonterminal(std::string_view name) const;
    [[nodiscard]] AlgorithmRecord const* by_acronym(std::string_view acronym, Level level) const;
    [[nodiscard]] std::vector<std::string> ids(Level level) const;

private:
    std::vector<AlgorithmRecord> records_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::unordered_map<std::string, std::size_t> by_token_;
    std::unordered_map<std::string, std::size_t> by_nonterminal_;
};

struct TierMembership {
    std::set<std::string> mlc;
    std::set<std::string> slc;
};

TierMembership tier_membership(Tier t, TierRegistry const& reg = TierRegistry::bundled());

// Removes every alternative that requires an out-of-tier algorithm marker (directly or through
// nonterminals left without alternatives), drops optionals emptied that way, then drops
// productions no longer reachable from the start symbol.
Grammar restrict_to_tier(Grammar const& g, Tier t, TierRegistry const& reg = TierRegistry::bundled());

// Bundled Large grammar filtered to the tier; parsed once and cached.
Grammar const& bundled_grammar(Tier t);

// Algorithm ids whose markers occur in the grammar.
std::set<std::string> reachable_algorithms(Grammar const& g, TierRegistry const& reg = TierRegistry::bundled());

} // namespace mlcspace
