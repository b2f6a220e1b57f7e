// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "core/bound_expr.hpp"
#include "core/derivation.hpp"
#include "core/grammar.hpp"
#include "core/rng.hpp"
#include "core/tiering.hpp"

namespace mlcspace {

enum class SamplingMode : std::uint8_t { Naive, UniformMarginal };

std::string_view to_string(SamplingMode m);
std::optional<SamplingMode> parse_mode(std::string_view s); // "naive" | "uniform-marginal"

// Choice sites are keyed by production name, extended with "/a.s" steps for each nested
// group or optional (alternative index a, symbol index s), e.g. "Start/0.0".
struct WeightTable {
    std::map<std::string, std::vector<double>> choices;
    std::map<std::string, double> inclusion; // optional sites

    [[nodiscard]] std::vector<double> const* weights(std::string const& site) const;
    [[nodiscard]] double inclusion_probability(std::string const& site) const; // 0.5 when absent
};

// Weight of each alternative = number of distinct headline algorithms that can come first through
// it; optionals whose body and continuation both lead to algorithms get the matching share.
WeightTable marginal_weights(Grammar const& g, TierRegistry const& reg = TierRegistry::bundled());
WeightTable naive_weights(Grammar const& g);

// First algorithm markers reachable through each production (by algorithm id).
std::map<std::string, std::set<std::string>> first_markers(Grammar const& g, TierRegistry const& reg = TierRegistry::bundled());

class Sampler {
public:
    Sampler(Grammar g, SamplingMode mode, TierRegistry const& reg = TierRegistry::bundled());
    Sampler(Sampler const&) = delete;
    Sampler& operator=(Sampler const&) = delete;
    Sampler(Sampler&&) noexcept = default;
    Sampler& operator=(Sampler&&) noexcept = default;
    ~Sampler();

    [[nodiscard]] DerivationTree sample(DatasetContext const& ctx, std::uint64_t seed) const;
    [[nodiscard]] DerivationTree sample(DatasetContext const& ctx, Rng& rng) const;
    // Fresh subtree for a production, used by mutation.
    [[nodiscard]] DerivationNode sample_production(std::string_view name, DatasetContext const& ctx, Rng& rng) const;
    // Fresh subtree for one symbol occurrence; `s` must belong to grammar().
    [[nodiscard]] DerivationNode sample_symbol(Symbol const& s, DatasetContext const& ctx, Rng& rng) const;

    [[nodiscard]] Grammar const& grammar() const noexcept;
    [[nodiscard]] WeightTable const& weights() const noexcept;
    [[nodiscard]] SamplingMode mode() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

DerivationTree sample_tree(Grammar const& g, DatasetContext const& ctx, SamplingMode mode, std::uint64_t seed);

struct Headlines {
    std::optional<std::string> mlc;
    std::optional<std::string> slc;
};

// First algorithm marker of each level in pre-order.
Headlines tree_headlines(DerivationTree const& t, TierRegistry const& reg = TierRegistry::bundled());

// Every algorithm id whose marker occurs in the tree.
std::set<std::string> tree_algorithms(DerivationTree const& t, TierRegistry const& reg = TierRegistry::bundled());

} // namespace mlcspace
