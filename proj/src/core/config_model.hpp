// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "core/bound_expr.hpp"
#include "core/derivation.hpp"
#include "core/tiering.hpp"

namespace mlcspace {

struct Threshold {
    enum class Kind : std::uint8_t { PCut1, PCutL, Real };
    Kind kind {Kind::PCut1};
    double value {0}; // only for Real

    static Threshold pcut1() { return {}; }
    static Threshold pcutl() { return {Kind::PCutL, 0}; }
    static Threshold real(double v) { return {Kind::Real, v}; }

    bool operator==(Threshold const& o) const { return kind == o.kind && (kind != Kind::Real || value == o.value); }
};

std::string threshold_text(Threshold const& t); // "PCut1", "PCutL" or the number

using Value = std::variant<std::int64_t, double, std::string, bool>;

std::string value_text(Value const& v);

struct ParamValue {
    std::string name;
    Value value;
    bool operator==(ParamValue const&) const = default;
};

struct Algorithm {
    std::string id;
    std::vector<ParamValue> params; // registry order

    [[nodiscard]] ParamValue const* find(std::string_view name) const;
    [[nodiscard]] bool has(std::string_view name) const { return find(name) != nullptr; }
    [[nodiscard]] bool flag(std::string_view name) const; // absent flags read as false
    [[nodiscard]] std::optional<std::int64_t> get_int(std::string_view name) const;
    [[nodiscard]] std::optional<double> get_number(std::string_view name) const;
    [[nodiscard]] std::optional<std::string> get_string(std::string_view name) const;
    void set(std::string name, Value v); // replaces, keeps registry order

    bool operator==(Algorithm const&) const = default;
};

// meta-SLC -> ASC -> base
struct SlcChain {
    std::optional<Algorithm> meta;
    std::optional<Algorithm> asc;
    Algorithm base;
    bool operator==(SlcChain const&) const = default;
};

// PT algorithm with its SLC chain, or ML-BPNN alone
struct MlcCore {
    Algorithm algorithm;
    std::optional<SlcChain> slc;
    bool operator==(MlcCore const&) const = default;
};

struct Configuration {
    Threshold threshold;
    std::optional<Algorithm> meta; // meta-MLC wrapper
    MlcCore core;
    bool operator==(Configuration const&) const = default;
};

struct ConfigHeadlines {
    std::string mlc;
    std::optional<std::string> slc;
};
ConfigHeadlines config_headlines(Configuration const& c);

// ---- parameter registry ----

struct ParamSpec {
    enum class Kind : std::uint8_t { Int, Real, Categorical, Flag };

    std::string name;
    std::string cli_flag; // "-P"; empty when the value itself is the switch (KNN distance weighting)
    Kind kind {Kind::Flag};
    std::string description;

    // Int / Real domain; choices replace the range when non-empty.
    BoundExpr lo;
    BoundExpr hi;
    bool lo_open {false};
    bool hi_open {false};
    bool scaled {false}; // integer obtained by rounding a real fraction of `scale`
    BoundExpr scale;
    std::vector<std::int64_t> choices;
    std::vector<std::int64_t> extra; // admissible sentinel values outside the range (e.g. 0 = automatic)

    std::vector<std::string> values; // Categorical
    Value default_value;
    bool has_default {true};

    // sub-parameters that only exist for some values of this (categorical) parameter
    std::vector<ParamSpec> sub;
    std::vector<std::string> active_for; // for sub-parameters: parent values enabling it
};

// Registry entry for one algorithm, listing order matches the algorithm's documentation.
[[nodiscard]] std::vector<ParamSpec> const& describe(std::string_view alg_id);

// Number of hyper-parameters as counted in the algorithm tables: each top-level spec counts once,
// a parameter with sub-parameters adds the largest set that can be active at the same time.
[[nodiscard]] int declared_hp_count(std::vector<ParamSpec> const& specs);

// Flat lookup including sub-parameters; nullptr when the algorithm has no such parameter.
[[nodiscard]] ParamSpec const* find_spec(std::string_view alg_id, std::string_view param);

// Position of a parameter in the flattened listing order (for sorting); -1 when unknown.
[[nodiscard]] int spec_order(std::string_view alg_id, std::string_view param);

struct DomainCheck {
    bool ok {true};
    std::string reason;
};
// Checks kind and interval of a value under the given context.
DomainCheck check_domain(ParamSpec const& spec, Value const& v, DatasetContext const& ctx);

// Display names of the 23 payoff functions, in grammar order, and the grammar token spelling.
std::vector<std::string> const& payoff_functions();
std::string payoff_display_name(std::string_view token);

// ---- lowering ----

Configuration lower(DerivationTree const& t, TierRegistry const& reg = TierRegistry::bundled());

// Binds the parameters found in a fragment (e.g. a freshly sampled <LWL>) to one algorithm.
Algorithm lower_fragment(DerivationNode const& fragment, std::string const& alg_id,
                         TierRegistry const& reg = TierRegistry::bundled());

} // namespace mlcspace
