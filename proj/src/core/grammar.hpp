// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "core/bound_expr.hpp"

namespace mlcspace {

enum class SymbolKind : std::uint8_t { NonTerminal, Terminal, Optional, Group, IntRange, RealRange };

struct Alternative;

struct Symbol {
    SymbolKind kind {SymbolKind::Terminal};
    std::string text;                      // nonterminal name or terminal token
    std::vector<Alternative> alternatives; // Optional / Group bodies
    BoundExpr lo;
    BoundExpr hi;
    bool lo_open {false};
    bool hi_open {false};
    bool scaled {false}; // RANDOM-REAL(lo, hi) * scale, sampled as an integer
    BoundExpr scale;

    static Symbol nonterminal(std::string name);
    static Symbol terminal(std::string token);

    bool operator==(Symbol const& other) const;
};

struct Alternative {
    std::vector<Symbol> symbols;
    bool operator==(Alternative const& other) const = default;
};

struct Production {
    std::string name;
    std::vector<Alternative> alternatives;
    std::vector<std::string> comments; // one entry per source comment line, text after '#'
    bool operator==(Production const& other) const = default;
};

enum class TierLabel : std::uint8_t { Small, Medium, Large, Custom };

std::string_view to_string(TierLabel t);

class Grammar {
public:
    Grammar() = default;
    Grammar(std::vector<Production> productions, TierLabel tier);

    [[nodiscard]] std::string const& start_symbol() const noexcept { return start_; }
    [[nodiscard]] std::vector<Production> const& productions() const noexcept { return productions_; }
    [[nodiscard]] TierLabel source_tier() const noexcept { return tier_; }
    [[nodiscard]] Production const* find(std::string_view name) const;
    [[nodiscard]] std::size_t index_of(std::string_view name) const; // npos when missing

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    // structural equality ignores the tier label
    bool operator==(Grammar const& other) const { return start_ == other.start_ && productions_ == other.productions_; }

private:
    std::vector<Production> productions_;
    std::unordered_map<std::string, std::size_t> index_;
    std::string start_;
    TierLabel tier_ {TierLabel::Custom};
};

struct GrammarStats {
    std::size_t rule_count {0};
    std::size_t nonterminal_count {0};
    std::size_t terminal_count {0};       // distinct terminal tokens
    std::size_t terminal_occurrences {0}; // every terminal token occurrence
    std::size_t numeric_leaf_count {0};   // RANDOM-INT / RANDOM-REAL occurrences
    std::size_t unresolved_count {0};
};

// The start symbol is the first production's name.
Grammar parse_grammar(std::string_view text, TierLabel tier = TierLabel::Custom);
std::string print_grammar(Grammar const& g);
std::string print_symbol(Symbol const& s);
std::string print_alternatives(std::vector<Alternative> const& alts);
GrammarStats grammar_stats(Grammar const& g);

// Nonterminals referenced but not defined, in first-reference order.
std::vector<std::string> unresolved_references(Grammar const& g);

// Productions whose comment carries the "supplemented" tag (definitions absent from the source listing).
std::vector<std::string> supplemented_productions(Grammar const& g);

// Visits every symbol of every alternative, depth first.
template <typename F>
void for_each_symbol(std::vector<Alternative> const& alts, F&& f)
{
    for (auto const& a : alts) {
        for (auto const& s : a.symbols) {
            f(s);
            if (s.kind == SymbolKind::Optional || s.kind == SymbolKind::Group) { for_each_symbol(s.alternatives, f); }
        }
    }
}

} // namespace mlcspace
