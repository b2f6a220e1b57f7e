// SPDX-License-Identifier: Apache-2.0
#include "core/tiering.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <sstream>

#include "core/bundled.hpp"
#include "core/error.hpp"

namespace mlcspace {

std::string_view to_string(Tier t)
{
    switch (t) {
    case Tier::Small: return "Small";
    case Tier::Medium: return "Medium";
    case Tier::Large: return "Large";
    }
    return "Large";
}

std::optional<Tier> parse_tier(std::string_view s)
{
    std::string l(s);
    std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (l == "small") { return Tier::Small; }
    if (l == "medium") { return Tier::Medium; }
    if (l == "large") { return Tier::Large; }
    return std::nullopt;
}

TierLabel tier_label(Tier t)
{
    switch (t) {
    case Tier::Small: return TierLabel::Small;
    case Tier::Medium: return TierLabel::Medium;
    case Tier::Large: return TierLabel::Large;
    }
    return TierLabel::Large;
}

namespace {

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto p = s.find(sep, start);
        out.emplace_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
        if (p == std::string_view::npos) { return out; }
        start = p + 1;
    }
}

AlgorithmType parse_type(std::string const& s, int line)
{
    static std::unordered_map<std::string, AlgorithmType> const table {
        {"AA", AlgorithmType::AlgorithmAdaptation}, {"PT", AlgorithmType::ProblemTransformation},
        {"Meta-MLC", AlgorithmType::MetaMlc}, {"Trees", AlgorithmType::Trees}, {"Rules", AlgorithmType::Rules},
        {"Lazy", AlgorithmType::Lazy}, {"Functions", AlgorithmType::Functions}, {"Bayes", AlgorithmType::Bayes},
        {"Preprocessing", AlgorithmType::Preprocessing}, {"Meta-SLC", AlgorithmType::MetaSlc}};
    auto it = table.find(s);
    if (it == table.end()) { throw SyntaxError(line, 4, "algorithm type"); }
    return it->second;
}

bool parse_flag(std::string const& s, int line, int column)
{
    if (s == "Y") { return true; }
    if (s == "N") { return false; }
    throw SyntaxError(line, column, "Y or N");
}

} // namespace

TierRegistry TierRegistry::parse(std::string_view tsv)
{
    TierRegistry reg;
    int line_no = 0;
    bool header = false;
    for (auto const& raw : split(tsv, '\n')) {
        ++line_no;
        std::string line = raw;
        if (!line.empty() && line.back() == '\r') { line.pop_back(); }
        if (line.empty() || line.front() == '#') { continue; }
        auto f = split(line, '\t');
        if (!header) {
            if (f.empty() || f[0] != "id") { throw SyntaxError(line_no, 1, "header row starting with 'id'"); }
            header = true;
            continue;
        }
        if (f.size() != 10) { throw SyntaxError(line_no, 1, "10 tab-separated fields"); }
        AlgorithmRecord r;
        r.id = f[0];
        r.acronym = f[1];
        if (f[2] == "MLC") { r.level = Level::Mlc; }
        else if (f[2] == "SLC") { r.level = Level::Slc; }
        else { throw SyntaxError(line_no, 3, "MLC or SLC"); }
        r.type = parse_type(f[3], line_no);
        for (std::size_t i = 0; i < 3; ++i) { r.tiers[i] = parse_flag(f[4 + i], line_no, static_cast<int>(5 + i)); }
        try {
            r.hp_count = std::stoi(f[7]);
        } catch (std::exception const&) {
            throw SyntaxError(line_no, 8, "hyper-parameter count");
        }
        for (auto const& m : split(f[8], ',')) {
            if (m.size() > 2 && m.front() == '<' && m.back() == '>') { r.marker_nonterminals.push_back(m.substr(1, m.size() - 2)); }
            else if (!m.empty()) { r.marker_tokens.push_back(m); }
        }
        r.name = f[9];
        auto idx = reg.records_.size();
        if (!reg.by_id_.emplace(r.id, idx).second) { throw DuplicateProduction(r.id); }
        for (auto const& t : r.marker_tokens) { reg.by_token_.emplace(t, idx); }
        for (auto const& n : r.marker_nonterminals) { reg.by_nonterminal_.emplace(n, idx); }
        reg.records_.push_back(std::move(r));
    }
    return reg;
}

TierRegistry const& TierRegistry::bundled()
{
    static TierRegistry const reg = parse(bundled::algorithm_table());
    return reg;
}

AlgorithmRecord const* TierRegistry::find(std::string_view id) const
{
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &records_[it->second];
}

AlgorithmRecord const& TierRegistry::at(std::string_view id) const
{
    auto const* r = find(id);
    if (r == nullptr) { throw UnknownAlgorithm(std::string(id)); }
    return *r;
}

AlgorithmRecord const* TierRegistry::by_token(std::string_view token) const
{
    auto it = by_token_.find(std::string(token));
    return it == by_token_.end() ? nullptr : &records_[it->second];
}

AlgorithmRecord const* TierRegistry::by_nonterminal(std::string_view name) const
{
    auto it = by_nonterminal_.find(std::string(name));
    return it == by_nonterminal_.end() ? nullptr : &records_[it->second];
}

AlgorithmRecord const* TierRegistry::by_acronym(std::string_view acronym, Level level) const
{
    for (auto const& r : records_) {
        if (r.level == level && r.acronym == acronym) { return &r; }
    }
    return nullptr;
}

std::vector<std::string> TierRegistry::ids(Level level) const
{
    std::vector<std::string> out;
    for (auto const& r : records_) {
        if (r.level == level) { out.push_back(r.id); }
    }
    return out;
}

TierMembership tier_membership(Tier t, TierRegistry const& reg)
{
    TierMembership m;
    for (auto const& r : reg.algorithms()) {
        if (!r.in(t)) { continue; }
        (r.level == Level::Mlc ? m.mlc : m.slc).insert(r.id);
    }
    return m;
}

namespace {

class TierFilter {
public:
    TierFilter(Grammar const& g, Tier t, TierRegistry const& reg) : g_(g), tier_(t), reg_(reg)
    {
        dead_.assign(g.productions().size(), false);
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i < dead_.size(); ++i) {
                if (dead_[i]) { continue; }
                auto const& alts = g.productions()[i].alternatives;
                if (std::all_of(alts.begin(), alts.end(), [&](Alternative const& a) { return alt_dead(a); })) {
                    dead_[i] = true;
                    changed = true;
                }
            }
        }
    }

    [[nodiscard]] bool production_dead(std::size_t i) const { return dead_[i]; }

    std::vector<Alternative> rewrite(std::vector<Alternative> const& alts) const
    {
        std::vector<Alternative> out;
        for (auto const& a : alts) {
            if (alt_dead(a)) { continue; }
            Alternative b;
            for (auto const& s : a.symbols) {
                if (s.kind == SymbolKind::Optional || s.kind == SymbolKind::Group) {
                    Symbol c = s;
                    c.alternatives = rewrite(s.alternatives);
                    if (c.alternatives.empty()) { continue; } // only optionals can end up empty here
                    b.symbols.push_back(std::move(c));
                } else {
                    b.symbols.push_back(s);
                }
            }
            if (!b.symbols.empty()) { out.push_back(std::move(b)); }
        }
        return out;
    }

private:
    bool token_dead(std::string const& tok) const
    {
        auto const* r = reg_.by_token(tok);
        return r != nullptr && !r->in(tier_);
    }

    bool nonterminal_dead(std::string const& name) const
    {
        if (auto const* r = reg_.by_nonterminal(name); r != nullptr && !r->in(tier_)) { return true; }
        auto i = g_.index_of(name);
        return i != Grammar::npos && dead_[i];
    }

    bool symbol_dead(Symbol const& s) const
    {
        switch (s.kind) {
        case SymbolKind::Terminal: return token_dead(s.text);
        case SymbolKind::NonTerminal: return nonterminal_dead(s.text);
        case SymbolKind::Group:
            return std::all_of(s.alternatives.begin(), s.alternatives.end(), [&](Alternative const& a) { return alt_dead(a); });
        default: return false;
        }
    }

    bool alt_dead(Alternative const& a) const
    {
        return std::any_of(a.symbols.begin(), a.symbols.end(), [&](Symbol const& s) { return symbol_dead(s); });
    }

    Grammar const& g_;
    Tier tier_;
    TierRegistry const& reg_;
    std::vector<bool> dead_;
};

} // namespace

Grammar restrict_to_tier(Grammar const& g, Tier t, TierRegistry const& reg)
{
    TierFilter filter(g, t, reg);
    auto const& prods = g.productions();
    if (prods.empty() || filter.production_dead(0)) {
        throw EmptyTier("tier " + std::string(to_string(t)) + " leaves no derivation of <" + g.start_symbol() + ">");
    }
    std::vector<Production> rewritten(prods.size());
    std::vector<bool> keep(prods.size(), false);
    std::deque<std::size_t> queue {0};
    keep[0] = true;
    while (!queue.empty()) {
        auto i = queue.front();
        queue.pop_front();
        rewritten[i] = prods[i];
        rewritten[i].alternatives = filter.rewrite(prods[i].alternatives);
        for_each_symbol(rewritten[i].alternatives, [&](Symbol const& s) {
            if (s.kind != SymbolKind::NonTerminal) { return; }
            auto j = g.index_of(s.text);
            if (j != Grammar::npos && !keep[j]) {
                keep[j] = true;
                queue.push_back(j);
            }
        });
    }
    std::vector<Production> out;
    for (std::size_t i = 0; i < prods.size(); ++i) {
        if (keep[i]) { out.push_back(std::move(rewritten[i])); }
    }
    return Grammar(std::move(out), tier_label(t));
}

Grammar const& bundled_grammar(Tier t)
{
    static std::once_flag once;
    static std::array<Grammar, 3> cache;
    std::call_once(once, [] {
        auto large = parse_grammar(bundled::grammar_large(), TierLabel::Large);
        cache[0] = restrict_to_tier(large, Tier::Small);
        cache[1] = restrict_to_tier(large, Tier::Medium);
        cache[2] = restrict_to_tier(large, Tier::Large);
    });
    return cache[static_cast<std::size_t>(t)];
}

std::set<std::string> reachable_algorithms(Grammar const& g, TierRegistry const& reg)
{
    std::set<std::string> out;
    for (auto const& p : g.productions()) {
        if (auto const* r = reg.by_nonterminal(p.name)) { out.insert(r->id); }
        for_each_symbol(p.alternatives, [&](Symbol const& s) {
            AlgorithmRecord const* r = nullptr;
            if (s.kind == SymbolKind::Terminal) { r = reg.by_token(s.text); }
            else if (s.kind == SymbolKind::NonTerminal) { r = reg.by_nonterminal(s.text); }
            if (r != nullptr) { out.insert(r->id); }
        });
    }
    return out;
}

} // namespace mlcspace
