// SPDX-License-Identifier: Apache-2.0
#include "core/sampling.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace mlcspace {

std::string_view to_string(SamplingMode m)
{
    return m == SamplingMode::Naive ? "naive" : "uniform-marginal";
}

std::optional<SamplingMode> parse_mode(std::string_view s)
{
    if (s == "naive") { return SamplingMode::Naive; }
    if (s == "uniform-marginal" || s == "uniform_marginal" || s == "marginal") { return SamplingMode::UniformMarginal; }
    return std::nullopt;
}

std::vector<double> const* WeightTable::weights(std::string const& site) const
{
    auto it = choices.find(site);
    return it == choices.end() ? nullptr : &it->second;
}

double WeightTable::inclusion_probability(std::string const& site) const
{
    auto it = inclusion.find(site);
    return it == inclusion.end() ? 0.5 : it->second;
}

namespace {

using IdSet = std::set<std::string>;

struct FirstInfo {
    IdSet first;
    bool nullable {false};
};

class FirstSets {
public:
    FirstSets(Grammar const& g, TierRegistry const& reg) : g_(g), reg_(reg)
    {
        prod_.resize(g.productions().size());
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i < prod_.size(); ++i) {
                auto info = alternatives(g.productions()[i].alternatives);
                if (info.first != prod_[i].first || info.nullable != prod_[i].nullable) {
                    prod_[i] = std::move(info);
                    changed = true;
                }
            }
        }
    }

    [[nodiscard]] FirstInfo const& production(std::size_t i) const { return prod_[i]; }

    FirstInfo symbol(Symbol const& s) const
    {
        switch (s.kind) {
        case SymbolKind::Terminal:
            if (auto const* r = reg_.by_token(s.text)) { return {{r->id}, false}; }
            return {};
        case SymbolKind::NonTerminal: {
            if (auto const* r = reg_.by_nonterminal(s.text)) { return {{r->id}, false}; }
            auto i = g_.index_of(s.text);
            return i == Grammar::npos ? FirstInfo {} : prod_[i];
        }
        case SymbolKind::Optional: {
            auto f = alternatives(s.alternatives);
            f.nullable = true;
            return f;
        }
        case SymbolKind::Group: return alternatives(s.alternatives);
        default: return {};
        }
    }

    // FIRST of symbols[from..]
    FirstInfo sequence(std::vector<Symbol> const& syms, std::size_t from) const
    {
        FirstInfo out;
        out.nullable = true;
        for (auto i = from; i < syms.size(); ++i) {
            auto f = symbol(syms[i]);
            out.first.insert(f.first.begin(), f.first.end());
            if (!f.nullable) {
                out.nullable = false;
                break;
            }
        }
        return out;
    }

    FirstInfo alternatives(std::vector<Alternative> const& alts) const
    {
        FirstInfo out;
        for (auto const& a : alts) {
            auto f = sequence(a.symbols, 0);
            out.first.insert(f.first.begin(), f.first.end());
            out.nullable = out.nullable || f.nullable;
        }
        return out;
    }

private:
    Grammar const& g_;
    TierRegistry const& reg_;
    std::vector<FirstInfo> prod_;
};

std::string site_key(std::string const& parent, std::size_t alt, std::size_t sym)
{
    return parent + "/" + std::to_string(alt) + "." + std::to_string(sym);
}

void fill_sites(std::vector<Alternative> const& alts, std::string const& key, FirstSets const* fs, WeightTable& t)
{
    std::vector<double> w;
    for (auto const& a : alts) {
        double x = 1;
        if (fs != nullptr) {
            auto n = fs->sequence(a.symbols, 0).first.size();
            if (n > 0) { x = static_cast<double>(n); }
        }
        w.push_back(x);
    }
    t.choices[key] = std::move(w);
    for (std::size_t ai = 0; ai < alts.size(); ++ai) {
        auto const& syms = alts[ai].symbols;
        for (std::size_t si = 0; si < syms.size(); ++si) {
            auto const& s = syms[si];
            if (s.kind != SymbolKind::Optional && s.kind != SymbolKind::Group) { continue; }
            auto const k = site_key(key, ai, si);
            if (s.kind == SymbolKind::Optional) {
                double p = 0.5;
                if (fs != nullptr) {
                    auto const inside = fs->alternatives(s.alternatives).first.size();
                    auto const rest = fs->sequence(syms, si + 1).first.size();
                    if (inside > 0 && rest > 0) { p = static_cast<double>(inside) / static_cast<double>(inside + rest); }
                }
                t.inclusion[k] = p;
            }
            fill_sites(s.alternatives, k, fs, t);
        }
    }
}

} // namespace

std::map<std::string, std::set<std::string>> first_markers(Grammar const& g, TierRegistry const& reg)
{
    FirstSets fs(g, reg);
    std::map<std::string, std::set<std::string>> out;
    for (std::size_t i = 0; i < g.productions().size(); ++i) { out[g.productions()[i].name] = fs.production(i).first; }
    return out;
}

WeightTable marginal_weights(Grammar const& g, TierRegistry const& reg)
{
    FirstSets fs(g, reg);
    WeightTable t;
    for (auto const& p : g.productions()) { fill_sites(p.alternatives, p.name, &fs, t); }
    return t;
}

WeightTable naive_weights(Grammar const& g)
{
    WeightTable t;
    for (auto const& p : g.productions()) { fill_sites(p.alternatives, p.name, nullptr, t); }
    return t;
}

struct Sampler::Impl {
    Grammar grammar;
    SamplingMode mode;
    WeightTable table;
    // compiled lookups into `grammar`
    std::unordered_map<void const*, std::vector<double> const*> choice;
    std::unordered_map<void const*, double> inclusion;
    std::unordered_map<Symbol const*, std::size_t> target;

    void compile(std::vector<Alternative> const& alts, void const* owner, std::string const& key)
    {
        choice[owner] = table.weights(key);
        for (std::size_t ai = 0; ai < alts.size(); ++ai) {
            auto const& syms = alts[ai].symbols;
            for (std::size_t si = 0; si < syms.size(); ++si) {
                auto const& s = syms[si];
                if (s.kind == SymbolKind::NonTerminal) {
                    auto j = grammar.index_of(s.text);
                    if (j != Grammar::npos) { target[&s] = j; }
                } else if (s.kind == SymbolKind::Optional || s.kind == SymbolKind::Group) {
                    auto const k = site_key(key, ai, si);
                    if (s.kind == SymbolKind::Optional) { inclusion[&s] = table.inclusion_probability(k); }
                    compile(s.alternatives, &s, k);
                }
            }
        }
    }

    int choose(void const* owner, std::size_t n, Rng& rng) const
    {
        if (n == 1) { return 0; }
        auto const* w = choice.at(owner);
        return static_cast<int>(rng.weighted(*w));
    }

    DerivationNode production(std::size_t i, DatasetContext const& ctx, Rng& rng, int depth) const
    {
        if (depth > 256) { throw Error("derivation depth limit exceeded (recursive grammar?)"); }
        auto const& p = grammar.productions()[i];
        DerivationNode n;
        n.kind = NodeKind::NonTerminal;
        n.label = p.name;
        n.alternative = choose(&p, p.alternatives.size(), rng);
        expand(p.alternatives[static_cast<std::size_t>(n.alternative)], n, ctx, rng, depth);
        return n;
    }

    void expand(Alternative const& a, DerivationNode& parent, DatasetContext const& ctx, Rng& rng, int depth) const
    {
        parent.children.reserve(a.symbols.size());
        for (auto const& s : a.symbols) { parent.children.push_back(symbol(s, ctx, rng, depth)); }
    }

    DerivationNode symbol(Symbol const& s, DatasetContext const& ctx, Rng& rng, int depth) const
    {
        DerivationNode n;
        switch (s.kind) {
        case SymbolKind::Terminal:
            n.kind = NodeKind::Token;
            n.label = s.text;
            return n;
        case SymbolKind::NonTerminal: {
            auto it = target.find(&s);
            if (it == target.end()) { throw Error("cannot expand unresolved nonterminal <" + s.text + ">"); }
            return production(it->second, ctx, rng, depth + 1);
        }
        case SymbolKind::Group:
            n.kind = NodeKind::Group;
            n.alternative = choose(&s, s.alternatives.size(), rng);
            expand(s.alternatives[static_cast<std::size_t>(n.alternative)], n, ctx, rng, depth);
            return n;
        case SymbolKind::Optional:
            n.kind = NodeKind::Optional;
            n.included = rng.bernoulli(inclusion.at(&s));
            if (n.included) {
                n.alternative = choose(&s, s.alternatives.size(), rng);
                expand(s.alternatives[static_cast<std::size_t>(n.alternative)], n, ctx, rng, depth);
            }
            return n;
        case SymbolKind::IntRange: {
            auto b = int_bounds(s.lo, s.hi, ctx);
            n.kind = NodeKind::Int;
            n.lo = static_cast<double>(b.lo);
            n.hi = static_cast<double>(b.hi);
            n.int_value = rng.uniform_int(b.lo, b.hi);
            return n;
        }
        case SymbolKind::RealRange: {
            double const lo = s.lo.evaluate(ctx);
            double const hi = s.hi.evaluate(ctx);
            if (s.scaled) {
                double const scale = s.scale.evaluate(ctx);
                auto b = scaled_bounds(s.lo, s.hi, s.scale, ctx);
                n.kind = NodeKind::Int;
                n.lo = static_cast<double>(b.lo);
                n.hi = static_cast<double>(b.hi);
                n.int_value = scaled_round(rng.uniform_real(lo, hi), scale);
                return n;
            }
            n.kind = NodeKind::Real;
            n.lo = lo;
            n.hi = hi;
            n.lo_open = s.lo_open;
            n.hi_open = s.hi_open;
            for (;;) {
                double v = rng.uniform_real(lo, hi);
                if ((s.lo_open && v <= lo) || (s.hi_open && v >= hi) || v > hi) { continue; }
                n.real_value = v;
                break;
            }
            return n;
        }
        }
        return n;
    }
};

Sampler::Sampler(Grammar g, SamplingMode mode, TierRegistry const& reg)
    : impl_(std::make_unique<Impl>())
{
    impl_->grammar = std::move(g);
    impl_->mode = mode;
    impl_->table = mode == SamplingMode::Naive ? naive_weights(impl_->grammar) : marginal_weights(impl_->grammar, reg);
    for (auto const& p : impl_->grammar.productions()) { impl_->compile(p.alternatives, &p, p.name); }
}

Sampler::~Sampler() = default;

DerivationTree Sampler::sample(DatasetContext const& ctx, std::uint64_t seed) const
{
    Rng rng(seed);
    return sample(ctx, rng);
}

DerivationTree Sampler::sample(DatasetContext const& ctx, Rng& rng) const
{
    check_context(ctx);
    if (impl_->grammar.productions().empty()) { throw Error("empty grammar"); }
    return impl_->production(0, ctx, rng, 0);
}

DerivationNode Sampler::sample_production(std::string_view name, DatasetContext const& ctx, Rng& rng) const
{
    check_context(ctx);
    auto i = impl_->grammar.index_of(name);
    if (i == Grammar::npos) { throw Error("no production <" + std::string(name) + ">"); }
    return impl_->production(i, ctx, rng, 0);
}

DerivationNode Sampler::sample_symbol(Symbol const& s, DatasetContext const& ctx, Rng& rng) const
{
    check_context(ctx);
    return impl_->symbol(s, ctx, rng, 0);
}

Grammar const& Sampler::grammar() const noexcept { return impl_->grammar; }
WeightTable const& Sampler::weights() const noexcept { return impl_->table; }
SamplingMode Sampler::mode() const noexcept { return impl_->mode; }

DerivationTree sample_tree(Grammar const& g, DatasetContext const& ctx, SamplingMode mode, std::uint64_t seed)
{
    return Sampler(g, mode).sample(ctx, seed);
}

namespace {
AlgorithmRecord const* marker_of(DerivationNode const& n, TierRegistry const& reg)
{
    if (n.kind == NodeKind::Token) { return reg.by_token(n.label); }
    if (n.kind == NodeKind::NonTerminal) { return reg.by_nonterminal(n.label); }
    return nullptr;
}
} // namespace

Headlines tree_headlines(DerivationTree const& t, TierRegistry const& reg)
{
    Headlines h;
    walk(t, [&](DerivationNode const& n, int) {
        auto const* r = marker_of(n, reg);
        if (r == nullptr) { return; }
        auto& slot = r->level == Level::Mlc ? h.mlc : h.slc;
        if (!slot) { slot = r->id; }
    });
    return h;
}

std::set<std::string> tree_algorithms(DerivationTree const& t, TierRegistry const& reg)
{
    std::set<std::string> out;
    walk(t, [&](DerivationNode const& n, int) {
        if (auto const* r = marker_of(n, reg)) { out.insert(r->id); }
    });
    return out;
}

} // namespace mlcspace
