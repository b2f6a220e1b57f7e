// SPDX-License-Identifier: Apache-2.0
#include "core/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "core/codec.hpp"
#include "core/constraints.hpp"
#include "core/error.hpp"
#include "core/numfmt.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace mlcspace {

void SearchParams::check() const
{
    if (population_size < 1 || generations < 0 || tournament_size < 1 || elitism < 0) {
        throw std::invalid_argument("search sizes must be positive");
    }
    if (elitism >= population_size) { throw std::invalid_argument("elitism must be below the population size"); }
    if (!(crossover_rate >= 0 && crossover_rate <= 1) || !(mutation_rate >= 0 && mutation_rate <= 1)) {
        throw std::invalid_argument("rates must lie in [0, 1]");
    }
}

std::string trace_line(GenerationStats const& g)
{
    return "generation=" + std::to_string(g.generation) + " best=" + format_real(g.best) +
           " mean=" + format_real(g.mean) + " evaluations=" + std::to_string(g.evaluations);
}

bool tree_is_valid(DerivationTree const& t, DatasetContext const& ctx)
{
    try {
        return validate(lower(t), ctx).valid();
    } catch (Error const&) {
        return false;
    }
}

// ---------------------------------------------------------------------------
// operators

namespace {

struct Site {
    DerivationNode* node;
    Symbol const* symbol; // nullptr for nonterminal nodes, which regrow from their production
};

void collect_sites(DerivationNode& n, Symbol const* sym, Grammar const& g, std::vector<Site>& out)
{
    if (n.kind == NodeKind::Token) { return; }
    out.push_back({&n, n.kind == NodeKind::NonTerminal ? nullptr : sym});
    std::vector<Symbol> const* body = nullptr;
    if (n.kind == NodeKind::NonTerminal) {
        auto const* p = g.find(n.label);
        if (p == nullptr || n.alternative < 0) { return; }
        body = &p->alternatives[static_cast<std::size_t>(n.alternative)].symbols;
    } else if ((n.kind == NodeKind::Group || n.kind == NodeKind::Optional) && sym != nullptr && n.alternative >= 0) {
        body = &sym->alternatives[static_cast<std::size_t>(n.alternative)].symbols;
    }
    if (body == nullptr) { return; }
    for (std::size_t i = 0; i < n.children.size() && i < body->size(); ++i) {
        collect_sites(n.children[i], &(*body)[i], g, out);
    }
}

} // namespace

DerivationTree mutate(DerivationTree const& t, Sampler const& sampler, DatasetContext const& ctx, std::uint64_t seed)
{
    Rng rng(seed);
    bool const parent_valid = tree_is_valid(t, ctx);
    for (int attempt = 0; attempt < kRepairRetries; ++attempt) {
        DerivationTree child = t;
        std::vector<Site> sites;
        collect_sites(child, nullptr, sampler.grammar(), sites);
        if (sites.empty()) { return t; }
        auto const& site = sites[rng.below(sites.size())];
        *site.node = site.symbol == nullptr ? sampler.sample_production(site.node->label, ctx, rng)
                                            : sampler.sample_symbol(*site.symbol, ctx, rng);
        // trees that never lowered (custom grammars) are not held to validation
        if (!parent_valid || tree_is_valid(child, ctx)) { return child; }
    }
    return t;
}

DerivationTree mutate(DerivationTree const& t, Grammar const& g, DatasetContext const& ctx, SamplingMode mode,
                      std::uint64_t seed)
{
    return mutate(t, Sampler(g, mode), ctx, seed);
}

std::pair<DerivationTree, DerivationTree> crossover(DerivationTree const& a, DerivationTree const& b, std::uint64_t seed)
{
    std::pair<DerivationTree, DerivationTree> out {a, b};
    auto by_label = [](DerivationTree& t) {
        std::map<std::string, std::vector<DerivationNode*>> m;
        walk(t, [&](DerivationNode& n, int) {
            if (n.kind == NodeKind::NonTerminal) { m[n.label].push_back(&n); }
        });
        return m;
    };
    auto la = by_label(out.first);
    auto lb = by_label(out.second);
    std::vector<std::string> common;
    for (auto const& [label, nodes] : la) {
        if (lb.count(label) != 0) { common.push_back(label); }
    }
    if (common.empty()) { return out; }
    Rng rng(seed);
    auto const& label = common[rng.below(common.size())];
    auto& na = la[label];
    auto& nb = lb[label];
    auto* x = na[rng.below(na.size())];
    auto* y = nb[rng.below(nb.size())];
    std::swap(*x, *y);
    return out;
}

// ---------------------------------------------------------------------------
// surrogate

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL)
{
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t mix(std::uint64_t x) { return splitmix64(x); }

double unit(std::uint64_t h) { return static_cast<double>(mix(h) >> 11U) * 0x1.0p-53; }

// position of a value within its spec's domain, in [0, 1]
double position(ParamSpec const& s, Value const& v, DatasetContext const& ctx)
{
    double x = 0;
    if (auto const* i = std::get_if<std::int64_t>(&v)) {
        x = static_cast<double>(*i);
    } else if (auto const* d = std::get_if<double>(&v)) {
        x = *d;
    } else {
        return 0;
    }
    double lo = 0;
    double hi = 0;
    if (!s.choices.empty()) {
        auto it = std::find(s.choices.begin(), s.choices.end(), static_cast<std::int64_t>(x));
        if (s.choices.size() < 2 || it == s.choices.end()) { return 0; }
        return static_cast<double>(it - s.choices.begin()) / static_cast<double>(s.choices.size() - 1);
    }
    if (s.kind == ParamSpec::Kind::Int) {
        auto b = s.scaled ? scaled_bounds(s.lo, s.hi, s.scale, ctx) : int_bounds(s.lo, s.hi, ctx);
        lo = static_cast<double>(b.lo);
        hi = static_cast<double>(b.hi);
    } else {
        lo = s.lo.evaluate(ctx);
        hi = s.hi.evaluate(ctx);
    }
    if (!(hi > lo)) { return 0; }
    return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

} // namespace

double surrogate_fitness(Configuration const& c, DatasetContext const& ctx, std::uint64_t landscape_seed)
{
    auto const h = config_headlines(c);
    auto const pair = h.mlc + "|" + h.slc.value_or("none");
    double f = 0.2 + 0.6 * unit(fnv1a(pair) ^ landscape_seed);
    auto add = [&](Algorithm const& a) {
        for (auto const& p : a.params) {
            auto const* s = find_spec(a.id, p.name);
            if (s == nullptr || s->kind == ParamSpec::Kind::Flag || s->kind == ParamSpec::Kind::Categorical) {
                continue;
            }
            auto const key = fnv1a(a.id + "." + p.name) ^ landscape_seed;
            double const freq = 1.0 + static_cast<double>(mix(key) % 3);
            double const phase = 2 * std::numbers::pi * unit(key + 1);
            f += kSurrogateAmplitude * std::sin(2 * std::numbers::pi * freq * position(*s, p.value, ctx) + phase);
        }
    };
    if (c.meta) { add(*c.meta); }
    add(c.core.algorithm);
    if (c.core.slc) {
        if (c.core.slc->meta) { add(*c.core.slc->meta); }
        if (c.core.slc->asc) { add(*c.core.slc->asc); }
        add(c.core.slc->base);
    }
    return std::clamp(f, 0.0, 1.0);
}

Evaluator surrogate_evaluator(std::uint64_t landscape_seed)
{
    return [landscape_seed](Configuration const& c, DatasetContext const& ctx) {
        return surrogate_fitness(c, ctx, landscape_seed);
    };
}

// ---------------------------------------------------------------------------
// search

namespace {

struct Individual {
    DerivationTree tree;
    Configuration config;
    std::string key;
    double fitness {0};
    std::int64_t index {-1}; // evaluation that first produced this fitness
};

bool better(Individual const& a, Individual const& b)
{
    return a.fitness > b.fitness || (a.fitness == b.fitness && a.index < b.index);
}

class Memo {
public:
    Memo(Evaluator const& evaluate, DatasetContext const& ctx, std::int64_t budget, unsigned threads)
        : evaluate_(evaluate), ctx_(ctx), budget_(budget), threads_(threads) { }

    // Scores the batch in order; unseen configurations cost one evaluation each. The batch is cut
    // at the first individual the remaining budget cannot pay for.
    void score(std::vector<Individual>& batch)
    {
        std::vector<std::size_t> fresh;
        std::unordered_map<std::string, std::size_t> pending;
        std::size_t keep = batch.size();
        for (std::size_t i = 0; i < batch.size(); ++i) {
            auto& ind = batch[i];
            ind.key = to_json(ind.config);
            if (seen_.count(ind.key) != 0 || pending.count(ind.key) != 0) { continue; }
            if (used_ + static_cast<std::int64_t>(fresh.size()) >= budget_) {
                keep = i;
                break;
            }
            pending.emplace(ind.key, fresh.size());
            fresh.push_back(i);
        }
        batch.resize(keep);
        std::vector<double> values(fresh.size());
        parallel_for(fresh.size(), threads_, [&](std::size_t k) {
            values[k] = std::clamp(evaluate_(batch[fresh[k]].config, ctx_), 0.0, 1.0);
        });
        for (std::size_t k = 0; k < fresh.size(); ++k) {
            seen_.emplace(batch[fresh[k]].key, std::pair {values[k], used_ + static_cast<std::int64_t>(k)});
        }
        used_ += static_cast<std::int64_t>(fresh.size());
        for (auto& ind : batch) {
            auto const& [f, idx] = seen_.at(ind.key);
            ind.fitness = f;
            ind.index = idx;
        }
    }

    [[nodiscard]] std::int64_t used() const { return used_; }
    [[nodiscard]] bool exhausted() const { return used_ >= budget_; }

private:
    Evaluator const& evaluate_;
    DatasetContext ctx_;
    std::int64_t budget_;
    unsigned threads_;
    std::int64_t used_ {0};
    std::unordered_map<std::string, std::pair<double, std::int64_t>> seen_;
};

GenerationStats stats_of(int generation, std::vector<Individual> const& pop, std::int64_t evaluations)
{
    GenerationStats s;
    s.generation = generation;
    s.evaluations = evaluations;
    if (pop.empty()) { return s; }
    double sum = 0;
    s.best = pop.front().fitness;
    for (auto const& ind : pop) {
        s.best = std::max(s.best, ind.fitness);
        sum += ind.fitness;
    }
    s.mean = sum / static_cast<double>(pop.size());
    return s;
}

void keep_best(SearchResult& r, std::vector<Individual> const& pop, Individual const*& best)
{
    for (auto const& ind : pop) {
        if (best == nullptr || better(ind, *best)) { best = &ind; }
    }
    if (best != nullptr) {
        r.best = best->config;
        r.best_tree = best->tree;
        r.best_fitness = best->fitness;
    }
}

} // namespace

SearchResult run_search(Sampler const& sampler, DatasetContext const& ctx, Evaluator const& evaluate,
                        std::int64_t budget, SearchParams const& params, std::uint64_t seed, TraceSink const& trace)
{
    params.check();
    check_context(ctx);
    if (budget < params.population_size) { throw std::invalid_argument("budget must cover the initial population"); }

    Memo memo(evaluate, ctx, budget, params.threads);
    auto const pop_size = static_cast<std::size_t>(params.population_size);
    std::vector<Individual> pop(pop_size);
    parallel_for(pop_size, params.threads, [&](std::size_t i) {
        pop[i].tree = sampler.sample(ctx, derive_seed(seed, i));
        pop[i].config = lower(pop[i].tree);
    });
    memo.score(pop);

    SearchResult result;
    std::vector<Individual> archive; // holds the best individual across generations
    Individual const* best = nullptr;
    auto record = [&](int generation) {
        keep_best(result, pop, best);
        archive = {*best};
        best = &archive.front();
        auto s = stats_of(generation, pop, memo.used());
        result.generations.push_back(s);
        if (trace) { trace(s); }
    };
    record(0);

    Rng rng(derive_seed(seed, 0x9e3779b97f4a7c15ULL));
    auto tournament = [&]() -> Individual const& {
        Individual const* win = &pop[rng.below(pop.size())];
        for (int k = 1; k < params.tournament_size; ++k) {
            auto const& other = pop[rng.below(pop.size())];
            if (better(other, *win)) { win = &other; }
        }
        return *win;
    };

    for (int gen = 1; gen <= params.generations && !memo.exhausted(); ++gen) {
        auto ranked = pop;
        std::stable_sort(ranked.begin(), ranked.end(), better);
        auto const elites = std::min(static_cast<std::size_t>(params.elitism), ranked.size());

        std::vector<Individual> offspring;
        struct Plan {
            DerivationTree tree;
            DerivationTree parent;
            bool mutate;
            std::uint64_t seed;
        };
        std::vector<Plan> plans;
        while (plans.size() + elites < pop_size) {
            auto const& p1 = tournament();
            auto const& p2 = tournament();
            std::vector<std::pair<DerivationTree, DerivationTree>> kids;
            if (rng.bernoulli(params.crossover_rate)) {
                auto [x, y] = crossover(p1.tree, p2.tree, rng.next());
                kids.emplace_back(std::move(x), p1.tree);
                kids.emplace_back(std::move(y), p2.tree);
            } else {
                kids.emplace_back(p1.tree, p1.tree);
                kids.emplace_back(p2.tree, p2.tree);
            }
            for (auto& [kid, parent] : kids) {
                if (plans.size() + elites >= pop_size) { break; }
                bool const m = rng.bernoulli(params.mutation_rate);
                plans.push_back({std::move(kid), std::move(parent), m, rng.next()});
            }
        }
        offspring.resize(plans.size());
        parallel_for(plans.size(), params.threads, [&](std::size_t i) {
            auto& plan = plans[i];
            auto tree = plan.mutate ? mutate(plan.tree, sampler, ctx, plan.seed) : std::move(plan.tree);
            if (!tree_is_valid(tree, ctx)) { tree = plan.parent; }
            offspring[i].tree = std::move(tree);
            offspring[i].config = lower(offspring[i].tree);
        });
        memo.score(offspring);

        std::vector<Individual> next(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(elites));
        for (auto& o : offspring) { next.push_back(std::move(o)); }
        pop = std::move(next);
        record(gen);
    }
    result.evaluations = memo.used();
    return result;
}

SearchResult random_search(Sampler const& sampler, DatasetContext const& ctx, Evaluator const& evaluate,
                           std::int64_t budget, std::uint64_t seed, unsigned threads, TraceSink const& trace)
{
    check_context(ctx);
    if (budget < 1) { throw std::invalid_argument("budget must be positive"); }
    std::vector<Individual> samples(static_cast<std::size_t>(budget));
    parallel_for(samples.size(), threads, [&](std::size_t i) {
        auto& s = samples[i];
        s.tree = sampler.sample(ctx, derive_seed(seed, i));
        s.config = lower(s.tree);
        s.fitness = std::clamp(evaluate(s.config, ctx), 0.0, 1.0);
        s.index = static_cast<std::int64_t>(i);
    });
    SearchResult result;
    Individual const* best = nullptr;
    keep_best(result, samples, best);
    result.evaluations = budget;
    auto s = stats_of(0, samples, budget);
    result.generations.push_back(s);
    if (trace) { trace(s); }
    return result;
}

} // namespace mlcspace
