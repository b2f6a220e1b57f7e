// SPDX-License-Identifier: Apache-2.0
#include "mlcspace/mlcspace.h"

#include <array>
#include <cstring>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "core/codec.hpp"
#include "core/constraints.hpp"
#include "core/error.hpp"
#include "core/evolution.hpp"
#include "core/sampling.hpp"
#include "core/stats.hpp"
#include "core/tiering.hpp"

using namespace mlcspace;
using nlohmann::json;

struct mlcs_grammar {
    Grammar grammar;
    mutable std::mutex mutex;
    mutable std::array<std::unique_ptr<Sampler>, 2> samplers;

    Sampler const& sampler(mlcs_mode mode) const
    {
        std::lock_guard lock(mutex);
        auto& s = samplers[mode == MLCS_MODE_NAIVE ? 0 : 1];
        if (!s) {
            s = std::make_unique<Sampler>(grammar, mode == MLCS_MODE_NAIVE ? SamplingMode::Naive
                                                                          : SamplingMode::UniformMarginal);
        }
        return *s;
    }
};

struct mlcs_config {
    Configuration config;
};

namespace {

thread_local std::string last_error;

char* dup(std::string const& s)
{
    auto* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (p == nullptr) { throw std::bad_alloc(); }
    std::memcpy(p, s.data(), s.size() + 1);
    return p;
}

// Runs f, mapping exceptions to status codes.
template <typename F>
mlcs_status guarded(F&& f)
{
    last_error.clear();
    try {
        f();
        return MLCS_OK;
    } catch (SyntaxError const& e) {
        last_error = e.what();
        return MLCS_ERR_SYNTAX;
    } catch (DuplicateProduction const& e) {
        last_error = e.what();
        return MLCS_ERR_DUPLICATE;
    } catch (ContextError const& e) {
        last_error = e.what();
        return MLCS_ERR_CONTEXT;
    } catch (EmptyTier const& e) {
        last_error = e.what();
        return MLCS_ERR_EMPTY_TIER;
    } catch (UnknownShape const& e) {
        last_error = e.what();
        return MLCS_ERR_UNKNOWN_SHAPE;
    } catch (UnknownAlgorithm const& e) {
        last_error = e.what();
        return MLCS_ERR_UNKNOWN_ALGORITHM;
    } catch (SchemaError const& e) {
        last_error = e.what();
        return MLCS_ERR_SCHEMA;
    } catch (InvalidConfiguration const& e) {
        last_error = e.what();
        return MLCS_ERR_INVALID_CONFIGURATION;
    } catch (std::invalid_argument const& e) {
        last_error = e.what();
        return MLCS_ERR_INVALID_ARGUMENT;
    } catch (std::exception const& e) {
        last_error = e.what();
        return MLCS_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return MLCS_ERR_INTERNAL;
    }
}

void require(bool ok, char const* what)
{
    if (!ok) { throw std::invalid_argument(what); }
}

DatasetContext context(mlcs_context c)
{
    DatasetContext ctx {c.labels, c.attributes};
    check_context(ctx);
    return ctx;
}

json findings_json(std::vector<Finding> const& fs)
{
    json a = json::array();
    for (auto const& f : fs) { a.push_back({{"code", f.code}, {"message", f.message}, {"rule", f.rule}}); }
    return a;
}

json frequency_json(std::map<std::string, std::int64_t> const& counts, std::int64_t total)
{
    json o = json::object();
    for (auto const& [id, n] : counts) {
        o[id] = {{"count", n}, {"frequency", total == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(total)}};
    }
    return o;
}

json chi_json(ChiSquare const& c)
{
    return {{"statistic", c.statistic}, {"degrees_of_freedom", c.degrees_of_freedom}, {"p_value", c.p_value}};
}

} // namespace

extern "C" {

const char* mlcs_version(void) { return MLCSPACE_VERSION; }

const char* mlcs_last_error(void) { return last_error.c_str(); }

const char* mlcs_status_name(mlcs_status s)
{
    switch (s) {
    case MLCS_OK: return "ok";
    case MLCS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MLCS_ERR_SYNTAX: return "syntax error";
    case MLCS_ERR_DUPLICATE: return "duplicate production";
    case MLCS_ERR_CONTEXT: return "invalid dataset context";
    case MLCS_ERR_EMPTY_TIER: return "empty tier";
    case MLCS_ERR_UNKNOWN_SHAPE: return "unknown derivation shape";
    case MLCS_ERR_UNKNOWN_ALGORITHM: return "unknown algorithm";
    case MLCS_ERR_SCHEMA: return "schema error";
    case MLCS_ERR_INVALID_CONFIGURATION: return "invalid configuration";
    case MLCS_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void mlcs_string_free(char* s) { std::free(s); }

mlcs_status mlcs_grammar_bundled(mlcs_tier tier, mlcs_grammar** out)
{
    return guarded([&] {
        require(out != nullptr, "out is NULL");
        require(tier >= MLCS_TIER_SMALL && tier <= MLCS_TIER_LARGE, "unknown tier");
        auto g = std::make_unique<mlcs_grammar>();
        g->grammar = bundled_grammar(static_cast<Tier>(tier));
        *out = g.release();
    });
}

mlcs_status mlcs_grammar_parse(const char* text, size_t len, mlcs_grammar** out)
{
    return guarded([&] {
        require(out != nullptr && (text != nullptr || len == 0), "NULL argument");
        auto g = std::make_unique<mlcs_grammar>();
        g->grammar = parse_grammar(std::string_view(text == nullptr ? "" : text, len));
        *out = g.release();
    });
}

void mlcs_grammar_free(mlcs_grammar* g) { delete g; }

mlcs_status mlcs_grammar_print(const mlcs_grammar* g, char** out)
{
    return guarded([&] {
        require(g != nullptr && out != nullptr, "NULL argument");
        *out = dup(print_grammar(g->grammar));
    });
}

mlcs_status mlcs_grammar_stats(const mlcs_grammar* g, char** out_json)
{
    return guarded([&] {
        require(g != nullptr && out_json != nullptr, "NULL argument");
        auto s = grammar_stats(g->grammar);
        json j {{"rules", s.rule_count},
                {"nonterminals", s.nonterminal_count},
                {"terminals", s.terminal_count},
                {"terminal_occurrences", s.terminal_occurrences},
                {"numeric_leaves", s.numeric_leaf_count},
                {"unresolved", unresolved_references(g->grammar)},
                {"supplemented", supplemented_productions(g->grammar)}};
        *out_json = dup(j.dump());
    });
}

mlcs_status mlcs_sample(const mlcs_grammar* g, mlcs_context ctx, mlcs_mode mode, uint64_t seed, mlcs_format format,
                        char** out)
{
    return guarded([&] {
        require(g != nullptr && out != nullptr, "NULL argument");
        auto tree = g->sampler(mode).sample(context(ctx), seed);
        switch (format) {
        case MLCS_FORMAT_TREE: *out = dup(print_tree(tree)); return;
        case MLCS_FORMAT_JSON: *out = dup(to_json(lower(tree))); return;
        case MLCS_FORMAT_MEKA: *out = dup(to_meka_command(lower(tree))); return;
        }
        throw std::invalid_argument("unknown format");
    });
}

mlcs_status mlcs_sample_config(const mlcs_grammar* g, mlcs_context ctx, mlcs_mode mode, uint64_t seed,
                               mlcs_config** out)
{
    return guarded([&] {
        require(g != nullptr && out != nullptr, "NULL argument");
        auto c = std::make_unique<mlcs_config>();
        c->config = lower(g->sampler(mode).sample(context(ctx), seed));
        *out = c.release();
    });
}

mlcs_status mlcs_config_from_json(const char* text, size_t len, mlcs_config** out)
{
    return guarded([&] {
        require(out != nullptr && text != nullptr, "NULL argument");
        auto c = std::make_unique<mlcs_config>();
        c->config = from_json(std::string_view(text, len));
        *out = c.release();
    });
}

mlcs_status mlcs_config_from_meka(const char* command, size_t len, mlcs_config** out)
{
    return guarded([&] {
        require(out != nullptr && command != nullptr, "NULL argument");
        auto c = std::make_unique<mlcs_config>();
        c->config = from_meka_command(std::string_view(command, len));
        *out = c.release();
    });
}

void mlcs_config_free(mlcs_config* c) { delete c; }

mlcs_status mlcs_config_to_json(const mlcs_config* c, int indent, char** out)
{
    return guarded([&] {
        require(c != nullptr && out != nullptr, "NULL argument");
        *out = dup(to_json(c->config, indent));
    });
}

mlcs_status mlcs_config_to_meka(const mlcs_config* c, const char* name_remap, char** out)
{
    return guarded([&] {
        require(c != nullptr && out != nullptr, "NULL argument");
        if (name_remap == nullptr) {
            *out = dup(to_meka_command(c->config));
        } else {
            *out = dup(to_meka_command(c->config, NameTable::with_remap(name_remap)));
        }
    });
}

mlcs_status mlcs_validate(const mlcs_config* c, const mlcs_context* ctx, char** report_json, int* hard_count)
{
    return guarded([&] {
        require(c != nullptr, "NULL argument");
        auto r = ctx == nullptr ? validate_without_context(c->config) : validate(c->config, context(*ctx));
        if (hard_count != nullptr) { *hard_count = static_cast<int>(r.violations.size()); }
        if (report_json != nullptr) {
            json j {{"verdict", r.valid() ? "valid" : "invalid"},
                    {"violations", findings_json(r.violations)},
                    {"warnings", findings_json(r.warnings)}};
            *report_json = dup(j.dump());
        }
    });
}

mlcs_status mlcs_stats(const mlcs_grammar* g, mlcs_context ctx, mlcs_mode mode, int64_t n, uint64_t seed,
                       unsigned threads, char** out_json)
{
    return guarded([&] {
        require(g != nullptr && out_json != nullptr, "NULL argument");
        require(n > 0, "n must be positive");
        auto const& sampler = g->sampler(mode);
        auto f = empirical_frequencies(sampler, context(ctx), n, seed, threads);
        auto const& reg = TierRegistry::bundled();
        std::size_t mlc_ids = 0;
        std::size_t slc_ids = 0;
        for (auto const& id : reachable_algorithms(g->grammar)) {
            (reg.at(id).level == Level::Mlc ? mlc_ids : slc_ids) += 1;
        }
        json j {{"n", f.n},
                {"mode", std::string(to_string(sampler.mode()))},
                {"mlc", frequency_json(f.mlc, f.n)},
                {"mlc_expected", mlc_ids == 0 ? 0.0 : 1.0 / static_cast<double>(mlc_ids)},
                {"mlc_chi_square", chi_json(chi_square_uniform(f.mlc, mlc_ids))},
                {"slc_samples", f.slc_samples},
                {"slc", frequency_json(f.slc, f.slc_samples)},
                {"slc_expected", slc_ids == 0 ? 0.0 : 1.0 / static_cast<double>(slc_ids)},
                {"slc_chi_square", chi_json(chi_square_uniform(f.slc, slc_ids))}};
        *out_json = dup(j.dump());
    });
}

void mlcs_search_options_default(mlcs_search_options* o)
{
    if (o == nullptr) { return; }
    SearchParams const p;
    o->budget = 2000;
    o->seed = 1;
    o->landscape_seed = 1;
    o->population_size = p.population_size;
    o->generations = p.generations;
    o->tournament_size = p.tournament_size;
    o->crossover_rate = p.crossover_rate;
    o->mutation_rate = p.mutation_rate;
    o->elitism = p.elitism;
    o->threads = 0;
    o->random_baseline = 0;
}

mlcs_status mlcs_search(const mlcs_grammar* g, mlcs_context ctx, mlcs_mode mode, const mlcs_search_options* options,
                        char** out_json)
{
    return guarded([&] {
        require(g != nullptr && options != nullptr && out_json != nullptr, "NULL argument");
        auto const& sampler = g->sampler(mode);
        auto const dctx = context(ctx);
        auto const evaluator = surrogate_evaluator(options->landscape_seed);
        SearchResult r;
        if (options->random_baseline != 0) {
            r = random_search(sampler, dctx, evaluator, options->budget, options->seed, options->threads);
        } else {
            SearchParams p;
            p.population_size = options->population_size;
            p.generations = options->generations;
            p.tournament_size = options->tournament_size;
            p.crossover_rate = options->crossover_rate;
            p.mutation_rate = options->mutation_rate;
            p.elitism = options->elitism;
            p.threads = options->threads;
            r = run_search(sampler, dctx, evaluator, options->budget, p, options->seed);
        }
        json gens = json::array();
        for (auto const& s : r.generations) {
            gens.push_back({{"generation", s.generation}, {"best", s.best}, {"mean", s.mean},
                            {"evaluations", s.evaluations}});
        }
        json j {{"best", json::parse(to_json(r.best))},
                {"best_fitness", r.best_fitness},
                {"evaluations", r.evaluations},
                {"generations", std::move(gens)}};
        *out_json = dup(j.dump());
    });
}

} // extern "C"
