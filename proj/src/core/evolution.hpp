// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/config_model.hpp"
#include "core/sampling.hpp"

namespace mlcspace {

// Fitness in [0, 1], higher is better. Must be deterministic and safe to call concurrently.
using Evaluator = std::function<double(Configuration const&, DatasetContext const&)>;

inline constexpr int kRepairRetries = 20;

struct SearchParams {
    int population_size {50};
    int generations {40};
    int tournament_size {2};
    double crossover_rate {0.9};
    double mutation_rate {0.1};
    int elitism {1};
    unsigned threads {0}; // 0: MLCSPACE_THREADS or hardware concurrency

    void check() const; // throws std::invalid_argument
};

struct GenerationStats {
    int generation {0};
    double best {0};
    double mean {0};
    std::int64_t evaluations {0}; // cumulative unique evaluations
};

struct SearchResult {
    Configuration best;
    DerivationTree best_tree;
    double best_fitness {0};
    std::int64_t evaluations {0};
    std::vector<GenerationStats> generations;
};

// One line per generation: "generation=3 best=0.81 mean=0.62 evaluations=200"
std::string trace_line(GenerationStats const& g);

// True when the tree lowers and has no hard violations.
bool tree_is_valid(DerivationTree const& t, DatasetContext const& ctx);

// Regrows one uniformly chosen non-token node. Offspring that fail validation are regrown again,
// up to kRepairRetries times; after that the parent comes back unchanged.
DerivationTree mutate(DerivationTree const& t, Sampler const& sampler, DatasetContext const& ctx, std::uint64_t seed);
DerivationTree mutate(DerivationTree const& t, Grammar const& g, DatasetContext const& ctx, SamplingMode mode,
                      std::uint64_t seed);

// Swaps one subtree of a nonterminal label common to both parents.
std::pair<DerivationTree, DerivationTree> crossover(DerivationTree const& a, DerivationTree const& b, std::uint64_t seed);

// Synthetic landscape: the headline pair picks a base in [0.2, 0.8]; every numeric parameter adds
// at most kSurrogateAmplitude in either direction, depending smoothly on its position in its domain.
inline constexpr double kSurrogateAmplitude = 0.025;
double surrogate_fitness(Configuration const& c, DatasetContext const& ctx, std::uint64_t landscape_seed);
Evaluator surrogate_evaluator(std::uint64_t landscape_seed);

using TraceSink = std::function<void(GenerationStats const&)>;

SearchResult run_search(Sampler const& sampler, DatasetContext const& ctx, Evaluator const& evaluate,
                        std::int64_t budget, SearchParams const& params, std::uint64_t seed,
                        TraceSink const& trace = {});

SearchResult random_search(Sampler const& sampler, DatasetContext const& ctx, Evaluator const& evaluate,
                           std::int64_t budget, std::uint64_t seed, unsigned threads = 0,
                           TraceSink const& trace = {});

} // namespace mlcspace
