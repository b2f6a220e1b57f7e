// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "core/config_model.hpp"
#include "core/sampling.hpp"

namespace mlcspace {

// Headline counts over n sampled trees (sample i uses derive_seed(seed, i)).
struct FrequencyTable {
    std::int64_t n {0};
    std::map<std::string, std::int64_t> mlc;
    std::map<std::string, std::int64_t> slc; // over the samples that carry a single-label chain
    std::int64_t slc_samples {0};
};

FrequencyTable empirical_frequencies(Sampler const& sampler, DatasetContext const& ctx, std::int64_t n,
                                     std::uint64_t seed, unsigned threads = 0);

struct ChiSquare {
    double statistic {0};
    int degrees_of_freedom {0};
    double p_value {1};
};

// Goodness of fit against the uniform distribution over `categories` (missing ones count as 0).
ChiSquare chi_square_uniform(std::map<std::string, std::int64_t> const& counts, std::size_t categories);

struct MarkerEstimate {
    std::int64_t n {0};
    std::int64_t hits {0};
    [[nodiscard]] double probability() const { return n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n); }
};

// P(param == target | algorithm chosen): samples the production that holds the algorithm's
// parameters n times and binds them to `algorithm`. An absent parameter reads as its default.
MarkerEstimate estimate_marker(Sampler const& sampler, DatasetContext const& ctx, std::string const& production,
                               std::string const& algorithm, std::string const& param, Value const& target,
                               std::int64_t n, std::uint64_t seed);

} // namespace mlcspace
