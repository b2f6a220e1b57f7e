// SPDX-License-Identifier: Apache-2.0
#include "core/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace mlcspace {

FrequencyTable empirical_frequencies(Sampler const& sampler, DatasetContext const& ctx, std::int64_t n,
                                     std::uint64_t seed, unsigned threads)
{
    check_context(ctx);
    auto const total = static_cast<std::size_t>(std::max<std::int64_t>(n, 0));
    std::vector<Headlines> heads(total);
    parallel_for(total, threads, [&](std::size_t i) { heads[i] = tree_headlines(sampler.sample(ctx, derive_seed(seed, i))); });
    FrequencyTable t;
    t.n = static_cast<std::int64_t>(total);
    for (auto const& h : heads) {
        if (h.mlc) { ++t.mlc[*h.mlc]; }
        if (h.slc) {
            ++t.slc[*h.slc];
            ++t.slc_samples;
        }
    }
    return t;
}

ChiSquare chi_square_uniform(std::map<std::string, std::int64_t> const& counts, std::size_t categories)
{
    ChiSquare r;
    if (categories < 2) { return r; }
    std::int64_t total = 0;
    for (auto const& [k, v] : counts) { total += v; }
    double const expected = static_cast<double>(total) / static_cast<double>(categories);
    if (expected <= 0) { return r; }
    for (auto const& [k, v] : counts) {
        double const d = static_cast<double>(v) - expected;
        r.statistic += d * d / expected;
    }
    // categories never observed
    auto const missing = categories > counts.size() ? categories - counts.size() : 0;
    r.statistic += static_cast<double>(missing) * expected;
    r.degrees_of_freedom = static_cast<int>(categories) - 1;
    r.p_value = boost::math::gamma_q(r.degrees_of_freedom / 2.0, r.statistic / 2.0);
    return r;
}

MarkerEstimate estimate_marker(Sampler const& sampler, DatasetContext const& ctx, std::string const& production,
                               std::string const& algorithm, std::string const& param, Value const& target,
                               std::int64_t n, std::uint64_t seed)
{
    auto const* spec = find_spec(algorithm, param);
    if (spec == nullptr) { throw Error("unknown parameter '" + param + "' of " + algorithm); }
    MarkerEstimate e;
    for (std::int64_t i = 0; i < n; ++i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        auto a = lower_fragment(sampler.sample_production(production, ctx, rng), algorithm);
        auto const* p = a.find(param);
        Value const v = p != nullptr ? p->value : spec->default_value;
        ++e.n;
        if (v == target) { ++e.hits; }
    }
    return e;
}

} // namespace mlcspace
