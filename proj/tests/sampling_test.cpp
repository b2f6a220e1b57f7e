// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "core/config_model.hpp"
#include "core/error.hpp"
#include "core/grammar.hpp"
#include "core/rng.hpp"
#include "core/sampling.hpp"
#include "core/stats.hpp"
#include "core/tiering.hpp"

using namespace mlcspace;

namespace {

DatasetContext const kCtx {6, 20};

Sampler const& large_um()
{
    static Sampler const s(bundled_grammar(Tier::Large), SamplingMode::UniformMarginal);
    return s;
}

int count_type(AlgorithmType t)
{
    int n = 0;
    for (auto const& r : TierRegistry::bundled().algorithms()) { n += r.type == t ? 1 : 0; }
    return n;
}

} // namespace

TEST_CASE("rng streams")
{
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 100; ++i) { CHECK(a() == b()); }
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));

    Rng r(7);
    std::array<int, 5> hist {};
    for (int i = 0; i < 50000; ++i) {
        auto const v = r.uniform_int(-2, 2);
        REQUIRE(v >= -2);
        REQUIRE(v <= 2);
        ++hist[static_cast<std::size_t>(v + 2)];
    }
    for (auto h : hist) { CHECK(std::abs(h - 10000) < 400); }
    double const w[] = {0.0, 3.0, 1.0};
    int ones = 0;
    for (int i = 0; i < 40000; ++i) {
        auto const k = r.weighted(w);
        REQUIRE(k != 0);
        ones += k == 1 ? 1 : 0;
    }
    CHECK(ones / 40000.0 == doctest::Approx(0.75).epsilon(0.02));
}

TEST_CASE("start weights count the headline algorithms behind each branch")
{
    auto const& w = large_um().weights();
    auto const* start = w.weights("Start/0.0");
    REQUIRE(start != nullptr);
    REQUIRE(start->size() == 3);
    CHECK((*start)[0] == count_type(AlgorithmType::ProblemTransformation));
    CHECK((*start)[1] == count_type(AlgorithmType::AlgorithmAdaptation));
    CHECK((*start)[2] == count_type(AlgorithmType::MetaMlc));
    CHECK(std::accumulate(start->begin(), start->end(), 0.0) == 26);
}

TEST_CASE("first markers of the start symbol are the 26 multi-label algorithms")
{
    auto const fm = first_markers(bundled_grammar(Tier::Large));
    REQUIRE(fm.count("Start") == 1);
    CHECK(fm.at("Start").size() == 26);
    for (auto const& id : fm.at("Start")) { CHECK(TierRegistry::bundled().at(id).level == Level::Mlc); }
}

TEST_CASE("naive weights are flat")
{
    auto const w = naive_weights(bundled_grammar(Tier::Large));
    for (auto const& [site, ws] : w.choices) {
        for (auto x : ws) { CHECK(x == 1.0); }
    }
    CHECK(w.inclusion_probability("no such site") == 0.5);
}

TEST_CASE("marginal weights are positive")
{
    for (auto t : {Tier::Small, Tier::Medium, Tier::Large}) {
        auto const w = marginal_weights(bundled_grammar(t));
        for (auto const& [site, ws] : w.choices) {
            for (auto x : ws) { CHECK(x > 0); }
        }
        for (auto const& [site, p] : w.inclusion) {
            CHECK(p > 0);
            CHECK(p < 1);
        }
    }
}

TEST_CASE("sampling is deterministic per seed")
{
    auto const a = large_um().sample(kCtx, 123);
    auto const b = large_um().sample(kCtx, 123);
    CHECK(a == b);
    CHECK(print_tree(a) == print_tree(b));
    CHECK(sample_tree(bundled_grammar(Tier::Large), kCtx, SamplingMode::UniformMarginal, 123) == a);
    int differing = 0;
    for (std::uint64_t s = 0; s < 20; ++s) { differing += large_um().sample(kCtx, s) == a ? 0 : 1; }
    CHECK(differing >= 19);
}

TEST_CASE("leaves stay inside their ranges")
{
    for (DatasetContext ctx : {DatasetContext {2, 1}, DatasetContext {6, 20}, DatasetContext {100, 500}}) {
        for (std::uint64_t seed = 0; seed < 1500; ++seed) {
            auto const t = large_um().sample(ctx, seed);
            bool ok = true;
            walk(t, [&](DerivationNode const& n, int) {
                if (n.kind == NodeKind::Int) {
                    ok = ok && static_cast<double>(n.int_value) >= n.lo && static_cast<double>(n.int_value) <= n.hi;
                }
                if (n.kind == NodeKind::Real) {
                    ok = ok && (n.lo_open ? n.real_value > n.lo : n.real_value >= n.lo);
                    ok = ok && (n.hi_open ? n.real_value < n.hi : n.real_value <= n.hi);
                }
            });
            REQUIRE(ok);
        }
    }
}

TEST_CASE("every sampled tree lowers and carries both headlines when it has a chain")
{
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        auto const t = large_um().sample(kCtx, seed);
        auto const h = tree_headlines(t);
        REQUIRE(h.mlc.has_value());
        auto const c = lower(t);
        auto const ch = config_headlines(c);
        CHECK(ch.mlc == *h.mlc);
        CHECK(ch.slc == h.slc);
    }
}

TEST_CASE("naive mode favours shallow branches")
{
    // three equally likely branches at the start symbol: ML-BPNN is the whole middle one
    Sampler const naive(bundled_grammar(Tier::Large), SamplingMode::Naive);
    auto const f = empirical_frequencies(naive, kCtx, 9000, 5, 1);
    double const bpnn = static_cast<double>(f.mlc.at("ML-BPNN")) / 9000.0;
    CHECK(bpnn == doctest::Approx(1.0 / 3.0).epsilon(0.06));
    auto const um = empirical_frequencies(large_um(), kCtx, 9000, 5, 1);
    CHECK(static_cast<double>(um.mlc.at("ML-BPNN")) / 9000.0 == doctest::Approx(1.0 / 26).epsilon(0.2));
}

TEST_CASE("frequencies do not depend on the thread count")
{
    auto const a = empirical_frequencies(large_um(), kCtx, 3000, 9, 1);
    auto const b = empirical_frequencies(large_um(), kCtx, 3000, 9, 4);
    CHECK(a.mlc == b.mlc);
    CHECK(a.slc == b.slc);
    CHECK(a.slc_samples == b.slc_samples);
}

TEST_CASE("chi-square against closed forms")
{
    // df = 2: survival function exp(-x / 2)
    auto const r = chi_square_uniform({{"a", 10}, {"b", 20}, {"c", 30}}, 3);
    CHECK(r.statistic == doctest::Approx(10.0));
    CHECK(r.degrees_of_freedom == 2);
    CHECK(r.p_value == doctest::Approx(std::exp(-5.0)));
    // a missing category counts as zero
    auto const m = chi_square_uniform({{"a", 5}, {"b", 5}}, 3);
    CHECK(m.statistic == doctest::Approx(2 * (5 - 10 / 3.0) * (5 - 10 / 3.0) / (10 / 3.0) + 10 / 3.0));
    CHECK(chi_square_uniform({{"a", 7}, {"b", 7}}, 2).p_value == doctest::Approx(1.0));
}

TEST_CASE("marker estimates agree with rejection sampling of whole trees")
{
    auto const lwl = estimate_marker(large_um(), kCtx, "LWL", "LWL", "wk", Value {std::int64_t {0}}, 20000, 3);
    auto const mcc = estimate_marker(large_um(), kCtx, "chi_MCC", "MCC", "chi", Value {std::int64_t {0}}, 20000, 3);

    MarkerEstimate lwl_full;
    MarkerEstimate mcc_full;
    for (std::uint64_t seed = 0; seed < 150000 && (lwl_full.n < 3000 || mcc_full.n < 3000); ++seed) {
        auto const c = lower(large_um().sample(kCtx, derive_seed(77, seed)));
        if (c.core.slc && c.core.slc->meta && c.core.slc->meta->id == "LWL") {
            ++lwl_full.n;
            lwl_full.hits += c.core.slc->meta->get_int("wk").value_or(0) == 0 ? 1 : 0;
        }
        if (c.core.algorithm.id == "MCC") {
            ++mcc_full.n;
            mcc_full.hits += c.core.algorithm.get_int("chi").value_or(0) == 0 ? 1 : 0;
        }
    }
    REQUIRE(lwl_full.n >= 1000);
    REQUIRE(mcc_full.n >= 1000);
    auto close = [](MarkerEstimate const& a, MarkerEstimate const& b) {
        double const p = a.probability();
        double const se = std::sqrt(p * (1 - p) / static_cast<double>(a.n) + p * (1 - p) / static_cast<double>(b.n));
        return std::abs(a.probability() - b.probability()) < 4 * se;
    };
    CHECK(close(lwl, lwl_full));
    CHECK(close(mcc, mcc_full));
}

TEST_CASE("fresh subtrees for mutation")
{
    Rng rng(5);
    auto const n = large_um().sample_production("LWL", kCtx, rng);
    CHECK(n.kind == NodeKind::NonTerminal);
    CHECK(n.label == "LWL");
    CHECK_THROWS_AS((void)large_um().sample_production("NoSuch", kCtx, rng), Error);
}

TEST_CASE("modes parse")
{
    CHECK(parse_mode("naive") == SamplingMode::Naive);
    CHECK(parse_mode("uniform-marginal") == SamplingMode::UniformMarginal);
    CHECK_FALSE(parse_mode("uniform").has_value());
    CHECK(to_string(SamplingMode::UniformMarginal) == "uniform-marginal");
}
