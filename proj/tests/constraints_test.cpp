// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <set>
#include <string>

#include "core/constraints.hpp"
#include "core/sampling.hpp"
#include "support.hpp"

using namespace mlcspace;
using namespace mlcspace::testing;

namespace {

std::set<std::string> codes(ValidationReport const& r)
{
    std::set<std::string> out;
    for (auto const& f : r.violations) { out.insert(f.code); }
    for (auto const& f : r.warnings) { out.insert(f.code); }
    return out;
}

Configuration ct(std::int64_t w, std::int64_t d)
{
    return pt_config(alg("CT", {{"w", I(w)}, {"d", I(d)}}), alg("NB"));
}

Configuration pmcc(std::int64_t ps, std::int64_t chi)
{
    return pt_config(alg("PMCC", {{"ps", I(ps)}, {"chi", I(chi)}}), alg("NB"));
}

Configuration slc_meta_over(char const* meta, char const* base)
{
    return with_slc_meta(pt_config(alg("BR"), alg(base)), alg(meta));
}

} // namespace

TEST_CASE("code table")
{
    auto const& t = violation_codes();
    REQUIRE(t.size() == 19);
    CHECK(std::string(t.front().code) == "H0");
    int hard = 0;
    for (auto const& c : t) { hard += c.hard ? 1 : 0; }
    CHECK(hard == 15);
    CHECK(std::string(t.back().code) == "W4");
}

TEST_CASE("a plain configuration is valid")
{
    auto const r = validate(br_nb(), kCtx);
    CHECK(r.valid());
    CHECK(r.verdict() == ValidationReport::Verdict::Valid);
    CHECK(r.warnings.empty());
}

TEST_CASE("H0 structure")
{
    Configuration c;
    c.core.algorithm = alg("BR");
    CHECK(validate(c, kCtx).has("H0"));
    auto bpnn = pt_config(alg("ML-BPNN"), alg("NB"));
    CHECK(validate(bpnn, kCtx).has("H0"));
    bpnn.core.slc.reset();
    CHECK(validate(bpnn, kCtx).valid());
    CHECK(validate(pt_config(alg("NB"), alg("NB")), kCtx).has("H0"));
    CHECK(validate(pt_config(alg("BR"), alg("XYZ")), kCtx).has("H0"));
    CHECK(validate(pt_config(alg("BR"), alg("Bagging")), kCtx).has("H0"));
    CHECK(validate(with_meta(br_nb(), alg("BR")), kCtx).has("H0"));
}

TEST_CASE("H1 PMCC population below chain iterations")
{
    CHECK(validate(pmcc(10, 60), kCtx).valid());
    // ps <= 50 < 51 <= chi by the domains alone, so a violation is always also out of domain
    auto const r = validate(pmcc(50, 50), kCtx);
    CHECK(r.has("H1"));
    CHECK(r.has("H13"));
}

TEST_CASE("H2 trellis density")
{
    DatasetContext const L16 {16, 20};
    auto const r = validate(ct(-1, 6), L16);
    CHECK(r.has("H2"));
    CHECK_FALSE(r.has("H13"));
    CHECK(validate(ct(-1, 5), L16).valid());
    CHECK(validate(ct(0, 2), L16).has("H2"));
    CHECK(validate(ct(0, 1), L16).valid());
    auto cdt = pt_config(alg("CDT", {{"w", I(-1)}, {"d", I(6)}}), alg("NB"));
    CHECK(validate(cdt, L16).has("H2"));
}

TEST_CASE("H3 iterations above collection iterations")
{
    auto ok = pt_config(alg("CDN", {{"i", I(150)}, {"ci", I(50)}}), alg("NB"));
    CHECK(validate(ok, kCtx).valid());
    // i > 100 >= ci by the domains alone
    auto bad = pt_config(alg("CDN", {{"i", I(60)}, {"ci", I(60)}}), alg("NB"));
    auto const r = validate(bad, kCtx);
    CHECK(r.has("H3"));
    CHECK(r.has("H13"));
    CHECK(validate(pt_config(alg("CDT", {{"i", I(40)}, {"ci", I(80)}}), alg("NB")), kCtx).has("H3"));
}

TEST_CASE("H4 naive Bayes options")
{
    CHECK(validate(pt_config(alg("BR"), alg("NB", {{"uke", true}, {"usd", true}})), kCtx).has("H4"));
    CHECK(validate(pt_config(alg("BR"), alg("NB", {{"uke", true}})), kCtx).valid());
    CHECK(validate(pt_config(alg("BR"), alg("NB", {{"usd", true}})), kCtx).valid());
}

TEST_CASE("H5 out-of-bag needs full bags")
{
    auto bag = [](std::int64_t bsp) {
        return with_slc_meta(pt_config(alg("BR"), alg("NB")), alg("Bagging", {{"bsp", I(bsp)}, {"coob", true}}));
    };
    CHECK(validate(bag(90), kCtx).has("H5"));
    CHECK(validate(bag(100), kCtx).valid());
    auto no_oob = with_slc_meta(pt_config(alg("BR"), alg("NB")), alg("Bagging", {{"bsp", I(90)}}));
    CHECK(validate(no_oob, kCtx).valid());
}

TEST_CASE("H6 weighted-instance bases")
{
    for (auto const* base : {"LMT", "OneR", "K*", "SGD", "VP"}) {
        CAPTURE(base);
        CHECK(validate(slc_meta_over("LWL", base), kCtx).has("H6"));
        CHECK(validate(slc_meta_over("AdaM1", base), kCtx).has("H6"));
    }
    CHECK(validate(slc_meta_over("LWL", "NB"), kCtx).valid());
    CHECK(validate(slc_meta_over("AdaM1", "JRip"), kCtx).valid());
}

TEST_CASE("H7 random committee needs randomizable bases")
{
    CHECK(validate(slc_meta_over("RC", "NB"), kCtx).has("H7"));
    for (auto const* base : {"RF", "RandomTree", "REPTree", "SGD", "MLP"}) {
        CAPTURE(base);
        CHECK(validate(slc_meta_over("RC", base), kCtx).valid());
    }
}

TEST_CASE("H8 BCC under bagging or ensembles")
{
    auto const bcc = pt_config(alg("BCC"), alg("NB"));
    for (auto const* m : {"BaggingML", "BaggingMLDup", "EnsembleML"}) {
        CAPTURE(m);
        CHECK(validate(with_meta(bcc, alg(m)), kCtx).has("H8"));
    }
    CHECK(validate(with_meta(bcc, alg("EM")), kCtx).valid());
    CHECK(validate(with_meta(pt_config(alg("CC"), alg("NB")), alg("BaggingML")), kCtx).valid());
}

TEST_CASE("H9 PMCC under EM or CM")
{
    CHECK(validate(with_meta(pmcc(10, 60), alg("EM")), kCtx).has("H9"));
    CHECK(validate(with_meta(pmcc(10, 60), alg("CM")), kCtx).has("H9"));
    auto const r = validate(with_meta(pmcc(10, 60), alg("BaggingML")), kCtx);
    CHECK(r.valid());
    CHECK(codes(r) == std::set<std::string> {"W2"});
}

TEST_CASE("H10 random tree back-fitting folds")
{
    CHECK(validate(pt_config(alg("BR"), alg("RandomTree", {{"nfbgt", I(1)}})), kCtx).has("H10"));
    auto const r = validate(pt_config(alg("BR"), alg("RandomTree", {{"nfbgt", I(1)}})), kCtx);
    CHECK(codes(r) == std::set<std::string> {"H10"});
    CHECK(validate(pt_config(alg("BR"), alg("RandomTree", {{"nfbgt", I(0)}})), kCtx).valid());
    CHECK(validate(pt_config(alg("BR"), alg("RandomTree", {{"nfbgt", I(3)}})), kCtx).valid());
}

TEST_CASE("H11 unpruned C4.5")
{
    CHECK(validate(pt_config(alg("BR"), alg("C4.5", {{"u", true}, {"cf", 0.25}})), kCtx).has("H11"));
    CHECK(validate(pt_config(alg("BR"), alg("C4.5", {{"u", true}, {"sr", true}})), kCtx).has("H11"));
    CHECK(validate(pt_config(alg("BR"), alg("C4.5", {{"u", true}})), kCtx).valid());
    CHECK(validate(pt_config(alg("BR"), alg("C4.5", {{"cf", 0.25}, {"sr", true}})), kCtx).valid());
}

TEST_CASE("H12 PART folds with reduced-error pruning")
{
    CHECK(validate(pt_config(alg("BR"), alg("PART", {{"rep", true}})), kCtx).has("H12"));
    CHECK(validate(pt_config(alg("BR"), alg("PART", {{"nr", I(3)}})), kCtx).has("H12"));
    CHECK(validate(pt_config(alg("BR"), alg("PART", {{"rep", true}, {"nr", I(3)}})), kCtx).valid());
    CHECK(validate(pt_config(alg("BR"), alg("PART")), kCtx).valid());
}

TEST_CASE("H13 domains and ownership")
{
    DatasetContext const L16 {16, 20};
    auto rakel = [](std::int64_t les) {
        return pt_config(alg("RAkEL", {{"les", I(les)}}), alg("NB"));
    };
    CHECK(validate(rakel(9), L16).has("H13"));
    CHECK(validate(rakel(8), L16).valid());

    auto c = br_nb();
    c.threshold = Threshold::real(1.0);
    CHECK(validate(c, kCtx).has("H13"));
    c.threshold = Threshold::real(0.999);
    CHECK(validate(c, kCtx).valid());

    auto foreign = br_nb();
    foreign.core.slc->base.params.push_back({"k", I(3)});
    CHECK(validate(foreign, kCtx).has("H13"));

    auto kind = br_nb();
    kind.core.slc->base.set("uke", I(1));
    CHECK(validate(kind, kCtx).has("H13"));

    // a kernel option that belongs to another kernel
    auto smo = pt_config(alg("BR"), alg("SMO", {{"kernel", std::string("RBFKernel")}, {"om", 0.5}}));
    CHECK(validate(smo, kCtx).has("H13"));
    auto puk = pt_config(alg("BR"), alg("SMO", {{"kernel", std::string("Puk")}, {"om", 0.5}, {"sig", 2.0}}));
    CHECK(validate(puk, kCtx).valid());
}

TEST_CASE("H14 ASC under instance-weighting metas")
{
    for (auto const* m : {"LWL", "AdaM1", "RC"}) {
        CAPTURE(m);
        auto c = slc_meta_over(m, "RF");
        c.core.slc->asc = alg("ASC");
        CHECK(validate(c, kCtx).has("H14"));
    }
    auto c = pt_config(alg("BR"), alg("NB"));
    c.core.slc->asc = alg("ASC");
    CHECK(validate(c, kCtx).valid());
    c = slc_meta_over("Bagging", "NB");
    c.core.slc->asc = alg("ASC");
    CHECK(validate(c, kCtx).valid());
}

TEST_CASE("W1 PCC with many labels")
{
    auto const pcc = pt_config(alg("PCC"), alg("NB"));
    auto const r = validate(pcc, {15, 20});
    CHECK(r.valid());
    CHECK(r.has("W1"));
    CHECK_FALSE(validate(pcc, {14, 20}).has("W1"));
    CHECK_FALSE(validate_without_context(pcc).has("W1"));
}

TEST_CASE("W2 expensive cores under a meta method")
{
    for (auto const* core : {"MCC", "PCC", "CDN", "CDT", "RAkEL", "RAkELd"}) {
        CAPTURE(core);
        auto const r = validate(with_meta(pt_config(alg(core), alg("NB")), alg("BaggingML")), kCtx);
        CHECK(r.valid());
        CHECK(r.has("W2"));
        CHECK_FALSE(validate(pt_config(alg(core), alg("NB")), kCtx).has("W2"));
    }
}

TEST_CASE("W3 collapse on an unpruned tree")
{
    auto const r = validate(pt_config(alg("BR"), alg("C4.5", {{"u", true}, {"ct", true}})), kCtx);
    CHECK(r.valid());
    CHECK(r.has("W3"));
    CHECK_FALSE(validate(pt_config(alg("BR"), alg("C4.5", {{"ct", true}})), kCtx).has("W3"));
}

TEST_CASE("W4 ensemble bag size")
{
    auto ens = [](std::int64_t bsp) {
        return with_meta(pt_config(alg("BR"), alg("NB")), alg("EnsembleML", {{"bsp", I(bsp)}}));
    };
    CHECK(validate(ens(80), kCtx).valid());
    CHECK(validate(ens(80), kCtx).has("W4"));
    CHECK_FALSE(validate(ens(60), kCtx).has("W4"));
    CHECK(validate(ens(5), kCtx).has("H13"));
}

TEST_CASE("findings are sorted by code and carry the rule")
{
    auto c = with_meta(pt_config(alg("BCC"), alg("NB", {{"uke", true}, {"usd", true}})), alg("BaggingML"));
    c.threshold = Threshold::real(2.0);
    auto const r = validate(c, kCtx);
    REQUIRE(r.violations.size() == 3);
    CHECK(r.violations[0].code == "H4");
    CHECK(r.violations[1].code == "H8");
    CHECK(r.violations[2].code == "H13");
    for (auto const& f : r.violations) {
        CHECK_FALSE(f.message.empty());
        CHECK_FALSE(f.rule.empty());
    }
}

TEST_CASE("validation without a context skips context bounds only")
{
    auto big = pt_config(alg("RAkEL", {{"les", I(40)}}), alg("NB"));
    CHECK(validate_without_context(big).valid());
    CHECK_FALSE(validate(big, kCtx).valid());
    CHECK(validate_without_context(pt_config(alg("BR"), alg("NB", {{"uke", true}, {"usd", true}}))).has("H4"));
    CHECK(validate_without_context(with_meta(pmcc(10, 60), alg("EM"))).has("H9"));
}

TEST_CASE("sampled configurations never break hard rules")
{
    for (auto t : {Tier::Small, Tier::Medium, Tier::Large}) {
        for (auto m : {SamplingMode::Naive, SamplingMode::UniformMarginal}) {
            Sampler const s(bundled_grammar(t), m);
            for (DatasetContext ctx : {DatasetContext {2, 1}, DatasetContext {16, 20}}) {
                for (std::uint64_t seed = 0; seed < 1000; ++seed) {
                    auto const r = validate(lower(s.sample(ctx, seed)), ctx);
                    if (!r.valid()) {
                        FAIL_CHECK(to_string(t) << " seed " << seed << ": " << r.violations.front().message);
                        break;
                    }
                }
            }
        }
    }
}
