// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "core/config_model.hpp"
#include "core/error.hpp"
#include "core/grammar.hpp"
#include "core/sampling.hpp"
#include "core/tiering.hpp"
#include "support.hpp"

using namespace mlcspace;
using namespace mlcspace::testing;

namespace {

struct CatalogEntry {
    std::string abbreviation;
    std::string flag;
};

std::map<std::string, std::vector<CatalogEntry>> load_catalog()
{
    std::map<std::string, std::vector<CatalogEntry>> out;
    std::istringstream in(read_text(MLCS_TEST_DATA "/param_catalog.tsv"));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') { continue; }
        std::istringstream f(line);
        std::string alg;
        CatalogEntry e;
        std::getline(f, alg, '\t');
        std::getline(f, e.abbreviation, '\t');
        std::getline(f, e.flag, '\t');
        out[alg].push_back(e);
    }
    return out;
}

void flatten(std::vector<ParamSpec> const& specs, std::vector<ParamSpec const*>& out)
{
    for (auto const& s : specs) {
        out.push_back(&s);
        flatten(s.sub, out);
    }
}

std::string lower_case(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return s;
}

// registry spellings that differ from the abbreviations in the descriptions
std::string registry_name(std::string const& alg, std::string const& abbreviation)
{
    if (abbreviation == "lrt") { return "lr"; }
    if (alg == "SMO" && abbreviation == "k") { return "kernel"; }
    return abbreviation;
}

} // namespace

TEST_CASE("option letters match the catalog")
{
    auto const catalog = load_catalog();
    REQUIRE(catalog.size() > 40);
    int audited = 0;
    for (auto const& rec : TierRegistry::bundled().algorithms()) {
        CAPTURE(rec.id);
        std::vector<ParamSpec const*> specs;
        flatten(describe(rec.id), specs);
        std::multiset<std::string> registry_flags;
        for (auto const* s : specs) {
            if (!s->cli_flag.empty()) { registry_flags.insert(s->cli_flag); }
        }
        auto const it = catalog.find(rec.id);
        if (it == catalog.end()) {
            CHECK(registry_flags.empty());
            continue;
        }
        std::multiset<std::string> catalog_flags;
        for (auto const& e : it->second) {
            catalog_flags.insert(e.flag);
            auto const* spec = find_spec(rec.id, registry_name(rec.id, e.abbreviation));
            REQUIRE_MESSAGE(spec != nullptr, e.abbreviation);
            CHECK(spec->cli_flag == e.flag);
        }
        CHECK(registry_flags == catalog_flags);
        ++audited;
    }
    CHECK(audited >= 20);
}

TEST_CASE("declared hyper-parameter counts match the algorithm table")
{
    for (auto const& rec : TierRegistry::bundled().algorithms()) {
        CAPTURE(rec.id);
        auto const n = declared_hp_count(describe(rec.id));
        if (rec.id == "RSS") {
            // the table says 3; the description and the grammar both give two parameters
            CHECK(n == 2);
            CHECK(rec.hp_count == 3);
        } else {
            CHECK(n == rec.hp_count);
        }
    }
}

TEST_CASE("unknown algorithms and parameters")
{
    CHECK_THROWS_AS((void)describe("XYZ"), UnknownAlgorithm);
    CHECK(find_spec("BR", "pv") == nullptr);
    CHECK(find_spec("SMO", "g") != nullptr);
    CHECK(spec_order("RAkEL", "pv") < spec_order("RAkEL", "sre"));
    CHECK(spec_order("RAkEL", "zzz") == -1);
}

TEST_CASE("parameters keep registry order")
{
    auto a = alg("RAkEL");
    a.set("sre", I(10));
    a.set("pv", I(2));
    a.set("les", I(3));
    a.set("sv", I(1));
    REQUIRE(a.params.size() == 4);
    CHECK(a.params[0].name == "pv");
    CHECK(a.params[1].name == "sv");
    CHECK(a.params[2].name == "les");
    CHECK(a.params[3].name == "sre");
    a.set("pv", I(4));
    CHECK(a.get_int("pv") == 4);
    CHECK(a.params.size() == 4);
    CHECK_FALSE(a.flag("missing"));
    CHECK(a.get_number("les") == 3.0);
}

TEST_CASE("context-dependent domains")
{
    auto const* les = find_spec("RAkEL", "les");
    auto const* sre = find_spec("RAkEL", "sre");
    auto const* d = find_spec("CT", "d");
    auto const* nhu = find_spec("ML-BPNN", "nhu");
    REQUIRE(les);
    REQUIRE(sre);
    REQUIRE(d);
    REQUIRE(nhu);
    CHECK(check_domain(*les, I(8), {16, 10}).ok);
    CHECK_FALSE(check_domain(*les, I(9), {16, 10}).ok);
    CHECK(check_domain(*les, I(1), {2, 10}).ok);
    CHECK(check_domain(*sre, I(100), {60, 10}).ok);
    CHECK_FALSE(check_domain(*sre, I(101), {60, 10}).ok);
    CHECK_FALSE(check_domain(*sre, I(9), {4, 10}).ok);
    CHECK(check_domain(*d, I(5), {16, 10}).ok);
    CHECK(check_domain(*nhu, I(10), {6, 50}).ok);
    CHECK_FALSE(check_domain(*nhu, I(9), {6, 50}).ok);
    CHECK_FALSE(check_domain(*nhu, I(51), {6, 50}).ok);
    CHECK_FALSE(check_domain(*les, Value {2.0}, {16, 10}).ok);
}

TEST_CASE("value kinds")
{
    CHECK_FALSE(check_domain(*find_spec("NB", "uke"), I(1), kCtx).ok);
    CHECK(check_domain(*find_spec("NB", "uke"), Value {true}, kCtx).ok);
    CHECK(check_domain(*find_spec("MCC", "pof"), Value {std::string("Exact match")}, kCtx).ok);
    CHECK_FALSE(check_domain(*find_spec("MCC", "pof"), Value {std::string("Exact_match")}, kCtx).ok);
    CHECK_FALSE(check_domain(*find_spec("C4.5", "cf"), Value {1.5}, kCtx).ok);
    CHECK(check_domain(*find_spec("C4.5", "cf"), Value {0.25}, kCtx).ok);
}

TEST_CASE("payoff functions")
{
    std::set<std::string> const listed {"accuracy",
                                        "jaccard index",
                                        "hamming score",
                                        "exact match",
                                        "jaccard distance",
                                        "hamming loss",
                                        "zero one loss",
                                        "harmonic score",
                                        "one error",
                                        "rank loss",
                                        "average precision",
                                        "log loss limited by the number of labels",
                                        "log loss limited by the number of instances",
                                        "micro precision",
                                        "micro recall",
                                        "macro precision",
                                        "macro recall",
                                        "f1 micro averaged",
                                        "f1 macro averaged by example",
                                        "f1 macro averaged by label",
                                        "auprc macro averaged",
                                        "auroc macro averaged",
                                        "levenshtein distance"};
    auto const& pf = payoff_functions();
    REQUIRE(pf.size() == 23);
    std::set<std::string> got;
    for (auto const& p : pf) { got.insert(lower_case(p)); }
    CHECK(got == listed);
    CHECK(payoff_display_name("Log_Loss_lim:D") == "Log loss limited by the number of instances");
    CHECK(payoff_display_name("Exact_match") == "Exact match");
    CHECK(find_spec("MCC", "pof")->default_value == Value {std::string("Exact match")});
}

TEST_CASE("thresholds")
{
    CHECK(threshold_text(Threshold::pcut1()) == "PCut1");
    CHECK(threshold_text(Threshold::pcutl()) == "PCutL");
    CHECK(threshold_text(Threshold::real(0.25)) == "0.25");
    CHECK(Threshold::real(0.3) == Threshold::real(0.3));
    CHECK_FALSE(Threshold::real(0.3) == Threshold::pcut1());
}

TEST_CASE("lowering is total over sampled trees and respects domains")
{
    for (auto t : {Tier::Small, Tier::Medium, Tier::Large}) {
        Sampler const s(bundled_grammar(t), SamplingMode::UniformMarginal);
        for (DatasetContext ctx : {DatasetContext {2, 1}, DatasetContext {6, 20}, DatasetContext {100, 500}}) {
            for (std::uint64_t seed = 0; seed < 700; ++seed) {
                auto const c = lower(s.sample(ctx, seed));
                std::vector<Algorithm const*> algs {&c.core.algorithm};
                if (c.meta) { algs.push_back(&*c.meta); }
                if (c.core.slc) {
                    algs.push_back(&c.core.slc->base);
                    if (c.core.slc->meta) { algs.push_back(&*c.core.slc->meta); }
                    if (c.core.slc->asc) { algs.push_back(&*c.core.slc->asc); }
                }
                for (auto const* a : algs) {
                    for (auto const& p : a->params) {
                        auto const* spec = find_spec(a->id, p.name);
                        REQUIRE_MESSAGE(spec != nullptr, a->id << "." << p.name);
                        auto const dc = check_domain(*spec, p.value, ctx);
                        REQUIRE_MESSAGE(dc.ok, a->id << "." << p.name << ": " << dc.reason);
                    }
                }
            }
        }
    }
}

TEST_CASE("lowering places algorithms by level")
{
    Sampler const s(bundled_grammar(Tier::Large), SamplingMode::UniformMarginal);
    auto const& reg = TierRegistry::bundled();
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        auto const c = lower(s.sample(kCtx, seed));
        CHECK(reg.at(c.core.algorithm.id).level == Level::Mlc);
        if (c.meta) { CHECK(reg.at(c.meta->id).type == AlgorithmType::MetaMlc); }
        if (c.core.algorithm.id == "ML-BPNN") { CHECK_FALSE(c.core.slc.has_value()); }
        if (c.core.slc) {
            CHECK(reg.at(c.core.slc->base.id).level == Level::Slc);
            CHECK_FALSE(reg.at(c.core.slc->base.id).is_meta());
            if (c.core.slc->meta) { CHECK(reg.at(c.core.slc->meta->id).type == AlgorithmType::MetaSlc); }
        }
    }
}

TEST_CASE("fragments bind to one algorithm")
{
    Sampler const s(bundled_grammar(Tier::Large), SamplingMode::UniformMarginal);
    Rng rng(11);
    auto const frag = s.sample_production("LWL", kCtx, rng);
    auto const a = lower_fragment(frag, "LWL");
    CHECK(a.id == "LWL");
    CHECK(a.has("k"));
    CHECK_THROWS_AS((void)lower_fragment(frag, "NoSuch"), UnknownAlgorithm);
}

TEST_CASE("trees from other grammars do not lower")
{
    auto const g = parse_grammar("<Start> ::= hello <X>\n<X> ::= RANDOM-INT(1, 3)\n");
    auto const t = sample_tree(g, kCtx, SamplingMode::Naive, 1);
    CHECK_THROWS_AS((void)lower(t), UnknownShape);
}
