// SPDX-License-Identifier: Apache-2.0
#include "core/config_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "core/error.hpp"
#include "core/numfmt.hpp"

namespace mlcspace {

std::string threshold_text(Threshold const& t)
{
    switch (t.kind) {
    case Threshold::Kind::PCut1: return "PCut1";
    case Threshold::Kind::PCutL: return "PCutL";
    case Threshold::Kind::Real: return format_real(t.value);
    }
    return "PCut1";
}

std::string value_text(Value const& v)
{
    struct V {
        std::string operator()(std::int64_t x) const { return std::to_string(x); }
        std::string operator()(double x) const { return format_real(x); }
        std::string operator()(std::string const& s) const { return s; }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
    };
    return std::visit(V {}, v);
}

ParamValue const* Algorithm::find(std::string_view name) const
{
    for (auto const& p : params) {
        if (p.name == name) { return &p; }
    }
    return nullptr;
}

bool Algorithm::flag(std::string_view name) const
{
    auto const* p = find(name);
    if (p == nullptr) { return false; }
    auto const* b = std::get_if<bool>(&p->value);
    return b != nullptr && *b;
}

std::optional<std::int64_t> Algorithm::get_int(std::string_view name) const
{
    auto const* p = find(name);
    if (p == nullptr) { return std::nullopt; }
    if (auto const* i = std::get_if<std::int64_t>(&p->value)) { return *i; }
    return std::nullopt;
}

std::optional<double> Algorithm::get_number(std::string_view name) const
{
    auto const* p = find(name);
    if (p == nullptr) { return std::nullopt; }
    if (auto const* i = std::get_if<std::int64_t>(&p->value)) { return static_cast<double>(*i); }
    if (auto const* d = std::get_if<double>(&p->value)) { return *d; }
    return std::nullopt;
}

std::optional<std::string> Algorithm::get_string(std::string_view name) const
{
    auto const* p = find(name);
    if (p == nullptr) { return std::nullopt; }
    if (auto const* s = std::get_if<std::string>(&p->value)) { return *s; }
    return std::nullopt;
}

void Algorithm::set(std::string name, Value v)
{
    for (auto& p : params) {
        if (p.name == name) {
            p.value = std::move(v);
            return;
        }
    }
    int const order = spec_order(id, name);
    auto pos = std::find_if(params.begin(), params.end(), [&](ParamValue const& p) {
        int const o = spec_order(id, p.name);
        return order >= 0 && (o < 0 || o > order);
    });
    params.insert(pos, ParamValue {std::move(name), std::move(v)});
}

ConfigHeadlines config_headlines(Configuration const& c)
{
    ConfigHeadlines h;
    h.mlc = c.meta ? c.meta->id : c.core.algorithm.id;
    if (c.core.slc) {
        auto const& s = *c.core.slc;
        h.slc = s.meta ? s.meta->id : s.asc ? s.asc->id : s.base.id;
    }
    return h;
}

// ---------------------------------------------------------------------------
// registry

namespace {

using Kind = ParamSpec::Kind;

ParamSpec int_range(std::string name, std::string flag, std::string_view lo, std::string_view hi, std::int64_t def,
                    std::string desc)
{
    ParamSpec s;
    s.name = std::move(name);
    s.cli_flag = std::move(flag);
    s.kind = Kind::Int;
    s.lo = BoundExpr::parse(lo);
    s.hi = BoundExpr::parse(hi);
    s.default_value = def;
    s.description = std::move(desc);
    return s;
}

ParamSpec int_choice(std::string name, std::string flag, std::vector<std::int64_t> choices, std::int64_t def,
                     std::string desc)
{
    ParamSpec s;
    s.name = std::move(name);
    s.cli_flag = std::move(flag);
    s.kind = Kind::Int;
    s.choices = std::move(choices);
    s.default_value = def;
    s.description = std::move(desc);
    return s;
}

ParamSpec real_range(std::string name, std::string flag, std::string_view lo, std::string_view hi, double def,
                     std::string desc)
{
    ParamSpec s;
    s.name = std::move(name);
    s.cli_flag = std::move(flag);
    s.kind = Kind::Real;
    s.lo = BoundExpr::parse(lo);
    s.hi = BoundExpr::parse(hi);
    s.default_value = def;
    s.description = std::move(desc);
    return s;
}

ParamSpec categorical(std::string name, std::string flag, std::vector<std::string> values, std::string def,
                      std::string desc)
{
    ParamSpec s;
    s.name = std::move(name);
    s.cli_flag = std::move(flag);
    s.kind = Kind::Categorical;
    s.values = std::move(values);
    s.has_default = !def.empty();
    s.default_value = std::move(def);
    s.description = std::move(desc);
    return s;
}

ParamSpec flag(std::string name, std::string f, bool def, std::string desc)
{
    ParamSpec s;
    s.name = std::move(name);
    s.cli_flag = std::move(f);
    s.kind = Kind::Flag;
    s.default_value = def;
    s.description = std::move(desc);
    return s;
}

ParamSpec with_extra(ParamSpec s, std::vector<std::int64_t> extra)
{
    s.extra = std::move(extra);
    return s;
}

ParamSpec active_for(ParamSpec s, std::vector<std::string> parents)
{
    s.active_for = std::move(parents);
    return s;
}

std::vector<std::string> const kDependencyTypes {"C", "I", "Ib", "Ibf", "H", "Hbf", "X", "F", "None"};

ParamSpec payoff()
{
    return categorical("pof", "-P", payoff_functions(), "Exact match", "payoff function");
}

ParamSpec inference_iterations(std::string_view lo)
{
    return int_range("ii", "-Iy", lo, "100", 10, "inference iterations");
}

ParamSpec trellis_width()
{
    return int_choice("w", "-H", {0, -1}, -1, "trellis width (0: chain, -1: square)");
}

ParamSpec density()
{
    return int_range("d", "-L", "1", "SQRT(L) + 1", 1, "neighborhood density");
}

ParamSpec pruning_value() { return int_range("pv", "-P", "1", "5", 0, "pruning value"); }
ParamSpec subsampling_value() { return int_range("sv", "-N", "0", "5", 0, "subsampling value"); }
ParamSpec meta_iterations() { return int_range("i", "-I", "10", "50", 10, "number of iterations"); }
ParamSpec meta_bag_size() { return int_range("bsp", "-P", "10", "100", 67, "bag size percent"); }
ParamSpec min_objects(std::int64_t def) { return int_range("mno", "-M", "1", "64", def, "minimum number of objects"); }
ParamSpec weight_trim() { return real_range("wtb", "-W", "0.0", "1.0", 0.0, "weight trim beta"); }
ParamSpec use_aic() { return flag("uaic", "-A", false, "use AIC"); }
ParamSpec ridge(double def) { return real_range("r", "-R", "1e-12", "10.0", def, "ridge"); }
ParamSpec num_features()
{
    return with_extra(int_range("nf", "-K", "2", "32", 0, "number of features (0: automatic)"), {0});
}
ParamSpec tree_depth()
{
    return with_extra(int_range("md", "-depth", "2", "20", 0, "maximum depth (0: unlimited)"), {0});
}
ParamSpec search_method(std::string flag)
{
    return categorical("sm", std::move(flag), {"GreedyStepwise", "BestFirst"}, "BestFirst", "search method");
}

using Registry = std::map<std::string, std::vector<ParamSpec>, std::less<>>;

Registry build_registry()
{
    Registry r;
    // multi-label, problem transformation and adaptation
    for (auto const* id : {"BR", "CC", "LP", "FW", "RT", "PCC", "SM"}) { r[id] = {}; }
    for (auto const* id : {"BRq", "CCq"}) { r[id] = {real_range("dsr", "-P", "0.2", "0.8", 0.75, "down-sample ratio")}; }
    {
        auto dp = kDependencyTypes;
        dp.emplace_back("LEAD");
        r["BCC"] = {categorical("dp", "-X", dp, "Ibf", "dependency type")};
    }
    r["MCC"] = {inference_iterations("2"),
                with_extra(int_range("chi", "-Is", "2", "1500", 0, "chain iterations (0: plain MCC)"), {0}), payoff()};
    r["PMCC"] = {inference_iterations("2"),
                 int_range("chi", "-Is", "51", "1500", 50, "chain iterations"),
                 real_range("beta", "-B", "0.01", "0.99", 0.03, "temperature decrease factor"),
                 int_choice("ts", "-O", {0, 1}, 0, "temperature switch"),
                 int_range("ps", "-M", "1", "50", 10, "population size"),
                 payoff()};
    r["CT"] = {trellis_width(),
               categorical("dp", "-X", kDependencyTypes, "Ibf", "dependency type"),
               inference_iterations("1"),
               with_extra(int_range("chi", "-Is", "2", "1500", 0, "chain iterations"), {0}),
               density(),
               payoff()};
    r["CDN"] = {int_range("i", "-I", "101", "1000", 1000, "iterations"),
                int_range("ci", "-Ic", "1", "100", 100, "collection iterations")};
    r["CDT"] = {trellis_width(),
                categorical("dp", "-X", kDependencyTypes, "None", "dependency type"),
                density(),
                int_range("i", "-I", "101", "1000", 1000, "iterations"),
                int_range("ci", "-Ic", "1", "100", 100, "collection iterations")};
    r["PS"] = {pruning_value(), subsampling_value()};
    r["PSt"] = {pruning_value(), subsampling_value()};
    r["RAkEL"] = {pruning_value(), subsampling_value(),
                  int_range("les", "-k", "1", "L/2", 3, "labels in each subset"),
                  int_range("sre", "-M", "2", "min(2L, 100)", 10, "subsets in the ensemble")};
    r["RAkELd"] = {pruning_value(), subsampling_value(),
                   int_range("les", "-k", "1", "L/2", 3, "labels in each subset")};
    {
        ParamSpec nhu = int_range("nhu", "-H", "0.2", "1.0", 10, "hidden units");
        nhu.scaled = true;
        nhu.scale = BoundExpr::parse("n_attributes");
        r["ML-BPNN"] = {int_range("ne", "-E", "10", "1000", 100, "epochs"), nhu,
                        real_range("lr", "-r", "0.001", "0.1", 0.1, "learning rate"),
                        real_range("m", "-m", "0.1", "0.8", 0.1, "momentum")};
    }
    // multi-label meta
    r["BaggingML"] = {meta_iterations()};
    r["BaggingMLDup"] = {meta_bag_size(), meta_iterations()};
    r["EnsembleML"] = {meta_bag_size(), meta_iterations()};
    r["RSML"] = {meta_bag_size(), meta_iterations(), int_range("ap", "-A", "10", "100", 50, "attribute percent")};
    r["EM"] = {meta_iterations()};
    r["CM"] = {meta_iterations()};

    // single-label
    r["C4.5"] = {real_range("cf", "-C", "0.0", "1.0", 0.25, "confidence factor"),
                 min_objects(2),
                 flag("ct", "-O", true, "collapse tree"),
                 flag("u", "-U", false, "unpruned"),
                 flag("bs", "-B", false, "binary splits"),
                 flag("umc", "-J", true, "use MDL correction"),
                 flag("ul", "-A", false, "use Laplace"),
                 flag("sr", "-S", true, "subtree raising")};
    r["LMT"] = {min_objects(15),
                flag("cn", "-B", false, "convert nominal"),
                flag("sor", "-R", false, "split on residuals"),
                flag("fr", "-C", true, "fast regression"),
                flag("eop", "-P", false, "error on probabilities"),
                weight_trim(),
                use_aic()};
    r["DS"] = {};
    r["RF"] = {int_range("nt", "-I", "2", "256", 100, "number of trees"), num_features(), tree_depth()};
    r["RandomTree"] = {int_range("mw", "-M", "1", "64", 1, "minimum weight in a leaf"), num_features(), tree_depth(),
                       int_range("nfbgt", "-N", "0", "5", 0, "folds for back-fitting (0: none)")};
    r["REPTree"] = {int_range("mw", "-M", "1", "64", 2, "minimum weight in a leaf"),
                    with_extra(int_range("md", "-L", "2", "20", -1, "maximum depth (-1: unlimited)"), {-1}),
                    flag("up", "-P", false, "use pruning")};
    r["DT"] = {categorical("em", "-E", {"acc", "rmse", "mae", "auc"}, "acc", "evaluation measure"),
               flag("uibk", "-I", false, "use IBk"),
               search_method("-S"),
               int_choice("crv", "-X", {1, 2, 3, 4}, 1, "cross-validation folds")};
    r["JRip"] = {real_range("mtw", "-N", "1.0", "5.0", 2.0, "minimum total weight"),
                 flag("cer", "-E", true, "check error rate"),
                 flag("up", "-P", false, "use pruning"),
                 int_range("o", "-O", "1", "5", 2, "optimization runs")};
    r["OneR"] = {int_range("mbs", "-B", "1", "32", 6, "minimum bucket size")};
    {
        auto nr = int_choice("nr", "-N", {2, 3, 4, 5}, 0, "reduced-error pruning folds");
        nr.has_default = false;
        r["PART"] = {min_objects(2), flag("bs", "-B", false, "binary splits"),
                     flag("rep", "-R", true, "reduced-error pruning"), nr};
    }
    r["ZeroR"] = {};
    r["KNN"] = {int_range("k", "-K", "1", "64", 1, "number of neighbors"),
                flag("loo", "-X", false, "leave-one-out"),
                categorical("dw", "", {"F", "I"}, "", "distance weighting")};
    r["K*"] = {int_range("gb", "-B", "1", "100", 20, "global blending"),
               flag("eab", "-E", false, "entropic auto-blending"),
               categorical("mm", "-M", {"a", "d", "m", "n"}, "a", "missing mode")};
    r["VP"] = {int_range("i", "-I", "1", "10", 1, "iterations"),
               int_range("mk", "-M", "5000", "50000", 1000, "maximum alterations"),
               real_range("e", "-E", "0.2", "5.0", 1.0, "exponent")};
    r["MLP"] = {real_range("lr", "-L", "0.1", "1.0", 0.3, "learning rate"),
                real_range("m", "-M", "0.0", "1.0", 0.2, "momentum"),
                categorical("nhn", "-H", {"a", "i", "o", "t"}, "a", "hidden nodes rule"),
                flag("n2b", "-B", true, "nominal to binary"),
                flag("r", "-R", true, "reset"),
                flag("d", "-D", false, "decay")};
    r["SGD"] = {int_choice("lf", "-F", {0, 1, 2}, 0, "loss function"),
                real_range("lr", "-L", "0.00001", "1.0", 0.01, "learning rate"),
                ridge(0.0001),
                flag("nn", "-N", false, "do not normalize"),
                flag("nrmv", "-M", false, "do not replace missing values")};
    {
        auto kernel = categorical("kernel", "-K", {"NormalizedPolyKernel", "PolyKernel", "Puk", "RBF"}, "PolyKernel",
                                  "kernel");
        kernel.sub = {active_for(real_range("exp", "-E", "0.2", "5.0", 1.0, "exponent"),
                                 {"NormalizedPolyKernel", "PolyKernel"}),
                      active_for(flag("ulo", "-L", true, "use lower order"), {"NormalizedPolyKernel", "PolyKernel"}),
                      active_for(real_range("om", "-O", "0.1", "1.0", 1.0, "omega"), {"Puk"}),
                      active_for(real_range("sig", "-S", "0.1", "10.0", 1.0, "sigma"), {"Puk"}),
                      active_for(real_range("g", "-G", "0.0001", "1.0", 0.01, "gamma"), {"RBF"})};
        // Puk and RBF carry no documented defaults for their sub-parameters
        for (auto& s : kernel.sub) { s.has_default = s.name == "exp" || s.name == "ulo"; }
        r["SMO"] = {real_range("c", "-C", "0.5", "1.5", 1.0, "complexity"),
                    int_choice("ft", "-N", {0, 1, 2}, 0, "filter type"),
                    flag("bcm", "-M", false, "build calibration models"), kernel};
    }
    r["LR"] = {ridge(0.00000001)};
    r["SL"] = {weight_trim(), flag("ucv", "-S", true, "use cross-validation"), use_aic()};
    r["NB"] = {flag("uke", "-K", false, "use kernel estimator"), flag("usd", "-D", false, "use supervised discretization")};
    r["BNC"] = {categorical("sm", "-Q", {"TAN", "K2", "HillClimber", "LAGDHillClimber", "SimulatedAnnealing", "TabuSearch"},
                            "", "structure search method")};
    r["NBM"] = {};
    r["ASC"] = {search_method("-S")};
    // single-label meta
    r["LWL"] = {int_choice("k", "-K", {-1, 10, 30, 60, 90, 120}, -1, "neighbors (-1: all)"),
                int_choice("wk", "-U", {0, 1, 2, 3, 4}, 0, "weighting kernel")};
    r["RSS"] = {real_range("sss", "-P", "0.1", "1.0", 0.5, "subspace size"),
                int_range("ni", "-I", "2", "64", 10, "iterations")};
    r["Bagging"] = {int_range("bsp", "-P", "10", "100", 100, "bag size percent"),
                    int_range("ni", "-I", "2", "128", 10, "iterations"),
                    flag("coob", "-O", false, "calculate out-of-bag")};
    r["RC"] = {int_range("ni", "-I", "2", "64", 10, "iterations")};
    r["AdaM1"] = {int_range("wt", "-P", "50", "100", 100, "weight threshold"),
                  int_range("ni", "-I", "2", "128", 10, "iterations"),
                  flag("ur", "-Q", false, "use resampling")};
    return r;
}

Registry const& registry()
{
    static Registry const r = build_registry();
    return r;
}

// flattened (top-level then sub-specs right after their parent)
using FlatIndex = std::map<std::string, std::vector<ParamSpec const*>, std::less<>>;

FlatIndex const& flat_index()
{
    static FlatIndex const idx = [] {
        FlatIndex out;
        for (auto const& [id, specs] : registry()) {
            auto& v = out[id];
            for (auto const& s : specs) {
                v.push_back(&s);
                for (auto const& sub : s.sub) { v.push_back(&sub); }
            }
        }
        return out;
    }();
    return idx;
}

} // namespace

std::vector<ParamSpec> const& describe(std::string_view alg_id)
{
    auto it = registry().find(alg_id);
    if (it == registry().end()) { throw UnknownAlgorithm(std::string(alg_id)); }
    return it->second;
}

int declared_hp_count(std::vector<ParamSpec> const& specs)
{
    int n = 0;
    for (auto const& s : specs) {
        ++n;
        if (s.sub.empty()) { continue; }
        std::size_t best = 0;
        for (auto const& v : s.values) {
            auto k = static_cast<std::size_t>(std::count_if(s.sub.begin(), s.sub.end(), [&](ParamSpec const& x) {
                return std::find(x.active_for.begin(), x.active_for.end(), v) != x.active_for.end();
            }));
            best = std::max(best, k);
        }
        n += static_cast<int>(best);
    }
    return n;
}

ParamSpec const* find_spec(std::string_view alg_id, std::string_view param)
{
    auto it = flat_index().find(alg_id);
    if (it == flat_index().end()) { return nullptr; }
    for (auto const* s : it->second) {
        if (s->name == param) { return s; }
    }
    return nullptr;
}

int spec_order(std::string_view alg_id, std::string_view param)
{
    auto it = flat_index().find(alg_id);
    if (it == flat_index().end()) { return -1; }
    for (std::size_t i = 0; i < it->second.size(); ++i) {
        if (it->second[i]->name == param) { return static_cast<int>(i); }
    }
    return -1;
}

DomainCheck check_domain(ParamSpec const& spec, Value const& v, DatasetContext const& ctx)
{
    auto fail = [](std::string r) { return DomainCheck {false, std::move(r)}; };
    switch (spec.kind) {
    case Kind::Flag:
        if (!std::holds_alternative<bool>(v)) { return fail("expected a boolean"); }
        return {};
    case Kind::Categorical: {
        auto const* s = std::get_if<std::string>(&v);
        if (s == nullptr) { return fail("expected a string"); }
        if (std::find(spec.values.begin(), spec.values.end(), *s) == spec.values.end()) {
            return fail("'" + *s + "' is not an admissible value");
        }
        return {};
    }
    case Kind::Int: {
        auto const* i = std::get_if<std::int64_t>(&v);
        if (i == nullptr) { return fail("expected an integer"); }
        if (!spec.choices.empty()) {
            if (std::find(spec.choices.begin(), spec.choices.end(), *i) == spec.choices.end()) {
                return fail(std::to_string(*i) + " is not an admissible value");
            }
            return {};
        }
        if (std::find(spec.extra.begin(), spec.extra.end(), *i) != spec.extra.end()) { return {}; }
        IntBounds b = spec.scaled ? scaled_bounds(spec.lo, spec.hi, spec.scale, ctx) : int_bounds(spec.lo, spec.hi, ctx);
        if (*i < b.lo || *i > b.hi) {
            return fail(std::to_string(*i) + " outside [" + std::to_string(b.lo) + ", " + std::to_string(b.hi) + "]");
        }
        return {};
    }
    case Kind::Real: {
        double x = 0;
        if (auto const* d = std::get_if<double>(&v)) {
            x = *d;
        } else {
            return fail("expected a real number");
        }
        double const lo = spec.lo.evaluate(ctx);
        double const hi = spec.hi.evaluate(ctx);
        bool const ok = std::isfinite(x) && (spec.lo_open ? x > lo : x >= lo) && (spec.hi_open ? x < hi : x <= hi);
        if (!ok) {
            return fail(format_real(x) + " outside " + (spec.lo_open ? "(" : "[") + format_real(lo) + ", " +
                        format_real(hi) + (spec.hi_open ? ")" : "]"));
        }
        return {};
    }
    }
    return {};
}

namespace {

struct PayoffName {
    char const* token;
    char const* display;
};

// grammar order
constexpr PayoffName kPayoffs[] = {
    {"Accuracy", "Accuracy"},
    {"Jaccard_index", "Jaccard index"},
    {"Hamming_score", "Hamming score"},
    {"Exact_match", "Exact match"},
    {"Jaccard_distance", "Jaccard distance"},
    {"Rank_loss", "Rank loss"},
    {"Hamming_loss", "Hamming loss"},
    {"Zero_One_loss", "Zero One loss"},
    {"Harmonic_score", "Harmonic score"},
    {"Log_Loss_lim:L", "Log loss limited by the number of labels"},
    {"Micro_Recall", "Micro Recall"},
    {"One_error", "One error"},
    {"Log_Loss_lim:D", "Log loss limited by the number of instances"},
    {"Micro_Precision", "Micro Precision"},
    {"Macro_Precision", "Macro Precision"},
    {"Macro_Recall", "Macro Recall"},
    {"F1_micro_averaged", "F1 micro averaged"},
    {"Avg_precision", "Average precision"},
    {"F1_macro_averaged_by_example", "F1 macro averaged by example"},
    {"F1_macro_averaged_by_label", "F1 macro averaged by label"},
    {"AUPRC_macro_averaged", "AUPRC macro averaged"},
    {"AUROC_macro_averaged", "AUROC macro averaged"},
    {"Levenshtein_distance", "Levenshtein distance"},
};

} // namespace

std::vector<std::string> const& payoff_functions()
{
    static std::vector<std::string> const v = [] {
        std::vector<std::string> out;
        for (auto const& p : kPayoffs) { out.emplace_back(p.display); }
        return out;
    }();
    return v;
}

std::string payoff_display_name(std::string_view token)
{
    for (auto const& p : kPayoffs) {
        if (token == p.token) { return p.display; }
    }
    return std::string(token);
}

// ---------------------------------------------------------------------------
// lowering

namespace {

// Grammar nonterminals that hold one parameter value, and the parameter they set.
std::unordered_map<std::string, std::string> const& param_nonterminals()
{
    static std::unordered_map<std::string, std::string> const m {
        {"cf", "cf"}, {"mno", "mno"}, {"nt", "nt"}, {"nf", "nf"}, {"md", "md"}, {"mw", "mw"}, {"nfbgt", "nfbgt"},
        {"em", "em"}, {"crv", "crv"}, {"mtw", "mtw"}, {"o", "o"}, {"mbs", "mbs"}, {"nr", "nr"}, {"k_nn", "k"},
        {"dw", "dw"}, {"gb", "gb"}, {"mm", "mm"}, {"i", "i"}, {"mk", "mk"}, {"e", "e"}, {"lr", "lr"}, {"m", "m"},
        {"nhn", "nhn"}, {"lf", "lf"}, {"lr_sgd", "lr"}, {"r", "r"}, {"c", "c"}, {"ft", "ft"}, {"kernel", "kernel"},
        {"exp", "exp"}, {"om", "om"}, {"sig", "sig"}, {"g", "g"}, {"wtb", "wtb"}, {"k_lwl", "k"}, {"wk", "wk"},
        {"wt", "wt"}, {"ni_ada_and_bagging", "ni"}, {"bsp", "bsp"}, {"sss", "sss"}, {"ni_random_methods", "ni"},
        {"dsr", "dsr"}, {"chi_MCC", "chi"}, {"ii", "ii"}, {"pof", "pof"}, {"dp", "dp"}, {"chi_CT", "chi"},
        {"d", "d"}, {"i_cdn_cdt", "i"}, {"ci", "ci"}, {"sv", "sv"}, {"pv", "pv"}, {"sre", "sre"}, {"les", "les"},
        {"dp_complete", "dp"}, {"B", "beta"}, {"ts", "ts"}, {"ps", "ps"}, {"chi_PMCC", "chi"}, {"ne", "ne"},
        {"nhu_bpnn", "nhu"}, {"lr_bpnn", "lr"}, {"m_bpnn", "m"}, {"i_metamlc", "i"}, {"ap", "ap"},
        {"bsp_ensembleML", "bsp"}, {"sm", "sm"}};
    return m;
}

std::string token_value(std::string_view param, std::string_view token)
{
    if (param == "pof") { return payoff_display_name(token); }
    if (param == "kernel" && token == "NormPolyKernel") { return "NormalizedPolyKernel"; }
    return std::string(token);
}

[[noreturn]] void shape_error(std::string const& what)
{
    throw UnknownShape("derivation does not match the bundled grammar: " + what);
}

class Lowerer {
public:
    explicit Lowerer(TierRegistry const& reg) : reg_(reg) { }

    Configuration run(DerivationTree const& t)
    {
        visit(t, {}, {});
        if (!have_threshold_) { shape_error("no prediction threshold"); }
        if (!have_core_) { shape_error("no multi-label algorithm"); }
        auto const& core = reg_.at(config_.core.algorithm.id);
        if (core.type == AlgorithmType::ProblemTransformation) {
            if (!config_.core.slc || config_.core.slc->base.id.empty()) { shape_error("no base classifier"); }
        } else if (config_.core.slc) {
            shape_error("single-label chain under an algorithm-adaptation method");
        }
        return std::move(config_);
    }

    Algorithm fragment(DerivationNode const& n, std::string const& id)
    {
        Algorithm a {id, {}};
        owner_ = &a;
        fragment_id_ = id;
        visit(n, {}, {});
        return a;
    }

private:
    void open(AlgorithmRecord const& r)
    {
        if (!fragment_id_.empty()) {
            if (r.id != fragment_id_) { shape_error("unexpected algorithm " + r.id + " in fragment"); }
            return;
        }
        if (r.level == Level::Mlc) {
            if (r.is_meta()) {
                if (config_.meta) { shape_error("nested meta multi-label algorithms"); }
                config_.meta = Algorithm {r.id, {}};
                owner_ = &*config_.meta;
            } else {
                if (have_core_) { shape_error("two multi-label algorithms"); }
                have_core_ = true;
                config_.core.algorithm = Algorithm {r.id, {}};
                owner_ = &config_.core.algorithm;
            }
            return;
        }
        if (!config_.core.slc) { config_.core.slc.emplace(); }
        auto& slc = *config_.core.slc;
        if (r.is_meta()) {
            if (slc.meta) { shape_error("two single-label meta algorithms"); }
            slc.meta = Algorithm {r.id, {}};
            owner_ = &*slc.meta;
        } else if (r.type == AlgorithmType::Preprocessing) {
            if (slc.asc) { shape_error("two preprocessing wrappers"); }
            slc.asc = Algorithm {r.id, {}};
            owner_ = &*slc.asc;
        } else {
            if (!slc.base.id.empty()) { shape_error("two base classifiers"); }
            slc.base = Algorithm {r.id, {}};
            owner_ = &slc.base;
        }
    }

    Algorithm& owner(std::string const& what)
    {
        if (owner_ == nullptr) { shape_error(what + " outside any algorithm"); }
        return *owner_;
    }

    ParamSpec const& spec(std::string const& param)
    {
        auto const& a = owner(param);
        auto const* s = find_spec(a.id, param);
        if (s == nullptr) { shape_error("parameter '" + param + "' does not belong to " + a.id); }
        return *s;
    }

    void set(std::string const& param, Value v)
    {
        spec(param);
        owner(param).set(param, std::move(v));
    }

    // A bare token: a value of the enclosing parameter, a switch, or a categorical value of the owner.
    void token(DerivationNode const& n, std::string const& param)
    {
        auto const& tok = n.label;
        if (!param.empty()) {
            auto const& s = spec(param);
            auto const v = token_value(param, tok);
            switch (s.kind) {
            case ParamSpec::Kind::Int:
                if (auto i = parse_int(tok)) {
                    set(param, *i);
                    return;
                }
                break;
            case ParamSpec::Kind::Real:
                if (auto d = parse_real(tok)) {
                    set(param, *d);
                    return;
                }
                break;
            case ParamSpec::Kind::Categorical:
                if (std::find(s.values.begin(), s.values.end(), v) != s.values.end()) {
                    set(param, v);
                    return;
                }
                break;
            case ParamSpec::Kind::Flag: break;
            }
        }
        auto& a = owner("token '" + tok + "'");
        if (a.id == "Bagging" && tok == "100") {
            set("bsp", std::int64_t {100});
            return;
        }
        if (a.id == "PART" && tok == "ebp") { return; } // error-based pruning: rep stays off
        if (auto const* s = find_spec(a.id, tok); s != nullptr && s->kind == ParamSpec::Kind::Flag) {
            a.set(tok, true);
            return;
        }
        for (auto const& s : describe(a.id)) {
            if (s.kind == ParamSpec::Kind::Categorical &&
                std::find(s.values.begin(), s.values.end(), tok) != s.values.end()) {
                a.set(s.name, tok);
                return;
            }
        }
        shape_error("token '" + tok + "' has no meaning for " + a.id);
    }

    void visit(DerivationNode const& n, std::string const& param, std::string const& enclosing_marker)
    {
        switch (n.kind) {
        case NodeKind::Token: {
            if (n.label == "PCut1" || n.label == "PCutL") {
                if (in_threshold_) {
                    config_.threshold = n.label == "PCut1" ? Threshold::pcut1() : Threshold::pcutl();
                    have_threshold_ = true;
                    return;
                }
            }
            if (param.empty()) {
                if (auto const* r = reg_.by_token(n.label)) {
                    if (r->id != enclosing_marker) { open(*r); }
                    return;
                }
            }
            token(n, param);
            return;
        }
        case NodeKind::Int:
            if (in_threshold_) { shape_error("integer threshold"); }
            if (param.empty()) { shape_error("integer value outside a parameter"); }
            set(param, n.int_value);
            return;
        case NodeKind::Real:
            if (in_threshold_) {
                config_.threshold = Threshold::real(n.real_value);
                have_threshold_ = true;
                return;
            }
            if (param.empty()) { shape_error("real value outside a parameter"); }
            set(param, n.real_value);
            return;
        case NodeKind::Group:
        case NodeKind::Optional:
            for (auto const& c : n.children) { visit(c, param, enclosing_marker); }
            return;
        case NodeKind::NonTerminal: break;
        }

        auto marker = enclosing_marker;
        if (auto const* r = reg_.by_nonterminal(n.label)) {
            if (r->id != enclosing_marker) { open(*r); }
            marker = r->id;
        }
        if (n.label == "pred_tshd") {
            in_threshold_ = true;
            for (auto const& c : n.children) { visit(c, {}, marker); }
            in_threshold_ = false;
            return;
        }
        if (n.label == "w") {
            // "0 1": chain trellis with unit density; "-1 <d>": square trellis
            if (n.children.size() == 2 && n.children[0].kind == NodeKind::Token && n.children[0].label == "0") {
                set("w", std::int64_t {0});
                set("d", std::int64_t {1});
                return;
            }
            if (!n.children.empty() && n.children[0].kind == NodeKind::Token && n.children[0].label == "-1") {
                set("w", std::int64_t {-1});
                for (std::size_t i = 1; i < n.children.size(); ++i) { visit(n.children[i], {}, marker); }
                return;
            }
            shape_error("unexpected trellis width expansion");
        }
        std::string p = param;
        if (auto it = param_nonterminals().find(n.label); it != param_nonterminals().end()) { p = it->second; }
        for (auto const& c : n.children) { visit(c, p, marker); }
    }

    TierRegistry const& reg_;
    Configuration config_;
    Algorithm* owner_ {nullptr};
    std::string fragment_id_;
    bool have_core_ {false};
    bool have_threshold_ {false};
    bool in_threshold_ {false};
};

} // namespace

Configuration lower(DerivationTree const& t, TierRegistry const& reg)
{
    return Lowerer(reg).run(t);
}

Algorithm lower_fragment(DerivationNode const& fragment, std::string const& alg_id, TierRegistry const& reg)
{
    (void)describe(alg_id); // validates the id
    return Lowerer(reg).fragment(fragment, alg_id);
}

} // namespace mlcspace
