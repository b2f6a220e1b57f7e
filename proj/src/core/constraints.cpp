// SPDX-License-Identifier: Apache-2.0
#include "core/constraints.hpp"

#include <algorithm>
#include <cmath>

#include "core/numfmt.hpp"

namespace mlcspace {

std::vector<CodeInfo> const& violation_codes()
{
    static std::vector<CodeInfo> const codes {
        {"H0", true, "configuration structure: known algorithms in their slots, a base classifier exactly when the "
                     "multi-label method is a problem transformation"},
        {"H1", true, "PMCC: population size ps must be smaller than chain iterations chi"},
        {"H2", true, "CT/CDT: width 0 requires density 1; width -1 requires 1 <= d <= floor(sqrt(L)) + 1"},
        {"H3", true, "CDN/CDT: iterations i must exceed collection iterations ci"},
        {"H4", true, "NB: kernel estimator and supervised discretization are mutually exclusive"},
        {"H5", true, "Bagging: out-of-bag estimation requires bag size 100"},
        {"H6", true, "LWL/AdaM1: base classifier must handle weighted instances (not LMT, OneR, K*, SGD, VP)"},
        {"H7", true, "RC: base classifier must be randomizable (RF, RandomTree, REPTree, SGD, MLP)"},
        {"H8", true, "BCC cannot be wrapped by BaggingML, BaggingMLDup or EnsembleML"},
        {"H9", true, "PMCC cannot be wrapped by EM or CM"},
        {"H10", true, "RandomTree: back-fitting folds must not be 1"},
        {"H11", true, "C4.5: an unpruned tree has no confidence factor and no subtree raising"},
        {"H12", true, "PART: folds nr are given exactly when reduced-error pruning is on"},
        {"H13", true, "every parameter belongs to its algorithm and lies in its context-evaluated domain; a real "
                      "threshold lies strictly between 0 and 1"},
        {"H14", true, "ASC cannot be wrapped by LWL, AdaM1 or RC"},
        {"W1", false, "PCC scales poorly with 15 or more labels"},
        {"W2", false, "MCC, PCC, PMCC, CDN, CDT, RAkEL and RAkELd scale poorly under a meta multi-label method"},
        {"W3", false, "C4.5: collapse tree has no effect on an unpruned tree"},
        {"W4", false, "EnsembleML: bag size is expected within [52, 72]"},
    };
    return codes;
}

bool ValidationReport::has(std::string_view code) const
{
    auto match = [&](Finding const& f) { return f.code == code; };
    return std::any_of(violations.begin(), violations.end(), match) ||
           std::any_of(warnings.begin(), warnings.end(), match);
}

namespace {

bool one_of(std::string const& id, std::initializer_list<char const*> ids)
{
    return std::any_of(ids.begin(), ids.end(), [&](char const* x) { return id == x; });
}

class Checker {
public:
    Checker(std::optional<DatasetContext> ctx, TierRegistry const& reg) : ctx_(ctx), reg_(reg) { }

    ValidationReport run(Configuration const& c)
    {
        if (structure(c)) {
            threshold(c.threshold);
            algorithm(c.core.algorithm);
            if (c.meta) { algorithm(*c.meta); }
            if (c.core.slc) {
                auto const& s = *c.core.slc;
                if (s.meta) { algorithm(*s.meta); }
                if (s.asc) { algorithm(*s.asc); }
                algorithm(s.base);
            }
            combinations(c);
        }
        auto order = [](Finding const& f) {
            auto const& codes = violation_codes();
            auto it = std::find_if(codes.begin(), codes.end(), [&](CodeInfo const& i) { return f.code == i.code; });
            return it - codes.begin();
        };
        auto by_code = [&](Finding const& a, Finding const& b) { return order(a) < order(b); };
        std::stable_sort(report_.violations.begin(), report_.violations.end(), by_code);
        std::stable_sort(report_.warnings.begin(), report_.warnings.end(), by_code);
        return std::move(report_);
    }

private:
    void add(char const* code, std::string message)
    {
        for (auto const& info : violation_codes()) {
            if (code == std::string_view(info.code)) {
                (info.hard ? report_.violations : report_.warnings).push_back({code, std::move(message), info.rule});
                return;
            }
        }
    }

    bool slot(std::string const& id, Level level, bool meta, char const* where, std::initializer_list<AlgorithmType> types = {})
    {
        auto const* r = reg_.find(id);
        if (r == nullptr) {
            add("H0", std::string(where) + ": unknown algorithm '" + id + "'");
            return false;
        }
        bool ok = r->level == level && r->is_meta() == meta;
        if (ok && types.size() > 0) { ok = std::find(types.begin(), types.end(), r->type) != types.end(); }
        if (!ok) { add("H0", std::string(where) + ": " + id + " cannot be used here"); }
        return ok;
    }

    bool structure(Configuration const& c)
    {
        bool ok = slot(c.core.algorithm.id, Level::Mlc, false, "multi-label algorithm");
        if (c.meta) { ok = slot(c.meta->id, Level::Mlc, true, "meta multi-label algorithm") && ok; }
        if (!ok) { return false; }
        bool const pt = reg_.at(c.core.algorithm.id).type == AlgorithmType::ProblemTransformation;
        if (pt && !c.core.slc) {
            add("H0", c.core.algorithm.id + " needs a single-label base classifier");
            return false;
        }
        if (!pt && c.core.slc) {
            add("H0", c.core.algorithm.id + " does not take a single-label classifier");
            return false;
        }
        if (c.core.slc) {
            auto const& s = *c.core.slc;
            ok = slot(s.base.id, Level::Slc, false, "base classifier",
                      {AlgorithmType::Trees, AlgorithmType::Rules, AlgorithmType::Lazy, AlgorithmType::Functions,
                       AlgorithmType::Bayes}) && ok;
            if (s.meta) { ok = slot(s.meta->id, Level::Slc, true, "meta single-label algorithm") && ok; }
            if (s.asc) {
                ok = slot(s.asc->id, Level::Slc, false, "preprocessing wrapper", {AlgorithmType::Preprocessing}) && ok;
            }
        }
        return ok;
    }

    void threshold(Threshold const& t)
    {
        if (t.kind == Threshold::Kind::Real && !(t.value > 0.0 && t.value < 1.0)) {
            add("H13", "threshold " + format_real(t.value) + " is not strictly between 0 and 1");
        }
    }

    void algorithm(Algorithm const& a)
    {
        auto const& specs = describe(a.id);
        for (auto const& p : a.params) {
            auto const* s = find_spec(a.id, p.name);
            if (s == nullptr) {
                add("H13", a.id + ": unknown parameter '" + p.name + "'");
                continue;
            }
            if (!s->active_for.empty()) {
                auto parent = std::find_if(specs.begin(), specs.end(), [&](ParamSpec const& x) {
                    return std::any_of(x.sub.begin(), x.sub.end(), [&](ParamSpec const& y) { return &y == s; });
                });
                auto const v = parent == specs.end() ? std::nullopt : a.get_string(parent->name);
                if (!v || std::find(s->active_for.begin(), s->active_for.end(), *v) == s->active_for.end()) {
                    add("H13", a.id + ": parameter '" + p.name + "' does not apply to the chosen " +
                                   (parent == specs.end() ? std::string("value") : parent->name));
                    continue;
                }
            }
            // d ranges are part of the trellis rule
            if (p.name == "d" && one_of(a.id, {"CT", "CDT"})) { continue; }
            auto const d = domain(*s, p.value);
            if (!d.ok) { add("H13", a.id + "." + p.name + ": " + d.reason); }
        }
        rules(a);
    }

    // Without a dataset context, bounds that depend on L or A are only checked for kind.
    DomainCheck domain(ParamSpec const& s, Value const& v) const
    {
        if (ctx_) { return check_domain(s, v, *ctx_); }
        bool const dependent = s.lo.references_labels() || s.lo.references_attributes() ||
                               s.hi.references_labels() || s.hi.references_attributes() || s.scaled;
        if (!dependent) { return check_domain(s, v, DatasetContext {}); }
        ParamSpec wide = s;
        wide.scaled = false;
        wide.lo = BoundExpr::constant(-1e15);
        wide.hi = BoundExpr::constant(1e15);
        return check_domain(wide, v, DatasetContext {});
    }

    void rules(Algorithm const& a)
    {
        auto const& id = a.id;
        if (id == "PMCC") {
            auto ps = a.get_int("ps");
            auto chi = a.get_int("chi");
            if (ps && chi && *ps >= *chi) {
                add("H1", "PMCC ps=" + std::to_string(*ps) + " is not smaller than chi=" + std::to_string(*chi));
            }
        }
        if (one_of(id, {"CT", "CDT"})) {
            auto w = a.get_int("w");
            auto d = a.get_int("d");
            auto const labels = ctx_ ? ctx_->labels : std::int64_t {1} << 40;
            auto const dmax = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(labels)))) + 1;
            if (a.has("d") && !d) {
                add("H2", id + " d must be an integer");
            } else if (w && *w == 0 && d && *d != 1) {
                add("H2", id + " with width 0 needs d=1, got d=" + std::to_string(*d));
            } else if (d && (*d < 1 || *d > dmax)) {
                add("H2", id + " d=" + std::to_string(*d) + " outside [1, " + std::to_string(dmax) + "] for L=" +
                              std::to_string(labels));
            }
        }
        if (one_of(id, {"CDN", "CDT"})) {
            auto i = a.get_int("i");
            auto ci = a.get_int("ci");
            if (i && ci && *i <= *ci) {
                add("H3", id + " i=" + std::to_string(*i) + " does not exceed ci=" + std::to_string(*ci));
            }
        }
        if (id == "NB" && a.flag("uke") && a.flag("usd")) { add("H4", "NB uses both uke and usd"); }
        if (id == "Bagging" && a.flag("coob")) {
            auto bsp = a.get_int("bsp");
            if (!bsp || *bsp != 100) {
                add("H5", "Bagging coob with bsp=" + (bsp ? std::to_string(*bsp) : std::string("unset")));
            }
        }
        if (id == "RandomTree" && a.get_int("nfbgt") == std::optional<std::int64_t> {1}) {
            add("H10", "RandomTree nfbgt=1");
        }
        if (id == "C4.5" && a.flag("u")) {
            if (a.has("cf")) { add("H11", "unpruned C4.5 sets cf"); }
            if (a.flag("sr")) { add("H11", "unpruned C4.5 sets sr"); }
            if (a.flag("ct")) { add("W3", "unpruned C4.5 sets ct"); }
        }
        if (id == "PART" && a.flag("rep") != a.has("nr")) {
            add("H12", a.flag("rep") ? "PART rep without nr" : "PART nr without rep");
        }
        if (id == "EnsembleML") {
            if (auto bsp = a.get_int("bsp"); bsp && (*bsp < 52 || *bsp > 72)) {
                add("W4", "EnsembleML bsp=" + std::to_string(*bsp));
            }
        }
    }

    void combinations(Configuration const& c)
    {
        auto const& core = c.core.algorithm.id;
        if (c.meta) {
            auto const& m = c.meta->id;
            if (core == "BCC" && one_of(m, {"BaggingML", "BaggingMLDup", "EnsembleML"})) {
                add("H8", "BCC under " + m);
            }
            if (core == "PMCC" && one_of(m, {"EM", "CM"})) { add("H9", "PMCC under " + m); }
            if (one_of(core, {"MCC", "PCC", "PMCC", "CDN", "CDT", "RAkEL", "RAkELd"})) {
                add("W2", core + " under " + m);
            }
        }
        if (core == "PCC" && ctx_ && ctx_->labels >= 15) { add("W1", "PCC with L=" + std::to_string(ctx_->labels)); }
        if (!c.core.slc || !c.core.slc->meta) { return; }
        auto const& s = *c.core.slc;
        auto const& m = s.meta->id;
        if (one_of(m, {"LWL", "AdaM1"}) && one_of(s.base.id, {"LMT", "OneR", "K*", "SGD", "VP"})) {
            add("H6", s.base.id + " under " + m);
        }
        if (m == "RC" && !one_of(s.base.id, {"RF", "RandomTree", "REPTree", "SGD", "MLP"})) {
            add("H7", s.base.id + " under RC");
        }
        if (s.asc && one_of(m, {"LWL", "AdaM1", "RC"})) { add("H14", "ASC under " + m); }
    }

    std::optional<DatasetContext> ctx_;
    TierRegistry const& reg_;
    ValidationReport report_;
};

} // namespace

ValidationReport validate(Configuration const& c, DatasetContext const& ctx, TierRegistry const& reg)
{
    return Checker(ctx, reg).run(c);
}

ValidationReport validate_without_context(Configuration const& c, TierRegistry const& reg)
{
    return Checker(std::nullopt, reg).run(c);
}

} // namespace mlcspace
