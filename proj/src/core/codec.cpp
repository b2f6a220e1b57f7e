// SPDX-License-Identifier: Apache-2.0
#include "core/codec.hpp"

#include <json.hpp>

#include "core/bundled.hpp"
#include "core/constraints.hpp"
#include "core/error.hpp"
#include "core/numfmt.hpp"

namespace mlcspace {

using nlohmann::json;

namespace {

json value_json(Value const& v)
{
    struct V {
        json operator()(std::int64_t x) const { return x; }
        json operator()(double x) const { return x; }
        json operator()(std::string const& s) const { return s; }
        json operator()(bool b) const { return b; }
    };
    return std::visit(V {}, v);
}

json params_json(Algorithm const& a)
{
    json p = json::object();
    for (auto const& v : a.params) { p[v.name] = value_json(v.value); }
    return p;
}

json algorithm_json(Algorithm const& a)
{
    return json {{"id", a.id}, {"params", params_json(a)}};
}

json threshold_json(Threshold const& t)
{
    if (t.kind == Threshold::Kind::Real) { return json {{"real", t.value}}; }
    return threshold_text(t);
}

// ---- reading ----

class Reader {
public:
    explicit Reader(TierRegistry const& reg) : reg_(reg) { }

    Configuration document(json const& doc)
    {
        object(doc, "$", {"version", "threshold", "mlc"});
        auto const& version = required(doc, "$", "version");
        if (!version.is_number_integer() || version.get<std::int64_t>() != kSchemaVersion) {
            throw SchemaError("$.version", "expected " + std::to_string(kSchemaVersion));
        }
        Configuration c;
        c.threshold = threshold(required(doc, "$", "threshold"), "$.threshold");

        auto const& mlc = required(doc, "$", "mlc");
        object(mlc, "$.mlc", {"meta", "core"});
        if (mlc.contains("meta")) {
            c.meta = algorithm(mlc["meta"], "$.mlc.meta", [](AlgorithmRecord const& r) {
                return r.type == AlgorithmType::MetaMlc;
            });
        }
        auto const& core = required(mlc, "$.mlc", "core");
        object(core, "$.mlc.core", {"pt", "aa", "params", "slc"});
        bool const pt = core.contains("pt");
        if (pt == core.contains("aa")) { throw SchemaError("$.mlc.core", "exactly one of 'pt' and 'aa' is required"); }
        auto const key = std::string(pt ? "pt" : "aa");
        auto const type = pt ? AlgorithmType::ProblemTransformation : AlgorithmType::AlgorithmAdaptation;
        c.core.algorithm.id = id(core[key], "$.mlc.core." + key, [&](AlgorithmRecord const& r) { return r.type == type; });
        params(core, "$.mlc.core", c.core.algorithm);

        if (core.contains("slc")) {
            auto const& slc = core["slc"];
            std::string const at = "$.mlc.core.slc";
            object(slc, at, {"meta", "asc", "base", "params"});
            SlcChain chain;
            if (slc.contains("meta")) {
                chain.meta = algorithm(slc["meta"], at + ".meta", [](AlgorithmRecord const& r) {
                    return r.type == AlgorithmType::MetaSlc;
                });
            }
            if (slc.contains("asc")) {
                object(slc["asc"], at + ".asc", {"params"});
                chain.asc = Algorithm {"ASC", {}};
                params(slc["asc"], at + ".asc", *chain.asc);
            }
            chain.base.id = id(required(slc, at, "base"), at + ".base", [](AlgorithmRecord const& r) {
                return r.level == Level::Slc && !r.is_meta() && r.type != AlgorithmType::Preprocessing;
            });
            params(slc, at, chain.base);
            c.core.slc = std::move(chain);
        }
        return c;
    }

private:
    static void object(json const& j, std::string const& at, std::initializer_list<char const*> allowed)
    {
        if (!j.is_object()) { throw SchemaError(at, "expected an object"); }
        for (auto const& [k, v] : j.items()) {
            bool known = false;
            for (auto const* a : allowed) { known = known || k == a; }
            if (!known) { throw SchemaError(at + "." + k, "unknown field"); }
        }
    }

    static json const& required(json const& j, std::string const& at, char const* key)
    {
        if (!j.contains(key)) { throw SchemaError(at + "." + key, "missing field"); }
        return j[key];
    }

    static Threshold threshold(json const& j, std::string const& at)
    {
        if (j.is_string()) {
            auto s = j.get<std::string>();
            if (s == "PCut1") { return Threshold::pcut1(); }
            if (s == "PCutL") { return Threshold::pcutl(); }
            throw SchemaError(at, "expected PCut1, PCutL or {\"real\": x}");
        }
        object(j, at, {"real"});
        auto const& v = required(j, at, "real");
        if (!v.is_number()) { throw SchemaError(at + ".real", "expected a number"); }
        double const x = v.get<double>();
        if (!(x > 0.0 && x < 1.0)) { throw SchemaError(at + ".real", "threshold must lie strictly between 0 and 1"); }
        return Threshold::real(x);
    }

    template <typename Pred>
    std::string id(json const& j, std::string const& at, Pred ok) const
    {
        if (!j.is_string()) { throw SchemaError(at, "expected an algorithm id"); }
        auto s = j.get<std::string>();
        auto const* r = reg_.find(s);
        if (r == nullptr) { throw SchemaError(at, "unknown algorithm '" + s + "'"); }
        if (!ok(*r)) { throw SchemaError(at, "algorithm '" + s + "' is not allowed here"); }
        return s;
    }

    template <typename Pred>
    Algorithm algorithm(json const& j, std::string const& at, Pred ok) const
    {
        object(j, at, {"id", "params"});
        Algorithm a {id(required(j, at, "id"), at + ".id", ok), {}};
        params(j, at, a);
        return a;
    }

    static void params(json const& owner, std::string const& at, Algorithm& a)
    {
        if (!owner.contains("params")) { return; }
        auto const& p = owner["params"];
        if (!p.is_object()) { throw SchemaError(at + ".params", "expected an object"); }
        for (auto const& [name, v] : p.items()) {
            auto const path = at + ".params." + name;
            auto const* s = find_spec(a.id, name);
            if (s == nullptr) { throw SchemaError(path, "unknown parameter of " + a.id); }
            switch (s->kind) {
            case ParamSpec::Kind::Flag:
                if (!v.is_boolean()) { throw SchemaError(path, "expected a boolean"); }
                a.set(name, v.get<bool>());
                break;
            case ParamSpec::Kind::Int:
                if (!v.is_number_integer()) { throw SchemaError(path, "expected an integer"); }
                a.set(name, v.get<std::int64_t>());
                break;
            case ParamSpec::Kind::Real:
                if (!v.is_number()) { throw SchemaError(path, "expected a number"); }
                a.set(name, v.get<double>());
                break;
            case ParamSpec::Kind::Categorical:
                if (!v.is_string()) { throw SchemaError(path, "expected a string"); }
                a.set(name, v.get<std::string>());
                break;
            }
        }
    }

    TierRegistry const& reg_;
};

} // namespace

std::string to_json(Configuration const& c, int indent)
{
    json core = json::object();
    auto const* r = TierRegistry::bundled().find(c.core.algorithm.id);
    bool const aa = r != nullptr && r->type == AlgorithmType::AlgorithmAdaptation;
    core[aa ? "aa" : "pt"] = c.core.algorithm.id;
    core["params"] = params_json(c.core.algorithm);
    if (c.core.slc) {
        auto const& s = *c.core.slc;
        json slc = json::object();
        if (s.meta) { slc["meta"] = algorithm_json(*s.meta); }
        if (s.asc) { slc["asc"] = json {{"params", params_json(*s.asc)}}; }
        slc["base"] = s.base.id;
        slc["params"] = params_json(s.base);
        core["slc"] = std::move(slc);
    }
    json mlc = json::object();
    if (c.meta) { mlc["meta"] = algorithm_json(*c.meta); }
    mlc["core"] = std::move(core);
    json doc {{"version", kSchemaVersion}, {"threshold", threshold_json(c.threshold)}, {"mlc", std::move(mlc)}};
    return doc.dump(indent);
}

Configuration from_json(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (json::parse_error const& e) {
        throw SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
    return Reader(TierRegistry::bundled()).document(doc);
}

// ---------------------------------------------------------------------------
// names

NameTable const& NameTable::bundled()
{
    static NameTable const t = with_remap(bundled::meka_names());
    return t;
}

NameTable NameTable::with_remap(std::string_view text, TierRegistry const& reg)
{
    NameTable t;
    for (auto const& r : reg.algorithms()) { t.names_[r.id] = r.acronym; }
    auto trim = [](std::string_view s) {
        auto const b = s.find_first_not_of(" \t\r");
        if (b == std::string_view::npos) { return std::string_view {}; }
        auto const e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto const nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view {} : text.substr(nl + 1);
        if (auto h = line.find('#'); h != std::string_view::npos) { line = line.substr(0, h); }
        line = trim(line);
        if (line.empty()) { continue; }
        auto const eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw SyntaxError(line_no, 1, "'<id> = <class name>'");
        }
        auto const id = std::string(trim(line.substr(0, eq)));
        auto const name = std::string(trim(line.substr(eq + 1)));
        if (reg.find(id) == nullptr) { throw UnknownAlgorithm(id); }
        if (name.empty() || name.find_first_of(" \t\"") != std::string::npos) {
            throw SyntaxError(line_no, static_cast<int>(eq) + 2, "a class name without spaces");
        }
        t.names_[id] = name;
    }
    for (auto const& [id, name] : t.names_) {
        auto const level = reg.at(id).level;
        if (!t.ids_.emplace(std::pair {level, name}, id).second) {
            throw Error("command name '" + name + "' is used by two algorithms of the same level");
        }
    }
    return t;
}

std::string const& NameTable::name(std::string const& id) const
{
    auto it = names_.find(id);
    if (it == names_.end()) { throw UnknownAlgorithm(id); }
    return it->second;
}

std::string const* NameTable::id_for(std::string const& name, Level level) const
{
    auto it = ids_.find({level, name});
    return it == ids_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// commands

namespace {

std::string quote_arg(std::string const& s)
{
    if (!s.empty() && s.find_first_of(" \t\"\\") == std::string::npos) { return s; }
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') { out += '\\'; }
        out += ch;
    }
    return out + "\"";
}

void option_tokens(ParamSpec const& s, Value const& v, std::vector<std::string>& out)
{
    if (s.kind == ParamSpec::Kind::Flag) {
        if (std::get<bool>(v)) { out.push_back(s.cli_flag); }
        return;
    }
    if (s.cli_flag.empty()) {
        out.push_back("-" + value_text(v));
        return;
    }
    out.push_back(s.cli_flag);
    out.push_back(value_text(v));
}

std::vector<std::string> own_options(Algorithm const& a)
{
    std::vector<std::string> out;
    for (auto const& s : describe(a.id)) {
        auto const* p = a.find(s.name);
        if (p == nullptr) { continue; }
        if (s.sub.empty()) {
            option_tokens(s, p->value, out);
            continue;
        }
        // a value carrying its own options travels as one quoted argument
        std::vector<std::string> inner {value_text(p->value)};
        for (auto const& sub : s.sub) {
            if (auto const* q = a.find(sub.name)) { option_tokens(sub, q->value, inner); }
        }
        std::string joined;
        for (auto const& t : inner) { joined += (joined.empty() ? "" : " ") + t; }
        out.push_back(s.cli_flag);
        out.push_back(quote_arg(joined));
    }
    for (auto& t : out) {
        if (t.front() != '-' && t.front() != '"') { t = quote_arg(t); }
    }
    return out;
}

bool takes_child(AlgorithmRecord const& r)
{
    return r.is_meta() || r.type == AlgorithmType::ProblemTransformation || r.type == AlgorithmType::Preprocessing;
}

std::vector<std::string> tokenize(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) { ++i; }
        if (i >= s.size()) { break; }
        std::string tok;
        if (s[i] == '"') {
            ++i;
            bool closed = false;
            while (i < s.size()) {
                char const ch = s[i++];
                if (ch == '\\' && i < s.size()) {
                    tok += s[i++];
                } else if (ch == '"') {
                    closed = true;
                    break;
                } else {
                    tok += ch;
                }
            }
            if (!closed) { throw SchemaError("command", "unterminated quote"); }
        } else {
            while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\n' && s[i] != '\r') { tok += s[i++]; }
        }
        out.push_back(std::move(tok));
    }
    return out;
}

class CommandParser {
public:
    CommandParser(NameTable const& names, TierRegistry const& reg) : names_(names), reg_(reg) { }

    Configuration run(std::string_view command)
    {
        auto toks = tokenize(command);
        if (toks.size() < 3 || toks[1] != "-threshold") {
            throw SchemaError("command", "expected '<name> -threshold <t> ...'");
        }
        Configuration c;
        if (toks[2] == "PCut1") {
            c.threshold = Threshold::pcut1();
        } else if (toks[2] == "PCutL") {
            c.threshold = Threshold::pcutl();
        } else if (auto v = parse_real(toks[2]); v && *v > 0.0 && *v < 1.0) {
            c.threshold = Threshold::real(*v);
        } else {
            throw SchemaError("command.threshold", "expected PCut1, PCutL or a number in (0, 1)");
        }
        std::vector<std::string> rest(toks.begin() + 3, toks.end());
        std::string name = toks[0];
        Level level = Level::Mlc;
        std::string path = "command";
        for (;;) {
            auto const* id = names_.id_for(name, level);
            if (id == nullptr) { throw SchemaError(path, "unknown algorithm name '" + name + "'"); }
            auto const& r = reg_.at(*id);
            Algorithm a {r.id, {}};
            auto child = options(a, r, rest, path + "." + name);
            place(c, r, std::move(a), path);
            if (!child) { break; }
            level = r.level == Level::Mlc && r.is_meta() ? Level::Mlc : Level::Slc;
            name = child->first;
            rest = std::move(child->second);
            path += "." + r.id;
        }
        return c;
    }

private:
    void place(Configuration& c, AlgorithmRecord const& r, Algorithm a, std::string const& path) const
    {
        auto misplaced = [&] { return SchemaError(path, r.id + " cannot appear at this position"); };
        if (r.level == Level::Mlc) {
            if (r.is_meta()) {
                if (c.meta || !c.core.algorithm.id.empty()) { throw misplaced(); }
                c.meta = std::move(a);
            } else {
                if (!c.core.algorithm.id.empty()) { throw misplaced(); }
                c.core.algorithm = std::move(a);
            }
            return;
        }
        if (c.core.algorithm.id.empty() || reg_.at(c.core.algorithm.id).type != AlgorithmType::ProblemTransformation) {
            throw misplaced();
        }
        if (!c.core.slc) { c.core.slc.emplace(); }
        auto& s = *c.core.slc;
        if (!s.base.id.empty()) { throw misplaced(); }
        if (r.is_meta()) {
            if (s.meta || s.asc) { throw misplaced(); }
            s.meta = std::move(a);
        } else if (r.type == AlgorithmType::Preprocessing) {
            if (s.asc) { throw misplaced(); }
            s.asc = std::move(a);
        } else {
            s.base = std::move(a);
        }
    }

    static void option(Algorithm& a, ParamSpec const& s, std::vector<std::string> const& toks, std::size_t& i,
                       std::string const& path)
    {
        auto next = [&]() -> std::string const& {
            if (i + 1 >= toks.size()) { throw SchemaError(path, "option " + toks[i] + " needs a value"); }
            return toks[++i];
        };
        switch (s.kind) {
        case ParamSpec::Kind::Flag: a.set(s.name, true); break;
        case ParamSpec::Kind::Int: {
            auto const& t = next();
            auto v = parse_int(t);
            if (!v) { throw SchemaError(path + "." + s.name, "expected an integer, got '" + t + "'"); }
            a.set(s.name, *v);
            break;
        }
        case ParamSpec::Kind::Real: {
            auto const& t = next();
            auto v = parse_real(t);
            if (!v) { throw SchemaError(path + "." + s.name, "expected a number, got '" + t + "'"); }
            a.set(s.name, *v);
            break;
        }
        case ParamSpec::Kind::Categorical: {
            if (s.cli_flag.empty()) {
                a.set(s.name, toks[i].substr(1));
                break;
            }
            auto const& t = next();
            if (s.sub.empty()) {
                a.set(s.name, t);
                break;
            }
            auto inner = tokenize(t);
            if (inner.empty()) { throw SchemaError(path + "." + s.name, "empty value"); }
            a.set(s.name, inner[0]);
            for (std::size_t j = 1; j < inner.size(); ++j) {
                auto sub = std::find_if(s.sub.begin(), s.sub.end(), [&](ParamSpec const& x) { return x.cli_flag == inner[j]; });
                if (sub == s.sub.end()) {
                    throw SchemaError(path + "." + s.name, "unknown option '" + inner[j] + "'");
                }
                option(a, *sub, inner, j, path + "." + s.name);
            }
            break;
        }
        }
    }

    using Child = std::optional<std::pair<std::string, std::vector<std::string>>>;

    static Child options(Algorithm& a, AlgorithmRecord const& r, std::vector<std::string> const& toks,
                         std::string const& path)
    {
        auto const& specs = describe(a.id);
        for (std::size_t i = 0; i < toks.size(); ++i) {
            auto const& t = toks[i];
            if (t == "-W" && takes_child(r)) {
                if (i + 1 >= toks.size()) { throw SchemaError(path, "-W needs a name"); }
                Child child {std::pair {toks[i + 1], std::vector<std::string> {}}};
                if (i + 2 < toks.size()) {
                    if (toks[i + 2] != "--") { throw SchemaError(path, "expected '--' after -W " + toks[i + 1]); }
                    child->second.assign(toks.begin() + static_cast<std::ptrdiff_t>(i) + 3, toks.end());
                }
                return child;
            }
            auto s = std::find_if(specs.begin(), specs.end(), [&](ParamSpec const& x) {
                if (!x.cli_flag.empty()) { return x.cli_flag == t; }
                return t.size() > 1 && t[0] == '-' &&
                       std::find(x.values.begin(), x.values.end(), t.substr(1)) != x.values.end();
            });
            if (s == specs.end()) { throw SchemaError(path, "unknown option '" + t + "' for " + a.id); }
            option(a, *s, toks, i, path);
        }
        if (takes_child(r)) { throw SchemaError(path, a.id + " needs an inner algorithm (-W)"); }
        return std::nullopt;
    }

    NameTable const& names_;
    TierRegistry const& reg_;
};

} // namespace

std::string to_meka_command(Configuration const& c, NameTable const& names)
{
    auto report = validate_without_context(c);
    if (!report.valid()) {
        throw InvalidConfiguration("cannot emit a command: " + report.violations.front().code + " " +
                                   report.violations.front().message);
    }
    std::vector<Algorithm const*> layers;
    if (c.meta) { layers.push_back(&*c.meta); }
    layers.push_back(&c.core.algorithm);
    if (c.core.slc) {
        if (c.core.slc->meta) { layers.push_back(&*c.core.slc->meta); }
        if (c.core.slc->asc) { layers.push_back(&*c.core.slc->asc); }
        layers.push_back(&c.core.slc->base);
    }
    // options of layer i, with the delegation to layer i+1
    auto options = [&](std::size_t i, auto const& self) -> std::vector<std::string> {
        auto out = own_options(*layers[i]);
        if (i + 1 < layers.size()) {
            out.push_back("-W");
            out.push_back(names.name(layers[i + 1]->id));
            auto inner = self(i + 1, self);
            if (!inner.empty()) {
                out.push_back("--");
                out.insert(out.end(), inner.begin(), inner.end());
            }
        }
        return out;
    };
    std::string cmd = names.name(layers[0]->id) + " -threshold " + threshold_text(c.threshold);
    for (auto const& t : options(0, options)) { cmd += " " + t; }
    return cmd;
}

Configuration from_meka_command(std::string_view command, NameTable const& names)
{
    return CommandParser(names, TierRegistry::bundled()).run(command);
}

} // namespace mlcspace
