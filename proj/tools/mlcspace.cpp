// SPDX-License-Identifier: Apache-2.0
// mlcspace: command-line front end over the C API.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlcspace/mlcspace.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;

// Carries an exit code out of a subcommand.
struct Failure {
    int code;
    std::string message;
};

void check(mlcs_status s)
{
    if (s == MLCS_OK) { return; }
    int const code = s == MLCS_ERR_INVALID_CONFIGURATION ? kExitInvalid : kExitUsage;
    throw Failure {code, std::string(mlcs_status_name(s)) + ": " + mlcs_last_error()};
}

struct Text {
    char* p {nullptr};
    Text() = default;
    Text(Text const&) = delete;
    Text& operator=(Text const&) = delete;
    ~Text() { mlcs_string_free(p); }
    std::string str() const { return p == nullptr ? std::string() : std::string(p); }
};

struct GrammarDeleter {
    void operator()(mlcs_grammar* g) const { mlcs_grammar_free(g); }
};
struct ConfigDeleter {
    void operator()(mlcs_config* c) const { mlcs_config_free(c); }
};
using GrammarPtr = std::unique_ptr<mlcs_grammar, GrammarDeleter>;
using ConfigPtr = std::unique_ptr<mlcs_config, ConfigDeleter>;

std::string read_file(std::string const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) { throw Failure {kExitUsage, "cannot read " + path}; }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, mlcs_tier> const kTiers {
    {"small", MLCS_TIER_SMALL}, {"medium", MLCS_TIER_MEDIUM}, {"large", MLCS_TIER_LARGE}};
std::map<std::string, mlcs_mode> const kModes {
    {"naive", MLCS_MODE_NAIVE}, {"uniform-marginal", MLCS_MODE_UNIFORM_MARGINAL}};
std::map<std::string, mlcs_format> const kFormats {
    {"json", MLCS_FORMAT_JSON}, {"meka", MLCS_FORMAT_MEKA}, {"tree", MLCS_FORMAT_TREE}};

struct GrammarArgs {
    std::string tier {"large"};
    std::string file;

    void add(CLI::App* cmd)
    {
        cmd->add_option("--tier", tier, "bundled tier")->check(CLI::IsMember({"small", "medium", "large"}));
        cmd->add_option("--grammar", file, "BNF file used instead of the bundled grammar")->check(CLI::ExistingFile);
    }

    GrammarPtr load() const
    {
        mlcs_grammar* g = nullptr;
        if (file.empty()) {
            check(mlcs_grammar_bundled(kTiers.at(tier), &g));
        } else {
            auto text = read_file(file);
            check(mlcs_grammar_parse(text.data(), text.size(), &g));
        }
        return GrammarPtr(g);
    }
};

struct ContextArgs {
    std::int64_t labels {0};
    std::int64_t attributes {0};

    void add(CLI::App* cmd, bool required = true)
    {
        auto* l = cmd->add_option("--labels,-L", labels, "number of labels L");
        auto* a = cmd->add_option("--attributes,-A", attributes, "number of attributes A");
        if (required) {
            l->required();
            a->required();
        }
    }

    [[nodiscard]] mlcs_context get() const { return {labels, attributes}; }
};

ConfigPtr load_config(std::string const& path)
{
    auto text = read_file(path);
    auto const first = text.find_first_not_of(" \t\r\n");
    mlcs_config* c = nullptr;
    if (first != std::string::npos && text[first] == '{') {
        check(mlcs_config_from_json(text.data(), text.size(), &c));
    } else {
        while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) { text.pop_back(); }
        check(mlcs_config_from_meka(text.data(), text.size(), &c));
    }
    return ConfigPtr(c);
}

void print_frequencies(json const& level, double expected)
{
    for (auto const& [id, v] : level.items()) {
        std::printf("  %-14s %8lld  %.5f  %+.5f\n", id.c_str(), v["count"].get<long long>(),
                    v["frequency"].get<double>(), v["frequency"].get<double>() - expected);
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app {"Sample, validate and search the multi-label classification configuration space"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (0: automatic)")->envname("MLCSPACE_THREADS");

    // parse
    auto* parse = app.add_subcommand("parse", "parse a grammar and print it, or its statistics");
    GrammarArgs parse_grammar;
    bool parse_stats = false;
    parse_grammar.add(parse);
    parse->add_flag("--stats", parse_stats, "print rule/symbol counts instead of the grammar");

    // sample
    auto* sample = app.add_subcommand("sample", "draw configurations");
    GrammarArgs sample_grammar;
    ContextArgs sample_ctx;
    std::uint64_t sample_seed = 1;
    std::int64_t sample_n = 1;
    std::string sample_mode = "uniform-marginal";
    std::string sample_format = "json";
    sample_grammar.add(sample);
    sample_ctx.add(sample);
    sample->add_option("--seed", sample_seed, "seed of the first sample; sample i uses seed + i");
    sample->add_option("--n", sample_n, "number of samples")->check(CLI::PositiveNumber);
    sample->add_option("--mode", sample_mode)->check(CLI::IsMember({"naive", "uniform-marginal"}));
    sample->add_option("--format", sample_format)->check(CLI::IsMember({"json", "meka", "tree"}));

    // validate
    auto* validate = app.add_subcommand("validate", "check a configuration (JSON or command) against the constraints");
    std::string validate_config;
    ContextArgs validate_ctx;
    validate->add_option("config,--config", validate_config, "configuration file")->required()->check(CLI::ExistingFile);
    validate_ctx.add(validate);

    // serialize
    auto* serialize = app.add_subcommand("serialize", "convert a configuration between JSON and command form");
    std::string serialize_config;
    std::string serialize_format = "meka";
    std::string serialize_names;
    serialize->add_option("config,--config", serialize_config, "configuration file")->required()->check(CLI::ExistingFile);
    serialize->add_option("--format", serialize_format)->check(CLI::IsMember({"json", "meka"}));
    serialize->add_option("--names", serialize_names, "'<id> = <class name>' remap file")->check(CLI::ExistingFile);

    // stats
    auto* stats = app.add_subcommand("stats", "headline algorithm frequencies over many samples");
    GrammarArgs stats_grammar;
    ContextArgs stats_ctx;
    std::int64_t stats_n = 100000;
    std::string stats_mode = "uniform-marginal";
    std::uint64_t stats_seed = 1;
    bool stats_json = false;
    stats_grammar.add(stats);
    stats_ctx.add(stats);
    stats->add_option("--n", stats_n)->check(CLI::PositiveNumber);
    stats->add_option("--mode", stats_mode)->check(CLI::IsMember({"naive", "uniform-marginal"}));
    stats->add_option("--seed", stats_seed);
    stats->add_flag("--json", stats_json, "print the raw JSON document");

    // search
    auto* search = app.add_subcommand("search", "grammar-guided genetic programming on the surrogate landscape");
    GrammarArgs search_grammar;
    ContextArgs search_ctx;
    mlcs_search_options opts;
    mlcs_search_options_default(&opts);
    std::string search_mode = "uniform-marginal";
    std::string baseline;
    search_grammar.add(search);
    search_ctx.add(search);
    search->add_option("--budget", opts.budget, "maximum evaluations")->required()->check(CLI::PositiveNumber);
    search->add_option("--seed", opts.seed);
    search->add_option("--landscape-seed", opts.landscape_seed);
    search->add_option("--population", opts.population_size)->check(CLI::PositiveNumber);
    search->add_option("--generations", opts.generations)->check(CLI::NonNegativeNumber);
    search->add_option("--tournament", opts.tournament_size)->check(CLI::PositiveNumber);
    search->add_option("--crossover-rate", opts.crossover_rate)->check(CLI::Range(0.0, 1.0));
    search->add_option("--mutation-rate", opts.mutation_rate)->check(CLI::Range(0.0, 1.0));
    search->add_option("--elitism", opts.elitism)->check(CLI::NonNegativeNumber);
    search->add_option("--mode", search_mode)->check(CLI::IsMember({"naive", "uniform-marginal"}));
    search->add_option("--baseline", baseline, "run random search instead")->check(CLI::IsMember({"random"}));

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int const rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*parse) {
            auto g = parse_grammar.load();
            Text out;
            if (parse_stats) {
                check(mlcs_grammar_stats(g.get(), &out.p));
                std::cout << json::parse(out.str()).dump(2) << "\n";
            } else {
                check(mlcs_grammar_print(g.get(), &out.p));
                std::cout << out.str();
            }
            return kExitOk;
        }
        if (*sample) {
            auto g = sample_grammar.load();
            for (std::int64_t i = 0; i < sample_n; ++i) {
                Text out;
                check(mlcs_sample(g.get(), sample_ctx.get(), kModes.at(sample_mode),
                                  sample_seed + static_cast<std::uint64_t>(i), kFormats.at(sample_format), &out.p));
                std::cout << out.str();
                if (out.str().empty() || out.str().back() != '\n') { std::cout << "\n"; }
            }
            return kExitOk;
        }
        if (*validate) {
            auto c = load_config(validate_config);
            auto ctx = validate_ctx.get();
            Text report;
            int hard = 0;
            check(mlcs_validate(c.get(), &ctx, &report.p, &hard));
            std::cout << json::parse(report.str()).dump(2) << "\n";
            return hard > 0 ? kExitInvalid : kExitOk;
        }
        if (*serialize) {
            auto c = load_config(serialize_config);
            Text out;
            if (serialize_format == "json") {
                check(mlcs_config_to_json(c.get(), 2, &out.p));
            } else {
                std::string names;
                if (!serialize_names.empty()) { names = read_file(serialize_names); }
                check(mlcs_config_to_meka(c.get(), serialize_names.empty() ? nullptr : names.c_str(), &out.p));
            }
            std::cout << out.str() << "\n";
            return kExitOk;
        }
        if (*stats) {
            auto g = stats_grammar.load();
            Text out;
            check(mlcs_stats(g.get(), stats_ctx.get(), kModes.at(stats_mode), stats_n, stats_seed, threads, &out.p));
            auto j = json::parse(out.str());
            if (stats_json) {
                std::cout << j.dump(2) << "\n";
                return kExitOk;
            }
            std::printf("samples %lld, mode %s\n", j["n"].get<long long>(), j["mode"].get<std::string>().c_str());
            for (auto const* level : {"mlc", "slc"}) {
                auto const lv = std::string(level);
                auto const& chi = j[lv + "_chi_square"];
                std::printf("%s headlines (expected %.5f each, chi2 %.3f, df %d, p %.4f)\n", level,
                            j[lv + "_expected"].get<double>(), chi["statistic"].get<double>(),
                            chi["degrees_of_freedom"].get<int>(), chi["p_value"].get<double>());
                print_frequencies(j[lv], j[lv + "_expected"].get<double>());
            }
            return kExitOk;
        }
        if (*search) {
            auto g = search_grammar.load();
            opts.threads = threads;
            opts.random_baseline = baseline == "random" ? 1 : 0;
            Text out;
            check(mlcs_search(g.get(), search_ctx.get(), kModes.at(search_mode), &opts, &out.p));
            auto j = json::parse(out.str());
            for (auto const& gen : j["generations"]) { std::cout << gen.dump() << "\n"; }
            j.erase("generations");
            std::cout << j.dump() << "\n";
            return kExitOk;
        }
    } catch (Failure const& f) {
        std::cerr << "mlcspace: " << f.message << "\n";
        return f.code;
    } catch (std::exception const& e) {
        std::cerr << "mlcspace: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
