/* SPDX-License-Identifier: Apache-2.0 */
/*
 * C interface to the multi-label classification configuration space.
 *
 * Conventions: functions return an mlcs_status; on failure mlcs_last_error() describes the
 * problem (thread-local, valid until the next call on the same thread). Strings returned
 * through `char** out` are owned by the caller and released with mlcs_string_free. Handles are
 * immutable after creation and may be shared between threads.
 */
#ifndef MLCSPACE_H
#define MLCSPACE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MLCS_API __declspec(dllexport)
#else
#define MLCS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mlcs_status {
    MLCS_OK = 0,
    MLCS_ERR_INVALID_ARGUMENT = 1,
    MLCS_ERR_SYNTAX = 2,               /* grammar or remap file syntax */
    MLCS_ERR_DUPLICATE = 3,            /* duplicate production */
    MLCS_ERR_CONTEXT = 4,              /* labels < 2 or attributes < 1 */
    MLCS_ERR_EMPTY_TIER = 5,
    MLCS_ERR_UNKNOWN_SHAPE = 6,        /* derivation does not lower to a configuration */
    MLCS_ERR_UNKNOWN_ALGORITHM = 7,
    MLCS_ERR_SCHEMA = 8,               /* JSON document or command does not match the schema */
    MLCS_ERR_INVALID_CONFIGURATION = 9,/* hard constraint violations */
    MLCS_ERR_INTERNAL = 10
} mlcs_status;

typedef enum mlcs_tier { MLCS_TIER_SMALL = 0, MLCS_TIER_MEDIUM = 1, MLCS_TIER_LARGE = 2 } mlcs_tier;
typedef enum mlcs_mode { MLCS_MODE_NAIVE = 0, MLCS_MODE_UNIFORM_MARGINAL = 1 } mlcs_mode;
typedef enum mlcs_format { MLCS_FORMAT_JSON = 0, MLCS_FORMAT_MEKA = 1, MLCS_FORMAT_TREE = 2 } mlcs_format;

typedef struct mlcs_context {
    int64_t labels;     /* L */
    int64_t attributes; /* A */
} mlcs_context;

typedef struct mlcs_grammar mlcs_grammar;
typedef struct mlcs_config mlcs_config;

MLCS_API const char* mlcs_version(void);
MLCS_API const char* mlcs_last_error(void);
MLCS_API const char* mlcs_status_name(mlcs_status s);
MLCS_API void mlcs_string_free(char* s);

/* grammars */
MLCS_API mlcs_status mlcs_grammar_bundled(mlcs_tier tier, mlcs_grammar** out);
MLCS_API mlcs_status mlcs_grammar_parse(const char* text, size_t len, mlcs_grammar** out);
MLCS_API void mlcs_grammar_free(mlcs_grammar* g);
MLCS_API mlcs_status mlcs_grammar_print(const mlcs_grammar* g, char** out);
/* {"rules":..,"nonterminals":..,"terminals":..,"terminal_occurrences":..,"numeric_leaves":..,"unresolved":[..]} */
MLCS_API mlcs_status mlcs_grammar_stats(const mlcs_grammar* g, char** out_json);

/* sampling: one derivation, rendered as a JSON configuration, a command or the tree */
MLCS_API mlcs_status mlcs_sample(const mlcs_grammar* g, mlcs_context ctx, mlcs_mode mode, uint64_t seed,
                                 mlcs_format format, char** out);
MLCS_API mlcs_status mlcs_sample_config(const mlcs_grammar* g, mlcs_context ctx, mlcs_mode mode, uint64_t seed,
                                        mlcs_config** out);

/* configurations */
MLCS_API mlcs_status mlcs_config_from_json(const char* text, size_t len, mlcs_config** out);
MLCS_API mlcs_status mlcs_config_from_meka(const char* command, size_t len, mlcs_config** out);
MLCS_API void mlcs_config_free(mlcs_config* c);
/* indent < 0 gives the canonical one-line document */
MLCS_API mlcs_status mlcs_config_to_json(const mlcs_config* c, int indent, char** out);
/* name_remap: optional "<id> = <class name>" lines, NULL for the bundled names */
MLCS_API mlcs_status mlcs_config_to_meka(const mlcs_config* c, const char* name_remap, char** out);
/* ctx may be NULL: bounds depending on L or A are then skipped. The report is JSON:
   {"verdict":"valid"|"invalid","violations":[{"code","message","rule"}],"warnings":[..]} */
MLCS_API mlcs_status mlcs_validate(const mlcs_config* c, const mlcs_context* ctx, char** report_json,
                                   int* hard_count);

/* headline frequencies over n samples, with chi-square uniformity tests */
MLCS_API mlcs_status mlcs_stats(const mlcs_grammar* g, mlcs_context ctx, mlcs_mode mode, int64_t n, uint64_t seed,
                                unsigned threads, char** out_json);

typedef struct mlcs_search_options {
    int64_t budget;          /* maximum number of evaluations */
    uint64_t seed;
    uint64_t landscape_seed; /* surrogate landscape */
    int population_size;
    int generations;
    int tournament_size;
    double crossover_rate;
    double mutation_rate;
    int elitism;
    unsigned threads;        /* 0: MLCSPACE_THREADS or hardware concurrency */
    int random_baseline;     /* nonzero: random search instead of GGP */
} mlcs_search_options;

MLCS_API void mlcs_search_options_default(mlcs_search_options* o);
/* Searches the surrogate landscape. Result JSON: {"best":{..},"best_fitness":..,"evaluations":..,
   "generations":[{"generation","best","mean","evaluations"}]} */
MLCS_API mlcs_status mlcs_search(const mlcs_grammar* g, mlcs_context ctx, mlcs_mode mode,
                                 const mlcs_search_options* options, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* MLCSPACE_H */
