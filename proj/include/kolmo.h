/* C interface to the kolmo library.
 *
 * Every function returns one of the KL_* codes. On failure the message and
 * kind of the error are available from kl_last_error / kl_last_error_kind
 * (per thread, valid until the next call). Reports are JSON documents
 * returned through a char** that the caller releases with kl_free.
 *
 * Rationals appear as "num/den" strings, bit strings as strings of '0'/'1'
 * ("" for the empty string). Optional integer parameters use -1 for "pick
 * the default"; optional strings use NULL.
 */
#ifndef KOLMO_H
#define KOLMO_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(KOLMO_BUILDING)
#define KL_API __attribute__((visibility("default")))
#else
#define KL_API
#endif

#define KL_OK 0
#define KL_E_DOMAIN 1
#define KL_E_USAGE 2
#define KL_E_INTERNAL 3

typedef struct kl_table kl_table;
typedef struct kl_model kl_model;

KL_API const char* kl_version(void);
KL_API const char* kl_last_error(void);
KL_API const char* kl_last_error_kind(void);
KL_API void kl_free(char* p);

/* ---- complexity tables ---- */

/* machine_text: key-value machine config or NULL for the reference machine
 * of `variant` ("plain", "prefix", "conditional"). condition is used by the
 * conditional variant only. */
KL_API int kl_table_build(const char* machine_text, const char* variant, unsigned n, unsigned l, uint64_t budget,
                          const char* condition, unsigned workers, kl_table** out);
KL_API int kl_table_load(const char* text, kl_table** out);
/* format: "text" (reloadable), "csv" or "json". */
KL_API int kl_table_export(const kl_table* t, const char* format, char** out);
KL_API int kl_machine_fingerprint(const char* machine_text, const char* variant, char** out);
KL_API int kl_table_query(const kl_table* t, const char* x, char** json);
KL_API void kl_table_free(kl_table* t);

/* margin -1: report the minimal margin and use it. */
KL_API int kl_bound_bn(const kl_table* t, unsigned n, int margin, char** json);
KL_API int kl_bound_halt_check(const kl_table* t, unsigned n, int margin, char** json);
KL_API int kl_string_rn(const kl_table* t, unsigned n, char** json);
/* c -1: every c in 0..n. */
KL_API int kl_count_compressible(const kl_table* t, unsigned n, int c, char** json);
/* c -1: measured constant (searched up to max_c). */
KL_API int kl_dnc(unsigned n, int c, unsigned max_c, uint64_t t_inf, char** json);

/* ---- strategies ---- */

/* Plain table for strings of length <= n, programs of length <= l. */
KL_API int kl_model_reference(unsigned n, unsigned l, uint64_t t_inf, kl_model** out);
/* Model with the protocol atoms of a QBF; p 0 = smallest valid prime. */
KL_API int kl_model_sumcheck(const char* qbf, uint64_t p, unsigned degree_cap, kl_model** out);
KL_API void kl_model_free(kl_model* m);

/* backend: "syntactic" or "semantic". */
KL_API int kl_strategy_validate(const kl_model* m, const char* tree, const char* backend, char** json);
KL_API int kl_strategy_eval(const kl_model* m, const char* tree, const char* target, const char* backend,
                            char** json);
KL_API int kl_strategy_mc(const kl_model* m, const char* tree, const char* target, const char* backend,
                          uint64_t trials, uint64_t seed, char** json);
KL_API int kl_strategy_extract(const kl_model* m, const char* tree, const char* target, char** json);
/* One fuzzed tree: {"label", "epsilon", "target", "tree"}. */
KL_API int kl_strategy_fuzz(const kl_model* m, uint64_t seed, const char* epsilon, char** json);
/* Audit of `count` fuzzed trees (and the hand-built ones when include_hand):
 * exact p, false-statement probability, extraction. */
KL_API int kl_strategy_corpus(const kl_model* m, uint64_t count, uint64_t seed, int include_hand, char** json);
/* Monte-Carlo against exact p on `count` fuzzed trees with 0 < p < 1. */
KL_API int kl_strategy_mc_corpus(const kl_model* m, uint64_t count, uint64_t seed, uint64_t trials, char** json);

/* ns, cs: comma-separated lengths and margins, one per level. */
KL_API int kl_axioms_random(const kl_model* m, const char* ns, const char* cs, const char* epsilon,
                            uint64_t samples, uint64_t seed, char** json);
KL_API int kl_experiment_independence(const kl_model* m, unsigned count, unsigned n, const char* cs,
                                      uint64_t trials, uint64_t seed, char** json);

/* ---- sumcheck ---- */

KL_API int kl_sumcheck_compile(const char* qbf, uint64_t p, unsigned degree_cap, uint64_t seed, char** json);
KL_API int kl_sumcheck_accept(const char* qbf, uint64_t p, unsigned degree_cap, double work_ceiling, char** json);
KL_API int kl_sumcheck_suite(uint64_t p, unsigned degree_cap, int measure_extraction, char** json);

#ifdef __cplusplus
}
#endif

#endif
