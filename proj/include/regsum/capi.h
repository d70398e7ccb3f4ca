#ifndef REGSUM_CAPI_H
#define REGSUM_CAPI_H

/* C interface to the regular-integer summation library. All heavy entry
 * points take a JSON config and return a JSON response so the surface stays
 * small and ABI-stable; a few exact kernels are exposed directly. */

#include <stdint.h>

#if defined(_WIN32)
#define REGSUM_API __declspec(dllexport)
#else
#define REGSUM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum regsum_status {
    REGSUM_OK = 0,
    REGSUM_ERR_MISMATCH = 1, /* a verification found unequal sides */
    REGSUM_ERR_CONFIG = 2,   /* bad option, unknown name, invalid range */
    REGSUM_ERR_DOMAIN = 3,   /* argument outside a kernel's domain */
    REGSUM_ERR_RESOURCE = 4, /* allocation failure or sieve too large */
    REGSUM_ERR_INTERNAL = 5
} regsum_status;

typedef struct regsum_ctx regsum_ctx;

/* sieve_limit 0 picks the default (10^7); threads 0 uses hardware concurrency.
 * These act as defaults for JSON configs that omit the matching keys. */
REGSUM_API regsum_status regsum_ctx_new(uint64_t sieve_limit, int threads, regsum_ctx** out);
REGSUM_API void regsum_ctx_free(regsum_ctx* ctx);

REGSUM_API const char* regsum_status_str(regsum_status s);

/* Message for the most recent failing call on this context ("" if none).
 * Valid until the next call on the same context. */
REGSUM_API const char* regsum_last_error(const regsum_ctx* ctx);

/* Run one command described by a JSON object:
 *   {"command": "verify" | "sweep" | "constants" | "report", ...options...}
 * Option keys mirror the CLI flags: kind, f, eq, r, m, nmax, xmax, checkpoints,
 * mode, accum, sieve_limit, digits, output_dir, format, threads, prime_bound.
 * On return *response holds a JSON document {exit_code, summary, files, data};
 * free it with regsum_buf_free. */
REGSUM_API regsum_status regsum_run_json(regsum_ctx* ctx, const char* config_json,
                                         char** response);
REGSUM_API void regsum_buf_free(char* buf);

/* --- exact kernels --- */

/* count of regular residues mod n */
REGSUM_API regsum_status regsum_rho(regsum_ctx* ctx, uint64_t n, uint64_t* out);
/* sum of gcd(k, n) over regular residues k mod n */
REGSUM_API regsum_status regsum_pillai_regular(regsum_ctx* ctx, uint64_t n, uint64_t* out);
/* 1 if some x satisfies k*k*x = k (mod n), else 0 */
REGSUM_API regsum_status regsum_is_regular(uint64_t k, uint64_t n, int* out);

#ifdef __cplusplus
}
#endif

#endif /* REGSUM_CAPI_H */
