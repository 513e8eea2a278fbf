#ifndef REDUCTION_ENGINE_H
#define REDUCTION_ENGINE_H

#include <stdint.h>
#include <stddef.h>

typedef enum RfeMode {
  RFE_MODE_STRICT = 0,
  RFE_MODE_RELAXED = 1,
} RfeMode;

typedef enum RfeStatus {
  RFE_STATUS_OK = 0,
  RFE_STATUS_NULL_POINTER = 1,
  RFE_STATUS_INVALID_ARGUMENT = 2,
  RFE_STATUS_PARSE_ERROR = 3,
  RFE_STATUS_NOT_A_DOMAIN = 4,
  RFE_STATUS_NOT_FOUND = 5,
  RFE_STATUS_PRECISION = 6,
  RFE_STATUS_INTERNAL = 7,
  RFE_STATUS_PANIC = 8,
} RfeStatus;

// A loaded presentation with its constraints and integer specialization.
typedef struct RfeEngine RfeEngine;

// Maps found by [`rfe_engine_find_maps`], in ascending prime order.
typedef struct RfeMapList RfeMapList;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next failing call on the same thread.
const char *rfe_last_error(void);

// Library version as a static NUL-terminated string.
const char *rfe_version(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void rfe_string_free(char *s);

// Loads a JSON spec and specializes its transcendentals with `seed`.
//
// # Safety
// `spec_json` must be a NUL-terminated string; `out` must be writable.
enum RfeStatus rfe_engine_new(const char *spec_json, uint64_t seed, struct RfeEngine **out);

// # Safety
// `engine` must come from [`rfe_engine_new`] and not be used afterwards.
void rfe_engine_free(struct RfeEngine *engine);

// Degree of the primitive-element polynomial `f_theta`.
//
// # Safety
// `engine` must be a live handle; `out` must be writable.
enum RfeStatus rfe_engine_degree(const struct RfeEngine *engine, uintptr_t *out);

// Scans primes in `[p_min, p_max]` for up to `max_maps` verified maps.
// Finding none is success with an empty list.
//
// # Safety
// `engine` must be a live handle; `out` must be writable.
enum RfeStatus rfe_engine_find_maps(const struct RfeEngine *engine,
                                    enum RfeMode mode,
                                    uint64_t p_min,
                                    uint64_t p_max,
                                    uintptr_t max_maps,
                                    struct RfeMapList **out);

// # Safety
// `list` must be a live handle or null.
uintptr_t rfe_map_list_len(const struct RfeMapList *list);

// Prime and root `a` of map `index`.
//
// # Safety
// `list` must be a live handle; `p` and `a` must be writable.
enum RfeStatus rfe_map_get(const struct RfeMapList *list,
                           uintptr_t index,
                           uint64_t *p,
                           uint64_t *a);

// Image of the generator `name` under map `index`.
//
// # Safety
// `list` must be a live handle, `name` NUL-terminated, `out` writable.
enum RfeStatus rfe_map_image(const struct RfeMapList *list,
                             uintptr_t index,
                             const char *name,
                             uint64_t *out);

// Image of the expression `expr` under map `index`.
//
// # Safety
// Handles must be live and from the same engine; `expr` NUL-terminated;
// `out` writable.
enum RfeStatus rfe_map_apply(const struct RfeEngine *engine,
                             const struct RfeMapList *list,
                             uintptr_t index,
                             const char *expr,
                             uint64_t *out);

// The whole list as a JSON array.
//
// # Safety
// `list` must be a live handle; `out` writable.
enum RfeStatus rfe_map_list_to_json(const struct RfeMapList *list, char **out);

// # Safety
// `list` must come from [`rfe_engine_find_maps`] and not be used afterwards.
void rfe_map_list_free(struct RfeMapList *list);

// Factorization-pattern counts of `sum coeffs[k] z^k` modulo primes up to
// `bound`, as a JSON object. `predict` may be null.
//
// # Safety
// `coeffs` must point to `len` values; `predict` null or NUL-terminated;
// `out` writable.
enum RfeStatus rfe_density_scan(const int64_t *coeffs,
                                uintptr_t len,
                                uint64_t bound,
                                const char *predict,
                                char **out);

// Runs a harness described by a JSON object such as
// `{"application": "sumprod", "size": 8, "trials": 50, "seed": 42}` and
// returns the report as JSON. `passed` is set to 1 when no trial failed
// and at least one was conclusive.
//
// # Safety
// `config_json` must be NUL-terminated; `out` and `passed` writable.
enum RfeStatus rfe_harness_run(const char *config_json, char **out, int32_t *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REDUCTION_ENGINE_H */
