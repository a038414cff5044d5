#ifndef GIRTHFORGE_H
#define GIRTHFORGE_H

/* Generated by cbindgen from crates/girthforge-ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum GfStatus {
  GF_STATUS_OK = 0,
  GF_STATUS_INVALID_INPUT = 1,
  GF_STATUS_PRECONDITION = 2,
  GF_STATUS_NOT_A_MATCHING = 3,
  GF_STATUS_NOT_ADMISSIBLE = 4,
  GF_STATUS_VERIFICATION = 5,
  GF_STATUS_BUDGET_EXHAUSTED = 6,
  GF_STATUS_RETRY_EXHAUSTED = 7,
  GF_STATUS_MISSING_BASE_DATA = 8,
  GF_STATUS_JSON = 9,
  GF_STATUS_IO = 10,
  GF_STATUS_NULL_POINTER = 11,
  GF_STATUS_PANIC = 12,
} GfStatus;

/**
 * Opaque packing of cliques in a host hypergraph.
 */
typedef struct GfPacking GfPacking;

/**
 * Opaque rooted booster.
 */
typedef struct GfRootedBooster GfRootedBooster;

/**
 * Girth or cogirth as plain data: `value` is the smallest configuration size found,
 * or the search bound when `exceeds` is set.
 */
typedef struct GfGirth {
  size_t value;
  bool exceeds;
} GfGirth;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Description of the calling thread's most recent failure, or NULL after a success.
 * Valid until the next `gf_*` call on the same thread; do not free.
 */
const char *gf_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gf_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be NULL or a string returned by a `gf_*` function, not yet freed.
 */
void gf_string_free(char *s);

/**
 * Whether K_n^r admits a K_q^r decomposition by the divisibility conditions.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GfStatus gf_admissible(size_t n, size_t q, size_t r, bool *out);

/**
 * Parses a packing from JSON. On success `*out` owns a new handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` valid for writes.
 */
enum GfStatus gf_packing_from_json(const char *json, struct GfPacking **out);

/**
 * Serializes a packing; release `*out` with `gf_string_free`.
 *
 * # Safety
 * `p` must be a live handle and `out` valid for writes.
 */
enum GfStatus gf_packing_to_json(const struct GfPacking *p, char **out);

/**
 * # Safety
 * `p` must be NULL or a handle from this library, not yet freed.
 */
void gf_packing_free(struct GfPacking *p);

/**
 * Number of cliques in the packing.
 *
 * # Safety
 * `p` must be a live handle and `out` valid for writes.
 */
enum GfStatus gf_packing_len(const struct GfPacking *p, size_t *out);

/**
 * Whether the packing covers every host edge.
 *
 * # Safety
 * `p` must be a live handle and `out` valid for writes.
 */
enum GfStatus gf_packing_is_decomposition(const struct GfPacking *p, bool *out);

/**
 * Girth of the packing, searching configurations of size up to `gmax`.
 *
 * # Safety
 * `p` must be a live handle and `out` valid for writes.
 */
enum GfStatus gf_packing_girth(const struct GfPacking *p, size_t gmax, struct GfGirth *out);

/**
 * Cogirth of two packings on the same host.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` valid for writes.
 */
enum GfStatus gf_packing_cogirth(const struct GfPacking *a,
                                 const struct GfPacking *b,
                                 size_t gmax,
                                 struct GfGirth *out);

/**
 * Runs the generation pipeline on K_n^r. With `complete`, asks for a full decomposition
 * and fails with `GF_STATUS_NOT_ADMISSIBLE` for inadmissible n; a decomposition that is
 * not reached within the budget yields the best partial packing with status OK.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GfStatus gf_generate(size_t n,
                          size_t q,
                          size_t r,
                          size_t g,
                          uint64_t seed,
                          bool complete,
                          uint64_t budget_ms,
                          struct GfPacking **out);

/**
 * Builds a rooted booster whose rooted girth exceeds `g`. Uniformity 3 and above need
 * base data and fail with `GF_STATUS_MISSING_BASE_DATA`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GfStatus gf_booster_build(size_t q,
                               size_t r,
                               size_t g,
                               uint64_t seed,
                               struct GfRootedBooster **out);

/**
 * # Safety
 * `b` must be a live handle and `out` valid for writes.
 */
enum GfStatus gf_booster_to_json(const struct GfRootedBooster *b, char **out);

/**
 * Number of booster edges outside the root.
 *
 * # Safety
 * `b` must be a live handle and `out` valid for writes.
 */
enum GfStatus gf_booster_edge_count(const struct GfRootedBooster *b, size_t *out);

/**
 * Rooted girth of the booster, searching up to `gmax`.
 *
 * # Safety
 * `b` must be a live handle and `out` valid for writes.
 */
enum GfStatus gf_booster_rooted_girth(const struct GfRootedBooster *b,
                                      size_t gmax,
                                      struct GfGirth *out);

/**
 * # Safety
 * `b` must be NULL or a handle from this library, not yet freed.
 */
void gf_booster_free(struct GfRootedBooster *b);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GIRTHFORGE_H */
