#ifndef FULLGROUP_LAB_H
#define FULLGROUP_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum FglStatus {
  FGL_STATUS_OK = 0,
  // a required pointer was null or a string was not UTF-8
  FGL_STATUS_NULL_OR_INVALID = 1,
  // malformed input or a failed validation
  FGL_STATUS_VALIDATION = 2,
  FGL_STATUS_RESOURCE_LIMIT = 3,
  FGL_STATUS_INTERNAL = 4,
  FGL_STATUS_PANIC = 5,
  // an output buffer was too small; the required size was still reported
  FGL_STATUS_BUFFER_TOO_SMALL = 6,
} FglStatus;

// An exact convolution power.
typedef struct FglDistribution FglDistribution;

// A full-group element.
typedef struct FglElement FglElement;

// A named generator set.
typedef struct FglGenerators FglGenerators;

// A symmetric step measure.
typedef struct FglMeasure FglMeasure;

// A point of a subshift.
typedef struct FglPoint FglPoint;

// A subshift together with its memoized language.
typedef struct FglSubshift FglSubshift;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failing call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *fgl_last_error(void);

// Release a string returned by this library.
//
// # Safety
// `s` must come from this library or be null.
void fgl_string_free(char *s);

// Parse a spec JSON document.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum FglStatus fgl_subshift_from_json(const char *json, struct FglSubshift **out);

// # Safety
// `s` must come from this library or be null.
void fgl_subshift_free(struct FglSubshift *s);

// Number of admissible words of length `n`.
//
// # Safety
// `s` must be a live handle; `out` must be writable.
enum FglStatus fgl_subshift_complexity(const struct FglSubshift *s, size_t n, uint64_t *out);

// Whether `word` is admissible.
//
// # Safety
// `s` must be a live handle, `word` nul-terminated, `out` writable.
enum FglStatus fgl_subshift_is_admissible(const struct FglSubshift *s, const char *word, bool *out);

// The default point of the subshift's family.
//
// # Safety
// `s` must be a live handle; `out` must be writable.
enum FglStatus fgl_point_default(const struct FglSubshift *s, struct FglPoint **out);

// # Safety
// `p` must come from this library or be null.
void fgl_point_free(struct FglPoint *p);

// Copy the letters `x_{center-radius} ..= x_{center+radius}` into `buf`
// (no terminator). `out_len` receives `2·radius + 1` even when `buf_len`
// is too small, in which case nothing is copied.
//
// # Safety
// `p` must be a live handle, `buf` valid for `buf_len` bytes, `out_len` writable.
enum FglStatus fgl_point_window(const struct FglPoint *p,
                                int64_t center,
                                size_t radius,
                                uint8_t *buf,
                                size_t buf_len,
                                size_t *out_len);

// The builtin Fibonacci generators `alpha`, `beta`, `gamma`.
//
// # Safety
// `s` must be a live handle; `out` must be writable.
enum FglStatus fgl_generators_fibonacci(const struct FglSubshift *s, struct FglGenerators **out);

// # Safety
// `g` must come from this library or be null.
void fgl_generators_free(struct FglGenerators *g);

// Number of generators, 0 for a null handle.
//
// # Safety
// `g` must be a live handle or null.
size_t fgl_generators_len(const struct FglGenerators *g);

// A copy of generator `index`.
//
// # Safety
// `g` must be a live handle; `out` must be writable.
enum FglStatus fgl_generators_get(const struct FglGenerators *g,
                                  size_t index,
                                  struct FglElement **out);

// Parse an element from `{"depth": l, "entries": [{"word": w, "k": k}]}`.
//
// # Safety
// `s` must be a live handle, `json` nul-terminated, `out` writable.
enum FglStatus fgl_element_from_json(const struct FglSubshift *s,
                                     const char *json,
                                     struct FglElement **out);

// Serialize an element; release the string with [`fgl_string_free`].
//
// # Safety
// `e` must be a live handle; `out` must be writable.
enum FglStatus fgl_element_to_json(const struct FglElement *e, char **out);

// # Safety
// `e` must come from this library or be null.
void fgl_element_free(struct FglElement *e);

// The identity of the subshift's full group.
//
// # Safety
// `s` must be a live handle; `out` must be writable.
enum FglStatus fgl_element_identity(const struct FglSubshift *s, struct FglElement **out);

// `g · h`, applying `h` first.
//
// # Safety
// `g`, `h` must be live handles; `out` must be writable.
enum FglStatus fgl_element_compose(const struct FglElement *g,
                                   const struct FglElement *h,
                                   struct FglElement **out);

// # Safety
// `g` must be a live handle; `out` must be writable.
enum FglStatus fgl_element_inverse(const struct FglElement *g, struct FglElement **out);

// # Safety
// `g`, `h` must be live handles; `out` must be writable.
enum FglStatus fgl_element_equals(const struct FglElement *g,
                                  const struct FglElement *h,
                                  bool *out);

// Canonical depth and maximal shift.
//
// # Safety
// `g` must be a live handle; both outputs must be writable.
enum FglStatus fgl_element_shape(const struct FglElement *g, size_t *depth, uint64_t *max_shift);

// `k_g` at `τ^position p`.
//
// # Safety
// `g`, `p` must be live handles; `out` must be writable.
enum FglStatus fgl_element_evaluate(const struct FglElement *g,
                                    const struct FglPoint *p,
                                    int64_t position,
                                    int64_t *out);

// Uniform measure on the generators and their inverses.
//
// # Safety
// `g` must be a live handle; `out` must be writable.
enum FglStatus fgl_measure_uniform(const struct FglGenerators *g, struct FglMeasure **out);

// # Safety
// `m` must come from this library or be null.
void fgl_measure_free(struct FglMeasure *m);

// Exact `μ^{*n}`, failing with `FGL_STATUS_RESOURCE_LIMIT` above `cap` support elements.
//
// # Safety
// `m` must be a live handle; `out` must be writable.
enum FglStatus fgl_convolution_power(const struct FglMeasure *m,
                                     size_t n,
                                     size_t cap,
                                     struct FglDistribution **out);

// # Safety
// `d` must come from this library or be null.
void fgl_distribution_free(struct FglDistribution *d);

// Support size, 0 for a null handle.
//
// # Safety
// `d` must be a live handle or null.
size_t fgl_distribution_len(const struct FglDistribution *d);

// Shannon entropy in nats.
//
// # Safety
// `d` must be a live handle; `out` must be writable.
enum FglStatus fgl_distribution_entropy(const struct FglDistribution *d, double *out);

// Probability of `g`, as a double.
//
// # Safety
// `d`, `g` must be live handles; `out` must be writable.
enum FglStatus fgl_distribution_probability(const struct FglDistribution *d,
                                            const struct FglElement *g,
                                            double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FULLGROUP_LAB_H */
