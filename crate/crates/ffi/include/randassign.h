#ifndef RANDASSIGN_H
#define RANDASSIGN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Status codes returned by every fallible function.
typedef enum RaStatus {
  RA_STATUS_OK = 0,
  RA_STATUS_NULL_POINTER = 1,
  RA_STATUS_INVALID_UTF8 = 2,
  RA_STATUS_PARSE = 3,
  RA_STATUS_INVALID_ARGUMENT = 4,
  // A rational does not fit in 64-bit numerator and denominator.
  RA_STATUS_OVERFLOW = 5,
  RA_STATUS_INTERNAL = 6,
} RaStatus;

// A doubly stochastic assignment together with the object labels of its profile.
typedef struct RaAssignment RaAssignment;

// A mechanism ready for evaluation.
typedef struct RaMechanism RaMechanism;

// A parsed preference profile.
typedef struct RaProfile RaProfile;

// Message of the last failing call on this thread, or null. Owned by the library; valid
// until the next failing call.
const char *ra_last_error_message(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void ra_string_free(char *s);

// Parses a profile in the text format `n <int>` followed by `<label>: <obj> ... <obj>` lines.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum RaStatus ra_profile_parse(const char *text, struct RaProfile **out);

// Number of agents (and objects); 0 for null.
//
// # Safety
// `profile` must be null or a live handle.
size_t ra_profile_n(const struct RaProfile *profile);

// # Safety
// `profile` must be null or a handle from [`ra_profile_parse`], freed at most once.
void ra_profile_free(struct RaProfile *profile);

// Mechanism from a command-line style spec: `ed`, `rsd`, `ps`, `sd:<order>`,
// `linear:(v1,...,vn)` or `pairwise:<path>`.
//
// # Safety
// `spec` must be a NUL-terminated string and `out` a valid pointer.
enum RaStatus ra_mechanism_parse(const char *spec, struct RaMechanism **out);

// Equal division.
//
// # Safety
// `out` must be a valid pointer.
enum RaStatus ra_mechanism_ed(struct RaMechanism **out);

// Random serial dictatorship.
//
// # Safety
// `out` must be a valid pointer.
enum RaStatus ra_mechanism_rsd(struct RaMechanism **out);

// Probabilistic serial.
//
// # Safety
// `out` must be a valid pointer.
enum RaStatus ra_mechanism_ps(struct RaMechanism **out);

// Linear mechanism for the vector `num[k]/den[k]`, `k < n`.
//
// # Safety
// `num` and `den` must point to `n` values each; `out` must be a valid pointer.
enum RaStatus ra_mechanism_linear(const int64_t *num,
                                  const int64_t *den,
                                  size_t n,
                                  struct RaMechanism **out);

// Pairwise exchange mechanism for a transfer function given in the transfer file format.
//
// # Safety
// `f_text` must be a NUL-terminated string and `out` a valid pointer.
enum RaStatus ra_mechanism_pairwise(const char *f_text, struct RaMechanism **out);

// # Safety
// `mech` must be null or a mechanism handle, freed at most once.
void ra_mechanism_free(struct RaMechanism *mech);

// Evaluates `mech` on `profile`.
//
// # Safety
// Handles must be live; `out` must be a valid pointer.
enum RaStatus ra_mechanism_evaluate(const struct RaMechanism *mech,
                                    const struct RaProfile *profile,
                                    struct RaAssignment **out);

// Size of the assignment; 0 for null.
//
// # Safety
// `a` must be null or a live handle.
size_t ra_assignment_n(const struct RaAssignment *a);

// Probability that agent `i` receives object `obj` (both 0-based) as a reduced fraction.
//
// # Safety
// `a` must be a live handle; `num` and `den` valid pointers.
enum RaStatus ra_assignment_cell(const struct RaAssignment *a,
                                 size_t i,
                                 size_t obj,
                                 int64_t *num,
                                 int64_t *den);

// TSV rendering: object tokens, then one row of fractions per agent.
//
// # Safety
// `a` must be a live handle; `out` a valid pointer. Free the string with [`ra_string_free`].
enum RaStatus ra_assignment_to_tsv(const struct RaAssignment *a, char **out);

// # Safety
// `a` must be null or an assignment handle, freed at most once.
void ra_assignment_free(struct RaAssignment *a);

// Checks `property` (`sp`, `ef`, `ete`, `neutral`, `anon`, `sep`, `swap`, `upper`, `lower`,
// `cfe`, `expost`, `ordinal`) exhaustively over all profiles of size `n`. On a violation
// `*witness` receives a description (free with [`ra_string_free`]); otherwise it is null.
// `witness` may be null when the description is not wanted.
//
// # Safety
// `mech` must be a live handle, `property` a NUL-terminated string, `holds` a valid pointer.
enum RaStatus ra_check_property(const struct RaMechanism *mech,
                                size_t n,
                                const char *property,
                                bool *holds,
                                char **witness);

// Builds and verifies the Farkas certificate that strategy-proofness, envy-freeness and
// contention-free efficiency are incompatible at n=3. `*certificate` receives the
// certificate text (rows, multipliers and the contradiction).
//
// # Safety
// `certificate` must be a valid pointer. Free the string with [`ra_string_free`].
enum RaStatus ra_certify_theorem1(char **certificate);

#endif /* RANDASSIGN_H */
