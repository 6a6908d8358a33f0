#ifndef STEKLOV_ISO_H
#define STEKLOV_ISO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SiStatus {
  SI_STATUS_OK = 0,
  SI_STATUS_NULL_POINTER = 1,
  SI_STATUS_INVALID_ARGUMENT = 2,
  SI_STATUS_PARSE = 3,
  SI_STATUS_DOMAIN = 4,
  SI_STATUS_WEIGHT = 5,
  SI_STATUS_NUMERICAL = 6,
  SI_STATUS_UNSUPPORTED = 7,
  SI_STATUS_PANIC = 8,
} SiStatus;

// Planar domain.
typedef struct SiDomain SiDomain;

// Finite element spectrum, `γ₀` first.
typedef struct SiSpectrum SiSpectrum;

// Weight record; log-convex horizons are fixed when the weight is used.
typedef struct SiWeight SiWeight;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer stays
// valid until the next call into the library on the same thread.
const char *si_last_error_message(void);

// Releases a string returned by the library.
//
// # Safety
// `s` must come from this library and not have been freed.
void si_string_free(char *s);

// Builds a domain from a JSON record such as
// `{"shape":"polygon","vertices":[[x,y],...]}` or `{"shape":"disc","radius":1}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum SiStatus si_domain_from_json(const char *json, struct SiDomain **out);

// # Safety
// `d` must come from [`si_domain_from_json`] and not have been freed.
void si_domain_free(struct SiDomain *d);

// `∫_Ω |x|^ell dx`.
//
// # Safety
// Pointers must be valid.
enum SiStatus si_domain_weighted_volume(const struct SiDomain *d, double ell, double *out);

// `∫_∂Ω |x|^k ds`.
//
// # Safety
// Pointers must be valid.
enum SiStatus si_domain_weighted_perimeter(const struct SiDomain *d, double k, double *out);

// Margin `P_k(Ω) − C |Ω|_ℓ^{(k+1)/(ℓ+2)}` of the weighted isoperimetric
// inequality in the plane.
//
// # Safety
// Pointers must be valid.
enum SiStatus si_isop_margin(const struct SiDomain *d, double k, double ell, double *out);

// Parses a weight record such as `{"kind":"power","alpha":0,"beta":0}` or
// `{"kind":"logconvex","family":"quadratic","a":1}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum SiStatus si_weight_from_json(const char *json, struct SiWeight **out);

// # Safety
// `w` must come from [`si_weight_from_json`] and not have been freed.
void si_weight_free(struct SiWeight *w);

// First nontrivial Steklov eigenvalue of the centred disc of radius `radius`.
//
// # Safety
// Pointers must be valid.
enum SiStatus si_ball_gamma1(const struct SiWeight *w, double radius, double *out);

// Finite element Steklov spectrum on a mesh of size `h`, `n_eigs` nontrivial
// eigenvalues plus `γ₀`.
//
// # Safety
// Pointers must be valid.
enum SiStatus si_solve(const struct SiDomain *d,
                       const struct SiWeight *w,
                       double h,
                       size_t n_eigs,
                       struct SiSpectrum **out);

// Number of eigenvalues held, `γ₀` included. Zero for a null handle.
//
// # Safety
// `s` must be null or a live handle.
size_t si_spectrum_len(const struct SiSpectrum *s);

// # Safety
// Pointers must be valid.
enum SiStatus si_spectrum_eigenvalue(const struct SiSpectrum *s, size_t i, double *out);

// # Safety
// `s` must come from [`si_solve`] and not have been freed.
void si_spectrum_free(struct SiSpectrum *s);

// Runs one theorem check and returns the report as JSON in `*out`, to be
// released with [`si_string_free`]. `theorem` is one of `T1.1`, `T1.2`,
// `T1.4`, `T1.5`, `C1.3`.
//
// # Safety
// Pointers must be valid; `theorem` must be NUL-terminated.
enum SiStatus si_verify_json(const char *theorem,
                             const struct SiDomain *d,
                             const struct SiWeight *w,
                             double h,
                             size_t refinements,
                             char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STEKLOV_ISO_H */
