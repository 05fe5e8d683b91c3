/* Generated by cbindgen; do not edit. */

#ifndef ZFSDMA_H
#define ZFSDMA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum ZfStatus {
  ZF_STATUS_OK = 0,
  ZF_STATUS_NULL_POINTER = 1,
  // Argument outside the domain of the operation.
  ZF_STATUS_DOMAIN = 2,
  ZF_STATUS_UNSUPPORTED = 3,
  // Malformed configuration or JSON.
  ZF_STATUS_CONFIG = 4,
  // Root finding or other numerics failed.
  ZF_STATUS_NUMERIC = 5,
  // The queue is not stable (`λ ≥ μ`).
  ZF_STATUS_UNSTABLE = 6,
  // Rate vector outside the stability region.
  ZF_STATUS_EXTERIOR = 7,
  ZF_STATUS_PANIC = 8,
  ZF_STATUS_IO = 9,
  // Output buffer too small.
  ZF_STATUS_BUFFER_TOO_SMALL = 10,
} ZfStatus;

// Delay-ratio `δ⁺` variant selector, passed as its integer value.
typedef enum ZfDeltaVariant {
  ZF_DELTA_VARIANT_GUARANTEED = 0,
  ZF_DELTA_VARIANT_RELAXED = 1,
} ZfDeltaVariant;

// Opaque stability-region handle.
typedef struct ZfPolytope ZfPolytope;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
const char *zf_last_error_message(void);

// Library version, a static string.
const char *zf_version(void);

// `Γ(m, x)/Γ(m)` for integer `m ≥ 1`.
//
// # Safety
// `out` must be valid for a write.
enum ZfStatus zf_regularized_upper_gamma(uint32_t m, double x, double *out);

// Per-queue departure rate `d(k)` with `k` of `antennas` queues scheduled.
//
// # Safety
// `out` must be valid for a write.
enum ZfStatus zf_departure_rate(size_t antennas, double power, double theta, size_t k, double *out);

// Max-weight decision for queue lengths `q[0..antennas]`, as a bitmask with
// bit `i` set when queue `i` is scheduled.
//
// # Safety
// `q` must point to `antennas` values and `out_mask` be valid for a write.
enum ZfStatus zf_max_weight_decision(size_t antennas,
                                     double power,
                                     double theta,
                                     const uint64_t *q,
                                     uint32_t *out_mask);

// Builds the stability region.
//
// # Safety
// `out` must be valid for a write. The handle must be released with
// [`zf_polytope_free`].
enum ZfStatus zf_polytope_new(size_t antennas, double power, double theta, struct ZfPolytope **out);

// # Safety
// `p` must come from [`zf_polytope_new`] and not be used afterwards. Null is
// ignored.
void zf_polytope_free(struct ZfPolytope *p);

// Number of queues of the region.
//
// # Safety
// `p` must be a live handle; `out` valid for a write.
enum ZfStatus zf_polytope_antennas(const struct ZfPolytope *p, size_t *out);

// Number of vertices, origin included.
//
// # Safety
// `p` must be a live handle; `out` valid for a write.
enum ZfStatus zf_polytope_vertex_count(const struct ZfPolytope *p, size_t *out);

// Vertex `index`: its decision bitmask and its `len = antennas` coordinates.
//
// # Safety
// `p` must be a live handle, `out_mask` valid for a write and `out_point`
// valid for `len` writes.
enum ZfStatus zf_polytope_vertex(const struct ZfPolytope *p,
                                 size_t index,
                                 uint32_t *out_mask,
                                 double *out_point,
                                 size_t len);

// Writes the index set (scheduled-queue counts that yield vertices, 0
// included) into `out[0..capacity]` and its size into `out_len`. Fails
// with `BufferTooSmall`, still setting `out_len`, when it does not fit.
//
// # Safety
// `p` must be a live handle, `out` valid for `capacity` writes and
// `out_len` for one.
enum ZfStatus zf_polytope_index_set(const struct ZfPolytope *p,
                                    size_t *out,
                                    size_t capacity,
                                    size_t *out_len);

// Whether `lambda[0..len]` lies in the region, up to `tol`.
//
// # Safety
// `p` must be a live handle, `lambda` valid for `len` reads and `out` for a
// write.
enum ZfStatus zf_polytope_contains(const struct ZfPolytope *p,
                                   const double *lambda,
                                   size_t len,
                                   double tol,
                                   bool *out);

// Largest `s` with `s·direction` in the region.
//
// # Safety
// `p` must be a live handle, `direction` valid for `len` reads and `out` for
// a write.
enum ZfStatus zf_polytope_boundary_scale(const struct ZfPolytope *p,
                                         const double *direction,
                                         size_t len,
                                         double *out);

// Feedback bits keeping every departure rate within `1−δ` of perfect CSI.
//
// # Safety
// Out-pointers must be valid for a write.
enum ZfStatus zf_feedback_bits_for_delta(size_t antennas,
                                         double power,
                                         double theta,
                                         double delta,
                                         double *out_bits_real,
                                         uint32_t *out_bits);

// Feedback bits keeping the mean delay within a factor `m` of perfect CSI
// at load margin `tau`. `variant` is a [`ZfDeltaVariant`] value.
//
// # Safety
// Out-pointers must be valid for a write.
enum ZfStatus zf_bits_for_delay_ratio(size_t antennas,
                                      double power,
                                      double theta,
                                      double m,
                                      double tau,
                                      uint32_t variant,
                                      double *out_bits_real,
                                      uint32_t *out_bits);

// Mean waiting time of Poisson(`lambda`) arrivals with geometric(`mu`)
// service.
//
// # Safety
// `out` must be valid for a write.
enum ZfStatus zf_pk_average_delay(double lambda, double mu, double *out);

// Kingman exponent of Poisson(`lambda`) arrivals with geometric(`mu`)
// service.
//
// # Safety
// `out` must be valid for a write.
enum ZfStatus zf_kingman_exponent(double lambda, double mu, double *out);

// Runs a simulation described by a JSON config and returns the metrics as a
// JSON string, to be released with [`zf_string_free`].
//
// # Safety
// `config_json` must be a NUL-terminated string and `out` valid for a write.
enum ZfStatus zf_simulate_json(const char *config_json, char **out);

// Releases a string returned by the library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void zf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZFSDMA_H */
