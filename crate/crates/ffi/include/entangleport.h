#ifndef ENTANGLEPORT_H
#define ENTANGLEPORT_H

/* Generated by cbindgen from entangleport-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a call into this library.
 */
typedef enum EpStatus {
  /**
   * The call succeeded and all checks passed.
   */
  EP_STATUS_OK = 0,
  /**
   * The call ran to completion but a verification check failed; any
   * produced report is still valid and describes the failure.
   */
  EP_STATUS_CHECK_FAILED = 1,
  /**
   * A parameter or input was rejected.
   */
  EP_STATUS_INVALID_INPUT = 2,
  /**
   * The library panicked internally.
   */
  EP_STATUS_INTERNAL = 3,
} EpStatus;

/**
 * Collective operation selector for [`ep_hub_run`].
 */
typedef enum EpUnitaryKind {
  /**
   * A Haar-random unitary derived from the run seed.
   */
  EP_UNITARY_KIND_HAAR = 0,
  /**
   * The identity; the protocol still pays full teleportation cost.
   */
  EP_UNITARY_KIND_IDENTITY = 1,
  /**
   * The pairwise SWAP on adjacent qubit pairs; lab count must be even.
   */
  EP_UNITARY_KIND_PAIRWISE_SWAP = 2,
} EpUnitaryKind;

/**
 * Opaque protocol report handle.
 */
typedef struct EpReport EpReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Execute the hub protocol on a fresh star network of `num_labs` labs with
 * seeded random product inputs.
 *
 * With `exhaustive` set, every correction branch is verified; that is
 * limited to `num_labs <= 3`. On `EP_STATUS_OK` or `EP_STATUS_CHECK_FAILED`
 * a report handle is written to `out_report`; release it with
 * [`ep_report_free`].
 *
 * # Safety
 * `out_report` must be a valid pointer.
 */
enum EpStatus ep_hub_run(uint32_t num_labs,
                         uint64_t seed,
                         enum EpUnitaryKind unitary,
                         bool exhaustive,
                         struct EpReport **out_report);

/**
 * Worst-case fidelity against direct application; 0 on a null handle.
 *
 * # Safety
 * `report` must be null or a handle from [`ep_hub_run`].
 */
double ep_report_fidelity(const struct EpReport *report);

/**
 * Total ebits consumed; 0 on a null handle.
 *
 * # Safety
 * `report` must be null or a handle from [`ep_hub_run`].
 */
uint64_t ep_report_ebits_total(const struct EpReport *report);

/**
 * Total classical bits sent; 0 on a null handle.
 *
 * # Safety
 * `report` must be null or a handle from [`ep_hub_run`].
 */
uint64_t ep_report_cbits_total(const struct EpReport *report);

/**
 * Number of correction branches the run verified; 0 on a null handle.
 *
 * # Safety
 * `report` must be null or a handle from [`ep_hub_run`].
 */
uint64_t ep_report_branches_verified(const struct EpReport *report);

/**
 * Whether the entanglement monotonicity audit passed; false on null.
 *
 * # Safety
 * `report` must be null or a handle from [`ep_hub_run`].
 */
bool ep_report_audit_pass(const struct EpReport *report);

/**
 * Whether fidelity, cost, and audit checks all passed; false on null.
 *
 * # Safety
 * `report` must be null or a handle from [`ep_hub_run`].
 */
bool ep_report_checks_pass(const struct EpReport *report);

/**
 * Render the full report as JSON. Release with [`ep_string_free`].
 * Returns null on a null handle.
 *
 * # Safety
 * `report` must be null or a handle from [`ep_hub_run`].
 */
char *ep_report_to_json(const struct EpReport *report);

/**
 * Release a report handle. Null is ignored.
 *
 * # Safety
 * `report` must be null or an unreleased handle from [`ep_hub_run`].
 */
void ep_report_free(struct EpReport *report);

/**
 * Run the two-lab swap experiment; writes the lab-cut ebit count before
 * (0) and after (2) the cross-lab SWAP.
 *
 * # Safety
 * `out_before` and `out_after` must be valid pointers.
 */
enum EpStatus ep_two_ebit_experiment(double *out_before, double *out_after);

/**
 * Run the pairwise-swap experiment on an even number of labs; writes the
 * odd/even-cut ebit count before (0) and after (`num_labs`) the operation.
 *
 * # Safety
 * `out_before` and `out_after` must be valid pointers.
 */
enum EpStatus ep_ps_experiment(uint32_t num_labs, double *out_before, double *out_after);

/**
 * Check the even-N lower bound for a given total entanglement in ebits.
 *
 * `out_satisfied` is required; `out_cut_weight` and `out_required` are
 * written when non-null. An unsatisfied bound is still `EP_STATUS_OK`; the
 * verdict is the output.
 *
 * # Safety
 * `out_satisfied` must be a valid pointer; the other outputs must each be
 * null or valid.
 */
enum EpStatus ep_bound_check(uint32_t num_labs,
                             double total_ebits,
                             bool *out_satisfied,
                             double *out_cut_weight,
                             double *out_required);

/**
 * Render the star resource graph (or its permutation-symmetrized form) in
 * DOT format. Release the string with [`ep_string_free`].
 *
 * # Safety
 * `out_dot` must be a valid pointer.
 */
enum EpStatus ep_graph_dot(uint32_t num_labs, bool symmetrized, char **out_dot);

/**
 * Describe the last error on this thread, or null if there is none.
 * Release with [`ep_string_free`].
 */
char *ep_last_error_message(void);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or an unreleased string from this library.
 */
void ep_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTANGLEPORT_H */
