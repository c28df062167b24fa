/* Boundary types and functions of the oif library.
 *
 * User side: link against liboif (crates/capi) and call the oif_* functions.
 * Plugin side: export the P_* functions listed at the end, where P is the
 * symbol prefix named in the implementation's manifest.
 */
#ifndef OIF_H
#define OIF_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Implementations may return other values; they reach the
 * caller unchanged. */
enum {
    OIF_OK = 0,
    OIF_INVALID_ARGUMENT = -1,
    OIF_ALLOCATION_FAILURE = -2,
    OIF_TYPE_MISMATCH = -3,
    OIF_NOT_FOUND = -4,
    OIF_PLUGIN_FAILURE = -5,
    OIF_SOLVER_FAILURE = -6
};

/* Type tags. */
enum {
    OIF_INT = 1,
    OIF_FLOAT64 = 2,
    OIF_ARRAY_F64 = 3,
    OIF_STR = 4,
    OIF_CALLBACK = 5,
    OIF_USER_DATA = 6,
    OIF_CONFIG_DICT = 7
};

/* Row-major array of doubles. The record never owns its storage. */
typedef struct {
    intptr_t nd;
    intptr_t *dimensions;
    double *data;
} OIFArrayF64;

typedef int (*oif_rhs_fn_t)(double t, OIFArrayF64 *y, OIFArrayF64 *ydot, void *user_data);

enum { OIF_LANG_C = 1, OIF_LANG_SCRIPTING = 2 };

typedef struct {
    int src;
    void *fn_p_native;   /* original function, opaque to the library */
    oif_rhs_fn_t fn_p_c; /* what implementations call */
} OIFCallback;

/* Encoded options: a concatenation of little-endian records
 *   uint32 key_len | key bytes | uint32 tag (OIF_INT or OIF_FLOAT64) | 8-byte value
 * INT values are sign-extended to 64 bits. */
typedef struct {
    size_t size;
    const uint8_t *buffer;
} OIFConfigDict;

/* arg_values[i] points at an int32_t, a double, an OIFArrayF64, a
 * NUL-terminated UTF-8 string, an OIFCallback, an OIFConfigDict, or, for
 * OIF_USER_DATA, is the user-data address itself. */
typedef struct {
    intptr_t num_args;
    const uint32_t *arg_types;
    void *const *arg_values;
} OIFArgs;

/* ---- user side -------------------------------------------------------- */

/* Handle >= 0, or a negative status. */
int oif_init_impl(const char *interface, const char *impl, int version_major, int version_minor);
int oif_unload_impl(int handle);
/* Either list may be NULL for "no arguments". Inputs and outputs are
 * matched against the method signature as one concatenated list. */
int oif_call_impl(int handle, const char *method, const OIFArgs *in_args, const OIFArgs *out_args);
/* Message of the last failure on this thread, "" after a success. */
const char *oif_last_error(void);
const char *oif_status_name(int code);

/* Zero-filled; NULL on failure. */
OIFArrayF64 *oif_create_array_f64(int nd, const intptr_t *dimensions);
int oif_free_array_f64(OIFArrayF64 *array);

/* ---- plugin side, interface "ivp", prefix P ----------------------------
 *
 * void *P_create(void);
 * int   P_destroy(void *session);
 * int   P_set_initial_value(void *session, OIFArrayF64 *y0, double t0);
 * int   P_set_rhs_fn(void *session, OIFCallback *rhs);
 * int   P_set_tolerances(void *session, double reltol, double abstol);
 * int   P_set_user_data(void *session, void *user_data);
 * int   P_set_integrator(void *session, const char *name, OIFConfigDict *params);
 * int   P_integrate(void *session, double t, OIFArrayF64 *y);
 * const char *P_last_error(void *session);   optional
 */

#ifdef __cplusplus
}
#endif

#endif
