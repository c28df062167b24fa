/* A user side written in C: decay y' = -k y through the dopri5c plugin. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "oif.h"

static int decay(double t, OIFArrayF64 *y, OIFArrayF64 *ydot, void *user_data) {
    (void)t;
    double k = *(double *)user_data;
    for (intptr_t i = 0; i < y->dimensions[0]; i++)
        ydot->data[i] = -k * y->data[i];
    return 0;
}

#define CHECK(cond)                                                        \
    do {                                                                   \
        if (!(cond)) {                                                     \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond, \
                    oif_last_error());                                     \
            return 1;                                                      \
        }                                                                  \
    } while (0)

static OIFArgs args(intptr_t n, const uint32_t *types, void *const *values) {
    OIFArgs a = {n, types, values};
    return a;
}

int main(void) {
    int h = oif_init_impl("ivp", "dopri5c", 1, 0);
    CHECK(h >= 0);

    intptr_t dims[1] = {2};
    OIFArrayF64 *y0 = oif_create_array_f64(1, dims);
    OIFArrayF64 *y = oif_create_array_f64(1, dims);
    CHECK(y0 && y);
    y0->data[0] = 1.0;
    y0->data[1] = 2.0;

    double t0 = 0.0;
    uint32_t t_init[2] = {OIF_ARRAY_F64, OIF_FLOAT64};
    void *v_init[2] = {y0, &t0};
    OIFArgs in = args(2, t_init, v_init);
    CHECK(oif_call_impl(h, "set_initial_value", &in, NULL) == OIF_OK);

    OIFCallback cb = {OIF_LANG_C, (void *)decay, decay};
    uint32_t t_cb[1] = {OIF_CALLBACK};
    void *v_cb[1] = {&cb};
    in = args(1, t_cb, v_cb);
    CHECK(oif_call_impl(h, "set_rhs_fn", &in, NULL) == OIF_OK);

    double k = 2.0;
    uint32_t t_ud[1] = {OIF_USER_DATA};
    void *v_ud[1] = {&k};
    in = args(1, t_ud, v_ud);
    CHECK(oif_call_impl(h, "set_user_data", &in, NULL) == OIF_OK);

    /* {"h_max": 0.25} in wire form */
    uint8_t buf[4 + 5 + 4 + 8];
    uint32_t key_len = 5, tag = OIF_FLOAT64;
    double h_max = 0.25;
    memcpy(buf, &key_len, 4);
    memcpy(buf + 4, "h_max", 5);
    memcpy(buf + 9, &tag, 4);
    memcpy(buf + 13, &h_max, 8);
    OIFConfigDict params = {sizeof buf, buf};
    uint32_t t_int[2] = {OIF_STR, OIF_CONFIG_DICT};
    void *v_int[2] = {"dopri5", &params};
    in = args(2, t_int, v_int);
    CHECK(oif_call_impl(h, "set_integrator", &in, NULL) == OIF_OK);

    double rtol = 1e-10, atol = 1e-12;
    uint32_t t_tol[2] = {OIF_FLOAT64, OIF_FLOAT64};
    void *v_tol[2] = {&rtol, &atol};
    in = args(2, t_tol, v_tol);
    CHECK(oif_call_impl(h, "set_tolerances", &in, NULL) == OIF_OK);

    double t = 1.0;
    uint32_t t_t[1] = {OIF_FLOAT64}, t_y[1] = {OIF_ARRAY_F64};
    void *v_t[1] = {&t}, *v_y[1] = {y};
    in = args(1, t_t, v_t);
    OIFArgs out = args(1, t_y, v_y);
    CHECK(oif_call_impl(h, "integrate", &in, &out) == OIF_OK);
    CHECK(fabs(y->data[0] - exp(-2.0)) < 1e-8);
    CHECK(fabs(y->data[1] - 2.0 * exp(-2.0)) < 1e-8);

    /* wrong tag: FLOAT64 where set_rhs_fn wants CALLBACK */
    in = args(1, t_t, v_t);
    CHECK(oif_call_impl(h, "set_rhs_fn", &in, NULL) == OIF_TYPE_MISMATCH);
    CHECK(strlen(oif_last_error()) > 0);
    CHECK(strcmp(oif_status_name(OIF_TYPE_MISMATCH), "type mismatch") == 0);

    CHECK(oif_unload_impl(h) == OIF_OK);
    CHECK(oif_call_impl(h, "integrate", &in, &out) == OIF_NOT_FOUND);
    CHECK(oif_free_array_f64(y0) == OIF_OK);
    CHECK(oif_free_array_f64(y) == OIF_OK);
    printf("ok %.17g\n", y0 == y ? 0.0 : exp(-2.0));
    return 0;
}
