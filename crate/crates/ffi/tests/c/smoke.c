#include <math.h>
#include <stdio.h>
#include <string.h>

#include "longwave.h"

#define N 400

int main(void) {
    double u0[N], u[N], eta[N], half[N];
    if (lw_soliton_sample(0.5, -10.0, 0.1, N, 0.1, 0.0, u0) != LW_STATUS_OK) return 1;

    LwKdv *k = NULL;
    if (lw_kdv_create(0.1, N, 0.1, u0, &k) != LW_STATUS_OK) return 2;
    if (lw_kdv_step(k, 50) != LW_STATUS_OK) return 3;
    if (lw_kdv_get_field(k, u, N) != LW_STATUS_OK) return 4;
    if (fabs(lw_kdv_time(k) - 5.0) > 1e-12) return 5;
    lw_kdv_free(k);

    for (int i = 0; i < N; i++) half[i] = 0.5 * u0[i];
    LwBoussinesqParams p = {0.1, sqrt(2.0 / 3.0), 0.5, 0.5, N, 0.1};
    LwBoussinesq *b = NULL;
    if (lw_boussinesq_create(&p, half, half, NULL, &b) != LW_STATUS_OK) return 6;
    if (lw_boussinesq_step(b, 10) != LW_STATUS_OK) return 7;
    if (lw_boussinesq_get_surface(b, eta, N) != LW_STATUS_OK) return 8;
    if (lw_boussinesq_get_surface(b, eta, 3) != LW_STATUS_BUFFER_TOO_SMALL) return 9;
    lw_boussinesq_free(b);

    if (lw_kdv_create(0.1, 0, 0.1, u0, &k) != LW_STATUS_CONFIG || k != NULL) return 10;
    char msg[256];
    if (lw_last_error_message(msg, sizeof msg) == 0 || strlen(msg) == 0) return 11;
    printf("ok %s\n", lw_version());
    return 0;
}
