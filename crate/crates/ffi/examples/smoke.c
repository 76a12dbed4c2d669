/* Minimal C consumer of the cpboot C ABI. Prints one line per check. */
#include <math.h>
#include <stdio.h>

#include "cpboot.h"

int main(void) {
    double t[10], y[10];
    for (int i = 0; i < 10; i++) {
        t[i] = i + 1;
        y[i] = i < 5 ? 0.0 : 10.0;
    }

    CpbSeries *series = NULL;
    if (cpb_series_new(t, y, 10, &series) != CPB_STATUS_OK) {
        fprintf(stderr, "series: %s\n", cpb_last_error_message());
        return 1;
    }

    CpbScanSummary scan;
    if (cpb_scan(series, 3, &scan) != CPB_STATUS_OK) {
        fprintf(stderr, "scan: %s\n", cpb_last_error_message());
        return 1;
    }
    printf("c_hat=%zu\n", scan.c_hat);

    CpbStatus status = cpb_scan(series, 6, &scan);
    printf("too_short_status=%d message=%s\n", (int)status, cpb_last_error_message());

    CpbTestConfig cfg = cpb_test_config_default();
    cfg.bootstrap.b_inner = 50;
    cfg.bootstrap.r_outer = 5;
    cfg.bootstrap.seed = 3;
    CpbTestReport *report = NULL;
    if (cpb_ci_length_test(series, &cfg, &report) != CPB_STATUS_OK) {
        fprintf(stderr, "test: %s\n", cpb_last_error_message());
        return 1;
    }
    CpbTestSummary summary;
    cpb_test_report_summary(report, &summary);
    printf("n_samples=%zu power_in_range=%d\n", summary.n_samples,
           summary.power >= 0.0 && summary.power <= 1.0);

    cpb_test_report_free(report);
    cpb_series_free(series);
    return 0;
}
