#include <math.h>
#include <stdio.h>

#include "qchannel.h"

int main(void) {
    QcDensity *rho = NULL;
    QcChannel *ch = NULL;
    QcReport r;

    if (qc_density_from_spec("maxmixed:2", &rho) != QC_STATUS_OK ||
        qc_channel_from_spec("dephasing:0.25", &ch) != QC_STATUS_OK) {
        fprintf(stderr, "%s\n", qc_last_error());
        return 1;
    }
    if (qc_analyze(rho, ch, &r) != QC_STATUS_OK) {
        fprintf(stderr, "%s\n", qc_last_error());
        return 1;
    }
    printf("F_e=%.6f S_e=%.6f I_e=%.6f\n",
           r.entanglement_fidelity, r.entropy_exchange, r.coherent_information);

    QcCorrection *c = NULL;
    qc_correct(rho, ch, 1e-7, &c);
    printf("correctable=%d deficit=%.6f\n", qc_correction_is_correctable(c), qc_correction_deficit(c));

    qc_correction_free(c);
    qc_channel_free(ch);
    qc_density_free(rho);
    return fabs(r.entanglement_fidelity - 0.75) < 1e-9 ? 0 : 2;
}
