#include <math.h>
#include <stdio.h>
#include "mirrorcode.h"

int main(void) {
    MirrorcodeNetwork *net = NULL;
    if (mirrorcode_network_fixture("fig5", &net) != MIRRORCODE_STATUS_OK) {
        fprintf(stderr, "%s\n", mirrorcode_last_error());
        return 1;
    }
    MirrorcodeGap gap;
    if (mirrorcode_gap(net, &gap) != MIRRORCODE_STATUS_OK) {
        fprintf(stderr, "%s\n", mirrorcode_last_error());
        return 1;
    }
    printf("coded=%.6f subset=%.6f gap_lp=%.6f\n", gap.coded, gap.subset, gap.gap_lp);
    mirrorcode_network_free(net);
    return fabs(gap.subset - gap.coded - 1.0) < 1e-6 ? 0 : 2;
}
