#include <math.h>
#include <stdio.h>

#include "bellext.h"

int main(void) {
    BellextScenario *s = NULL;
    BellextVertexSet *vs = NULL;
    BellextInequality *ineq = NULL;
    if (bellext_scenario_cycle(4, &s) != BELLEXT_STATUS_OK) return 1;
    if (bellext_vertices_enumerate(s, &vs) != BELLEXT_STATUS_OK) return 1;
    if (bellext_inequality_from_table(15, &ineq) != BELLEXT_STATUS_OK) return 1;

    int64_t lb = 0;
    int facet = 0;
    bellext_inequality_local_bound(ineq, vs, &lb);
    bellext_inequality_is_facet(ineq, vs, &facet);

    char msg[128];
    BellextStatus st = bellext_scenario_cycle(1, &s);
    bellext_last_error_message(msg, sizeof msg);

    double w = 0.0;
    bellext_chsh_critical_w(BELLEXT_FAMILY_SIGMA, 0.5, &w);

    printf("version %s\n", bellext_version());
    printf("dimension %zu vertices %zu\n", bellext_scenario_dimension(s), bellext_vertices_count(vs));
    printf("row 15 bound %lld facet %d\n", (long long)lb, facet);
    printf("error %d: %s\n", (int)st, msg);
    printf("chsh w %.6f\n", w);

    bellext_inequality_free(ineq);
    bellext_vertices_free(vs);
    bellext_scenario_free(s);
    return fabs(w - 0.70710678) < 1e-6 ? 0 : 1;
}
