#include <math.h>
#include <stdio.h>
#include <string.h>

#include "zfsdma.h"

#define CHECK(cond)                                                  \
    do {                                                             \
        if (!(cond)) {                                               \
            fprintf(stderr, "failed: %s (%s)\n", #cond,               \
                    zf_last_error_message());                        \
            return 1;                                                \
        }                                                            \
    } while (0)

int main(void) {
    double g;
    CHECK(zf_regularized_upper_gamma(1, 0.5, &g) == ZF_STATUS_OK);
    CHECK(fabs(g - exp(-0.5)) < 1e-15);

    ZfPolytope *p = NULL;
    CHECK(zf_polytope_new(3, 10.0, 1.0, &p) == ZF_STATUS_OK);
    size_t n = 0;
    CHECK(zf_polytope_vertex_count(p, &n) == ZF_STATUS_OK);
    CHECK(n == 8);
    size_t set[4];
    size_t len = 0;
    CHECK(zf_polytope_index_set(p, set, 4, &len) == ZF_STATUS_OK);
    CHECK(len == 4 && set[3] == 3);
    double lambda[3] = {0.1, 0.1, 0.1};
    bool inside = false;
    CHECK(zf_polytope_contains(p, lambda, 3, 1e-9, &inside) == ZF_STATUS_OK);
    CHECK(inside);
    zf_polytope_free(p);

    CHECK(zf_polytope_new(0, 1.0, 1.0, &p) == ZF_STATUS_DOMAIN);
    CHECK(strlen(zf_last_error_message()) > 0);

    char *json = NULL;
    const char *cfg =
        "{\"params\":{\"antennas\":1,\"power\":1.0,\"theta\":0.1},"
        "\"arrivals\":[{\"law\":\"exponential\",\"rate\":0.3}],"
        "\"policy\":{\"policy\":\"max_weight\"},\"horizon\":1000}";
    CHECK(zf_simulate_json(cfg, &json) == ZF_STATUS_OK);
    CHECK(strstr(json, "\"total_arrivals\"") != NULL);
    zf_string_free(json);

    printf("ok %s\n", zf_version());
    return 0;
}
