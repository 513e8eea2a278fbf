#include <stdio.h>
#include <string.h>

#include "reduction_engine.h"

static const char *SPEC =
    "{\"algebraics\":[{\"name\":\"i\",\"minpoly\":[1,0,1]}],"
    "\"constraints\":{\"custom\":[\"i - 1\"]}}";

int main(void) {
    RfeEngine *engine = NULL;
    if (rfe_engine_new(SPEC, 1, &engine) != RFE_STATUS_OK) {
        fprintf(stderr, "engine: %s\n", rfe_last_error());
        return 1;
    }
    RfeMapList *maps = NULL;
    if (rfe_engine_find_maps(engine, RFE_MODE_STRICT, 2, 100, 4, &maps) != RFE_STATUS_OK) {
        fprintf(stderr, "find: %s\n", rfe_last_error());
        return 1;
    }
    size_t n = rfe_map_list_len(maps);
    for (size_t k = 0; k < n; k++) {
        uint64_t p, a, img;
        rfe_map_get(maps, k, &p, &a);
        rfe_map_image(maps, k, "i", &img);
        if (p % 4 != 1 || img * img % p != p - 1) {
            return 2;
        }
        printf("%llu %llu\n", (unsigned long long)p, (unsigned long long)img);
    }
    rfe_map_list_free(maps);

    RfeEngine *bad = NULL;
    RfeStatus s = rfe_engine_new("{\"algebraics\":[{\"name\":\"s\",\"minpoly\":[-4,0,1]}]}", 1, &bad);
    if (s != RFE_STATUS_NOT_A_DOMAIN || bad != NULL || strlen(rfe_last_error()) == 0) {
        return 3;
    }
    rfe_engine_free(engine);
    return n == 4 ? 0 : 4;
}
