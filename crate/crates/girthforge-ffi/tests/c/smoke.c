#include <stdio.h>
#include <string.h>
#include "girthforge.h"

static const char *FANO =
    "{\"n\":7,\"r\":2,\"q\":3,\"blocks\":[[0,1,2],[0,3,4],[0,5,6],[1,3,5],[1,4,6],[2,3,6],[2,4,5]]}";

int main(void) {
    GfPacking *p = NULL;
    if (gf_packing_from_json(FANO, &p) != GF_STATUS_OK) {
        fprintf(stderr, "parse: %s\n", gf_last_error_message());
        return 1;
    }
    GfGirth girth;
    bool full = false;
    if (gf_packing_girth(p, 6, &girth) != GF_STATUS_OK || girth.exceeds || girth.value != 4) return 2;
    if (gf_packing_is_decomposition(p, &full) != GF_STATUS_OK || !full) return 3;
    char *json = NULL;
    if (gf_packing_to_json(p, &json) != GF_STATUS_OK || strstr(json, "blocks") == NULL) return 4;
    gf_string_free(json);
    gf_packing_free(p);

    GfPacking *bad = NULL;
    if (gf_packing_from_json("{\"n\":4,\"r\":2,\"q\":3,\"blocks\":[[0,1,2],[0,1,3]]}", &bad) == GF_STATUS_OK) return 5;
    if (gf_last_error_message() == NULL || bad != NULL) return 6;

    bool ok = true;
    if (gf_admissible(6, 3, 2, &ok) != GF_STATUS_OK || ok) return 7;
    printf("ok %s\n", gf_version());
    return 0;
}
