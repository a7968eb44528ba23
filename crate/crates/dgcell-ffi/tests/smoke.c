#include <stdio.h>
#include <string.h>
#include "dgcell.h"

static const char *A2 =
    "form = \"quiver\"\n"
    "vertices = [\"1\", \"2\"]\n"
    "truncation = 1\n"
    "[[arrows]]\nname = \"a\"\nsource = \"1\"\ntarget = \"2\"\n";

int main(void) {
    DgcellAlgebra *alg = NULL;
    if (dgcell_algebra_parse(A2, &alg) != DGCELL_STATUS_OK) {
        fprintf(stderr, "parse: %s\n", dgcell_last_error());
        return 1;
    }
    if (dgcell_algebra_dim(alg) != 3) return 2;
    char *out = NULL;
    DgcellStatus s = dgcell_order(alg, DGCELL_ORDER_KIND_WEAK, DGCELL_SIDE_LEFT, "P:e1,e1", "P:e1,e2", 3, 0, &out);
    if (s != DGCELL_STATUS_OK || strstr(out, "\"verdict\": \"false\"") == NULL) return 3;
    dgcell_string_free(out);
    if (dgcell_maxspec(alg, "bogus", 0, &out) != DGCELL_STATUS_UNKNOWN_CELL || out != NULL) return 4;
    DgcellAlgebra *bad = NULL;
    if (dgcell_algebra_parse("form = 3", &bad) != DGCELL_STATUS_INPUT_ERROR || bad != NULL) return 5;
    dgcell_algebra_free(alg);
    puts("ok");
    return 0;
}
