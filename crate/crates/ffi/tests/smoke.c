#include <stdio.h>
#include <string.h>
#include "eqcoh.h"

static int check(EqcohStatus got, EqcohStatus want, const char *what) {
    if (got != want) {
        const char *e = eqcoh_last_error();
        fprintf(stderr, "%s: status %d, want %d (%s)\n", what, (int)got, (int)want, e ? e : "");
        return 1;
    }
    return 0;
}

int main(void) {
    EqcohModel *m = NULL;
    char *json = NULL;
    int bad = 0;
    bad |= check(eqcoh_model_builtin("cp8", &m), EQCOH_STATUS_OK, "builtin");
    bad |= check(eqcoh_execute(m, "diffcoh", -1, 4, NULL, &json), EQCOH_STATUS_OK, "diffcoh");
    if (!bad && !strstr(json, "\"presentation\":\"ℤ\"")) {
        fprintf(stderr, "unexpected report %s\n", json);
        bad = 1;
    }
    eqcoh_string_free(json);
    bad |= check(eqcoh_execute(m, "diffcoh", -1, -1, NULL, &json), EQCOH_STATUS_INPUT_ERROR, "missing degree");
    eqcoh_model_free(m);
    bad |= check(eqcoh_model_load("[model\n", &m), EQCOH_STATUS_INPUT_ERROR, "syntax");
    bad |= check(eqcoh_model_load(NULL, &m), EQCOH_STATUS_NULL_POINTER, "null");
    printf("%s\n", eqcoh_version());
    return bad;
}
