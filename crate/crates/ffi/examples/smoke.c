#include <stdio.h>
#include <string.h>
#include "tracekit.h"

static const char *MODEL =
    "requirement STR-9 : technical { text: \"doors locked\" safety: true criticality: high }\n"
    "risk RK-1 { description: \"fall\" severity: catastrophic likelihood: remote tolerability: unacceptable }\n"
    "link covers STR-9 -> RK-1\n";

int main(void) {
    TkModel *m = NULL;
    if (tk_model_parse(MODEL, "smoke.sreq", &m) != TK_OK) {
        fprintf(stderr, "parse: %s\n", tk_last_error_message());
        return 1;
    }
    char *json = NULL;
    if (tk_impact_json(m, "STR-9", &json) != TK_OK || strstr(json, "\"RK-1\"") == NULL) {
        fprintf(stderr, "impact failed\n");
        return 1;
    }
    tk_string_free(json);
    if (tk_impact_json(m, "NOPE", &json) != TK_UNKNOWN_ENTITY) {
        return 1;
    }
    printf("%s\n", tk_last_error_message());
    tk_model_free(m);

    if (tk_model_parse("requirement X : acquirer {", NULL, &m) != TK_PARSE_ERROR || m != NULL) {
        return 1;
    }
    return 0;
}
