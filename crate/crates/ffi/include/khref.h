#ifndef KHREF_H
#define KHREF_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct KhrefS {
    int32_t s_min;
    int32_t s_max;
    int32_t s;
} KhrefS;

/* Returns 0 on success, otherwise the command-line exit code of the error. */
int khref_s_invariant(const char *pd, const char *field, KhrefS *out);

/* Runs a JSON array of command-line arguments; returns a JSON report. */
char *khref_run_json(const char *args_json);

void khref_string_free(char *s);

#ifdef __cplusplus
}
#endif

#endif
