/* Exercises the C interface from C. */
#include <stdio.h>
#include <string.h>

#include "kolmo.h"

static int failures = 0;

static void expect(int cond, const char* what) {
  if (!cond) {
    fprintf(stderr, "FAILED: %s (%s)\n", what, kl_last_error());
    ++failures;
  }
}

int main(void) {
  kl_table* t = NULL;
  kl_model* m = NULL;
  char* out = NULL;

  expect(strncmp(kl_version(), "kolmo ", 6) == 0, "version");

  expect(kl_table_build(NULL, "plain", 6, 14, 10000, "", 2, &t) == KL_OK, "table build");
  expect(kl_count_compressible(t, 6, 2, &out) == KL_OK, "count");
  expect(out && strstr(out, "\"count\": 0") != NULL, "count(6,2) = 0");
  kl_free(out);
  out = NULL;

  expect(kl_table_query(t, "0000000", &out) == KL_E_USAGE, "query beyond N is a usage error");
  expect(out == NULL, "no output on failure");
  expect(strcmp(kl_last_error_kind(), "usage") == 0, "usage kind");

  expect(kl_table_build(NULL, "quantum", 6, 14, 10000, "", 1, NULL) == KL_E_USAGE, "null output pointer");

  expect(kl_sumcheck_accept("forall x. x", 17, 4, 1e9, &out) == KL_OK, "accept");
  expect(out && strstr(out, "\"max_acceptance\": \"1/17\"") != NULL, "forall x. x at p = 17");
  kl_free(out);
  out = NULL;

  expect(kl_sumcheck_accept("forall x. exists y. (x | y)", 3, 4, 1e9, &out) == KL_E_DOMAIN, "small field");
  expect(strcmp(kl_last_error_kind(), "field_too_small") == 0, "field_too_small kind");

  expect(kl_model_reference(6, 14, 10000, &m) == KL_OK, "model");
  expect(kl_strategy_eval(m, "(strategy v1 (leaf 0/1))", "(true)", "syntactic", &out) == KL_OK, "eval");
  expect(out && strstr(out, "\"p\": \"1/1\"") != NULL, "trivial target has p = 1");
  kl_free(out);
  out = NULL;
  expect(kl_strategy_eval(m, "(strategy v1 (leaf 0/1))", "(halts \"0\" 2)", "syntactic", &out) == KL_OK, "eval");
  expect(out && strstr(out, "\"p\": \"1/1\"") != NULL, "halting axiom has p = 1");
  kl_free(out);
  out = NULL;
  expect(kl_strategy_eval(m, "(strategy v1 (leaf", "(true)", "syntactic", &out) == KL_E_USAGE, "bad tree text");

  kl_model_free(m);
  kl_table_free(t);
  kl_free(NULL);
  if (failures == 0) printf("capi smoke: ok\n");
  return failures ? 1 : 0;
}
