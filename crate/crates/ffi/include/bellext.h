#ifndef BELLEXT_H
#define BELLEXT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define BELLEXT_FAMILY_RHO 0

#define BELLEXT_FAMILY_SIGMA 1

typedef enum BellextStatus {
  BELLEXT_STATUS_OK = 0,
  BELLEXT_STATUS_NULL_POINTER = 1,
  BELLEXT_STATUS_INVALID_ARGUMENT = 2,
  BELLEXT_STATUS_DIMENSION_MISMATCH = 3,
  BELLEXT_STATUS_DOMAIN = 4,
  BELLEXT_STATUS_TABLE = 5,
  BELLEXT_STATUS_IO = 6,
  BELLEXT_STATUS_BUFFER_TOO_SMALL = 7,
  BELLEXT_STATUS_PANIC = 8,
} BellextStatus;

typedef struct BellextInequality BellextInequality;

typedef struct BellextScenario BellextScenario;

typedef struct BellextSeesawResult BellextSeesawResult;

typedef struct BellextVertexSet BellextVertexSet;

typedef struct BellextSeesawConfig {
  size_t seeds;
  size_t max_sweeps;
  double convergence_tol;
  uint64_t master_seed;
} BellextSeesawConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Length of the last error message on this thread, including the NUL
 terminator; 0 if there is none.
 */
size_t bellext_last_error_length(void);

/*
 Copies the last error message into `buf` (truncated to `len - 1` bytes
 and NUL-terminated). Returns the full length including the terminator.

 # Safety
 `buf` must be null or valid for `len` bytes.
 */
size_t bellext_last_error_message(char *buf, size_t len);

/*
 Library version as a static NUL-terminated string.
 */
const char *bellext_version(void);

/*
 Scenario whose Bob inputs form a cycle of length `n` (at least 3).

 # Safety
 `out` must be valid for a write.
 */
enum BellextStatus bellext_scenario_cycle(size_t n, struct BellextScenario **out);

/*
 Number of correlators, `2 + 6n`.

 # Safety
 `s` must be a live handle or null (returns 0).
 */
size_t bellext_scenario_dimension(const struct BellextScenario *s);

/*
 # Safety
 `s` must be null or a handle not yet freed.
 */
void bellext_scenario_free(struct BellextScenario *s);

/*
 Product vertices of the local polytope.

 # Safety
 `s` must be a live handle and `out` valid for a write.
 */
enum BellextStatus bellext_vertices_enumerate(const struct BellextScenario *s,
                                              struct BellextVertexSet **out);

/*
 # Safety
 `vs` must be a live handle or null (returns 0).
 */
size_t bellext_vertices_count(const struct BellextVertexSet *vs);

/*
 Copies all vertices, row-major (`count * dimension` entries), into `buf`.

 # Safety
 `vs` must be a live handle and `buf` valid for `len` writes.
 */
enum BellextStatus bellext_vertices_copy(const struct BellextVertexSet *vs,
                                         int64_t *buf,
                                         size_t len);

/*
 # Safety
 `vs` must be null or a handle not yet freed.
 */
void bellext_vertices_free(struct BellextVertexSet *vs);

/*
 Row `id` (1 to 26) of the bundled inequality table.

 # Safety
 `out` must be valid for a write.
 */
enum BellextStatus bellext_inequality_from_table(uint32_t id, struct BellextInequality **out);

/*
 Inequality `sum_i coeffs[i] c_i <= local_bound`.

 # Safety
 `coeffs` must be valid for `len` reads and `out` for a write.
 */
enum BellextStatus bellext_inequality_new(const int64_t *coeffs,
                                          size_t len,
                                          int64_t local_bound,
                                          struct BellextInequality **out);

/*
 # Safety
 `ineq` must be a live handle or null (returns 0).
 */
int64_t bellext_inequality_declared_bound(const struct BellextInequality *ineq);

/*
 Maximum of the inequality over the vertex set.

 # Safety
 Handles must be live and `out` valid for a write.
 */
enum BellextStatus bellext_inequality_local_bound(const struct BellextInequality *ineq,
                                                  const struct BellextVertexSet *vs,
                                                  int64_t *out);

/*
 Writes 1 to `out` if the inequality is a facet of the polytope spanned
 by `vs`, else 0.

 # Safety
 Handles must be live and `out` valid for a write.
 */
enum BellextStatus bellext_inequality_is_facet(const struct BellextInequality *ineq,
                                               const struct BellextVertexSet *vs,
                                               int32_t *out);

/*
 `sum_i coeffs[i] correlators[i]`.

 # Safety
 `correlators` must be valid for `len` reads and `out` for a write.
 */
enum BellextStatus bellext_inequality_evaluate(const struct BellextInequality *ineq,
                                               const double *correlators,
                                               size_t len,
                                               double *out);

/*
 # Safety
 `ineq` must be null or a handle not yet freed.
 */
void bellext_inequality_free(struct BellextInequality *ineq);

struct BellextSeesawConfig bellext_seesaw_config_default(void);

/*
 Seesaw lower bound on the quantum maximum of a four-cycle inequality,
 optimizing the state on `C^2 (x) C^4`.

 # Safety
 `ineq` must be a live handle, `cfg` valid for a read and `out` for a write.
 */
enum BellextStatus bellext_seesaw_maximize(const struct BellextInequality *ineq,
                                           const struct BellextSeesawConfig *cfg,
                                           struct BellextSeesawResult **out);

/*
 # Safety
 `r` must be a live handle or null (returns NaN).
 */
double bellext_seesaw_result_value(const struct BellextSeesawResult *r);

/*
 Copies the optimal model's correlators (26 entries) into `buf`.

 # Safety
 `r` must be a live handle and `buf` valid for `len` writes.
 */
enum BellextStatus bellext_seesaw_result_correlators(const struct BellextSeesawResult *r,
                                                     double *buf,
                                                     size_t len);

/*
 # Safety
 `r` must be null or a handle not yet freed.
 */
void bellext_seesaw_result_free(struct BellextSeesawResult *r);

/*
 Exact CHSH threshold in `w` for family `BELLEXT_FAMILY_RHO` or
 `BELLEXT_FAMILY_SIGMA` at the given `alpha`.

 # Safety
 `out` must be valid for a write.
 */
enum BellextStatus bellext_chsh_critical_w(uint32_t family, double alpha, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BELLEXT_H */
