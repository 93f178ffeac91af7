#ifndef GEOQUANT_H
#define GEOQUANT_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result codes. Zero is success.
typedef enum GqStatus {
  GQ_STATUS_OK = 0,
  GQ_STATUS_NULL_POINTER = 1,
  GQ_STATUS_INVALID_ARGUMENT = 2,
  GQ_STATUS_DIMENSION_MISMATCH = 3,
  GQ_STATUS_NOT_HERMITIAN = 4,
  GQ_STATUS_NUMERICAL_FAILURE = 5,
  GQ_STATUS_NON_CONVERGENCE = 6,
  GQ_STATUS_DOMAIN = 7,
  GQ_STATUS_PARSE = 8,
  GQ_STATUS_PANIC = 9,
} GqStatus;

// Dense complex square matrix.
typedef struct GqMatrix GqMatrix;

// State vector in the Hilbert space.
typedef struct GqState GqState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or an empty string.
// The pointer stays valid until the next geoquant call on the same thread.
const char *gq_last_error(void);

// Frees a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void gq_string_free(char *s);

// Creates an n×n matrix from `2·n·n` interleaved doubles, row-major.
//
// # Safety
// `data` must point to `2·dim·dim` readable doubles; `out` must be writable.
enum GqStatus gq_matrix_new(size_t dim, const double *data, struct GqMatrix **out);

// Parses a matrix in the `{"dim": n, "data": [[[re, im], ...], ...]}` format.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum GqStatus gq_matrix_from_json(const char *json, struct GqMatrix **out);

// Serializes a matrix to JSON; free the result with [`gq_string_free`].
//
// # Safety
// `m` must be a live handle; `out` must be writable.
enum GqStatus gq_matrix_to_json(const struct GqMatrix *m, char **out);

// Releases a matrix. Null is ignored.
//
// # Safety
// `m` must come from this library and not be freed twice.
void gq_matrix_free(struct GqMatrix *m);

// Dimension of a matrix, or 0 for null.
//
// # Safety
// `m` must be null or a live handle.
size_t gq_matrix_dim(const struct GqMatrix *m);

// Reads entry (i, j).
//
// # Safety
// `m` must be a live handle; `re` and `im` must be writable.
enum GqStatus gq_matrix_get(const struct GqMatrix *m, size_t i, size_t j, double *re, double *im);

// Lie bracket −i(AB − BA) of two Hermitian matrices.
//
// # Safety
// `a`, `b` must be live handles; `out` must be writable.
enum GqStatus gq_lie(const struct GqMatrix *a, const struct GqMatrix *b, struct GqMatrix **out);

// Jordan product (AB + BA)/2 of two Hermitian matrices.
//
// # Safety
// `a`, `b` must be live handles; `out` must be writable.
enum GqStatus gq_jordan(const struct GqMatrix *a, const struct GqMatrix *b, struct GqMatrix **out);

// Trace form Tr(AB)/2.
//
// # Safety
// `a`, `b` must be live handles; `out` must be writable.
enum GqStatus gq_trace_form(const struct GqMatrix *a, const struct GqMatrix *b, double *out);

// Star product of Â and B̂ evaluated at ξ: Tr(ξAB)/2.
//
// # Safety
// `a`, `b`, `xi` must be live handles; `re` and `im` must be writable.
enum GqStatus gq_star(const struct GqMatrix *a,
                      const struct GqMatrix *b,
                      const struct GqMatrix *xi,
                      double *re,
                      double *im);

// Eigen-decomposition of a Hermitian matrix. Writes `dim` ascending
// eigenvalues to `values` and the eigenvectors, as columns, to `vectors`.
//
// # Safety
// `a` must be a live handle; `values` must hold `dim` doubles; `vectors`
// must be writable.
enum GqStatus gq_eig(const struct GqMatrix *a, double *values, struct GqMatrix **vectors);

// exp(−i t A / ħ) for Hermitian A.
//
// # Safety
// `a` must be a live handle; `out` must be writable.
enum GqStatus gq_unitary_exp(const struct GqMatrix *a,
                             double t,
                             double hbar,
                             struct GqMatrix **out);

// Creates a state from `2·dim` interleaved doubles.
//
// # Safety
// `data` must point to `2·dim` readable doubles; `out` must be writable.
enum GqStatus gq_state_new(size_t dim, const double *data, struct GqState **out);

// Releases a state. Null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void gq_state_free(struct GqState *s);

// Dimension of a state, or 0 for null.
//
// # Safety
// `s` must be null or a live handle.
size_t gq_state_dim(const struct GqState *s);

// Reads amplitude k.
//
// # Safety
// `s` must be a live handle; `re` and `im` must be writable.
enum GqStatus gq_state_get(const struct GqState *s, size_t k, double *re, double *im);

// Expectation value ⟨ψ|Aψ⟩/⟨ψ|ψ⟩.
//
// # Safety
// `a`, `psi` must be live handles; `out` must be writable.
enum GqStatus gq_expectation(const struct GqMatrix *a, const struct GqState *psi, double *out);

// Extremal eigenpair by gradient flow of the expectation function from
// `psi0`. `descending` selects the smallest eigenvalue; `step <= 0` selects
// the default step 0.1/‖A‖_F.
//
// # Safety
// `a`, `psi0` must be live handles; the output pointers must be writable.
enum GqStatus gq_eigensolve(const struct GqMatrix *a,
                            const struct GqState *psi0,
                            bool descending,
                            double step,
                            double tol,
                            size_t max_iter,
                            double *eigenvalue,
                            struct GqState **eigenvector,
                            size_t *iterations);

// Runs the standard identity suites and writes a JSON document
// `{"passed": bool, "reports": [...]}` to `out`. The status reports whether
// the suites could run; `passed` whether every identity held.
//
// # Safety
// `passed` and `out` must be writable.
enum GqStatus gq_verify(size_t dim,
                        size_t trials,
                        uint64_t seed,
                        double tol,
                        bool *passed,
                        char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GEOQUANT_H */
