#ifndef UKHLAB_H
#define UKHLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(UKH_BUILDING_LIBRARY)
#define UKH_API __attribute__((visibility("default")))
#else
#define UKH_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ukh_status {
  UKH_OK = 0,
  UKH_INTERNAL = 1,
  UKH_INVALID_INPUT = 2,
  UKH_NUMERICAL = 3,
  UKH_UNSUPPORTED = 4,
  UKH_DEGREE = 5,
  UKH_CONTRADICTION = 6
} ukh_status;

typedef struct ukh_graph ukh_graph;
typedef struct ukh_sequence ukh_sequence;
typedef struct ukh_matrix ukh_matrix;
typedef struct ukh_laurent ukh_laurent;

UKH_API const char* ukh_version(void);
/* Message of the last failed call on this thread; "" after success. */
UKH_API const char* ukh_last_error(void);
UKH_API const char* ukh_status_name(ukh_status s);

/* Runs a CLI command ("graph homology", "index pm", ...) on a JSON request
 * whose keys mirror the command-line flags. On success *report receives a
 * JSON report owned by the caller (release with ukh_string_free). */
UKH_API ukh_status ukh_execute(const char* command, const char* request_json, char** report);
UKH_API void ukh_string_free(char* s);
/* Newline separated list of command names; caller frees. */
UKH_API ukh_status ukh_commands(char** names);

/* Graphs, from the JSON presentation format. */
UKH_API ukh_status ukh_graph_from_json(const char* json, ukh_graph** out);
UKH_API void ukh_graph_free(ukh_graph* g);
UKH_API ukh_status ukh_graph_homology(const ukh_graph* g, int64_t* h0, int64_t* h1, int64_t* torsion_count);
UKH_API ukh_status ukh_graph_is_forest(const ukh_graph* g, int* is_forest);
/* Verdicts: 0 no, 1 yes, -1 unknown. */
UKH_API ukh_status ukh_graph_classify(const ukh_graph* g, int* k0_zero, int* k1_zero);

/* Eventually periodic integer sequences. */
UKH_API ukh_status ukh_sequence_from_json(const char* json, ukh_sequence** out);
UKH_API void ukh_sequence_free(ukh_sequence* s);
/* side: 0 both, 1 left, 2 right. */
UKH_API ukh_status ukh_sequence_in_s(const ukh_sequence* s, int side, int* in_s);

/* Dense real matrices, row-major. */
UKH_API ukh_status ukh_matrix_create(size_t rows, size_t cols, const double* data, ukh_matrix** out);
UKH_API void ukh_matrix_free(ukh_matrix* m);
UKH_API size_t ukh_matrix_rows(const ukh_matrix* m);
UKH_API size_t ukh_matrix_cols(const ukh_matrix* m);
UKH_API ukh_status ukh_matrix_copy_data(const ukh_matrix* m, double* data, size_t count);
UKH_API ukh_status ukh_matrix_norm(const ukh_matrix* m, double* norm);
/* Ascending eigenvalues of a symmetric matrix; `values` holds rows entries. */
UKH_API ukh_status ukh_matrix_eigenvalues(const ukh_matrix* m, double* values);
UKH_API ukh_status ukh_matrix_eta(const ukh_matrix* m, double s, double* eta);
UKH_API ukh_status ukh_matrix_bounded_transform(const ukh_matrix* m, ukh_matrix** out);
UKH_API ukh_status ukh_matrix_aps_count(const ukh_matrix* m, int64_t* quadrature, int64_t* eigen);

/* Translation-invariant operators on l^2(Z, C^r), from the banded JSON format. */
UKH_API ukh_status ukh_laurent_from_json(const char* json, ukh_laurent** out);
UKH_API ukh_status ukh_laurent_shift(int64_t power, ukh_laurent** out);
UKH_API void ukh_laurent_free(ukh_laurent* op);
UKH_API int64_t ukh_laurent_band(const ukh_laurent* op);
UKH_API ukh_status ukh_laurent_winding(const ukh_laurent* op, int64_t* winding);
/* Windows may be NULL (defaults). *stable is 0 when no index stabilized. */
UKH_API ukh_status ukh_laurent_compressed_index(const ukh_laurent* op, const int64_t* windows, size_t window_count,
                                                int64_t* index, int* stable);

#ifdef __cplusplus
}
#endif

#endif
