/*
 * Copyright 2026 The fiboost Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * fiboost C API.
 *
 * Every function returning int reports a FibStatus. On failure the message is
 * available from fib_last_error() on the calling thread until the next API
 * call on that thread. Strings returned through char** are owned by the
 * caller and must be released with fib_string_free. Configuration arguments
 * are JSON documents; see README.md for their schemas.
 */
#ifndef FIBOOST_C_API_H_
#define FIBOOST_C_API_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FIB_BUILDING_LIBRARY)
#    define FIB_API __declspec(dllexport)
#  else
#    define FIB_API __declspec(dllimport)
#  endif
#else
#  define FIB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum FibStatus {
  FIB_OK = 0,
  FIB_ERR_CONFIG = 1,   /* invalid arguments, config or constraint documents */
  FIB_ERR_DATA = 2,     /* unreadable or inconsistent data or model files */
  FIB_ERR_INTERNAL = 3  /* anything else */
} FibStatus;

typedef struct FibDataset FibDataset;
typedef struct FibModel FibModel;

FIB_API const char* fib_version(void);
FIB_API const char* fib_last_error(void);
FIB_API void fib_string_free(char* s);

/* task: "regression" or "classification". */
FIB_API int fib_dataset_load_csv(const char* path, const char* target_column,
                                 const char* task, FibDataset** out);
/* All columns are features except drop_column (may be NULL). */
FIB_API int fib_dataset_load_features_csv(const char* path, const char* drop_column,
                                          FibDataset** out);
FIB_API int fib_dataset_shape(const FibDataset* ds, size_t* n_rows, size_t* n_features);
FIB_API void fib_dataset_free(FibDataset* ds);

/* Runs the interaction wrapper on every row. wrapper_json may be NULL for
 * defaults. Outputs the partition ("[[...],[...]]") and the per-step score
 * log; log_json may be NULL. */
FIB_API int fib_discover(const FibDataset* ds, const char* wrapper_json,
                         char** partition_json, char** log_json);

/* Trains on every row. schedule_json may be NULL (unconstrained). A
 * per_residual schedule without first_tree_partition gets one from the
 * wrapper on the original target. */
FIB_API int fib_train(const FibDataset* ds, const char* params_json,
                      const char* schedule_json, FibModel** out);
FIB_API int fib_model_to_json(const FibModel* model, char** out);
FIB_API int fib_model_from_json(const char* json, FibModel** out);
FIB_API int fib_model_num_features(const FibModel* model, size_t* out);
/* Writes one prediction per dataset row into out[0..len). len must equal
 * the row count. */
FIB_API int fib_model_predict(const FibModel* model, const FibDataset* ds,
                              double* out, size_t len);
FIB_API void fib_model_free(FibModel* model);

/* {"grid": {...}, "k": 3, "seed": 0, "params": {...}} -> tuned params JSON. */
FIB_API int fib_tune(const FibDataset* ds, const char* tune_json, char** params_json);

/* Benchmark config JSON -> report JSON and CSV. report_csv may be NULL. */
FIB_API int fib_benchmark(const FibDataset* ds, const char* config_json,
                          const char* dataset_name, char** report_json,
                          char** report_csv);

#ifdef __cplusplus
}
#endif

#endif  /* FIBOOST_C_API_H_ */
