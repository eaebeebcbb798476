/* C interface to the exemplar-based word sense disambiguation engine. */

#ifndef WSD_H
#define WSD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Knowledge-source mask bit: POS window and morphology.
 */
#define WSD_SOURCE_POS 1

/**
 * Knowledge-source mask bit: surrounding keywords.
 */
#define WSD_SOURCE_WORDS 2

/**
 * Knowledge-source mask bit: local collocations.
 */
#define WSD_SOURCE_COLLOC 4

/**
 * Knowledge-source mask bit: verb-object relation.
 */
#define WSD_SOURCE_VERB 8

/**
 * All four knowledge sources.
 */
#define WSD_SOURCES_ALL 15

/**
 * Result of every fallible call. Mirrors the CLI exit codes.
 */
typedef enum wsd_status {
  /**
   * Success.
   */
  WSD_STATUS_OK = 0,
  /**
   * Invalid arguments or configuration (NULL pointers, bad thresholds,
   * oversized test splits).
   */
  WSD_STATUS_USAGE = 1,
  /**
   * Corpus, model, or I/O data errors.
   */
  WSD_STATUS_DATA = 2,
} wsd_status;

/**
 * A parsed sense-tagged corpus for one target word.
 */
typedef struct WsdDataset WsdDataset;

/**
 * A trained per-word classifier.
 */
typedef struct WsdModel WsdModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the most recent failure on this thread, or NULL if no
 * call has failed yet. The pointer stays valid until the next failing
 * call on the same thread; do not free it.
 */
const char *wsd_last_error(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be NULL or a pointer previously returned through one of this
 * library's string out-parameters, not yet freed.
 */
void wsd_string_free(char *s);

/**
 * Parse a corpus from NUL-terminated text in the instance file format.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` must point to
 * writable storage for one pointer.
 */
enum wsd_status wsd_dataset_parse(const char *text, struct WsdDataset **out);

/**
 * Parse a corpus file from disk.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must point to
 * writable storage for one pointer.
 */
enum wsd_status wsd_dataset_parse_file(const char *path, struct WsdDataset **out);

/**
 * Number of instances in the dataset; 0 for NULL.
 *
 * # Safety
 * `ds` must be NULL or a live dataset handle.
 */
size_t wsd_dataset_len(const struct WsdDataset *ds);

/**
 * The dataset's target word as a new string (free with `wsd_string_free`).
 *
 * # Safety
 * `ds` must be a live dataset handle; `out` must point to writable
 * storage for one pointer.
 */
enum wsd_status wsd_dataset_word(const struct WsdDataset *ds, char **out);

/**
 * The instance id at `index` (free with `wsd_string_free`).
 *
 * # Safety
 * `ds` must be a live dataset handle; `out` must point to writable
 * storage for one pointer.
 */
enum wsd_status wsd_dataset_instance_id(const struct WsdDataset *ds, size_t index, char **out);

/**
 * Release a dataset handle.
 *
 * # Safety
 * `ds` must be NULL or a live dataset handle, not yet freed.
 */
void wsd_dataset_free(struct WsdDataset *ds);

/**
 * Train a model on every instance of the dataset with the given selection
 * thresholds and all four knowledge sources.
 *
 * # Safety
 * `ds` must be a live dataset handle; `out` must point to writable
 * storage for one pointer.
 */
enum wsd_status wsd_train(const struct WsdDataset *ds,
                          double m1,
                          uint32_t m2,
                          uint32_t m3,
                          struct WsdModel **out);

/**
 * Write a model to disk in the versioned container format.
 *
 * # Safety
 * `model` must be a live model handle; `path` a valid NUL-terminated
 * string.
 */
enum wsd_status wsd_model_save(const struct WsdModel *model, const char *path);

/**
 * Load a model file, rejecting unknown format versions.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must point to
 * writable storage for one pointer.
 */
enum wsd_status wsd_model_load(const char *path, struct WsdModel **out);

/**
 * Number of stored exemplars; 0 for NULL.
 *
 * # Safety
 * `model` must be NULL or a live model handle.
 */
size_t wsd_model_exemplar_count(const struct WsdModel *model);

/**
 * Release a model handle.
 *
 * # Safety
 * `model` must be NULL or a live model handle, not yet freed.
 */
void wsd_model_free(struct WsdModel *model);

/**
 * Classify the dataset instance at `index`. The tie-breaking source is
 * derived from `seed` and the instance id, so results do not depend on
 * call order. On success `out_sense` receives the predicted sense label
 * (free with `wsd_string_free`) and `out_distance` the nearest-exemplar
 * distance.
 *
 * # Safety
 * `model` and `ds` must be live handles; `out_sense` and `out_distance`
 * must point to writable storage.
 */
enum wsd_status wsd_classify(const struct WsdModel *model,
                             const struct WsdDataset *ds,
                             size_t index,
                             uint64_t seed,
                             char **out_sense,
                             double *out_distance);

/**
 * Run the repeated random-trial evaluation and return the report as a
 * TSV string (free with `wsd_string_free`). `sources_mask` is an OR of
 * the `WSD_SOURCE_*` bits.
 *
 * # Safety
 * `ds` must be a live dataset handle; `out_tsv` must point to writable
 * storage for one pointer.
 */
enum wsd_status wsd_eval_tsv(const struct WsdDataset *ds,
                             size_t trials,
                             size_t test_size,
                             uint64_t seed,
                             uint32_t sources_mask,
                             char **out_tsv);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WSD_H */
