/*
 * eegdiff — EEG-conditioned latent diffusion toolkit.
 *
 * C interface to the pipeline stages. Handles are opaque; every call that can
 * fail returns an eegdiff_status, and eegdiff_last_error() describes the most
 * recent failure on the calling thread.
 */

#ifndef EEGDIFF_H
#define EEGDIFF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define EEGDIFF_API __declspec(dllexport)
#else
#define EEGDIFF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum eegdiff_status {
    EEGDIFF_OK = 0,
    EEGDIFF_ERR_INVALID_ARGUMENT = 1,
    EEGDIFF_ERR_CONFIG = 2,
    EEGDIFF_ERR_IO = 3,
    EEGDIFF_ERR_FORMAT = 4,
    EEGDIFF_ERR_SHAPE = 5,
    EEGDIFF_ERR_NUMERIC = 6,
    EEGDIFF_ERR_INTERNAL = 7
} eegdiff_status;

/* Merged run configuration: defaults < loaded file < explicit sets. */
typedef struct eegdiff_config eegdiff_config;

EEGDIFF_API eegdiff_config* eegdiff_config_new(void);
EEGDIFF_API void eegdiff_config_free(eegdiff_config* cfg);

/* Applies a flat JSON object of known keys on top of the defaults. */
EEGDIFF_API eegdiff_status eegdiff_config_load_file(eegdiff_config* cfg, const char* path);

/* value is parsed as a JSON literal; anything unparseable is a string. */
EEGDIFF_API eegdiff_status eegdiff_config_set(eegdiff_config* cfg, const char* key, const char* value);

/* Serializes the current value of key into buf (JSON literal, NUL-terminated). */
EEGDIFF_API eegdiff_status eegdiff_config_get(const eegdiff_config* cfg, const char* key, char* buf,
                                              size_t buf_size);

/* Message for the last failing call on this thread; valid until the next call. */
EEGDIFF_API const char* eegdiff_last_error(void);

EEGDIFF_API const char* eegdiff_version(void);

/* Stages. Paths are UTF-8; log_csv may be NULL to skip logging. */

/* Writes pretrain.eegc, train.eegc, test.eegc under out_dir. */
EEGDIFF_API eegdiff_status eegdiff_gen_data(const eegdiff_config* cfg, const char* out_dir);

EEGDIFF_API eegdiff_status eegdiff_pretrain(const eegdiff_config* cfg, const char* corpus_path,
                                            const char* checkpoint_out, const char* log_csv);

EEGDIFF_API eegdiff_status eegdiff_train_ae(const eegdiff_config* cfg, const char* pairs_path,
                                            const char* checkpoint_out, const char* log_csv);

EEGDIFF_API eegdiff_status eegdiff_train_image_encoder(const eegdiff_config* cfg, const char* pairs_path,
                                                       const char* checkpoint_out, const char* log_csv);

EEGDIFF_API eegdiff_status eegdiff_train_ldm(const eegdiff_config* cfg, const char* pairs_path,
                                             const char* ae_checkpoint, const char* checkpoint_out,
                                             const char* log_csv);

/* eeg_checkpoint may be NULL: fine-tune from a randomly initialized encoder. */
EEGDIFF_API eegdiff_status eegdiff_finetune(const eegdiff_config* cfg, const char* pairs_path,
                                            const char* eeg_checkpoint, const char* ldm_checkpoint,
                                            const char* imgenc_checkpoint, const char* checkpoint_out,
                                            const char* log_csv);

/* n_images <= 0 generates one image per paired sample. */
EEGDIFF_API eegdiff_status eegdiff_generate(const eegdiff_config* cfg, const char* pairs_path,
                                            const char* model_checkpoint, const char* out_dir,
                                            int64_t n_images, int unconditional);

/* accuracy_out may be NULL. unconditional_samples == 0 skips calibration. */
EEGDIFF_API eegdiff_status eegdiff_evaluate(const eegdiff_config* cfg, const char* test_pairs,
                                            const char* train_pairs, const char* model_checkpoint,
                                            const char* out_dir, int64_t unconditional_samples,
                                            double* accuracy_out, double* unconditional_accuracy_out);

/* grid_json may be NULL for the built-in grid. */
EEGDIFF_API eegdiff_status eegdiff_ablate(const eegdiff_config* cfg, const char* grid_json,
                                          const char* data_dir, const char* out_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* EEGDIFF_H */
