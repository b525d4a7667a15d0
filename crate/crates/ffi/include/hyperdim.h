#ifndef HYPERDIM_H
#define HYPERDIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum HdStatus {
  HdStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  HdStatus_NullPointer = 1,
  /**
   * An argument failed validation (dimension too small, bad counter
   * width, malformed UTF-8, text too short, and similar).
   */
  HdStatus_InvalidArgument = 2,
  HdStatus_DimensionMismatch = 3,
  /**
   * A collection that must hold something was empty, or a memory read
   * activated locations that hold nothing.
   */
  HdStatus_Empty = 4,
  HdStatus_UnknownSymbol = 5,
  HdStatus_DuplicateSymbol = 6,
  /**
   * No memory location activated for the probe.
   */
  HdStatus_NoActiveLocation = 7,
  HdStatus_ChunkTooLarge = 8,
  HdStatus_CounterOverflow = 9,
  HdStatus_ZeroNorm = 10,
  HdStatus_ZeroWeights = 11,
  HdStatus_Io = 12,
  /**
   * A file did not parse as the expected format.
   */
  HdStatus_Format = 13,
  /**
   * A caller-supplied output buffer is too small.
   */
  HdStatus_BufferTooSmall = 14,
  /**
   * A panic was caught at the boundary.
   */
  HdStatus_Panic = 15,
} HdStatus;

/**
 * D-wide signed counter vector.
 */
typedef struct HdAccumulator HdAccumulator;

/**
 * Symbol to vector map with nearest-neighbor cleanup.
 */
typedef struct HdCodebook HdCodebook;

/**
 * Trained language profiles plus the trigram encoder that built them.
 */
typedef struct HdLangModel HdLangModel;

/**
 * Deterministic random stream.
 */
typedef struct HdRng HdRng;

/**
 * Sparse distributed memory.
 */
typedef struct HdSdm HdSdm;

/**
 * D-bit binary vector.
 */
typedef struct HdVector HdVector;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent non-Ok status on this thread. The pointer
 * stays valid until the next hyperdim call on the same thread. Never null.
 */
const char *hd_last_error_message(void);

/**
 * The default vector width, 10000 bits.
 */
uintptr_t hd_default_dim(void);

enum HdStatus hd_rng_new(uint64_t seed, struct HdRng **out);

/**
 * An independent stream derived from `rng`'s seed and a label. The parent
 * is not advanced.
 */
enum HdStatus hd_rng_substream(const struct HdRng *rng, uint64_t label, struct HdRng **out);

void hd_rng_free(struct HdRng *rng);

enum HdStatus hd_vector_random(uintptr_t dim, struct HdRng *rng, struct HdVector **out);

/**
 * Rebuild a vector from little-endian packed bytes, least significant bit
 * first, as produced by `hd_vector_to_packed`.
 */
enum HdStatus hd_vector_from_packed(uintptr_t dim,
                                    const uint8_t *bytes,
                                    uintptr_t len,
                                    struct HdVector **out);

/**
 * Number of bytes `hd_vector_to_packed` needs: ceil(dim / 8).
 */
enum HdStatus hd_vector_packed_len(const struct HdVector *v, uintptr_t *out);

enum HdStatus hd_vector_to_packed(const struct HdVector *v, uint8_t *buf, uintptr_t len);

enum HdStatus hd_vector_clone(const struct HdVector *v, struct HdVector **out);

enum HdStatus hd_vector_dim(const struct HdVector *v, uintptr_t *out);

/**
 * Coordinatewise XOR. Self-inverse: binding twice with the same vector
 * returns the original.
 */
enum HdStatus hd_vector_bind(const struct HdVector *a,
                             const struct HdVector *b,
                             struct HdVector **out);

/**
 * Cyclic rotation: bit i moves to (i + shift) mod dim. Negative shifts
 * rotate the other way.
 */
enum HdStatus hd_vector_permute(const struct HdVector *v, int64_t shift, struct HdVector **out);

enum HdStatus hd_vector_hamming(const struct HdVector *a, const struct HdVector *b, uint64_t *out);

/**
 * 1 - hamming/dim: 1.0 means identical, 0.5 means unrelated.
 */
enum HdStatus hd_vector_similarity(const struct HdVector *a, const struct HdVector *b, double *out);

void hd_vector_free(struct HdVector *v);

/**
 * Coordinatewise majority of `n` vectors; ties are broken by the rng.
 */
enum HdStatus hd_bundle(const struct HdVector *const *items,
                        uintptr_t n,
                        struct HdRng *rng,
                        struct HdVector **out);

enum HdStatus hd_accumulator_new(uintptr_t dim, struct HdAccumulator **out);

enum HdStatus hd_accumulator_add(struct HdAccumulator *acc, const struct HdVector *v);

/**
 * Add `v` as if it appeared `weight` times. Zero weight is a no-op.
 */
enum HdStatus hd_accumulator_add_weighted(struct HdAccumulator *acc,
                                          const struct HdVector *v,
                                          uint32_t weight);

/**
 * Majority vote over everything added so far; ties broken by the rng.
 */
enum HdStatus hd_accumulator_threshold(const struct HdAccumulator *acc,
                                       struct HdRng *rng,
                                       struct HdVector **out);

/**
 * Cosine of the two count vectors, in [-1, 1].
 */
enum HdStatus hd_accumulator_cosine(const struct HdAccumulator *a,
                                    const struct HdAccumulator *b,
                                    double *out);

void hd_accumulator_free(struct HdAccumulator *acc);

/**
 * Codebook entries are drawn from the codebook's own seeded stream: same
 * seed and same insertion order always give the same vectors.
 */
enum HdStatus hd_codebook_new(uintptr_t dim, uint64_t seed, struct HdCodebook **out);

enum HdStatus hd_codebook_assign(struct HdCodebook *cb, const char *symbol);

/**
 * A copy of the vector stored for `symbol`.
 */
enum HdStatus hd_codebook_get(const struct HdCodebook *cb,
                              const char *symbol,
                              struct HdVector **out);

enum HdStatus hd_codebook_len(const struct HdCodebook *cb, uintptr_t *out);

/**
 * Nearest stored symbol to `v`. The symbol is written NUL-terminated into
 * `symbol_buf`; `similarity` receives its Hamming similarity.
 */
enum HdStatus hd_codebook_cleanup(const struct HdCodebook *cb,
                                  const struct HdVector *v,
                                  char *symbol_buf,
                                  uintptr_t buf_len,
                                  double *similarity);

enum HdStatus hd_codebook_save(const struct HdCodebook *cb, const char *path);

enum HdStatus hd_codebook_load(const char *path, struct HdCodebook **out);

void hd_codebook_free(struct HdCodebook *cb);

/**
 * A memory with `locations` random fixed addresses. The activation radius
 * is chosen so a probe reaches each location with probability close to
 * `target_p` (0 < target_p < 1). `counter_bits` must be 8, 16, or 32.
 */
enum HdStatus hd_sdm_new(uintptr_t dim,
                         uintptr_t locations,
                         double target_p,
                         uint8_t counter_bits,
                         struct HdRng *rng,
                         struct HdSdm **out);

enum HdStatus hd_sdm_write(struct HdSdm *sdm,
                           const struct HdVector *addr,
                           const struct HdVector *data);

/**
 * Majority readout over the locations `addr` activates. On Ok, `out_vector`
 * receives the recalled vector (caller frees), `out_confidence` the mean
 * absolute column sum per activated location, and `out_activated` the
 * activation count. Activated-but-unwritten locations yield Empty with
 * `out_activated` still set and `out_vector` null; a probe activating
 * nothing yields NoActiveLocation.
 */
enum HdStatus hd_sdm_read(const struct HdSdm *sdm,
                          const struct HdVector *addr,
                          struct HdRng *rng,
                          struct HdVector **out_vector,
                          double *out_confidence,
                          uintptr_t *out_activated);

enum HdStatus hd_sdm_save(const struct HdSdm *sdm, const char *path);

enum HdStatus hd_sdm_load(const char *path, struct HdSdm **out);

void hd_sdm_free(struct HdSdm *sdm);

/**
 * Load a trained profile store and rebuild its trigram encoder from the
 * dimension and seed recorded in the file.
 */
enum HdStatus hd_langmodel_load(const char *path, struct HdLangModel **out);

enum HdStatus hd_langmodel_len(const struct HdLangModel *m, uintptr_t *out);

/**
 * Label of the profile at `index`, NUL-terminated.
 */
enum HdStatus hd_langmodel_label(const struct HdLangModel *m,
                                 uintptr_t index,
                                 char *buf,
                                 uintptr_t buf_len);

/**
 * Classify UTF-8 text. `fold_diacritics` false maps accented letters to
 * spaces (matching a store trained with the strip policy); true folds them
 * onto the base letter first. The winning label lands in `label_buf` and
 * its cosine in `out_cosine`. Text with fewer than 3 symbols after
 * normalization is refused as InvalidArgument.
 */
enum HdStatus hd_langmodel_classify(const struct HdLangModel *m,
                                    const char *text,
                                    bool fold_diacritics,
                                    char *label_buf,
                                    uintptr_t buf_len,
                                    double *out_cosine);

void hd_langmodel_free(struct HdLangModel *m);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERDIM_H */
