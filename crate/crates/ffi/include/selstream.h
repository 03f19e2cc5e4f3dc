#ifndef SELSTREAM_H
#define SELSTREAM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SsStatus {
  SS_STATUS_OK = 0,
  SS_STATUS_NULL_POINTER = 1,
  SS_STATUS_INVALID_ARGUMENT = 2,
  SS_STATUS_MALFORMED = 3,
  SS_STATUS_DECRYPTION_FAILED = 4,
  SS_STATUS_INDEX_OUT_OF_RANGE = 5,
  SS_STATUS_INTERNAL = 6,
} SsStatus;

typedef struct SsEncryptedRow SsEncryptedRow;

typedef struct SsMToken SsMToken;

typedef struct SsPToken SsPToken;

typedef struct SsPublicKey SsPublicKey;

typedef struct SsSecretKey SsSecretKey;

/**
 * Heap bytes handed to the caller.
 */
typedef struct SsBuffer {
  uint8_t *data;
  size_t len;
} SsBuffer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or "" after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *ss_last_error(void);

/**
 * Seeds this thread's generator. Only for reproducible tests.
 */
void ss_seed_rng(uint64_t seed);

/**
 * Generates a key pair for rows of `n` cells.
 *
 * # Safety
 * `pk` and `sk` must be valid for writes.
 */
enum SsStatus ss_setup(size_t n, struct SsPublicKey **pk, struct SsSecretKey **sk);

/**
 * Row width of the stream a public key belongs to, or 0 on a null handle.
 *
 * # Safety
 * `pk` must be null or a live handle.
 */
size_t ss_public_key_width(const struct SsPublicKey *pk);

/**
 * Encrypts a row of `n` cells given as parallel pointer and length arrays.
 *
 * # Safety
 * `cell_data` and `cell_lens` must point to `n` entries, each cell to
 * `cell_lens[i]` readable bytes.
 */
enum SsStatus ss_encrypt_row(const struct SsPublicKey *pk,
                             const uint8_t *const *cell_data,
                             const size_t *cell_lens,
                             size_t n,
                             struct SsEncryptedRow **out);

/**
 * Predicate token for a policy of `n` entries; a null entry is a wildcard.
 *
 * # Safety
 * As for [`ss_encrypt_row`], with null entries allowed.
 */
enum SsStatus ss_authorize_sel(const struct SsSecretKey *sk,
                               const uint8_t *const *policy_data,
                               const size_t *policy_lens,
                               size_t n,
                               struct SsPToken **out);

/**
 * Message token opening cell `k` (1-based) of rows matching the policy.
 *
 * # Safety
 * As for [`ss_authorize_sel`].
 */
enum SsStatus ss_authorize_dec(const struct SsSecretKey *sk,
                               const uint8_t *const *policy_data,
                               const size_t *policy_lens,
                               size_t n,
                               size_t k,
                               struct SsMToken **out);

/**
 * Writes 1 to `selected` if the row satisfies the token's policy, else 0.
 *
 * # Safety
 * Handles must be live; `selected` must be valid for writes.
 */
enum SsStatus ss_select(const struct SsEncryptedRow *row,
                        const struct SsPToken *token,
                        uint8_t *selected);

/**
 * Decrypts cell `k`. Returns `SS_STATUS_DECRYPTION_FAILED` for rows the
 * token does not open.
 *
 * # Safety
 * Handles must be live; `out` must be valid for writes.
 */
enum SsStatus ss_decrypt_cell(const struct SsEncryptedRow *row,
                              const struct SsMToken *token,
                              size_t k,
                              struct SsBuffer *out);

/**
 * Releases a buffer returned by this library. Empty buffers are ignored.
 *
 * # Safety
 * `buf` must come from this library and not have been freed.
 */
void ss_buffer_free(struct SsBuffer buf);

/**
 * An empty buffer, for initializing outputs.
 */
struct SsBuffer ss_buffer_empty(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SELSTREAM_H */
