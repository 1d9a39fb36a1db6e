#ifndef SURFACENAV_H
#define SURFACENAV_H

/* Generated by cbindgen from crates/capi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define SN_SAMPLE_SINUSOIDAL 0

#define SN_SAMPLE_SPECTRAL 1

#define SN_FORMAT_CSV 0

#define SN_FORMAT_JSON 1

typedef enum SnStatus {
  SN_STATUS_OK = 0,
  SN_STATUS_NULL_ARGUMENT = 1,
  SN_STATUS_INVALID_UTF8 = 2,
  SN_STATUS_INVALID_COMMAND = 3,
  SN_STATUS_INVALID_DATA = 4,
  SN_STATUS_INVALID_ARGUMENT = 5,
  SN_STATUS_PANIC = 6,
} SnStatus;

/**
 * Opaque session handle.
 */
typedef struct SnSession SnSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failed call on this thread. The pointer stays
 * valid until the next failing call on the same thread; do not free it.
 */
const char *sn_last_error(void);

/**
 * Creates a session over a built-in sample (`SN_SAMPLE_*`).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum SnStatus sn_session_new_sample(uint32_t sample, struct SnSession **out);

/**
 * Creates a session from CSV or JSON bytes (`SN_FORMAT_*`).
 *
 * # Safety
 * `data` must point to `len` readable bytes and `out` to writable storage
 * for one handle.
 */
enum SnStatus sn_session_new_from_bytes(const uint8_t *data,
                                        size_t len,
                                        uint32_t format,
                                        struct SnSession **out);

/**
 * Releases a session. Null is ignored.
 *
 * # Safety
 * `session` must be null or a handle from a `sn_session_new_*` call that
 * has not been freed.
 */
void sn_session_free(struct SnSession *session);

/**
 * Dispatches one JSON command and returns the resulting events as a JSON
 * array in `*out_events` (free with [`sn_string_free`]).
 *
 * # Safety
 * `session` must be a live handle, `command` a nul-terminated string, and
 * `out_events` valid writable storage for one pointer.
 */
enum SnStatus sn_session_dispatch(struct SnSession *session,
                                  const char *command,
                                  char **out_events);

/**
 * Newline-joined transcript of every event since the dataset was loaded.
 *
 * # Safety
 * `session` must be a live handle and `out` valid writable storage for one
 * pointer.
 */
enum SnStatus sn_session_transcript(const struct SnSession *session, char **out);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void sn_string_free(char *s);

/**
 * Library version, static storage.
 */
const char *sn_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SURFACENAV_H */
