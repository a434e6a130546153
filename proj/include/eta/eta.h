/* Copyright (c) etasynth contributors. */
/* SPDX-License-Identifier: Apache-2.0 */
#ifndef ETA_ETA_H
#define ETA_ETA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ETA_API __declspec(dllexport)
#else
#define ETA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes for the first four values. */
typedef enum eta_status {
    ETA_OK = 0,
    ETA_NO = 1,
    ETA_ERR_INPUT = 2,
    ETA_ERR_LIMIT = 3,
    ETA_ERR_PRECONDITION = 4,
    ETA_ERR_INTERNAL = 5
} eta_status;

typedef enum eta_sim_mode { ETA_SIM_NOMINAL = 0, ETA_SIM_ENVELOPE = 1, ETA_SIM_ADVERSARIAL = 2 } eta_sim_mode;

typedef enum eta_format { ETA_FORMAT_SUMMARY = 0, ETA_FORMAT_CSV = 1, ETA_FORMAT_PLOT = 2 } eta_format;

typedef struct eta_model eta_model;
typedef struct eta_options eta_options;

/*
 * Rationals are passed as text: integers, decimals ("4.9") or fractions ("49/10").
 * Intervals are "lo,hi"; an empty side ("4.9," or ",6") is unbounded.
 * Returned strings are owned by the caller and released with eta_string_free.
 */

ETA_API const char* eta_version(void);
/* Message of the last failed call on this thread ("" if none). */
ETA_API const char* eta_last_error(void);
ETA_API void eta_string_free(char* s);

ETA_API eta_options* eta_options_new(void);
ETA_API void eta_options_free(eta_options* o);
ETA_API eta_status eta_options_set_max_disjuncts(eta_options* o, size_t n);
ETA_API eta_status eta_options_set_max_unfold(eta_options* o, size_t n);
ETA_API eta_status eta_options_set_max_intervals(eta_options* o, size_t n);
ETA_API eta_status eta_options_set_starts(eta_options* o, size_t n);
ETA_API eta_status eta_options_set_seed(eta_options* o, uint64_t seed);

ETA_API eta_status eta_model_load(const char* path, eta_model** out);
ETA_API eta_status eta_model_parse(const char* text, eta_model** out);
/* variant is "h1" or "h2". */
ETA_API eta_status eta_model_hydac(const char* variant, const char* epsilon, eta_model** out);
ETA_API void eta_model_free(eta_model* m);
ETA_API eta_status eta_model_dump(const eta_model* m, char** out);

/*
 * Energy-constrained infinite run from `initial` with initial energy `interval`.
 * Models with imprecision use the robust decision and need a point interval.
 * Returns ETA_OK for tt, ETA_NO for ff; `report` starts with "tt" or "ff".
 * NULL interval/energy arguments fall back to the defaults stored in the model.
 */
ETA_API eta_status eta_check(const eta_model* m, const char* initial, const char* interval, const char* energy,
                             const eta_options* o, char** report);

/* Greatest stable interval of simple cycle `cycle` (see eta_model_dump for the order) under `energy`. */
ETA_API eta_status eta_fixpoint(const eta_model* m, size_t cycle, const char* energy, const eta_options* o,
                                char** report);

/* Minimal upper bound U for lower bound `lower` from level `w0` (NULL: w0 = lower). */
ETA_API eta_status eta_synth_ub(const eta_model* m, const char* lower, const char* w0, const eta_options* o,
                                char** report);

/*
 * Permissive strategy of the single self-loop for `energy` and `stable` (NULL: the
 * greatest stable interval). With w0 a concrete optimal schedule is reported.
 */
ETA_API eta_status eta_strategy(const eta_model* m, const char* energy, const char* stable, const char* w0,
                                const eta_options* o, char** report);

/* One CSV row per level from..to in `step` increments with the pump-on intervals. */
ETA_API eta_status eta_strategy_family(const eta_model* m, const char* energy, const char* stable, const char* from,
                                       const char* to, const char* step, const eta_options* o, char** csv);

/*
 * Runs the synthesized controller for `duration` time units from `w0`. For HYDAC
 * models `energy` may be NULL (E = [v_min; U*]); otherwise it is required.
 */
ETA_API eta_status eta_simulate(const eta_model* m, const char* energy, const char* w0, const char* duration,
                                eta_sim_mode mode, uint64_t seed, eta_format format, const eta_options* o,
                                char** out);

/* Full HYDAC pipeline: bound, stable interval, worst-case mean and a 200 s run from 8.3. */
ETA_API eta_status eta_hydac_report(const eta_model* m, const char* lower, const eta_options* o, char** report);

#ifdef __cplusplus
}
#endif

#endif
