/*
 * stereoagg - stereo matching with learned semi-global and local guided
 * cost aggregation.
 *
 * C interface to the shared library. All objects are opaque handles owned
 * by the library; every function reports a status code and leaves a
 * human-readable message in sa_last_error() on failure. Handles returned
 * through out-parameters must be released with the matching *_free call.
 *
 * Thread safety: handles are immutable after creation and safe to share
 * across threads for reading. sa_set_threads configures the library's
 * internal data parallelism; results never depend on the thread count.
 */

#ifndef STEREOAGG_H
#define STEREOAGG_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sa_status {
  SA_OK = 0,
  SA_ERR_CONFIG = 1,    /* bad parameters or shape mismatch */
  SA_ERR_DIMENSION = 2, /* invalid container dimension */
  SA_ERR_INDEX = 3,     /* out-of-range access */
  SA_ERR_PARSE = 4,     /* malformed input file */
  SA_ERR_IO = 5,        /* filesystem failure */
  SA_ERR_NUMERIC = 6,   /* non-finite values or failed numeric check */
  SA_ERR_DIVERGED = 7,  /* training loss became non-finite */
  SA_ERR_NULL_ARGUMENT = 8,
  SA_ERR_UNKNOWN = 9
} sa_status;

const char* sa_version(void);
const char* sa_status_name(sa_status status);

/* Conventional process exit code for a status: 0 ok, 1 usage, 2 I/O or
 * parse, 3 numeric, 4 training divergence. */
int sa_status_exit_code(sa_status status);

/* Message describing the most recent failure on this thread. */
const char* sa_last_error(void);

/* Worker cap for internal parallel loops; n <= 1 forces serial execution. */
void sa_set_threads(int n);
int sa_hardware_threads(void);

/* ------------------------------------------------------------------ */
/* Images (grayscale, intensities in [0,1])                            */

typedef struct sa_image sa_image;

sa_status sa_image_read_pgm(const char* path, sa_image** out);
sa_status sa_image_write_pgm(const sa_image* img, const char* path);
sa_status sa_image_create(int height, int width, sa_image** out);
sa_status sa_image_size(const sa_image* img, int* height, int* width);
sa_status sa_image_get(const sa_image* img, int y, int x, double* value);
sa_status sa_image_set(sa_image* img, int y, int x, double value);
void sa_image_free(sa_image* img);

/* ------------------------------------------------------------------ */
/* Disparity maps (values plus per-pixel validity)                     */

typedef struct sa_disparity sa_disparity;

sa_status sa_disparity_create(int height, int width, sa_disparity** out);
sa_status sa_disparity_read_pfm(const char* path, sa_disparity** out);
sa_status sa_disparity_write_pfm(const sa_disparity* map, const char* path);
sa_status sa_disparity_size(const sa_disparity* map, int* height, int* width);
sa_status sa_disparity_get(const sa_disparity* map, int y, int x, double* value, int* valid);
sa_status sa_disparity_set(sa_disparity* map, int y, int x, double value, int valid);
void sa_disparity_free(sa_disparity* map);

/* ------------------------------------------------------------------ */
/* Matching                                                            */

typedef enum sa_method {
  SA_METHOD_SGM = 0,    /* classical scanline aggregation with penalties */
  SA_METHOD_GA = 1,     /* learned semi-global + optional local aggregation */
  SA_METHOD_FILTER = 2  /* local box cost filter */
} sa_method;

typedef enum sa_feature {
  SA_FEATURE_CENSUS = 0,
  SA_FEATURE_ABSDIFF = 1
} sa_feature;

typedef struct sa_match_options {
  int d_max;                /* disparity candidates, >= 2 */
  sa_method method;
  sa_feature feature;
  int census_window;        /* odd, >= 3 */
  double p1, p2;            /* SGM penalties, p2 >= p1 */
  int sga_layers;           /* GA stack depth when no weights file is given */
  int use_lga;
  const char* weights_path; /* learned logits; NULL for built-in defaults */
} sa_match_options;

void sa_match_options_init(sa_match_options* opts);

typedef struct sa_volume sa_volume;

sa_status sa_build_cost_volume(const sa_image* left, const sa_image* right,
                               const sa_match_options* opts, sa_volume** out);
sa_status sa_volume_dims(const sa_volume* v, int* h, int* w, int* d, int* f);
sa_status sa_volume_get(const sa_volume* v, int y, int x, int d, int f, double* value);
void sa_volume_free(sa_volume* v);

/* Full pipeline: cost volume, aggregation per options, soft regression. */
sa_status sa_match(const sa_image* left, const sa_image* right,
                   const sa_match_options* opts, sa_disparity** out);

/* ------------------------------------------------------------------ */
/* Evaluation                                                          */

/* epe_out receives the mean absolute error over jointly valid pixels;
 * rates_out (length n_thresholds) the fraction with error strictly above
 * each threshold. */
sa_status sa_evaluate(const sa_disparity* pred, const sa_disparity* gt,
                      const double* thresholds, int n_thresholds,
                      double* epe_out, double* rates_out);

/* ------------------------------------------------------------------ */
/* Training on synthetic scenes                                        */

typedef struct sa_train_options {
  int height, width;
  int d_max;
  int band_width;           /* textureless band, < width/2 */
  unsigned long long seed;
  int sga_layers;           /* 0..4 */
  int use_lga;
  int steps;                /* >= 1 */
  double lr;
} sa_train_options;

void sa_train_options_init(sa_train_options* opts);

typedef void (*sa_train_callback)(int step, double loss, double epe, double rate3, void* user);

typedef struct sa_train_summary {
  double final_loss;
  double final_epe;
  double final_rate1, final_rate2, final_rate3;
  double ambiguous_epe;     /* error inside the textureless band */
  int steps_run;
} sa_train_summary;

/* Runs the toy trainer. weights_out (optional) receives the learned logits
 * in the library's flat binary format, loadable via
 * sa_match_options.weights_path. The callback, when given, observes one
 * record per step. */
sa_status sa_train(const sa_train_options* opts, const char* weights_out,
                   sa_train_callback callback, void* user, sa_train_summary* summary);

/* ------------------------------------------------------------------ */
/* Numeric self-check                                                  */

typedef struct sa_gradcheck_report {
  double max_err_sga;        /* directional backward: input + weight grads */
  double max_err_sga_logits; /* full layer, through the softmax */
  double max_err_lga;
  double max_err_regress;
  int pass;
} sa_gradcheck_report;

/* Compares every analytic backward pass against central finite
 * differences. `corrupt_backward` deliberately breaks one gradient so
 * callers can exercise their failure handling. */
sa_status sa_gradcheck(int corrupt_backward, sa_gradcheck_report* report);

/* ------------------------------------------------------------------ */
/* Complexity accounting                                               */

typedef enum sa_flop_kind {
  SA_FLOP_CONV3D = 0,
  SA_FLOP_SGA = 1,
  SA_FLOP_LGA = 2
} sa_flop_kind;

/* Closed-form FLOP count; a multiply-add counts as 2. For conv3d, k is the
 * cubic kernel size and `channels` the input channels; for sga,
 * `directions` scans with 5 weight slots each; for lga, `repeats` passes of
 * three k x k filters. n is the number of output elements. */
sa_status sa_flops(sa_flop_kind kind, int k, int channels, unsigned long long n,
                   int directions, int repeats, unsigned long long* out);

typedef enum sa_timed_kernel {
  SA_TIME_SGA = 0,
  SA_TIME_SGA_NAIVE = 1, /* recomputes the shared max per disparity */
  SA_TIME_LGA = 2
} sa_timed_kernel;

/* Median and p90 wall-clock nanoseconds of one forward pass over an
 * HxWxDxF volume; one warm-up run is excluded. repetitions >= 3. */
sa_status sa_time_kernel(sa_timed_kernel kind, int h, int w, int d, int f,
                         int repetitions, double* median_ns, double* p90_ns);

#ifdef __cplusplus
}
#endif

#endif /* STEREOAGG_H */
