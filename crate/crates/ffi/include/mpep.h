#ifndef MPEP_H
#define MPEP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 How the entangled mass enters the fidelity criterion.
 */
typedef enum MpepMassMode {
  MPEP_MASS_MODE_AS_WRITTEN = 0,
  MPEP_MASS_MODE_RENORMALIZED = 1,
} MpepMassMode;

/*
 How pairs without a second path enter the purified mean.
 */
typedef enum MpepMissingPath {
  MPEP_MISSING_PATH_FALL_BACK_TO_BASIC = 0,
  MPEP_MISSING_PATH_EXCLUDE = 1,
} MpepMissingPath;

/*
 Outcome of every call.
 */
typedef enum MpepStatus {
  MPEP_STATUS_OK = 0,
  MPEP_STATUS_INVALID_ARGUMENT = 1,
  MPEP_STATUS_NULL_POINTER = 2,
  MPEP_STATUS_NUMERICAL = 3,
  MPEP_STATUS_IO = 4,
  MPEP_STATUS_NOT_FOUND = 5,
  MPEP_STATUS_PANIC = 6,
} MpepStatus;

/*
 Opaque network handle.
 */
typedef struct MpepNetwork MpepNetwork;

/*
 Opaque simulation report handle.
 */
typedef struct MpepReport MpepReport;

/*
 Campaign parameters. Fill with `mpep_simulation_config_default` first.
 */
typedef struct MpepSimulationConfig {
  uint32_t nodes;
  uint64_t edges;
  uint64_t seed;
  double fidelity_min;
  double probability_min;
  size_t num_sd_samples;
  uint32_t l0_max;
  /*
   Memory coherence time; any value `<= 0` means `1 / probability_min`.
   */
  double tau_m;
  bool use_fidelity_criterion;
  bool use_availability_criterion;
  enum MpepMassMode mass_mode;
  enum MpepMissingPath missing_path;
  uint32_t max_pair_attempts;
} MpepSimulationConfig;

/*
 One aggregated row; absent statistics are NaN.
 */
typedef struct MpepReportRow {
  uint32_t l0;
  size_t n;
  double basic_mean;
  double basic_std;
  double mpep_mean;
  double mpep_std;
  size_t mpep_n;
  double chosen_mean;
  double chosen_std;
  uint64_t skipped_pairs;
} MpepReportRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the last error message of this thread into `buf` (NUL terminated,
 truncated to `len`). Returns the full message length plus one, or 0 when
 there is no pending error.
 */
size_t mpep_last_error_message(char *buf, size_t len);

/*
 Fidelity after swapping two isotropic links.
 */
enum MpepStatus mpep_swap(double f1, double f2, double *out_fidelity);

/*
 Output fidelity and success probability of one purification round.
 */
enum MpepStatus mpep_purify(double f1,
                            double f2,
                            double *out_fidelity,
                            double *out_success_probability);

/*
 Partner fidelities `[lower, upper]` for which purifying with `f1` is useful.
 */
enum MpepStatus mpep_useful_window(double f1, double *out_lower, double *out_upper);

/*
 Density of the path fidelity of `length` uniform `[f_min, 1]` links at `f`.
 */
enum MpepStatus mpep_pdf_path_fidelity(uint32_t length,
                                       double f_min,
                                       double f,
                                       double *out_density);

/*
 Density of the path probability of `length` uniform `[p_min, 1]` links at `p`.
 */
enum MpepStatus mpep_pdf_path_probability(uint32_t length,
                                          double p_min,
                                          double p,
                                          double *out_density);

/*
 Mean and standard deviation of the path fidelity for edges with the given moments.
 */
enum MpepStatus mpep_path_fidelity_moments(uint32_t length,
                                           double edge_mean,
                                           double edge_std,
                                           double *out_mean,
                                           double *out_std);

/*
 Mean and standard deviation of the path probability for edges with the given moments.
 */
enum MpepStatus mpep_path_probability_moments(uint32_t length,
                                              double edge_mean,
                                              double edge_std,
                                              double *out_mean,
                                              double *out_std);

/*
 Fidelity criterion for shortest length `l0` and extra length `d`.
 */
enum MpepStatus mpep_criterion_fidelity(uint32_t l0,
                                        uint32_t d,
                                        double f_min,
                                        enum MpepMassMode mass_mode,
                                        double *out_lhs,
                                        double *out_rhs,
                                        bool *out_satisfied);

/*
 Availability criterion; a `tau_m <= 0` means `1 / p_min`.
 */
enum MpepStatus mpep_criterion_availability(uint32_t l0,
                                            uint32_t d,
                                            double p_min,
                                            double tau_m,
                                            double *out_lhs,
                                            bool *out_satisfied);

/*
 Random G(n, m) network with uniform `[fidelity_min, 1]` and
 `[probability_min, 1]` edge parameters.
 */
enum MpepStatus mpep_network_generate(uint32_t nodes,
                                      uint64_t edges,
                                      uint64_t seed,
                                      double fidelity_min,
                                      double probability_min,
                                      struct MpepNetwork **out_network);

/*
 Reads a network from an edge-list file.
 */
enum MpepStatus mpep_network_read(const char *path, struct MpepNetwork **out_network);

/*
 Writes a network as an edge-list file.
 */
enum MpepStatus mpep_network_write(const struct MpepNetwork *network, const char *path);

enum MpepStatus mpep_network_node_count(const struct MpepNetwork *network, uint32_t *out_count);

enum MpepStatus mpep_network_edge_count(const struct MpepNetwork *network, size_t *out_count);

/*
 Hop count of the shortest path; `NOT_FOUND` when the nodes are disconnected.
 */
enum MpepStatus mpep_network_shortest_path_length(const struct MpepNetwork *network,
                                                  uint32_t source,
                                                  uint32_t destination,
                                                  size_t *out_length);

/*
 Lengths of up to `k` edge-disjoint paths, shortest first. Writes at most
 `capacity` lengths and the number found to `out_count`.
 */
enum MpepStatus mpep_network_mad_path_lengths(const struct MpepNetwork *network,
                                              uint32_t source,
                                              uint32_t destination,
                                              size_t k,
                                              size_t *out_lengths,
                                              size_t capacity,
                                              size_t *out_count);

void mpep_network_free(struct MpepNetwork *network);

/*
 Writes the default campaign parameters.
 */
enum MpepStatus mpep_simulation_config_default(struct MpepSimulationConfig *out_config);

/*
 Runs a campaign on a freshly generated network.
 */
enum MpepStatus mpep_simulate(const struct MpepSimulationConfig *config,
                              struct MpepReport **out_report);

/*
 Runs a campaign on an existing network. Path fidelities are still drawn
 from the distribution in `config`; its `nodes` and `edges` are unused.
 */
enum MpepStatus mpep_simulate_on_network(const struct MpepNetwork *network,
                                         const struct MpepSimulationConfig *config,
                                         struct MpepReport **out_report);

enum MpepStatus mpep_report_row_count(const struct MpepReport *report, size_t *out_count);

/*
 Row `index` in ascending `l0` order.
 */
enum MpepStatus mpep_report_row(const struct MpepReport *report,
                                size_t index,
                                struct MpepReportRow *out_row);

/*
 The report as CSV; release the string with `mpep_string_free`.
 */
enum MpepStatus mpep_report_to_csv(const struct MpepReport *report, char **out_csv);

void mpep_report_free(struct MpepReport *report);

void mpep_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MPEP_H */
