#pragma once

// Batch front-end: subcommand implementations and the analysis routines they
// share with the acceptance driver.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "distdim/covering.hpp"
#include "distdim/digitsets.hpp"
#include "distdim/distance.hpp"
#include "distdim/norms.hpp"
#include "distdim/point_cloud.hpp"

namespace distdim::cli {

/// Exit codes: every check passed / a mathematical check failed / usage or I/O.
enum ExitCode : int { exit_pass = 0, exit_usage = 1, exit_math = 2 };

struct RunConfig {
  std::string command;
  unsigned q = 3;
  std::string rho = "1/2";
  int blocks = 6;
  std::string schedule_file;
  bool relaxed = false;
  std::optional<std::int64_t> depth;
  std::size_t d = 2;
  std::string norm_file;
  std::string cloud_file;
  std::uint64_t seed = 0;
  std::string window;  // "delta_max,delta_min"; either side may be empty
  std::optional<double> tol;
  std::string out;  // output directory; empty writes nothing but the report on stdout
  bool no_timestamp = false;
  std::optional<std::size_t> points;
  std::string levels;  // "a:b", q-adic levels
  std::string pins;    // "x,y;x,y"
  std::optional<std::uint64_t> pairs;
  std::size_t n = 1;
  std::string deltas = "5:10";  // dyadic exponents for fiber scans
  std::size_t grid = 2000;
  std::size_t xi_count = 64;
  double radius = 1.0;
  std::size_t pin_count = 8;
  std::optional<std::int64_t> pad;
  bool decimal = false;
};

/// Parses argv with CLI11 and dispatches. Reports go to out, diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(const RunConfig& config, std::ostream& out);

// ---- shared analysis ------------------------------------------------------

/// Slopes of the set and of the pinned distance sets at `pin_count`
/// deterministic cloud points; passes when the best pinned slope reaches
/// set_slope / d - tol. Slopes are regressions over `scales`.
struct BoundRun {
  DimensionEstimate set_estimate;
  std::vector<std::size_t> pin_indices;
  std::vector<DimensionEstimate> pin_estimates;
  std::size_t best = 0;
  double threshold = 0.0;
  double tol = 0.1;
  bool pass = false;
};

BoundRun verify_bound(const PointCloud& cloud, const NormSpec& norm, const std::vector<Rational>& scales,
                      std::size_t pin_count, std::uint64_t seed, double tol, const std::string& scale_sequence);

/// Upper and lower slope brackets for the distance set of E = F^d under a
/// rational polyhedral norm: the envelope is certified exhaustively, the
/// bound profiles are evaluated at the checkpoints inside `window`, and the
/// regression-slope bracket must contain the schedule's density within tol.
struct SharpnessRun {
  DigitEnvelope envelope;
  EnvelopeCertificate certificate;
  CoveringProfile upper, lower;
  DimensionEstimate upper_estimate, lower_estimate;  // regressions: the bracket
  DimensionEstimate upper_peak;                      // max-two-point, informational
  Rational target;
  double tol = 0.05;
  bool pass = false;
};

/// pad_override replaces the computed pad (for probing the certificate).
SharpnessRun verify_sharpness(const BlockSchedule& schedule, const PolyhedralNorm& norm, std::size_t d,
                              std::int64_t depth, const Window& window, double tol,
                              std::optional<std::int64_t> pad_override = std::nullopt);

/// Checkpoint levels M_k of the schedule that do not exceed depth.
std::vector<std::int64_t> checkpoint_levels(const BlockSchedule& schedule, std::int64_t depth);

/// Cell centers of an n x n grid on [0,1]^2.
PointCloud unit_grid(std::size_t n);

}  // namespace distdim::cli
