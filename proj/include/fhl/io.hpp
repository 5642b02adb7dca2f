#ifndef FHL_IO_HPP
#define FHL_IO_HPP

#include <string>
#include <vector>

#include "fhl/hartree.hpp"
#include "fhl/many_body.hpp"
#include "fhl/studies.hpp"

namespace fhl {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;   // evolve | groundstate | alpha-sweep | meanfield | dichotomy | verify
  HartreeParams params;
  Grid grid;
  double horizon = 1.0;
  int n_particles = 3;
  std::vector<double> sweep_values;
  double schedule_exponent = 0.75;
  double initial_width = 0.0;
  std::string out_dir = ".";
  int threads = 1;
  unsigned long long seed = 0;
  int store_stride = 10;
  double omega = 1.0;
};

// Parses and validates a JSON config; unknown keys rejected, every physical
// parameter checked against its admissible range.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// --- Checkpoint format ---------------------------------------------------
// "FHRT" | u16 version | u8 rank | u8 spatial dim | u32 points per axis |
// f64 half_width | raw interleaved LE f64 re/im pairs | u64 checksum.

void write_checkpoint(const std::string& path, const std::vector<cplx>& data,
                      int rank, const Grid& grid);
struct CheckpointData {
  int rank = 1;
  Grid grid;
  std::vector<cplx> data;
};
CheckpointData read_checkpoint(const std::string& path);

void write_field_checkpoint(const std::string& path, const Field& f);
Field read_field_checkpoint(const std::string& path);

// --- Tables --------------------------------------------------------------

// CSV with a header row, 17 significant digits.
void emit_csv(const StudyResult& result, const std::string& path);
// JSON summary: fits, flags, metadata.
void emit_summary(const StudyResult& result, const std::string& path);
void emit_trajectory_csv(const Trajectory& traj, const std::string& path);

std::string format_real(double v);  // %.17g

}  // namespace fhl

#endif
