#include "fhl/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fhl {
namespace {

using nlohmann::json;

const std::set<std::string> kCommands = {"evolve",    "groundstate", "alpha-sweep",
                                         "meanfield", "dichotomy",   "verify"};

const std::set<std::string> kKnownKeys = {
    "command",        "gamma",      "sigma",           "mu",
    "lambda",         "alpha",      "dt",              "dim",
    "points_per_axis", "half_width", "horizon",        "n_particles",
    "sweep_values",   "schedule_exponent", "initial_width", "out_dir",
    "threads",        "seed",       "store_stride",    "omega"};

double require_number(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number())
    throw ConfigError(key + ": must be a number");
  return j[key].get<double>();
}

std::uint64_t fnv1a(const unsigned char* data, std::size_t n) {
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 1099511628211ull;
  }
  return h;
}

void put_bytes(std::string& buf, const void* p, std::size_t n) {
  buf.append(reinterpret_cast<const char*>(p), n);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");

  for (const auto& [key, value] : j.items())
    if (!kKnownKeys.count(key)) throw ConfigError("unknown key: " + key);

  RunConfig cfg;
  if (!j.contains("command") || !j["command"].is_string())
    throw ConfigError("command: required string");
  cfg.command = j["command"].get<std::string>();
  if (!kCommands.count(cfg.command))
    throw ConfigError("command: must be one of evolve, groundstate, alpha-sweep, "
                      "meanfield, dichotomy, verify");

  cfg.params.gamma = require_number(j, "gamma", 1.0);
  cfg.params.sigma = require_number(j, "sigma", 0.5);
  cfg.params.mu = require_number(j, "mu", 1.0);
  cfg.params.lambda = require_number(j, "lambda", 1.0);
  cfg.params.alpha = require_number(j, "alpha", cfg.command == "meanfield" ? 0.1 : 0.0);
  cfg.params.dt = require_number(j, "dt", 2e-3);

  // Domain checks; the validator names the offending key and its range.
  if (!(cfg.params.gamma > 0.0 && cfg.params.gamma < 1.5))
    throw ConfigError("gamma: admissible range is (0, 3/2)");
  if (!(cfg.params.sigma >= cfg.params.gamma / 2.0 && cfg.params.sigma <= 1.0))
    throw ConfigError("sigma: admissible range is [gamma/2, 1]");
  if (cfg.params.mu != 1.0 && cfg.params.mu != -1.0)
    throw ConfigError("mu: must be +1 or -1");
  if (!(cfg.params.lambda > 0.0))
    throw ConfigError("lambda: must be positive");
  if (cfg.params.alpha < 0.0)
    throw ConfigError("alpha: must be >= 0");
  if (!(cfg.params.dt > 0.0))
    throw ConfigError("dt: must be positive");

  const int default_dim = cfg.command == "meanfield" ? 1 : 3;
  const int dim = static_cast<int>(require_number(j, "dim", default_dim));
  const int m = static_cast<int>(require_number(j, "points_per_axis", 64));
  const double half_width = require_number(j, "half_width", 12.0);
  try {
    cfg.grid = Grid(dim, m, half_width);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  cfg.horizon = require_number(j, "horizon", 1.0);
  if (!(cfg.horizon >= 0.0)) throw ConfigError("horizon: must be >= 0");
  cfg.n_particles = static_cast<int>(require_number(j, "n_particles", 3));
  if (cfg.n_particles < 2) throw ConfigError("n_particles: must be >= 2");
  cfg.schedule_exponent = require_number(j, "schedule_exponent", 0.75);
  cfg.initial_width = require_number(j, "initial_width", 0.0);
  cfg.threads = static_cast<int>(require_number(j, "threads", 1));
  if (cfg.threads < 1) throw ConfigError("threads: must be >= 1");
  cfg.seed = static_cast<unsigned long long>(require_number(j, "seed", 0.0));
  cfg.store_stride = static_cast<int>(require_number(j, "store_stride", 10));
  if (cfg.store_stride < 1) throw ConfigError("store_stride: must be >= 1");
  cfg.omega = require_number(j, "omega", 1.0);
  if (!(cfg.omega > 0.0)) throw ConfigError("omega: must be positive");

  if (j.contains("out_dir")) {
    if (!j["out_dir"].is_string()) throw ConfigError("out_dir: must be a string");
    cfg.out_dir = j["out_dir"].get<std::string>();
  }
  if (j.contains("sweep_values")) {
    if (!j["sweep_values"].is_array())
      throw ConfigError("sweep_values: must be an array of numbers");
    for (const auto& v : j["sweep_values"]) {
      if (!v.is_number()) throw ConfigError("sweep_values: must be an array of numbers");
      cfg.sweep_values.push_back(v.get<double>());
    }
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void write_checkpoint(const std::string& path, const std::vector<cplx>& data,
                      int rank, const Grid& grid) {
  if (rank < 1 || rank > 255) throw std::invalid_argument("write_checkpoint: bad rank");
  std::string buf;
  buf.reserve(22 + data.size() * 16 + 8);
  put_bytes(buf, "FHRT", 4);
  const std::uint16_t version = 1;
  put_bytes(buf, &version, 2);
  const std::uint8_t r8 = static_cast<std::uint8_t>(rank);
  const std::uint8_t d8 = static_cast<std::uint8_t>(grid.dim);
  put_bytes(buf, &r8, 1);
  put_bytes(buf, &d8, 1);
  const std::uint32_t m32 = static_cast<std::uint32_t>(grid.m);
  put_bytes(buf, &m32, 4);
  put_bytes(buf, &grid.half_width, 8);
  for (const auto& v : data) {
    const double re = v.real(), im = v.imag();
    put_bytes(buf, &re, 8);
    put_bytes(buf, &im, 8);
  }
  const std::uint64_t sum =
      fnv1a(reinterpret_cast<const unsigned char*>(buf.data()), buf.size());
  put_bytes(buf, &sum, 8);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("write_checkpoint: cannot open " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write_checkpoint: short write to " + path);
}

CheckpointData read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_checkpoint: cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  auto fail = [&](std::size_t offset, const std::string& what) {
    throw std::runtime_error("read_checkpoint: " + what + " at byte offset " +
                             std::to_string(offset) + " in " + path);
  };
  if (buf.size() < 28) fail(buf.size(), "truncated header");
  if (std::memcmp(buf.data(), "FHRT", 4) != 0) fail(0, "bad magic");
  std::uint16_t version;
  std::memcpy(&version, buf.data() + 4, 2);
  if (version != 1) fail(4, "unsupported version");
  const int rank = static_cast<unsigned char>(buf[6]);
  const int dim = static_cast<unsigned char>(buf[7]);
  std::uint32_t m32;
  std::memcpy(&m32, buf.data() + 8, 4);
  double half_width;
  std::memcpy(&half_width, buf.data() + 12, 8);

  CheckpointData cp;
  cp.rank = rank;
  try {
    cp.grid = Grid(dim, static_cast<int>(m32), half_width);
  } catch (const std::invalid_argument& e) {
    fail(6, std::string("invalid grid metadata (") + e.what() + ")");
  }
  std::size_t count = 1;
  for (int a = 0; a < rank * dim; ++a) count *= m32;
  const std::size_t payload_end = 20 + count * 16;
  if (buf.size() != payload_end + 8) fail(buf.size(), "truncated payload");
  std::uint64_t stored;
  std::memcpy(&stored, buf.data() + payload_end, 8);
  const std::uint64_t sum =
      fnv1a(reinterpret_cast<const unsigned char*>(buf.data()), payload_end);
  if (stored != sum) fail(payload_end, "checksum mismatch");

  cp.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    double re, im;
    std::memcpy(&re, buf.data() + 20 + i * 16, 8);
    std::memcpy(&im, buf.data() + 20 + i * 16 + 8, 8);
    cp.data[i] = cplx(re, im);
  }
  return cp;
}

void write_field_checkpoint(const std::string& path, const Field& f) {
  write_checkpoint(path, f.values, 1, f.grid);
}

Field read_field_checkpoint(const std::string& path) {
  CheckpointData cp = read_checkpoint(path);
  if (cp.rank != 1)
    throw std::runtime_error("read_field_checkpoint: rank " + std::to_string(cp.rank) +
                             " checkpoint is not a single-particle field");
  return Field(cp.grid, std::move(cp.data));
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void emit_csv(const StudyResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
  for (std::size_t c = 0; c < result.columns.size(); ++c)
    out << (c ? "," : "") << result.columns[c];
  out << "\n";
  for (const auto& row : result.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c ? "," : "") << format_real(row[c]);
    out << "\n";
  }
  if (!out) throw std::runtime_error("emit_csv: write failure on " + path);
}

void emit_summary(const StudyResult& result, const std::string& path) {
  json j;
  j["kind"] = result.kind;
  j["columns"] = result.columns;
  json fits = json::object();
  for (const auto& [name, fit] : result.fits) {
    fits[name] = {{"slope", fit.slope},
                  {"intercept", fit.intercept},
                  {"residual", fit.residual},
                  {"valid", fit.valid}};
  }
  j["fits"] = fits;
  j["flags"] = result.flags;
  j["metadata"] = result.metadata;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("emit_summary: cannot open " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("emit_summary: write failure on " + path);
}

void emit_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("emit_trajectory_csv: cannot open " + path);
  out << "t,mass,kinetic,potential,energy,h_gamma_half,h_sigma,sup_potential\n";
  for (const auto& d : traj.diagnostics) {
    out << format_real(d.t) << ',' << format_real(d.mass) << ','
        << format_real(d.kinetic) << ',' << format_real(d.potential) << ','
        << format_real(d.energy) << ',' << format_real(d.h_gamma_half) << ','
        << format_real(d.h_sigma) << ',' << format_real(d.sup_potential) << "\n";
  }
  if (!out) throw std::runtime_error("emit_trajectory_csv: write failure on " + path);
}

}  // namespace fhl
