#pragma once
//! \file cli.hpp
//  \brief Run configuration and the solve / certify / quotient / sweep commands.
//
//  Exit codes: 0 pass, 2 validation or certification failure, 3 numeric
//  failure, 4 I/O failure.

#include "ricsol/profile_io.hpp"
#include "ricsol/quotient.hpp"
#include "ricsol/soliton_ode.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>

namespace ricsol::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kConfigSchemaVersion = 1;

enum ExitCode : int { kPass = 0, kFail = 2, kNumeric = 3, kIo = 4 };

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct QuotientConfig {
  int p = 2;
  ActionKind kind = ActionKind::antipodal;
  SampleSpec samples;
  QuotientOptions options;
};

struct SweepConfig {
  std::vector<int> k{1}, m{2};
  std::vector<double> lambda{0.0}, b0{1.0}, phi_pp0;
  unsigned threads = 0; ///< 0: hardware concurrency
};

struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  AnsatzParams ansatz;
  ProfileCertifyOptions certify;
  std::optional<std::string> profile; ///< certify this CSV instead of shooting
  QuotientConfig quotient;
  SweepConfig sweep;
  std::string output_dir = "out";
  nlohmann::json source = nlohmann::json::object();

  /// Hex FNV-1a of the canonical JSON the run was configured from.
  std::string hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : source.dump()) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
  }
};

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  const std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& [key, _] : obj.items())
    if (!known.count(key)) throw ConfigError("unknown field '" + key + "' in " + where);
}

template <class T>
void read(const nlohmann::json& obj, const char* key, const std::string& where, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

inline void positive(double v, const std::string& name) {
  if (!(v > 0.0)) throw ConfigError(name + " must be > 0");
}

} // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  using detail::read;
  detail::reject_unknown(j, "config", {"schema_version", "ansatz", "certify", "quotient", "sweep", "output_dir"});
  RunConfig c;
  c.source = j;
  if (!j.contains("schema_version")) throw ConfigError("config is missing schema_version");
  read(j, "schema_version", "config", c.schema_version);
  if (c.schema_version != kConfigSchemaVersion)
    throw ConfigError("unsupported config schema_version " + std::to_string(c.schema_version));
  read(j, "output_dir", "config", c.output_dir);

  if (j.contains("ansatz")) {
    const auto& a = j["ansatz"];
    detail::reject_unknown(a, "ansatz", {"k", "m", "lambda", "b0", "phi_pp0", "b_prime_offset", "epsilon", "t_max",
                                         "output_step", "atol", "rtol"});
    auto& p = c.ansatz;
    read(a, "k", "ansatz", p.k);
    read(a, "m", "ansatz", p.m);
    read(a, "lambda", "ansatz", p.lambda);
    read(a, "b0", "ansatz", p.b0);
    if (a.contains("phi_pp0")) {
      double v = 0.0;
      read(a, "phi_pp0", "ansatz", v);
      p.phi_pp0 = v;
    }
    read(a, "b_prime_offset", "ansatz", p.b_prime_offset);
    read(a, "epsilon", "ansatz", p.epsilon);
    read(a, "t_max", "ansatz", p.t_max);
    read(a, "output_step", "ansatz", p.output_step);
    read(a, "atol", "ansatz", p.atol);
    read(a, "rtol", "ansatz", p.rtol);
  }
  try {
    c.ansatz.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }

  if (j.contains("certify")) {
    const auto& s = j["certify"];
    detail::reject_unknown(s, "certify", {"tolerance", "h", "samples", "t_min", "t_max", "profile"});
    read(s, "tolerance", "certify", c.certify.tolerance);
    read(s, "h", "certify", c.certify.h);
    read(s, "samples", "certify", c.certify.samples);
    read(s, "t_min", "certify", c.certify.t_min);
    read(s, "t_max", "certify", c.certify.t_max);
    if (s.contains("profile")) {
      std::string path;
      read(s, "profile", "certify", path);
      c.profile = path;
    }
  }
  detail::positive(c.certify.tolerance, "certify.tolerance");
  detail::positive(c.certify.h, "certify.h");
  if (c.certify.samples < 1) throw ConfigError("certify.samples must be >= 1");

  if (j.contains("quotient")) {
    const auto& q = j["quotient"];
    detail::reject_unknown(q, "quotient", {"p", "kind", "base_samples", "fiber_samples", "seed", "tolerance",
                                           "freeness_tolerance"});
    read(q, "p", "quotient", c.quotient.p);
    if (q.contains("kind")) {
      std::string kind;
      read(q, "kind", "quotient", kind);
      try {
        c.quotient.kind = parse_action_kind(kind);
      } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
      }
    }
    read(q, "base_samples", "quotient", c.quotient.samples.base_count);
    read(q, "fiber_samples", "quotient", c.quotient.samples.fiber_count);
    read(q, "seed", "quotient", c.quotient.samples.seed);
    read(q, "tolerance", "quotient", c.quotient.options.tolerance);
    read(q, "freeness_tolerance", "quotient", c.quotient.options.freeness_tolerance);
  }
  detail::positive(c.quotient.options.tolerance, "quotient.tolerance");
  detail::positive(c.quotient.options.freeness_tolerance, "quotient.freeness_tolerance");

  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    detail::reject_unknown(s, "sweep", {"k", "m", "lambda", "b0", "phi_pp0", "threads"});
    read(s, "k", "sweep", c.sweep.k);
    read(s, "m", "sweep", c.sweep.m);
    read(s, "lambda", "sweep", c.sweep.lambda);
    read(s, "b0", "sweep", c.sweep.b0);
    read(s, "phi_pp0", "sweep", c.sweep.phi_pp0);
    read(s, "threads", "sweep", c.sweep.threads);
  }
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

/// Writes to a sibling temporary file and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

struct CommandResult {
  int exit_code = kPass;
  nlohmann::json report;
  std::vector<std::filesystem::path> written;
};

namespace detail {

inline nlohmann::json provenance(const RunConfig& c, const char* command) {
  return {{"tool", "ricsol"}, {"tool_version", kToolVersion}, {"command", command}, {"config_hash", c.hash()}};
}

inline nlohmann::json ansatz_json(const AnsatzParams& p) {
  return {{"k", p.k},       {"m", p.m},         {"lambda", p.lambda}, {"b0", p.b0},
          {"phi_pp0", p.potential_curvature()}, {"epsilon", p.epsilon}, {"t_max", p.t_max}};
}

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

} // namespace detail

/// Shoots the configured profile; writes profile.csv and solve_summary.json.
inline CommandResult cmd_solve(const RunConfig& c) {
  const auto prof = shoot(c.ansatz);
  const std::filesystem::path dir(c.output_dir);
  std::ostringstream csv;
  write_profile_csv(csv, prof);
  CommandResult r;
  r.report = {{"schema_version", kReportSchemaVersion},
              {"kind", "solve_summary"},
              {"provenance", detail::provenance(c, "solve")},
              {"ansatz", detail::ansatz_json(c.ansatz)},
              {"classification", to_string(classify(c.ansatz.lambda))},
              {"status", to_string(prof.status)},
              {"lifetime", prof.lifetime},
              {"nodes", prof.size()},
              {"mu_mean", prof.mu_mean()},
              {"mu_spread", prof.mu_spread()},
              {"message", prof.message}};
  write_atomic(dir / "profile.csv", csv.str());
  write_atomic(dir / "solve_summary.json", detail::dump(r.report));
  r.written = {dir / "profile.csv", dir / "solve_summary.json"};
  r.exit_code = prof.status == ShootStatus::failed ? kNumeric : kPass;
  return r;
}

/// Certifies the profile named in the config (or a freshly shot one).
inline CommandResult cmd_certify(const RunConfig& c) {
  SolitonProfile prof;
  if (c.profile) {
    std::ifstream in(*c.profile);
    if (!in) throw IoError("cannot open profile " + *c.profile);
    try {
      prof = read_profile_csv(in, c.ansatz);
    } catch (const FormatError& e) {
      throw IoError(*c.profile + ": " + e.what());
    }
  } else {
    prof = shoot(c.ansatz);
  }
  const auto report = certify_profile(prof, c.certify);
  CommandResult r;
  r.report = report.to_json();
  r.report["provenance"] = detail::provenance(c, "certify");
  r.report["ansatz"] = detail::ansatz_json(c.ansatz);
  r.report["source"] = c.profile ? *c.profile : std::string("shot");
  const auto path = std::filesystem::path(c.output_dir) / "certificate.json";
  write_atomic(path, detail::dump(r.report));
  r.written = {path};
  r.exit_code = report.passed() ? kPass : kFail;
  return r;
}

/// Quotient certificate for the configured action on the shot profile.
inline CommandResult cmd_quotient(const RunConfig& c) {
  const auto& q = c.quotient;
  const auto action = make_cyclic_action(q.p, c.ansatz.k, c.ansatz.m, q.kind, q.samples);
  const auto prof = shoot(c.ansatz);
  const auto geom = profile_geometry(prof, c.certify);
  const double mu = prof.mu_mean();
  const double radius = c.ansatz.m > 1 && mu > 0.0 ? std::sqrt((c.ansatz.m - 1) / mu) : 1.0;
  if (c.ansatz.m > 1 && !(mu > 0.0)) throw PreconditionError("quotient: the fiber is not a round sphere (mu <= 0)");
  const auto cert = certify_quotient(action, ambient_warped(c.ansatz.k, c.ansatz.m, geom.a, geom.b, geom.phi, radius),
                                     q.options);
  CommandResult r;
  r.report = cert.to_json();
  r.report["provenance"] = detail::provenance(c, "quotient");
  r.report["ansatz"] = detail::ansatz_json(c.ansatz);
  r.report["seed"] = q.samples.seed;
  const auto path = std::filesystem::path(c.output_dir) / "quotient_certificate.json";
  write_atomic(path, detail::dump(r.report));
  r.written = {path};
  r.exit_code = cert.passed() ? kPass : kFail;
  return r;
}

/// Sweeps the configured grid; writes sweep.csv. Degenerate rows are flagged,
/// not errors.
inline CommandResult cmd_sweep(const RunConfig& c) {
  SweepGrid grid;
  grid.base = c.ansatz;
  grid.k = c.sweep.k;
  grid.m = c.sweep.m;
  grid.lambda = c.sweep.lambda;
  grid.b0 = c.sweep.b0;
  grid.phi_pp0 = c.sweep.phi_pp0;
  for (const auto& p : grid.rows()) {
    try {
      p.validate();
    } catch (const PreconditionError& e) {
      throw ConfigError(std::string("sweep row: ") + e.what());
    }
  }
  const unsigned threads = c.sweep.threads ? c.sweep.threads : std::max(1u, std::thread::hardware_concurrency());
  const auto rows = sweep(grid, threads);
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  CommandResult r;
  std::size_t flagged = 0;
  for (const auto& row : rows) flagged += row.status != ShootStatus::completed;
  r.report = {{"schema_version", kReportSchemaVersion},
              {"kind", "sweep_summary"},
              {"provenance", detail::provenance(c, "sweep")},
              {"rows", rows.size()},
              {"flagged_rows", flagged}};
  const auto path = std::filesystem::path(c.output_dir) / "sweep.csv";
  write_atomic(path, csv.str());
  r.written = {path};
  return r;
}

/// Runs a command and maps exceptions to exit codes; `err` receives messages.
template <class Command>
int run_guarded(const Command& command, std::ostream& err, CommandResult* out = nullptr) {
  try {
    CommandResult r = command();
    const int code = r.exit_code;
    if (out) *out = std::move(r);
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kFail;
  } catch (const PreconditionError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kFail;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const FormatError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const GeometryError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIo;
  }
}

} // namespace ricsol::cli
