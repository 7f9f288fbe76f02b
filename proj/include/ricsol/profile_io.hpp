#pragma once
//! \file profile_io.hpp
//  \brief CSV serialization of soliton profiles and sweep tables.
//
//  Profile files start with a `# schema_version: N` comment line followed by
//  the header
//
//    t,a,a_prime,b,b_prime,phi,phi_prime,mu,res_tt,res_sk,res_sm
//
//  Numbers use 17 significant digits, so doubles survive a round trip exactly.

#include "ricsol/soliton_ode.hpp"

#include <cstdlib>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ricsol {

inline constexpr int kProfileSchemaVersion = 1;
inline constexpr const char* kProfileHeader = "t,a,a_prime,b,b_prime,phi,phi_prime,mu,res_tt,res_sk,res_sm";

class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline void write_profile_csv(std::ostream& os, const SolitonProfile& prof) {
  os << "# schema_version: " << kProfileSchemaVersion << '\n' << kProfileHeader << '\n';
  for (std::size_t i = 0; i < prof.size(); ++i) {
    const double row[] = {prof.t[i],   prof.a[i],      prof.a_prime[i], prof.b[i],      prof.b_prime[i], prof.phi[i],
                          prof.phi_prime[i], prof.mu[i], prof.res_tt[i], prof.res_sk[i], prof.res_sm[i]};
    for (std::size_t c = 0; c < std::size(row); ++c) os << (c ? "," : "") << format_number(row[c]);
    os << '\n';
  }
}

namespace detail {

inline double parse_number(const std::string& field, std::size_t line) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (field.empty() || end != begin + field.size())
    throw FormatError("profile line " + std::to_string(line) + ": not a number: '" + field + "'");
  return v;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

} // namespace detail

/// Reads the state columns of a profile CSV and re-derives mu and residuals
/// with `params`. Throws FormatError on any schema problem.
inline SolitonProfile read_profile_csv(std::istream& is, const AnsatzParams& params) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() -> bool {
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next()) throw FormatError("profile is empty");
  const std::string tag = "# schema_version:";
  if (line.rfind(tag, 0) != 0) throw FormatError("profile is missing the schema_version line");
  const int version = static_cast<int>(detail::parse_number(line.substr(line.find_first_not_of(' ', tag.size())), lineno));
  if (version != kProfileSchemaVersion)
    throw FormatError("unsupported profile schema_version " + std::to_string(version));
  if (!next() || line != kProfileHeader) throw FormatError("profile header does not match the expected columns");

  SolitonProfile prof;
  prof.params = params;
  while (next()) {
    const auto fields = detail::split_csv(line);
    if (fields.size() != 11)
      throw FormatError("profile line " + std::to_string(lineno) + ": expected 11 columns, got " +
                        std::to_string(fields.size()));
    std::vector<double> v;
    for (const auto& f : fields) v.push_back(detail::parse_number(f, lineno));
    if (!prof.t.empty() && !(v[0] > prof.t.back()))
      throw FormatError("profile line " + std::to_string(lineno) + ": t must increase strictly");
    prof.t.push_back(v[0]);
    prof.a.push_back(v[1]);
    prof.a_prime.push_back(v[2]);
    prof.b.push_back(v[3]);
    prof.b_prime.push_back(v[4]);
    prof.phi.push_back(v[5]);
    prof.phi_prime.push_back(v[6]);
  }
  if (prof.t.empty()) throw FormatError("profile has no data rows");
  prof.lifetime = prof.t.back();
  annotate(prof);
  return prof;
}

inline constexpr const char* kSweepHeader =
    "k,m,lambda,b0,phi_pp0,status,lifetime,mu_mean,mu_spread,growth_a,growth_b,long_lived,a_increasing,b_increasing";

/// Sweep table; growth exponents that do not apply are left empty.
inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "# schema_version: " << kProfileSchemaVersion << '\n' << kSweepHeader << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const auto& r : rows) {
    const auto& p = r.params;
    os << p.k << ',' << p.m << ',' << format_number(p.lambda) << ',' << format_number(p.b0) << ','
       << format_number(p.potential_curvature()) << ',' << to_string(r.status) << ',' << format_number(r.lifetime)
       << ',' << format_number(r.mu_mean) << ',' << format_number(r.mu_spread) << ',' << opt(r.growth_a) << ','
       << opt(r.growth_b) << ',' << (r.long_lived ? 1 : 0) << ',' << (r.a_increasing ? 1 : 0) << ','
       << (r.b_increasing ? 1 : 0) << '\n';
  }
}

} // namespace ricsol
