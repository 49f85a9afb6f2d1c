#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "leolat/errors.hpp"
#include "leolat/geomath.hpp"
#include "leolat/orbit.hpp"

namespace leolat {

enum class TleErrorKind { Length, LineNumber, Checksum, Field };

inline const char* to_string(TleErrorKind k) {
  switch (k) {
    case TleErrorKind::Length: return "length";
    case TleErrorKind::LineNumber: return "line-number";
    case TleErrorKind::Checksum: return "checksum";
    case TleErrorKind::Field: return "field";
  }
  return "?";
}

class TleError : public ParseError {
 public:
  TleError(TleErrorKind kind, int line, int column, const std::string& what)
      : ParseError(make_message(kind, line, column, what)), kind_(kind), line_(line), column_(column) {}

  TleErrorKind kind() const { return kind_; }
  int line() const { return line_; }
  // 1-based column of the offending field.
  int column() const { return column_; }

 private:
  static std::string make_message(TleErrorKind kind, int line, int column, const std::string& what) {
    std::ostringstream msg;
    msg << "TLE " << to_string(kind) << " error at line " << line << ", column " << column << ": " << what;
    return msg.str();
  }

  TleErrorKind kind_;
  int line_;
  int column_;
};

struct TleRecord {
  std::string name;
  int catalog_number = 0;
  char classification = 'U';
  std::string intl_designator;
  int epoch_year = 2000;  // four digits
  double epoch_day = 1.0;
  double mean_motion_dot = 0.0;
  double mean_motion_ddot = 0.0;
  double bstar = 0.0;
  int ephemeris_type = 0;
  int element_set = 0;
  double inclination_deg = 0.0;
  double raan_deg = 0.0;
  double eccentricity = 0.0;
  double arg_perigee_deg = 0.0;
  double mean_anomaly_deg = 0.0;
  double mean_motion_rev_per_day = 0.0;
  int rev_number = 0;
};

inline constexpr std::size_t kTleLineLength = 69;

// Modulo-10 checksum over the first 68 columns: digits count their value,
// '-' counts as 1, everything else counts 0.
inline int tle_checksum(std::string_view line) {
  int sum = 0;
  const std::size_t n = std::min<std::size_t>(line.size(), kTleLineLength - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const char c = line[i];
    if (c >= '0' && c <= '9') sum += c - '0';
    else if (c == '-') sum += 1;
  }
  return sum % 10;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

// Columns are 1-based and inclusive, as in the published format.
inline std::string_view columns(std::string_view line, int first, int last) {
  return line.substr(static_cast<std::size_t>(first - 1), static_cast<std::size_t>(last - first + 1));
}

inline double tle_double(std::string_view line, int line_no, int first, int last) {
  std::string_view f = trim(columns(line, first, last));
  if (!f.empty() && f.front() == '+') f.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size())
    throw TleError(TleErrorKind::Field, line_no, first, "not a number: '" + std::string(f) + "'");
  return v;
}

inline int tle_int(std::string_view line, int line_no, int first, int last, bool blank_is_zero = false) {
  std::string_view f = trim(columns(line, first, last));
  if (f.empty() && blank_is_zero) return 0;
  int v = 0;
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size())
    throw TleError(TleErrorKind::Field, line_no, first, "not an integer: '" + std::string(f) + "'");
  return v;
}

// "Assumed decimal point" exponent notation, e.g. " 12345-3" == 0.12345e-3.
inline double tle_exp_field(std::string_view line, int line_no, int first, int last) {
  std::string_view f = columns(line, first, last);
  const std::size_t exp_pos = f.find_last_of("+-");
  if (exp_pos == std::string_view::npos || exp_pos == 0 || exp_pos + 1 >= f.size())
    throw TleError(TleErrorKind::Field, line_no, first, "bad exponent field '" + std::string(f) + "'");
  std::string_view mant = trim(f.substr(0, exp_pos));
  double sign = 1.0;
  if (!mant.empty() && (mant.front() == '-' || mant.front() == '+')) {
    if (mant.front() == '-') sign = -1.0;
    mant.remove_prefix(1);
  }
  std::string_view exps = f.substr(exp_pos);
  long digits = 0;
  int exponent = 0;
  auto r1 = std::from_chars(mant.data(), mant.data() + mant.size(), digits);
  const char* ebeg = exps.data() + (exps.front() == '+' ? 1 : 0);
  auto r2 = std::from_chars(ebeg, exps.data() + exps.size(), exponent);
  if (mant.empty() || r1.ec != std::errc{} || r1.ptr != mant.data() + mant.size() || r2.ec != std::errc{} ||
      r2.ptr != exps.data() + exps.size())
    throw TleError(TleErrorKind::Field, line_no, first, "bad exponent field '" + std::string(f) + "'");
  const double mantissa = static_cast<double>(digits) / std::pow(10.0, static_cast<double>(mant.size()));
  return sign * mantissa * std::pow(10.0, exponent);
}

inline void check_line(std::string_view line, int line_no) {
  if (line.size() != kTleLineLength) {
    std::ostringstream msg;
    msg << "expected " << kTleLineLength << " characters, got " << line.size();
    throw TleError(TleErrorKind::Length, line_no, static_cast<int>(std::min(line.size(), kTleLineLength)) + 1,
                   msg.str());
  }
  if (line[0] != static_cast<char>('0' + line_no))
    throw TleError(TleErrorKind::LineNumber, line_no, 1, std::string("expected line number ") +
                                                             static_cast<char>('0' + line_no));
  const char last = line[kTleLineLength - 1];
  if (last < '0' || last > '9' || last - '0' != tle_checksum(line)) {
    std::ostringstream msg;
    msg << "stated " << last << ", computed " << tle_checksum(line);
    throw TleError(TleErrorKind::Checksum, line_no, static_cast<int>(kTleLineLength), msg.str());
  }
}

inline std::string format_exp_field(double v) {
  if (v == 0.0) return " 00000-0";
  const double mag = std::fabs(v);
  int exponent = static_cast<int>(std::floor(std::log10(mag))) + 1;
  long digits = std::lround(mag / std::pow(10.0, exponent) * 1e5);
  if (digits >= 100000) {
    digits /= 10;
    ++exponent;
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "%c%05ld%c%d", v < 0 ? '-' : ' ', digits, exponent < 0 ? '-' : '+',
                std::abs(exponent));
  return buf;
}

inline std::string with_checksum(std::string body) {
  body.push_back(static_cast<char>('0' + tle_checksum(body)));
  return body;
}

}  // namespace detail

inline TleRecord parse_tle(std::string_view line1, std::string_view line2, std::string name = {}) {
  using namespace detail;
  check_line(line1, 1);
  check_line(line2, 2);

  TleRecord r;
  r.name = std::move(name);
  r.catalog_number = tle_int(line1, 1, 3, 7);
  r.classification = line1[7];
  r.intl_designator = std::string(trim(columns(line1, 10, 17)));
  const int yy = tle_int(line1, 1, 19, 20);
  r.epoch_year = yy < 57 ? 2000 + yy : 1900 + yy;
  r.epoch_day = tle_double(line1, 1, 21, 32);
  r.mean_motion_dot = tle_double(line1, 1, 34, 43);
  r.mean_motion_ddot = tle_exp_field(line1, 1, 45, 52);
  r.bstar = tle_exp_field(line1, 1, 54, 61);
  r.ephemeris_type = tle_int(line1, 1, 63, 63, true);
  r.element_set = tle_int(line1, 1, 65, 68, true);

  if (tle_int(line2, 2, 3, 7) != r.catalog_number)
    throw TleError(TleErrorKind::Field, 2, 3, "catalog number differs from line 1");
  r.inclination_deg = tle_double(line2, 2, 9, 16);
  r.raan_deg = tle_double(line2, 2, 18, 25);
  {
    std::string_view ecc = trim(columns(line2, 27, 33));
    long digits = 0;
    auto [ptr, ec] = std::from_chars(ecc.data(), ecc.data() + ecc.size(), digits);
    if (ecc.empty() || ec != std::errc{} || ptr != ecc.data() + ecc.size() || digits < 0)
      throw TleError(TleErrorKind::Field, 2, 27, "bad eccentricity '" + std::string(ecc) + "'");
    r.eccentricity = static_cast<double>(digits) / std::pow(10.0, static_cast<double>(ecc.size()));
  }
  r.arg_perigee_deg = tle_double(line2, 2, 35, 42);
  r.mean_anomaly_deg = tle_double(line2, 2, 44, 51);
  r.mean_motion_rev_per_day = tle_double(line2, 2, 53, 63);
  r.rev_number = tle_int(line2, 2, 64, 68, true);
  if (!(r.mean_motion_rev_per_day > 0.0)) throw TleError(TleErrorKind::Field, 2, 53, "mean motion must be positive");
  return r;
}

// Serializes a record back into the fixed-column layout with fresh checksums.
inline std::pair<std::string, std::string> format_tle(const TleRecord& r) {
  char buf[80];
  const double ndot = r.mean_motion_dot;
  char ndot_buf[16];
  std::snprintf(ndot_buf, sizeof ndot_buf, "%.8f", std::fabs(ndot));  // "0.xxxxxxxx"
  std::snprintf(buf, sizeof buf, "1 %05d%c %-8.8s %02d%012.8f %c%s %s %s %1d %4d", r.catalog_number,
                r.classification, r.intl_designator.c_str(), r.epoch_year % 100, r.epoch_day, ndot < 0 ? '-' : ' ',
                ndot_buf + 1, detail::format_exp_field(r.mean_motion_ddot).c_str(),
                detail::format_exp_field(r.bstar).c_str(), r.ephemeris_type, r.element_set);
  std::string line1 = detail::with_checksum(buf);

  const long ecc = std::lround(r.eccentricity * 1e7);
  std::snprintf(buf, sizeof buf, "2 %05d %8.4f %8.4f %07ld %8.4f %8.4f %11.8f%5d", r.catalog_number,
                r.inclination_deg, r.raan_deg, ecc, r.arg_perigee_deg, r.mean_anomaly_deg, r.mean_motion_rev_per_day,
                r.rev_number % 100000);
  std::string line2 = detail::with_checksum(buf);
  return {std::move(line1), std::move(line2)};
}

// Altitude of the circular orbit with the record's mean motion.
inline double tle_altitude_km(const TleRecord& r) {
  const double n = r.mean_motion_rev_per_day * 2.0 * kPi / 86400.0;
  return std::cbrt(kEarth.mu_km3_s2 / (n * n)) - kEarth.radius_km;
}

inline constexpr double kCircularizationThreshold = 0.01;

struct TleOrbit {
  CircularOrbit orbit;
  bool circularized = false;  // catalog eccentricity exceeded kCircularizationThreshold
};

// Circular approximation of a catalog element set. The in-plane position at
// epoch is the argument of latitude, perigee argument plus mean anomaly.
inline TleOrbit tle_to_orbit(const TleRecord& r, double epoch_s = 0.0) {
  const double alt = tle_altitude_km(r);
  if (!(alt >= kMinPropagationAltitudeKm && alt <= kMaxPropagationAltitudeKm)) {
    std::ostringstream msg;
    msg << "TLE " << r.catalog_number << ": implied altitude " << alt << " km outside ["
        << kMinPropagationAltitudeKm << ", " << kMaxPropagationAltitudeKm << "]";
    throw DomainError(msg.str());
  }
  TleOrbit out;
  out.orbit.altitude_km = alt;
  out.orbit.inclination_deg = r.inclination_deg;
  out.orbit.raan_deg = normalize_angle_deg(r.raan_deg);
  out.orbit.arg_lat0_deg = normalize_angle_deg(r.arg_perigee_deg + r.mean_anomaly_deg);
  out.orbit.epoch_s = epoch_s;
  out.orbit.validate();
  out.circularized = r.eccentricity > kCircularizationThreshold;
  return out;
}

// Reads a two- or three-line element file. Blank lines are ignored; a line
// not starting with "1 " or "2 " is taken as the name of the next record.
inline std::vector<TleRecord> parse_tle_text(std::istream& in) {
  std::vector<TleRecord> out;
  std::string line, name, first;
  bool have_first = false;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (detail::trim(line).empty()) continue;
    if (!have_first && line.rfind("1 ", 0) == 0) {
      first = line;
      have_first = true;
    } else if (have_first) {
      out.push_back(parse_tle(first, line, name));
      have_first = false;
      name.clear();
    } else if (line.rfind("2 ", 0) == 0) {
      throw TleError(TleErrorKind::LineNumber, 1, 1, "line 2 without preceding line 1");
    } else {
      name = std::string(detail::trim(line));
      if (name.rfind("0 ", 0) == 0) name = name.substr(2);
    }
  }
  if (have_first) throw TleError(TleErrorKind::LineNumber, 2, 1, "missing line 2 at end of input");
  return out;
}

inline std::vector<TleRecord> load_tle_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open TLE file " + path);
  return parse_tle_text(in);
}

// Day-of-epoch in seconds since 2000-01-01 00:00, used only for relative offsets.
inline double tle_epoch_seconds(const TleRecord& r) {
  double days = 0.0;
  for (int y = 2000; y < r.epoch_year; ++y) days += (y % 4 == 0 && (y % 100 != 0 || y % 400 == 0)) ? 366 : 365;
  for (int y = r.epoch_year; y < 2000; ++y) days -= (y % 4 == 0 && (y % 100 != 0 || y % 400 == 0)) ? 366 : 365;
  return (days + r.epoch_day - 1.0) * 86400.0;
}

struct TleCatalog {
  Constellation constellation;
  std::vector<std::string> names;
  std::vector<bool> circularized;
};

// Converts a catalog into a constellation. Ids follow file order. With
// `align_epochs` each orbit keeps its epoch offset relative to the earliest
// record, otherwise every epoch maps to simulation time 0.
inline TleCatalog tle_catalog_to_constellation(const std::vector<TleRecord>& records, bool align_epochs = false) {
  TleCatalog out;
  double ref = 0.0;
  if (align_epochs && !records.empty()) {
    ref = tle_epoch_seconds(records.front());
    for (const auto& r : records) ref = std::min(ref, tle_epoch_seconds(r));
  }
  int id = 0;
  for (const auto& r : records) {
    const double epoch = align_epochs ? tle_epoch_seconds(r) - ref : 0.0;
    TleOrbit o = tle_to_orbit(r, epoch);
    out.constellation.satellites.push_back({id++, o.orbit});
    out.names.push_back(r.name);
    out.circularized.push_back(o.circularized);
  }
  return out;
}

}  // namespace leolat
