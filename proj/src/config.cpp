#include "tmsat/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include "tmsat/error.hpp"

namespace tmsat {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0') throw Error(ErrorKind::InvalidParameter, key + ": not a number: '" + text + "'");
  return v;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
    throw Error(ErrorKind::InvalidParameter, key + ": not a non-negative integer: '" + text + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw Error(ErrorKind::InvalidParameter, key + ": not a boolean: '" + text + "'");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(to_double(key, item));
  }
  return out;
}

std::string from_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + fmt(values[i]);
  return out;
}

struct Key {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define TMSAT_DOUBLE(name, member)                                                                 \
  {name, {[](RunConfig& c, const std::string& v) { c.member = to_double(name, v); },               \
          [](const RunConfig& c) { return fmt(c.member); }}}
#define TMSAT_COUNT(name, member, type)                                                            \
  {name, {[](RunConfig& c, const std::string& v) { c.member = static_cast<type>(to_unsigned(name, v)); }, \
          [](const RunConfig& c) { return std::to_string(c.member); }}}
#define TMSAT_BOOL(name, member)                                                                   \
  {name, {[](RunConfig& c, const std::string& v) { c.member = to_bool(name, v); },                 \
          [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }}}

const std::map<std::string, Key>& keys() {
  static const std::map<std::string, Key> table = {
      TMSAT_DOUBLE("physical.wavelength", physical.wavelength),
      TMSAT_DOUBLE("physical.pulse_duration", physical.pulse_duration),
      TMSAT_DOUBLE("physical.satellite_altitude", physical.satellite_altitude),
      TMSAT_DOUBLE("physical.zenith_angle", physical.zenith_angle),
      {"physical.ground_altitude",
       {[](RunConfig& c, const std::string& v) { c.physical.ground_altitudes = to_list("physical.ground_altitude", v); },
        [](const RunConfig& c) { return from_list(c.physical.ground_altitudes); }}},
      {"physical.aperture_radius",
       {[](RunConfig& c, const std::string& v) { c.physical.aperture_radii = to_list("physical.aperture_radius", v); },
        [](const RunConfig& c) { return from_list(c.physical.aperture_radii); }}},
      TMSAT_DOUBLE("physical.beam_waist", physical.beam_waist),
      TMSAT_DOUBLE("physical.ground_strength", physical.ground_strength),
      TMSAT_DOUBLE("physical.wind_rms", physical.wind_rms),
      TMSAT_DOUBLE("physical.outer_scale", physical.outer_scale),
      TMSAT_DOUBLE("physical.inner_scale", physical.inner_scale),
      TMSAT_COUNT("numerical.spectral_points", numerical.spectral_points, std::size_t),
      TMSAT_DOUBLE("numerical.span_sigmas", numerical.span_sigmas),
      TMSAT_COUNT("numerical.n_xy", numerical.n_xy, std::size_t),
      TMSAT_DOUBLE("numerical.source_extent", numerical.source_extent),
      TMSAT_DOUBLE("numerical.receiver_extent", numerical.receiver_extent),
      TMSAT_DOUBLE("numerical.turbulence_top", numerical.turbulence_top),
      TMSAT_COUNT("numerical.screen_count", numerical.screen_count, int),
      TMSAT_COUNT("numerical.subharmonic_levels", numerical.subharmonic_levels, int),
      TMSAT_COUNT("numerical.ensemble_size", numerical.ensemble_size, std::size_t),
      {"numerical.seed",
       {[](RunConfig& c, const std::string& v) {
          if (trim(v).empty()) {
            c.numerical.seed.reset();
          } else {
            c.numerical.seed = to_unsigned("numerical.seed", v);
          }
        },
        [](const RunConfig& c) { return c.numerical.seed ? std::to_string(*c.numerical.seed) : std::string(); }}},
      TMSAT_COUNT("numerical.threads", numerical.threads, unsigned),
      TMSAT_COUNT("sweep.d_min", sweep.d_min, int),
      TMSAT_COUNT("sweep.d_max", sweep.d_max, int),
      TMSAT_DOUBLE("sweep.eta0", sweep.eta0),
      {"sweep.eta1_qkd",
       {[](RunConfig& c, const std::string& v) { c.sweep.eta1_qkd = parse_grid(v); },
        [](const RunConfig& c) { return format_grid(c.sweep.eta1_qkd); }}},
      {"sweep.eta1_detection",
       {[](RunConfig& c, const std::string& v) { c.sweep.eta1_detection = parse_grid(v); },
        [](const RunConfig& c) { return format_grid(c.sweep.eta1_detection); }}},
      TMSAT_BOOL("sweep.uncompensated", sweep.uncompensated),
      TMSAT_BOOL("sweep.compensated", sweep.compensated),
      TMSAT_BOOL("sweep.detection_table", sweep.detection_table),
      TMSAT_BOOL("sweep.qkd_table", sweep.qkd_table),
      TMSAT_BOOL("sweep.tm", sweep.tm),
      TMSAT_BOOL("sweep.oam", sweep.oam),
      {"sweep.c_smm",
       {[](RunConfig& c, const std::string& v) {
          if (trim(v).empty()) {
            c.sweep.c_smm.reset();
          } else {
            c.sweep.c_smm = to_double("sweep.c_smm", v);
          }
        },
        [](const RunConfig& c) { return c.sweep.c_smm ? fmt(*c.sweep.c_smm) : std::string(); }}},
      {"output.directory",
       {[](RunConfig& c, const std::string& v) { c.output.directory = trim(v); },
        [](const RunConfig& c) { return c.output.directory.string(); }}},
      {"output.basename",
       {[](RunConfig& c, const std::string& v) { c.output.basename = trim(v); },
        [](const RunConfig& c) { return c.output.basename; }}},
      TMSAT_BOOL("output.csv", output.csv),
      TMSAT_BOOL("output.json", output.json),
      TMSAT_BOOL("output.plot_data", output.plot_data),
      {"output.cache_directory",
       {[](RunConfig& c, const std::string& v) { c.output.cache_directory = trim(v); },
        [](const RunConfig& c) { return c.output.cache_directory.string(); }}},
  };
  return table;
}

#undef TMSAT_DOUBLE
#undef TMSAT_COUNT
#undef TMSAT_BOOL

void set_key(RunConfig& config, const std::string& key, const std::string& value) {
  const auto it = keys().find(key);
  if (it == keys().end()) throw Error(ErrorKind::InvalidParameter, "unknown configuration key '" + key + "'");
  it->second.set(config, value);
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return {};
  if (t.find(':') == std::string::npos) return to_list("grid", t);
  std::vector<double> parts;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(to_double("grid", item));
  require(parts.size() == 3, "grid range must be start:stop:step");
  const double start = parts[0], stop = parts[1], step = parts[2];
  require(step > 0.0 && stop >= start, "grid range needs step > 0 and stop >= start");
  const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  std::vector<double> out;
  for (long i = 0; i <= count; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

std::string format_grid(const std::vector<double>& grid) { return from_list(grid); }

void RunConfig::validate() const {
  const auto& p = physical;
  require(p.wavelength > 0 && p.pulse_duration > 0 && p.satellite_altitude > 0 && p.beam_waist > 0 &&
              p.ground_strength > 0 && p.wind_rms > 0 && p.outer_scale > 0 && p.inner_scale > 0,
          "physical parameters must be positive");
  require(std::abs(p.zenith_angle) < 1.5707963267948966, "zenith angle must satisfy |theta_z| < pi/2");
  require(!p.ground_altitudes.empty() && !p.aperture_radii.empty(), "need at least one h0 and one r_a");
  for (double h0 : p.ground_altitudes) require(h0 >= 0.0 && h0 < 100e3, "ground altitude must lie in [0, 100 km)");
  for (double r : p.aperture_radii) require(r > 0.0, "aperture radius must be positive");
  const auto& n = numerical;
  require(n.ensemble_size >= 1, "ensemble size must be positive");
  require(n.screen_count >= 1, "screen count must be positive");
  require(n.source_extent > 0 && n.receiver_extent > 0 && n.span_sigmas > 0, "numerical extents must be positive");
  const auto& s = sweep;
  require(s.d_min >= 2 && s.d_max <= 9 && s.d_min <= s.d_max, "dimension range must lie within 2..9");
  require(s.eta0 > 0.0 && s.eta0 <= 1.0, "eta0 must lie in (0, 1]");
  if (s.c_smm) require(*s.c_smm >= 0.0 && *s.c_smm <= 1.0, "C_SMM must lie in [0, 1]");
  for (double e : s.eta1_qkd) require(e >= 0.0 && e <= s.eta0 + 1e-12, "eta1 grid must lie within [0, eta0]");
  for (double e : s.eta1_detection) require(e >= 0.0 && e <= s.eta0 + 1e-12, "eta1 grid must lie within [0, eta0]");
}

TurbulenceParameters RunConfig::turbulence(double ground_altitude) const {
  TurbulenceParameters t;
  t.wavelength = physical.wavelength;
  t.beam_waist = physical.beam_waist;
  t.ground_altitude = ground_altitude;
  t.satellite_altitude = physical.satellite_altitude;
  t.zenith_angle = physical.zenith_angle;
  t.ground_strength = physical.ground_strength;
  t.wind_rms = physical.wind_rms;
  t.scales = {physical.outer_scale, physical.inner_scale};
  t.turbulence_top = numerical.turbulence_top;
  t.screen_count = numerical.screen_count;
  t.subharmonic_levels = numerical.subharmonic_levels;
  t.n_xy = numerical.n_xy;
  t.source_extent = numerical.source_extent;
  t.receiver_extent = numerical.receiver_extent;
  return t;
}

RunConfig default_config() {
  RunConfig c;
  c.sweep.eta1_qkd = parse_grid("0:0.3:0.01");
  c.sweep.eta1_detection = parse_grid("0:0.9:0.01");
  if (const char* dir = std::getenv("TMSAT_CACHE_DIR")) c.output.cache_directory = dir;
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorKind::Io, path.string() + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  RunConfig config = default_config();
  const bool eta0_given = tree.get_optional<std::string>("sweep.eta0").has_value();
  const bool detection_grid_given = tree.get_optional<std::string>("sweep.eta1_detection").has_value();
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw Error(ErrorKind::InvalidParameter, path.string() + ": key '" + section + "' outside a section");
    for (const auto& [key, value] : body) set_key(config, section + "." + key, value.data());
  }
  if (eta0_given && !detection_grid_given) {
    config.sweep.eta1_detection = parse_grid("0:" + fmt(config.sweep.eta0) + ":0.01");
  }
  config.validate();
  return config;
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string::npos, "override must look like section.key=value: '" + assignment + "'");
  set_key(config, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void save_config(const RunConfig& config, const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  for (const auto& [key, entry] : keys()) tree.put(key, entry.get(config));
  try {
    boost::property_tree::write_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorKind::Io, path.string() + ": " + e.message());
  }
}

}  // namespace tmsat
