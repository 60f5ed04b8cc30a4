#pragma once

// Plain-text run configuration: `key = value` lines under [section] headers,
// `#` or `;` comments.  Parse errors carry file and line so the CLI can point
// at the offending entry.  Every field has a default; absent grid keys mean
// "use the profile family's recommended grid".

#include <cctype>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nlsb/nonlinearity.hpp"
#include "nlsb/numfmt.hpp"
#include "nlsb/profiles.hpp"

namespace nlsb {

struct RunConfig {
  // [nonlinearity]
  std::string nl_kind = "terms";
  std::vector<NonlinearTerm> nl_terms;  // empty means the default {(1, 6)}
  std::size_t nl_truncation = 64;

  // [profile]
  std::string profile_family = "positive-gaussian";
  double theta = 0.0;
  double A = 1.0;
  double b = 0.0;
  double n = 2.0;

  // [grid] (absent: recommended_grid for the family)
  std::optional<double> grid_half_width;
  std::optional<std::size_t> grid_num_points;

  // [criteria]
  std::vector<std::string> checks;  // empty means "auto"
  std::optional<double> lambda1, lambda2, lambda3, alpha1, alpha2, alpha3;
  std::optional<double> eps1, eps2, p, q;
  bool real_data_shortcut = false;

  // [scan]
  std::string scan_which = "gaussian-chirp-exp";
  AxisSpec scan_x{"theta", 0.0, 10.0, 100};
  AxisSpec scan_y{"A", 0.0, 10.0, 100};

  // [solver]
  double dt = 1e-3;
  double t_end = 1.0;
  std::size_t cadence = 10;

  // [output]
  std::string output_directory = ".";

  std::vector<NonlinearTerm> effective_terms() const {
    if (!nl_terms.empty()) return nl_terms;
    return {NonlinearTerm{1.0, 6.0}};
  }

  Nonlinearity make_nonlinearity() const {
    if (nl_kind == "exponential") return Nonlinearity::exponential_series(nl_truncation);
    return Nonlinearity::finite_sum(effective_terms());
  }

  ProfileFamily make_profile() const {
    if (profile_family == "chirped-gaussian")
      return ProfileFamily::chirped_gaussian(theta, A, b);
    if (profile_family == "weighted-decay")
      return ProfileFamily::weighted_decay(theta, A, n, b);
    if (profile_family == "positive-gaussian")
      return ProfileFamily::positive_gaussian(A);
    if (profile_family == "polynomial-decay")
      return ProfileFamily::polynomial_decay(A);
    throw std::runtime_error("unknown profile family: " + profile_family);
  }

  Grid make_grid() const {
    const Grid rec = recommended_grid(make_profile());
    return Grid{grid_half_width.value_or(rec.half_width),
                grid_num_points.value_or(rec.num_points)};
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

struct ConfigCursor {
  std::string file;
  std::size_t line = 0;
  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error(file + ":" + std::to_string(line) + ": " + what);
  }
};

inline double parse_double(const ConfigCursor& at, const std::string& key,
                           const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (trim(value.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  at.fail("value for '" + key + "' is not a number: '" + value + "'");
}

inline std::size_t parse_size(const ConfigCursor& at, const std::string& key,
                              const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (trim(value.substr(used)).empty() && v >= 0)
      return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  at.fail("value for '" + key + "' is not a nonnegative integer: '" + value + "'");
}

inline bool parse_bool(const ConfigCursor& at, const std::string& key,
                       const std::string& value) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  at.fail("value for '" + key + "' is not a boolean: '" + value + "'");
}

inline std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(value);
  while (std::getline(ss, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

}  // namespace detail

// "name:min:max:count", or "none" for the dummy axis of one-parameter scans.
inline AxisSpec parse_axis_spec(const std::string& text) {
  if (text == "none") return AxisSpec{"none", 0.0, 0.0, 1};
  AxisSpec axis;
  std::vector<std::string> parts;
  std::string cur;
  std::stringstream ss(text);
  while (std::getline(ss, cur, ':')) parts.push_back(detail::trim(cur));
  if (parts.size() != 4)
    throw std::runtime_error("axis spec must be name:min:max:count, got '" + text + "'");
  axis.name = parts[0];
  try {
    axis.min = std::stod(parts[1]);
    axis.max = std::stod(parts[2]);
    const long long c = std::stoll(parts[3]);
    if (c < 1) throw std::runtime_error("");
    axis.count = static_cast<std::size_t>(c);
  } catch (const std::exception&) {
    throw std::runtime_error("axis spec must be name:min:max:count with count >= 1, got '" +
                             text + "'");
  }
  return axis;
}

inline RunConfig parse_config(std::istream& is, const std::string& filename) {
  RunConfig cfg;
  detail::ConfigCursor at{filename, 0};
  std::string section;
  std::string line;
  while (std::getline(is, line)) {
    ++at.line;
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') at.fail("unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "nonlinearity" && section != "profile" && section != "grid" &&
          section != "criteria" && section != "scan" && section != "solver" &&
          section != "output")
        at.fail("unknown section [" + section + "]");
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) at.fail("expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) at.fail("empty key");
    if (value.empty()) at.fail("empty value for '" + key + "'");
    if (section.empty()) at.fail("key '" + key + "' appears before any [section]");

    if (section == "nonlinearity") {
      if (key == "kind") {
        if (value != "terms" && value != "exponential")
          at.fail("nonlinearity kind must be 'terms' or 'exponential'");
        cfg.nl_kind = value;
      } else if (key == "term") {
        const auto parts = detail::split_list(value);
        if (parts.size() != 2) at.fail("term must be 'c, beta'");
        cfg.nl_terms.push_back(NonlinearTerm{detail::parse_double(at, key, parts[0]),
                                             detail::parse_double(at, key, parts[1])});
      } else if (key == "truncation") {
        cfg.nl_truncation = detail::parse_size(at, key, value);
      } else {
        at.fail("unknown key '" + key + "' in [nonlinearity]");
      }
    } else if (section == "profile") {
      if (key == "family") {
        if (value != "chirped-gaussian" && value != "weighted-decay" &&
            value != "positive-gaussian" && value != "polynomial-decay")
          at.fail("unknown profile family '" + value + "'");
        cfg.profile_family = value;
      } else if (key == "theta") {
        cfg.theta = detail::parse_double(at, key, value);
      } else if (key == "A") {
        cfg.A = detail::parse_double(at, key, value);
      } else if (key == "b") {
        cfg.b = detail::parse_double(at, key, value);
      } else if (key == "n") {
        cfg.n = detail::parse_double(at, key, value);
      } else {
        at.fail("unknown key '" + key + "' in [profile]");
      }
    } else if (section == "grid") {
      if (key == "half_width") {
        cfg.grid_half_width = detail::parse_double(at, key, value);
      } else if (key == "num_points") {
        cfg.grid_num_points = detail::parse_size(at, key, value);
      } else {
        at.fail("unknown key '" + key + "' in [grid]");
      }
    } else if (section == "criteria") {
      if (key == "checks") {
        cfg.checks = detail::split_list(value);
      } else if (key == "lambda1") {
        cfg.lambda1 = detail::parse_double(at, key, value);
      } else if (key == "lambda2") {
        cfg.lambda2 = detail::parse_double(at, key, value);
      } else if (key == "lambda3") {
        cfg.lambda3 = detail::parse_double(at, key, value);
      } else if (key == "alpha1") {
        cfg.alpha1 = detail::parse_double(at, key, value);
      } else if (key == "alpha2") {
        cfg.alpha2 = detail::parse_double(at, key, value);
      } else if (key == "alpha3") {
        cfg.alpha3 = detail::parse_double(at, key, value);
      } else if (key == "eps1") {
        cfg.eps1 = detail::parse_double(at, key, value);
      } else if (key == "eps2") {
        cfg.eps2 = detail::parse_double(at, key, value);
      } else if (key == "p") {
        cfg.p = detail::parse_double(at, key, value);
      } else if (key == "q") {
        cfg.q = detail::parse_double(at, key, value);
      } else if (key == "real_data_shortcut") {
        cfg.real_data_shortcut = detail::parse_bool(at, key, value);
      } else {
        at.fail("unknown key '" + key + "' in [criteria]");
      }
    } else if (section == "scan") {
      if (key == "which") {
        cfg.scan_which = value;
      } else if (key == "x") {
        try {
          cfg.scan_x = parse_axis_spec(value);
        } catch (const std::exception& e) {
          at.fail(e.what());
        }
      } else if (key == "y") {
        try {
          cfg.scan_y = parse_axis_spec(value);
        } catch (const std::exception& e) {
          at.fail(e.what());
        }
      } else {
        at.fail("unknown key '" + key + "' in [scan]");
      }
    } else if (section == "solver") {
      if (key == "dt") {
        cfg.dt = detail::parse_double(at, key, value);
      } else if (key == "t_end") {
        cfg.t_end = detail::parse_double(at, key, value);
      } else if (key == "cadence") {
        cfg.cadence = detail::parse_size(at, key, value);
      } else {
        at.fail("unknown key '" + key + "' in [solver]");
      }
    } else {  // output
      if (key == "directory") {
        cfg.output_directory = value;
      } else {
        at.fail("unknown key '" + key + "' in [output]");
      }
    }
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  return parse_config(is, path);
}

}  // namespace nlsb
