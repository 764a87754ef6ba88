#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gqw/circle_prequant.hpp"
#include "gqw/mpc_prequant.hpp"

// Sectioned key-value system files:
//
//   [manifold]      coordinates = p, q
//                   half_width = 2
//                   domain = p^2 + q^2 > 1/100     (repeatable)
//   [symplectic]    omega = dp^dq
//   [prequant]      beta = 1/2*(p*dq - q*dp)
//                   hbar = 1
//   [hamiltonians]  name = expression              (optional)
//   [tolerances]    epsilon, samples, seed          (optional)
//
// '#' starts a comment.

namespace gqw {

/// Load failure with the file position it refers to.
class SpecError : public Error {
 public:
  SpecError(const std::string& where, int line, const std::string& what)
      : Error(where + ":" + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] int line() const noexcept { return line_; }

 private:
  int line_;
};

struct SystemSpec {
  std::string source = "<memory>";
  std::vector<std::string> coordinates;
  double half_width = 2.0;
  std::vector<std::string> domain;  // "lhs > rhs" or "lhs < rhs"
  std::string omega;
  std::string beta;
  double hbar = 1.0;
  std::vector<std::pair<std::string, std::string>> hamiltonians;
  double epsilon = 1e-9;
  int samples = 32;
  std::uint64_t seed = 42;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& where, int line, const std::string& key) {
  std::istringstream in(text);
  T v{};
  in >> v;
  if (in.fail() || !in.eof()) throw SpecError(where, line, "'" + key + "' expects a number, got '" + text + "'");
  return v;
}

}  // namespace detail

inline SystemSpec parse_spec(std::istream& in, const std::string& where = "<memory>") {
  SystemSpec spec;
  spec.source = where;
  std::string section;
  std::map<std::string, int> seen;
  std::string raw;
  int line = 0;
  bool has_coords = false;
  while (std::getline(in, raw)) {
    ++line;
    if (line == 1 && raw.starts_with("\xEF\xBB\xBF")) raw.erase(0, 3);
    std::string text = detail::trim(raw.substr(0, raw.find('#')));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw SpecError(where, line, "unterminated section header");
      section = detail::trim(text.substr(1, text.size() - 2));
      static const std::vector<std::string> known{"manifold", "symplectic", "prequant", "hamiltonians", "tolerances"};
      if (std::find(known.begin(), known.end(), section) == known.end())
        throw SpecError(where, line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw SpecError(where, line, "expected 'key = value'");
    const std::string key = detail::trim(text.substr(0, eq));
    const std::string value = detail::trim(text.substr(eq + 1));
    if (key.empty()) throw SpecError(where, line, "missing key");
    if (value.empty()) throw SpecError(where, line, "missing value for '" + key + "'");
    if (section.empty()) throw SpecError(where, line, "'" + key + "' appears before any section");

    const std::string full = section + "." + key;
    if (full != "manifold.domain" && seen.contains(full))
      throw SpecError(where, line, "duplicate key '" + key + "' (first at line " + std::to_string(seen[full]) + ")");
    seen[full] = line;

    if (section == "hamiltonians") {
      spec.hamiltonians.emplace_back(key, value);
    } else if (full == "manifold.coordinates") {
      spec.coordinates = detail::split_list(value);
      has_coords = true;
    } else if (full == "manifold.half_width") {
      spec.half_width = detail::parse_number<double>(value, where, line, key);
      if (!(spec.half_width > 0)) throw SpecError(where, line, "half_width must be positive");
    } else if (full == "manifold.domain") {
      spec.domain.push_back(value);
    } else if (full == "symplectic.omega") {
      spec.omega = value;
    } else if (full == "prequant.beta") {
      spec.beta = value;
    } else if (full == "prequant.hbar") {
      spec.hbar = detail::parse_number<double>(value, where, line, key);
      if (!(spec.hbar > 0)) throw SpecError(where, line, "hbar must be positive");
    } else if (full == "tolerances.epsilon") {
      spec.epsilon = detail::parse_number<double>(value, where, line, key);
      if (!(spec.epsilon > 0)) throw SpecError(where, line, "epsilon must be positive");
    } else if (full == "tolerances.samples") {
      spec.samples = detail::parse_number<int>(value, where, line, key);
      if (spec.samples <= 0) throw SpecError(where, line, "samples must be positive");
    } else if (full == "tolerances.seed") {
      spec.seed = detail::parse_number<std::uint64_t>(value, where, line, key);
    } else {
      throw SpecError(where, line, "unknown key '" + key + "' in [" + section + "]");
    }
  }
  if (!has_coords) throw SpecError(where, line, "missing [manifold] coordinates");
  if (spec.omega.empty()) throw SpecError(where, line, "missing [symplectic] omega");
  if (spec.beta.empty()) throw SpecError(where, line, "missing [prequant] beta");
  return spec;
}

inline SystemSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError(path, 0, "cannot open file");
  return parse_spec(in, path);
}

/// Command-line overrides of the file's numeric settings.
struct SpecOverrides {
  std::optional<int> samples;
  std::optional<double> epsilon;
  std::optional<std::uint64_t> seed;
  std::optional<double> hbar;
};

inline SystemSpec apply_overrides(SystemSpec s, const SpecOverrides& o) {
  if (o.samples) s.samples = *o.samples;
  if (o.epsilon) s.epsilon = *o.epsilon;
  if (o.seed) s.seed = *o.seed;
  if (o.hbar) s.hbar = *o.hbar;
  return s;
}

/// The validated objects built from a spec.
struct System {
  SystemSpec spec;
  SymplecticChart symplectic;
  PrequantCircle circle;
  std::optional<MpcPrequant> mpc;
  std::vector<std::pair<std::string, Expr>> hamiltonians;

  [[nodiscard]] const Chart& chart() const { return symplectic.chart(); }
};

/// Hamiltonians used when a spec lists none, written in the first two coordinates.
inline std::vector<std::pair<std::string, std::string>> default_corpus(const std::vector<std::string>& c) {
  const std::string& p = c.at(0);
  const std::string& q = c.at(1);
  return {{"one", "1"},
          {p, p},
          {q, q},
          {p + q, p + "*" + q},
          {"r2", p + "^2 + " + q + "^2"},
          {"oscillator", "1/2*(" + p + "^2 + " + q + "^2)"},
          {"hyperbolic", p + "^2 - " + q + "^2"}};
}

namespace detail {

inline Expr domain_expression(const std::string& text, const std::vector<std::string>& coords) {
  const auto gt = text.find('>');
  const auto lt = text.find('<');
  if ((gt == std::string::npos) == (lt == std::string::npos))
    throw ValidationError("domain constraint '" + text + "' needs exactly one '>' or '<'");
  const bool greater = gt != std::string::npos;
  const auto at = greater ? gt : lt;
  Expr lhs = parse_expr(trim(text.substr(0, at)), coords);
  Expr rhs = parse_expr(trim(text.substr(at + 1)), coords);
  return greater ? lhs - rhs : rhs - lhs;
}

}  // namespace detail

/// Builds and validates the system: parses every expression, checks that
/// the domain is nonempty, that omega is closed and nondegenerate at the
/// samples and (unless `validate` is false) that d(beta) = omega.
inline System build_system(SystemSpec spec, bool validate = true) {
  auto stage = [&](const std::string& what, auto&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      throw ValidationError(spec.source + ": " + what + ": " + e.what());
    }
  };
  Chart chart = stage("manifold", [&] {
    std::vector<Expr> ineq;
    for (const auto& d : spec.domain) ineq.push_back(detail::domain_expression(d, spec.coordinates));
    Chart c = Chart::box(spec.coordinates, spec.half_width, ineq);
    Chart tuned = c.with_sampler(c.sampler()
                                     .with_seed(spec.seed)
                                     .with_samples(spec.samples)
                                     .with_tolerance(spec.epsilon)
                                     .with_hbar(spec.hbar));
    (void)tuned.sampler().points();  // throws if the domain is empty
    return tuned;
  });
  SymplecticChart symplectic = stage("omega", [&] { return SymplecticChart(chart, parse_form(spec.omega, chart)); });
  KForm beta = stage("beta", [&] { return parse_form(spec.beta, chart); });
  PrequantCircle circle = stage("d(beta) = omega", [&] {
    return validate ? PrequantCircle(symplectic, beta) : PrequantCircle::unchecked(symplectic, beta);
  });
  std::optional<MpcPrequant> mpc;
  if (chart.dimension() == 2) mpc = MpcPrequant::unchecked(symplectic, beta);

  if (spec.hamiltonians.empty()) {
    if (chart.dimension() < 2) throw ValidationError(spec.source + ": need at least two coordinates");
    spec.hamiltonians = default_corpus(spec.coordinates);
  }
  std::vector<std::pair<std::string, Expr>> hams;
  for (const auto& [name, text] : spec.hamiltonians)
    hams.emplace_back(name, stage("hamiltonian '" + name + "'", [&] { return chart.parse(text); }));
  return {std::move(spec), std::move(symplectic), std::move(circle), std::move(mpc), std::move(hams)};
}

inline System load_system(const std::string& path, const SpecOverrides& o = {}, bool validate = true) {
  return build_system(apply_overrides(load_spec_file(path), o), validate);
}

/// The punctured plane with beta = 1/2 (p dq - q dp).
inline SystemSpec punctured_plane_spec() {
  SystemSpec s;
  s.source = "punctured_plane";
  s.coordinates = {"p", "q"};
  s.domain = {"p^2 + q^2 > 1/100"};
  s.omega = "dp^dq";
  s.beta = "1/2*(p*dq - q*dp)";
  return s;
}

}  // namespace gqw
