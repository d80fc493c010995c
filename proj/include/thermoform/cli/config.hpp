#pragma once

// Experiment configuration read from a TOML file.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <toml.hpp>

#include "thermoform/error.hpp"
#include "thermoform/shift.hpp"

namespace thermoform::cli {

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config: " + what) {}
};

struct PotentialSpec {
  std::string kind = "geometric";  // product | geometric | halving | go | tabulated | constant | max_entropy
  double J = 2.0;
  double h = 0.0;
  double u = 1.2;
  int K = 10;
  std::vector<double> coefficients;
  std::optional<double> u_full;
  double tail_bound = 0.0;
  int d = 2;
  int depth = 1;
  std::vector<double> table;
  double value = 0.0;
};

inline PotentialSpec max_entropy_spec() {
  PotentialSpec s;
  s.kind = "max_entropy";
  return s;
}

struct ExperimentConfig {
  PotentialSpec potential;
  PotentialSpec f = max_entropy_spec();
  double beta = 1.0;

  std::string nonlinearity = "quadratic_convex";  // quadratic_convex | quadratic_concave | convex_grid | concave_grid
  std::vector<double> F_x, F_values;

  double t_min = -3.0, t_max = 3.0;
  std::size_t t_points = 601;
  double rate_t_half = 8.0;
  std::size_t rate_t_points = 4001;
  std::size_t x_points = 2001;

  std::vector<int> n_list{6, 10, 14, 18, 22};
  std::string mode = "m_n";           // m_n | M_n
  std::string observable = "cylinder";  // cylinder | spin_product
  std::vector<double> cylinder{1.0, 1.0};
  int spins = 2;
  int mixture_depth = 2;

  std::optional<std::string> output;
};

inline Potential build_potential(const PotentialSpec& s, const ShiftConfig& cfg = ShiftConfig::spins()) {
  const auto alphabet = [&] { return s.d == 2 ? ShiftConfig::spins() : ShiftConfig::alphabet(s.d); };
  if (s.kind == "product") return Potential::product(s.J, s.h, s.coefficients, s.u_full, s.tail_bound);
  if (s.kind == "geometric") return geometric_product(s.u, s.K, s.J);
  if (s.kind == "halving") return halving_product(s.K, s.J);
  if (s.kind == "go") return Potential::go();
  if (s.kind == "tabulated") return Potential::tabulated(alphabet(), s.depth, s.table);
  if (s.kind == "constant") return Potential::constant(alphabet(), s.value);
  if (s.kind == "max_entropy") return Potential::constant(cfg, -std::log(static_cast<double>(cfg.d())));
  throw ConfigError("unknown potential kind '" + s.kind + "'");
}

namespace detail {

inline void check_keys(const toml::table& t, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : t) {
    (void)v;
    if (!allowed.count(std::string(k.str()))) throw ConfigError("unknown key '" + std::string(k.str()) + "' in " + where);
  }
}

template <typename T>
void read(const toml::table& t, const char* key, T& out, const std::string& where) {
  const toml::node* n = t.get(key);
  if (n == nullptr) return;
  if constexpr (std::is_same_v<T, double>) {
    if (auto v = n->value<double>()) {
      out = *v;
      return;
    }
  } else if constexpr (std::is_same_v<T, std::optional<double>>) {
    if (auto v = n->value<double>()) {
      out = *v;
      return;
    }
  } else if constexpr (std::is_same_v<T, int>) {
    if (auto v = n->value<int64_t>()) {
      out = static_cast<int>(*v);
      return;
    }
  } else if constexpr (std::is_same_v<T, std::size_t>) {
    if (auto v = n->value<int64_t>(); v && *v >= 0) {
      out = static_cast<std::size_t>(*v);
      return;
    }
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (auto v = n->value<std::string>()) {
      out = *v;
      return;
    }
  } else if constexpr (std::is_same_v<T, std::vector<double>> || std::is_same_v<T, std::vector<int>>) {
    if (const auto* arr = n->as_array()) {
      out.clear();
      for (const auto& e : *arr) {
        using E = typename T::value_type;
        std::optional<E> v;
        if constexpr (std::is_same_v<E, double>) {
          v = e.value<double>();
        } else {
          v = e.value<int64_t>() ? std::optional<int>(static_cast<int>(*e.value<int64_t>())) : std::nullopt;
        }
        if (!v) throw ConfigError(where + "." + key + " has a non-numeric element");
        out.push_back(*v);
      }
      return;
    }
  }
  throw ConfigError(where + "." + key + " has the wrong type");
}

inline const toml::table* section(const toml::table& root, const char* name) {
  const toml::node* n = root.get(name);
  if (n == nullptr) return nullptr;
  if (!n->is_table()) throw ConfigError(std::string("[") + name + "] must be a table");
  return n->as_table();
}

inline PotentialSpec read_potential(const toml::table& t, const std::string& where, PotentialSpec s) {
  check_keys(t, where, {"kind", "J", "h", "u", "K", "coefficients", "u_full", "tail_bound", "d", "depth", "table", "value"});
  read(t, "kind", s.kind, where);
  read(t, "J", s.J, where);
  read(t, "h", s.h, where);
  read(t, "u", s.u, where);
  read(t, "K", s.K, where);
  read(t, "coefficients", s.coefficients, where);
  read(t, "u_full", s.u_full, where);
  read(t, "tail_bound", s.tail_bound, where);
  read(t, "d", s.d, where);
  read(t, "depth", s.depth, where);
  read(t, "table", s.table, where);
  read(t, "value", s.value, where);
  return s;
}

}  // namespace detail

inline void validate(const ExperimentConfig& c) {
  if (!(c.beta >= 0) || !std::isfinite(c.beta)) throw ConfigError("beta must be a finite nonnegative number");
  if (!(c.t_max > c.t_min) || c.t_points < 2) throw ConfigError("t grid needs t_max > t_min and at least 2 points");
  if (!(c.rate_t_half > 0) || c.rate_t_points < 3) throw ConfigError("rate t grid is invalid");
  if (c.x_points < 3) throw ConfigError("x grid needs at least 3 points");
  if (c.mode != "m_n" && c.mode != "M_n") throw ConfigError("enumerate.mode must be m_n or M_n");
  if (c.observable != "cylinder" && c.observable != "spin_product") throw ConfigError("unknown observable " + c.observable);
  if (c.cylinder.empty()) throw ConfigError("cylinder must not be empty");
  if (c.spins < 1) throw ConfigError("spins must be positive");
  if (c.mixture_depth < 1) throw ConfigError("mixture depth must be positive");
  for (int n : c.n_list) {
    if (n < 1) throw ConfigError("enumeration n must be positive");
  }
  static const std::set<std::string> kinds{"quadratic_convex", "quadratic_concave", "convex_grid", "concave_grid"};
  if (!kinds.count(c.nonlinearity)) throw ConfigError("unknown nonlinearity " + c.nonlinearity);
  if ((c.nonlinearity == "convex_grid" || c.nonlinearity == "concave_grid") && c.F_x.size() != c.F_values.size()) {
    throw ConfigError("nonlinearity x and values differ in length");
  }
}

inline ExperimentConfig parse_config(std::string_view text, const std::string& source = "config") {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    throw ConfigError(std::string(e.description()));
  }
  ExperimentConfig c;
  detail::check_keys(root, "top level", {"potential", "f", "model", "nonlinearity", "grid", "enumerate", "mixture", "output"});
  if (const auto* t = detail::section(root, "potential")) c.potential = detail::read_potential(*t, "potential", c.potential);
  if (const auto* t = detail::section(root, "f")) c.f = detail::read_potential(*t, "f", c.f);
  if (const auto* t = detail::section(root, "model")) {
    detail::check_keys(*t, "model", {"beta"});
    detail::read(*t, "beta", c.beta, "model");
  }
  if (const auto* t = detail::section(root, "nonlinearity")) {
    detail::check_keys(*t, "nonlinearity", {"kind", "x", "values"});
    detail::read(*t, "kind", c.nonlinearity, "nonlinearity");
    detail::read(*t, "x", c.F_x, "nonlinearity");
    detail::read(*t, "values", c.F_values, "nonlinearity");
  }
  if (const auto* t = detail::section(root, "grid")) {
    detail::check_keys(*t, "grid", {"t_min", "t_max", "t_points", "rate_t_half", "rate_t_points", "x_points"});
    detail::read(*t, "t_min", c.t_min, "grid");
    detail::read(*t, "t_max", c.t_max, "grid");
    detail::read(*t, "t_points", c.t_points, "grid");
    detail::read(*t, "rate_t_half", c.rate_t_half, "grid");
    detail::read(*t, "rate_t_points", c.rate_t_points, "grid");
    detail::read(*t, "x_points", c.x_points, "grid");
  }
  if (const auto* t = detail::section(root, "enumerate")) {
    detail::check_keys(*t, "enumerate", {"n", "mode", "observable", "cylinder", "spins"});
    detail::read(*t, "n", c.n_list, "enumerate");
    detail::read(*t, "mode", c.mode, "enumerate");
    detail::read(*t, "observable", c.observable, "enumerate");
    detail::read(*t, "cylinder", c.cylinder, "enumerate");
    detail::read(*t, "spins", c.spins, "enumerate");
  }
  if (const auto* t = detail::section(root, "mixture")) {
    detail::check_keys(*t, "mixture", {"depth"});
    detail::read(*t, "depth", c.mixture_depth, "mixture");
  }
  if (const auto* t = detail::section(root, "output")) {
    detail::check_keys(*t, "output", {"path"});
    std::string p;
    detail::read(*t, "path", p, "output");
    if (!p.empty()) c.output = p;
  }
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("file not found: " + path.string());
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text, path.string());
}

}  // namespace thermoform::cli
