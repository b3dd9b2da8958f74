#include "d2dsec/config_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace d2dsec {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + key + ": '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad integer for " + key + ": '" + v + "'");
  }
}

Point2 to_point(const std::string& key, const std::string& v) {
  const auto parts = split_list(v);
  if (parts.size() != 2) throw ConfigError(key + " expects x,y");
  return {to_double(key, parts[0]), to_double(key, parts[1])};
}

}  // namespace

ExperimentSpec parse_config(std::istream& in) {
  ExperimentSpec spec;
  SystemConfig& c = spec.base;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"M", [&](auto& k, auto& v) { c.M = static_cast<int>(to_int(k, v)); }},
      {"K_L", [&](auto& k, auto& v) { c.K_L = static_cast<int>(to_int(k, v)); }},
      {"K_E", [&](auto& k, auto& v) { c.K_E = static_cast<int>(to_int(k, v)); }},
      {"N", [&](auto& k, auto& v) { c.N = static_cast<int>(to_int(k, v)); }},
      {"P_B", [&](auto& k, auto& v) { c.P_B = to_double(k, v); }},
      {"P_B_dB", [&](auto& k, auto& v) { c.P_B = db_to_linear(to_double(k, v)); }},
      {"P_U", [&](auto& k, auto& v) { c.P_U = to_double(k, v); }},
      {"P_U_dB", [&](auto& k, auto& v) { c.P_U = db_to_linear(to_double(k, v)); }},
      {"sigma2", [&](auto& k, auto& v) { c.sigma2 = to_double(k, v); }},
      {"sigma2_dB", [&](auto& k, auto& v) { c.sigma2 = db_to_linear(to_double(k, v)); }},
      {"c0", [&](auto& k, auto& v) { c.c0 = to_double(k, v); }},
      {"c0_dB", [&](auto& k, auto& v) { c.c0 = db_to_linear(to_double(k, v)); }},
      {"beta", [&](auto& k, auto& v) { c.beta = to_double(k, v); }},
      {"d0", [&](auto& k, auto& v) { c.d0 = to_double(k, v); }},
      {"eta", [&](auto& k, auto& v) { c.eta = to_double(k, v); }},
      {"area_side", [&](auto& k, auto& v) { c.area_side = to_double(k, v); }},
      {"legit_center", [&](auto& k, auto& v) { c.legit_center = to_point(k, v); }},
      {"eve_center", [&](auto& k, auto& v) { c.eve_center = to_point(k, v); }},
      {"min_distance", [&](auto& k, auto& v) { c.min_distance = to_double(k, v); }},
      {"delta", [&](auto& k, auto& v) { c.delta = to_double(k, v); }},
      {"t_max", [&](auto& k, auto& v) { c.t_max = static_cast<int>(to_int(k, v)); }},
      {"seed", [&](auto& k, auto& v) {
         c.seed = static_cast<std::uint64_t>(to_int(k, v));
         spec.seed0 = c.seed;
       }},
      {"seed0", [&](auto& k, auto& v) { spec.seed0 = static_cast<std::uint64_t>(to_int(k, v)); }},
      {"n_trials", [&](auto& k, auto& v) { spec.n_trials = static_cast<int>(to_int(k, v)); }},
      {"output", [&](auto&, auto& v) { spec.output_path = v; }},
      {"beta_grid", [&](auto& k, auto& v) {
         spec.beta_grid.clear();
         for (const auto& s : split_list(v)) spec.beta_grid.push_back(to_double(k, s));
       }},
      {"schemes", [&](auto&, auto& v) {
         spec.schemes.clear();
         for (const auto& s : split_list(v)) spec.schemes.push_back(parse_scheme(s));
       }},
  };

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end())
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    it->second(key, value);
  }
  validate(spec);
  return spec;
}

ExperimentSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  return parse_config(in);
}

void validate(const ExperimentSpec& spec) {
  validate(spec.base);
  if (spec.n_trials < 1) throw ConfigError("n_trials must be at least 1");
  if (spec.beta_grid.empty()) throw ConfigError("beta_grid must not be empty");
  if (!std::is_sorted(spec.beta_grid.begin(), spec.beta_grid.end()))
    throw ConfigError("beta_grid must be sorted");
  for (double b : spec.beta_grid)
    if (!(b >= 0.0)) throw ConfigError("beta_grid entries must be non-negative");
  if (spec.schemes.empty()) throw ConfigError("schemes must not be empty");
}

}  // namespace d2dsec
