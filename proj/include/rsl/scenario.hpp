#pragma once
// scenario.hpp -- text scenario files and their materialization into a
// ready-to-run problem.
//
// Grammar (strict; anything else is rejected with file:line diagnostics):
//   * '#' starts a comment, anywhere on a line;
//   * '[section]' opens one of: formation, initial, controller, sim, output;
//   * 'key = value' assigns inside the current section; keys are unique;
//   * vectors are whitespace-separated numbers;
//   * edges are 'tail head' pairs separated by commas, agents numbered
//     from 1; the tail of an edge is its measuring/estimating agent.
//
// Sections:
//   [formation]   m, n, edges, and positions (agent-major desired positions)
//                 or distances (one per edge)
//   [initial]     p and v (explicit stacked states), or box + speed + seed
//                 (uniform positions in [0,box]^m, velocities in a speed
//                 ball), or jitter + speed + seed (positions inside a jitter
//                 ball around the desired ones)
//   [controller]  law = gradient | hamiltonian | mismatched | estimator1 |
//                 estimator2 | motion, plus law parameters: lambda; mu;
//                 kappa; c1, c2 and either mu_v/mu_tilde_v/mu_omega/
//                 mu_tilde_omega with scales s_v/s_omega, or target v_c /
//                 omega to fit; downscale
//   [sim]         h, t_end, record_every
//   [output]      dir

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rsl/control.hpp"
#include "rsl/graph.hpp"
#include "rsl/mat.hpp"
#include "rsl/motion.hpp"
#include "rsl/rng.hpp"
#include "rsl/sim.hpp"

namespace rsl {

struct Scenario {
  std::string name;

  // [formation]
  int m = 0;
  int n = 0;
  std::vector<Edge> edges;
  Vec positions;  // empty when the shape is given by distances only
  Vec distances;  // empty when positions are given

  // [initial]
  enum class Init { explicit_state, random_box, jitter };
  Init init = Init::explicit_state;
  Vec p0, v0;
  double box = 0.0;
  double speed = 0.0;
  double jitter = 0.0;
  std::uint64_t seed = 0;

  // [controller]
  ControlLaw law = ControlLaw::gradient;
  double lambda = 0.0;
  double kappa = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double s_v = 1.0;
  double s_omega = 1.0;
  double downscale = 1.0;
  Vec mu, mu_v, mu_tilde_v, mu_omega, mu_tilde_omega, v_c, omega;

  // [sim]
  SimConfig sim;

  // [output]
  std::string out_dir;
};

namespace detail {

struct IniEntry {
  std::string value;
  int line = 0;
  bool used = false;
};

using IniSection = std::map<std::string, IniEntry>;

struct IniDoc {
  std::string name;
  std::map<std::string, IniSection> sections;

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw InvalidInput(name + ":" + std::to_string(line) + ": " + msg);
  }
};

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline IniDoc parse_ini(const std::string& text, const std::string& name) {
  static const char* const known_sections[] = {"formation", "initial", "controller", "sim",
                                               "output"};
  IniDoc doc;
  doc.name = name;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') doc.fail(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      bool known = false;
      for (const char* k : known_sections) known = known || section == k;
      if (!known) doc.fail(line, "unknown section [" + section + "]");
      doc.sections[section];  // register even if empty
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) doc.fail(line, "expected 'key = value'");
    if (section.empty()) doc.fail(line, "assignment before any [section]");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) doc.fail(line, "empty key");
    if (value.empty()) doc.fail(line, "empty value for '" + key + "'");
    auto [it, fresh] = doc.sections[section].emplace(key, IniEntry{value, line});
    if (!fresh)
      doc.fail(line, "duplicate key '" + key + "' (first set on line " +
                         std::to_string(it->second.line) + ")");
  }
  return doc;
}

class IniReader {
 public:
  explicit IniReader(IniDoc doc) : doc_(std::move(doc)) {}

  bool has(const std::string& sec, const std::string& key) {
    auto s = doc_.sections.find(sec);
    return s != doc_.sections.end() && s->second.count(key) > 0;
  }

  IniEntry& entry(const std::string& sec, const std::string& key) {
    IniEntry& e = doc_.sections.at(sec).at(key);
    e.used = true;
    return e;
  }

  std::string str(const std::string& sec, const std::string& key) {
    return entry(sec, key).value;
  }

  double number(const std::string& sec, const std::string& key) {
    const IniEntry& e = entry(sec, key);
    char* end = nullptr;
    const double x = std::strtod(e.value.c_str(), &end);
    if (end == e.value.c_str() || *end != '\0')
      doc_.fail(e.line, "'" + key + "' is not a number: '" + e.value + "'");
    return x;
  }

  int integer(const std::string& sec, const std::string& key) {
    const IniEntry& e = entry(sec, key);
    const double x = number(sec, key);
    if (x != static_cast<double>(static_cast<long long>(x)))
      doc_.fail(e.line, "'" + key + "' must be an integer");
    return static_cast<int>(x);
  }

  std::uint64_t unsigned64(const std::string& sec, const std::string& key) {
    const IniEntry& e = entry(sec, key);
    char* end = nullptr;
    const unsigned long long x = std::strtoull(e.value.c_str(), &end, 10);
    if (end == e.value.c_str() || *end != '\0')
      doc_.fail(e.line, "'" + key + "' is not an unsigned integer");
    return x;
  }

  Vec vector(const std::string& sec, const std::string& key) {
    const IniEntry& e = entry(sec, key);
    std::istringstream in(e.value);
    Vec out;
    std::string tok;
    while (in >> tok) {
      char* end = nullptr;
      const double x = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0')
        doc_.fail(e.line, "'" + key + "' has a non-numeric entry: '" + tok + "'");
      out.push_back(x);
    }
    return out;
  }

  std::vector<Edge> edge_list(const std::string& sec, const std::string& key) {
    const IniEntry& e = entry(sec, key);
    std::vector<Edge> out;
    std::istringstream pairs(e.value);
    std::string pair;
    while (std::getline(pairs, pair, ',')) {
      const std::string t = trim(pair);
      if (t.empty()) continue;  // tolerate a trailing comma
      std::istringstream two(t);
      long long a = 0, b = 0;
      char extra;
      if (!(two >> a >> b) || (two >> extra))
        doc_.fail(e.line, "edge entry '" + t + "' is not a 'tail head' pair");
      if (a < 1 || b < 1) doc_.fail(e.line, "agents are numbered from 1");
      out.push_back(Edge{static_cast<int>(a - 1), static_cast<int>(b - 1)});
    }
    if (out.empty()) doc_.fail(e.line, "'" + key + "' lists no edges");
    return out;
  }

  [[noreturn]] void fail_key(const std::string& sec, const std::string& key,
                             const std::string& msg) {
    doc_.fail(entry(sec, key).line, "'" + key + "' " + msg);
  }

  void require(const std::string& sec, const std::string& key) {
    if (!has(sec, key))
      throw InvalidInput(doc_.name + ": missing required key '" + key + "' in [" + sec + "]");
  }

  // Every key must have been consumed by the typed getters above.
  void finish() const {
    for (const auto& [sec, entries] : doc_.sections)
      for (const auto& [key, e] : entries)
        if (!e.used) doc_.fail(e.line, "unknown key '" + key + "' in [" + sec + "]");
  }

 private:
  IniDoc doc_;
};

}  // namespace detail

inline Scenario parse_scenario(const std::string& text, const std::string& name) {
  detail::IniReader ini(detail::parse_ini(text, name));
  Scenario sc;
  sc.name = name;

  ini.require("formation", "m");
  ini.require("formation", "n");
  ini.require("formation", "edges");
  sc.m = ini.integer("formation", "m");
  sc.n = ini.integer("formation", "n");
  if (sc.m != 2 && sc.m != 3) ini.fail_key("formation", "m", "must be 2 or 3");
  if (sc.n < 2) ini.fail_key("formation", "n", "must be at least 2");
  sc.edges = ini.edge_list("formation", "edges");
  for (const Edge& e : sc.edges)
    if (e.tail >= sc.n || e.head >= sc.n)
      ini.fail_key("formation", "edges", "references an agent beyond n");
  const bool has_pos = ini.has("formation", "positions");
  const bool has_dist = ini.has("formation", "distances");
  if (has_pos == has_dist)
    throw InvalidInput(name + ": [formation] needs exactly one of 'positions' or 'distances'");
  if (has_pos) {
    sc.positions = ini.vector("formation", "positions");
    if (static_cast<int>(sc.positions.size()) != sc.n * sc.m)
      ini.fail_key("formation", "positions", "must list n*m numbers");
  } else {
    sc.distances = ini.vector("formation", "distances");
    if (sc.distances.size() != sc.edges.size())
      ini.fail_key("formation", "distances", "must list one distance per edge");
  }

  const bool has_p = ini.has("initial", "p");
  const bool has_box = ini.has("initial", "box");
  const bool has_jit = ini.has("initial", "jitter");
  if (static_cast<int>(has_p) + static_cast<int>(has_box) + static_cast<int>(has_jit) != 1)
    throw InvalidInput(name + ": [initial] needs exactly one of 'p', 'box', or 'jitter'");
  if (has_p) {
    sc.init = Scenario::Init::explicit_state;
    ini.require("initial", "v");
    sc.p0 = ini.vector("initial", "p");
    sc.v0 = ini.vector("initial", "v");
    if (static_cast<int>(sc.p0.size()) != sc.n * sc.m)
      ini.fail_key("initial", "p", "must list n*m numbers");
    if (sc.v0.size() != sc.p0.size()) ini.fail_key("initial", "v", "must list n*m numbers");
  } else {
    sc.init = has_box ? Scenario::Init::random_box : Scenario::Init::jitter;
    ini.require("initial", "speed");
    sc.speed = ini.number("initial", "speed");
    if (sc.speed < 0.0) ini.fail_key("initial", "speed", "must be non-negative");
    if (has_box) {
      sc.box = ini.number("initial", "box");
      if (!(sc.box > 0.0)) ini.fail_key("initial", "box", "must be positive");
    } else {
      sc.jitter = ini.number("initial", "jitter");
      if (sc.jitter < 0.0) ini.fail_key("initial", "jitter", "must be non-negative");
      if (!has_pos)
        throw InvalidInput(name + ": jittered starts need [formation] positions");
    }
    if (ini.has("initial", "seed")) sc.seed = ini.unsigned64("initial", "seed");
  }

  ini.require("controller", "law");
  const std::string law = ini.str("controller", "law");
  if (law == "gradient") sc.law = ControlLaw::gradient;
  else if (law == "hamiltonian") sc.law = ControlLaw::hamiltonian;
  else if (law == "mismatched") sc.law = ControlLaw::mismatched;
  else if (law == "estimator1") sc.law = ControlLaw::estimator1;
  else if (law == "estimator2") sc.law = ControlLaw::estimator2;
  else if (law == "motion") sc.law = ControlLaw::motion;
  else ini.fail_key("controller", "law", "is not a known control law");

  const auto edge_vec = [&](const char* key) {
    Vec v = ini.vector("controller", key);
    if (v.size() != sc.edges.size())
      ini.fail_key("controller", key, "must list one value per edge");
    return v;
  };
  if (ini.has("controller", "lambda")) {
    sc.lambda = ini.number("controller", "lambda");
    if (sc.lambda < 0.0 || sc.lambda > 1.0)
      ini.fail_key("controller", "lambda", "must lie in [0, 1]");
  }
  if (ini.has("controller", "mu")) sc.mu = edge_vec("mu");
  if (ini.has("controller", "kappa")) {
    sc.kappa = ini.number("controller", "kappa");
    if (!(sc.kappa > 0.0)) ini.fail_key("controller", "kappa", "must be positive");
  }
  if (ini.has("controller", "c1")) sc.c1 = ini.number("controller", "c1");
  if (ini.has("controller", "c2")) sc.c2 = ini.number("controller", "c2");
  if (ini.has("controller", "s_v")) sc.s_v = ini.number("controller", "s_v");
  if (ini.has("controller", "s_omega")) sc.s_omega = ini.number("controller", "s_omega");
  if (ini.has("controller", "downscale")) {
    sc.downscale = ini.number("controller", "downscale");
    if (!(sc.downscale > 0.0)) ini.fail_key("controller", "downscale", "must be positive");
  }
  if (ini.has("controller", "mu_v")) sc.mu_v = edge_vec("mu_v");
  if (ini.has("controller", "mu_tilde_v")) sc.mu_tilde_v = edge_vec("mu_tilde_v");
  if (ini.has("controller", "mu_omega")) sc.mu_omega = edge_vec("mu_omega");
  if (ini.has("controller", "mu_tilde_omega")) sc.mu_tilde_omega = edge_vec("mu_tilde_omega");
  if (ini.has("controller", "v_c")) {
    sc.v_c = ini.vector("controller", "v_c");
    if (static_cast<int>(sc.v_c.size()) != sc.m)
      ini.fail_key("controller", "v_c", "must list m numbers");
  }
  if (ini.has("controller", "omega")) {
    sc.omega = ini.vector("controller", "omega");
    if (static_cast<int>(sc.omega.size()) != (sc.m == 2 ? 1 : 3))
      ini.fail_key("controller", "omega", "must list 1 (planar) or 3 (spatial) numbers");
  }

  ini.require("sim", "h");
  ini.require("sim", "t_end");
  sc.sim.h = ini.number("sim", "h");
  sc.sim.t_end = ini.number("sim", "t_end");
  if (!(sc.sim.h > 0.0)) ini.fail_key("sim", "h", "must be positive");
  if (!(sc.sim.t_end > 0.0)) ini.fail_key("sim", "t_end", "must be positive");
  if (ini.has("sim", "record_every")) {
    sc.sim.record_every = ini.integer("sim", "record_every");
    if (sc.sim.record_every < 1) ini.fail_key("sim", "record_every", "must be at least 1");
  }

  if (ini.has("output", "dir")) sc.out_dir = ini.str("output", "dir");

  ini.finish();
  return sc;
}

inline Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string name = path;
  const std::size_t slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  const std::size_t dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return parse_scenario(buf.str(), name);
}

// A scenario resolved into concrete objects, ready to hand to simulate().
struct Problem {
  FormationGraph g;
  ShapeSpec shape;
  Controller ctl;
  Vec p0, v0, mu_hat0;
  SimConfig sim;
  std::string out_dir;
};

namespace detail {

// Uniform draw from the closed ball of the given radius, by rejection.
inline Vec ball_point(SplitMix64& rng, int m, double radius) {
  while (true) {
    Vec x(m);
    double r2 = 0.0;
    for (int d = 0; d < m; ++d) {
      x[d] = rng.uniform(-1.0, 1.0);
      r2 += x[d] * x[d];
    }
    if (r2 <= 1.0) return radius * x;
  }
}

}  // namespace detail

inline Problem build_problem(const Scenario& sc, const std::uint64_t* seed_override = nullptr) {
  FormationGraph g(sc.n, sc.edges);
  ShapeSpec shape = sc.positions.empty() ? ShapeSpec::from_distances(g, sc.m, sc.distances)
                                         : ShapeSpec::from_positions(g, sc.m, sc.positions);

  Controller ctl;
  ctl.law = sc.law;
  ctl.lambda = sc.lambda;
  ctl.kappa = sc.kappa;
  const auto need_mu = [&]() {
    if (sc.mu.empty())
      throw InvalidInput(sc.name + ": the '" + std::string("mu") + "' biases are required");
    ctl.mu = sc.mu;
  };
  switch (sc.law) {
    case ControlLaw::gradient:
    case ControlLaw::hamiltonian:
      break;
    case ControlLaw::mismatched:
    case ControlLaw::estimator1:
    case ControlLaw::estimator2:
      need_mu();
      break;
    case ControlLaw::motion: {
      if (!shape.has_zstar())
        throw InvalidInput(sc.name + ": motion design needs [formation] positions");
      Vec mu, mu_tilde;
      if (!sc.v_c.empty() || !sc.omega.empty()) {
        Vec v_c = sc.v_c.empty() ? Vec(sc.m, 0.0) : sc.v_c;
        Vec omega = sc.omega.empty() ? Vec(sc.m == 2 ? 1 : 3, 0.0) : sc.omega;
        const MotionFit fit = fit_motion_params(g, shape, v_c, omega);
        mu = fit.mu;
        mu_tilde = fit.mu_tilde;
      } else {
        if (sc.mu_v.empty() && sc.mu_omega.empty())
          throw InvalidInput(sc.name +
                             ": motion law needs bias patterns (mu_v/mu_omega) or targets (v_c/omega)");
        mu.assign(sc.edges.size(), 0.0);
        mu_tilde.assign(sc.edges.size(), 0.0);
        if (!sc.mu_v.empty()) axpy(sc.s_v, sc.mu_v, mu);
        if (!sc.mu_omega.empty()) axpy(sc.s_omega, sc.mu_omega, mu);
        if (!sc.mu_tilde_v.empty()) axpy(sc.s_v, sc.mu_tilde_v, mu_tilde);
        if (!sc.mu_tilde_omega.empty()) axpy(sc.s_omega, sc.mu_tilde_omega, mu_tilde);
      }
      if (sc.downscale != 1.0) {
        mu = (1.0 / sc.downscale) * mu;
        mu_tilde = (1.0 / sc.downscale) * mu_tilde;
      }
      ctl.motion = assemble_motion(g, mu, mu_tilde, sc.c1, sc.c2);
      break;
    }
  }

  Vec p0 = sc.p0, v0 = sc.v0;
  if (sc.init != Scenario::Init::explicit_state) {
    const std::uint64_t seed = seed_override ? *seed_override : sc.seed;
    SplitMix64 rng(seed);
    p0.assign(static_cast<std::size_t>(sc.n) * sc.m, 0.0);
    v0.assign(p0.size(), 0.0);
    for (int i = 0; i < sc.n; ++i) {
      if (sc.init == Scenario::Init::random_box) {
        for (int d = 0; d < sc.m; ++d)
          p0[static_cast<std::size_t>(i) * sc.m + d] = rng.uniform(0.0, sc.box);
      } else {
        const Vec off = detail::ball_point(rng, sc.m, sc.jitter);
        for (int d = 0; d < sc.m; ++d)
          p0[static_cast<std::size_t>(i) * sc.m + d] =
              sc.positions[static_cast<std::size_t>(i) * sc.m + d] + off[d];
      }
      const Vec vel = detail::ball_point(rng, sc.m, sc.speed);
      for (int d = 0; d < sc.m; ++d) v0[static_cast<std::size_t>(i) * sc.m + d] = vel[d];
    }
  }

  Problem pr{std::move(g), std::move(shape), std::move(ctl), std::move(p0), std::move(v0),
             Vec{},        sc.sim,           sc.out_dir};
  if (pr.ctl.tracks_estimate()) pr.mu_hat0.assign(sc.edges.size(), 0.0);
  if (pr.out_dir.empty()) pr.out_dir = sc.name + "_out";
  return pr;
}

}  // namespace rsl
