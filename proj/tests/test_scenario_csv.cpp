// test_scenario_csv.cpp -- the text interfaces: scenario files in, CSV
// trajectories out.  The scenario grammar is strict, so most of this file
// checks that bad input is rejected with a usable file:line diagnostic; the
// CSV side is held to bit-exact round trips through the 17-digit format.

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "rsl/rsl.hpp"

using rsl::Vec;
using rsl::operator+;
using rsl::operator-;
using rsl::operator*;

namespace {

// A minimal valid scenario; the failure tests mutate one piece at a time.
// Line numbers are load-bearing: the diagnostics below cite them.
const char* const kTriangle =
    "[formation]\n"                                    // 1
    "m = 2\n"                                          // 2
    "n = 3\n"                                          // 3
    "edges = 2 1, 2 3, 3 1\n"                          // 4
    "positions = 0 0  1 0  0.5 0.8660254037844386\n"   // 5
    "[initial]\n"                                      // 6
    "p = 0.1 -0.2  1.2 0.1  0.4 0.9\n"                 // 7
    "v = 0 0  0 0  0 0\n"                              // 8
    "[controller]\n"                                   // 9
    "law = gradient\n"                                 // 10
    "[sim]\n"                                          // 11
    "h = 0.01\n"                                       // 12
    "t_end = 2\n";                                     // 13

// Parse and return the diagnostic; a clean parse returns a marker that no
// fragment below will match.
std::string parse_error(const std::string& text) {
  try {
    rsl::parse_scenario(text, "bad");
  } catch (const rsl::InvalidInput& err) {
    return err.what();
  }
  return "(no error)";
}

std::string replaced(std::string text, const std::string& from, const std::string& to) {
  const std::size_t at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

bool bits_equal(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

}  // namespace

TEST_CASE("malformed scenario text is rejected with file and line") {
  using Catch::Matchers::ContainsSubstring;

  // Structural failures in the line grammar.
  REQUIRE_THAT(parse_error("[formation\n"), ContainsSubstring("bad:1: unterminated section"));
  REQUIRE_THAT(parse_error("[warp]\n"), ContainsSubstring("bad:1: unknown section [warp]"));
  REQUIRE_THAT(parse_error("m = 2\n"),
               ContainsSubstring("bad:1: assignment before any [section]"));
  REQUIRE_THAT(parse_error("[sim]\nh 0.01\n"),
               ContainsSubstring("bad:2: expected 'key = value'"));
  REQUIRE_THAT(parse_error("[sim]\n= 3\n"), ContainsSubstring("bad:2: empty key"));
  REQUIRE_THAT(parse_error("[sim]\nh =\n"), ContainsSubstring("bad:2: empty value for 'h'"));
  REQUIRE_THAT(parse_error("[sim]\nh = 1\nh = 2\n"),
               ContainsSubstring("bad:3: duplicate key 'h' (first set on line 2)"));

  // Typed-value failures cite the key's own line.
  REQUIRE_THAT(parse_error(replaced(kTriangle, "m = 2", "m = 4")),
               ContainsSubstring("bad:2: 'm' must be 2 or 3"));
  REQUIRE_THAT(parse_error(replaced(kTriangle, "n = 3", "n = 2.5")),
               ContainsSubstring("bad:3: 'n' must be an integer"));
  REQUIRE_THAT(parse_error(replaced(kTriangle, "h = 0.01", "h = fast")),
               ContainsSubstring("bad:12: 'h' is not a number"));
  REQUIRE_THAT(parse_error(replaced(kTriangle, "h = 0.01", "h = -0.01")),
               ContainsSubstring("bad:12: 'h' must be positive"));
  REQUIRE_THAT(parse_error(replaced(kTriangle, "law = gradient", "law = warp")),
               ContainsSubstring("bad:10: 'law' is not a known control law"));

  // Edge lists: 1-based agents, 'tail head' pairs, within range, non-empty.
  REQUIRE_THAT(parse_error(replaced(kTriangle, "2 1, 2 3, 3 1", "0 1, 2 3, 3 1")),
               ContainsSubstring("bad:4: agents are numbered from 1"));
  REQUIRE_THAT(parse_error(replaced(kTriangle, "2 1, 2 3, 3 1", "2 1 7, 2 3, 3 1")),
               ContainsSubstring("edge entry '2 1 7' is not a 'tail head' pair"));
  REQUIRE_THAT(parse_error(replaced(kTriangle, "2 1, 2 3, 3 1", "2 1, 2 3, 3 4")),
               ContainsSubstring("bad:4: 'edges' references an agent beyond n"));
  REQUIRE_THAT(parse_error(replaced(kTriangle, "edges = 2 1, 2 3, 3 1", "edges = ,")),
               ContainsSubstring("'edges' lists no edges"));

  // The shape needs exactly one description, with the right element count.
  REQUIRE_THAT(parse_error(replaced(kTriangle, " 0.5 0.8660254037844386", " 0.5")),
               ContainsSubstring("'positions' must list n*m numbers"));
  REQUIRE_THAT(parse_error(replaced(kTriangle, "[initial]", "distances = 1 1 1\n[initial]")),
               ContainsSubstring("exactly one of 'positions' or 'distances'"));
  REQUIRE_THAT(
      parse_error(replaced(kTriangle, "positions = 0 0  1 0  0.5 0.8660254037844386\n", "")),
      ContainsSubstring("exactly one of 'positions' or 'distances'"));

  // So does the initial state.
  REQUIRE_THAT(parse_error(replaced(kTriangle, "[initial]", "[initial]\nbox = 5")),
               ContainsSubstring("exactly one of 'p', 'box', or 'jitter'"));
  REQUIRE_THAT(parse_error(replaced(kTriangle, "p = 0.1 -0.2  1.2 0.1  0.4 0.9\n",
                                    "box = 5\nspeed = -1\n")),
               ContainsSubstring("'speed' must be non-negative"));

  // Keys that no reader consumed are flagged, not silently dropped: with a
  // random start the explicit 'v' on line 9 has no meaning.
  REQUIRE_THAT(parse_error(replaced(kTriangle, "p = 0.1 -0.2  1.2 0.1  0.4 0.9\n",
                                    "box = 5\nspeed = 1\n")),
               ContainsSubstring("bad:9: unknown key 'v' in [initial]"));
  REQUIRE_THAT(parse_error(replaced(kTriangle, "[sim]", "[sim]\nwarp = 9")),
               ContainsSubstring("unknown key 'warp' in [sim]"));

  // Required keys are named together with their section.
  REQUIRE_THAT(parse_error(replaced(kTriangle, "t_end = 2\n", "")),
               ContainsSubstring("missing required key 't_end' in [sim]"));

  // Controller parameters are range-checked at parse time.
  REQUIRE_THAT(parse_error(replaced(kTriangle, "law = gradient\n",
                                    "law = hamiltonian\nlambda = 1.25\n")),
               ContainsSubstring("'lambda' must lie in [0, 1]"));
  REQUIRE_THAT(parse_error(replaced(kTriangle, "law = gradient\n",
                                    "law = mismatched\nmu = 0.1 -0.2\n")),
               ContainsSubstring("'mu' must list one value per edge"));
  REQUIRE_THAT(parse_error(replaced(kTriangle, "law = gradient\n",
                                    "law = estimator2\nmu = 0.1 -0.2 0.3\nkappa = 0\n")),
               ContainsSubstring("'kappa' must be positive"));
  REQUIRE_THAT(parse_error(replaced(kTriangle, "law = gradient\n",
                                    "law = motion\nomega = 1 2 3\n")),
               ContainsSubstring("'omega' must list 1 (planar) or 3 (spatial) numbers"));
  REQUIRE_THAT(parse_error(replaced(kTriangle, "law = gradient\n",
                                    "law = motion\nv_c = 1 2 3\n")),
               ContainsSubstring("'v_c' must list m numbers"));
  REQUIRE_THAT(parse_error(replaced(kTriangle, "t_end = 2\n", "t_end = 2\nrecord_every = 0\n")),
               ContainsSubstring("'record_every' must be at least 1"));

  // Jittered starts perturb the desired positions, so they need them.
  REQUIRE_THAT(parse_error("[formation]\n"
                           "m = 2\n"
                           "n = 3\n"
                           "edges = 2 1, 2 3, 3 1\n"
                           "distances = 1 1 1\n"
                           "[initial]\n"
                           "jitter = 0.5\n"
                           "speed = 1\n"
                           "[controller]\n"
                           "law = gradient\n"
                           "[sim]\n"
                           "h = 0.01\n"
                           "t_end = 1\n"),
               ContainsSubstring("jittered starts need [formation] positions"));
}

TEST_CASE("a full scenario parses into the documented fields") {
  const std::string text =
      "# biased triangle with an online estimator\n"
      "[formation]\n"
      "m = 2\n"
      "n = 3\n"
      "edges = 2 1, 2 3, 3 1   # tail is the measuring agent\n"
      "positions = 0 0  1 0  0.5 0.8660254037844386\n"
      "\n"
      "[initial]\n"
      "jitter = 0.25\n"
      "speed = 0.5\n"
      "seed = 42\n"
      "\n"
      "[controller]\n"
      "law = estimator2\n"
      "mu = 0.1 -0.2 0.05\n"
      "kappa = 2.5\n"
      "\n"
      "[sim]\n"
      "h = 0.005\n"
      "t_end = 30\n"
      "record_every = 20\n"
      "\n"
      "[output]\n"
      "dir = runs/triangle\n";
  const rsl::Scenario sc = rsl::parse_scenario(text, "tri_est");

  REQUIRE(sc.name == "tri_est");
  REQUIRE(sc.m == 2);
  REQUIRE(sc.n == 3);
  REQUIRE(sc.edges.size() == 3);
  REQUIRE(sc.edges[0].tail == 1);
  REQUIRE(sc.edges[0].head == 0);
  REQUIRE(sc.edges[2].tail == 2);
  REQUIRE(sc.edges[2].head == 0);
  REQUIRE(sc.positions.size() == 6);
  REQUIRE(sc.positions[4] == 0.5);
  REQUIRE(sc.distances.empty());
  REQUIRE(sc.init == rsl::Scenario::Init::jitter);
  REQUIRE(sc.jitter == 0.25);
  REQUIRE(sc.speed == 0.5);
  REQUIRE(sc.seed == 42);
  REQUIRE(sc.law == rsl::ControlLaw::estimator2);
  REQUIRE(sc.mu == Vec{0.1, -0.2, 0.05});
  REQUIRE(sc.kappa == 2.5);
  REQUIRE(sc.sim.h == 0.005);
  REQUIRE(sc.sim.t_end == 30.0);
  REQUIRE(sc.sim.record_every == 20);
  REQUIRE(sc.out_dir == "runs/triangle");

  // Files take their scenario name from the basename, extension stripped.
  const std::string path = "/tmp/rsl_scenario_roundtrip.ini";
  {
    std::ofstream out(path);
    out << text;
  }
  const rsl::Scenario from_file = rsl::parse_scenario_file(path);
  REQUIRE(from_file.name == "rsl_scenario_roundtrip");
  REQUIRE(from_file.seed == 42);
  REQUIRE_THROWS_AS(rsl::parse_scenario_file("/tmp/rsl_no_such_scenario.ini"),
                    rsl::InvalidInput);
}

TEST_CASE("problems materialize controllers, estimates, and output dirs") {
  const rsl::Scenario sc = rsl::parse_scenario(kTriangle, "tri");
  const rsl::Problem pr = rsl::build_problem(sc);
  REQUIRE(pr.g.n() == 3);
  REQUIRE(pr.g.edge_count() == 3);
  REQUIRE(pr.shape.m == 2);
  REQUIRE(pr.shape.has_zstar());
  REQUIRE(pr.p0 == sc.p0);
  REQUIRE(pr.v0 == sc.v0);
  REQUIRE(pr.ctl.law == rsl::ControlLaw::gradient);
  REQUIRE(pr.mu_hat0.empty());        // nothing estimated
  REQUIRE(pr.out_dir == "tri_out");   // default: name + suffix

  // Estimating laws start their estimates at zero, one per edge.
  const rsl::Scenario est = rsl::parse_scenario(
      replaced(kTriangle, "law = gradient\n", "law = estimator1\nmu = 0.1 -0.2 0.3\n"), "tri");
  const rsl::Problem pre = rsl::build_problem(est);
  REQUIRE(pre.mu_hat0 == Vec(3, 0.0));
  REQUIRE(pre.ctl.mu == Vec{0.1, -0.2, 0.3});

  // Laws that consume biases refuse to run without them.
  const rsl::Scenario nomu =
      rsl::parse_scenario(replaced(kTriangle, "law = gradient", "law = mismatched"), "tri");
  REQUIRE_THROWS_AS(rsl::build_problem(nomu), rsl::InvalidInput);

  // The materialized problem feeds simulate() directly, and the gradient flow
  // shrinks the distance errors from this start.
  const rsl::Trajectory traj =
      rsl::simulate(pr.g, pr.shape, pr.ctl, pr.p0, pr.v0, pr.sim, pr.mu_hat0);
  const Vec e0 = rsl::distance_errors(pr.g, pr.shape, traj.p.front());
  const Vec e1 = rsl::distance_errors(pr.g, pr.shape, traj.p.back());
  REQUIRE(rsl::norm(e1) < 0.1 * rsl::norm(e0));
}

TEST_CASE("motion scenarios assemble the same weights as direct design") {
  const std::string base =
      "[formation]\n"
      "m = 2\n"
      "n = 3\n"
      "edges = 2 1, 2 3, 3 1\n"
      "positions = 0 0  1 0  0.5 0.8660254037844386\n"
      "[initial]\n"
      "p = 0.1 -0.2  1.2 0.1  0.4 0.9\n"
      "v = 0 0  0 0  0 0\n"
      "[controller]\n"
      "law = motion\n"
      "c1 = 1.3\n"
      "c2 = 0.8\n"
      "MOTION_KEYS\n"
      "[sim]\n"
      "h = 0.01\n"
      "t_end = 2\n";
  const rsl::FormationGraph g = fix::triangle_graph();
  const Vec mu_v{0.25, 0.25, 0.25};

  // Pattern route: mu_v scaled by s_v, missing tilde pattern treated as zero.
  {
    const rsl::Problem pr = rsl::build_problem(rsl::parse_scenario(
        replaced(base, "MOTION_KEYS", "mu_v = 0.25 0.25 0.25\ns_v = 0.4"), "mo"));
    const rsl::MotionParams direct =
        rsl::assemble_motion(g, 0.4 * mu_v, Vec(3, 0.0), 1.3, 0.8);
    REQUIRE(pr.ctl.motion.c1 == 1.3);
    REQUIRE(pr.ctl.motion.c2 == 0.8);
    REQUIRE(pr.ctl.motion.a_v.data() == direct.a_v.data());
    REQUIRE(pr.ctl.motion.a_a.data() == direct.a_a.data());
    REQUIRE(pr.ctl.motion.a.data() == direct.a.data());
  }

  // Downscale divides the assembled biases.
  {
    const rsl::Problem pr = rsl::build_problem(rsl::parse_scenario(
        replaced(base, "MOTION_KEYS", "mu_v = 0.25 0.25 0.25\ns_v = 0.4\ndownscale = 2"),
        "mo"));
    const rsl::MotionParams direct =
        rsl::assemble_motion(g, 0.2 * mu_v, Vec(3, 0.0), 1.3, 0.8);
    REQUIRE(pr.ctl.motion.a.data() == direct.a.data());
  }

  // Target route: v_c and omega are fitted, then assembled.
  {
    const rsl::Problem pr = rsl::build_problem(rsl::parse_scenario(
        replaced(base, "MOTION_KEYS", "v_c = 1 -0.5\nomega = 0.3"), "mo"));
    const rsl::ShapeSpec shape =
        rsl::ShapeSpec::from_positions(g, 2, fix::triangle_positions());
    const rsl::MotionFit fit = rsl::fit_motion_params(g, shape, Vec{1.0, -0.5}, Vec{0.3});
    const rsl::MotionParams direct = rsl::assemble_motion(g, fit.mu, fit.mu_tilde, 1.3, 0.8);
    REQUIRE(pr.ctl.motion.a.data() == direct.a.data());
  }

  // Motion design is anchored to a target shape, not bare distances.
  const std::string dist_only = replaced(
      replaced(base, "positions = 0 0  1 0  0.5 0.8660254037844386", "distances = 1 1 1"),
      "MOTION_KEYS", "mu_v = 0.25 0.25 0.25");
  REQUIRE_THROWS_AS(rsl::build_problem(rsl::parse_scenario(dist_only, "mo")),
                    rsl::InvalidInput);

  // And it needs either bias patterns or motion targets.
  REQUIRE_THROWS_AS(
      rsl::build_problem(rsl::parse_scenario(replaced(base, "MOTION_KEYS\n", ""), "mo")),
      rsl::InvalidInput);
}

TEST_CASE("random starts are reproducible, bounded, and overridable") {
  const std::string text =
      "[formation]\n"
      "m = 2\n"
      "n = 3\n"
      "edges = 2 1, 2 3, 3 1\n"
      "positions = 0 0  40 0  20 34.64101615137754\n"
      "[initial]\n"
      "INIT_KEYS\n"
      "[controller]\n"
      "law = gradient\n"
      "[sim]\n"
      "h = 0.01\n"
      "t_end = 1\n";

  // Box starts: same seed, same state; positions inside the box, velocities
  // inside the speed ball.
  const rsl::Scenario box = rsl::parse_scenario(
      replaced(text, "INIT_KEYS", "box = 40\nspeed = 2\nseed = 7"), "rand");
  const rsl::Problem b1 = rsl::build_problem(box);
  const rsl::Problem b2 = rsl::build_problem(box);
  REQUIRE(b1.p0 == b2.p0);
  REQUIRE(b1.v0 == b2.v0);
  for (double x : b1.p0) {
    REQUIRE(x >= 0.0);
    REQUIRE(x <= 40.0);
  }
  for (int i = 0; i < 3; ++i) REQUIRE(rsl::norm(rsl::segment(b1.v0, 2 * i, 2)) <= 2.0);

  // An explicit override equal to the file seed is a no-op; a different one
  // moves the draw.
  const std::uint64_t seven = 7, eleven = 11;
  REQUIRE(rsl::build_problem(box, &seven).p0 == b1.p0);
  const rsl::Problem b3 = rsl::build_problem(box, &eleven);
  REQUIRE(b3.p0 != b1.p0);
  REQUIRE(rsl::build_problem(box, &eleven).p0 == b3.p0);

  // Jittered starts stay inside the jitter ball around the desired points.
  const rsl::Scenario jit = rsl::parse_scenario(
      replaced(text, "INIT_KEYS", "jitter = 0.25\nspeed = 0.5\nseed = 42"), "rand");
  const rsl::Problem j1 = rsl::build_problem(jit);
  for (int i = 0; i < 3; ++i) {
    const Vec off =
        rsl::segment(j1.p0, 2 * i, 2) - rsl::segment(jit.positions, 2 * i, 2);
    REQUIRE(rsl::norm(off) <= 0.25);
    REQUIRE(rsl::norm(rsl::segment(j1.v0, 2 * i, 2)) <= 0.5);
  }

  // The whole pipeline is deterministic: parse, build, simulate, repeat.
  const rsl::Trajectory t1 =
      rsl::simulate(b1.g, b1.shape, b1.ctl, b1.p0, b1.v0, b1.sim, b1.mu_hat0);
  const rsl::Trajectory t2 =
      rsl::simulate(b2.g, b2.shape, b2.ctl, b2.p0, b2.v0, b2.sim, b2.mu_hat0);
  REQUIRE(t1.p.back() == t2.p.back());
  REQUIRE(t1.v.back() == t2.v.back());
}

TEST_CASE("seventeen digits reproduce every double bit for bit") {
  const double cases[] = {0.0,
                          -0.0,
                          1.0,
                          1.0 / 3.0,
                          0.1,
                          2.0 / 7.0,
                          3.141592653589793,
                          -123456.78901234567,
                          1e-300,
                          5e-324,                    // smallest denormal
                          2.2250738585072014e-308,   // smallest normal
                          1.7976931348623157e308,    // largest finite
                          -9.8765432109876543e-21,
                          70.0 * 70.0 - 4900.0 + 1e-13};
  for (const double x : cases) {
    const std::string s = rsl::format_full(x);
    const double back = std::strtod(s.c_str(), nullptr);
    INFO("value " << s);
    REQUIRE(bits_equal(back, x));
  }
}

TEST_CASE("csv io round trips byte for byte and rejects malformed input") {
  rsl::CsvTable table;
  table.columns = {"t", "x", "y"};
  table.rows.push_back(Vec{0.0, 1.0 / 3.0, -0.0});
  table.rows.push_back(Vec{0.1, 5e-324, 1.7976931348623157e308});
  table.rows.push_back(Vec{0.2, -9.8765432109876543e-21, 3.141592653589793});

  std::ostringstream first;
  rsl::write_csv(first, table);
  std::istringstream in(first.str());
  const rsl::CsvTable back = rsl::read_csv(in);
  REQUIRE(back.columns == table.columns);
  REQUIRE(back.rows.size() == table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      INFO("row " << i << " col " << j);
      REQUIRE(bits_equal(back.rows[i][j], table.rows[i][j]));
    }
  std::ostringstream second;
  rsl::write_csv(second, back);
  REQUIRE(first.str() == second.str());

  // Column lookup is by exact name.
  REQUIRE(rsl::csv_column(table, "y") == 2);
  REQUIRE_THROWS_AS(rsl::csv_column(table, "z"), rsl::InvalidInput);

  // Ragged writes and malformed reads are refused, with the line cited.
  rsl::CsvTable ragged = table;
  ragged.rows.push_back(Vec{1.0});
  std::ostringstream sink;
  REQUIRE_THROWS_AS(rsl::write_csv(sink, ragged), rsl::InvalidInput);

  std::istringstream empty("");
  REQUIRE_THROWS_AS(rsl::read_csv(empty), rsl::InvalidInput);
  std::istringstream bad_num("a,b\n1,fast\n");
  REQUIRE_THROWS_MATCHES(rsl::read_csv(bad_num), rsl::InvalidInput,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("line 2: bad number 'fast'")));
  std::istringstream short_row("a,b\n1,2\n3\n");
  REQUIRE_THROWS_MATCHES(rsl::read_csv(short_row), rsl::InvalidInput,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("line 3: wrong column count")));

  // Blank lines between records are tolerated.
  std::istringstream gappy("a,b\n1,2\n\n3,4\n");
  REQUIRE(rsl::read_csv(gappy).rows.size() == 2);
}

TEST_CASE("trajectory tables follow the fixed column schema") {
  const rsl::FormationGraph g = fix::triangle_graph();
  const rsl::ShapeSpec shape = rsl::ShapeSpec::from_positions(g, 2, fix::triangle_positions());
  rsl::Controller ctl;
  ctl.law = rsl::ControlLaw::estimator1;
  ctl.mu = Vec{0.1, -0.2, 0.3};
  Vec p0 = fix::triangle_positions();
  p0[0] += 0.1;
  p0[3] -= 0.2;
  rsl::SimConfig cfg;
  cfg.h = 0.01;
  cfg.t_end = 0.5;
  cfg.record_every = 10;
  const rsl::Trajectory traj =
      rsl::simulate(g, shape, ctl, p0, Vec(6, 0.0), cfg, Vec(3, 0.0));
  REQUIRE(traj.samples() == 6);

  const rsl::CsvTable table = rsl::trajectory_table(g, shape, traj);
  const std::vector<std::string> expected = {
      "t",         "p[1].x",    "p[1].y",    "p[2].x",    "p[2].y",   "p[3].x",
      "p[3].y",    "v[1].x",    "v[1].y",    "v[2].x",    "v[2].y",   "v[3].x",
      "v[3].y",    "e[1]",      "e[2]",      "e[3]",      "mu_hat[1]", "mu_hat[2]",
      "mu_hat[3]", "s[1]",      "s[2]",      "s[3]"};
  REQUIRE(table.columns == expected);
  REQUIRE(table.rows.size() == traj.samples());

  // Spot-check a middle row: time and positions are copied through, the error
  // and speed columns are recomputed from the state.
  const std::size_t j = 3;
  const Vec& row = table.rows[j];
  REQUIRE(row[0] == traj.t[j]);
  for (int c = 0; c < 6; ++c) REQUIRE(row[1 + c] == traj.p[j][c]);
  const Vec e = rsl::distance_errors(g, shape, traj.p[j]);
  for (int k = 0; k < 3; ++k) REQUIRE(row[13 + k] == e[k]);
  for (int k = 0; k < 3; ++k) REQUIRE(row[16 + k] == traj.mu_hat[j][k]);
  for (int i = 0; i < 3; ++i)
    REQUIRE(row[19 + i] == rsl::norm(rsl::segment(traj.v[j], 2 * i, 2)));

  // Laws without estimates drop the mu_hat block.
  rsl::Controller grad;
  grad.law = rsl::ControlLaw::gradient;
  const rsl::Trajectory plain = rsl::simulate(g, shape, grad, p0, Vec(6, 0.0), cfg);
  const rsl::CsvTable slim = rsl::trajectory_table(g, shape, plain);
  REQUIRE(slim.columns.size() == 19);
  for (const std::string& c : slim.columns) REQUIRE(c.find("mu_hat") == std::string::npos);

  // Spatial runs get a .z axis label.
  const rsl::FormationGraph pair(2, {rsl::Edge{1, 0}});
  const rsl::ShapeSpec line = rsl::ShapeSpec::from_positions(pair, 3, Vec{0, 0, 0, 1, 0, 0});
  rsl::Trajectory tiny;
  tiny.m = 3;
  tiny.n = 2;
  tiny.edge_count = 1;
  tiny.t = Vec{0.0};
  tiny.p.push_back(Vec{0, 0, 0, 1.1, 0, 0});
  tiny.v.push_back(Vec(6, 0.0));
  const rsl::CsvTable spatial = rsl::trajectory_table(pair, line, tiny);
  const std::vector<std::string> expected3 = {"t",      "p[1].x", "p[1].y", "p[1].z", "p[2].x",
                                              "p[2].y", "p[2].z", "v[1].x", "v[1].y", "v[1].z",
                                              "v[2].x", "v[2].y", "v[2].z", "e[1]",   "s[1]",
                                              "s[2]"};
  REQUIRE(spatial.columns == expected3);
  REQUIRE(spatial.rows[0][13] == 1.1 * 1.1 - 1.0);
}
