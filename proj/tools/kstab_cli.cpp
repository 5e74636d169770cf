// Command-line front end: kstab_cli <command> [flags]
#include "kstab/kstab.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace kstab;

enum Exit { ok = 0, validation = 2, budget = 3, parse = 4 };

struct Flags {
  std::string command;
  std::string root_system;
  std::string in;
  std::string out;
  std::string grid;
  std::string progression;
  std::string selector = "outer";
  long long budget = default_point_budget;
  bool smooth = false;
  std::string delta;
  std::string epsilon;
  std::string slope;
  std::string scale = "1";
  std::string family;
  int n = 10;
  std::string s = "10";
  std::string point;
  std::string step = "1/8";
  std::string weight = "top";
};

void emit(const Flags& fl, const std::string& text) {
  if (fl.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(fl.out);
  if (!f) throw ValidationError("cannot write '" + fl.out + "'");
  f << text;
}

BoundarySelector parse_selector(const std::string& s) {
  if (s == "outer") return BoundarySelector::outer;
  if (s == "wall") return BoundarySelector::wall;
  if (s == "all") return BoundarySelector::all;
  throw ParseError("--selector must be outer, wall or all, got '" + s + "'");
}

Vec parse_vec(const std::string& text) {
  Vec v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(parse_rat(item));
  if (v.empty()) throw ParseError("empty coordinate list");
  return v;
}

std::vector<Rat> parse_list(const std::string& text) { return parse_vec(text); }

/// "s=5,10;n=10,20;epsilon=1/64,1/16;slope=1,4". Missing keys keep the defaults.
ScanGrid parse_grid(const std::string& family, const std::string& text) {
  ScanGrid g = default_grid(family);
  if (text.empty()) return g;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    auto eq = part.find('=');
    if (eq == std::string::npos) throw ParseError("grid entry '" + part + "' needs key=values");
    std::string key = part.substr(0, eq);
    auto values = parse_list(part.substr(eq + 1));
    if (key == "s") {
      g.s = values;
    } else if (key == "n") {
      g.n.clear();
      for (const Rat& v : values) {
        if (denom(v) != 1) throw ParseError("grid n values must be integers");
        g.n.push_back(static_cast<int>(numer(v)));
      }
    } else if (key == "epsilon") {
      g.epsilon = values;
    } else if (key == "slope") {
      g.slope = values;
    } else {
      throw ParseError("unknown grid key '" + key + "'");
    }
  }
  return g;
}

Instance load(const Flags& fl) {
  if (fl.in.empty()) throw ParseError("--in is required for '" + fl.command + "'");
  ProblemFile p = read_problem(fl.in);
  std::optional<std::string> root;
  if (!fl.root_system.empty()) root = fl.root_system;
  return build_instance(p, root, parse_rat(fl.scale));
}

std::string vertex_list(const std::vector<Vec>& vs) {
  std::string s;
  for (const Vec& v : vs) s += " (" + to_string(v, ",") + ")";
  return s.empty() ? " none" : s;
}

int cmd_validate(const Flags& fl) {
  Instance in = load(fl);
  std::ostringstream o;
  auto inv = is_w_invariant(in.rs, in.polytope);
  auto wall = wall_vertex_check(in.rs, in.polytope);
  o << "root_system: " << in.rs.label << "\n";
  o << "vertices: " << in.polytope.vertices.size() << "\n";
  o << "chamber_vertices:" << vertex_list(in.chamber.vertices) << "\n";
  o << "w_invariant: " << (inv.invariant ? "ok" : "fail") << "\n";
  if (!inv.invariant)
    o << "  witness: (" << to_string(*inv.witness_vertex, ",") << ") under generator " << inv.witness_generator << "\n";
  o << "wall_vertex: " << (wall.ok ? "ok" : "fail") << "\n";
  if (!wall.ok) o << "  on walls:" << vertex_list(wall.witnesses) << "\n";
  if (in.polytope.is_lattice()) {
    auto dz = is_delzant(in.polytope);
    o << "delzant: " << (dz.delzant ? "ok" : "fail") << "\n";
    if (!dz.delzant) o << "  failing:" << vertex_list(dz.failing_vertices) << "\n";
  } else {
    o << "delzant: n/a (non-lattice vertices, lattice scale " << lattice_scale(in.polytope).str() << ")\n";
  }
  bool f_inv = is_w_invariant_pl(in.rs, in.f, in.polytope);
  o << "pl_function: " << in.f.to_string() << "\n";
  o << "pl_w_invariant: " << (f_inv ? "ok" : "fail") << "\n";
  auto cx = subdivision_from_pl(in.chamber, in.f);
  auto cv = validate_complex(cx.cells);
  o << "subdivision_cells: " << cx.cells.size() << "\n";
  o << "subdivision: " << (cv.valid ? "ok" : "fail: " + cv.message) << "\n";
  bool good = inv.invariant && wall.ok && f_inv && cv.valid;
  o << (good ? "OK" : "INVALID") << "\n";
  emit(fl, o.str());
  return good ? ok : validation;
}

int cmd_hilbert(const Flags& fl) {
  Instance in = load(fl);
  Progression prog = fl.progression.empty() ? default_progression(in.rs, in.chamber, std::nullopt)
                                            : parse_progression(fl.progression);
  auto series = fit_series(in.rs, in.chamber, std::nullopt, prog, 2, fl.budget);
  ChamberData c = chamber_data(in.rs, in.chamber, parse_selector(fl.selector));
  int n = in.rs.n;
  Rat second = c.boundary_top / 2 + c.volume_sub;
  std::ostringstream o;
  o << series.serialize();
  o << "hilbert:\n";
  o << "  leading: " << to_string(series.fitted_d.coeff(n)) << " exact " << to_string(c.volume_top) << "\n";
  o << "  second: " << to_string(series.fitted_d.coeff(n - 1)) << " exact " << to_string(second) << "\n";
  bool match = series.d_verified && series.fitted_d.coeff(n) == c.volume_top && series.fitted_d.coeff(n - 1) == second;
  o << "  result: " << (match ? "match" : "mismatch") << "\n";
  emit(fl, o.str());
  return match ? ok : validation;
}

int cmd_futaki(const Flags& fl, bool mabuchi) {
  Instance in = load(fl);
  auto rep = csc_verdict(in.rs, in.polytope, in.f, in.roof, parse_selector(fl.selector));
  std::string text = rep.serialize();
  if (mabuchi)
    text = "mabuchi:\n  linear_part: " + to_string(rep.mabuchi_coeff) + " × (2π)^" + std::to_string(rep.rank) +
           "\n  sign: " + std::to_string(sign(rep.mabuchi_coeff)) + "\n" + text;
  emit(fl, text);
  return ok;
}

int cmd_oracle(const Flags& fl) {
  Instance in = load(fl);
  Roof roof{in.f, in.roof};
  Progression prog =
      fl.progression.empty() ? default_progression(in.rs, in.chamber, roof) : parse_progression(fl.progression);
  auto o = oracle_futaki(in.rs, in.chamber, in.f, in.roof, prog, fl.budget);
  Rat closed = futaki_minus_F1(chamber_data(in.rs, in.chamber, parse_selector(fl.selector)), in.f);
  std::ostringstream s;
  s << o.series.serialize();
  s << "oracle:\n";
  s << "  F0: " << to_string(o.F0) << "\n";
  s << "  F1: " << to_string(o.F1) << "\n";
  s << "  minus_F1_oracle: " << to_string(-o.F1) << "\n";
  s << "  minus_F1_closed_form: " << to_string(closed) << "\n";
  s << "  agreement: " << (-o.F1 == closed ? "exact" : "differs") << "\n";
  emit(fl, s.str());
  return ok;
}

MPoly parse_weight(const std::string& w, const RootSystemData& rs) {
  int r = rs.rank;
  if (w == "top") return rs.H_top;
  if (w == "one") return MPoly::constant(r, 1);
  Vec e = parse_vec(w);
  if (static_cast<int>(e.size()) != r) throw ParseError("--weight exponent list must have " + std::to_string(r) + " entries");
  Exponent ex(r, 0);
  for (int i = 0; i < r; ++i) {
    if (denom(e[i]) != 1 || e[i] < 0) throw ParseError("--weight exponents must be non-negative integers");
    ex[i] = static_cast<int>(numer(e[i]));
  }
  MPoly m(r);
  m.add_term(ex, 1);
  return m;
}

int cmd_lemma(const Flags& fl) {
  Instance in = load(fl);
  auto rep = lemma_check(in.polytope, parse_weight(fl.weight, in.rs), fl.budget);
  emit(fl, rep.serialize());
  return rep.passed() ? ok : validation;
}

int cmd_density(const Flags& fl) {
  Instance in = load(fl);
  auto scan = density_sign_scan(chamber_data(in.rs, in.chamber, parse_selector(fl.selector)), parse_rat(fl.step));
  std::ostringstream o;
  o << "point,sign\n";
  for (const auto& s : scan.samples) o << to_string(s.point, ";") << "," << s.sign << "\n";
  o << "# fraction_negative " << to_string(scan.fraction_negative) << "\n";
  for (const auto& s : scan.outer_vertices) o << "# outer_vertex " << to_string(s.point, ";") << " sign " << s.sign << "\n";
  emit(fl, o.str());
  return ok;
}

int cmd_lift(const Flags& fl) {
  Instance in = load(fl);
  auto lift = build_test_polytope(in.chamber, in.f, in.roof);
  std::ostringstream o;
  o << "lift:\n";
  o << "  roof: " << to_string(lift.roof) << "\n";
  o << "  lattice_scale: " << lift.scale.str() << "\n";
  o << "  vertices:\n";
  for (const Vec& v : lift.polytope.vertices) o << "    " << to_string(v) << "\n";
  o << "  facets:\n";
  for (const Facet& f : lift.polytope.facets) o << "    " << to_string(to_vec(f.normal)) << " >= " << to_string(f.offset) << "\n";
  emit(fl, o.str());
  return ok;
}

FamilyOptions family_options(const Flags& fl) {
  FamilyOptions opt;
  opt.smooth = fl.smooth;
  if (!fl.delta.empty()) opt.delta = parse_rat(fl.delta);
  if (!fl.epsilon.empty()) opt.epsilon = parse_rat(fl.epsilon);
  if (!fl.slope.empty()) opt.slope = parse_rat(fl.slope);
  return opt;
}

int cmd_gen(const Flags& fl) {
  ProblemFile p;
  if (fl.family == "donaldson") {
    p = gen_donaldson(fl.n, family_options(fl)).problem;
  } else if (fl.family == "pgl3") {
    p = gen_pgl3_family(parse_rat(fl.s), fl.n, family_options(fl)).problem;
  } else if (fl.family == "wonderful") {
    RootSystemData rs = build_root_system(fl.root_system.empty() ? "A2" : fl.root_system);
    p = gen_wonderful(rs, fl.point.empty() ? Vec(rs.rank, Rat(1)) : parse_vec(fl.point));
  } else if (fl.family == "pgln-simplex") {
    p = gen_pgln_simplex(fl.n, parse_rat(fl.s));
  } else {
    throw ParseError("--family must be donaldson, pgl3, wonderful or pgln-simplex");
  }
  emit(fl, serialize_problem(p));
  return ok;
}

int cmd_scan(const Flags& fl) {
  if (fl.family.empty()) throw ParseError("scan needs --family");
  auto res = scan_destabilizer(fl.family, parse_grid(fl.family, fl.grid), family_options(fl));
  std::string report = res.best_report ? res.best_report->serialize() : "no certificate found\n";
  if (fl.out.empty()) {
    std::cout << res.csv() << report;
  } else {
    emit(fl, res.csv());
    std::ofstream r(fl.out + ".report");
    r << report;
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact stability checks for polytopes with Weyl symmetry"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags fl;
  app.add_option("--root-system", fl.root_system, "A1, A2, A3 or toric:r; overrides the file");
  app.add_option("--in", fl.in, "problem file");
  app.add_option("--out", fl.out, "output file (stdout when absent)");
  app.add_option("--grid", fl.grid, "scan grid, e.g. s=5,10;n=10,20;epsilon=1/16;slope=1");
  app.add_option("--progression", fl.progression, "k0:step:count");
  app.add_option("--selector", fl.selector, "boundary facets: outer, wall or all");
  app.add_option("--budget", fl.budget, "lattice points allowed per k");
  app.add_flag("--smooth", fl.smooth, "resolve non-Delzant corners");
  app.add_option("--delta", fl.delta, "smoothing scale");
  app.add_option("--epsilon", fl.epsilon, "crease depth");
  app.add_option("--slope", fl.slope, "crease slope");
  app.add_option("--scale", fl.scale, "dilate the problem by this factor");
  app.add_option("--family", fl.family, "donaldson, pgl3, wonderful, pgln-simplex");
  app.add_option("--n", fl.n, "corner pattern index, or simplex rank");
  app.add_option("--s", fl.s, "hexagon size, or simplex scale");
  app.add_option("--point", fl.point, "interior point for the wonderful family, comma separated");
  app.add_option("--step", fl.step, "density grid step");
  app.add_option("--weight", fl.weight, "lemma-check weight: top, one or an exponent list");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"validate", "check invariance, walls, Delzant and the PL subdivision"},
      {"hilbert", "fit d_k and compare with the exact integrals"},
      {"futaki", "closed-form stability report"},
      {"mabuchi", "Mabuchi linear part and the stability report"},
      {"oracle-futaki", "Futaki invariant from lattice sums"},
      {"lemma-check", "weighted Ehrhart coefficients against integrals"},
      {"density", "sign of 2 H_sub - a H_top on a grid"},
      {"lift", "the lifted test polytope"},
      {"gen-example", "write a generated problem file"},
      {"scan", "destabilizer scan over a parameter grid"}};
  for (const auto& [name, help] : commands)
    app.add_subcommand(name, help)->callback([&fl, name = name] { fl.command = name; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return parse;
  }

  try {
    if (fl.command == "validate") return cmd_validate(fl);
    if (fl.command == "hilbert") return cmd_hilbert(fl);
    if (fl.command == "futaki") return cmd_futaki(fl, false);
    if (fl.command == "mabuchi") return cmd_futaki(fl, true);
    if (fl.command == "oracle-futaki") return cmd_oracle(fl);
    if (fl.command == "lemma-check") return cmd_lemma(fl);
    if (fl.command == "density") return cmd_density(fl);
    if (fl.command == "lift") return cmd_lift(fl);
    if (fl.command == "gen-example") return cmd_gen(fl);
    if (fl.command == "scan") return cmd_scan(fl);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return parse;
  } catch (const BudgetError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return budget;
  } catch (const ValidationError& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return validation;
  }
  return ok;
}
