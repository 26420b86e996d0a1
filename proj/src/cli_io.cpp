#include "chns/cli_io.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "chns/error.hpp"

namespace chns {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  if (b != e && *b == '+') ++b;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e || b == e) throw InvalidArgument("not a number: '" + s + "'");
  return v;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_integer(const std::string& s) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
    throw InvalidArgument("not an integer: '" + s + "'");
  }
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw InvalidArgument("not a boolean: '" + s + "'");
}

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line;
};

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto num = [&t](const std::string& name, auto member) {
      t[name] = [member](RunConfig& c, const std::string& v) { member(c) = parse_double(v); };
    };
    auto integer = [&t](const std::string& name, auto member) {
      t[name] = [member](RunConfig& c, const std::string& v) {
        member(c) = parse_integer<std::remove_reference_t<decltype(member(c))>>(v);
      };
    };
    auto flag = [&t](const std::string& name, auto member) {
      t[name] = [member](RunConfig& c, const std::string& v) { member(c) = parse_bool(v); };
    };
    num("physics.epsilon", [](RunConfig& c) -> double& { return c.scenario.phys.epsilon; });
    num("physics.Re", [](RunConfig& c) -> double& { return c.scenario.phys.Re; });
    num("physics.We_star", [](RunConfig& c) -> double& { return c.scenario.phys.We_star; });
    num("physics.mobility_coeff", [](RunConfig& c) -> double& { return c.scenario.phys.mobility.coeff; });
    t["physics.mobility"] = [](RunConfig& c, const std::string& v) {
      if (v == "constant") {
        c.scenario.phys.mobility.kind = Mobility::Kind::constant;
      } else if (v == "degenerate" || v == "regularized_degenerate") {
        c.scenario.phys.mobility.kind = Mobility::Kind::regularized_degenerate;
      } else {
        throw InvalidArgument("mobility must be constant or degenerate");
      }
    };
    num("scheme.dt", [](RunConfig& c) -> double& { return c.scenario.scheme.dt; });
    num("scheme.picard_tol", [](RunConfig& c) -> double& { return c.scenario.scheme.picard_tol; });
    num("scheme.newton_tol", [](RunConfig& c) -> double& { return c.scenario.scheme.newton_tol; });
    integer("scheme.picard_max", [](RunConfig& c) -> int& { return c.scenario.scheme.picard_max; });
    integer("scheme.newton_max", [](RunConfig& c) -> int& { return c.scenario.scheme.newton_max; });
    integer("scheme.anderson_depth", [](RunConfig& c) -> int& { return c.scenario.scheme.anderson_depth; });
    flag("scheme.freeze_velocity", [](RunConfig& c) -> bool& { return c.scenario.scheme.freeze_velocity; });
    flag("scheme.newton_reuse_jacobian",
         [](RunConfig& c) -> bool& { return c.scenario.scheme.newton_reuse_jacobian; });
    t["scheme.projection"] = [](RunConfig& c, const std::string& v) {
      c.scenario.scheme.projection = parse_projection(v);
    };
    integer("mesh.nx", [](RunConfig& c) -> Index& { return c.scenario.mesh.nx; });
    integer("mesh.ny", [](RunConfig& c) -> Index& { return c.scenario.mesh.ny; });
    num("mesh.lx", [](RunConfig& c) -> double& { return c.scenario.mesh.domain.lx; });
    num("mesh.ly", [](RunConfig& c) -> double& { return c.scenario.mesh.domain.ly; });
    t["initial.kind"] = [](RunConfig& c, const std::string& v) {
      using K = InitialSpec::Kind;
      static const std::map<std::string, K> kinds{
          {"modes", K::modes}, {"square", K::square}, {"random", K::random}, {"uniform", K::uniform}};
      const auto it = kinds.find(v);
      if (it == kinds.end()) throw InvalidArgument("initial kind must be modes, square, random or uniform");
      c.scenario.ic.kind = it->second;
    };
    num("initial.center_x", [](RunConfig& c) -> double& { return c.scenario.ic.center.x; });
    num("initial.center_y", [](RunConfig& c) -> double& { return c.scenario.ic.center.y; });
    num("initial.half_width", [](RunConfig& c) -> double& { return c.scenario.ic.half_width; });
    num("initial.mean", [](RunConfig& c) -> double& { return c.scenario.ic.mean; });
    num("initial.amplitude", [](RunConfig& c) -> double& { return c.scenario.ic.amplitude; });
    num("initial.value", [](RunConfig& c) -> double& { return c.scenario.ic.value; });
    flag("initial.stokes_velocity", [](RunConfig& c) -> bool& { return c.scenario.ic.stokes_velocity; });
    t["boundary.kind"] = [](RunConfig& c, const std::string& v) {
      if (v == "no_slip") {
        c.scenario.bc.kind = BoundarySpec::Kind::no_slip;
      } else if (v == "lid") {
        c.scenario.bc.kind = BoundarySpec::Kind::lid;
      } else {
        throw InvalidArgument("boundary kind must be no_slip or lid");
      }
    };
    num("boundary.lid_scale", [](RunConfig& c) -> double& { return c.scenario.bc.lid_scale; });
    num("run.T", [](RunConfig& c) -> double& { return c.scenario.T; });
    t["run.seed"] = [](RunConfig& c, const std::string& v) { c.scenario.seed = parse_integer<std::uint64_t>(v); };
    t["run.output"] = [](RunConfig& c, const std::string& v) { c.output_dir = v; };
    integer("run.snapshot_every", [](RunConfig& c) -> int& { return c.snapshot_every; });
    t["convergence.levels"] = [](RunConfig& c, const std::string& v) {
      std::vector<Index> levels;
      std::stringstream ss(v);
      std::string item;
      while (std::getline(ss, item, ',')) levels.push_back(parse_integer<Index>(trim(item)));
      c.scenario.levels = std::move(levels);
    };
    num("convergence.dt_per_h", [](RunConfig& c) -> double& { return c.scenario.dt_per_h; });
    return t;
  }();
  return table;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  std::vector<Entry> entries;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("empty section name", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    Entry e{section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
    if (e.key.empty()) throw ConfigError("missing key before '='", line_no);
    if (e.value.empty()) throw ConfigError("missing value for '" + e.key + "'", line_no);
    const std::string full = section.empty() ? e.key : section + "." + e.key;
    if (!seen.insert(full).second) throw ConfigError("duplicate key '" + full + "'", line_no);
    entries.push_back(std::move(e));
  }

  const Entry* scenario_entry = nullptr;
  for (const auto& e : entries) {
    if (e.section.empty() && e.key == "scenario") scenario_entry = &e;
  }
  if (!scenario_entry) throw ConfigError("missing required key 'scenario'");
  RunConfig cfg;
  try {
    cfg.scenario = default_scenario(parse_scenario_tag(scenario_entry->value));
  } catch (const InvalidArgument& ex) {
    throw ConfigError(ex.what(), scenario_entry->line);
  }

  for (const auto& e : entries) {
    if (&e == scenario_entry) continue;
    const std::string full = e.section.empty() ? e.key : e.section + "." + e.key;
    const auto it = setters().find(full);
    if (it == setters().end()) throw ConfigError("unknown key '" + full + "'", e.line);
    try {
      it->second(cfg, e.value);
    } catch (const InvalidArgument& ex) {
      throw ConfigError(std::string("bad value for '") + full + "': " + ex.what(), e.line);
    }
  }
  if (cfg.snapshot_every < 0) throw InvalidArgument("snapshot_every >= 0 required");
  cfg.scenario.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const RunConfig& c) {
  const Scenario& s = c.scenario;
  std::ostringstream o;
  auto b = [](bool v) { return v ? "true" : "false"; };
  o << "scenario = " << to_string(s.tag) << "\n\n[physics]\n"
    << "epsilon = " << format_double(s.phys.epsilon) << "\nRe = " << format_double(s.phys.Re)
    << "\nWe_star = " << format_double(s.phys.We_star)
    << "\nmobility = " << (s.phys.mobility.is_constant() ? "constant" : "degenerate")
    << "\nmobility_coeff = " << format_double(s.phys.mobility.coeff) << "\n\n[scheme]\n"
    << "dt = " << format_double(s.scheme.dt) << "\npicard_tol = " << format_double(s.scheme.picard_tol)
    << "\npicard_max = " << s.scheme.picard_max << "\nnewton_tol = " << format_double(s.scheme.newton_tol)
    << "\nnewton_max = " << s.scheme.newton_max << "\nprojection = " << to_string(s.scheme.projection)
    << "\nanderson_depth = " << s.scheme.anderson_depth << "\nfreeze_velocity = " << b(s.scheme.freeze_velocity)
    << "\nnewton_reuse_jacobian = " << b(s.scheme.newton_reuse_jacobian) << "\n\n[mesh]\n"
    << "nx = " << s.mesh.nx << "\nny = " << s.mesh.ny << "\nlx = " << format_double(s.mesh.domain.lx)
    << "\nly = " << format_double(s.mesh.domain.ly) << "\n\n[initial]\n";
  static const char* kinds[] = {"modes", "square", "random", "uniform"};
  o << "kind = " << kinds[static_cast<int>(s.ic.kind)] << "\ncenter_x = " << format_double(s.ic.center.x)
    << "\ncenter_y = " << format_double(s.ic.center.y) << "\nhalf_width = " << format_double(s.ic.half_width)
    << "\nmean = " << format_double(s.ic.mean) << "\namplitude = " << format_double(s.ic.amplitude)
    << "\nvalue = " << format_double(s.ic.value) << "\nstokes_velocity = " << b(s.ic.stokes_velocity)
    << "\n\n[boundary]\nkind = " << (s.bc.kind == BoundarySpec::Kind::lid ? "lid" : "no_slip")
    << "\nlid_scale = " << format_double(s.bc.lid_scale) << "\n\n[run]\nT = " << format_double(s.T) << "\n";
  if (s.seed) o << "seed = " << *s.seed << "\n";
  o << "output = " << c.output_dir << "\nsnapshot_every = " << c.snapshot_every << "\n\n[convergence]\nlevels = ";
  for (std::size_t i = 0; i < s.levels.size(); ++i) o << (i ? "," : "") << s.levels[i];
  o << "\ndt_per_h = " << format_double(s.dt_per_h) << "\n";
  return o.str();
}

void write_fields(const FeSystem& fe, const SimState& state, const std::string& path) {
  check_field(fe, state.phi_k, Space::scalar_p1);
  check_field(fe, state.u_k, Space::velocity_p1b);
  const Mesh& mesh = fe.mesh();
  const Index nv = mesh.n_vertices();
  const Index nt = mesh.n_triangles();
  const Index nb = fe.n_block_dofs();
  std::ofstream out = open_out(path);
  out << "# vtk DataFile Version 3.0\nchns fields t=" << format_double(state.t) << " k=" << state.k
      << "\nASCII\nDATASET UNSTRUCTURED_GRID\nPOINTS " << nv << " double\n";
  for (const Point& p : mesh.vertices()) out << format_double(p.x) << ' ' << format_double(p.y) << " 0\n";
  out << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const Triangle& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << nt << '\n';
  for (Index t = 0; t < nt; ++t) out << "5\n";
  out << "POINT_DATA " << nv << '\n';
  auto scalar = [&](const char* name, const Field& f) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (Index i = 0; i < nv; ++i) out << (f.coeffs.size() == nv ? format_double(f.coeffs[i]) : "0") << '\n';
  };
  scalar("phi", state.phi_k);
  scalar("mu", state.mu_half);
  scalar("p", state.p_k);
  out << "VECTORS u double\n";
  for (Index i = 0; i < nv; ++i) {
    out << format_double(state.u_k.coeffs[i]) << ' ' << format_double(state.u_k.coeffs[nb + i]) << " 0\n";
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

VtkData read_vtk(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  for (int i = 0; i < 4 && std::getline(in, line); ++i) {
  }
  VtkData d;
  std::string tok;
  auto fail = [&](const std::string& why) { return Error("'" + path + "': " + why); };
  auto next_double = [&]() {
    if (!(in >> tok)) throw fail("unexpected end of file");
    return parse_double(tok);
  };
  Index n_points = 0;
  while (in >> tok) {
    if (tok == "POINTS") {
      std::string type;
      in >> n_points >> type;
      d.points.resize(static_cast<std::size_t>(n_points));
      for (auto& p : d.points) {
        p.x = next_double();
        p.y = next_double();
        next_double();
      }
    } else if (tok == "CELLS") {
      Index n = 0, total = 0;
      in >> n >> total;
      d.cells.resize(static_cast<std::size_t>(n));
      for (auto& c : d.cells) {
        int count = 0;
        in >> count >> c[0] >> c[1] >> c[2];
        if (count != 3) throw fail("only triangle cells are supported");
      }
    } else if (tok == "CELL_TYPES") {
      Index n = 0;
      in >> n;
      for (Index i = 0; i < n; ++i) {
        int type = 0;
        in >> type;
        if (type != 5) throw fail("unexpected cell type " + std::to_string(type));
      }
    } else if (tok == "POINT_DATA") {
      Index n = 0;
      in >> n;
      if (n != n_points) throw fail("POINT_DATA count differs from POINTS");
    } else if (tok == "SCALARS") {
      std::string name, type, lookup, table;
      int comps = 1;
      in >> name >> type >> comps >> lookup >> table;
      auto& v = d.scalars[name];
      v.resize(static_cast<std::size_t>(n_points));
      for (auto& x : v) x = next_double();
    } else if (tok == "VECTORS") {
      std::string name, type;
      in >> name >> type;
      auto& v = d.vectors[name];
      v.resize(static_cast<std::size_t>(n_points));
      for (auto& x : v) {
        x.x = next_double();
        x.y = next_double();
        next_double();
      }
    } else {
      throw fail("unexpected token '" + tok + "'");
    }
    if (!in && !in.eof()) throw fail("malformed section");
  }
  return d;
}

void write_diagnostics(const std::vector<DiagnosticRow>& rows, const std::string& path) {
  std::ofstream out = open_out(path);
  out << kDiagnosticsHeader << '\n';
  for (const auto& r : rows) {
    const EnergyRecord& e = r.energy;
    out << format_double(e.t) << ',' << format_double(e.kinetic) << ',' << format_double(e.surface) << ','
        << format_double(e.E_ht) << ',' << format_double(e.E_app) << ',' << format_double(e.mass) << ','
        << r.picard_iters << ',' << r.newton_iters << '\n';
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

std::vector<DiagnosticRow> read_diagnostics(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kDiagnosticsHeader) {
    throw Error("'" + path + "': missing diagnostics header");
  }
  std::vector<DiagnosticRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(trim(line));
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) throw Error("'" + path + "' line " + std::to_string(line_no) + ": expected 8 columns");
    DiagnosticRow r;
    r.energy.t = parse_double(cells[0]);
    r.energy.kinetic = parse_double(cells[1]);
    r.energy.surface = parse_double(cells[2]);
    r.energy.E_ht = parse_double(cells[3]);
    r.energy.E_app = parse_double(cells[4]);
    r.energy.mass = parse_double(cells[5]);
    r.picard_iters = parse_integer<int>(cells[6]);
    r.newton_iters = parse_integer<int>(cells[7]);
    rows.push_back(r);
  }
  return rows;
}

void write_step_reports(const std::vector<StepReport>& reports, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "step,t,picard_iters,newton_iters,picard_increment,mass_change,energy_before,energy_after,"
         "dissipation_mobility,dissipation_viscous,dissipation_phase,identity_residual,"
         "identity_residual_discrete,projection_defect,projection_defect_discrete,divergence_residual\n";
  for (const auto& r : reports) {
    out << r.step << ',' << format_double(r.t) << ',' << r.picard_iters << ',' << r.newton_iters << ','
        << format_double(r.picard_increment) << ',' << format_double(r.mass_change) << ','
        << format_double(r.energy_before) << ',' << format_double(r.energy_after) << ','
        << format_double(r.dissipation_mobility) << ',' << format_double(r.dissipation_viscous) << ','
        << format_double(r.dissipation_phase) << ',' << format_double(r.identity_residual) << ','
        << format_double(r.identity_residual_discrete) << ',' << format_double(r.projection_defect) << ','
        << format_double(r.projection_defect_discrete) << ',' << format_double(r.divergence_residual) << '\n';
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

void write_cauchy_table(const CauchyTable& table, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "variable,coarse,fine,error,rate\n";
  for (const auto& r : table.rows) {
    out << r.variable << ',' << r.coarse << ',' << r.fine << ',' << format_double(r.error) << ','
        << format_double(r.rate) << '\n';
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace chns
