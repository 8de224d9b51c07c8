// sqint_cli: verification suites, transform analysis and synthesis of signal
// files, convention sheets and plot tables.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or I/O error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "sqint/verify.hpp"

namespace fs = std::filesystem;
using namespace sqint;

namespace {

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_usage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fully resolved configuration; every field has a concrete value once resolved.
struct RunConfig {
  std::string command;
  std::string group = "wh";
  std::size_t n = 1;
  double kcheck = -1.0;
  std::string psi = "gaussian";
  std::string psi_file;
  std::string rho = "gaussian";
  double rho_width = 1.0;
  std::uint64_t seed = 1;
  std::size_t samples = 1000;
  std::string input;
  std::string reference;
  std::string out;
  double box = 10.0;
  std::size_t resolution = 80;
  double a_min = 1.0 / 32.0;
  double a_max = 4.0;
  std::size_t a_resolution = 56;
  std::map<std::string, double> tolerance;

  json to_json() const {
    json j;
    j["command"] = command;
    j["group"] = group;
    j["n"] = n;
    j["kcheck"] = kcheck;
    j["psi"] = psi;
    j["psi_file"] = psi_file;
    j["rho"] = rho;
    j["rho_width"] = rho_width;
    j["seed"] = seed;
    j["samples"] = samples;
    j["input"] = input;
    j["reference"] = reference;
    j["out"] = out;
    j["box"] = box;
    j["resolution"] = resolution;
    j["a_min"] = a_min;
    j["a_max"] = a_max;
    j["a_resolution"] = a_resolution;
    j["tolerance"] = tolerance;
    return j;
  }
};

/// Flag values as parsed; an option only overrides the config file when it was given.
struct Flags {
  std::string config;
  RunConfig values;
  std::vector<std::string> tolerance;
};

void apply_config_file(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  if (ss.str().find_first_not_of(" \t\r\n") == std::string::npos) throw UsageError("config file '" + path + "' is empty");
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::exception& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
  if (!j.is_object() || j.empty()) throw UsageError("config file '" + path + "' is empty");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "group") c.group = v.get<std::string>();
      else if (key == "n") c.n = v.get<std::size_t>();
      else if (key == "kcheck") c.kcheck = v.get<double>();
      else if (key == "psi") c.psi = v.get<std::string>();
      else if (key == "psi_file") c.psi_file = v.get<std::string>();
      else if (key == "rho") c.rho = v.get<std::string>();
      else if (key == "rho_width") c.rho_width = v.get<double>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "samples") c.samples = v.get<std::size_t>();
      else if (key == "input") c.input = v.get<std::string>();
      else if (key == "reference") c.reference = v.get<std::string>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "box") c.box = v.get<double>();
      else if (key == "resolution") c.resolution = v.get<std::size_t>();
      else if (key == "a_min") c.a_min = v.get<double>();
      else if (key == "a_max") c.a_max = v.get<double>();
      else if (key == "a_resolution") c.a_resolution = v.get<std::size_t>();
      else if (key == "tolerance") c.tolerance = v.get<std::map<std::string, double>>();
      else throw UsageError("config file '" + path + "': unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
}

void validate(const RunConfig& c) {
  const auto one_of = [](const std::string& v, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed) {
      if (v == a) return true;
    }
    return false;
  };
  if (c.command != "conventions" && !one_of(c.group, {"wh", "affine", "exotic"})) {
    throw UsageError("--group must be wh, affine or exotic");
  }
  if (c.command == "conventions" && !one_of(c.group, {"wh", "affine", "exotic", "all"})) {
    throw UsageError("--group must be wh, affine, exotic or all");
  }
  if (c.n == 0) throw UsageError("--n must be at least 1");
  if (c.kcheck == 0.0) throw UsageError("--kcheck must be nonzero");
  if (!one_of(c.psi, {"gaussian", "morlet", "hermite", "file"})) throw UsageError("--psi must be gaussian, morlet, hermite or file");
  if (c.psi == "file" && c.psi_file.empty()) throw UsageError("--psi file requires --psi-file");
  if (!one_of(c.rho, {"gaussian", "bump"})) throw UsageError("--rho must be gaussian or bump");
  if (!(c.rho_width > 0.0)) throw UsageError("--rho-width must be positive");
  if (c.samples == 0) throw UsageError("--samples must be positive");
  if (!(c.box > 0.0) || c.resolution < 2) throw UsageError("--box must be positive and --resolution at least 2");
  if (!(c.a_min > 0.0) || !(c.a_max > c.a_min) || c.a_resolution < 2) throw UsageError("invalid scale range");
}

DiscretizedState read_signal_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read signal file '" + path + "'");
  try {
    return read_signal_csv(in);
  } catch (const InvalidArgument& e) {
    throw UsageError(path + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  out << text;
}

SuiteOptions suite_options(const RunConfig& c) {
  SuiteOptions o;
  o.group = c.group;
  o.n = c.n;
  o.kcheck = c.kcheck;
  o.psi = c.psi;
  if (c.psi == "file") o.psi_state = read_signal_file(c.psi_file);
  o.rho = c.rho;
  o.rho_width = c.rho_width;
  o.seed = c.seed;
  o.samples = c.samples;
  o.tolerance = c.tolerance;
  return o;
}

// --- conventions --------------------------------------------------------------------------

void sheet(std::ostream& out, const GroupDescriptor& G) {
  out << "[group " << G.name << "]\n";
  out << "chart: (";
  for (std::size_t i = 0; i < G.coords.size(); ++i) out << (i ? ", " : "") << G.coords[i];
  out << ")\n";
  out << "product: " << G.product_law << '\n';
  out << "inverse: " << G.inverse_law << '\n';
  out << "haar: " << G.haar_law << '\n';
  out << "modular: " << G.modular_law << '\n';
  if (!G.notes.empty()) out << "notes: " << G.notes << '\n';
  out << '\n';
}

std::string conventions_text(const RunConfig& c) {
  std::ostringstream out;
  const bool all = c.group == "all";
  if (all || c.group == "wh") {
    const auto K = make_wh_center(c.n, c.kcheck);
    sheet(out, *make_polarized_wh(c.n));
    sheet(out, *make_standard_wh(c.n));
    sheet(out, *K->quotient);
    sheet(out, *central_extension(K->quotient, multiplier_from_section(wh_section_s(K))));
  }
  if (all || c.group == "affine") sheet(out, *make_affine(c.n));
  if (all || c.group == "exotic") {
    sheet(out, *make_exotic(c.n));
    sheet(out, *make_exotic_quotient(c.n));
    if (c.n == 1) {
      const auto E = make_exotic_tsr(1, {0.0});
      sheet(out, *central_extension(E->quotient, multiplier_from_section(exotic_section(E))));
    }
  }
  return out.str();
}

int cmd_conventions(const RunConfig& c) {
  const std::string text = conventions_text(c);
  if (c.out.empty()) {
    std::cout << text;
  } else {
    write_text(c.out, text);
  }
  return exit_pass;
}

// --- verify -------------------------------------------------------------------------------

json check_to_json(const Check& k) {
  json j;
  j["name"] = k.name;
  j["pass"] = k.pass;
  j["defect"] = format_double(k.defect);
  j["comparison"] = k.comparison;
  j["threshold"] = format_double(k.threshold);
  j["tail_estimate"] = format_double(k.tail);
  if (!k.status.empty()) {
    j["status"] = k.status;
    j["expected_status"] = k.expected_status;
  }
  if (!k.note.empty()) j["note"] = k.note;
  return j;
}

int cmd_verify(const RunConfig& c) {
  const auto checks = run_suite(suite_options(c));
  json report;
  report["command"] = "verify";
  report["config"] = c.to_json();
  report["checks"] = json::array();
  std::size_t failed = 0;
  for (const auto& k : checks) {
    report["checks"].push_back(check_to_json(k));
    if (!k.pass) ++failed;
  }
  report["summary"] = {{"total", checks.size()}, {"passed", checks.size() - failed}, {"failed", failed}};
  report["status"] = failed == 0 ? "pass" : "fail";
  const std::string text = report.dump(2) + "\n";
  if (c.out.empty()) {
    std::cout << text;
  } else {
    write_text(c.out, text);
  }
  return failed == 0 ? exit_pass : exit_fail;
}

// --- analyze / synthesize --------------------------------------------------------------------

struct TransformSetup {
  std::shared_ptr<const Representation> rep;
  DiscretizedState psi;
  std::optional<double> dm_norm;
  QuadratureGrid grid;
};

TransformSetup transform_setup(const RunConfig& c, const StateGrid& sg) {
  TransformSetup t;
  SuiteOptions o = suite_options(c);
  if (c.group == "wh") {
    if (sg.rank() != 1) throw UsageError("wh analysis expects a one-dimensional signal (index,x,re,im)");
    const auto K = make_wh_center(1, c.kcheck);
    t.rep = projective_from_section(wh_rep(1, c.kcheck), wh_section_s(K));
    t.psi = detail::resolve_psi(o, sg);
    t.dm_norm = duflo_moore_gabor(c.kcheck).apply(t.psi).norm();
    const double rq = c.box / std::max(1.0, std::abs(c.kcheck));
    t.grid = detail::phase_space(c.box, rq, c.resolution);
  } else if (c.group == "affine") {
    if (sg.rank() != 1) throw UsageError("affine analysis expects a one-dimensional signal (index,x,re,im)");
    t.rep = affine_rep(1);
    t.psi = detail::resolve_psi(o, sg);
    const auto D = duflo_moore_affine(std::sqrt(pi));
    if (D.in_domain(t.psi)) t.dm_norm = D.apply(t.psi).norm();
    t.grid = detail::affine_grid(sg, c.a_min, c.a_max, c.a_resolution);
  } else {
    if (sg.rank() != 2) throw UsageError("exotic analysis expects a two-dimensional signal (index,x1,x2,re,im)");
    const auto E = make_exotic_tsr(1, {0.0});
    t.rep = projective_from_section(exotic_rep(1), exotic_section(E));
    t.psi = c.psi == "file" ? detail::resolve_psi(o, sg) : detail::exotic_state(sg, 0.0, 0.0);
    t.dm_norm = duflo_moore_exotic().apply(t.psi).norm();
    t.grid = detail::exotic_quotient_grid(sg, std::max<std::size_t>(c.resolution / 4, 2), std::max<std::size_t>(c.a_resolution / 4, 2));
  }
  t.rep->validate_state(t.psi);
  return t;
}

fs::path out_dir(const RunConfig& c) { return c.out.empty() ? fs::path(".") : fs::path(c.out); }

int cmd_analyze(const RunConfig& c) {
  if (c.input.empty()) throw UsageError("analyze requires --input <signal.csv>");
  const auto phi = read_signal_file(c.input);
  const auto t = transform_setup(c, phi.grid());
  const auto r = analyze(*t.rep, t.psi, phi, t.grid, c.psi, t.dm_norm);
  json header = transform_header(r, phi.grid());
  header["config"] = c.to_json();
  std::ostringstream csv;
  write_transform_csv(csv, r);
  const auto dir = out_dir(c);
  write_text(dir / "coefficients.csv", csv.str());
  write_text(dir / "coefficients.json", header.dump(2) + "\n");

  json report;
  report["command"] = "analyze";
  report["config"] = c.to_json();
  report["nodes"] = r.grid.size();
  report["clipped_nodes"] = r.clipped_nodes;
  report["tail_estimate"] = format_double(r.tail_estimate);
  report["dm_norm"] = r.dm_norm ? json(format_double(*r.dm_norm)) : json("unset");
  if (r.dm_norm && phi.norm() > 0.0) {
    report["energy_ratio"] = format_double(energy_ratio(r, phi));
  } else {
    report["energy_ratio"] = nullptr;
  }
  write_text(dir / "analyze_report.json", report.dump(2) + "\n");
  return exit_pass;
}

int cmd_synthesize(const RunConfig& c) {
  if (c.input.empty()) throw UsageError("synthesize requires --input <directory written by analyze>");
  const fs::path dir(c.input);
  std::ifstream hin(dir / "coefficients.json");
  std::ifstream cin_(dir / "coefficients.csv");
  if (!hin || !cin_) throw UsageError("synthesize: cannot read coefficients.json/.csv in '" + c.input + "'");
  json header;
  try {
    header = json::parse(hin);
  } catch (const json::exception& e) {
    throw UsageError(std::string("coefficients.json: ") + e.what());
  }
  TransformResult r;
  StateGrid sg;
  try {
    r = read_transform(cin_, header);
    sg = state_grid_from_json(header.at("state_grid"));
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string("coefficients: ") + e.what());
  } catch (const json::exception& e) {
    throw UsageError(std::string("coefficients.json: ") + e.what());
  }
  // The analyzing vector is rebuilt from the configuration recorded at analysis time.
  RunConfig a = c;
  if (header.contains("config")) {
    const auto& hc = header["config"];
    a.group = hc.value("group", a.group);
    a.kcheck = hc.value("kcheck", a.kcheck);
    a.psi = hc.value("psi", a.psi);
    a.psi_file = hc.value("psi_file", a.psi_file);
    a.box = hc.value("box", a.box);
    a.resolution = hc.value("resolution", a.resolution);
    a.a_min = hc.value("a_min", a.a_min);
    a.a_max = hc.value("a_max", a.a_max);
    a.a_resolution = hc.value("a_resolution", a.a_resolution);
  }
  const auto t = transform_setup(a, sg);
  if (!r.dm_norm) throw UsageError("synthesize: the analyzing vector has no Duflo-Moore norm (not admissible)");
  const auto phi = synthesize(r, *t.rep, t.psi);
  std::ostringstream csv;
  write_signal_csv(csv, phi);
  const auto od = out_dir(c);
  write_text(od / "synthesized.csv", csv.str());

  json report;
  report["command"] = "synthesize";
  report["config"] = c.to_json();
  report["analysis_config"] = a.to_json();
  report["tail_estimate"] = format_double(r.tail_estimate);
  std::string ref = c.reference;
  if (ref.empty() && header.contains("config")) ref = header["config"].value("input", std::string{});
  if (!ref.empty()) {
    const auto orig = read_signal_file(ref);
    if (!(orig.grid() == phi.grid())) throw UsageError("reference '" + ref + "': grid mismatch with the coefficient header");
    report["reference"] = ref;
    report["round_trip_error"] =
        orig.norm() > 0.0 ? json(format_double(distance(orig, phi) / orig.norm())) : json(format_double(phi.norm()));
  } else {
    report["round_trip_error"] = nullptr;
  }
  write_text(od / "synthesize_report.json", report.dump(2) + "\n");
  return exit_pass;
}

// --- report -------------------------------------------------------------------------------

int cmd_report(const RunConfig& c) {
  const auto tables = report_tables(suite_options(c));
  const auto dir = out_dir(c);
  json report;
  report["command"] = "report";
  report["config"] = c.to_json();
  report["tables"] = json::array();
  for (const auto& [stem, table] : tables) {
    std::ostringstream csv;
    write_table_csv(csv, table);
    write_text(dir / (stem + ".csv"), csv.str());
    report["tables"].push_back({{"name", stem}, {"file", stem + ".csv"}, {"rows", table.rows.size()}});
  }
  write_text(dir / "conventions.txt", conventions_text(c));
  write_text(dir / "report.json", report.dump(2) + "\n");
  return exit_pass;
}

void add_common(CLI::App* sub, Flags& f) {
  auto& v = f.values;
  sub->add_option("--config", f.config, "JSON config file; explicit flags win");
  sub->add_option("--group", v.group, "wh | affine | exotic");
  sub->add_option("--n", v.n, "dimension parameter n");
  sub->add_option("--kcheck", v.kcheck, "character parameter of the Weyl-Heisenberg center");
  sub->add_option("--psi", v.psi, "analyzing vector: gaussian | morlet | hermite | file");
  sub->add_option("--psi-file", v.psi_file, "signal CSV holding the analyzing vector");
  sub->add_option("--rho", v.rho, "density on K: gaussian | bump");
  sub->add_option("--rho-width", v.rho_width, "width of the density on K");
  sub->add_option("--seed", v.seed, "seed for every randomized sample");
  sub->add_option("--samples", v.samples, "random samples per algebraic check");
  sub->add_option("--input", v.input, "input file or directory");
  sub->add_option("--reference", v.reference, "original signal for the round-trip error");
  sub->add_option("--out", v.out, "output file (conventions, verify) or directory");
  sub->add_option("--box", v.box, "phase-space half-width for Gabor grids");
  sub->add_option("--resolution", v.resolution, "nodes per phase-space axis");
  sub->add_option("--a-min", v.a_min, "smallest scale");
  sub->add_option("--a-max", v.a_max, "largest scale");
  sub->add_option("--a-resolution", v.a_resolution, "log-spaced scale nodes");
  sub->add_option("--tol", f.tolerance, "tolerance override name=value (repeatable)");
}

RunConfig resolve(const std::string& command, CLI::App* sub, const Flags& f) {
  RunConfig c;
  c.command = command;
  if (command == "conventions") c.group = "all";
  if (!f.config.empty()) apply_config_file(f.config, c);
  const auto given = [&](const char* name) { return sub->get_option(name)->count() > 0; };
  const auto& v = f.values;
  if (given("--group")) c.group = v.group;
  if (given("--n")) c.n = v.n;
  if (given("--kcheck")) c.kcheck = v.kcheck;
  if (given("--psi")) c.psi = v.psi;
  if (given("--psi-file")) c.psi_file = v.psi_file;
  if (given("--rho")) c.rho = v.rho;
  if (given("--rho-width")) c.rho_width = v.rho_width;
  if (given("--seed")) c.seed = v.seed;
  if (given("--samples")) c.samples = v.samples;
  if (given("--input")) c.input = v.input;
  if (given("--reference")) c.reference = v.reference;
  if (given("--out")) c.out = v.out;
  if (given("--box")) c.box = v.box;
  if (given("--resolution")) c.resolution = v.resolution;
  if (given("--a-min")) c.a_min = v.a_min;
  if (given("--a-max")) c.a_max = v.a_max;
  if (given("--a-resolution")) c.a_resolution = v.a_resolution;
  for (const auto& t : f.tolerance) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError("--tol expects name=value, got '" + t + "'");
    try {
      c.tolerance[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("--tol: bad value in '" + t + "'");
    }
  }
  validate(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sqint_cli: square-integrability modulo a relatively central subgroup"};
  app.require_subcommand(0, 1);
  std::map<std::string, std::pair<CLI::App*, Flags>> subs;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"conventions", "print the convention sheet (chart, product, Haar, modular function)"},
      {"verify", "run the verification suite for a group and print a JSON report"},
      {"analyze", "transform a signal CSV into coefficient CSV + JSON header"},
      {"synthesize", "rebuild a signal from coefficients written by analyze"},
      {"report", "write orthogonality, kernel, semi-invariance and divergence tables"},
  };
  for (const auto& [name, help] : commands) {
    auto& entry = subs[name];
    entry.first = app.add_subcommand(name, help);
    add_common(entry.first, entry.second);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }
  try {
    for (auto& [name, entry] : subs) {
      if (!entry.first->parsed()) continue;
      const RunConfig c = resolve(name, entry.first, entry.second);
      if (name == "conventions") return cmd_conventions(c);
      if (name == "verify") return cmd_verify(c);
      if (name == "analyze") return cmd_analyze(c);
      if (name == "synthesize") return cmd_synthesize(c);
      return cmd_report(c);
    }
    std::cerr << "error: no command given (conventions | verify | analyze | synthesize | report)\n" << app.help();
    return exit_usage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }
}
