#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sbp/error.hpp"
#include "sbp/io.hpp"
#include "sbp/operator.hpp"
#include "sbp/pseudospectral.hpp"
#include "sbp/repair.hpp"
#include "sbp/report_json.hpp"
#include "sbp/sat.hpp"
#include "sbp/spectral.hpp"
#include "sbp/verify.hpp"

namespace sbp::cli {
namespace {

namespace fs = std::filesystem;

// Usage problems found after CLI11 has accepted the command line.
struct UsageError {
  std::string message;
};

struct Common {
  std::string input;
  std::string builtin;
  std::string output;
  std::string format = "json";
  std::optional<double> tolerance;
  bool require_eigenvalue_property = false;
  bool require_nullspace_consistency = false;
};

struct RepairFlags {
  double target_eps = 1e-6;
  std::string norm = "frobenius";
};

struct PseudoFlags {
  std::string family = "lgl";
  int n = 4;
  double a = -1.0;
  double b = 1.0;
  std::string nodes;
  bool certify = false;
};

struct SolveFlags {
  std::string f_name;
  std::string f_file;
  double u0 = 0.0;
  std::string direction = "forward";
};

struct ConvergeFlags {
  std::string family = "classical_fd";
  std::string grids = "32,64,128,256";
  std::string function = "sin";
  double a = 0.0;
  double b = 1.0;
};

std::optional<double> parse_double(const std::string& text) {
  if (text.empty()) return std::nullopt;
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, sep)) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    parts.push_back(item);
  }
  return parts;
}

double resolve_tolerance(const Common& common, double fallback) {
  if (common.tolerance) return *common.tolerance;
  if (const char* env = std::getenv("SBP_TOLERANCE")) {
    const auto value = parse_double(env);
    if (!value || *value <= 0.0) throw UsageError{"SBP_TOLERANCE must be a positive number"};
    return *value;
  }
  return fallback;
}

void check_output_path(const std::string& path) {
  if (path.empty()) return;
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) throw UsageError{"output directory does not exist: " + parent.string()};
}

SbpOperatorPair builtin_operator(const std::string& name) {
  if (name == "counterexample") return build_counterexample();
  if (name == "two_point") return build_two_point();
  const std::string prefix = "classical_fd:";
  if (name.rfind(prefix, 0) == 0) {
    const auto n = parse_double(name.substr(prefix.size()));
    if (!n || *n != std::floor(*n)) throw UsageError{"bad classical_fd size in --builtin " + name};
    return build_classical_fd(static_cast<int>(*n), Interval(0.0, 1.0));
  }
  throw UsageError{"unknown builtin operator: " + name};
}

SbpOperatorPair load_input(const Common& common) {
  if (common.input.empty() == common.builtin.empty()) throw UsageError{"exactly one of --input or --builtin is required"};
  if (!common.builtin.empty()) return builtin_operator(common.builtin);
  if (!fs::is_regular_file(common.input)) throw UsageError{"input file not found: " + common.input};
  return load_operator(common.input);
}

// Text output.

std::string format_number(double value) {
  std::ostringstream os;
  os << std::setprecision(6) << value;
  return os.str();
}

std::string inline_value(const ordered_json& j) {
  if (j.is_number_float()) return format_number(j.get<double>());
  if (j.is_array()) {
    std::string text = "[";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) text += ", ";
      text += inline_value(j[i]);
    }
    return text + "]";
  }
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

bool has_object(const ordered_json& j) {
  if (j.is_object()) return true;
  if (j.is_array()) return std::any_of(j.begin(), j.end(), [](const ordered_json& e) { return has_object(e); });
  return false;
}

void render_text(const ordered_json& j, const std::string& path, std::ostream& os) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) render_text(value, path.empty() ? key : path + "." + key, os);
  } else if (j.is_array() && has_object(j)) {
    for (std::size_t i = 0; i < j.size(); ++i) render_text(j[i], path + "[" + std::to_string(i) + "]", os);
  } else {
    os << path << ": " << inline_value(j) << "\n";
  }
}

std::string render(const ordered_json& doc, const std::string& format) {
  if (format == "text") {
    std::ostringstream os;
    render_text(doc, "", os);
    return os.str();
  }
  return doc.dump(2) + "\n";
}

void emit(const std::string& payload, const std::string& output, std::ostream& out) {
  if (output.empty()) {
    out << payload;
    return;
  }
  std::ofstream file(output, std::ios::binary);
  if (!file) throw UsageError{"cannot write " + output};
  file << payload;
}

ordered_json eigenvalues_json(const SpectralReport& report) {
  ordered_json values = ordered_json::array();
  for (const auto& pair : report.pairs) values.push_back(complex_to_json(pair.lambda));
  return values;
}

std::string describe(const std::vector<Complex>& values) {
  std::string text;
  for (const Complex& z : values) {
    if (!text.empty()) text += ", ";
    text += format_number(z.real()) + (z.imag() < 0 ? "-" : "+") + format_number(std::abs(z.imag())) + "i";
  }
  return text;
}

// Subcommands.

int run_verify(const Common& common, std::ostream& out, std::ostream& err) {
  const double tol = resolve_tolerance(common, kDefaultTolerance);
  check_output_path(common.output);
  const SbpOperatorPair op = load_input(common);
  const VerificationReport report = verify_all(op, tol);

  ordered_json doc;
  doc["operator"] = op.name;
  doc["n"] = op.degree();
  doc["q"] = op.q;
  doc["report"] = to_json(report);
  emit(render(doc, common.format), common.output, out);

  int status = kExitOk;
  if (!report.all_residuals_passed()) {
    for (const auto& r : report.residuals)
      if (!r.passed) err << "verify: property " << to_string(r.property) << " fails, residual " << format_number(r.residual) << "\n";
    status = kExitFailed;
  }
  if (common.require_nullspace_consistency && !report.nullspace_consistent) {
    err << "verify: nullspace consistency fails\n";
    status = kExitFailed;
  }
  if (common.require_eigenvalue_property && !report.eigenvalue_property) {
    err << "verify: eigenvalue property fails, offending eigenvalues " << describe(report.offending_eigenvalues) << "\n";
    status = kExitFailed;
  }
  return status;
}

int run_spectrum(const Common& common, std::ostream& out) {
  const double tol = resolve_tolerance(common, kDefaultTolerance);
  check_output_path(common.output);
  const SbpOperatorPair op = load_input(common);
  ordered_json doc;
  doc["operator"] = op.name;
  doc["report"] = to_json(analyze_spectrum(op, tol));
  emit(render(doc, common.format), common.output, out);
  return kExitOk;
}

int run_repair(const Common& common, const RepairFlags& flags, std::ostream& out, std::ostream& err) {
  const double tol = resolve_tolerance(common, kDefaultTolerance);
  const auto norm = parse_norm_choice(flags.norm);
  if (!norm) throw UsageError{"unknown norm: " + flags.norm};
  check_output_path(common.output);
  const SbpOperatorPair op = load_input(common);

  const RepairResult result = repair_operator(op, flags.target_eps, *norm, tol);
  const VerificationReport before = verify_all(op, tol);
  const VerificationReport after = verify_all(result.op, tol);
  if (!common.output.empty()) save_operator(result.op, common.output);

  ordered_json doc;
  doc["operator"] = result.op.name;
  doc["target_eps"] = flags.target_eps;
  doc["plan"] = to_json(result.plan);
  doc["before"] = to_json(before);
  doc["after"] = to_json(after);
  out << render(doc, common.format);

  if (!after.eigenvalue_property) {
    err << "repair: eigenvalue property still fails at tolerance " << format_number(tol) << ", offending eigenvalues "
        << describe(after.offending_eigenvalues) << "\n";
    return kExitFailed;
  }
  return kExitOk;
}

NodeFamily make_family(const PseudoFlags& flags) {
  const Interval interval(flags.a, flags.b);
  if (!flags.nodes.empty()) {
    const auto parts = split(flags.nodes, ',');
    Vector nodes(static_cast<Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const auto value = parse_double(parts[i]);
      if (!value) throw UsageError{"bad node value: " + parts[i]};
      nodes(static_cast<Index>(i)) = *value;
    }
    return NodeFamily::explicit_nodes(nodes, interval);
  }
  const auto tag = parse_node_family(flags.family);
  if (!tag) throw UsageError{"unknown node family: " + flags.family};
  switch (*tag) {
    case NodeFamilyTag::legendre_gauss_lobatto: return NodeFamily::legendre_gauss_lobatto(flags.n, interval);
    case NodeFamilyTag::chebyshev_gauss_lobatto: return NodeFamily::chebyshev_gauss_lobatto(flags.n, interval);
    case NodeFamilyTag::uniform: return NodeFamily::uniform(flags.n, interval);
    case NodeFamilyTag::explicit_nodes: break;
  }
  throw UsageError{"explicit family needs --nodes"};
}

int run_pseudospectral(const Common& common, const PseudoFlags& flags, std::ostream& out, std::ostream& err) {
  check_output_path(common.output);
  if (!(flags.b > flags.a)) throw UsageError{"--b must exceed --a"};
  const NodeFamily family = make_family(flags);
  if (const auto warning = conditioning_warning(family)) err << "warning: " << *warning << "\n";

  if (!flags.certify) {
    const SbpOperatorPair op = build_pseudospectral_operator(family);
    if (common.output.empty())
      out << dump_operator(op) << "\n";
    else
      save_operator(op, common.output);
    return kExitOk;
  }

  const double tol = resolve_tolerance(common, 1e-8);
  const CertificationReport report = certify_node_sets({family}, tol);
  if (!common.output.empty() && report.entries.front().constructed)
    save_operator(build_pseudospectral_operator(family), common.output);
  out << render(to_json(report), common.format);
  for (const auto& entry : report.entries) {
    if (entry.certified) continue;
    err << "pseudospectral: " << entry.label << " not certified"
        << (entry.error.empty() ? "" : ": " + entry.error) << "\n";
    return kExitFailed;
  }
  return kExitOk;
}

Vector read_samples(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw UsageError{"cannot read " + path};
  std::stringstream buffer;
  buffer << file.rdbuf();
  const std::string text = buffer.str();
  std::vector<double> values;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    const auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_array()) throw UsageError{"f file is not a JSON array: " + path};
    for (const auto& v : doc) {
      if (!v.is_number()) throw UsageError{"f file holds a non-number: " + path};
      values.push_back(v.get<double>());
    }
  } else {
    std::istringstream stream(text);
    std::string token;
    while (stream >> token) {
      const auto value = parse_double(token);
      if (!value) throw UsageError{"bad sample in " + path + ": " + token};
      values.push_back(*value);
    }
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

int run_solve(const Common& common, const SolveFlags& flags, std::ostream& out) {
  check_output_path(common.output);
  if (flags.f_name.empty() == flags.f_file.empty()) throw UsageError{"exactly one of --f or --f-file is required"};
  std::optional<NamedFunction> named;
  if (!flags.f_name.empty()) {
    named = named_function(flags.f_name);
    if (!named) throw UsageError{"unknown function: " + flags.f_name};
  }
  const SbpOperatorPair op = load_input(common);

  SatProblem problem;
  problem.u0 = flags.u0;
  problem.direction = flags.direction == "reversed" ? FlowDirection::reversed : FlowDirection::forward;
  if (named) {
    problem.f_samples = op.x.unaryExpr([&](double t) { return named->f(t); });
  } else {
    problem.f_samples = read_samples(flags.f_file);
  }
  const Vector u = solve(assemble(op, problem));

  ordered_json doc;
  doc["operator"] = op.name;
  doc["direction"] = std::string(to_string(problem.direction));
  doc["u0"] = flags.u0;
  doc["x"] = vector_to_json(op.x);
  doc["u"] = vector_to_json(u);
  emit(render(doc, common.format), common.output, out);
  return kExitOk;
}

std::string render_csv(const ConvergenceStudy& study) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "n,spacing,error_h,error_max,order\n";
  for (std::size_t i = 0; i < study.rows.size(); ++i) {
    const auto& row = study.rows[i];
    os << row.n << ',' << row.spacing << ',' << row.error_h << ',' << row.error_max << ',';
    if (i > 0 && !study.saturated) os << study.pairwise_orders[i - 1];
    os << "\n";
  }
  os << "least_squares,,,,";
  if (!study.saturated) os << study.least_squares_order;
  os << "\n";
  return os.str();
}

int run_converge(const Common& common, const ConvergeFlags& flags, std::ostream& out) {
  check_output_path(common.output);
  if (!(flags.b > flags.a)) throw UsageError{"--b must exceed --a"};
  const auto named = named_function(flags.function);
  if (!named) throw UsageError{"unknown function: " + flags.function};
  std::vector<int> grids;
  for (const auto& part : split(flags.grids, ',')) {
    const auto value = parse_double(part);
    if (!value || *value != std::floor(*value) || *value < 1) throw UsageError{"bad grid size: " + part};
    grids.push_back(static_cast<int>(*value));
  }

  const Interval interval(flags.a, flags.b);
  OperatorFamily family;
  if (flags.family == "classical_fd") {
    family = [interval](int n) { return build_classical_fd(n, interval); };
  } else {
    const auto tag = parse_node_family(flags.family);
    if (!tag || *tag == NodeFamilyTag::explicit_nodes) throw UsageError{"unknown operator family: " + flags.family};
    family = [interval, tag](int n) {
      switch (*tag) {
        case NodeFamilyTag::chebyshev_gauss_lobatto:
          return build_pseudospectral_operator(NodeFamily::chebyshev_gauss_lobatto(n, interval));
        case NodeFamilyTag::uniform: return build_pseudospectral_operator(NodeFamily::uniform(n, interval));
        default: return build_pseudospectral_operator(NodeFamily::legendre_gauss_lobatto(n, interval));
      }
    };
  }

  const ConvergenceStudy study = convergence_study(family, named->f, named->u, grids);
  if (common.format == "csv") {
    emit(render_csv(study), common.output, out);
  } else {
    ordered_json doc;
    doc["family"] = flags.family;
    doc["function"] = flags.function;
    doc["study"] = to_json(study);
    emit(render(doc, common.format), common.output, out);
  }
  return kExitOk;
}

int run_demo(const Common& common, const RepairFlags& flags, std::ostream& out, std::ostream& err) {
  const double tol = resolve_tolerance(common, kDefaultTolerance);
  const auto norm = parse_norm_choice(flags.norm);
  if (!norm) throw UsageError{"unknown norm: " + flags.norm};
  check_output_path(common.output);

  const SbpOperatorPair op = build_counterexample();
  const SpectralReport before = analyze_spectrum(op, tol);
  const RepairResult repaired = repair_operator(op, flags.target_eps, *norm, tol);
  const SpectralReport after = analyze_spectrum(repaired.op, tol);
  const VerificationReport verdict_before = verify_all(op, tol);
  const VerificationReport verdict_after = verify_all(repaired.op, tol);

  ordered_json doc;
  doc["operator"] = op.name;
  doc["target_eps"] = flags.target_eps;
  doc["before"] = {{"eigenvalues", eigenvalues_json(before)},
                   {"imaginary_count", before.imaginary.size()},
                   {"eigenvalue_property", verdict_before.eigenvalue_property}};
  doc["perturbation_norm"] = repaired.plan.norm_bound;
  doc["predicted_shifts"] = repaired.plan.predicted_shifts;
  doc["after"] = {{"eigenvalues", eigenvalues_json(after)},
                  {"min_real_part", after.min_real_part()},
                  {"eigenvalue_property", verdict_after.eigenvalue_property}};
  emit(render(doc, common.format), common.output, out);

  if (!verdict_after.eigenvalue_property) {
    err << "demo: repaired operator still has eigenvalues " << describe(verdict_after.offending_eigenvalues) << "\n";
    return kExitFailed;
  }
  return kExitOk;
}

void add_common(CLI::App* sub, Common& common, bool needs_operator) {
  if (needs_operator) {
    auto* input = sub->add_option("--input", common.input, "Operator JSON document");
    auto* builtin = sub->add_option("--builtin", common.builtin, "counterexample, two_point or classical_fd:N");
    input->excludes(builtin);
  }
  sub->add_option("--output", common.output, "Write the result to this path instead of stdout");
  sub->add_option("--tolerance", common.tolerance, "Verification tolerance (default 1e-10, or SBP_TOLERANCE)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Summation-by-parts operator toolkit", "sbp"};
  app.require_subcommand(1);

  Common common;
  RepairFlags repair_flags;
  PseudoFlags pseudo_flags;
  SolveFlags solve_flags;
  ConvergeFlags converge_flags;
  const auto json_or_text = CLI::IsMember({"json", "text"});

  auto* verify = app.add_subcommand("verify", "Check the SBP identities, nullspace consistency and eigenvalue property");
  add_common(verify, common, true);
  verify->add_option("--format", common.format, "json or text")->check(json_or_text);
  verify->add_flag("--require-eigenvalue-property", common.require_eigenvalue_property,
                   "Exit 1 unless every eigenvalue of D+ + H^-1 p0 p0^T has positive real part");
  verify->add_flag("--require-nullspace-consistency", common.require_nullspace_consistency,
                   "Exit 1 unless the kernel of D+ is spanned by the constant vector");

  auto* spectrum = app.add_subcommand("spectrum", "Eigen-decompose D+ + H^-1 p0 p0^T and classify its eigenpairs");
  add_common(spectrum, common, true);
  spectrum->add_option("--format", common.format, "json or text")->check(json_or_text);

  auto* repair = app.add_subcommand("repair", "Shift imaginary eigenvalues by a symmetric PSD update of S");
  add_common(repair, common, true);
  repair->add_option("--format", common.format, "json or text")->check(json_or_text);
  repair->add_option("--target-eps", repair_flags.target_eps, "Perturbation budget for |D+' - D+| (default 1e-6)")
      ->check(CLI::PositiveNumber);
  repair->add_option("--norm", repair_flags.norm, "frobenius or spectral")->check(CLI::IsMember({"frobenius", "spectral"}));

  auto* pseudo = app.add_subcommand("pseudospectral", "Build a collocation SBP operator, optionally certify it");
  add_common(pseudo, common, false);
  pseudo->add_option("--format", common.format, "json or text (certification report)")->check(json_or_text);
  pseudo->add_option("--family", pseudo_flags.family, "lgl, cgl or uniform (default lgl)");
  pseudo->add_option("--n", pseudo_flags.n, "Polynomial degree (default 4)")->check(CLI::Range(1, 32));
  pseudo->add_option("--a", pseudo_flags.a, "Left endpoint (default -1)");
  pseudo->add_option("--b", pseudo_flags.b, "Right endpoint (default 1)");
  pseudo->add_option("--nodes", pseudo_flags.nodes, "Explicit comma-separated node list; overrides --family and --n");
  pseudo->add_flag("--certify", pseudo_flags.certify, "Run the eigenvalue certification and print its report");

  auto* solve_cmd = app.add_subcommand("solve", "Solve u' = f with a SAT boundary condition");
  add_common(solve_cmd, common, true);
  solve_cmd->add_option("--format", common.format, "json or text")->check(json_or_text);
  solve_cmd->add_option("--f", solve_flags.f_name, "Built-in data: sin, cos, exp, const or linear (f is its derivative)");
  solve_cmd->add_option("--f-file", solve_flags.f_file, "Node samples of f, JSON array or whitespace separated");
  solve_cmd->add_option("--u0", solve_flags.u0, "Boundary datum (default 0)");
  solve_cmd->add_option("--direction", solve_flags.direction, "forward (datum at a) or reversed (datum at b)")
      ->check(CLI::IsMember({"forward", "reversed"}));

  auto* converge = app.add_subcommand("converge", "Grid convergence study of the forward SAT solve");
  add_common(converge, common, false);
  converge->add_option("--format", common.format, "json, text or csv")->check(CLI::IsMember({"json", "text", "csv"}));
  converge->add_option("--family", converge_flags.family, "classical_fd, lgl, cgl or uniform (default classical_fd)");
  converge->add_option("--grids", converge_flags.grids, "Comma-separated sizes, at least three (default 32,64,128,256)");
  converge->add_option("--function", converge_flags.function, "Exact solution: sin, cos, exp, const or linear (default sin)");
  converge->add_option("--a", converge_flags.a, "Left endpoint (default 0)");
  converge->add_option("--b", converge_flags.b, "Right endpoint (default 1)");

  auto* demo = app.add_subcommand("demo", "Spectrum of the built-in counterexample before and after repair");
  add_common(demo, common, false);
  demo->add_option("--format", common.format, "json or text")->check(json_or_text);
  demo->add_option("--target-eps", repair_flags.target_eps, "Perturbation budget (default 1e-6)")->check(CLI::PositiveNumber);
  demo->add_option("--norm", repair_flags.norm, "frobenius or spectral")->check(CLI::IsMember({"frobenius", "spectral"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    std::string message = e.what();
    std::replace(message.begin(), message.end(), '\n', ' ');
    err << "usage: " << message << "\n";
    return kExitUsage;
  }

  try {
    if (verify->parsed()) return run_verify(common, out, err);
    if (spectrum->parsed()) return run_spectrum(common, out);
    if (repair->parsed()) return run_repair(common, repair_flags, out, err);
    if (pseudo->parsed()) return run_pseudospectral(common, pseudo_flags, out, err);
    if (solve_cmd->parsed()) return run_solve(common, solve_flags, out);
    if (converge->parsed()) return run_converge(common, converge_flags, out);
    if (demo->parsed()) return run_demo(common, repair_flags, out, err);
  } catch (const UsageError& e) {
    err << "usage: " << e.message << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::string message = e.what();
    std::replace(message.begin(), message.end(), '\n', ' ');
    err << message << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "sbp: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace sbp::cli
