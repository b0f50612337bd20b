// squashkit command-line tool: device catalog, POVM dumps, postprocessing
// validation, squashing-map feasibility checks, noise-restoration thresholds
// and key-rate curves. See docs/formats.md for the wire formats.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "squashkit/check.hpp"
#include "squashkit/devices.hpp"
#include "squashkit/io.hpp"
#include "squashkit/keyrate.hpp"
#include "squashkit/solver.hpp"

namespace {

using namespace squashkit;

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitUndecided = 3;
constexpr int kExitUsage = 64;

std::vector<int> parse_int_range(const std::string& text, int n_max) {
  int lo = 0, hi = 0;
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      lo = hi = std::stoi(text);
    } else {
      lo = std::stoi(text.substr(0, dots));
      hi = std::stoi(text.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("bad integer range '" + text + "' (expected a or a..b)");
  }
  if (lo < 1 || hi < lo || hi > n_max)
    throw std::invalid_argument("range '" + text + "' outside 1.." + std::to_string(n_max));
  std::vector<int> values;
  for (int v = lo; v <= hi; ++v) values.push_back(v);
  return values;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> values;
  const auto c1 = text.find(':');
  try {
    if (c1 == std::string::npos) {
      values.push_back(std::stod(text));
      return values;
    }
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) throw std::invalid_argument("");
    const double lo = std::stod(text.substr(0, c1));
    const double hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = std::stod(text.substr(c2 + 1));
    if (step <= 0.0 || hi < lo) throw std::invalid_argument("");
    for (int k = 0;; ++k) {
      const double v = lo + k * step;
      if (v > hi + 1e-12) break;
      values.push_back(v);
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("bad grid '" + text + "' (expected x or lo:hi:step)");
  }
  if (values.empty()) throw std::invalid_argument("grid '" + text + "' is empty");
  return values;
}

std::vector<double> parse_probs(const std::string& text) {
  std::vector<double> probs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) probs.push_back(std::stod(item));
  return probs;
}

// Options shared by every subcommand that names a device.
struct DeviceArgs {
  std::string name;
  double p_plus = 0.5;
  double flip_p = 0.0;
  int d = 2;
  double t = 0.5;
  std::string probs;

  void add_to(CLI::App* cmd, bool positional_device = true) {
    if (positional_device)
      cmd->add_option("device", name, "device name (see `squashkit catalog`)")->required();
    cmd->add_option("--p-plus", p_plus, "bb84-active basis probability");
    cmd->add_option("--flip-p", flip_p, "six-state-active flip probability");
    cmd->add_option("--d", d, "mub dimension (prime)");
    cmd->add_option("--t", t, "pe-bb84 loss parameter");
    cmd->add_option("--probs", probs, "mub arm probabilities, comma separated");
  }

  DeviceFamily make() const {
    std::map<std::string, double> params{
        {"p-plus", p_plus}, {"flip-p", flip_p}, {"d", static_cast<double>(d)}, {"t", t}};
    return make_device(name, params, probs.empty() ? std::vector<double>{} : parse_probs(probs));
  }

  std::string config() const {
    std::ostringstream out;
    out << name << " p-plus=" << p_plus << " flip-p=" << flip_p << " d=" << d << " t=" << t
        << " probs=" << probs;
    return out.str();
  }
};

struct OutputArg {
  std::string path;
  std::ofstream file;

  void add_to(CLI::App* cmd) { cmd->add_option("--output", path, "write to file instead of stdout"); }

  std::ostream& stream() {
    if (path.empty()) return std::cout;
    if (!file.is_open()) {
      file.open(path);
      if (!file) throw std::invalid_argument("cannot open output file '" + path + "'");
    }
    return file;
  }
};

double tolerance_from_env(double flag_value) {
  if (flag_value > 0.0) return flag_value;
  if (const char* env = std::getenv("SQUASHKIT_TOL")) {
    try {
      const double v = std::stod(env);
      if (v > 0.0) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("SQUASHKIT_TOL must be a positive number");
  }
  return -1.0;
}

nlohmann::json params_json(const DeviceFamily& family) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, value] : family.params) j[key] = value;
  return j;
}

int run_check(const DeviceArgs& device, const std::string& n_range, const std::string& cpp_variant,
              std::optional<double> noise_p, double tol, int max_iter, int n_max,
              OutputArg& output) {
  if (cpp_variant != "plain" && cpp_variant != "noisy")
    throw std::invalid_argument("--cpp must be 'plain' or 'noisy'");
  if (cpp_variant == "noisy" && device.name != "six-state-active")
    throw std::invalid_argument("--cpp noisy is only defined for six-state-active");
  if (cpp_variant == "noisy" && !noise_p)
    throw std::invalid_argument("--cpp noisy requires --p <noise weight>");

  DeviceArgs effective = device;
  if (cpp_variant == "noisy") effective.flip_p = *noise_p;
  const DeviceFamily family = effective.make();

  bool any_infeasible = false, any_undecided = false;
  std::ostream& out = output.stream();
  for (int n : parse_int_range(n_range, n_max)) {
    try {
      const DeviceCheck report = check_device(family, n, tol, max_iter);
      nlohmann::json line = check_to_json(report);
      line["params"] = params_json(family);
      line["cpp"] = cpp_variant;
      out << line.dump() << "\n";
      if (report.verdict.status == Feasibility::Infeasible || !report.cpp_validation.ok() ||
          !report.trivial_rest)
        any_infeasible = true;
      else if (report.verdict.status == Feasibility::Undecided)
        any_undecided = true;
    } catch (const std::invalid_argument& err) {
      nlohmann::json line{{"device", family.name},
                          {"n", n},
                          {"status", "invalid"},
                          {"error", err.what()},
                          {"params", params_json(family)},
                          {"cpp", cpp_variant}};
      out << line.dump() << "\n";
      any_infeasible = true;
    }
  }
  if (any_infeasible) return kExitInfeasible;
  if (any_undecided) return kExitUndecided;
  return kExitOk;
}

int run_curve_pebb84(const std::string& t_grid, const std::string& n_range, int n_max,
                     OutputArg& output) {
  const std::vector<double> ts = parse_grid(t_grid);
  const std::vector<int> ns = parse_int_range(n_range, std::max(n_max, 40));
  std::ostream& out = output.stream();
  out << csv_comment("curve-pebb84 t=" + t_grid + " n=" + n_range) << "\n";
  out << "t,n,lambda_min,f_bound\n";
  for (double t : ts) {
    if (t <= 0.0 || t > 1.0) throw std::invalid_argument("curve-pebb84: t grid must lie in (0, 1]");
    double previous = -std::numeric_limits<double>::infinity();
    for (int n : ns) {
      const PeBb84Eig eig = pe_bb84_min_eig(t, n);
      if (n == 2 && std::abs(eig.lambda_min) > 1e-10) {
        std::cerr << "curve-pebb84: N=2 eigenvalue " << eig.lambda_min << " not zero at t=" << t
                  << "\n";
        return kExitInfeasible;
      }
      if (eig.lambda_min < previous - 1e-10) {
        std::cerr << "curve-pebb84: eigenvalue not nondecreasing in N at t=" << t << ", N=" << n
                  << "\n";
        return kExitInfeasible;
      }
      previous = eig.lambda_min;
      out << format_double(t) << "," << n << "," << format_double(eig.lambda_min) << ","
          << format_double(eig.bound) << "\n";
    }
  }
  return kExitOk;
}

int run_noise_threshold(const DeviceArgs& device, const std::string& n_range, double tol,
                        int max_iter, int n_max, OutputArg& output) {
  const DeviceFamily family = device.make();
  std::ostream& out = output.stream();
  out << csv_comment("noise-threshold " + device.config() + " n=" + n_range) << "\n";
  out << "n,p_weyl,p_exact,e\n";
  for (int n : parse_int_range(n_range, n_max)) {
    const DeviceCheck report = check_device(family, n, tol, max_iter);
    double p_weyl = 0.0, p_exact = 0.0;
    if (report.verdict.status != Feasibility::Feasible) {
      // Restoration mixes towards the trivial map from one specific Choi
      // operator; with undetermined directions there is no such operator to
      // start from (already-feasible devices simply need no noise).
      if (!report.problem.free_basis.empty())
        throw std::invalid_argument(
            "noise-threshold: the Choi operator of '" + family.name +
            "' has free directions; restoration needs a fully determined map");
      const Eigen::Index dq = report.problem.d_in;
      Operator rho = report.reduced && report.trivial_rest && report.rho_fix.size() > 0
                         ? report.rho_fix
                         : Operator(Operator::Identity(dq, dq) / static_cast<double>(dq));
      const NoiseRestoration restoration = restore_with_noise(report.problem, rho);
      p_weyl = restoration.p_weyl;
      p_exact = restoration.p_exact;
    }
    out << n << "," << format_double(p_weyl) << "," << format_double(p_exact) << ","
        << format_double(p_exact / 2.0) << "\n";
  }
  return kExitOk;
}

int run_keyrate(const std::string& protocol, double p_single, const std::string& grid,
                bool paper_literal, double f_ec, double p_flip, OutputArg& output) {
  std::ostream& out = output.stream();
  std::ostringstream config;
  config << "keyrate " << protocol << " p-single=" << p_single << " grid=" << grid
         << " literal=" << paper_literal << " f-ec=" << f_ec << " p-flip=" << p_flip;
  out << csv_comment(config.str()) << "\n";
  if (protocol == "bb84") {
    out << "e,p_single,e_pp,r_standard,r_improved\n";
    for (double e : parse_grid(grid)) {
      const Bb84Rates rates = bb84_rates(p_single, e, paper_literal, f_ec);
      out << format_double(e) << "," << format_double(p_single) << ","
          << format_double(rates.e_pp) << "," << format_double(rates.r_standard) << ","
          << format_double(rates.r_improved) << "\n";
    }
    return kExitOk;
  }
  if (protocol == "six-state") {
    out << "q,p_flip,r_sixstate\n";
    for (double q : parse_grid(grid))
      out << format_double(q) << "," << format_double(p_flip) << ","
          << format_double(six_state_penalty_rate(q, p_flip)) << "\n";
    return kExitOk;
  }
  throw std::invalid_argument("keyrate: protocol must be 'bb84' or 'six-state'");
}

int run_povm_dump(const DeviceArgs& device, int n, int n_max, OutputArg& output) {
  if (n < 1 || n > n_max) throw std::invalid_argument("povm-dump: N outside 1..N_max");
  const DeviceFamily family = device.make();
  const DeviceBlock block = family.block(n);
  nlohmann::json j{{"device", family.name},
                   {"params", params_json(family)},
                   {"n", n},
                   {"basic", povm_to_json(block.basic)},
                   {"target", povm_to_json(block.target)},
                   {"cpp", cpp_to_json(block.cpp)},
                   {"full", povm_to_json(block.full)}};
  if (family.engine_basic) {
    const Povm engine = family.engine_basic(n);
    double deviation = 0.0;
    for (std::size_t i = 0; i < block.basic.size(); ++i)
      deviation =
          std::max(deviation, (block.basic.elements[i] - engine.at(block.basic.labels[i])).norm());
    j["engine"] = povm_to_json(engine);
    j["max_deviation"] = deviation;
  }
  output.stream() << j.dump(2) << "\n";
  return kExitOk;
}

int run_validate_cpp(const DeviceArgs& device, int n, int n_max, OutputArg& output) {
  if (n < 1 || n > n_max) throw std::invalid_argument("validate-cpp: N outside 1..N_max");
  const DeviceFamily family = device.make();
  const DeviceBlock block = family.block(n);
  const CppValidation validation = validate_cpp(block.cpp, block.basic, block.target);
  nlohmann::json j{{"device", family.name},
                   {"n", n},
                   {"stochastic", validation.stochastic},
                   {"stochastic_residual", validation.stochastic_residual},
                   {"structurally_valid", validation.structurally_valid},
                   {"nullspace_residual", validation.nullspace_residual},
                   {"ok", validation.ok()}};
  if (validation.violated_dependency) {
    nlohmann::json combo = nlohmann::json::array();
    for (Eigen::Index i = 0; i < validation.violated_dependency->size(); ++i)
      combo.push_back((*validation.violated_dependency)(i));
    j["violated_dependency"] = combo;
  }
  output.stream() << j.dump() << "\n";
  return validation.ok() ? kExitOk : kExitInfeasible;
}

int run_catalog(OutputArg& output) {
  std::ostream& out = output.stream();
  for (const auto& name : device_names()) {
    std::map<std::string, double> defaults{{"t", 0.5}};
    const DeviceFamily family = make_device(name, defaults, {});
    out << family.name;
    if (!family.params.empty()) {
      out << " (";
      bool first = true;
      for (const auto& [key, value] : family.params) {
        if (!first) out << ", ";
        out << key << "=" << value;
        first = false;
      }
      out << ")";
    }
    out << "\n    " << family.notes << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"squashing-model toolkit for optical detector POVMs"};
  app.require_subcommand(1);

  // check
  auto* check_cmd = app.add_subcommand("check", "decide squashing-map feasibility per N");
  DeviceArgs check_device_args;
  check_device_args.add_to(check_cmd);
  std::string check_n = "1..6", check_cpp = "plain";
  double check_tol = -1.0;
  std::optional<double> check_p;
  int check_max_iter = 20000, n_max = 12;
  check_cmd->add_option("--n", check_n, "photon-number range a..b");
  check_cmd->add_option("--cpp", check_cpp, "postprocessing variant: plain or noisy");
  double check_p_value = -1.0;
  auto* p_opt = check_cmd->add_option("--p", check_p_value, "noise weight for --cpp noisy");
  check_cmd->add_option("--tol", check_tol, "relative solver tolerance");
  check_cmd->add_option("--max-iter", check_max_iter, "projection iteration cap");
  check_cmd->add_option("--n-max", n_max, "largest admissible N");
  OutputArg check_out;
  check_out.add_to(check_cmd);

  // curve-pebb84
  auto* curve_cmd = app.add_subcommand("curve-pebb84", "minimum Choi eigenvalue curve");
  std::string curve_t = "0.05:1.0:0.05", curve_n = "2..10";
  curve_cmd->add_option("--t", curve_t, "t grid lo:hi:step");
  curve_cmd->add_option("--n", curve_n, "photon-number range a..b");
  curve_cmd->add_option("--n-max", n_max, "largest admissible N");
  OutputArg curve_out;
  curve_out.add_to(curve_cmd);

  // noise-threshold
  auto* noise_cmd = app.add_subcommand("noise-threshold", "restoration noise per N");
  DeviceArgs noise_device;
  noise_device.add_to(noise_cmd);
  std::string noise_n = "1..10";
  double noise_tol = -1.0;
  int noise_max_iter = 20000;
  noise_cmd->add_option("--n", noise_n, "photon-number range a..b");
  noise_cmd->add_option("--tol", noise_tol, "relative solver tolerance");
  noise_cmd->add_option("--max-iter", noise_max_iter, "projection iteration cap");
  noise_cmd->add_option("--n-max", n_max, "largest admissible N");
  OutputArg noise_out;
  noise_out.add_to(noise_cmd);

  // keyrate
  auto* rate_cmd = app.add_subcommand("keyrate", "closed-form key-rate curves");
  std::string rate_protocol = "bb84", rate_grid = "0:0.12:0.005";
  double rate_p_single = 1.0, rate_f_ec = 1.0, rate_p_flip = 1.0 / 6.0;
  bool rate_literal = false;
  rate_cmd->add_option("--protocol", rate_protocol, "bb84 or six-state");
  rate_cmd->add_option("--p-single", rate_p_single, "single-click probability (bb84)");
  rate_cmd->add_option("--grid", rate_grid, "error grid lo:hi:step");
  rate_cmd->add_flag("--paper-literal", rate_literal, "use the nested published leak form");
  rate_cmd->add_option("--f-ec", rate_f_ec, "error-correction inefficiency (>= 1)");
  rate_cmd->add_option("--p-flip", rate_p_flip, "six-state postprocessing flip probability");
  OutputArg rate_out;
  rate_out.add_to(rate_cmd);

  // povm-dump
  auto* dump_cmd = app.add_subcommand("povm-dump", "closed-form and engine POVMs as JSON");
  DeviceArgs dump_device;
  dump_device.add_to(dump_cmd);
  int dump_n = 1;
  dump_cmd->add_option("--n", dump_n, "photon number");
  dump_cmd->add_option("--n-max", n_max, "largest admissible N");
  OutputArg dump_out;
  dump_out.add_to(dump_cmd);

  // validate-cpp
  auto* validate_cmd = app.add_subcommand("validate-cpp", "check the postprocessing matrix");
  DeviceArgs validate_device;
  validate_device.add_to(validate_cmd);
  int validate_n = 1;
  validate_cmd->add_option("--n", validate_n, "photon number");
  validate_cmd->add_option("--n-max", n_max, "largest admissible N");
  OutputArg validate_out;
  validate_out.add_to(validate_cmd);

  // catalog
  auto* catalog_cmd = app.add_subcommand("catalog", "list devices and conventions");
  OutputArg catalog_out;
  catalog_out.add_to(catalog_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (p_opt->count() > 0) check_p = check_p_value;
    if (check_cmd->parsed())
      return run_check(check_device_args, check_n, check_cpp, check_p,
                       tolerance_from_env(check_tol), check_max_iter, n_max, check_out);
    if (curve_cmd->parsed()) return run_curve_pebb84(curve_t, curve_n, n_max, curve_out);
    if (noise_cmd->parsed())
      return run_noise_threshold(noise_device, noise_n, tolerance_from_env(noise_tol),
                                 noise_max_iter, n_max, noise_out);
    if (rate_cmd->parsed())
      return run_keyrate(rate_protocol, rate_p_single, rate_grid, rate_literal, rate_f_ec,
                         rate_p_flip, rate_out);
    if (dump_cmd->parsed()) return run_povm_dump(dump_device, dump_n, n_max, dump_out);
    if (validate_cmd->parsed())
      return run_validate_cpp(validate_device, validate_n, n_max, validate_out);
    if (catalog_cmd->parsed()) return run_catalog(catalog_out);
  } catch (const std::invalid_argument& err) {
    std::cerr << "squashkit: " << err.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "squashkit: " << err.what() << "\n";
    return kExitUndecided;
  }
  return kExitUsage;
}
