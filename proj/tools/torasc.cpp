#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "torasc/asymptotics.hpp"
#include "torasc/errors.hpp"
#include "torasc/fixtures.hpp"
#include "torasc/verify.hpp"

using namespace torasc;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kInput = 2;
constexpr int kRefused = 3;
constexpr int kBudget = 4;

struct Options {
  std::string input;
  std::size_t n = 0;
  double tolerance = 1e-7;
  int nu_max = 2;
  int lambda_max = 3;
  double y_max = 0;
  std::size_t budget_boxes = 200000;
  std::size_t max_evals = 400'000'000;
  bool deterministic = false;
  std::uint64_t seed = 1;
  std::string amplitude = "unit";
  std::size_t cone = 0;
  std::string format = "json";
  std::string form = "chart";
  bool assume_nondegenerate = false;
  std::string polyhedron;
  double s = 0;
  std::vector<double> eps;
  std::vector<double> t;
  std::string t_range;
  std::string fixture;
};

struct Input {
  FunctionSpec f;
  std::optional<LatticePolyhedron> declared;
  std::string source;
};

json read_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("cannot parse " + what + " as JSON: " + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return read_json_text(ss.str(), path);
}

std::optional<LatticePolyhedron> polyhedron_from(const json& support, std::size_t n) {
  if (!support.is_array() || support.empty()) throw InputError("\"polyhedron\" must be a nonempty list of points");
  std::vector<LatticeVector> pts;
  for (const auto& p : support) {
    auto v = p.get<std::vector<Int>>();
    if (v.size() != n) throw InputError("polyhedron point has the wrong length");
    pts.emplace_back(v);
  }
  return LatticePolyhedron::build(n, pts);
}

// A JSON file, a built-in fixture name, or expression text in x1..xn.
Input load_input(const Options& o) {
  Input in;
  in.source = o.input;
  if (std::filesystem::is_regular_file(o.input)) {
    auto j = read_json_file(o.input);
    in.f = function_from_json(j);
    if (j.contains("polyhedron")) in.declared = polyhedron_from(j["polyhedron"], in.f.n());
  } else {
    bool named = false;
    for (const auto& fx : builtin_fixtures())
      if (fx.name == o.input) {
        in.f = fx.f;
        named = true;
      }
    if (!named) {
      std::size_t n = o.n;
      if (n == 0) {
        static const std::regex var(R"(x(\d+))");
        for (std::sregex_iterator it(o.input.begin(), o.input.end(), var), end; it != end; ++it)
          n = std::max<std::size_t>(n, std::stoul((*it)[1]));
        if (n == 0) throw InputError("cannot infer the number of variables; pass --n");
      }
      in.f = parse_function(o.input, n);
    }
  }
  if (!o.polyhedron.empty()) in.declared = polyhedron_from(read_json_text(o.polyhedron, "--polyhedron"), in.f.n());
  return in;
}

Amplitude load_amplitude(const Options& o, std::size_t n) {
  if (o.amplitude == "unit") return Amplitude::unit(n);
  if (std::filesystem::is_regular_file(o.amplitude)) return Amplitude::from_json(read_json_file(o.amplitude), n);
  return Amplitude::from_json(read_json_text(o.amplitude, "--amplitude"), n);
}

QuadratureConfig quad_config(const Options& o) {
  QuadratureConfig q;
  q.rel_tol = o.tolerance;
  q.abs_tol = std::min(q.abs_tol, o.tolerance * 1e-3);
  q.max_evals = o.max_evals;
  return q;
}

OscConfig osc_config(const Options& o) {
  OscConfig c;
  c.abs_tol = o.tolerance / 10;
  c.max_evals = o.max_evals;
  return c;
}

CoefficientOptions coeff_options(const Options& o) {
  CoefficientOptions c;
  c.cone_index = o.cone;
  c.form = o.form == "pullback" ? CoefficientForm::Pullback : CoefficientForm::Chart;
  c.assume_nondegenerate = o.assume_nondegenerate;
  c.y_scale = o.y_max;
  c.seed = o.seed;
  c.quad = quad_config(o);
  return c;
}

json complex_pair(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

std::vector<double> t_values(const Options& o) {
  std::vector<double> ts = o.t;
  if (!o.t_range.empty()) {
    double a, b;
    int k;
    char c1, c2;
    std::istringstream ss(o.t_range);
    if (!(ss >> a >> c1 >> b >> c2 >> k) || c1 != ':' || c2 != ':' || a <= 0 || b <= a || k < 2)
      throw InputError("--t-range expects lo:hi:count with 0 < lo < hi and count >= 2");
    for (int i = 0; i < k; ++i) ts.push_back(a * std::pow(b / a, static_cast<double>(i) / (k - 1)));
  }
  if (ts.empty()) throw InputError("no t values; pass --t or --t-range");
  return ts;
}

json oscillation_table(const Input& in, const Amplitude& phi, const std::vector<double>& ts, const Options& o,
                       std::vector<std::pair<double, std::complex<double>>>* out) {
  json rows = json::array();
  for (double t : ts) {
    auto r = numeric_osc(in.f, phi, t, osc_config(o));
    auto m = numeric_osc(in.f, phi, -t, osc_config(o));
    rows.push_back({{"t", t},
                    {"I", complex_pair(r.value)},
                    {"abs", std::abs(r.value)},
                    {"error", r.error},
                    {"symmetry_residual", std::abs(m.value - std::conj(r.value))}});
    if (out) out->push_back({t, r.value});
  }
  return rows;
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void print(const json& report, const Options& o) {
  if (o.format == "json") {
    std::cout << report.dump(2) << "\n";
    return;
  }
  for (const auto& [key, value] : report.items()) {
    if (value.is_array() && !value.empty() && value.front().is_object()) {
      std::cout << key << ":\n";
      for (const auto& row : value) {
        std::cout << " ";
        for (const auto& [k, v] : row.items()) std::cout << " " << k << "=" << scalar_text(v);
        std::cout << "\n";
      }
    } else {
      std::cout << key << ": " << scalar_text(value) << "\n";
    }
  }
}

json header(const Analysis& a) {
  json j{{"d", to_string(a.d())}, {"m", a.m()}, {"membership", to_string(a.membership.verdict)}};
  j["beta"] = to_string(Rational(-1) / a.d());
  return j;
}

int cmd_analyze(const Options& o) {
  auto in = load_input(o);
  auto a = analyze(in.f, in.declared, o.budget_boxes);
  auto report = to_json(a);
  report["provenance"] = "exact";
  print(report, o);
  if (a.membership.verdict == Verdict::Rejected) {
    std::cerr << "torasc: outside the class: " << a.membership.witness << "\n";
    return kRefused;
  }
  return kOk;
}

int cmd_fan(const Options& o) {
  auto in = load_input(o);
  auto a = analyze(in.f, in.declared, o.budget_boxes);
  json duals = json::array();
  for (std::size_t i = 0; i < a.sigma0.faces.size(); ++i) {
    json sk = json::array();
    for (const auto& v : a.sigma0.duals[i].skeleton) sk.push_back(v.coords());
    duals.push_back({{"face", a.sigma0.faces[i].describe(a.P)}, {"dual_cone", sk}});
  }
  json report = header(a);
  report["sigma0"] = to_json(a.sigma0.fan);
  report["sigma0_duals"] = duals;
  report["sigma"] = to_json(a.sigma);
  report["annotation"] = a.annotation ? to_json(*a.annotation) : json(nullptr);
  report["provenance"] = "exact";
  print(report, o);
  return kOk;
}

int cmd_resolve(const Options& o) {
  auto in = load_input(o);
  auto a = analyze(in.f, in.declared, o.budget_boxes);
  json charts = json::array();
  for (std::size_t i = 0; i < a.sigma.maximal().size(); ++i) {
    auto c = to_json(build_chart(a.f, a.sigma.maximal()[i], a.P));
    c["in_sigma_star"] = a.annotation && a.annotation->cones[i].in_sigma_star;
    charts.push_back(c);
  }
  json report = header(a);
  report["charts"] = charts;
  report["provenance"] = "exact";
  print(report, o);
  return kOk;
}

int cmd_poles(const Options& o) {
  auto in = load_input(o);
  auto a = analyze(in.f, in.declared, o.budget_boxes);
  if (!a.annotation) throw RefusalError("the origin lies in the polyhedron; there are no candidate poles to report");
  json report = header(a);
  report["candidate_poles"] = to_json(candidate_poles(*a.annotation, a.f.n(), o.nu_max, o.lambda_max));
  report["provenance"] = "exact";
  print(report, o);
  if (a.membership.verdict == Verdict::Rejected) {
    std::cerr << "torasc: outside the class; the poles above are not backed by the theory\n";
    return kRefused;
  }
  return kOk;
}

int cmd_coeff(const Options& o) {
  auto in = load_input(o);
  auto a = analyze(in.f, in.declared, o.budget_boxes);
  auto phi = load_amplitude(o, a.f.n());
  auto data = leading_zeta_coefficients(a, phi, coeff_options(o));
  auto lead = osc_leading_term(data);
  json report = header(a);
  report["candidate_poles"] = to_json(candidate_poles(*a.annotation, a.f.n(), o.nu_max, o.lambda_max));
  report["C_plus"] = complex_pair(data.C_plus);
  report["C_minus"] = complex_pair(data.C_minus);
  report["zeta_coefficient"] = data.C;
  report["leading_coefficient"] = complex_pair(lead.coefficient);
  report["leading_term"] = {{"exponent", to_string(lead.exponent)}, {"log_power", lead.log_power}};
  report["quad_error"] = data.quad_error;
  report["amplitude"] = phi.to_json();
  report["coefficients"] = to_json(data);
  report["provenance"] = data.provenance;
  print(report, o);
  return kOk;
}

int cmd_zeta(const Options& o) {
  auto in = load_input(o);
  auto a = analyze(in.f, in.declared, o.budget_boxes);
  auto phi = load_amplitude(o, a.f.n());
  json report = header(a);
  report["amplitude"] = phi.to_json();
  if (!o.eps.empty()) {
    auto e = extrapolate_at_pole(a, phi, o.eps, quad_config(o));
    json rows = json::array();
    for (std::size_t i = 0; i < e.eps.size(); ++i)
      rows.push_back({{"eps", e.eps[i]}, {"scaled", e.scaled[i]}, {"error", e.errors[i]}});
    report["samples"] = rows;
    report["limit"] = e.limit;
    report["limit_error"] = e.error;
    report["provenance"] = "numeric";
  } else {
    auto r = numeric_zeta(a, phi, o.s, quad_config(o));
    report["s"] = o.s;
    report["value"] = r.value;
    report["error"] = r.error;
    report["evals"] = r.evals;
    report["provenance"] = "numeric";
  }
  print(report, o);
  return kOk;
}

int cmd_oscillate(const Options& o) {
  auto in = load_input(o);
  auto phi = load_amplitude(o, in.f.n());
  json report{{"amplitude", phi.to_json()}, {"samples", oscillation_table(in, phi, t_values(o), o, nullptr)}};
  report["provenance"] = "numeric";
  print(report, o);
  return kOk;
}

int cmd_fit(const Options& o) {
  auto in = load_input(o);
  auto a = analyze(in.f, in.declared, o.budget_boxes);
  auto phi = load_amplitude(o, a.f.n());
  std::vector<std::pair<double, std::complex<double>>> samples;
  json report = header(a);
  report["amplitude"] = phi.to_json();
  report["samples"] = oscillation_table(in, phi, t_values(o), o, &samples);
  auto fit = fit_decay(samples, a.f.n());
  report["beta_hat"] = fit.beta;
  report["eta_hat"] = fit.eta;
  report["ssr_by_eta"] = fit.ssr;
  report["beta_by_eta"] = fit.betas;
  json predicted = nullptr;
  if (a.membership.verdict == Verdict::EHat && a.annotation)
    predicted = {{"beta", to_string(Rational(-1) / a.d())}, {"log_power", a.m() - 1}};
  report["predicted"] = predicted;
  report["provenance"] = "numeric";
  print(report, o);
  return kOk;
}

int cmd_verify(const Options& o) {
  auto suites = run_property_suites(20, o.seed == 1 ? 2024 : o.seed);
  json rows = json::array();
  bool ok = true;
  for (const auto& s : suites) {
    rows.push_back(to_json(s));
    ok = ok && s.passed;
  }
  print({{"suites", rows}, {"passed", ok}}, o);
  return ok ? kOk : kFailed;
}

int cmd_emit(const Options& o) {
  std::cout << fixture_json(builtin_fixture(o.fixture)).dump(2) << "\n";
  return kOk;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("input", o.input, "Function: JSON file, fixture name, or expression in x1..xn")->required();
  sub->add_option("--n", o.n, "Number of variables for expression text");
  sub->add_option("--polyhedron", o.polyhedron, "Declared support of P as a JSON list of points");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toric resolution and oscillatory asymptotics for phases in the E-hat class"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--tolerance", o.tolerance, "Relative quadrature tolerance")->check(CLI::PositiveNumber);
  app.add_option("--nu-max", o.nu_max, "Largest nu in the ray candidate values")->check(CLI::NonNegativeNumber);
  app.add_option("--lambda-max", o.lambda_max, "Largest lambda among negative integer candidates")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--y-max", o.y_max, "Chart scale Y for the coefficient integrals (0: amplitude reach)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--budget-boxes", o.budget_boxes, "Interval boxes for the nondegeneracy search")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-evals", o.max_evals, "Integrand evaluation budget")->check(CLI::PositiveNumber);
  app.add_flag("--deterministic", o.deterministic, "Reproducible output (always the case; kept for scripts)");
  app.add_option("--seed", o.seed, "Seed for sampled checks");
  app.add_option("--amplitude", o.amplitude, "'unit', a JSON object, or a JSON file");
  app.add_option("--cone", o.cone, "Index among the Sigma* cones for the coefficients");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--form", o.form, "Coefficient integral form")->check(CLI::IsMember({"chart", "pullback"}));
  app.add_flag("--assume-nondegenerate", o.assume_nondegenerate,
               "Proceed when nondegeneracy could not be decided");
  app.fallthrough();

  auto* analyze_cmd = app.add_subcommand("analyze", "Polyhedron, d, m, principal face, membership, nondegeneracy");
  auto* fan_cmd = app.add_subcommand("fan", "Normal fan, unimodular subdivision and cone annotations");
  auto* resolve_cmd = app.add_subcommand("resolve", "Resolution charts of every maximal cone");
  auto* poles_cmd = app.add_subcommand("poles", "Candidate poles and order bounds");
  auto* coeff_cmd = app.add_subcommand("coeff", "Leading coefficients of the zeta function and the integral");
  auto* zeta_cmd = app.add_subcommand("zeta", "Local zeta function by quadrature");
  auto* osc_cmd = app.add_subcommand("oscillate", "Oscillatory integral by quadrature");
  auto* fit_cmd = app.add_subcommand("fit", "Decay fit of the oscillatory integral");
  auto* verify_cmd = app.add_subcommand("verify", "Property suites on the built-in fixtures");
  auto* emit_cmd = app.add_subcommand("emit-fixture", "Print a built-in fixture as JSON");

  for (auto* sub : {analyze_cmd, fan_cmd, resolve_cmd, poles_cmd, coeff_cmd, zeta_cmd, osc_cmd, fit_cmd})
    add_common(sub, o);
  auto* s_opt = zeta_cmd->add_option("--s", o.s, "Real s > -1/d");
  auto* eps_opt = zeta_cmd->add_option("--eps", o.eps, "Extrapolate eps^m Z(-1/d + eps) from these eps")
                      ->delimiter(',');
  s_opt->excludes(eps_opt);
  for (auto* sub : {osc_cmd, fit_cmd}) {
    sub->add_option("--t", o.t, "Comma-separated t values")->delimiter(',');
    sub->add_option("--t-range", o.t_range, "lo:hi:count, log-spaced");
  }
  fit_cmd->callback([&] {
    if (o.t.empty() && o.t_range.empty()) o.t_range = "50:5000:12";
  });
  emit_cmd->add_option("name", o.fixture, "Fixture name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (*analyze_cmd) return cmd_analyze(o);
    if (*fan_cmd) return cmd_fan(o);
    if (*resolve_cmd) return cmd_resolve(o);
    if (*poles_cmd) return cmd_poles(o);
    if (*coeff_cmd) return cmd_coeff(o);
    if (*zeta_cmd) return cmd_zeta(o);
    if (*osc_cmd) return cmd_oscillate(o);
    if (*fit_cmd) return cmd_fit(o);
    if (*verify_cmd) return cmd_verify(o);
    if (*emit_cmd) return cmd_emit(o);
  } catch (const InputError& e) {
    std::cerr << "torasc: input error: " << e.what() << "\n";
    return kInput;
  } catch (const DomainError& e) {
    std::cerr << "torasc: invalid request: " << e.what() << "\n";
    return kInput;
  } catch (const RefusalError& e) {
    std::cerr << "torasc: refused: " << e.what() << "\n";
    return kRefused;
  } catch (const BudgetError& e) {
    std::cerr << "torasc: budget exhausted (achieved error " << e.achieved_error() << "): " << e.what() << "\n";
    return kBudget;
  } catch (const std::exception& e) {
    std::cerr << "torasc: internal error: " << e.what() << "\n";
    return kFailed;
  }
  return kFailed;
}
