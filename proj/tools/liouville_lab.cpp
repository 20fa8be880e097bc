// liouville-lab: command-line front end.
//
//   liouville-lab [--config FILE] [--out DIR] [--units rho|beta] [--format json|csv]
//                 [--jobs N] [--seed S] <subcommand> [options]
//
// Exit status: 0 success, 1 rejected inputs, 2 numerical or I/O failure,
// 64 usage error. Failures also print one line to stderr:
//   error kind=<Kind> exit=<code> msg=<text>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "liouville/collapse_experiment.hpp"
#include "liouville/disk_solver.hpp"
#include "liouville/io.hpp"
#include "liouville/mass_curve.hpp"
#include "liouville/mass_relations.hpp"
#include "liouville/radial_shooting.hpp"
#include "liouville/units.hpp"
#include "liouville/vortex_configuration.hpp"

namespace fs = std::filesystem;
using namespace liouville;
using io::fmt;
using io::Json;

namespace {

constexpr int kUsage = 64;

const std::vector<std::string> kSubcommands{"shoot",    "beta",          "mass-curve",    "rho-bar",
                                            "classify", "collapse",      "limit-profile", "blowup-points",
                                            "masses",   "height",        "disk-solve",    "scaling"};

struct Globals {
  std::string config;
  std::string out;
  std::string units = "beta";
  std::string format;
  unsigned jobs = 1;
  std::uint64_t seed = 20240611;
};

// Masses cross the command line in the chosen units; internally beta units.
double mass_out(const Globals& g, double beta) { return g.units == "rho" ? units::rho_from_beta(beta) : beta; }
double mass_in(const Globals& g, double value) { return g.units == "rho" ? units::beta_from_rho(value) : value; }

/// "12.6pi", "12.6*pi", "pi" or a plain number.
double parse_number(const std::string& text) {
  std::string s = text;
  double scale = 1.0;
  for (const std::string suffix : {"*pi", "pi"}) {
    if (s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
      s.erase(s.size() - suffix.size());
      scale = std::numbers::pi;
      break;
    }
  }
  if (s.empty()) return scale;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidInputs, "not a number: " + text);
  }
  if (used != s.size()) fail(ErrorKind::InvalidInputs, "not a number: " + text);
  return v * scale;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  if (out.empty()) fail(ErrorKind::InvalidInputs, "empty list");
  return out;
}

std::optional<std::string> output_dir(const Globals& g) {
  if (const char* env = std::getenv("LIOUVILLE_LAB_OUT"); env && *env) return std::string(env);
  if (!g.out.empty()) return g.out;
  return std::nullopt;
}

/// Writes to <dir>/<name>.<ext> when an output directory is set, else stdout.
void emit(const Globals& g, const std::string& name, const std::string& ext, const std::string& content) {
  if (const auto dir = output_dir(g)) {
    std::error_code ec;
    fs::create_directories(*dir, ec);
    if (ec) fail(ErrorKind::Io, "cannot create " + *dir + ": " + ec.message());
    io::write_file((fs::path(*dir) / (name + "." + ext)).string(), content);
  } else {
    std::cout << content << std::flush;
  }
}

void emit_json(const Globals& g, const std::string& name, const Json& j) { emit(g, name, "json", io::dump_json(j)); }
void emit_csv(const Globals& g, const std::string& name, const io::Csv& c) { emit(g, name, "csv", c.str()); }

bool want_csv(const Globals& g, bool csv_default) {
  if (g.format.empty()) return csv_default;
  return g.format == "csv";
}

Json weight_json(const WeightSpec& w) {
  return Json{{"eps", w.eps}, {"p", w.p}, {"q", w.q}};
}

std::string mass_key(const Globals& g) { return g.units; }

// Flat "key = value" config: each key becomes --key value after the
// subcommand name, so later command-line flags win.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::Io, "cannot read config " + path);
  std::vector<std::string> tokens;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(f, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CLI::ConversionError("config " + path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config")
      throw CLI::ConversionError("config " + path + ":" + std::to_string(lineno) + ": bad key");
    if (value == "true") {
      tokens.push_back("--" + key);
    } else if (value != "false") {
      tokens.push_back("--" + key);
      tokens.push_back(value);
    }
  }
  return tokens;
}

IntegrationControl control_from(double abs_tol, double rel_tol) {
  IntegrationControl c;
  c.abs_tol = abs_tol;
  c.rel_tol = rel_tol;
  c.validate();
  return c;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for singular Liouville equations with collapsing vortices", "liouville-lab"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "flat key = value file mirroring the flags; flags override it");
  app.add_option("--out", g.out, "output directory (LIOUVILLE_LAB_OUT overrides); stdout when unset");
  app.add_option("--units", g.units, "mass units on input and output")->check(CLI::IsMember({"rho", "beta"}));
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--jobs", g.jobs, "worker threads for sweeps")->check(CLI::Range(1u, 256u));
  app.add_option("--seed", g.seed, "seed for randomized checks");

  // shared radial options
  double abs_tol = 1e-10, rel_tol = 1e-9;
  auto tolerances = [&](CLI::App* sub) {
    sub->add_option("--abs-tol", abs_tol, "absolute step tolerance");
    sub->add_option("--rel-tol", rel_tol, "relative step tolerance");
  };

  // shoot / beta
  double eps = 1.0, p = 0.0, q = 0.0, a = 0.0;
  std::optional<double> alpha_opt;
  bool with_derivative = false;
  auto weight_opts = [&](CLI::App* sub) {
    sub->add_option("--eps", eps, "regularization eps >= 0");
    sub->add_option("--p", p, "exponent of (eps + r^2)");
    sub->add_option("--q", q, "exponent of (1 + r^2)");
    sub->add_option("--alpha", alpha_opt, "shorthand for eps = 1, p = alpha, q = 0");
    sub->add_option("--a", a, "central value v(0)")->required();
    tolerances(sub);
  };
  auto weight_from_opts = [&] {
    WeightSpec w = alpha_opt ? WeightSpec::mean_field(*alpha_opt) : WeightSpec::regularized(eps, p, q);
    w.validate();
    return w;
  };
  auto* shoot = app.add_subcommand("shoot", "integrate the radial Cauchy problem and print the trace");
  weight_opts(shoot);
  bool kelvin_flag = false;
  shoot->add_flag("--kelvin", kelvin_flag, "print the inverted trace instead");
  auto* beta_cmd = app.add_subcommand("beta", "total mass of the radial solution");
  weight_opts(beta_cmd);
  beta_cmd->add_flag("--derivative", with_derivative, "also report beta'(a) and the zero structure");

  // mass curve family
  double alpha = 2.0, a_lo = -30.0, a_hi = 30.0;
  std::size_t n = 200, targets = 60;
  auto* curve_cmd = app.add_subcommand("mass-curve", "sample a -> beta_alpha(a) for the weight (1 + r^2)^alpha");
  auto* rho_bar = app.add_subcommand("rho-bar", "interior minimizer of the mass curve");
  auto* classify_cmd = app.add_subcommand("classify", "solvability and multiplicity of the radial problem");
  for (auto* sub : {curve_cmd, rho_bar, classify_cmd}) {
    sub->add_option("--alpha", alpha, "weight exponent")->required();
    sub->add_option("--a-lo", a_lo, "left end of the sampled window");
    sub->add_option("--a-hi", a_hi, "right end of the sampled window");
    sub->add_option("--n", n, "samples")->check(CLI::Range(std::size_t{3}, std::size_t{100000}));
    tolerances(sub);
  }
  classify_cmd->add_option("--targets", targets, "mass targets probed for multiplicity");

  // collapse / limit profile
  std::string mass_text;
  std::string eps_text = "1e-2,1e-3,1e-4,1e-5,1e-6,1e-7,1e-8,1e-9,1e-10,1e-11,1e-12";
  std::optional<double> beta_bar_opt;
  auto* collapse = app.add_subcommand("collapse", "follow the radial solution of fixed mass as eps -> 0");
  collapse->add_option("--alpha", alpha, "vortex exponent, 1 < alpha < 3")->required();
  collapse->add_option("--mass", mass_text, "total mass in --units (accepts a 'pi' suffix, e.g. 39.584 or 6.3pi)")
      ->required();
  collapse->add_option("--eps", eps_text, "comma-separated decreasing eps schedule");
  collapse->add_option("--beta-bar", beta_bar_opt, "skip the sweep and use this minimum mass (beta units)");
  tolerances(collapse);
  auto* limit = app.add_subcommand("limit-profile", "eps = 0 limit of the collapse, shifted by the 8pi bubble");
  limit->add_option("--alpha", alpha, "vortex exponent")->required();
  limit->add_option("--mass", mass_text, "total mass in --units")->required();
  tolerances(limit);

  // vortex configuration and mass algebra
  double alpha1 = 1.0, alpha2 = 1.0;
  int m = 1, newton_starts = 0;
  bool extrapolate = false;
  auto* points = app.add_subcommand("blowup-points", "blow-up point configuration for vortices at +1 and -1");
  points->add_option("--alpha1", alpha1, "multiplicity at +1")->required();
  points->add_option("--alpha2", alpha2, "multiplicity at -1")->required();
  points->add_option("--m", m, "number of blow-up points")->required();
  points->add_flag("--extrapolate", extrapolate, "allow non-integer multiplicities");
  points->add_option("--newton-starts", newton_starts, "random Newton restarts used as a cross-check");
  int ialpha1 = 1, ialpha2 = 1;
  std::optional<double> m_v;
  auto* masses = app.add_subcommand("masses", "admissible local masses and the Pohozaev roots");
  masses->add_option("--alpha1", ialpha1, "multiplicity at +1")->required();
  masses->add_option("--alpha2", ialpha2, "multiplicity at -1")->required();
  masses->add_option("--m-v", m_v, "local mass at the t-scale (beta units) for the Pohozaev roots");
  std::string height_input;
  bool height_template = false;
  auto* height = app.add_subcommand("height", "leading-order bubble heights from a HeightInputs JSON file");
  height->add_option("--input", height_input, "HeightInputs JSON");
  height->add_flag("--template", height_template, "print an example input instead");

  // disk solver
  double t_vortex = 0.0, s_min = std::log(1e-4), boundary_c = 0.0, lambda_b = 2.0, h_s = 0.05;
  int n_r = 160, n_theta = 32;
  std::string manufactured, schedule_text = "0.2,0.1,0.05,0.025";
  double max_newton = 60, disk_tol = 1e-10;
  auto* disk = app.add_subcommand("disk-solve", "Newton solve of Delta u + W e^u = 0 on the unit disk");
  disk->add_option("--alpha1", alpha1, "vortex multiplicity at +t");
  disk->add_option("--alpha2", alpha2, "vortex multiplicity at -t");
  disk->add_option("--t", t_vortex, "vortex half-distance");
  disk->add_option("--s-min", s_min, "log of the innermost radius");
  disk->add_option("--n-r", n_r, "radial intervals");
  disk->add_option("--n-theta", n_theta, "angles (even)");
  disk->add_option("--c", boundary_c, "Dirichlet value on r = 1");
  disk->add_option("--manufactured", manufactured, "exact-solution test instead of the vortex problem")
      ->check(CLI::IsMember({"bubble", "singular"}));
  disk->add_option("--lambda", lambda_b, "scale of the manufactured bubble");
  disk->add_option("--tol", disk_tol, "residual tolerance");
  disk->add_option("--max-iter", max_newton, "Newton iteration cap");
  auto* scaling = app.add_subcommand("scaling", "EXPLORATORY continuation in t of the symmetric vortex problem");
  double scaling_alpha = 1.0;
  scaling->add_option("--alpha", scaling_alpha, "alpha1 = alpha2");
  scaling->add_option("--schedule", schedule_text, "comma-separated decreasing t values in (0, 0.5]");
  scaling->add_option("--c", boundary_c, "Dirichlet value on r = 1");
  scaling->add_option("--h-s", h_s, "radial spacing in log r");
  scaling->add_option("--n-theta", n_theta, "angles (even)");
  scaling->add_option("--tol", disk_tol, "residual tolerance");

  // Inject config tokens right after the subcommand name.
  std::vector<std::string> args(argv + 1, argv + argc);
  {
    std::string cfg;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) cfg = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) cfg = args[i].substr(9);
    }
    if (!cfg.empty()) {
      const auto tokens = config_tokens(cfg);
      auto it = std::find_first_of(args.begin(), args.end(), kSubcommands.begin(), kSubcommands.end());
      if (it != args.end()) args.insert(it + 1, tokens.begin(), tokens.end());
    }
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error kind=Usage exit=" << kUsage << " msg=" << e.what() << "\n";
    std::cerr << app.help();
    return kUsage;
  }

  const IntegrationControl ctrl = control_from(abs_tol, rel_tol);

  if (*shoot) {
    const WeightSpec w = weight_from_opts();
    RadialSolution sol = integrate_cauchy(w, a, ctrl);
    const MassResult mr = mass_of(sol, ctrl);
    if (kelvin_flag) sol = kelvin(sol, mr.beta);
    if (want_csv(g, true)) {
      io::Csv csv{{"t", "r", "v", "slope", "mass"}, {}};
      for (std::size_t i = 0; i < sol.size(); ++i)
        csv.add({fmt(sol.grid[i]), fmt(sol.radius(i)), fmt(sol.v[i]), fmt(mass_out(g, sol.slope[i])),
                 fmt(mass_out(g, sol.mass[i]))});
      emit_csv(g, "shoot", csv);
    } else {
      const auto res = residuals(sol, ctrl);
      emit_json(g, "shoot",
                Json{{"weight", weight_json(w)}, {"a", a}, {"kelvin", kelvin_flag}, {"units", g.units},
                     {mass_key(g), mass_out(g, mr.beta)}, {"converged", mr.converged}, {"points", sol.size()},
                     {"ode_residual", res.ode}, {"slope_mass_residual", res.slope_mass},
                     {"t", sol.grid}, {"v", sol.v}});
    }
    return 0;
  }

  if (*beta_cmd) {
    const WeightSpec w = weight_from_opts();
    const MassResult mr = beta(w, a, ctrl);
    Json j{{"weight", weight_json(w)}, {"a", a}, {"units", g.units}, {mass_key(g), mass_out(g, mr.beta)},
           {"tail", mass_out(g, mr.tail)}, {"converged", mr.converged}, {"r_cut", mr.r_cut}};
    if (with_derivative) {
      const auto lin = linearized(w, a, ctrl);
      const auto zs = zero_structure(lin, lin.sol, ctrl);
      auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
      j["derivative"] = mass_out(g, lin.beta_prime);
      j["phi_infty"] = lin.phi_infty;
      j["zero_structure"] = Json{{"first_zero", opt(zs.first_zero)}, {"first_crit", opt(zs.first_crit)},
                                 {"last_crit", opt(zs.last_crit)},   {"last_zero", opt(zs.last_zero)},
                                 {"zero_count", zs.zero_count},      {"crit_count", zs.crit_count},
                                 {"ordered", zs.ordered()}};
    }
    emit_json(g, "beta", j);
    return 0;
  }

  if (*curve_cmd) {
    const MassCurve curve = sweep(alpha, a_lo, a_hi, n, ctrl, g.jobs);
    if (want_csv(g, true)) {
      io::Csv csv{{"a", g.units, "converged", "tail"}, {}};
      for (const auto& s : curve.samples)
        csv.add({fmt(s.a), fmt(mass_out(g, s.beta)), s.converged ? "1" : "0", fmt(mass_out(g, s.tail))});
      emit_csv(g, "mass-curve", csv);
    } else {
      Json samples = Json::array();
      for (const auto& s : curve.samples)
        samples.push_back(Json{{"a", s.a}, {mass_key(g), mass_out(g, s.beta)}, {"converged", s.converged}});
      Json j{{"alpha", alpha}, {"units", g.units}, {"monotone", is_monotone(curve)}, {"samples", samples}};
      j["a_star"] = curve.a_star ? Json(*curve.a_star) : Json(nullptr);
      j["minimum"] = curve.beta_bar ? Json(mass_out(g, *curve.beta_bar)) : Json(nullptr);
      emit_json(g, "mass-curve", j);
    }
    return 0;
  }

  if (*rho_bar) {
    MassCurve curve = sweep(alpha, a_lo, a_hi, n, ctrl, g.jobs);
    const Minimizer mn = find_min(curve, ctrl);
    emit_json(g, "rho-bar",
              Json{{"alpha", alpha}, {"units", g.units}, {"a_star", mn.a_star}, {"minimum", mass_out(g, mn.beta_bar)},
                   {"derivative_at_min", mass_out(g, mn.beta_prime)},
                   {"window", Json{{"a_lo", a_lo}, {"a_hi", a_hi}, {"n", n}}}});
    return 0;
  }

  if (*classify_cmd) {
    const SolvabilityReport r = classify(alpha, ctrl, SweepOptions{a_lo, a_hi, n, g.jobs}, targets);
    Json ranges = Json::array();
    for (const auto& mr : r.multiplicity)
      ranges.push_back(Json{{"lo", mass_out(g, mr.beta_lo)}, {"hi", mass_out(g, mr.beta_hi)}, {"count", mr.count}});
    emit_json(g, "classify",
              Json{{"alpha", alpha},
                   {"units", g.units},
                   {"regime", r.regime == Regime::SuperUnit ? "alpha > 1" : "alpha <= 1"},
                   {"degenerate", r.degenerate},
                   {"image", Json{{"lo", mass_out(g, r.beta_lo)}, {"hi", mass_out(g, r.beta_hi)},
                                  {"lo_closed", r.lo_closed}, {"hi_closed", r.hi_closed}}},
                   {"multiplicity", ranges},
                   {"note", "counts are lower bounds at the sampling resolution"},
                   {"sampling", Json{{"a_lo", a_lo}, {"a_hi", a_hi}, {"n", n}, {"targets", targets}}}});
    return 0;
  }

  if (*collapse) {
    const double rho = units::rho_from_beta(mass_in(g, parse_number(mass_text)));
    CollapseOptions opt;
    opt.jobs = g.jobs;
    const CollapseReport rep = run_collapse(alpha, rho, parse_list(eps_text), ctrl, opt, beta_bar_opt);
    if (want_csv(g, false)) {
      io::Csv csv{{"eps", "found", "a", g.units, "r_probe", "plateau", "plateau_alt", "roots"}, {}};
      for (const auto& r : rep.run.records)
        csv.add({fmt(r.eps), r.found ? "1" : "0", fmt(r.a_found), fmt(mass_out(g, r.beta_check)), fmt(r.r_probe),
                 fmt(mass_out(g, r.plateau)), fmt(mass_out(g, r.plateau_alt)), std::to_string(r.roots.size())});
      emit_csv(g, "collapse", csv);
    } else {
      Json recs = Json::array();
      for (const auto& r : rep.run.records)
        recs.push_back(Json{{"eps", r.eps},
                            {"found", r.found},
                            {"a", r.a_found},
                            {mass_key(g), mass_out(g, r.beta_check)},
                            {"r_probe", r.r_probe},
                            {"plateau", mass_out(g, r.plateau)},
                            {"plateau_alt", mass_out(g, r.plateau_alt)},
                            {"roots", r.roots}});
      Json j{{"header", rep.header},
             {"alpha", alpha},
             {"rho", rho},
             {"a_pow", rep.run.a_pow},
             {"units", g.units},
             {"concentrated_target", mass_out(g, 4.0)},
             {"records", recs}};
      if (rep.limit_profile) {
        const auto& lp = *rep.limit_profile;
        j["limit_profile"] = Json{{"a", lp.a}, {mass_key(g), mass_out(g, mass_of(lp, ctrl).beta)}};
        const auto& last = rep.run.records.back();
        if (last.found) j["limit_mismatch_0.1_to_100"] = limit_mismatch(last.profile, lp, 0.1, 100.0, ctrl);
      }
      emit_json(g, "collapse", j);
    }
    return 0;
  }

  if (*limit) {
    const double rho = units::rho_from_beta(mass_in(g, parse_number(mass_text)));
    const RadialSolution lp = limit_profile(alpha, rho, ctrl);
    io::Csv csv{{"t", "r", "eta", "mass"}, {}};
    for (std::size_t i = 0; i < lp.size(); ++i)
      csv.add({fmt(lp.grid[i]), fmt(lp.radius(i)), fmt(lp.v[i]), fmt(mass_out(g, lp.mass[i]))});
    if (want_csv(g, true)) {
      emit_csv(g, "limit-profile", csv);
    } else {
      emit_json(g, "limit-profile",
                Json{{"alpha", alpha}, {"rho", rho}, {"a", lp.a}, {"units", g.units},
                     {mass_key(g), mass_out(g, mass_of(lp, ctrl).beta)}});
    }
    return 0;
  }

  if (*points) {
    const VortexParams params{alpha1, alpha2, m, extrapolate};
    const BlowupConfiguration cfg = find_points(params);
    Json pts = Json::array();
    for (auto z : cfg.points) pts.push_back(Json::array({z.real(), z.imag()}));
    Json j{{"alpha1", alpha1}, {"alpha2", alpha2}, {"m", m},
           {"extrapolated", extrapolate}, {"symmetric_functions", cfg.sym}, {"polynomial_ascending", cfg.poly},
           {"points", pts}, {"residual", cfg.residual}};
    if (newton_starts > 0) {
      std::mt19937_64 rng(g.seed);
      int converged = 0;
      double worst = 0.0;
      for (int s = 0; s < newton_starts; ++s) {
        try {
          const auto got = newton_oracle(params, random_start(m, rng));
          worst = std::max(worst, set_distance(got, cfg.points));
          ++converged;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::NewtonDiverged) throw;
        }
      }
      j["newton_check"] = Json{{"starts", newton_starts}, {"seed", g.seed}, {"converged", converged},
                               {"max_set_distance", worst}};
    }
    emit_json(g, "blowup-points", j);
    return 0;
  }

  if (*masses) {
    Json list = Json::array();
    for (const auto& [mm, sigma] : admissible_masses(ialpha1, ialpha2))
      list.push_back(Json::array({mm, mass_out(g, sigma)}));
    Json j{{"alpha1", ialpha1}, {"alpha2", ialpha2}, {"units", g.units}, {"admissible", list},
           {"concentration_threshold", mass_out(g, pohozaev_double_root(ialpha1, ialpha2))}};
    if (m_v) {
      const auto [s1, s2] = pohozaev_sigma(*m_v, ialpha1, ialpha2);
      j["pohozaev_roots"] = Json::array({mass_out(g, s1), mass_out(g, s2)});
    }
    emit_json(g, "masses", j);
    return 0;
  }

  if (*height) {
    if (height_template) {
      HeightInputs in{10.0 * std::numbers::pi, 1, 1, 1, 0.2, {1.0}, {{0.0}}, {{0.0}}, {0.0}, 0.1};
      emit_json(g, "height-template", io::to_json(in));
      return 0;
    }
    if (height_input.empty()) throw CLI::RequiredError("--input");
    const HeightInputs in = io::height_inputs_from_json(io::parse_json(io::read_file(height_input), height_input));
    std::vector<double> heights;
    for (int i = 0; i < in.m; ++i) heights.push_back(predict_height(in, static_cast<std::size_t>(i)));
    emit_json(g, "height",
              Json{{"log_t_coefficient", height_log_t_coefficient(in.alpha1, in.alpha2, in.m)},
                   {"lambda", heights},
                   {"note", "leading order; the O(t log t) remainder is not estimated"}});
    return 0;
  }

  if (*disk) {
    DiskProblem pb;
    pb.mesh = LogPolarMesh{s_min, n_r, n_theta};
    DiskControl dc;
    dc.tol = disk_tol;
    dc.max_iter = static_cast<int>(max_newton);
    std::vector<double> init;
    std::function<double(double, double)> exact;
    if (!manufactured.empty()) {
      const double al = manufactured == "singular" ? 1.0 : 0.0;
      pb.alpha1 = al;
      pb.alpha2 = 0.0;
      const double lam = lambda_b;
      exact = [al, lam](double x, double y) {
        const double r2 = x * x + y * y;
        return std::log(8.0 * (al + 1) * (al + 1) * lam * lam / std::pow(1.0 + lam * lam * std::pow(r2, al + 1), 2));
      };
      pb.boundary = [exact](double th) { return exact(std::cos(th), std::sin(th)); };
      init = sample(pb.mesh, [&](double x, double y) { return exact(x, y) + 0.5 * (1.0 - x * x - y * y); });
    } else {
      pb.alpha1 = alpha1;
      pb.alpha2 = alpha2;
      pb.t_vortex = t_vortex;
      const double c = boundary_c;
      pb.boundary = [c](double) { return c; };
      pb.validate();
      init = t_vortex > 0.0 ? bubble_guess(pb, c) : std::vector<double>(pb.mesh.nodes(), c);
    }
    const DiskSolution sol = solve(pb, init, dc);
    const auto mb = mass_balance(pb, sol);
    Json j = io::grid_sidecar(pb, sol, "disk-solve.bin");
    j["units"] = g.units;
    j[mass_key(g)] = mass_out(g, units::beta_from_rho(mb.mass));
    j["boundary_flux"] = mass_out(g, units::beta_from_rho(mb.flux));
    j["mass_balance_rel"] = mb.relative();
    j["pohozaev_imbalance_r0.5"] = pohozaev_residual(pb, sol, 0.5);
    if (exact) j["sup_error"] = sup_error(sol, exact);
    const std::string dir = output_dir(g).value_or(".");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::Io, "cannot create " + dir);
    io::write_grid((fs::path(dir) / "disk-solve").string(), pb, sol);
    io::write_file((fs::path(dir) / "disk-solve.json").string(), io::dump_json(j));
    if (!output_dir(g)) std::cout << io::dump_json(j);
    return 0;
  }

  if (*scaling) {
    DiskProblem base;
    base.alpha1 = base.alpha2 = scaling_alpha;
    ScalingOptions opt;
    opt.boundary_c = boundary_c;
    opt.h_s = h_s;
    opt.n_theta = n_theta;
    DiskControl dc;
    dc.tol = disk_tol;
    const ScalingReport rep = continuation_in_t(base, parse_list(schedule_text), dc, opt);
    if (want_csv(g, true)) {
      io::Csv csv{{"status", "t", "lambda", "combination", "m", "centre_x", "centre_y", g.units, "pohozaev",
                   "pohozaev_mass", "newton_iters", "residual"},
                  {}};
      for (const auto& s : rep.steps)
        csv.add({"EXPLORATORY", fmt(s.t), fmt(s.lambda), fmt(s.combination), std::to_string(s.m),
                 fmt(s.centre.real()), fmt(s.centre.imag()), fmt(mass_out(g, units::beta_from_rho(s.mass))),
                 fmt(s.pohozaev), fmt(mass_out(g, units::beta_from_rho(s.pohozaev_mass))),
                 std::to_string(s.newton_iters), fmt(s.residual)});
      emit_csv(g, "scaling", csv);
    } else {
      Json steps = Json::array();
      for (const auto& s : rep.steps)
        steps.push_back(Json{{"t", s.t}, {"lambda", s.lambda}, {"combination", s.combination}, {"m", s.m},
                             {"centre", Json::array({s.centre.real(), s.centre.imag()})},
                             {mass_key(g), mass_out(g, units::beta_from_rho(s.mass))}, {"pohozaev", s.pohozaev},
                             {"newton_iters", s.newton_iters}, {"residual", s.residual}});
      emit_json(g, "scaling",
                Json{{"label", rep.label}, {"alpha1", rep.alpha1}, {"alpha2", rep.alpha2}, {"c", rep.boundary_c},
                     {"steps", steps}, {"spread", rep.spread()}, {"total_variation", rep.total_variation()},
                     {"branch_lost", rep.branch_lost}, {"lost_at", rep.lost_at}, {"lost_reason", rep.lost_reason}});
    }
    require_complete(rep);
    return 0;
  }
  return kUsage;
}

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error kind=Usage exit=" << kUsage << " msg=" << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    const int code = exit_code(e.kind());
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::cerr << "error kind=" << to_string(e.kind()) << " exit=" << code << " msg=" << msg << "\n";
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error kind=Internal exit=2 msg=" << e.what() << "\n";
    return 2;
  }
}
