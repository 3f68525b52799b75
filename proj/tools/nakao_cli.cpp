#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nakao/exponents.hpp"
#include "nakao/experiments.hpp"
#include "nakao/iteration.hpp"
#include "nakao/quadrature.hpp"
#include "nakao/solver.hpp"
#include "nakao/testfn.hpp"
#include "nakao/version.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace nakao;

namespace {

constexpr int kExitInvalidInput = 2;
constexpr int kExitNumericalFailure = 3;

std::string format_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw std::invalid_argument("unknown key in " + where + ": " + item.key());
  }
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  return j;
}

solver::SimConfig parse_sim_config(const json& j, long& seed) {
  check_keys(j,
             {"p", "q", "n", "R", "eps", "nx", "cfl", "t_max", "blowup_threshold", "track_every",
              "mode", "robustness_factor", "seed"},
             "simulation config");
  for (const char* k : {"p", "q", "n"})
    if (!j.contains(k)) throw std::invalid_argument(std::string("missing config key: ") + k);

  solver::SimConfig cfg;
  cfg.params.p = j.at("p").get<double>();
  cfg.params.q = j.at("q").get<double>();
  cfg.params.n = j.at("n").get<int>();
  cfg.params.R = j.value("R", 1.0);
  cfg.params.eps = j.value("eps", 0.3);
  cfg.nx = j.value("nx", cfg.nx);
  cfg.cfl = j.value("cfl", cfg.cfl);
  cfg.t_max = j.value("t_max", cfg.t_max);
  cfg.blowup_threshold = j.value("blowup_threshold", cfg.blowup_threshold);
  cfg.track_every = j.value("track_every", cfg.track_every);
  cfg.mode = solver::mode_from_string(j.value("mode", std::string("full")));
  cfg.robustness_factor = j.value("robustness_factor", cfg.robustness_factor);
  seed = j.value("seed", 0L);
  cfg.validate();
  return cfg;
}

json sim_config_json(const solver::SimConfig& cfg, long seed) {
  json j;
  j["p"] = cfg.params.p;
  j["q"] = cfg.params.q;
  j["n"] = cfg.params.n;
  j["R"] = cfg.params.R;
  j["eps"] = cfg.params.eps;
  j["nx"] = cfg.nx;
  j["cfl"] = cfg.cfl;
  j["t_max"] = cfg.t_max;
  j["blowup_threshold"] = cfg.blowup_threshold;
  j["track_every"] = cfg.track_every;
  j["mode"] = solver::to_string(cfg.mode);
  j["robustness_factor"] = cfg.robustness_factor;
  j["seed"] = seed;
  return j;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string csv_header_comment(const json& config) {
  json meta;
  meta["version"] = kVersion;
  meta["config"] = config;
  return "# " + meta.dump() + "\n";
}

// ---------------------------------------------------------------- region

int cmd_region(double p, double q, int n, double boundary_eps) {
  ProblemParams params{p, q, n, 1.0, 1.0};
  const RegionReport rep = exponents::curve_values(params, boundary_eps);

  json out;
  out["version"] = kVersion;
  out["p"] = p;
  out["q"] = q;
  out["n"] = n;
  if (rep.glassey.is_infinite())
    out["glassey"] = "inf";
  else
    out["glassey"] = rep.glassey.value();
  out["wakasugi_holds"] = rep.wakasugi_holds;
  out["nakao_alpha"] = rep.nakao_alpha;
  out["wave_alpha"] = rep.wave_alpha;
  out["shrift_alpha"] = rep.shrift_alpha;
  out["blowup_condition_holds"] = rep.blowup_condition_holds;
  if (rep.lifespan_exponent) out["lifespan_exponent"] = *rep.lifespan_exponent;
  out["t1"] = rep.t1;
  out["t2"] = rep.t2;
  out["on_boundary"] = rep.on_boundary;
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------- iterate

int cmd_iterate(double p, double q, int n, double R, double eps, int j_max, double c1_t_max,
                const std::string& out_dir) {
  ProblemParams params{p, q, n, R, eps};
  params.validate();
  if (!exponents::blowup_condition(params))
    throw std::domain_error("parameters lie outside the blow-up region (pq >= Glassey exponent)");
  if (j_max < 1) throw std::invalid_argument("j-max must be >= 1");

  const auto c1est = testfn::c1_estimate(n, R, c1_t_max);
  iteration::DataIntegrals data;
  data.u1_phi = testfn::bump_phi_integral(n, R);
  data.v1_phi = data.u1_phi;
  data.u0_plus_u1_phi = 2.0 * data.u1_phi;
  const auto ledger = iteration::constants_ledger(params, c1est.c1, data);

  json cfg;
  cfg["p"] = p;
  cfg["q"] = q;
  cfg["n"] = n;
  cfg["R"] = R;
  cfg["eps"] = eps;
  cfg["j_max"] = j_max;
  cfg["c1_grid_t_max"] = c1est.t_max;
  cfg["c1_grid_dt"] = c1est.dt_grid;

  // Sequence CSV: recursion values plus parity-matched closed forms.
  std::ostringstream csv;
  csv << csv_header_comment(cfg);
  csv << "j,alpha_j,a_j,beta_j,b_j,alpha_cf,a_cf,beta_cf,b_cf,logD_j,logQ_j,L_j\n";
  iteration::IterationState s = iteration::first_terms(params, ledger);
  for (int j = 1; j <= j_max; ++j) {
    if (j > 1) s = iteration::recursion_step(s, params, ledger);
    const auto [alpha_cf, a_cf] = iteration::closed_form_alpha_a(j, params);
    const auto [beta_cf, b_cf] = iteration::closed_form_beta_b(j, params);
    csv << j;
    for (double v : {s.alpha, s.a, s.beta, s.b, alpha_cf, a_cf, beta_cf, b_cf,
                     s.D.log_magnitude(), s.Q.log_magnitude(), s.L_j})
      csv << ',' << format_sig(v, 12);
    csv << '\n';
  }

  json out;
  out["version"] = kVersion;
  out["config"] = cfg;
  out["C1"] = ledger.C1;
  out["C2"] = ledger.C2;
  out["C3"] = ledger.C3;
  out["C4"] = ledger.C4;
  out["logD1"] = ledger.D1.log_magnitude();
  out["logQ1"] = ledger.Q1.log_magnitude();
  out["B0"] = ledger.B0;
  out["B1"] = ledger.B1;
  out["M"] = ledger.M;
  out["logE0"] = ledger.E0.log_magnitude();
  out["logE1"] = ledger.E1.log_magnitude();
  out["logE2"] = ledger.E2.log_magnitude();
  out["logE3"] = ledger.E3.log_magnitude();
  out["logE4"] = ledger.E4->log_magnitude();
  if (ledger.E5)
    out["logE5"] = ledger.E5->log_magnitude();
  else
    out["logE5"] = nullptr;
  out["j0"] = ledger.j0;
  out["j1"] = ledger.j1;
  out["L"] = ledger.L;
  out["T1"] = ledger.T1;
  out["T2"] = ledger.T2;
  out["eps0"] = ledger.eps0;
  out["int_u1_phi"] = data.u1_phi;
  out["int_v1_phi"] = data.v1_phi;
  out["int_u0_plus_u1_phi"] = data.u0_plus_u1_phi;
  if (eps <= ledger.eps0) {
    out["predicted_blowup_time"] = iteration::predicted_blowup_time(params, ledger);
  } else {
    out["predicted_blowup_time"] = nullptr;
    out["note"] = "eps exceeds eps0; the envelope divergence argument does not apply";
  }

  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "iterate_sequence.csv", csv.str());
  write_file(fs::path(out_dir) / "iterate_constants.json", out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------- phi

int cmd_phi(int n, double r, double t, bool has_t) {
  json out;
  out["version"] = kVersion;
  out["n"] = n;
  out["r"] = r;
  const LogValue p = testfn::phi(n, r);
  out["log_phi"] = p.log_magnitude();
  if (p.log_magnitude() < 700.0)
    out["phi"] = p.to_double();
  else
    out["phi"] = nullptr;  // overflows double; use log_phi
  if (has_t) {
    out["t"] = t;
    const LogValue ps = testfn::psi(n, t, r);
    out["log_psi"] = ps.log_magnitude();
    if (ps.log_magnitude() < 700.0)
      out["psi"] = ps.to_double();
    else
      out["psi"] = nullptr;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------- verify-testfn

int cmd_verify_testfn(int n, double R, double t_max) {
  const auto c1 = testfn::c1_estimate(n, R, t_max);
  const std::vector<double> radii = {0.5, 1.0, 2.0, 5.0, 10.0};
  const double eigen = testfn::verify_laplacian_eigen(n, radii, 1e-3);
  const double flat = testfn::asymptotic_flatness(n);

  json out;
  out["version"] = kVersion;
  out["n"] = n;
  out["R"] = R;
  out["c1"] = c1.c1;
  out["c1_grid"] = {{"t_max", c1.t_max}, {"dt", c1.dt_grid}};
  out["c1_last_decade_variation"] = c1.last_decade_variation;
  out["max_eigen_residual"] = eigen;
  out["eigen_grid"] = {{"radii", radii}, {"h", 1e-3}};
  out["asymptotic_flatness"] = flat;
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------- simulate

std::string trace_csv(const solver::FunctionalTrace& trace, const json& cfg) {
  std::ostringstream csv;
  csv << csv_header_comment(cfg);
  csv << "t,F1,F2,sup_ut,sup_vt,support_radius\n";
  for (const auto& s : trace.samples) {
    csv << format_sig(s.t, 12) << ',' << format_sig(s.F1, 12) << ',' << format_sig(s.F2, 12)
        << ',' << format_sig(s.sup_ut, 12) << ',' << format_sig(s.sup_vt, 12) << ','
        << format_sig(s.support_radius, 12) << '\n';
  }
  return csv.str();
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
  long seed = 0;
  const solver::SimConfig cfg = parse_sim_config(load_config(config_path), seed);
  const json cfg_json = sim_config_json(cfg, seed);

  const solver::FunctionalTrace trace = solver::run(cfg);
  const auto robust_verdict =
      solver::detect_blowup(trace, cfg.blowup_threshold * cfg.robustness_factor);

  json out;
  out["version"] = kVersion;
  out["config"] = cfg_json;
  out["blown_up"] = trace.blowup.has_value();
  if (trace.blowup) {
    out["T_num"] = trace.blowup->T_num;
    out["trigger"] = trace.blowup->trigger;
  } else {
    out["T_num"] = nullptr;
    out["trigger"] = nullptr;
  }
  out["threshold"] = cfg.blowup_threshold;
  if (trace.blowup && robust_verdict) {
    out["threshold_robust"] =
        std::abs(robust_verdict->T_num - trace.blowup->T_num) <= 0.05 * trace.blowup->T_num;
    out["T_num_high_threshold"] = robust_verdict->T_num;
  } else {
    out["threshold_robust"] = trace.blowup ? json(false) : json(nullptr);
  }
  out["t_end"] = trace.t_end;
  out["steps"] = trace.steps;
  out["finite_end"] = trace.finite_end;
  out["data_term_u"] = trace.data_term_u;
  out["data_term_v"] = trace.data_term_v;

  if (!trace.samples.empty()) {
    const auto& first = trace.samples.front();
    const auto& last = trace.samples.back();
    json energy;
    energy["e_u_initial"] = first.e_u;
    energy["e_v_initial"] = first.e_v;
    energy["e_u_final"] = last.e_u;
    energy["e_v_final"] = last.e_v;
    if (cfg.mode != solver::Mode::full) {
      double drift = 0.0;
      for (const auto& s : trace.samples)
        drift = std::max(drift, std::abs(s.e_v - first.e_v) / std::max(first.e_v, 1e-300));
      energy["e_v_drift_rel"] = drift;
    }
    out["energy"] = energy;
  }

  try {
    const auto rep = solver::verify_identities(trace, cfg);
    out["identities"] = {{"f1_residual", rep.f1_residual},
                         {"f2_residual", rep.f2_residual},
                         {"samples_used", rep.samples_used},
                         {"window_t_lo", rep.window_t_lo},
                         {"window_t_hi", rep.window_t_hi}};
  } catch (const std::invalid_argument&) {
    out["identities"] = nullptr;
  }

  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "trace.csv", trace_csv(trace, cfg_json));
  write_file(fs::path(out_dir) / "verdict.json", out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(const std::string& config_path, const std::string& out_dir) {
  const json j = load_config(config_path);
  check_keys(j, {"base", "eps_count", "eps_min", "eps_max", "repeats_per_eps", "slack", "seed"},
             "sweep config");
  if (!j.contains("base")) throw std::invalid_argument("missing config key: base");

  experiments::SweepConfig cfg;
  long seed = 0;
  cfg.base = parse_sim_config(j.at("base"), seed);
  cfg.eps_count = j.value("eps_count", cfg.eps_count);
  cfg.eps_min = j.value("eps_min", cfg.eps_min);
  cfg.eps_max = j.value("eps_max", cfg.eps_max);
  cfg.repeats_per_eps = j.value("repeats_per_eps", cfg.repeats_per_eps);
  cfg.slack = j.value("slack", cfg.slack);
  cfg.validate();

  json cfg_json;
  cfg_json["base"] = sim_config_json(cfg.base, seed);
  cfg_json["eps_count"] = cfg.eps_count;
  cfg_json["eps_min"] = cfg.eps_min;
  cfg_json["eps_max"] = cfg.eps_max;
  cfg_json["repeats_per_eps"] = cfg.repeats_per_eps;
  cfg_json["slack"] = cfg.slack;
  cfg_json["seed"] = seed;

  const double theoretical = exponents::lifespan_exponent(cfg.base.params);
  const auto points = experiments::run_sweep(cfg);

  std::ostringstream csv;
  csv << csv_header_comment(cfg_json);
  csv << "eps,T_num,blown_up,robust,censored\n";
  std::ostringstream dat;
  dat << csv_header_comment(cfg_json);
  std::vector<std::pair<double, double>> fit_points;
  int censored = 0;
  for (const auto& pt : points) {
    csv << format_sig(pt.eps, 12) << ','
        << (pt.T_num ? format_sig(*pt.T_num, 12) : std::string("nan")) << ','
        << (pt.blown_up ? 1 : 0) << ',' << (pt.robust ? 1 : 0) << ',' << (pt.censored ? 1 : 0)
        << '\n';
    if (pt.T_num) {
      fit_points.emplace_back(pt.eps, *pt.T_num);
      dat << format_sig(std::log(1.0 / pt.eps), 12) << ' ' << format_sig(std::log(*pt.T_num), 12)
          << '\n';
    }
    if (pt.censored) ++censored;
  }

  const auto mono = experiments::check_monotonicity(points);

  json out;
  out["version"] = kVersion;
  out["config"] = cfg_json;
  out["theoretical_exponent"] = theoretical;
  out["censored_count"] = censored;
  out["points_total"] = static_cast<int>(points.size());
  out["monotone"] = mono.monotone;
  out["monotone_violations"] = mono.violations;
  if (fit_points.size() >= 4) {
    const auto fit = experiments::fit_power_law(fit_points, theoretical, cfg.slack);
    out["slope"] = fit.slope;
    out["intercept"] = fit.intercept;
    out["r_squared"] = fit.r_squared;
    out["consistent"] = fit.consistent;
    out["slack"] = fit.slack;
    out["points_used"] = fit.points_used;
  } else {
    out["slope"] = nullptr;
    out["intercept"] = nullptr;
    out["r_squared"] = nullptr;
    out["consistent"] = nullptr;
    out["slack"] = cfg.slack;
    out["points_used"] = static_cast<int>(fit_points.size());
    out["reason"] = "insufficient blow-ups";
  }

  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "sweep.csv", csv.str());
  write_file(fs::path(out_dir) / "fit.json", out.dump(2) + "\n");
  write_file(fs::path(out_dir) / "sweep_loglog.dat", dat.str());
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blow-up laboratory for the weakly coupled damped-wave/wave system with "
               "derivative-type nonlinearities"};
  app.set_version_flag("--version", std::string("nakao ") + kVersion);
  app.require_subcommand(1);

  double p = 2.0, q = 2.0, R = 1.0, eps = 0.3, boundary_eps = 0.0, r = 1.0, t = 0.0;
  double c1_t_max = 50.0;
  int n = 1, j_max = 9;
  std::string config_path, out_dir = ".";

  auto* region = app.add_subcommand("region", "Critical-curve report for (p, q, n)");
  region->add_option("--p", p, "exponent p (> 1)")->required();
  region->add_option("--q", q, "exponent q (> 1)")->required();
  region->add_option("--n", n, "spatial dimension")->required();
  region->add_option("--boundary-eps", boundary_eps,
                     "flag |pq - p_Gla(n)| <= this as on-boundary");

  auto* iterate = app.add_subcommand("iterate", "Iteration sequences and constants ledger");
  iterate->add_option("--p", p)->required();
  iterate->add_option("--q", q)->required();
  iterate->add_option("--n", n)->required();
  iterate->add_option("--R", R, "data support radius");
  iterate->add_option("--eps", eps, "data size");
  iterate->add_option("--j-max", j_max, "number of sequence rows");
  iterate->add_option("--c1-t-max", c1_t_max, "time-grid extent for the C1 supremum");
  iterate->add_option("--out", out_dir, "output directory");

  auto* phi_cmd = app.add_subcommand("phi", "Evaluate the eigenfunction (and e^{-t} Phi)");
  phi_cmd->add_option("--n", n)->required();
  phi_cmd->add_option("--r", r, "radius")->required();
  auto* t_opt = phi_cmd->add_option("--t", t, "time (evaluates Psi too)");

  auto* verify = app.add_subcommand("verify-testfn", "Eigenfunction and ball-integral checks");
  verify->add_option("--n", n)->required();
  verify->add_option("--R", R);
  verify->add_option("--t-max", c1_t_max, "time-grid extent for the C1 supremum");

  auto* simulate = app.add_subcommand("simulate", "Integrate the system, track functionals");
  simulate->add_option("--config", config_path, "JSON configuration")->required();
  simulate->add_option("--out", out_dir, "output directory");

  auto* sweep = app.add_subcommand("sweep", "eps sweep with lifespan power-law fit");
  sweep->add_option("--config", config_path, "JSON configuration")->required();
  sweep->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalidInput;
  }

  try {
    if (app.got_subcommand(region)) return cmd_region(p, q, n, boundary_eps);
    if (app.got_subcommand(iterate)) return cmd_iterate(p, q, n, R, eps, j_max, c1_t_max, out_dir);
    if (app.got_subcommand(phi_cmd)) return cmd_phi(n, r, t, t_opt->count() > 0);
    if (app.got_subcommand(verify)) return cmd_verify_testfn(n, R, c1_t_max);
    if (app.got_subcommand(simulate)) return cmd_simulate(config_path, out_dir);
    if (app.got_subcommand(sweep)) return cmd_sweep(config_path, out_dir);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const quadrature::QuadratureError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalFailure;
  }
  return 0;
}
