#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "report.hpp"
#include "stratosim/conditions.hpp"
#include "stratosim/constants.hpp"
#include "stratosim/kernels.hpp"
#include "stratosim/partition.hpp"
#include "stratosim/riemann.hpp"
#include "stratosim/simulate.hpp"
#include "stratosim/stats.hpp"

using namespace stratosim;

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Kernel selection flags shared by every subcommand that touches a process.
struct KernelOptions {
  std::string family = "bifbm";
  double H = 0.25;
  double K = 1.0;
  std::string phi = "median";
  std::string density = "normal";
  double alpha = 0.5;
  double quad_tol = 1e-10;
  double domain_cut = 12.0;

  void attach(CLI::App* cmd, bool required) {
    auto* fam = cmd->add_option("--kernel", family,
                                "Kernel family: bifbm, brownian, phi, quantile");
    fam->capture_default_str();
    if (required) fam->required();
    cmd->add_option("--H", H, "bifbm Hurst-type exponent")->capture_default_str();
    cmd->add_option("--K", K, "bifbm second exponent")->capture_default_str();
    cmd->add_option("--phi", phi, "phi-family kernel name")->capture_default_str();
    cmd->add_option("--density", density, "quantile-family initial density")
        ->capture_default_str();
    cmd->add_option("--alpha", alpha, "quantile level in (0,1)")->capture_default_str();
    cmd->add_option("--quad-tol", quad_tol, "quantile quadrature tolerance")
        ->capture_default_str();
    cmd->add_option("--domain-cut", domain_cut, "quantile integration cutoff")
        ->capture_default_str();
  }

  KernelRequest request() const {
    KernelRequest req;
    req.family = family;
    req.H = H;
    req.K = K;
    req.phi = phi;
    req.density = density;
    req.alpha = alpha;
    req.quad_tol = quad_tol;
    req.domain_cut = domain_cut;
    return req;
  }

  void echo(stratocli::ReportWriter& w, const CovarianceKernel& kernel) const {
    w.key("kernel").begin_object();
    w.field("family", family);
    w.field("name", kernel.name());
    if (family == "bifbm") {
      w.field("H", H);
      w.field("K", K);
    } else if (family == "phi") {
      w.field("phi", phi);
    } else if (family == "quantile") {
      w.field("density", density);
      w.field("alpha", alpha);
      w.field("quad_tol", quad_tol);
      w.field("domain_cut", domain_cut);
    }
    w.end();
  }
};

class PhaseClock {
 public:
  void start(const std::string& label) {
    label_ = label;
    begin_ = std::chrono::steady_clock::now();
  }
  void stop() {
    const auto end = std::chrono::steady_clock::now();
    const double secs = std::chrono::duration<double>(end - begin_).count();
    phases_.emplace_back(label_, secs);
  }
  void emit(stratocli::ReportWriter& w) const {
    w.key("timings").begin_object();
    for (const auto& [label, secs] : phases_) w.field(label, secs);
    w.end();
  }

 private:
  std::string label_;
  std::chrono::steady_clock::time_point begin_;
  std::vector<std::pair<std::string, double>> phases_;
};

void deliver(const std::string& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::fputs(doc.c_str(), stdout);
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
  out << doc;
  out.flush();
  if (!out.good()) throw std::runtime_error("short write: " + out_path);
}

// --------------------------------------------------------------------------
// kernel eval

int run_kernel_eval(const KernelOptions& opts, double s, double t) {
  const auto kernel = make_kernel(opts.request());
  std::printf("%s\n", format_double(kernel->cov(s, t)).c_str());
  return 0;
}

// --------------------------------------------------------------------------
// constants

struct ConstantsOptions {
  std::string which = "all";
  double tol = 1e-12;
  double K = 1.0;
  double kappa = -0.5;
};

void emit_series(stratocli::ReportWriter& w, const std::string& name,
                 const SeriesValue& sv) {
  w.begin_object();
  w.field("name", name);
  w.field("value", sv.value);
  w.field("tail_bound", sv.tail_bound);
  w.field("terms", sv.terms);
  w.end();
}

int run_constants(const ConstantsOptions& opts, const std::string& out_path,
                  bool timings) {
  PhaseClock clock;
  clock.start("constants");
  stratocli::ReportWriter w;
  w.begin_object();
  w.field("schema_version", "1");
  w.field("command", "constants");
  w.key("invocation").begin_object();
  w.field("which", opts.which);
  w.field("tol", opts.tol);
  w.field("K", opts.K);
  w.field("kappa", opts.kappa);
  w.end();

  const bool all = opts.which == "all";
  w.key("constants").begin_array();
  if (all || opts.which == "a") emit_series(w, "a", series_a(opts.tol));
  if (all || opts.which == "b1") emit_series(w, "b1", series_b1(opts.tol));
  if (all || opts.which == "b2") emit_series(w, "b2", series_b2(opts.tol));
  if (all || opts.which == "quantile-coef") {
    w.begin_object();
    w.field("name", "quantile-coef");
    w.field("value", quantile_coefficient(opts.tol));
    w.field("tail_bound", opts.tol);
    w.end();
  }
  if (all || opts.which == "ck") {
    w.begin_object();
    w.field("name", "ck");
    w.field("K", opts.K);
    w.field("plus", c_k_plus(opts.K, opts.tol));
    w.field("minus", c_k_minus(opts.K, opts.tol));
    w.end();
  }
  if (all || opts.which == "cbeta") {
    w.begin_object();
    w.field("name", "cbeta");
    w.field("kappa", opts.kappa);
    w.field("plus", c_beta_plus(opts.kappa, opts.tol));
    w.field("minus", c_beta_minus(opts.kappa, opts.tol));
    w.end();
  }
  w.end();
  clock.stop();
  if (timings) clock.emit(w);
  deliver(w.take(), out_path);
  return 0;
}

// --------------------------------------------------------------------------
// audit

struct AuditOptions {
  std::vector<long> grid_n{64, 128};
  double horizon = 1.0;
  int threads = 0;
  double exp_alpha = 0.0;  // 0 means take the kernel default
  double exp_beta = 0.0;
  double exp_gamma = 0.5;
  bool exponents_set = false;
};

void emit_condition_report(stratocli::ReportWriter& w, const ConditionReport& report) {
  w.begin_object();
  w.field("condition", condition_name(report.condition));
  w.key("exponents").begin_object();
  w.field("alpha", report.exponents.alpha);
  w.field("beta", report.exponents.beta);
  w.field("gamma", report.exponents.gamma);
  w.end();
  w.key("fits").begin_array();
  for (const ResolutionFit& fit : report.fits) {
    w.begin_object();
    w.field("n", fit.n);
    w.field("fitted", fit.fitted);
    w.field("points", fit.points);
    w.field("boundary_hits", fit.boundary_hits);
    w.key("worst").begin_object();
    w.field("s", fit.worst.s);
    w.field("t", fit.worst.t);
    w.field("r", fit.worst.r);
    w.field("part", fit.worst.part);
    w.end();
    w.end();
  }
  w.end();
  w.field("growth_ratio", report.growth_ratio);
  w.field("pass", report.pass);
  w.end();
}

int run_audit(const KernelOptions& kopts, const AuditOptions& opts,
              const std::string& out_path, bool timings) {
  const auto kernel = make_kernel(kopts.request());
  ConditionExponents exponents = default_exponents(*kernel);
  if (opts.exponents_set) {
    exponents.alpha = opts.exp_alpha;
    exponents.beta = opts.exp_beta;
    exponents.gamma = opts.exp_gamma;
    validate_exponents(exponents);
  }

  PhaseClock clock;
  clock.start("audit");
  const std::vector<ConditionReport> reports =
      audit_all(*kernel, exponents, opts.grid_n, opts.horizon, opts.threads);
  clock.stop();

  clock.start("eta_table");
  std::vector<EtaEstimate> eta_rows;
  for (long n : opts.grid_n) {
    LatticeCov table(*kernel, Partition(n, opts.horizon), opts.threads);
    eta_rows.push_back(eta_estimate(table, opts.horizon));
  }
  clock.stop();

  stratocli::ReportWriter w;
  w.begin_object();
  w.field("schema_version", "1");
  w.field("command", "audit");
  w.key("invocation").begin_object();
  kopts.echo(w, *kernel);
  w.key("grid_n").begin_array();
  for (long n : opts.grid_n) w.value(n);
  w.end();
  w.field("T", opts.horizon);
  w.field("threads", opts.threads);
  w.end();

  bool all_pass = true;
  w.key("audits").begin_array();
  for (const ConditionReport& report : reports) {
    emit_condition_report(w, report);
    all_pass = all_pass && report.pass;
  }
  w.end();

  w.key("eta_table").begin_array();
  for (const EtaEstimate& eta : eta_rows) {
    w.begin_object();
    w.field("n", eta.n);
    w.field("t", eta.t);
    w.field("plus", eta.plus);
    w.field("minus", eta.minus);
    w.field("value", eta.value);
    w.end();
  }
  w.end();
  w.field("pass", all_pass);
  if (timings) clock.emit(w);
  deliver(w.take(), out_path);
  return all_pass ? 0 : 1;
}

// --------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  long n = 64;
  double horizon = 1.0;
  std::size_t paths = 100;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
};

int run_simulate(const KernelOptions& kopts, const SimulateOptions& opts) {
  const auto kernel = make_kernel(kopts.request());
  const Partition grid(opts.n, opts.horizon);
  const PathBatch batch = simulate_paths(*kernel, grid, opts.paths, opts.seed,
                                         rng::StreamPurpose::GaussianPaths, 0,
                                         opts.threads);
  write_csv_file(batch, opts.out);
  return 0;
}

// --------------------------------------------------------------------------
// clt

struct CltOptions {
  std::string function = "quadratic";
  std::vector<long> n_list{64, 128};
  std::vector<double> t_list{1.0};
  std::size_t paths = 500;
  std::uint64_t seed = 1;
  double horizon = 1.0;
  int threads = 0;
  std::string eta = "auto";
  double ks_min_p = 0.01;
  double identity_tol = 1e-9;
};

void emit_moments(stratocli::ReportWriter& w, const MomentSummary& mom) {
  w.field("count", mom.count);
  w.field("mean", mom.mean);
  w.field("variance", mom.variance);
  w.field("se_mean", mom.se_mean);
  w.field("se_variance", mom.se_variance);
  w.field("shape_defined", mom.shape_defined);
  w.field("skewness", mom.skewness);
  w.field("kurtosis", mom.kurtosis);
}

EtaModel resolve_eta(const std::string& mode, const CovarianceKernel& kernel) {
  if (mode == "zero") return zero_eta_model();
  if (mode != "auto")
    throw std::invalid_argument("unknown eta mode '" + mode + "' (expected auto or zero)");
  const auto* bif = dynamic_cast<const BifractionalKernel*>(&kernel);
  if (bif != nullptr && bif->is_brownian()) return zero_eta_model();
  return eta_model_for(kernel);
}

int run_clt(const KernelOptions& kopts, const CltOptions& opts,
            const std::string& out_path, bool timings) {
  const auto kernel = make_kernel(kopts.request());
  const TestFunction& tf = test_function(opts.function);
  const EtaModel eta = resolve_eta(opts.eta, *kernel);

  CltConfig config;
  config.n_list = opts.n_list;
  config.t_list = opts.t_list;
  config.num_paths = opts.paths;
  config.seed = opts.seed;
  config.horizon = opts.horizon;
  config.threads = opts.threads;

  PhaseClock clock;
  clock.start("experiment");
  const CltResult result = clt_experiment(*kernel, tf, eta, config);
  clock.stop();

  // Remainder decay at the last configured time, on the same path streams
  // the experiment consumed.
  clock.start("remainders");
  const double t_decay = opts.t_list.back();
  std::vector<double> remainder_vars;
  for (long n : opts.n_list) {
    const Partition grid(n, opts.horizon);
    const PathBatch batch = simulate_paths(
        *kernel, grid, opts.paths, opts.seed, rng::StreamPurpose::GaussianPaths,
        static_cast<std::uint64_t>(n) << 32, opts.threads);
    std::vector<double> rem(batch.num_paths());
    for (std::size_t p = 0; p < batch.num_paths(); ++p)
      rem[p] = taylor_remainders(batch, p, tf, t_decay);
    remainder_vars.push_back(rem.size() >= 2 ? moment_summary(rem).variance : 0.0);
  }
  clock.stop();

  stratocli::ReportWriter w;
  w.begin_object();
  w.field("schema_version", "1");
  w.field("command", "clt");
  w.key("invocation").begin_object();
  kopts.echo(w, *kernel);
  w.field("function", opts.function);
  w.key("n_list").begin_array();
  for (long n : opts.n_list) w.value(n);
  w.end();
  w.key("t_list").begin_array();
  for (double t : opts.t_list) w.value(t);
  w.end();
  w.field("paths", opts.paths);
  w.field("seed", static_cast<long>(opts.seed));
  w.field("T", opts.horizon);
  w.field("threads", opts.threads);
  w.field("eta", eta.description);
  w.field("ks_min_p", opts.ks_min_p);
  w.field("identity_tol", opts.identity_tol);
  w.end();

  bool ks_pass = true;
  double max_residual = 0.0;
  w.key("ks_tables").begin_array();
  for (const CltCell& cell : result.cells) {
    const LimitCell* limit = nullptr;
    for (const LimitCell& lc : result.limit)
      if (lc.t == cell.t) limit = &lc;
    if (limit == nullptr || cell.phi.size() < 2) continue;
    const KSResult ks = ks_two_sample(cell.phi, limit->sample);
    const bool pass = ks.p_value > opts.ks_min_p;
    ks_pass = ks_pass && pass;
    for (double r : cell.identity_residual) max_residual = std::max(max_residual, r);
    w.begin_object();
    w.field("n", cell.n);
    w.field("t", cell.t);
    w.field("statistic", ks.statistic);
    w.field("p_value", ks.p_value);
    w.field("effective_n", ks.effective_n);
    w.field("pass", pass);
    w.end();
  }
  w.end();

  w.key("moments").begin_array();
  for (const CltCell& cell : result.cells) {
    if (cell.phi.size() < 2) continue;
    w.begin_object();
    w.field("n", cell.n);
    w.field("t", cell.t);
    emit_moments(w, moment_summary(cell.phi));
    w.end();
  }
  w.end();

  w.key("limit_moments").begin_array();
  for (const LimitCell& cell : result.limit) {
    if (cell.sample.size() < 2) continue;
    w.begin_object();
    w.field("t", cell.t);
    emit_moments(w, moment_summary(cell.sample));
    w.end();
  }
  w.end();

  const bool identity_pass = max_residual <= opts.identity_tol;
  w.key("identity").begin_object();
  w.field("max_residual", max_residual);
  w.field("tol", opts.identity_tol);
  w.field("pass", identity_pass);
  w.end();

  w.key("remainder_variances").begin_array();
  for (std::size_t i = 0; i < opts.n_list.size(); ++i) {
    w.begin_object();
    w.field("n", opts.n_list[i]);
    w.field("t", t_decay);
    w.field("variance", remainder_vars[i]);
    w.end();
  }
  w.end();

  bool decay_ok = opts.n_list.size() >= 3;
  for (double v : remainder_vars) decay_ok = decay_ok && v > 0.0;
  if (decay_ok) {
    const DecayFit fit = decay_fit(opts.n_list, remainder_vars);
    w.key("decay_fit").begin_object();
    w.field("slope", fit.slope);
    w.field("intercept", fit.intercept);
    w.field("residual_norm", fit.residual_norm);
    w.end();
  }

  const bool pass = ks_pass && identity_pass;
  w.key("gates").begin_object();
  w.field("ks_pass", ks_pass);
  w.field("identity_pass", identity_pass);
  w.field("pass", pass);
  w.end();
  if (timings) clock.emit(w);
  deliver(w.take(), out_path);
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Midpoint Riemann sum simulation and verification toolkit"};
  app.require_subcommand(1);

  // kernel eval
  CLI::App* kernel_cmd = app.add_subcommand("kernel", "Kernel operations");
  kernel_cmd->require_subcommand(1);
  CLI::App* eval_cmd = kernel_cmd->add_subcommand("eval", "Print one covariance value");
  KernelOptions eval_kernel;
  eval_kernel.attach(eval_cmd, true);
  double eval_s = 0.0;
  double eval_t = 0.0;
  eval_cmd->add_option("--s", eval_s, "First time")->required();
  eval_cmd->add_option("--t", eval_t, "Second time")->required();

  // constants
  CLI::App* constants_cmd =
      app.add_subcommand("constants", "Limit constants with truncation metadata");
  ConstantsOptions constants_opts;
  constants_cmd
      ->add_option("--which", constants_opts.which,
                   "One of: a, b1, b2, quantile-coef, ck, cbeta, all")
      ->capture_default_str()
      ->check(CLI::IsMember({"a", "b1", "b2", "quantile-coef", "ck", "cbeta", "all"}));
  constants_cmd->add_option("--tol", constants_opts.tol, "Series truncation tolerance")
      ->capture_default_str();
  constants_cmd->add_option("--K", constants_opts.K, "Exponent for the ck pair")
      ->capture_default_str();
  constants_cmd->add_option("--kappa", constants_opts.kappa, "Scale for the cbeta pair")
      ->capture_default_str();
  std::string constants_out;
  bool constants_timings = false;
  constants_cmd->add_option("--out", constants_out, "Write the report here");
  constants_cmd->add_flag("--timings", constants_timings, "Include wall-clock timings");

  // audit
  CLI::App* audit_cmd = app.add_subcommand("audit", "Covariance bound audits");
  KernelOptions audit_kernel;
  audit_kernel.attach(audit_cmd, false);
  AuditOptions audit_opts;
  audit_cmd->add_option("--grid-n", audit_opts.grid_n, "Mesh resolutions, ascending")
      ->delimiter(',')
      ->capture_default_str();
  audit_cmd->add_option("--T", audit_opts.horizon, "Time horizon")->capture_default_str();
  audit_cmd->add_option("--threads", audit_opts.threads, "Worker cap, 0 = hardware")
      ->envname("STRATOSIM_THREADS")
      ->capture_default_str();
  auto* exp_alpha = audit_cmd->add_option("--exp-alpha", audit_opts.exp_alpha,
                                          "Separation exponent override");
  auto* exp_beta = audit_cmd->add_option("--exp-beta", audit_opts.exp_beta,
                                         "Position exponent override");
  audit_cmd->add_option("--exp-gamma", audit_opts.exp_gamma, "Growth exponent override")
      ->capture_default_str();
  exp_alpha->needs(exp_beta);
  exp_beta->needs(exp_alpha);
  std::string audit_out;
  bool audit_timings = false;
  audit_cmd->add_option("--out", audit_out, "Write the report here");
  audit_cmd->add_flag("--timings", audit_timings, "Include wall-clock timings");

  // simulate
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Sample paths to CSV");
  KernelOptions simulate_kernel;
  simulate_kernel.attach(simulate_cmd, false);
  SimulateOptions simulate_opts;
  simulate_cmd->add_option("--n", simulate_opts.n, "Mesh resolution")
      ->capture_default_str();
  simulate_cmd->add_option("--T", simulate_opts.horizon, "Time horizon")
      ->capture_default_str();
  simulate_cmd->add_option("--paths", simulate_opts.paths, "Number of paths")
      ->capture_default_str();
  simulate_cmd->add_option("--seed", simulate_opts.seed, "Stream seed")
      ->capture_default_str();
  simulate_cmd->add_option("--threads", simulate_opts.threads, "Worker cap, 0 = hardware")
      ->envname("STRATOSIM_THREADS")
      ->capture_default_str();
  simulate_cmd->add_option("--out", simulate_opts.out, "CSV output path")->required();

  // clt
  CLI::App* clt_cmd = app.add_subcommand("clt", "Full midpoint-sum experiment");
  // Config parsing lives on the root app (subcommand-level set_config is
  // inert in CLI11); fallthrough lets `clt --config file` reach it. Keys sit
  // in a [clt] section and explicit flags override file values.
  clt_cmd->fallthrough();
  app.set_config("--config", "",
                 "INI config file with a [clt] section; flags override its values");
  app.allow_config_extras(CLI::config_extras_mode::error);
  KernelOptions clt_kernel;
  clt_kernel.attach(clt_cmd, false);
  CltOptions clt_opts;
  clt_cmd->add_option("--function", clt_opts.function,
                      "Test function: quadratic, cubic, sin")
      ->capture_default_str();
  clt_cmd->add_option("--n-list", clt_opts.n_list, "Mesh resolutions, ascending")
      ->delimiter(',')
      ->capture_default_str();
  clt_cmd->add_option("--t-list", clt_opts.t_list, "Evaluation times in (0, T]")
      ->delimiter(',')
      ->capture_default_str();
  clt_cmd->add_option("--paths", clt_opts.paths, "Paths per mesh")->capture_default_str();
  clt_cmd->add_option("--seed", clt_opts.seed, "Stream seed")->capture_default_str();
  clt_cmd->add_option("--T", clt_opts.horizon, "Time horizon")->capture_default_str();
  clt_cmd->add_option("--threads", clt_opts.threads, "Worker cap, 0 = hardware")
      ->envname("STRATOSIM_THREADS")
      ->capture_default_str();
  clt_cmd->add_option("--eta", clt_opts.eta, "Correction clock: auto or zero")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "zero"}));
  clt_cmd->add_option("--ks-min-p", clt_opts.ks_min_p, "KS p-value gate")
      ->capture_default_str();
  clt_cmd->add_option("--identity-tol", clt_opts.identity_tol,
                      "Pathwise identity residual gate")
      ->capture_default_str();
  std::string clt_out;
  bool clt_timings = false;
  clt_cmd->add_option("--out", clt_out, "Write the report here");
  clt_cmd->add_flag("--timings", clt_timings, "Include wall-clock timings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  try {
    if (eval_cmd->parsed()) return run_kernel_eval(eval_kernel, eval_s, eval_t);
    if (constants_cmd->parsed())
      return run_constants(constants_opts, constants_out, constants_timings);
    if (audit_cmd->parsed()) {
      audit_opts.exponents_set = exp_alpha->count() > 0;
      return run_audit(audit_kernel, audit_opts, audit_out, audit_timings);
    }
    if (simulate_cmd->parsed()) return run_simulate(simulate_kernel, simulate_opts);
    if (clt_cmd->parsed()) return run_clt(clt_kernel, clt_opts, clt_out, clt_timings);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
