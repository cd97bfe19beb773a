#include "cli.hpp"

#include "dipe/kernels.hpp"
#include "dipe/moments.hpp"
#include "dipe/planner.hpp"
#include "dipe/protocol.hpp"
#include "dipe/states.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

namespace dipe::cli {

using json = nlohmann::json;
using moments::Ensemble;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string timestamp_line() {
  const std::time_t now = std::time(nullptr);
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return std::string("# generated ") + buf;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

// flat JSON config: values become defaults for matching option names anywhere
void apply_config_defaults(CLI::App* app, const json& cfg) {
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    const std::string flag = "--" + it.key();
    CLI::Option* opt = nullptr;
    try {
      opt = app->get_option(flag);
    } catch (const CLI::OptionNotFound&) {
      opt = nullptr;
    }
    if (opt != nullptr && !opt->get_positional()) {
      const std::string value =
          it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
      opt->default_val(value);
    }
  }
  for (CLI::App* sub : app->get_subcommands({})) apply_config_defaults(sub, cfg);
}

struct VerifyReport {
  std::ostream& out;
  bool all_pass = true;

  void line(const std::string& name, bool pass, const std::string& detail = "") {
    all_pass = all_pass && pass;
    out << (pass ? "PASS " : "FAIL ") << name;
    if (!detail.empty()) out << "  " << detail;
    out << "\n";
  }
};

// --- coeffs -----------------------------------------------------------------

struct CoeffRow {
  std::string family;
  int n = 0;
  std::string param;
  moments::CoeffSet set;
};

void emit_coeff_rows(std::ostream& out, const std::vector<CoeffRow>& rows,
                     const std::string& ensemble, const std::string& format, bool no_timestamp,
                     const std::string& config_echo) {
  const bool want_cl = ensemble == "clifford" || ensemble == "both";
  const bool want_h = ensemble == "haar" || ensemble == "both";
  if (format == "json") {
    json doc;
    doc["config"] = config_echo;
    doc["rows"] = json::array();
    for (const auto& r : rows) {
      json row;
      row["family"] = r.family;
      row["n"] = r.n;
      if (!r.param.empty()) row["param"] = r.param;
      auto put = [&](const char* key, const moments::CoeffValue& v) {
        if (v.available) {
          row[key] = v.value;
          row[std::string(key) + "_method"] = moments::to_string(v.method);
        } else {
          row[std::string(key) + "_skipped"] = v.skip_reason;
        }
      };
      put("A", r.set.a);
      put("C", r.set.c);
      if (want_cl) put("B_cl", r.set.b_clifford);
      if (want_h) put("B_haar", r.set.b_haar);
      doc["rows"].push_back(row);
    }
    out << doc.dump(2) << "\n";
    return;
  }
  if (format == "pretty") {
    for (const auto& r : rows) {
      out << r.family << " (n=" << r.n << ")\n";
      auto put = [&](const char* key, const moments::CoeffValue& v, bool wanted) {
        if (!wanted) return;
        if (v.available)
          out << "  " << key << " = " << fmt(v.value) << "  [" << moments::to_string(v.method)
              << "]\n";
        else
          out << "  " << key << " skipped: " << v.skip_reason << "\n";
      };
      put("A     ", r.set.a, true);
      put("C     ", r.set.c, true);
      put("B_cl  ", r.set.b_clifford, want_cl);
      put("B_haar", r.set.b_haar, want_h);
    }
    return;
  }
  if (!no_timestamp) out << timestamp_line() << "\n";
  out << "# config: " << config_echo << "\n";
  out << "family,n,param,A,method_A,C,method_C,B_cl,method_B_cl,B_haar,method_B_haar,note\n";
  for (const auto& r : rows) {
    std::string note;
    auto cell = [&](const moments::CoeffValue& v, bool wanted) -> std::string {
      if (!wanted) return ",";
      if (!v.available) {
        if (!v.skip_reason.empty()) note = v.skip_reason;
        return ",";
      }
      return fmt(v.value) + "," + moments::to_string(v.method);
    };
    out << r.family << "," << r.n << "," << r.param << "," << cell(r.set.a, true) << ","
        << cell(r.set.c, true) << "," << cell(r.set.b_clifford, want_cl) << ","
        << cell(r.set.b_haar, want_h) << "," << note << "\n";
  }
}

// --- verify suites ------------------------------------------------------

void verify_kernel(VerifyReport& rep, int n) {
  std::vector<std::int64_t> g(n + 1);
  for (int d = 0; d <= n; ++d) g[d] = ((d & 1) ? -1 : 1) * (std::int64_t{1} << (n - d));
  const auto num = kernels::swap_sector_numerators(g, n);
  std::int64_t p3 = 1;
  for (int i = 0; i < n; ++i) p3 *= 3;
  bool ok = num[n] == p3;
  for (int k = 0; k < n; ++k) ok = ok && num[k] == 0;
  std::ostringstream alpha;
  alpha << "alpha = (";
  for (int k = 0; k <= n; ++k) alpha << (k ? "," : "") << fmt(static_cast<double>(num[k]) / static_cast<double>(p3));
  alpha << ")";
  rep.line("kernel.sector_vector n=" + std::to_string(n), ok, alpha.str());

  if (n <= 2) {
    const auto omega = kernels::averaged_omega(kernels::unique_kernel(n), Ensemble::kClifford);
    const double dev = (omega - kernels::register_swap(n)).cwiseAbs().maxCoeff();
    rep.line("kernel.averaged_omega_is_swap n=" + std::to_string(n), dev < 1e-10,
             "deviation " + fmt(dev));
  }
  rep.line("kernel.unbiased_verdict n=" + std::to_string(n), ok,
           ok ? "unique unbiased Hamming kernel" : "not unbiased");
}

void check_spectrum_line(VerifyReport& rep, const std::string& name, const ComplexMatrix& m,
                         std::vector<double> expect) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(),
                         es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end());
  std::sort(expect.begin(), expect.end());
  double dev = 0.0;
  for (std::size_t i = 0; i < ev.size(); ++i) dev = std::max(dev, std::abs(ev[i] - expect[i]));
  rep.line("operators.spectrum " + name, dev < 1e-9, "max deviation " + fmt(dev));
}

void verify_operators(VerifyReport& rep) {
  auto tm = moments::build_third_moment_operators();
  check_spectrum_line(rep, "R_AA'B", tm.r_aab, {1.5, 1.5, 1.5, 1.5, 0, 0, -2, -2});
  check_spectrum_line(rep, "R_ABB'", tm.r_abb, {1.5, 1.5, 1.5, 1.5, 0, 0, -2, -2});
  auto so = moments::build_shadow_operators();
  check_spectrum_line(rep, "omega2P", so.omega2, {7.5, 7.5, 7.5, 5.5});
  check_spectrum_line(rep, "omega3P", so.omega3, {1.5, 1.5, 1.5, 1.5, -2, -2, 0, 0});
  const double tr_cl = moments::build_r4_clifford().trace().real();
  const double tr_h = moments::build_r4_haar().trace().real();
  rep.line("operators.r4_traces", std::abs(tr_cl - 4.0) < 1e-12 && std::abs(tr_h - 4.0) < 1e-12,
           "tr R4Cl = " + fmt(tr_cl) + ", tr R4H = " + fmt(tr_h));
}

void verify_twirl(VerifyReport& rep, std::uint64_t samples, std::uint64_t seed) {
  const auto check = moments::verify_twirl_identity(samples, seed);
  const double tol = 5e-3 * std::sqrt(1e6 / static_cast<double>(samples));
  rep.line("twirl.entrywise", check.max_abs_deviation <= tol,
           "max deviation " + fmt(check.max_abs_deviation) + " (tol " + fmt(tol) + ", " +
               std::to_string(samples) + " samples, seed " + std::to_string(seed) + ")");
  rep.line("twirl.traces",
           std::abs(check.trace_exact - 4.0) < 1e-12 && std::abs(check.trace_mc - 4.0) < 0.02,
           "mc " + fmt(check.trace_mc) + ", exact " + fmt(check.trace_exact));
}

void verify_bounds(VerifyReport& rep, int state_count, std::uint64_t seed) {
  auto all = moments::enumerate_two_qubit_stabilizers();
  int at_bound = 0;
  bool ok = all.size() == 60;
  for (const auto& s : all) {
    const double f = moments::coeff_B_stabilizer(s, Ensemble::kClifford);
    ok = ok && f <= 2.25 + 1e-12;
    if (std::abs(f - 2.25) < 1e-12) ++at_bound;
  }
  rep.line("bounds.two_qubit_stabilizers", ok && at_bound == 36,
           std::to_string(all.size()) + " states, " + std::to_string(at_bound) +
               " at the bound 9/4");

  bool rand_ok = true;
  double worst = 0.0;
  for (int n = 1; n <= 3; ++n) {
    const int count = state_count / 3;
    for (int i = 0; i < count; ++i) {
      qcore::DensityOperator psi(states::make_haar_random_pure(n, seed + 1000 * n + i));
      for (auto e : {Ensemble::kClifford, Ensemble::kHaar}) {
        const double b = moments::coeff_B(psi, psi, e);
        rand_ok = rand_ok && b <= std::pow(1.5, n) + 1e-9;
        worst = std::max(worst, b / std::pow(1.5, n));
      }
    }
  }
  rep.line("bounds.random_pure_states", rand_ok,
           std::to_string(state_count) + " draws, worst B/(3/2)^n = " + fmt(worst));
}

void verify_certificate(VerifyReport& rep, const std::vector<std::string>& families, int nmax) {
  for (const auto& base : families) {
    bool ok = true;
    double worst_margin = 1e300;
    for (int n = 1; n <= nmax; ++n) {
      const auto cert =
          moments::certificate(states::StateFamily::parse(base + ":" + std::to_string(n)));
      ok = ok && cert.pass;
      worst_margin = std::min(worst_margin, cert.margin / cert.bound);
    }
    rep.line("certificate." + base, ok,
             "n <= " + std::to_string(nmax) + ", min margin/bound = " + fmt(worst_margin));
  }
}

void verify_shadow(VerifyReport& rep, std::int64_t reps, std::uint64_t seed) {
  auto so = moments::build_shadow_operators();
  check_spectrum_line(rep, "omega2P", so.omega2, {7.5, 7.5, 7.5, 5.5});
  check_spectrum_line(rep, "omega3P", so.omega3, {1.5, 1.5, 1.5, 1.5, -2, -2, 0, 0});

  qcore::DensityOperator zero = states::StateFamily::parse("prod:1:0:0").make();
  const std::int64_t n_snap = 64;
  const auto sv = moments::shadow_variance_exact(zero, zero, n_snap);
  double acc = 0.0, acc2 = 0.0;
  for (std::int64_t r = 0; r < reps; ++r) {
    const double e = protocol::run_pauli_shadow(zero, zero, n_snap, seed + r).estimate - 1.0;
    acc += e * e;
    acc2 += e * e * e * e;
  }
  const double v = acc / reps;
  const double se = std::sqrt(std::max(1e-300, (acc2 / reps - v * v) / reps));
  const double z = (v - sv.variance) / se;
  rep.line("shadow.exact_variance_n1", std::abs(z) <= 3.0,
           "empirical " + fmt(v) + ", exact " + fmt(sv.variance) + ", z = " + fmt(z));
}

void verify_variance(VerifyReport& rep, std::uint64_t seed) {
  struct Cfg {
    const char* rho;
    protocol::EnsembleKind ens;
    int nm;
  };
  const Cfg cfgs[] = {{"plusprod:1", protocol::EnsembleKind::kCliffordLocal, 2},
                      {"belldimer:2", protocol::EnsembleKind::kHaarLocal, 3},
                      {"depol:plusprod:2:0.3", protocol::EnsembleKind::kCliffordLocal, 1}};
  int idx = 0;
  for (const auto& c : cfgs) {
    qcore::DensityOperator rho = states::StateFamily::parse(c.rho).make();
    auto cmp = protocol::empirical_variance_decomposition(rho, rho, c.ens, c.nm, 20000, seed + idx);
    const bool ok = std::abs(cmp.z_variance) <= 3.0 && std::abs(cmp.z_mean) <= 5.0;
    rep.line("variance." + std::string(c.rho), ok,
             "empirical " + fmt(cmp.empirical_variance) + ", exact " + fmt(cmp.exact.total()) +
                 ", z_var = " + fmt(cmp.z_variance) + ", z_mean = " + fmt(cmp.z_mean));
    ++idx;
  }
}

// --- bench -------------------------------------------------------------

struct BenchRow {
  std::string family;
  int n = 0;
  std::string param;
  std::string ensemble;
  moments::CoeffValue a, c, b;
};

void emit_bench(std::ostream& out, const std::vector<BenchRow>& rows, bool no_timestamp,
                const std::string& config_echo) {
  if (!no_timestamp) out << timestamp_line() << "\n";
  out << "# config: " << config_echo << "\n";
  out << "family,n,param,ensemble,A,C,B,log10_B,method,note\n";
  for (const auto& r : rows) {
    out << r.family << "," << r.n << "," << r.param << "," << r.ensemble << ",";
    out << (r.a.available ? fmt(r.a.value) : "") << ",";
    out << (r.c.available ? fmt(r.c.value) : "") << ",";
    if (r.b.available) {
      out << fmt(r.b.value) << "," << fmt(std::log10(r.b.value)) << ","
          << moments::to_string(r.b.method) << ",\n";
    } else {
      out << ",,,skipped: " << r.b.skip_reason << "\n";
    }
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"distributed inner-product estimation laboratory"};
  app.require_subcommand(1);

  // config preload: --config beats DIPE_CONFIG; the flag pair is consumed
  // here so it works in any position
  std::string config_path;
  if (const char* env = std::getenv("DIPE_CONFIG")) config_path = env;
  std::vector<std::string> args_filtered;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
      continue;
    }
    args_filtered.push_back(args[i]);
  }
  json config = json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      err << "cannot open config file: " << config_path << "\n";
      return 2;
    }
    try {
      in >> config;
    } catch (const std::exception& e) {
      err << "bad config file: " << e.what() << "\n";
      return 2;
    }
  }
  std::string config_path_opt;
  app.add_option("--config", config_path_opt, "JSON file with flag defaults")
      ->configurable(false);

  std::string echo;
  for (const auto& a : args) echo += (echo.empty() ? "" : " ") + a;

  // coeffs
  auto* coeffs = app.add_subcommand("coeffs", "state-dependent variance coefficients");
  std::vector<std::string> coeff_families;
  std::string coeff_ensemble = "both", coeff_out = "csv";
  bool coeff_allow_n4 = false, coeff_no_ts = false;
  coeffs->add_option("--family", coeff_families, "family spec, repeatable")->required();
  coeffs->add_option("--ensemble", coeff_ensemble)
      ->check(CLI::IsMember({"clifford", "haar", "both"}));
  coeffs->add_option("--out", coeff_out)->check(CLI::IsMember({"csv", "json", "pretty"}));
  coeffs->add_flag("--allow-n4", coeff_allow_n4, "enable the n=4 generic contraction");
  coeffs->add_flag("--no-timestamp", coeff_no_ts);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run an estimation protocol");
  std::string sim_rho, sim_sigma, sim_ens = "clifford", sim_out = "json";
  std::int64_t sim_nu = 1000;
  int sim_nm = 1, sim_threads = 1;
  std::uint64_t sim_seed = 0;
  double sim_depol = 0.0;
  bool sim_blocks = false, sim_no_ts = false;
  simulate->add_option("--rho", sim_rho)->required();
  simulate->add_option("--sigma", sim_sigma)->required();
  simulate->add_option("--ensemble", sim_ens)->check(CLI::IsMember({"clifford", "haar", "shadow"}));
  simulate->add_option("--nu", sim_nu, "unitary blocks (shadow: snapshots per party)");
  simulate->add_option("--nm", sim_nm, "shots per block per party");
  simulate->add_option("--seed", sim_seed);
  simulate->add_option("--threads", sim_threads);
  simulate->add_option("--depol", sim_depol, "outcome-side depolarization strength");
  simulate->add_option("--out", sim_out)->check(CLI::IsMember({"json", "csv", "pretty"}));
  simulate->add_flag("--emit-blocks", sim_blocks);
  simulate->add_flag("--no-timestamp", sim_no_ts);

  // verify
  auto* verify = app.add_subcommand("verify", "run a named verification suite");
  std::string suite;
  int ver_n = 5, ver_nmax = 10, ver_states = 500;
  std::uint64_t ver_seed = 0, ver_samples = 1000000;
  std::int64_t ver_reps = 20000;
  std::string ver_families = "all";
  verify
      ->add_option("suite", suite,
                   "kernel|operators|twirl|bounds|certificate|shadow|variance|all")
      ->required();
  verify->add_option("--n", ver_n);
  verify->add_option("--nmax", ver_nmax);
  verify->add_option("--states", ver_states);
  verify->add_option("--samples", ver_samples);
  verify->add_option("--reps", ver_reps);
  verify->add_option("--seed", ver_seed);
  verify->add_option("--families", ver_families, "all or comma list");

  // plan
  auto* plan = app.add_subcommand("plan", "Chebyshev sufficient-copy budgets");
  int plan_n = 1;
  double plan_eps = 0.1, plan_delta = 0.1;
  std::string plan_regime = "clifford";
  bool plan_table = false, plan_no_ts = false;
  double plan_a = 0.0, plan_b = 0.0, plan_c = 0.0;
  std::string plan_out = "pretty";
  plan->add_option("--n", plan_n);
  plan->add_option("--eps", plan_eps);
  plan->add_option("--delta", plan_delta);
  plan->add_option("--regime", plan_regime)
      ->check(CLI::IsMember({"clifford", "haar", "conjectured", "shadow", "state"}));
  plan->add_option("--A", plan_a, "state-specific second-moment coefficient");
  plan->add_option("--B", plan_b, "state-specific fourth-moment coefficient");
  plan->add_option("--C", plan_c, "state-specific third-moment coefficient");
  plan->add_flag("--table", plan_table, "emit the scaling-summary table as CSV");
  plan->add_flag("--no-timestamp", plan_no_ts);
  plan->add_option("--out", plan_out)->check(CLI::IsMember({"json", "pretty", "csv"}));

  // bench
  auto* bench = app.add_subcommand("bench", "coefficient sweeps for the benchmark figures");
  std::string bench_mode = "families";
  std::string bench_families = "plusprod,ghz,w,belldimer,haar:0";
  std::string bench_ensembles = "clifford,haar";
  int bench_nmin = 1, bench_nmax = 6, bench_psteps = 11;
  bool bench_allow_n4 = false, bench_no_ts = false;
  bench->add_option("--mode", bench_mode)->check(CLI::IsMember({"families", "purity", "chain"}));
  bench->add_option("--families", bench_families, "comma list of family templates");
  bench->add_option("--ensembles", bench_ensembles);
  bench->add_option("--n-min", bench_nmin);
  bench->add_option("--n-max", bench_nmax);
  bench->add_option("--p-steps", bench_psteps, "grid points on [0,1] for the purity sweep");
  bench->add_flag("--allow-n4", bench_allow_n4);
  bench->add_flag("--no-timestamp", bench_no_ts);

  apply_config_defaults(&app, config);

  std::vector<std::string> rev(args_filtered.rbegin(), args_filtered.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (coeffs->parsed()) {
      moments::CoeffOptions opt;
      opt.allow_n4 = coeff_allow_n4;
      std::vector<CoeffRow> rows;
      for (const auto& spec : coeff_families) {
        auto fam = states::StateFamily::parse(spec);
        CoeffRow row;
        row.family = spec;
        row.n = fam.n;
        row.set = moments::family_coeffs(fam, opt);
        rows.push_back(std::move(row));
      }
      emit_coeff_rows(out, rows, coeff_ensemble, coeff_out, coeff_no_ts, echo);
      return 0;
    }

    if (simulate->parsed()) {
      const auto rho = states::StateFamily::parse(sim_rho).make();
      const auto sigma = states::StateFamily::parse(sim_sigma).make();
      if (rho.n != sigma.n) {
        err << "rho and sigma must have the same qubit count\n";
        return 2;
      }
      protocol::EstimateRecord rec;
      if (sim_ens == "shadow") {
        rec = protocol::run_pauli_shadow(rho, sigma, sim_nu, sim_seed);
      } else {
        protocol::RunConfig cfg;
        cfg.n = rho.n;
        cfg.n_unitaries = sim_nu;
        cfg.n_shots = sim_nm;
        cfg.seed = sim_seed;
        cfg.threads = sim_threads;
        cfg.depolarize_p = sim_depol;
        cfg.ensemble = sim_ens == "clifford" ? protocol::EnsembleKind::kCliffordLocal
                                             : protocol::EnsembleKind::kHaarLocal;
        rec = protocol::run_shared_lrm(rho, sigma, cfg);
      }
      const double overlap = qcore::inner_product(rho, sigma);

      bool have_exact = false;
      moments::VarianceTerms exact;
      if (sim_ens != "shadow" && sim_depol == 0.0 && rho.n <= moments::kGenericBCapExtended) {
        const auto e = sim_ens == "clifford" ? Ensemble::kClifford : Ensemble::kHaar;
        exact = moments::variance_terms(overlap, moments::coeff_A(rho, sigma),
                                        moments::coeff_C(rho, sigma),
                                        moments::coeff_B(rho, sigma, e, true), sim_nm);
        have_exact = true;
      }

      if (sim_out == "json") {
        json doc;
        doc["config"] = {{"rho", sim_rho},     {"sigma", sim_sigma}, {"ensemble", sim_ens},
                         {"nu", sim_nu},       {"nm", sim_nm},       {"seed", sim_seed},
                         {"depol", sim_depol}, {"threads", sim_threads}};
        doc["estimate"] = rec.estimate;
        doc["overlap_exact"] = overlap;
        doc["wall_seconds"] = rec.wall_seconds;
        if (rec.block_values.size() > 1) {
          doc["block_variance"] = rec.block_variance();
          doc["standard_error"] = rec.standard_error();
        }
        if (have_exact) {
          doc["exact_variance"] = {{"v1", exact.v1},
                                   {"v2", exact.v2},
                                   {"v3", exact.v3},
                                   {"v4", exact.v4},
                                   {"total", exact.total()}};
        }
        if (sim_blocks) doc["blocks"] = rec.block_values;
        out << doc.dump(2) << "\n";
      } else if (sim_out == "csv") {
        if (!sim_no_ts) out << timestamp_line() << "\n";
        out << "# config: " << echo << "\n";
        out << "estimate,overlap_exact,block_variance,standard_error,exact_v1,exact_v2,exact_v3,"
               "exact_v4,exact_total\n";
        out << fmt(rec.estimate) << "," << fmt(overlap) << ",";
        if (rec.block_values.size() > 1)
          out << fmt(rec.block_variance()) << "," << fmt(rec.standard_error());
        else
          out << ",";
        if (have_exact)
          out << "," << fmt(exact.v1) << "," << fmt(exact.v2) << "," << fmt(exact.v3) << ","
              << fmt(exact.v4) << "," << fmt(exact.total());
        else
          out << ",,,,,";
        out << "\n";
        if (sim_blocks) {
          out << "block,value\n";
          for (std::size_t l = 0; l < rec.block_values.size(); ++l)
            out << l << "," << fmt(rec.block_values[l]) << "\n";
        }
      } else {
        out << "estimate        " << fmt(rec.estimate) << "\n";
        out << "exact overlap   " << fmt(overlap) << "\n";
        if (rec.block_values.size() > 1) {
          out << "standard error  " << fmt(rec.standard_error()) << "\n";
          out << "block variance  " << fmt(rec.block_variance()) << "\n";
        }
        if (have_exact)
          out << "exact variance  " << fmt(exact.total()) << " = (" << fmt(exact.v1) << ") + "
              << fmt(exact.v2) << " + " << fmt(exact.v3) << " + " << fmt(exact.v4) << "\n";
        out << "wall seconds    " << fmt(rec.wall_seconds) << "\n";
      }
      return 0;
    }

    if (verify->parsed()) {
      VerifyReport rep{out};
      const bool all = suite == "all";
      bool known = all;
      if (all || suite == "kernel") {
        verify_kernel(rep, ver_n);
        known = true;
      }
      if (all || suite == "operators") {
        verify_operators(rep);
        known = true;
      }
      if (all || suite == "twirl") {
        verify_twirl(rep, ver_samples, ver_seed);
        known = true;
      }
      if (all || suite == "bounds") {
        verify_bounds(rep, ver_states, ver_seed);
        known = true;
      }
      if (all || suite == "certificate") {
        std::vector<std::string> fams =
            ver_families == "all"
                ? std::vector<std::string>{"plusprod", "ghz", "w", "belldimer"}
                : split_list(ver_families);
        verify_certificate(rep, fams, ver_nmax);
        known = true;
      }
      if (all || suite == "shadow") {
        verify_shadow(rep, ver_reps, ver_seed);
        known = true;
      }
      if (all || suite == "variance") {
        verify_variance(rep, ver_seed);
        known = true;
      }
      if (!known) {
        err << "unknown suite: " << suite << "\n";
        return 2;
      }
      out << (rep.all_pass ? "ALL PASS" : "FAILURES PRESENT") << "\n";
      return rep.all_pass ? 0 : 1;
    }

    if (plan->parsed()) {
      if (plan_table) {
        auto rows = planner::scaling_table(plan_n, plan_eps, plan_delta);
        if (!plan_no_ts) out << timestamp_line() << "\n";
        out << "# config: " << echo << "\n";
        out << "protocol,scaling_base,attained_by,source,n,epsilon,delta,copies\n";
        for (const auto& r : rows) {
          out << r.protocol << "," << fmt(r.base) << "," << r.attained_by << "," << r.source << ","
              << plan_n << "," << fmt(plan_eps) << "," << fmt(plan_delta) << ",";
          if (r.numeric) out << r.bound;
          out << "\n";
        }
        return 0;
      }
      planner::PlanRequest req;
      req.n = plan_n;
      req.epsilon = plan_eps;
      req.delta = plan_delta;
      if (plan_regime == "clifford") req.regime = planner::Regime::kCliffordWorstCase;
      else if (plan_regime == "haar") req.regime = planner::Regime::kHaarComparison;
      else if (plan_regime == "conjectured") req.regime = planner::Regime::kHaarConjectured;
      else if (plan_regime == "shadow") req.regime = planner::Regime::kPauliShadow;
      else {
        req.regime = planner::Regime::kStateSpecific;
        req.a = plan_a;
        req.b = plan_b;
        req.c = plan_c;
      }
      const auto r = planner::sufficient_copies(req);
      if (plan_out == "json") {
        json doc{{"regime", planner::to_string(r.regime)},
                 {"n", r.n},
                 {"epsilon", plan_eps},
                 {"delta", plan_delta},
                 {"n_m_star", r.n_m_star},
                 {"n_u_star", r.n_u_star},
                 {"n_star", r.n_star},
                 {"n_m_continuous", r.n_m_continuous},
                 {"bound", r.bound},
                 {"term_second", r.term_second},
                 {"term_third", r.term_third},
                 {"term_fourth", r.term_fourth},
                 {"scaling", r.scaling_label}};
        if (!r.binding_term.empty()) doc["binding_term"] = r.binding_term;
        out << doc.dump(2) << "\n";
      } else if (plan_out == "csv") {
        if (!plan_no_ts) out << timestamp_line() << "\n";
        out << "# config: " << echo << "\n";
        out << "regime,n,epsilon,delta,n_m_star,n_u_star,n_star,n_m_continuous,bound,"
               "term_second,term_third,term_fourth,scaling\n";
        out << planner::to_string(r.regime) << "," << r.n << "," << fmt(plan_eps) << ","
            << fmt(plan_delta) << "," << r.n_m_star << "," << r.n_u_star << "," << r.n_star << ","
            << fmt(r.n_m_continuous) << "," << fmt(r.bound) << "," << fmt(r.term_second) << ","
            << fmt(r.term_third) << "," << fmt(r.term_fourth) << "," << r.scaling_label << "\n";
      } else {
        out << "regime            " << planner::to_string(r.regime) << "\n";
        out << "n                 " << r.n << "\n";
        out << "epsilon, delta    " << fmt(plan_eps) << ", " << fmt(plan_delta) << "\n";
        out << "N_M* (continuous) " << r.n_m_star << " (" << fmt(r.n_m_continuous) << ")\n";
        out << "N_U*              " << r.n_u_star << "\n";
        out << "N* per party      " << r.n_star << "\n";
        out << "bound breakdown   " << fmt(r.term_second) << " + " << fmt(r.term_third) << " + "
            << fmt(r.term_fourth) << " = " << fmt(r.bound) << "\n";
        out << "scaling           " << r.scaling_label << "\n";
        if (!r.binding_term.empty()) out << "binding term      " << r.binding_term << "\n";
      }
      return 0;
    }

    if (bench->parsed()) {
      moments::CoeffOptions opt;
      opt.allow_n4 = bench_allow_n4;
      const auto ensembles = split_list(bench_ensembles);
      std::vector<BenchRow> rows;
      auto push_rows = [&](const states::StateFamily& fam, const std::string& label,
                           const std::string& param) {
        const auto set = moments::family_coeffs(fam, opt);
        for (const auto& e : ensembles) {
          BenchRow row;
          row.family = label;
          row.n = fam.n;
          row.param = param;
          row.ensemble = e;
          row.a = set.a;
          row.c = set.c;
          row.b = e == "clifford" ? set.b_clifford : set.b_haar;
          rows.push_back(std::move(row));
        }
      };

      if (bench_mode == "families") {
        for (const auto& tmpl : split_list(bench_families))
          for (int n = bench_nmin; n <= bench_nmax; ++n) {
            std::string spec;
            if (tmpl.rfind("haar", 0) == 0) {
              const auto colon = tmpl.find(':');
              const std::string seed = colon == std::string::npos ? "0" : tmpl.substr(colon + 1);
              spec = "haar:" + std::to_string(n) + ":" + seed;
            } else {
              spec = tmpl + ":" + std::to_string(n);
            }
            push_rows(states::StateFamily::parse(spec), tmpl, "");
          }
      } else if (bench_mode == "purity") {
        for (int n = bench_nmin; n <= bench_nmax; ++n)
          for (int i = 0; i < bench_psteps; ++i) {
            const double p = bench_psteps == 1 ? 0.0 : static_cast<double>(i) / (bench_psteps - 1);
            const std::string spec = "depol:plusprod:" + std::to_string(n) + ":" + fmt(p);
            push_rows(states::StateFamily::parse(spec), "depol_plusprod", fmt(p));
          }
      } else {
        for (int n = std::max(2, bench_nmin); n <= bench_nmax; ++n)
          for (int m = 0; m <= n - 1; ++m) {
            const std::string spec = "chain:" + std::to_string(n) + ":" + std::to_string(m);
            push_rows(states::StateFamily::parse(spec), "chain", std::to_string(m));
          }
      }
      emit_bench(out, rows, bench_no_ts, echo);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace dipe::cli
