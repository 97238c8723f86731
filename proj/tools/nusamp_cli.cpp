// Command-line front end: density-constant tables, frame/fusion-frame
// verification experiments, and parameter sweeps with reproducible seeds.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "nusamp/bunched.hpp"
#include "nusamp/constants.hpp"
#include "nusamp/frame.hpp"
#include "nusamp/io.hpp"
#include "nusamp/wirtinger.hpp"

namespace {

using namespace nusamp;

// "0..26" or "0,1,4" or "3"
std::vector<int> parse_int_range(const std::string& spec) {
  std::vector<int> out;
  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    const int lo = std::stoi(spec.substr(0, dots));
    const int hi = std::stoi(spec.substr(dots + 2));
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::istringstream is(spec);
  std::string tok;
  while (std::getline(is, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

// "1,1/2,1/4" -- fractions accepted
std::vector<double> parse_value_list(const std::string& spec) {
  std::vector<double> out;
  std::istringstream is(spec);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    const auto slash = tok.find('/');
    if (slash != std::string::npos)
      out.push_back(std::stod(tok.substr(0, slash)) / std::stod(tok.substr(slash + 1)));
    else
      out.push_back(std::stod(tok));
  }
  return out;
}

/// Writes to stdout when no path is given; relative paths live under
/// NUSAMP_OUT_DIR when that variable is set.
void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::string full = path;
  const char* dir = std::getenv("NUSAMP_OUT_DIR");
  if (dir && *dir && path.front() != '/') full = std::string(dir) + "/" + path;
  std::ofstream os(full, std::ios::binary);
  if (!os) {
    std::cerr << "cannot open output file: " << full << "\n";
    std::exit(2);
  }
  os << content;
}

void write_replay(const std::string& name, const std::string& payload) {
  if (payload.empty()) return;
  write_output(name, payload);
  std::cerr << "replay payload written to " << name << "\n";
}

int finish_report(const FrameReport& rep, const std::string& format,
                  const std::string& out, const std::string& replay_name) {
  if (format == "csv")
    write_output(out, report_csv(rep));
  else if (format == "text")
    write_output(out, report_text(rep));
  else
    write_output(out, to_json(rep).dump(2) + "\n");
  if (!rep.pass() && rep.bounds_valid) {
    write_replay(replay_name, rep.replay);
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "nusamp: explicit density constants and empirical frame verification for "
      "nonuniform derivative and bunched sampling of bandlimited functions"};
  app.require_subcommand(1);
  std::string out_path, format = "text";

  // ---------------------------------------------------------- constants
  auto* constants = app.add_subcommand("constants", "evaluate density-constant tables");
  std::string table = "C", k_spec = "0..26", d_spec = "1..5", s_spec = "0..9";
  std::string tau_spec = "1,1/2,1/4,1/8,1/16";
  bool compare_paper = false, verbose = false;
  constants->add_option("--table", table, "C | wirtinger | bunched | univariate")
      ->check(CLI::IsMember({"C", "wirtinger", "bunched", "univariate"}));
  constants->add_option("--k", k_spec, "k values, e.g. 0..26 or 0,1,4");
  constants->add_option("--d", d_spec, "dimensions, e.g. 1..5");
  constants->add_option("--s", s_spec, "bunch sizes, e.g. 0..9");
  constants->add_option("--tau", tau_spec, "bunch width ratios, fractions accepted");
  constants->add_flag("--compare-paper", compare_paper,
                      "cross-check against the published reference tables");
  constants->add_flag("--verbose", verbose, "list every compared cell");
  constants->add_option("-o,--output", out_path, "output file (default stdout)");
  constants->add_option("--format", format, "csv | text")
      ->check(CLI::IsMember({"csv", "text"}));

  // ------------------------------------------------------------- verify
  auto* verify = app.add_subcommand("verify", "run a verification experiment");
  verify->require_subcommand(1);
  std::string vformat = "json", vout;
  double W = 1.0, delta = 0.0, spacing = 0.0, jitter = -1.0, window = 0.0;
  double tau = 1.0, epsilon = -1.0, epsilon_frac = -1.0, base_A = -1.0, base_B = -1.0;
  double star_q = 2.0, coeff_scale = 1.0;
  int k = 0, s = 1, num_functions = 50, kernels = 8;
  std::uint64_t seed = 1;
  bool exploratory = false;
  std::string taus_spec = "0.25,0.125,0.0625,0.01,0.001";

  auto add_common = [&](CLI::App* cmd, bool with_k) {
    cmd->add_option("--W", W, "frequency half-width of the domain");
    if (with_k) cmd->add_option("--k", k, "number of sampled derivatives");
    cmd->add_option("--delta", delta, "target density (derives spacing/jitter)");
    cmd->add_option("--spacing", spacing, "explicit grid spacing");
    cmd->add_option("--jitter", jitter, "explicit jitter amplitude");
    cmd->add_option("--window", window, "window half-length");
    cmd->add_option("--N", num_functions, "number of test functions");
    cmd->add_option("--J", kernels, "kernels per test function");
    cmd->add_option("--coeff-scale", coeff_scale, "coefficient scale");
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_flag("--exploratory", exploratory,
                  "probe densities above the sufficient bound (no verdicts)");
    cmd->add_option("--format", vformat, "json | csv | text")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    cmd->add_option("-o,--output", vout, "output file (default stdout)");
  };

  auto* frame1d = verify->add_subcommand("frame1d", "univariate derivative frame");
  add_common(frame1d, true);
  auto* framend = verify->add_subcommand("framend", "planar box-domain derivative frame");
  add_common(framend, true);
  framend->add_option("--q", star_q, "l^q density norm");
  auto* shannon = verify->add_subcommand("shannon", "Nyquist-grid exactness check");
  add_common(shannon, false);
  auto* fusion = verify->add_subcommand("fusion", "bunched fusion-frame sum");
  auto* divdiff = verify->add_subcommand("divdiff", "bunched divided-difference frame");
  auto* bunched_cmd = verify->add_subcommand("bunched", "both bunched checks");
  for (CLI::App* cmd : {fusion, divdiff, bunched_cmd}) {
    add_common(cmd, false);
    cmd->add_option("--s", s, "extra samples per bunch");
    cmd->add_option("--tau", tau, "bunch width / density ratio, in (0, 1]");
  }
  auto* perturb = verify->add_subcommand("perturb", "perturbed uniform grid");
  add_common(perturb, true);
  perturb->add_option("--epsilon", epsilon, "absolute perturbation radius");
  perturb->add_option("--epsilon-frac", epsilon_frac, "fraction of the admissible budget");
  perturb->add_option("--base-A", base_A, "externally known base lower frame bound");
  perturb->add_option("--base-B", base_B, "externally known base upper frame bound");
  auto* taulimit = verify->add_subcommand("taulimit", "tau -> 0 divided-difference limit");
  add_common(taulimit, false);
  taulimit->add_option("--s", s, "extra samples per bunch");
  taulimit->add_option("--taus", taus_spec, "decreasing tau sequence");

  // -------------------------------------------------------------- sweep
  auto* sweep = app.add_subcommand("sweep", "parameter sweeps (CSV envelopes)");
  sweep->require_subcommand(1);
  std::string values_spec = "0.1,0.2,0.3,0.4";
  auto* sweep_delta = sweep->add_subcommand("delta", "density sweep of the 1D frame");
  add_common(sweep_delta, true);
  sweep_delta->add_option("--values", values_spec, "delta values");
  auto* sweep_tau = sweep->add_subcommand("tau", "bunch width sweep (divided diff)");
  add_common(sweep_tau, false);
  sweep_tau->add_option("--s", s, "extra samples per bunch");
  sweep_tau->add_option("--values", values_spec, "decreasing tau values");
  auto* sweep_eps = sweep->add_subcommand("epsilon", "perturbation sweep");
  add_common(sweep_eps, true);
  sweep_eps->add_option("--values", values_spec, "fractions of the admissible budget");
  sweep_eps->add_option("--base-A", base_A, "externally known base lower frame bound");
  sweep_eps->add_option("--base-B", base_B, "externally known base upper frame bound");

  CLI11_PARSE(app, argc, argv);

  auto resolve_grid = [&](double default_jitter_frac) {
    if (spacing <= 0.0) {
      if (delta <= 0.0) throw input_error("pass either --delta or --spacing");
      if (jitter < 0.0) jitter = default_jitter_frac * delta;
      spacing = 2.0 * (delta - jitter);
    } else if (jitter < 0.0) {
      jitter = 0.0;
    }
  };

  try {
    if (constants->parsed()) {
      CompareReport cmp;
      Table t;
      if (table == "C") {
        t = constants_table(parse_int_range(k_spec), parse_int_range(d_spec));
        if (compare_paper) cmp = compare_constants_table();
      } else if (table == "wirtinger") {
        const auto ks = parse_int_range(k_spec == "0..26" ? "1..10" : k_spec);
        t = wirtinger_table(ks.front(), ks.back());
        if (compare_paper) cmp = compare_wirtinger_table();
      } else if (table == "bunched") {
        t = bunched_table(parse_int_range(s_spec), parse_value_list(tau_spec));
        if (compare_paper) cmp = compare_bunched_table();
      } else {
        const auto ks = parse_int_range(k_spec == "0..26" ? "0..9" : k_spec);
        t = univariate_table(ks.front(), ks.back());
        if (compare_paper) cmp = compare_univariate_table();
      }
      std::string body = (format == "csv") ? t.csv() : t.text();
      if (compare_paper) body += "\n" + render_compare(cmp, verbose);
      write_output(out_path, body);
      return compare_paper && !cmp.pass() ? 1 : 0;
    }

    if (frame1d->parsed()) {
      resolve_grid(0.15);
      FrameConfig1D cfg;
      cfg.W = W;
      cfg.k = k;
      cfg.spacing = spacing;
      cfg.jitter = jitter;
      cfg.window_halflength = window;
      cfg.num_functions = num_functions;
      cfg.kernels_per_function = kernels;
      cfg.coeff_scale = coeff_scale;
      cfg.seed = seed;
      cfg.exploratory = exploratory;
      return finish_report(verify_frame_1d(cfg), vformat, vout,
                           "replay_frame1d_" + std::to_string(seed) + ".txt");
    }
    if (framend->parsed()) {
      resolve_grid(0.05);
      FrameConfigND cfg;
      cfg.W = W;
      cfg.k = k;
      cfg.spacing = spacing;
      cfg.jitter = jitter;
      cfg.window_halflength = window;
      cfg.star_q = star_q;
      cfg.num_functions = num_functions;
      cfg.kernels_per_function = kernels;
      cfg.coeff_scale = coeff_scale;
      cfg.seed = seed;
      cfg.exploratory = exploratory;
      return finish_report(verify_frame_nd(cfg), vformat, vout,
                           "replay_framend_" + std::to_string(seed) + ".txt");
    }
    if (shannon->parsed()) {
      const auto rep = shannon_exactness(W, num_functions, kernels, seed, window);
      return finish_report(rep, vformat, vout, "replay_shannon.txt");
    }
    if (fusion->parsed() || divdiff->parsed() || bunched_cmd->parsed()) {
      resolve_grid(0.0);
      BunchedConfig cfg;
      cfg.W = W;
      cfg.s = s;
      cfg.tau = tau;
      cfg.spacing = spacing;
      cfg.jitter = jitter;
      cfg.window_halflength = window;
      cfg.num_functions = num_functions;
      cfg.kernels_per_function = kernels;
      cfg.coeff_scale = coeff_scale;
      cfg.seed = seed;
      cfg.exploratory = exploratory;
      const auto rep = verify_bunched(cfg);
      int rc = 0;
      if (fusion->parsed() || bunched_cmd->parsed())
        rc |= finish_report(rep.fusion, vformat, vout,
                            "replay_fusion_" + std::to_string(seed) + ".txt");
      if (divdiff->parsed() || bunched_cmd->parsed())
        rc |= finish_report(rep.divided, vformat, vout,
                            "replay_divdiff_" + std::to_string(seed) + ".txt");
      return rc;
    }
    if (perturb->parsed()) {
      PerturbConfig cfg;
      cfg.W = W;
      cfg.k = k;
      if (spacing <= 0.0) spacing = 1.5 / (wirtinger_constant_cached(k + 1).c * W);
      cfg.spacing = spacing;
      cfg.epsilon = std::max(epsilon, 0.0);
      cfg.epsilon_fraction = epsilon_frac;
      cfg.window_halflength = window;
      cfg.num_functions = num_functions;
      cfg.kernels_per_function = kernels;
      cfg.coeff_scale = coeff_scale;
      cfg.seed = seed;
      cfg.base_A = base_A;
      cfg.base_B = base_B;
      const auto rep = perturb_experiment(cfg);
      return finish_report(rep.frame, vformat, vout,
                           "replay_perturb_" + std::to_string(seed) + ".txt");
    }
    if (taulimit->parsed()) {
      resolve_grid(0.0);
      const double L = detail::aligned_halflength(window > 0 ? window : 300.0, spacing);
      const auto centers = jittered_set_1d(spacing, jitter, {-L, L}, seed);
      const auto f =
          random_test_function(interval_domain(W), kernels, L / 2.0, coeff_scale, seed);
      const auto rep = tau_limit_check(f, centers, s, parse_value_list(taus_spec));
      Table t;
      t.header = {"tau", "sum", "deviation"};
      for (std::size_t i = 0; i < rep.taus.size(); ++i)
        t.rows.push_back(
            {format_g(rep.taus[i]), format_g(rep.sums[i]), format_e(rep.deviations[i])});
      std::string body = (vformat == "csv") ? t.csv() : t.text();
      body += "limit," + format_g(rep.limit) + "\n";
      if (rep.confluent_fallback)
        body += "# warning: bunch widths below the double-precision signal floor "
                "used the analytic confluent limit\n";
      write_output(vout, body);
      return 0;
    }

    if (sweep_delta->parsed()) {
      Table t;
      t.header = {"delta", "measured_delta", "min_ratio", "max_ratio", "A", "B", "verdict"};
      for (double dv : parse_value_list(values_spec)) {
        FrameConfig1D cfg;
        cfg.W = W;
        cfg.k = k;
        const double j = (jitter >= 0.0) ? jitter : 0.15 * dv;
        cfg.spacing = 2.0 * (dv - j);
        cfg.jitter = j;
        cfg.window_halflength = window;
        cfg.num_functions = num_functions;
        cfg.kernels_per_function = kernels;
        cfg.seed = seed;
        cfg.exploratory = exploratory;
        const auto rep = verify_frame_1d(cfg);
        t.rows.push_back({format_g(dv), format_g(rep.delta), format_g(rep.min_ratio()),
                          format_g(rep.max_ratio()), format_g(rep.A_theory),
                          format_g(rep.B_theory),
                          !rep.bounds_valid ? "exploratory"
                                            : (rep.pass() ? "pass" : "fail")});
      }
      write_output(vout, t.csv());
      return 0;
    }
    if (sweep_tau->parsed()) {
      resolve_grid(0.0);
      const double L = detail::aligned_halflength(window > 0 ? window : 300.0, spacing);
      const auto centers = jittered_set_1d(spacing, jitter, {-L, L}, seed);
      const auto f =
          random_test_function(interval_domain(W), kernels, L / 2.0, coeff_scale, seed);
      const auto rep = tau_limit_check(f, centers, s, parse_value_list(values_spec));
      Table t;
      t.header = {"tau", "sum", "limit", "deviation"};
      for (std::size_t i = 0; i < rep.taus.size(); ++i)
        t.rows.push_back({format_g(rep.taus[i]), format_g(rep.sums[i]),
                          format_g(rep.limit), format_e(rep.deviations[i])});
      write_output(vout, t.csv());
      return 0;
    }
    if (sweep_eps->parsed()) {
      Table t;
      t.header = {"fraction", "epsilon", "min_ratio", "max_ratio", "A", "B", "verdict"};
      for (double frac : parse_value_list(values_spec)) {
        PerturbConfig cfg;
        cfg.W = W;
        cfg.k = k;
        cfg.spacing =
            (spacing > 0.0) ? spacing : 1.5 / (wirtinger_constant_cached(k + 1).c * W);
        cfg.epsilon_fraction = frac;
        cfg.window_halflength = window;
        cfg.num_functions = num_functions;
        cfg.kernels_per_function = kernels;
        cfg.seed = seed;
        cfg.base_A = base_A;
        cfg.base_B = base_B;
        const auto rep = perturb_experiment(cfg);
        t.rows.push_back({format_g(frac), format_g(rep.epsilon),
                          format_g(rep.frame.min_ratio()), format_g(rep.frame.max_ratio()),
                          format_g(rep.frame.A_theory), format_g(rep.frame.B_theory),
                          rep.frame.pass() ? "pass" : "fail"});
      }
      write_output(vout, t.csv());
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
