#pragma once

// Figure-reproduction and single-shot commands. Each command reads its
// parameters from a ParamSet, writes CSV files into the output directory and
// records results in the run manifest.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cli/io.hpp"
#include "qlidar/qlidar.hpp"

namespace qlidar::cli {

namespace fs = std::filesystem;

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"benchmark", "heatmap", "parametric", "fading", "metrics", "threshold"};
  return names;
}

inline constexpr const char* kDefaultScenarios = "5:0.1,5:2.0,10:0.1,20:0.1,20:2.0";

// Built-in defaults per command; the key set is also the set of accepted keys.
inline KeyValues command_defaults(const std::string& command) {
  KeyValues d{
      {"n-tot", "10"},  {"n-th", "0.1"}, {"lambda", "0.5"},   {"eta", ""},           {"eta-det", "1"},
      {"v-el", "0"},    {"seed", std::to_string(kDefaultSeed)}, {"out", "."},          {"grid-step", "0.01"},
      {"realizations", "10000"}, {"threads", "1"}, {"plot-script", "false"},
  };
  if (command == "benchmark") {
    d["n-tot"] = "5";
    d["n-th"] = "2";
    d["eta-min"] = "0.001";
    d["eta-max"] = "1";
    d["eta-steps"] = "200";
  } else if (command == "heatmap" || command == "parametric") {
    d["eta-min"] = "0";
    d["eta-max"] = "1";
    d["lambda-max"] = "0.95";
    if (command == "parametric") d["scenarios"] = kDefaultScenarios;
  } else if (command == "fading") {
    d["alpha"] = "2";
    d["beta"] = "3";
    d["quantile"] = "0.9";
  } else if (command == "metrics") {
    d["eta"] = "1";
    d["state0"] = "";
    d["state1"] = "";
    d["variance-model"] = "h1";
  } else if (command == "threshold") {
    d["fd-step"] = "1e-6";
  }
  return d;
}

inline unsigned thread_count(const ParamSet& p) {
  const auto t = p.u64("threads");
  if (t < 1 || t > 1024) throw InvalidParameter("--threads must lie in [1, 1024]");
  return static_cast<unsigned>(t);
}

// Channel from the common flags; electronic noise is folded into n_th.
inline ChannelParams channel_from(const ParamSet& p, double eta) {
  ChannelParams c{eta, p.real("n-th"), p.real("eta-det"), p.real("v-el")};
  require_valid(c);
  return c.v_el > 0.0 ? with_effective_noise(c) : c;
}

inline fs::path prepare_out_dir(const ParamSet& p) {
  const fs::path dir = p.text("out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  return dir;
}

inline void write_plot_script(const fs::path& dir, const std::string& command, const std::string& body,
                              RunManifest& m) {
  const fs::path path = dir / (command + "_plot.py");
  write_text(path,
             "# Plot recipe for `qlidar " + command + "` outputs. Run from the output directory.\n"
             "import csv\nimport matplotlib.pyplot as plt\n\n"
             "def load(name):\n    with open(name) as f:\n        rows = list(csv.DictReader(f))\n"
             "    return {k: [float(r[k]) for r in rows] for k in rows[0]}\n\n" +
                 body);
  m.add_output(path);
}

// ---------------------------------------------------------------------------

inline void run_benchmark(const ParamSet& p, RunManifest& m) {
  const double n_tot = p.real("n-tot");
  const double lambda = p.real("lambda");
  std::vector<double> etas;
  if (p.is_set("eta")) {
    etas = {p.real("eta")};
  } else {
    const double lo = p.real("eta-min");
    const double hi = p.real("eta-max");
    const auto steps = p.u64("eta-steps");
    if (steps < 1) throw InvalidParameter("--eta-steps must be >= 1");
    if (steps == 1) {
      etas = {lo};
    } else {
      etas = uniform_grid(lo, hi, (hi - lo) / static_cast<double>(steps - 1));
      etas.resize(steps);
    }
  }
  require_valid(ProbeBudget{n_tot, lambda});
  std::vector<MetricReport> rows(etas.size());
  parallel_for(etas.size(), thread_count(p), [&](std::size_t i) {
    rows[i] = w2_score(lambda, n_tot, channel_from(p, etas[i]));
  });
  const fs::path dir = prepare_out_dir(p);
  const fs::path path = dir / "benchmark.csv";
  CsvWriter csv(path, {"eta", "w2_sq", "xi_qbb_overlap", "xi_qbb_proxy", "xi_qcb", "snr_sq_opt"});
  std::size_t saturated = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const MetricReport& r = rows[i];
    csv.row({etas[i], r.w2_sq, r.xi_qbb, r.xi_qbb_proxy, r.xi_qcb, r.snr_sq_opt});
    saturated += r.xi_qbb_saturated || r.xi_qbb_proxy_saturated || r.xi_qcb_saturated;
  }
  m.add_output(path);
  m.set("rows", std::to_string(rows.size()));
  m.set("saturated_rows", std::to_string(saturated));
  if (p.flag("plot-script")) {
    write_plot_script(dir, "benchmark",
                      "d = load('benchmark.csv')\nfig, ax = plt.subplots()\n"
                      "ax.plot(d['eta'], d['w2_sq'], label='W2^2')\nax2 = ax.twinx()\n"
                      "ax2.plot(d['eta'], d['xi_qbb_overlap'], 'r--', label='xi_QBB')\n"
                      "ax.set_xlabel('eta')\nfig.legend()\nfig.savefig('benchmark.png', dpi=150)\n",
                      m);
  }
}

inline std::string optional_num(const std::optional<double>& v) { return v ? num(*v) : "none"; }

inline void run_heatmap(const ParamSet& p, RunManifest& m) {
  const double step = p.real("grid-step");
  const double n_tot = p.real("n-tot");
  const ChannelParams channel = channel_from(p, 1.0);
  const AllocationGrid g = compute_allocation_grid(n_tot, channel, uniform_grid(p.real("eta-min"), p.real("eta-max"), step),
                                                   uniform_grid(0.0, p.real("lambda-max"), step), thread_count(p));
  const fs::path dir = prepare_out_dir(p);
  const fs::path scores = dir / "heatmap_scores.csv";
  {
    CsvWriter csv(scores, {"eta", "lambda", "w2_sq"});
    for (std::size_t i = 0; i < g.eta_grid.size(); ++i) {
      for (std::size_t j = 0; j < g.lambda_grid.size(); ++j) csv.row({g.eta_grid[i], g.lambda_grid[j], g.score(i, j)});
    }
  }
  m.add_output(scores);
  const fs::path trace = dir / "heatmap_lambda_opt.csv";
  {
    CsvWriter csv(trace, {"eta", "lambda_opt"});
    for (std::size_t i = 0; i < g.eta_grid.size(); ++i) csv.row({g.eta_grid[i], g.lambda_opt[i]});
  }
  m.add_output(trace);
  m.set("transition_eta_empirical", optional_num(transition_eta(g)));
  if (n_tot > 0.0) {
    const Threshold th = eta_critical(n_tot, channel.n_th);
    m.set("eta_critical", th.value);
    m.set("eta_critical_reachable", th.reachable ? "true" : "false");
  }
  if (p.flag("plot-script")) {
    write_plot_script(dir, "heatmap",
                      "import numpy as np\nd = load('heatmap_scores.csv')\nt = load('heatmap_lambda_opt.csv')\n"
                      "etas = sorted(set(d['eta'])); lams = sorted(set(d['lambda']))\n"
                      "z = np.array(d['w2_sq']).reshape(len(etas), len(lams)).T\n"
                      "fig, ax = plt.subplots()\n"
                      "ax.pcolormesh(etas, lams, z, shading='auto')\n"
                      "ax.plot(t['eta'], t['lambda_opt'], 'w--')\n"
                      "ax.set_xlabel('eta'); ax.set_ylabel('lambda')\nfig.savefig('heatmap.png', dpi=150)\n",
                      m);
  }
}

struct Scenario {
  double n_tot = 0.0;
  double n_th = 0.0;
};

inline std::vector<Scenario> parse_scenarios(const std::string& text) {
  std::vector<Scenario> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw InvalidParameter("invalid scenario '" + item + "' (expected n_tot:n_th)");
    KeyValues kv{{"scenario.n_tot", trim(item.substr(0, colon))}, {"scenario.n_th", trim(item.substr(colon + 1))}};
    const ParamSet ps({}, {}, kv);
    out.push_back({ps.real("scenario.n_tot"), ps.real("scenario.n_th")});
  }
  if (out.empty()) throw InvalidParameter("--scenarios is empty");
  return out;
}

inline void run_parametric(const ParamSet& p, RunManifest& m) {
  const double step = p.real("grid-step");
  const auto scenarios = parse_scenarios(p.text("scenarios"));
  const auto eta_grid = uniform_grid(p.real("eta-min"), p.real("eta-max"), step);
  const auto lambda_grid = uniform_grid(0.0, p.real("lambda-max"), step);
  const unsigned threads = thread_count(p);
  const fs::path dir = prepare_out_dir(p);
  const fs::path path = dir / "parametric.csv";
  CsvWriter csv(path, {"n_tot", "n_th", "eta", "lambda_opt"});
  for (const Scenario& s : scenarios) {
    ChannelParams c{1.0, s.n_th, p.real("eta-det"), p.real("v-el")};
    require_valid(c);
    const AllocationGrid g = compute_allocation_grid(s.n_tot, c, eta_grid, lambda_grid, threads);
    for (std::size_t i = 0; i < g.eta_grid.size(); ++i) csv.row({s.n_tot, s.n_th, g.eta_grid[i], g.lambda_opt[i]});
    const std::string tag = "scenario_" + num(s.n_tot) + "_" + num(s.n_th);
    m.set(tag + ".transition_eta_empirical", optional_num(transition_eta(g)));
    if (s.n_tot > 0.0) m.set(tag + ".eta_critical", eta_critical(s.n_tot, s.n_th).value);
  }
  m.add_output(path);
  if (p.flag("plot-script")) {
    write_plot_script(dir, "parametric",
                      "d = load('parametric.csv')\nfig, ax = plt.subplots()\n"
                      "for key in sorted(set(zip(d['n_tot'], d['n_th']))):\n"
                      "    idx = [i for i in range(len(d['eta'])) if (d['n_tot'][i], d['n_th'][i]) == key]\n"
                      "    ax.plot([d['eta'][i] for i in idx], [d['lambda_opt'][i] for i in idx],\n"
                      "            label=f'N_tot={key[0]:g}, n_th={key[1]:g}')\n"
                      "ax.set_xlabel('eta'); ax.set_ylabel('lambda_opt'); ax.legend()\n"
                      "fig.savefig('parametric.png', dpi=150)\n",
                      m);
  }
}

inline void write_histogram(const fs::path& path, const stats::Histogram& h) {
  CsvWriter csv(path, {"bin_lo", "bin_hi", "density"});
  for (std::size_t k = 0; k < h.bins(); ++k) csv.row({h.edges[k], h.edges[k + 1], h.densities[k]});
}

inline void summarize_into(RunManifest& m, const std::string& prefix, const MetricSummary& s) {
  m.set(prefix + ".mean", s.mean);
  m.set(prefix + ".variance", s.variance);
  m.set(prefix + ".cv", s.cv);
  m.set(prefix + ".median", s.median);
  m.set(prefix + ".iqr_over_median", s.iqr_over_median);
  m.set(prefix + ".bins", std::to_string(s.histogram.bins()));
}

inline FadingConfig fading_config(const ParamSet& p) {
  FadingConfig c;
  c.alpha = p.real("alpha");
  c.beta = p.real("beta");
  c.n_realizations = p.u64("realizations");
  c.seed = p.u64("seed");
  c.probe = {p.real("n-tot"), p.real("lambda")};
  c.n_th = p.real("n-th");
  return c;
}

inline void run_fading(const ParamSet& p, RunManifest& m) {
  const FadingConfig config = fading_config(p);
  const double q = p.real("quantile");
  const FadingEnsemble e = run_ensemble(config, thread_count(p));
  const fs::path dir = prepare_out_dir(p);
  const fs::path raw = dir / "fading_realizations.csv";
  {
    CsvWriter csv(raw, {"realization", "eta", "w2_sq", "xi_qbb"});
    for (std::size_t i = 0; i < e.etas.size(); ++i) {
      csv.row({std::to_string(i), num(e.etas[i]), num(e.w2_sq[i]), num(e.xi_qbb[i])});
    }
  }
  m.add_output(raw);
  for (auto [name, summary] : {std::pair{"eta", &e.summary.eta}, std::pair{"w2_sq", &e.summary.w2_sq},
                               std::pair{"xi_qbb", &e.summary.xi_qbb}}) {
    const fs::path h = dir / (std::string("fading_hist_") + name + ".csv");
    write_histogram(h, summary->histogram);
    m.add_output(h);
    summarize_into(m, std::string("summary.") + name, *summary);
  }
  m.set("summary.pearson_w2_eta", e.summary.pearson_w2_eta);
  m.set("summary.pearson_qbb_eta", e.summary.pearson_qbb_eta);
  m.set("summary.saturated_count", std::to_string(e.summary.saturated_count));
  if (e.summary.xi_qbb.iqr_over_median != 0.0) {
    m.set("summary.dynamic_range_contrast", e.summary.w2_sq.iqr_over_median / e.summary.xi_qbb.iqr_over_median);
  }
  for (auto [name, metric] : {std::pair{"w2", SelectionMetric::w2}, std::pair{"qbb", SelectionMetric::qbb}}) {
    const SelectionReport r = post_select(e, metric, q);
    const std::string prefix = std::string("selection.") + name;
    m.set(prefix + ".threshold", r.threshold);
    m.set(prefix + ".mean_eta", r.mean_eta_selected);
    m.set(prefix + ".efficiency", r.efficiency);
    m.set(prefix + ".degenerate", r.degenerate ? "true" : "false");
  }
  if (p.flag("plot-script")) {
    write_plot_script(dir, "fading",
                      "fig, axes = plt.subplots(1, 3, figsize=(12, 3.5))\n"
                      "for ax, name in zip(axes, ['eta', 'w2_sq', 'xi_qbb']):\n"
                      "    h = load(f'fading_hist_{name}.csv')\n"
                      "    ax.stairs(h['density'], h['bin_lo'] + h['bin_hi'][-1:])\n"
                      "    ax.set_title(name)\n"
                      "fig.tight_layout()\nfig.savefig('fading.png', dpi=150)\n",
                      m);
  }
}

// "mu_q,mu_p,s_qq,s_qp,s_pp"
inline GaussianState parse_state(const std::string& name, const std::string& text) {
  static const char* fields[] = {"mu_q", "mu_p", "s_qq", "s_qp", "s_pp"};
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(trim(item));
  if (parts.size() != 5) {
    throw InvalidParameter("--" + name + " needs 5 comma-separated fields mu_q,mu_p,s_qq,s_qp,s_pp");
  }
  KeyValues kv;
  for (int i = 0; i < 5; ++i) kv[name + "." + fields[i]] = parts[static_cast<std::size_t>(i)];
  const ParamSet ps({}, {}, kv);
  const auto f = [&](int i) { return ps.real(name + "." + fields[i]); };
  GaussianState s{{f(0), f(1)}, {f(2), f(3), f(4)}};
  if (auto v = validate(s); !v) throw InvalidParameter("--" + name + " violates " + v.violated);
  return s;
}

inline std::vector<std::pair<std::string, std::string>> report_rows(const MetricReport& r) {
  const auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  return {{"w2_sq", num(r.w2_sq)},
          {"displacement_term", num(r.displacement_term)},
          {"bures_sq", num(r.bures_sq)},
          {"fidelity", num(r.fidelity)},
          {"xi_qbb", num(r.xi_qbb)},
          {"xi_qbb_proxy", num(r.xi_qbb_proxy)},
          {"xi_qcb", num(r.xi_qcb)},
          {"s_opt", num(r.s_opt)},
          {"snr_sq_opt", num(r.snr_sq_opt)},
          {"theta_opt", num(r.theta_opt)},
          {"xi_qbb_saturated", b(r.xi_qbb_saturated)},
          {"xi_qcb_saturated", b(r.xi_qcb_saturated)},
          {"snr_degenerate", b(r.snr_degenerate)}};
}

inline void run_metrics(const ParamSet& p, RunManifest& m, std::ostream& out) {
  MetricOptions opt;
  const std::string vm = p.text("variance-model");
  if (vm == "max") {
    opt.variance = VarianceModel::max_h0_h1;
  } else if (vm != "h1") {
    throw InvalidParameter("invalid value for --variance-model: '" + vm + "' (expected h1 or max)");
  }
  GaussianState s0, s1;
  if (p.is_set("state0") || p.is_set("state1")) {
    if (!p.is_set("state0") || !p.is_set("state1")) throw InvalidParameter("--state0 and --state1 must be given together");
    s0 = parse_state("state0", p.text("state0"));
    s1 = parse_state("state1", p.text("state1"));
    m.set("mode", "states");
  } else {
    const ChannelParams c = channel_from(p, p.real("eta"));
    s0 = thermal_state(c.n_th);
    s1 = received_probe(p.real("lambda"), p.real("n-tot"), c);
    m.set("mode", "budget");
  }
  const MetricReport r = metric_report(s0, s1, opt);
  for (const auto& [k, v] : report_rows(r)) {
    out << k << " = " << v << '\n';
    m.set("result." + k, v);
  }
}

inline void run_threshold(const ParamSet& p, RunManifest& m, std::ostream& out) {
  const double n_tot = p.real("n-tot");
  ChannelParams c{p.is_set("eta") ? p.real("eta") : 0.0, p.real("n-th"), p.real("eta-det"), p.real("v-el")};
  require_valid(c);
  const Threshold th = c.v_el > 0.0 ? eta_critical(n_tot, c) : eta_critical(n_tot, c.n_th);
  std::vector<std::pair<std::string, std::string>> rows{{"eta_critical", num(th.value)},
                                                        {"reachable", th.reachable ? "true" : "false"}};
  if (p.is_set("eta")) {
    const GradientDiagnostics g = gradient_diagnostics(n_tot, c.v_el > 0.0 ? with_effective_noise(c) : c, p.real("fd-step"));
    rows.insert(rows.end(), {{"d_disp_dlambda", num(g.d_disp_dlambda)},
                             {"d_disp_fd", num(g.d_disp_fd)},
                             {"d_cov_dlambda_approx", num(g.d_cov_dlambda_approx)},
                             {"d_cov_fd", num(g.d_cov_fd)},
                             {"cov_ratio", optional_num(g.cov_ratio)},
                             {"eta_c_empirical", optional_num(g.eta_c_empirical)}});
  }
  for (const auto& [k, v] : rows) {
    out << k << " = " << v << '\n';
    m.set("result." + k, v);
  }
}

inline void run_command(const std::string& command, const ParamSet& p, RunManifest& m, std::ostream& out) {
  if (command == "benchmark") return run_benchmark(p, m);
  if (command == "heatmap") return run_heatmap(p, m);
  if (command == "parametric") return run_parametric(p, m);
  if (command == "fading") return run_fading(p, m);
  if (command == "metrics") return run_metrics(p, m, out);
  if (command == "threshold") return run_threshold(p, m, out);
  throw InvalidParameter("unknown command '" + command + "'");
}

}  // namespace qlidar::cli
