// reconlab command-line driver: synthetic generation, reconstruction,
// heuristics, evaluation, model selection, posterior predictive checks,
// single-edge curves, spike ingestion, and parameter sweeps.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reconlab/pipeline.hpp"

namespace fs = std::filesystem;
using namespace reconlab;

namespace {

struct global_opts {
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out = "out";
  bool out_set = false;  // --out given on the command line
};

std::string out_path(const global_opts& g, const std::string& name) {
  fs::create_directories(g.out);
  return (fs::path(g.out) / name).string();
}

ExperimentConfig load_cfg(const std::string& path, global_opts& g) {
  ExperimentConfig cfg = load_config(path);
  if (g.seed) {
    cfg.seed = *g.seed;
    cfg.sampler.seed = *g.seed;
  }
  if (!g.out_set && !cfg.out_dir.empty()) g.out = cfg.out_dir;  // --out wins
  return cfg;
}

TimeSeries load_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open series file: " + path);
  return read_series(in);
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  return read_edge_list(in);
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {  // lo:hi:count
    double lo, hi;
    int count;
    char c1, c2;
    std::istringstream in(text);
    if (!(in >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1)
      throw std::runtime_error("bad grid spec: " + text);
    for (int k = 0; k < count; ++k)
      grid.push_back(count == 1 ? lo : lo + (hi - lo) * double(k) / double(count - 1));
    return grid;
  }
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ','))
    if (!item.empty()) grid.push_back(std::stod(item));
  if (grid.empty()) throw std::runtime_error("empty grid spec");
  return grid;
}

json metrics_json(const Graph& truth, const EdgeMarginals& m) {
  json j;
  loss_result loss = posterior_loss(truth, m);
  j["posterior_loss"] = loss.bits;
  j["loss_clipped"] = loss.clipped;
  j["mean_error"] = mean_error(truth, m);
  try {
    j["auc"] = auc(truth, m);
  } catch (const std::exception&) {
    j["auc"] = nullptr;  // single-class truth
  }
  return j;
}

candidate_spec candidate_from_json(const json& j, const ExperimentConfig& base, int index) {
  candidate_spec c;
  c.name = j.contains("name") ? j.at("name").get<std::string>()
                              : "candidate_" + std::to_string(index);
  c.prior = j.contains("prior") ? prior_from_json(j.at("prior"), base.n) : base.prior;
  c.dyn = j.contains("dynamics") ? dynamics_from_json(j.at("dynamics")) : base.dyn;
  c.sampler = j.contains("sampler") ? sampler_from_json(j.at("sampler")) : base.sampler;
  c.sampler.seed = base.seed;
  return c;
}

int cmd_generate(const std::string& config, global_opts g) {
  ExperimentConfig cfg = load_cfg(config, g);
  fs::create_directories(g.out);
  run_generation(cfg, g.out);
  std::cout << "wrote " << cfg.datasets << " dataset(s) to " << g.out << "\n";
  return 0;
}

int cmd_reconstruct(const std::string& config, const std::string& series,
                    const std::string& truth, global_opts g) {
  ExperimentConfig cfg = load_cfg(config, g);
  TimeSeries x = load_series(series);
  if (x.n != cfg.n) throw std::runtime_error("series size disagrees with config n");
  reconstruction_report rep =
      reconstruct(x, cfg.prior, cfg.dyn, cfg.sampler, cfg.estimator, g.threads);
  if (rep.failed) throw std::runtime_error("reconstruction failed: " + rep.error);
  std::ofstream mcsv(out_path(g, "marginals.csv"));
  write_marginals_csv(mcsv, rep.marginals);
  write_json(out_path(g, "info_report.json"), info_report_json(rep));
  if (!truth.empty()) {
    Graph gt = load_graph(truth);
    json mj = metrics_json(gt, rep.marginals);
    mj["jaccard"] = posterior_jaccard(rep.pooled, gt);
    write_json(out_path(g, "metrics.json"), mj);
  }
  std::cout << "log-evidence " << rep.log_evidence.value << "  psi " << rep.psi.value << "\n";
  return 0;
}

int cmd_heuristic(const std::string& series, const std::string& method,
                  const std::string& truth, const global_opts& g) {
  TimeSeries x = load_series(series);
  heuristic_kind kind;
  if (method == "corr")
    kind = heuristic_kind::correlation;
  else if (method == "granger")
    kind = heuristic_kind::granger;
  else if (method == "te")
    kind = heuristic_kind::transfer_entropy;
  else
    throw std::runtime_error("unknown method (use corr|granger|te): " + method);
  ScoreMatrix s = heuristic_scores(x, kind);
  std::ofstream out(out_path(g, "scores.csv"));
  out << std::setprecision(17) << "i,j,score\n";
  for (int i = 0; i < x.n; ++i)
    for (int j = i + 1; j < x.n; ++j) out << i << "," << j << "," << s.at(i, j) << "\n";
  if (kind == heuristic_kind::granger) {
    std::ofstream dir(out_path(g, "scores_directed.csv"));
    dir << std::setprecision(17) << "source,target,literal\n";
    granger_result gr = granger_scores(x);
    for (int i = 0; i < x.n; ++i)
      for (int j = 0; j < x.n; ++j)
        if (i != j) dir << j << "," << i << "," << gr.literal.at(i, j) << "\n";
  }
  if (!truth.empty()) {
    Graph gt = load_graph(truth);
    std::vector<double> sc;
    std::vector<int> lb;
    for (int i = 0; i < x.n; ++i)
      for (int j = i + 1; j < x.n; ++j) {
        sc.push_back(s.at(i, j));
        lb.push_back(gt.instances(i, j) > 0 ? 1 : 0);
      }
    json j;
    j["method"] = method;
    j["degenerate"] = s.degenerate;
    try {
      j["auc"] = auc(sc, lb);
    } catch (const std::exception&) {
      j["auc"] = nullptr;
    }
    write_json(out_path(g, "heuristic_metrics.json"), j);
  }
  return 0;
}

int cmd_evaluate(const std::string& marginals, const std::string& truth,
                 const global_opts& g) {
  Graph gt = load_graph(truth);
  graph_mode mode = gt.is_simple() ? graph_mode::simple : graph_mode::multi;
  std::ifstream min(marginals);
  if (!min) throw std::runtime_error("cannot open marginals file: " + marginals);
  EdgeMarginals m = read_marginals_csv(min, gt.n_nodes(), mode);
  json j = metrics_json(gt, m);
  // point-estimate jaccard from the marginals thresholded at 1/2
  Graph point(gt.n_nodes(), mode);
  for (long long k = 0; k < (long long)m.pi.size(); ++k) {
    node_pair p = nth_pair(mode, m.n, k);
    if (m.pi[k] > 0.5) point.toggle_edge(p.i, p.j, +1);
  }
  j["jaccard_threshold"] = jaccard(point, gt);
  write_json(out_path(g, "metrics.json"), j);
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_select(const std::string& config, const std::string& series, global_opts g) {
  ExperimentConfig cfg = load_cfg(config, g);
  if (!cfg.raw.contains("candidates") || cfg.raw.at("candidates").empty())
    throw std::runtime_error("config: select needs a non-empty candidates array");
  TimeSeries x = load_series(series);
  std::vector<candidate_spec> cands;
  int index = 0;
  for (const auto& cj : cfg.raw.at("candidates"))
    cands.push_back(candidate_from_json(cj, cfg, index++));
  ModelSelectionReport rep = run_model_selection(x, cands, cfg.estimator, g.threads);
  write_json(out_path(g, "selection.json"), selection_json(rep));
  std::ofstream scsv(out_path(g, "selection.csv"));
  scsv << std::setprecision(17)
       << "name,log_evidence,log_evidence_se,psi,psi_se,lambda,failed,selected\n";
  for (size_t k = 0; k < rep.reports.size(); ++k) {
    const auto& r = rep.reports[k];
    scsv << rep.names[k] << "," << r.log_evidence.value << "," << r.log_evidence.se << ","
         << r.psi.value << "," << r.psi.se << "," << r.lambda.value << "," << (r.failed ? 1 : 0)
         << "," << (int(k) == rep.selected ? 1 : 0) << "\n";
  }
  if (rep.selected >= 0)
    std::cout << "selected: " << rep.names[rep.selected] << "\n";
  else
    std::cout << "selection failed: no surviving candidate\n";
  return rep.selected >= 0 ? 0 : 1;
}

int cmd_ppc(const std::string& config, const std::string& series, int replicates,
            global_opts g) {
  ExperimentConfig cfg = load_cfg(config, g);
  TimeSeries x = load_series(series);
  reconstruction_report rep =
      reconstruct(x, cfg.prior, cfg.dyn, cfg.sampler, cfg.estimator, g.threads);
  if (rep.failed) throw std::runtime_error("reconstruction failed: " + rep.error);
  auto rng = make_rng(derive_seed(cfg.seed, seed_stream::ppc), 0);
  int K = replicates > 0 ? replicates : cfg.ppc_replicates;
  ppc_report pr = posterior_predictive_check(rep.pooled, rep.marginals, x, K, rng);
  write_json(out_path(g, "ppc.json"), ppc_json(pr));
  std::cout << (pr.extreme ? "extreme statistic detected\n" : "all statistics inside band\n");
  return 0;
}

int cmd_single_edge(double p, double q, double r, int T, const std::string& sweep_var,
                    const std::string& grid, const global_opts& g) {
  single_edge_model m{p, q, r, T};
  m.validate();
  if (sweep_var.empty()) {
    json j;
    j["psi"] = single_edge_psi(m);
    j["mutual_information"] = single_edge_mutual_information(m);
    j["conditional_entropy"] = single_edge_conditional_entropy(m);
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::ofstream out(out_path(g, "single_edge.csv"));
  write_single_edge_curve(out, m, sweep_var, parse_grid(grid));
  return 0;
}

int cmd_ingest(const std::string& spikes_file, double duration, long long steps,
               double mean_ext, int segments, const global_opts& g) {
  std::ifstream in(spikes_file);
  if (!in) throw std::runtime_error("cannot open spikes file: " + spikes_file);
  std::vector<std::vector<double>> spikes;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::vector<double> unit;
    double t;
    while (row >> t) unit.push_back(t);
    spikes.push_back(std::move(unit));
  }
  auto rng = make_rng(g.seed ? *g.seed : 1, 0);
  auto segs = ingest_spike_data(spikes, duration, steps, mean_ext, segments, rng);
  for (size_t s = 0; s < segs.size(); ++s) {
    std::ofstream out(out_path(g, "segment_" + std::to_string(s) + ".txt"));
    write_series(out, segs[s]);
  }
  std::cout << "wrote " << segs.size() << " segment(s) to " << g.out << "\n";
  return 0;
}

int cmd_sweep(const std::string& config, global_opts g) {
  ExperimentConfig cfg = load_cfg(config, g);
  sweep_result res = run_sweep(cfg, g.threads);
  std::ofstream rcsv(out_path(g, "sweep_realizations.csv"));
  write_sweep_realizations_csv(rcsv, res);
  std::ofstream pcsv(out_path(g, "sweep_points.csv"));
  write_sweep_points_csv(pcsv, res, cfg.seed);
  std::cout << "wrote sweep tables to " << g.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reconlab: bayesian network reconstruction from binary time series"};
  app.require_subcommand(1);
  app.fallthrough();

  global_opts g;
  std::uint64_t seed_raw = 0;
  auto* seed_opt = app.add_option("--seed", seed_raw, "master seed (overrides config)");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  auto* out_opt = app.add_option("--out", g.out, "output directory");

  std::string config, series, truth, marginals, method = "corr", sweep_var, grid;
  std::string spikes_file;
  double p = 0.5, q = 0.5, r = 0.5, duration = 0.0, mean_ext = 0.0;
  int T = 1, replicates = 0, segments = 1;
  long long steps = 0;

  auto* c_gen = app.add_subcommand("generate", "sample graphs and simulate time series");
  c_gen->add_option("--config", config)->required();

  auto* c_rec = app.add_subcommand("reconstruct", "posterior reconstruction of one series");
  c_rec->add_option("--config", config)->required();
  c_rec->add_option("--series", series)->required();
  c_rec->add_option("--truth", truth);

  auto* c_heu = app.add_subcommand("heuristic", "correlation / granger / transfer-entropy scores");
  c_heu->add_option("--series", series)->required();
  c_heu->add_option("--method", method, "corr|granger|te");
  c_heu->add_option("--truth", truth);

  auto* c_eval = app.add_subcommand("evaluate", "score marginals against a known graph");
  c_eval->add_option("--marginals", marginals)->required();
  c_eval->add_option("--truth", truth)->required();

  auto* c_sel = app.add_subcommand("select", "evidence-based model selection");
  c_sel->add_option("--config", config)->required();
  c_sel->add_option("--series", series)->required();

  auto* c_ppc = app.add_subcommand("ppc", "posterior predictive check");
  c_ppc->add_option("--config", config)->required();
  c_ppc->add_option("--series", series)->required();
  c_ppc->add_option("--replicates", replicates);

  auto* c_se = app.add_subcommand("single-edge", "closed-form single-edge curves");
  c_se->add_option("--p", p);
  c_se->add_option("--q", q);
  c_se->add_option("--r", r);
  c_se->add_option("--T", T);
  c_se->add_option("--sweep", sweep_var, "q|r|p|T");
  c_se->add_option("--grid", grid, "comma list or lo:hi:count");

  auto* c_ing = app.add_subcommand("ingest-spikes", "binarize spike trains into segments");
  c_ing->add_option("--spikes", spikes_file)->required();
  c_ing->add_option("--duration", duration)->required();
  c_ing->add_option("--steps", steps)->required();
  c_ing->add_option("--mean-extension", mean_ext);
  c_ing->add_option("--segments", segments);

  auto* c_swp = app.add_subcommand("sweep", "grid sweep with metric tables");
  c_swp->add_option("--config", config)->required();

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) g.seed = seed_raw;
  g.out_set = out_opt->count() > 0;

  try {
    if (*c_gen) return cmd_generate(config, g);
    if (*c_rec) return cmd_reconstruct(config, series, truth, g);
    if (*c_heu) return cmd_heuristic(series, method, truth, g);
    if (*c_eval) return cmd_evaluate(marginals, truth, g);
    if (*c_sel) return cmd_select(config, series, g);
    if (*c_ppc) return cmd_ppc(config, series, replicates, g);
    if (*c_se) return cmd_single_edge(p, q, r, T, sweep_var, grid, g);
    if (*c_ing) return cmd_ingest(spikes_file, duration, steps, mean_ext, segments, g);
    if (*c_swp) return cmd_sweep(config, g);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
