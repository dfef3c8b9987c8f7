#pragma once

// experiment orchestration: JSON config parsing, synthetic generation,
// multi-chain reconstruction with information reports, evidence-based model
// selection, posterior predictive checks, spike-train ingestion, and parameter
// sweeps with CSV emission.

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynamics.hpp"
#include "graph.hpp"
#include "heuristics.hpp"
#include "infotheory.hpp"
#include "metrics.hpp"
#include "priors.hpp"
#include "sampler.hpp"
#include "series.hpp"
#include "single_edge.hpp"
#include "util.hpp"

namespace reconlab {

using nlohmann::json;

// fixed stream tags for the master-seed split (all randomness descends from
// the one master seed through derive_seed chains)
namespace seed_stream {
constexpr std::uint64_t generation = 101;
constexpr std::uint64_t chains = 202;
constexpr std::uint64_t ppc = 303;
constexpr std::uint64_t sweep = 404;
constexpr std::uint64_t bootstrap = 505;
}  // namespace seed_stream

// ---- config parsing -----------------------------------------------------------------

inline DynamicsModel dynamics_from_json(const json& j) {
  if (!j.contains("kind")) throw std::runtime_error("config: dynamics.kind missing");
  DynamicsModel m;
  m.kind = dyn_kind_from_string(j.at("kind").get<std::string>());
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "kind") continue;
    if (key == "glauber_convention") {
      std::string v = it.value().get<std::string>();
      if (v == "ferro")
        m.conv = glauber_convention::ferro;
      else if (v == "table_literal")
        m.conv = glauber_convention::table_literal;
      else
        throw std::runtime_error("config: unknown glauber_convention '" + v + "'");
      continue;
    }
    if (key == "alpha0") {
      m.alpha0 = it.value().get<double>();
      continue;
    }
    if (key == "beta0") {
      m.beta0 = it.value().get<double>();
      continue;
    }
    set_param(m, key, it.value().get<double>());  // throws on unknown names
  }
  if (!params_in_support(m))
    throw std::runtime_error("config: dynamics parameters outside support");
  return m;
}

inline PriorModel prior_from_json(const json& j, int n) {
  if (!j.contains("kind")) throw std::runtime_error("config: prior.kind missing");
  prior_kind kind = prior_kind_from_string(j.at("kind").get<std::string>());
  edge_count_prior ec = edge_count_prior::delta(0);
  if (kind != prior_kind::cm) {
    if (!j.contains("edge_count")) throw std::runtime_error("config: prior.edge_count missing");
    const json& e = j.at("edge_count");
    std::string type = e.at("type").get<std::string>();
    if (type == "delta")
      ec = edge_count_prior::delta(e.at("e").get<long long>());
    else if (type == "geometric")
      ec = edge_count_prior::geometric(e.at("lambda_bar").get<double>());
    else
      throw std::runtime_error("config: unknown edge_count.type '" + type + "'");
  }
  switch (kind) {
    case prior_kind::er_simple: return PriorModel::er(n, ec, true);
    case prior_kind::er_multi: return PriorModel::er(n, ec, false);
    case prior_kind::cm: {
      if (!j.contains("degrees")) throw std::runtime_error("config: cm prior needs degrees");
      return PriorModel::config_model(j.at("degrees").get<std::vector<int>>());
    }
    case prior_kind::ucm: return PriorModel::ucm(n, ec);
    case prior_kind::sbm: return PriorModel::sbm(n, ec);
  }
  throw std::logic_error("prior_from_json: unreachable");
}

inline sampler_config sampler_from_json(const json& j) {
  sampler_config c;
  if (j.contains("chains")) c.chains = j.at("chains").get<int>();
  if (j.contains("sweeps")) c.sweeps = j.at("sweeps").get<long long>();
  if (j.contains("burn_in")) c.burn_in = j.at("burn_in").get<long long>();
  if (j.contains("thinning")) c.thinning = j.at("thinning").get<long long>();
  if (j.contains("sigma_phi")) c.sigma_phi = j.at("sigma_phi").get<double>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("infer_params"))
    c.infer_params = j.at("infer_params").get<std::vector<std::string>>();
  if (j.contains("graph_proposals_per_sweep"))
    c.graph_proposals_per_sweep = j.at("graph_proposals_per_sweep").get<long long>();
  if (j.contains("semi_greedy")) {
    const json& s = j.at("semi_greedy");
    if (s.contains("candidates_g")) c.candidates_g = s.at("candidates_g").get<int>();
    if (s.contains("candidates_phi")) c.candidates_phi = s.at("candidates_phi").get<int>();
    if (s.contains("patience")) c.patience = s.at("patience").get<int>();
    if (s.contains("max_rounds")) c.max_rounds = s.at("max_rounds").get<int>();
  }
  if (c.chains < 1 || c.sweeps < 1 || c.burn_in < 0 || c.thinning < 1)
    throw std::runtime_error("config: invalid sampler block");
  return c;
}

struct estimator_options {
  double pseudocount = 0.0;
  int quad_points = 41;
};

struct ExperimentConfig {
  int n = 0, T = 0, datasets = 1;
  std::uint64_t seed = 1;
  initial_state init = initial_state::bernoulli_half;
  DynamicsModel dyn;
  PriorModel prior;
  sampler_config sampler;
  estimator_options estimator;
  std::string sweep_variable;
  std::vector<double> sweep_grid;
  bool sweep_matched = true;  // apply the swept value to generation too
  int ppc_replicates = 100;
  std::string out_dir = "out";
  json raw;
};

inline ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  cfg.raw = j;
  if (!j.contains("n") || !j.contains("T"))
    throw std::runtime_error("config: n and T are required");
  cfg.n = j.at("n").get<int>();
  cfg.T = j.at("T").get<int>();
  if (cfg.n < 1 || cfg.T < 1) throw std::runtime_error("config: n and T must be positive");
  if (j.contains("datasets")) cfg.datasets = j.at("datasets").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("init")) cfg.init = initial_state_from_string(j.at("init").get<std::string>());
  if (!j.contains("dynamics")) throw std::runtime_error("config: dynamics block missing");
  cfg.dyn = dynamics_from_json(j.at("dynamics"));
  if (!j.contains("prior")) throw std::runtime_error("config: prior block missing");
  cfg.prior = prior_from_json(j.at("prior"), cfg.n);
  if (cfg.prior.n != cfg.n) throw std::runtime_error("config: prior size disagrees with n");
  if (j.contains("sampler")) cfg.sampler = sampler_from_json(j.at("sampler"));
  cfg.sampler.seed = cfg.seed;
  if (j.contains("estimator")) {
    const json& e = j.at("estimator");
    if (e.contains("pseudocount")) cfg.estimator.pseudocount = e.at("pseudocount").get<double>();
    if (e.contains("quad_points")) cfg.estimator.quad_points = e.at("quad_points").get<int>();
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    cfg.sweep_variable = s.at("variable").get<std::string>();
    cfg.sweep_grid = s.at("grid").get<std::vector<double>>();
    if (s.contains("target")) {
      std::string t = s.at("target").get<std::string>();
      if (t == "matched")
        cfg.sweep_matched = true;
      else if (t == "inference")
        cfg.sweep_matched = false;
      else
        throw std::runtime_error("config: sweep.target must be matched|inference");
    }
  }
  if (j.contains("ppc") && j.at("ppc").contains("replicates"))
    cfg.ppc_replicates = j.at("ppc").at("replicates").get<int>();
  if (j.contains("output")) cfg.out_dir = j.at("output").get<std::string>();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  in >> j;
  return parse_config(j);
}

// ---- generation -----------------------------------------------------------------------

struct generated_pair {
  Graph g;
  Partition part;
  bool has_partition = false;
  TimeSeries x;
};

inline std::vector<generated_pair> generate_ensemble(const ExperimentConfig& cfg) {
  std::vector<generated_pair> out;
  out.reserve(cfg.datasets);
  for (int k = 0; k < cfg.datasets; ++k) {
    auto rng_g = make_rng(derive_seed(cfg.seed, seed_stream::generation), 2 * k);
    auto rng_x = make_rng(derive_seed(cfg.seed, seed_stream::generation), 2 * k + 1);
    prior_draw d = sample_prior(cfg.prior, rng_g);
    TimeSeries x = simulate(d.g, cfg.dyn, cfg.T, rng_x, cfg.init);
    out.push_back({std::move(d.g), std::move(d.part), d.has_partition, std::move(x)});
  }
  return out;
}

// writes graph_k.txt / series_k.txt pairs plus a manifest
inline void run_generation(const ExperimentConfig& cfg, const std::string& dir) {
  auto pairs = generate_ensemble(cfg);
  json manifest;
  manifest["seed"] = cfg.seed;
  manifest["datasets"] = cfg.datasets;
  manifest["files"] = json::array();
  for (size_t k = 0; k < pairs.size(); ++k) {
    std::string gf = dir + "/graph_" + std::to_string(k) + ".txt";
    std::string xf = dir + "/series_" + std::to_string(k) + ".txt";
    std::ofstream go(gf);
    if (!go) throw std::runtime_error("cannot write " + gf);
    write_edge_list(go, pairs[k].g);
    std::ofstream xo(xf);
    if (!xo) throw std::runtime_error("cannot write " + xf);
    write_series(xo, pairs[k].x);
    manifest["files"].push_back({{"graph", gf}, {"series", xf}});
  }
  std::ofstream mo(dir + "/manifest.json");
  if (!mo) throw std::runtime_error("cannot write manifest");
  mo << manifest.dump(2) << "\n";
}

// ---- reconstruction ---------------------------------------------------------------------

struct chain_report {
  long long e_star = -1;  // frozen edge count when the semi-greedy stage ran
  double log_evidence = neg_inf;
  double info_gain = 0.0;      // clamped to [0, lambda]
  double info_gain_raw = 0.0;  // before clamping
  bool info_clamped = false;
  double lambda = 0.0;
  double psi = 0.0;
  bool psi_clamped_low = false, psi_clamped_high = false;
  double accept_rate = 0.0;
  evidence_estimate parts;
};

struct reconstruction_report {
  std::vector<chain_report> chains;
  std::vector<PosteriorSample> pooled;
  EdgeMarginals marginals;
  mc_estimate log_evidence, info_gain, lambda, psi;  // across chains
  bool failed = false;
  std::string error;
};

// full multi-chain reconstruction of one dataset. a geometric edge-count prior
// triggers the semi-greedy search first (from the empty graph), which fixes E
// for the subsequent fixed-E chain; a delta prior starts from a prior draw.
inline reconstruction_report reconstruct(const TimeSeries& x, const PriorModel& prior,
                                         const DynamicsModel& dyn, const sampler_config& cfg,
                                         const estimator_options& opt = {}, int threads = 1) {
  reconstruction_report rep;
  graph_mode mode = natural_mode(prior.kind);
  int n_chains = std::max(1, cfg.chains);
  std::vector<chain_report> chains(n_chains);
  std::vector<std::vector<PosteriorSample>> per_chain(n_chains);
  std::vector<std::string> errors(n_chains);
  parallel_for(n_chains, threads, [&](long long c) {
    try {
      sampler_config ccfg = cfg;
      ccfg.seed = derive_seed(cfg.seed, seed_stream::chains + (std::uint64_t)c);
      chain_report& cr = chains[c];
      std::vector<PosteriorSample> samples;
      if (!prior.ec.is_delta) {
        ChainState st(Graph(x.n, mode), prior, dyn, x, make_rng(ccfg.seed, 1));
        semi_greedy_result sg = semi_greedy_search(st, ccfg);
        cr.e_star = sg.e_star;
        samples = run_chain(x, prior, dyn, ccfg, &st);
        cr.accept_rate = st.proposed > 0 ? double(st.accepted) / double(st.proposed) : 0.0;
      } else {
        samples = run_chain(x, prior, dyn, ccfg);
      }
      if (samples.empty()) throw std::runtime_error("chain produced no samples");
      cr.parts = estimate_log_evidence(samples, ccfg.infer_params, mode);
      cr.log_evidence = cr.parts.log_evidence;
      double mean_neg_prior = 0.0;
      for (const auto& s : samples) mean_neg_prior -= s.log_prior;
      mean_neg_prior /= double(samples.size());
      // sbm: -log P(g) = -log P(g,b) - (-log P(b|g)); posterior partitions
      // sample P(b|g) exactly, so subtract their plug-in entropy
      cr.lambda = mean_neg_prior - cr.parts.partition_entropy;
      cr.info_gain_raw = mean_posterior_log_lik(samples) - cr.log_evidence;
      cr.info_gain = std::min(std::max(cr.info_gain_raw, 0.0), std::max(cr.lambda, 0.0));
      cr.info_clamped = cr.info_gain != cr.info_gain_raw;
      recon_index ri = reconstruction_index(cr.info_gain_raw, cr.lambda);
      cr.psi = ri.psi;
      cr.psi_clamped_low = ri.clamped_low;
      cr.psi_clamped_high = ri.clamped_high;
      per_chain[c] = std::move(samples);
    } catch (const std::exception& e) {
      errors[c] = e.what();
    }
  });
  for (int c = 0; c < n_chains; ++c)
    if (!errors[c].empty()) {
      rep.failed = true;
      rep.error = errors[c];
      return rep;
    }
  rep.chains = std::move(chains);
  for (auto& v : per_chain)
    for (auto& s : v) rep.pooled.push_back(std::move(s));
  rep.marginals = edge_marginals(rep.pooled, x.n, mode, opt.pseudocount);
  std::vector<double> ze, ig, la, ps;
  for (const auto& cr : rep.chains) {
    ze.push_back(cr.log_evidence);
    ig.push_back(cr.info_gain);
    la.push_back(cr.lambda);
    ps.push_back(cr.psi);
  }
  rep.log_evidence = mean_and_se(ze);
  rep.info_gain = mean_and_se(ig);
  rep.lambda = mean_and_se(la);
  rep.psi = mean_and_se(ps);
  return rep;
}

inline json info_report_json(const reconstruction_report& r) {
  json j;
  j["failed"] = r.failed;
  if (r.failed) {
    j["error"] = r.error;
    return j;
  }
  auto mc = [](const mc_estimate& e) { return json{{"mean", e.value}, {"se", e.se}}; };
  j["log_evidence"] = mc(r.log_evidence);
  j["info_gain"] = mc(r.info_gain);
  j["lambda"] = mc(r.lambda);
  j["psi"] = mc(r.psi);
  j["chains"] = json::array();
  for (const auto& c : r.chains) {
    json cj;
    cj["e_star"] = c.e_star;
    cj["log_evidence"] = c.log_evidence;
    cj["info_gain"] = c.info_gain;
    cj["info_gain_raw"] = c.info_gain_raw;
    cj["info_clamped"] = c.info_clamped;
    cj["lambda"] = c.lambda;
    cj["psi"] = c.psi;
    cj["psi_clamped_low"] = c.psi_clamped_low;
    cj["psi_clamped_high"] = c.psi_clamped_high;
    cj["accept_rate"] = c.accept_rate;
    cj["graph_entropy"] = c.parts.graph_entropy;
    cj["param_entropy"] = c.parts.param_entropy;
    cj["partition_entropy"] = c.parts.partition_entropy;
    j["chains"].push_back(cj);
  }
  j["samples"] = r.pooled.size();
  return j;
}

inline void write_marginals_csv(std::ostream& os, const EdgeMarginals& m) {
  os << "i,j,pi\n";
  os << std::setprecision(17);
  for (long long k = 0; k < (long long)m.pi.size(); ++k) {
    node_pair p = nth_pair(m.mode, m.n, k);
    os << p.i << "," << p.j << "," << m.pi[k] << "\n";
  }
}

inline EdgeMarginals read_marginals_csv(std::istream& is, int n, graph_mode mode) {
  EdgeMarginals m(n, mode);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("marginals csv: empty file");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    int i, j;
    double pi;
    if (!(row >> i >> j >> pi)) throw std::runtime_error("marginals csv: bad row: " + line);
    m.at(i, j) = pi;
  }
  return m;
}

// ---- model selection -----------------------------------------------------------------

struct candidate_spec {
  std::string name;
  PriorModel prior;
  DynamicsModel dyn;
  sampler_config sampler;
};

struct ModelSelectionReport {
  std::vector<std::string> names;
  std::vector<reconstruction_report> reports;
  int selected = -1;
  std::vector<std::vector<double>> log_bayes_factors;  // [a][b] = logZ_a - logZ_b
};

// evidence-maximizing candidate; ties by higher psi, then input order; failing
// candidates are flagged and skipped
inline ModelSelectionReport run_model_selection(const TimeSeries& x,
                                                const std::vector<candidate_spec>& candidates,
                                                const estimator_options& opt = {},
                                                int threads = 1) {
  if (candidates.empty()) throw std::invalid_argument("run_model_selection: no candidates");
  ModelSelectionReport rep;
  for (const auto& cand : candidates) {
    rep.names.push_back(cand.name);
    reconstruction_report r;
    try {
      r = reconstruct(x, cand.prior, cand.dyn, cand.sampler, opt, threads);
    } catch (const std::exception& e) {
      r.failed = true;
      r.error = e.what();
    }
    rep.reports.push_back(std::move(r));
  }
  for (size_t k = 0; k < rep.reports.size(); ++k) {
    const auto& r = rep.reports[k];
    if (r.failed) continue;
    if (rep.selected < 0) {
      rep.selected = int(k);
      continue;
    }
    const auto& best = rep.reports[rep.selected];
    if (r.log_evidence.value > best.log_evidence.value ||
        (r.log_evidence.value == best.log_evidence.value && r.psi.value > best.psi.value))
      rep.selected = int(k);
  }
  size_t d = rep.reports.size();
  rep.log_bayes_factors.assign(d, std::vector<double>(d, 0.0));
  for (size_t a = 0; a < d; ++a)
    for (size_t b = 0; b < d; ++b) {
      bool ok = !rep.reports[a].failed && !rep.reports[b].failed;
      rep.log_bayes_factors[a][b] =
          ok ? rep.reports[a].log_evidence.value - rep.reports[b].log_evidence.value
             : std::nan("");
    }
  return rep;
}

inline json selection_json(const ModelSelectionReport& r) {
  json j;
  j["candidates"] = json::array();
  for (size_t k = 0; k < r.reports.size(); ++k) {
    json c = info_report_json(r.reports[k]);
    c["name"] = r.names[k];
    c.erase("chains");  // keep the selection report compact
    j["candidates"].push_back(c);
  }
  j["selected"] = r.selected;
  if (r.selected >= 0) j["selected_name"] = r.names[r.selected];
  j["log2_bayes_factors"] = r.log_bayes_factors;
  return j;
}

// ---- posterior predictive checks -------------------------------------------------------

struct ppc_stat {
  std::string name;
  double observed = 0.0;
  double lo = 0.0, hi = 0.0;  // inclusive central 90% band of the replicates
  double quantile = 0.0;      // mid-rank quantile of the observed value
  bool inside = false;
};

struct ppc_report {
  std::vector<ppc_stat> stats;
  int replicates = 0;
  bool extreme = false;  // some statistic fell outside its band
};

// test statistics: overall rate, sd of per-node rates, mean equal-time
// correlation over posterior-connected (pi > 1/2) and disconnected pairs
inline std::array<double, 4> ppc_statistics(const TimeSeries& x, const EdgeMarginals& m) {
  int n = x.n, T = x.T;
  std::array<double, 4> out{0.0, 0.0, 0.0, 0.0};
  std::vector<double> rate(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < T; ++t) rate[i] += x(i, t);
    rate[i] /= double(T);
    out[0] += rate[i] / double(n);
  }
  double var = 0.0;
  for (int i = 0; i < n; ++i) var += (rate[i] - out[0]) * (rate[i] - out[0]);
  out[1] = n > 1 ? std::sqrt(var / double(n - 1)) : 0.0;
  ScoreMatrix corr = correlation_scores(x);
  double s_con = 0.0, s_dis = 0.0;
  long long n_con = 0, n_dis = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (m.at(i, j) > 0.5) {
        s_con += corr.at(i, j);
        n_con += 1;
      } else {
        s_dis += corr.at(i, j);
        n_dis += 1;
      }
    }
  out[2] = n_con > 0 ? s_con / double(n_con) : 0.0;
  out[3] = n_dis > 0 ? s_dis / double(n_dis) : 0.0;
  return out;
}

inline ppc_report posterior_predictive_check(const std::vector<PosteriorSample>& samples,
                                             const EdgeMarginals& marginals,
                                             const TimeSeries& x, int K,
                                             std::mt19937_64& rng) {
  if (K < 2) throw std::invalid_argument("posterior_predictive_check: K >= 2");
  if (samples.empty()) throw std::invalid_argument("posterior_predictive_check: no samples");
  static const char* names[4] = {"mean_rate", "rate_sd", "corr_connected", "corr_disconnected"};
  std::array<double, 4> obs = ppc_statistics(x, marginals);
  std::vector<std::array<double, 4>> reps(K);
  std::uniform_int_distribution<size_t> pick(0, samples.size() - 1);
  for (int k = 0; k < K; ++k) {
    const PosteriorSample& s = samples[pick(rng)];
    TimeSeries xr = simulate(s.g, s.model, x.T, rng, x.init);
    reps[k] = ppc_statistics(xr, marginals);
  }
  ppc_report rep;
  rep.replicates = K;
  int cut = int(std::ceil(0.05 * double(K)));
  for (int s = 0; s < 4; ++s) {
    std::vector<double> v(K);
    for (int k = 0; k < K; ++k) v[k] = reps[k][s];
    std::sort(v.begin(), v.end());
    ppc_stat st;
    st.name = names[s];
    st.observed = obs[s];
    st.lo = v[cut - 1];
    st.hi = v[K - cut];
    st.inside = obs[s] >= st.lo && obs[s] <= st.hi;
    double below = 0.0, equal = 0.0;
    for (double r : v) {
      below += r < obs[s];
      equal += r == obs[s];
    }
    st.quantile = (below + 0.5 * equal) / double(K);
    if (!st.inside) rep.extreme = true;
    rep.stats.push_back(st);
  }
  return rep;
}

inline json ppc_json(const ppc_report& r) {
  json j;
  j["replicates"] = r.replicates;
  j["extreme"] = r.extreme;
  j["stats"] = json::array();
  for (const auto& s : r.stats)
    j["stats"].push_back({{"name", s.name},
                          {"observed", s.observed},
                          {"band_lo", s.lo},
                          {"band_hi", s.hi},
                          {"quantile", s.quantile},
                          {"inside", s.inside}});
  return j;
}

// ---- spike-train ingestion -------------------------------------------------------------

// binarize spike trains on a regular grid; each spike starts an activation run
// whose duration is exponential with the given mean (in seconds), lasting at
// least one step; the full grid is then split into equal segments
inline std::vector<TimeSeries> ingest_spike_data(const std::vector<std::vector<double>>& spikes,
                                                 double duration, long long steps,
                                                 double extension_mean, int segments,
                                                 std::mt19937_64& rng) {
  if (duration <= 0.0 || steps < 1) throw std::invalid_argument("ingest: bad duration/steps");
  if (segments < 1 || steps % segments != 0)
    throw std::invalid_argument("ingest: segments must divide steps");
  int n = int(spikes.size());
  double bin = duration / double(steps);
  std::vector<std::vector<std::uint8_t>> grid(n, std::vector<std::uint8_t>(steps, 0));
  std::exponential_distribution<double> ext(extension_mean > 0.0 ? 1.0 / extension_mean : 1.0);
  for (int i = 0; i < n; ++i)
    for (double s : spikes[i]) {
      if (s < 0.0 || s > duration)
        throw std::invalid_argument("ingest: spike time outside recording");
      long long start = std::min<long long>(steps - 1, (long long)(s / bin));
      double d = extension_mean > 0.0 ? ext(rng) : 0.0;
      long long run = std::max<long long>(1, std::llround(d / bin));
      for (long long t = start; t < std::min(steps, start + run); ++t) grid[i][t] = 1;
    }
  long long seg_len = steps / segments;
  std::vector<TimeSeries> out;
  out.reserve(segments);
  for (int s = 0; s < segments; ++s) {
    TimeSeries x(n, int(seg_len));
    for (int i = 0; i < n; ++i)
      for (long long t = 0; t < seg_len; ++t)
        x.set(i, int(t), grid[i][s * seg_len + t]);
    out.push_back(std::move(x));
  }
  return out;
}

// ---- sweeps -----------------------------------------------------------------------------

struct sweep_row {
  double value = 0.0;
  int realization = 0;
  bool failed = false;
  long long e_star = -1;
  double auc_tdg = std::nan(""), auc_corr = std::nan(""), auc_granger = std::nan("");
  double auc_te = std::nan("");
  double loss = std::nan(""), mean_err = std::nan(""), jaccard_sim = std::nan("");
  double log_evidence = std::nan(""), info_gain = std::nan(""), lambda = std::nan("");
  double psi = std::nan("");
};

inline void apply_sweep_value(const std::string& variable, double v, ExperimentConfig& cfg,
                              bool data_side) {
  if (variable == "T") {
    cfg.T = int(v);
    return;
  }
  if (variable == "E") {
    if (cfg.prior.ec.is_delta) cfg.prior.ec.e_star = (long long)v;
    return;
  }
  if (variable == "alpha0") {
    cfg.dyn.alpha0 = v;
    return;
  }
  if (variable == "beta0") {
    cfg.dyn.beta0 = v;
    return;
  }
  (void)data_side;
  set_param(cfg.dyn, variable, v);
}

// one dataset end to end: generate under the data model, reconstruct under the
// inference model, score against the truth
inline sweep_row sweep_one(const ExperimentConfig& data_cfg, const ExperimentConfig& inf_cfg,
                           double value, int realization, std::uint64_t seed_gen,
                           std::uint64_t seed_chain) {
  sweep_row row;
  row.value = value;
  row.realization = realization;
  try {
    auto rng_g = make_rng(seed_gen, 0);
    auto rng_x = make_rng(seed_gen, 1);
    prior_draw d = sample_prior(data_cfg.prior, rng_g);
    TimeSeries x = simulate(d.g, data_cfg.dyn, data_cfg.T, rng_x, data_cfg.init);
    sampler_config scfg = inf_cfg.sampler;
    scfg.seed = seed_chain;
    reconstruction_report rep =
        reconstruct(x, inf_cfg.prior, inf_cfg.dyn, scfg, inf_cfg.estimator, 1);
    if (rep.failed) {
      row.failed = true;
      return row;
    }
    row.e_star = rep.chains.front().e_star;
    row.loss = posterior_loss(d.g, rep.marginals).bits;
    row.mean_err = mean_error(d.g, rep.marginals);
    row.jaccard_sim = posterior_jaccard(rep.pooled, d.g);
    row.log_evidence = rep.log_evidence.value;
    row.info_gain = rep.info_gain.value;
    row.lambda = rep.lambda.value;
    row.psi = rep.psi.value;
    try {
      row.auc_tdg = auc(d.g, rep.marginals);
      auto pair_auc = [&](const ScoreMatrix& s) {
        std::vector<double> sc;
        std::vector<int> lb;
        for (int i = 0; i < x.n; ++i)
          for (int j = i + 1; j < x.n; ++j) {
            sc.push_back(s.at(i, j));
            lb.push_back(d.g.instances(i, j) > 0 ? 1 : 0);
          }
        return auc(sc, lb);
      };
      row.auc_corr = pair_auc(heuristic_scores(x, heuristic_kind::correlation));
      row.auc_granger = pair_auc(heuristic_scores(x, heuristic_kind::granger));
      row.auc_te = pair_auc(heuristic_scores(x, heuristic_kind::transfer_entropy));
    } catch (const std::exception&) {
      // single-class truth: AUCs stay NaN, the rest of the row is valid
    }
  } catch (const std::exception&) {
    row.failed = true;
  }
  return row;
}

struct sweep_result {
  std::vector<sweep_row> rows;
};

inline sweep_result run_sweep(const ExperimentConfig& cfg, int threads = 1) {
  if (cfg.sweep_variable.empty())
    throw std::invalid_argument("run_sweep: missing sweep block");
  sweep_result res;
  if (cfg.sweep_grid.empty()) return res;  // empty grid: empty tables, success
  long long total = (long long)cfg.sweep_grid.size() * cfg.datasets;
  res.rows.resize(total);
  parallel_for(total, threads, [&](long long task) {
    int p = int(task / cfg.datasets);
    int k = int(task % cfg.datasets);
    double v = cfg.sweep_grid[p];
    ExperimentConfig data_cfg = cfg;
    ExperimentConfig inf_cfg = cfg;
    apply_sweep_value(cfg.sweep_variable, v, inf_cfg, false);
    if (cfg.sweep_matched) apply_sweep_value(cfg.sweep_variable, v, data_cfg, true);
    std::uint64_t seed_gen =
        derive_seed(derive_seed(cfg.seed, seed_stream::sweep), 2 * task);
    std::uint64_t seed_chain =
        derive_seed(derive_seed(cfg.seed, seed_stream::sweep), 2 * task + 1);
    res.rows[task] = sweep_one(data_cfg, inf_cfg, v, k, seed_gen, seed_chain);
  });
  return res;
}

inline void write_sweep_realizations_csv(std::ostream& os, const sweep_result& r) {
  os << std::setprecision(17);
  os << "value,realization,failed,e_star,auc_tdg,auc_corr,auc_granger,auc_te,"
        "loss,mean_error,jaccard,log_evidence,info_gain,lambda,psi\n";
  for (const auto& w : r.rows)
    os << w.value << "," << w.realization << "," << (w.failed ? 1 : 0) << "," << w.e_star << ","
       << w.auc_tdg << "," << w.auc_corr << "," << w.auc_granger << "," << w.auc_te << ","
       << w.loss << "," << w.mean_err << "," << w.jaccard_sim << "," << w.log_evidence << ","
       << w.info_gain << "," << w.lambda << "," << w.psi << "\n";
}

// per grid point: mean and 90% percentile-bootstrap interval of each metric
inline void write_sweep_points_csv(std::ostream& os, const sweep_result& r,
                                   std::uint64_t seed) {
  static const char* metric_names[] = {"auc_tdg", "auc_corr",     "auc_granger", "auc_te",
                                       "loss",    "mean_error",   "jaccard",     "log_evidence",
                                       "info_gain", "lambda",     "psi"};
  auto field = [](const sweep_row& w, int m) -> double {
    switch (m) {
      case 0: return w.auc_tdg;
      case 1: return w.auc_corr;
      case 2: return w.auc_granger;
      case 3: return w.auc_te;
      case 4: return w.loss;
      case 5: return w.mean_err;
      case 6: return w.jaccard_sim;
      case 7: return w.log_evidence;
      case 8: return w.info_gain;
      case 9: return w.lambda;
      default: return w.psi;
    }
  };
  std::vector<double> values;
  for (const auto& w : r.rows)
    if (std::find(values.begin(), values.end(), w.value) == values.end())
      values.push_back(w.value);
  os << std::setprecision(17);
  os << "value,count";
  for (const char* m : metric_names) os << "," << m << "_mean," << m << "_lo," << m << "_hi";
  os << "\n";
  auto rng = make_rng(derive_seed(seed, seed_stream::bootstrap), 0);
  for (double v : values) {
    std::vector<const sweep_row*> rows;
    for (const auto& w : r.rows)
      if (w.value == v && !w.failed) rows.push_back(&w);
    os << v << "," << rows.size();
    for (int m = 0; m < 11; ++m) {
      std::vector<double> col;
      for (const sweep_row* w : rows) {
        double val = field(*w, m);
        if (!std::isnan(val)) col.push_back(val);
      }
      if (col.empty()) {
        os << ",nan,nan,nan";
        continue;
      }
      bootstrap_ci ci = percentile_bootstrap(col, rng);
      os << "," << ci.mean << "," << ci.lo << "," << ci.hi;
    }
    os << "\n";
  }
}

// ---- single-edge CSV emitters ------------------------------------------------------------

inline void write_single_edge_curve(std::ostream& os, single_edge_model base,
                                    const std::string& variable,
                                    const std::vector<double>& grid) {
  os << std::setprecision(17);
  os << variable << ",psi,mutual_information,conditional_entropy\n";
  for (double v : grid) {
    single_edge_model m = base;
    if (variable == "q")
      m.q = v;
    else if (variable == "r")
      m.r = v;
    else if (variable == "p")
      m.p = v;
    else if (variable == "T")
      m.T = int(v);
    else
      throw std::invalid_argument("single-edge sweep: unknown variable " + variable);
    os << v << "," << single_edge_psi(m) << "," << single_edge_mutual_information(m) << ","
       << single_edge_conditional_entropy(m) << "\n";
  }
}

}  // namespace reconlab
