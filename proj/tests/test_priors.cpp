#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>

#include "reconlab/enumerate.hpp"
#include "reconlab/priors.hpp"

using namespace reconlab;

namespace {

// chi-square statistic over cells with expected count >= 5
double chi_square(const std::map<std::string, long long>& observed,
                  const std::map<std::string, double>& expected, int* dof) {
  double stat = 0.0;
  *dof = -1;
  for (const auto& [key, exp_cnt] : expected) {
    if (exp_cnt < 5.0) continue;
    auto it = observed.find(key);
    double obs = it == observed.end() ? 0.0 : double(it->second);
    stat += (obs - exp_cnt) * (obs - exp_cnt) / exp_cnt;
    *dof += 1;
  }
  return stat;
}

// p = 0.01 upper-tail chi-square critical values via Wilson-Hilferty
double chi2_crit_p01(int dof) {
  double z = 2.3263478740408408;  // Phi^-1(0.99)
  double k = dof;
  double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
  return k * t * t * t;
}

}  // namespace

TEST_CASE("edge-count priors") {
  auto d = edge_count_prior::delta(3);
  CHECK(log_edge_count_prior(3, d) == 0.0);
  CHECK(impossible(log_edge_count_prior(2, d)));
  auto geo = edge_count_prior::geometric(1.0);
  CHECK_THAT(log_edge_count_prior(0, geo), Catch::Matchers::WithinAbs(-1.0, 1e-12));
  // normalizes: sum_e lambda^e/(lambda+1)^(e+1) = 1
  auto geo2 = edge_count_prior::geometric(2.0);
  double total = 0.0;
  for (long long e = 0; e <= 400; ++e) total += std::exp2(log_edge_count_prior(e, geo2));
  CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-9));
  CHECK_THROWS_AS(log_edge_count_prior(-1, d), std::invalid_argument);
  auto geo0 = edge_count_prior::geometric(0.0);
  CHECK(log_edge_count_prior(0, geo0) == 0.0);
  CHECK(impossible(log_edge_count_prior(1, geo0)));
}

TEST_CASE("frozen structure-prior values") {
  // ER simple N=3, e=1: uniform over the 3 pairs
  Graph g3(3, graph_mode::simple);
  g3.toggle_edge(0, 1, +1);
  auto er3 = PriorModel::er(3, edge_count_prior::delta(1));
  CHECK_THAT(log_prior_state(er3, g3, nullptr),
             Catch::Matchers::WithinAbs(-std::log2(3.0), 1e-12));

  // ER loopy-multi N=2, e=1: 3 loopy pairs
  Graph g2(2, graph_mode::multi);
  g2.toggle_edge(0, 1, +1);
  auto er2m = PriorModel::er(2, edge_count_prior::delta(1), false);
  CHECK_THAT(log_prior_state(er2m, g2, nullptr),
             Catch::Matchers::WithinAbs(-std::log2(3.0), 1e-12));

  // CM kappa=(2,2): double edge 2/3, two self-loops 1/3
  Graph dbl(2, graph_mode::multi);
  dbl.toggle_edge(0, 1, +1);
  dbl.toggle_edge(0, 1, +1);
  Graph loops(2, graph_mode::multi);
  loops.toggle_edge(0, 0, +1);
  loops.toggle_edge(1, 1, +1);
  auto cm22 = PriorModel::config_model({2, 2});
  CHECK_THAT(log_prior_state(cm22, dbl, nullptr),
             Catch::Matchers::WithinAbs(std::log2(2.0 / 3.0), 1e-12));
  CHECK_THAT(log_prior_state(cm22, loops, nullptr),
             Catch::Matchers::WithinAbs(std::log2(1.0 / 3.0), 1e-12));

  // CM kappa=(1,1) and kappa=(2,0): single realization, probability 1
  Graph single(2, graph_mode::multi);
  single.toggle_edge(0, 1, +1);
  CHECK_THAT(log_prior_state(PriorModel::config_model({1, 1}), single, nullptr),
             Catch::Matchers::WithinAbs(0.0, 1e-12));
  Graph selfloop(2, graph_mode::multi);
  selfloop.toggle_edge(0, 0, +1);
  CHECK_THAT(log_prior_state(PriorModel::config_model({2, 0}), selfloop, nullptr),
             Catch::Matchers::WithinAbs(0.0, 1e-12));

  // UCM N=2, e=1: three graphs (edge, loop@0, loop@1) each 1/3
  auto ucm2 = PriorModel::ucm(2, edge_count_prior::delta(1));
  CHECK_THAT(log_prior_state(ucm2, single, nullptr),
             Catch::Matchers::WithinAbs(-std::log2(3.0), 1e-12));
  CHECK_THAT(log_prior_state(ucm2, selfloop, nullptr),
             Catch::Matchers::WithinAbs(-std::log2(3.0), 1e-12));

  // SBM N=3, B=1, E=1: 1/(6 block-pair multisets) * P(b)=1 * P(B)=1/3 -> 1/18
  Graph sg(3, graph_mode::multi);
  sg.toggle_edge(0, 1, +1);
  Partition one = Partition::single_block(3);
  auto sbm3 = PriorModel::sbm(3, edge_count_prior::delta(1));
  CHECK_THAT(log_prior_state(sbm3, sg, &one),
             Catch::Matchers::WithinAbs(-std::log2(18.0), 1e-12));

  // off-support states
  Graph wrong(2, graph_mode::multi);
  wrong.toggle_edge(0, 0, +1);
  CHECK(impossible(log_prior_state(PriorModel::config_model({1, 1}), wrong, nullptr)));
  CHECK(impossible(log_prior_state(er3, Graph(3, graph_mode::simple), nullptr)));  // e != 1
  CHECK_THROWS_AS(PriorModel::config_model({1, 2}), std::invalid_argument);  // odd sum
  CHECK_THROWS_AS(log_prior_state(sbm3, sg, nullptr), std::invalid_argument);
}

TEST_CASE("pair indexers are inverse bijections") {
  for (int n : {2, 3, 5, 8}) {
    for (long long k = 0; k < simple_pair_count(n); ++k) {
      node_pair p = nth_simple_pair(n, k);
      CHECK(simple_pair_index(n, p.i, p.j) == k);
      CHECK(p.i < p.j);
    }
    for (long long k = 0; k < loopy_pair_count(n); ++k) {
      node_pair p = nth_loopy_pair(n, k);
      CHECK(loopy_pair_index(n, p.i, p.j) == k);
      CHECK(p.i <= p.j);
    }
    CHECK_THROWS_AS(nth_simple_pair(n, simple_pair_count(n)), std::out_of_range);
    CHECK_THROWS_AS(nth_loopy_pair(n, loopy_pair_count(n)), std::out_of_range);
  }
}

TEST_CASE("every prior normalizes over its exhaustive support") {
  // ER simple N=4, e=2
  {
    auto prior = PriorModel::er(4, edge_count_prior::delta(2));
    double total = 0.0;
    for (const auto& g : enumerate_simple_graphs(4, 2))
      total += std::exp2(log_prior_state(prior, g, nullptr));
    CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-10));
  }
  // ER multi N=3, e=2
  {
    auto prior = PriorModel::er(3, edge_count_prior::delta(2), false);
    double total = 0.0;
    for (const auto& g : enumerate_multigraphs(3, 2))
      total += std::exp2(log_prior_state(prior, g, nullptr));
    CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-10));
  }
  // ER simple with geometric edge count, all edge counts
  {
    auto prior = PriorModel::er(4, edge_count_prior::geometric(1.5));
    double total = 0.0;
    for (long long e = 0; e <= simple_pair_count(4); ++e)
      for (const auto& g : enumerate_simple_graphs(4, e))
        total += std::exp2(log_prior_state(prior, g, nullptr));
    // remaining mass sits on e > 6, truncated tail of the geometric
    double tail = 0.0;
    for (long long e = 7; e <= 400; ++e)
      tail += std::exp2(log_edge_count_prior(e, prior.ec));
    CHECK_THAT(total + tail, Catch::Matchers::WithinAbs(1.0, 1e-9));
  }
  // CM kappa=(2,1,1): support inside the 2-instance multigraphs
  {
    auto prior = PriorModel::config_model({2, 1, 1});
    double total = 0.0;
    for (const auto& g : enumerate_multigraphs(3, 2)) {
      double lp = log_prior_state(prior, g, nullptr);
      if (!impossible(lp)) total += std::exp2(lp);
    }
    CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-10));
  }
  // CM with a heavier sequence kappa=(3,2,1)
  {
    auto prior = PriorModel::config_model({3, 2, 1});
    double total = 0.0;
    for (const auto& g : enumerate_multigraphs(3, 3)) {
      double lp = log_prior_state(prior, g, nullptr);
      if (!impossible(lp)) total += std::exp2(lp);
    }
    CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-10));
  }
  // UCM N=3, e=2
  {
    auto prior = PriorModel::ucm(3, edge_count_prior::delta(2));
    double total = 0.0;
    for (const auto& g : enumerate_multigraphs(3, 2))
      total += std::exp2(log_prior_state(prior, g, nullptr));
    CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-10));
  }
  // SBM N=3, E=2: joint over (graph, labeled partition)
  {
    auto prior = PriorModel::sbm(3, edge_count_prior::delta(2));
    double total = 0.0;
    auto parts = enumerate_partitions(3, 3);
    for (const auto& g : enumerate_multigraphs(3, 2))
      for (const auto& p : parts) total += std::exp2(log_prior_state(prior, g, &p));
    CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-10));
  }
  // SBM N=4, E=1 (bigger partition space)
  {
    auto prior = PriorModel::sbm(4, edge_count_prior::delta(1));
    double total = 0.0;
    auto parts = enumerate_partitions(4, 4);
    for (const auto& g : enumerate_multigraphs(4, 1))
      for (const auto& p : parts) total += std::exp2(log_prior_state(prior, g, &p));
    CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-10));
  }
}

TEST_CASE("partition mechanics") {
  auto p = Partition::from_labels({0, 1, 0, 2});
  CHECK(p.B() == 3);
  CHECK(p.sizes == std::vector<int>{2, 1, 1});
  // moving the sole member of a middle block compacts deterministically:
  // last block's label fills the hole
  p.move_node(1, 0);
  CHECK(p.B() == 2);
  CHECK(p.b == std::vector<int>{0, 0, 0, 1});
  // fresh-block move
  p.move_node(2, 2);
  CHECK(p.B() == 3);
  CHECK(p.b == std::vector<int>{0, 0, 2, 1});
  // lazy move
  int lbl = p.move_node(0, 0);
  CHECK(lbl == 0);
  CHECK(p.B() == 3);
  CHECK_THROWS_AS(Partition::from_labels({0, 2}), std::invalid_argument);  // not dense
  CHECK_THROWS_AS(p.move_node(0, 7), std::invalid_argument);

  Graph g(4, graph_mode::multi);
  g.toggle_edge(0, 1, +1);
  g.toggle_edge(0, 2, +1);
  g.toggle_edge(3, 3, +1);
  auto q = Partition::from_labels({0, 0, 1, 1});
  auto eps = block_edge_counts(g, q);
  CHECK(eps[0][0] == 1);  // 0-1 inside block 0
  CHECK(eps[0][1] == 1);  // 0-2 across
  CHECK(eps[1][1] == 1);  // loop at 3
  CHECK(eps[1][0] == eps[0][1]);
}

TEST_CASE("prior sampling matches analytic probabilities") {
  std::mt19937_64 rng(101);

  SECTION("cm pairing frequencies, kappa=(2,2)") {
    auto prior = PriorModel::config_model({2, 2});
    std::map<std::string, long long> obs;
    const int S = 30000;
    for (int s = 0; s < S; ++s) obs[sample_prior(prior, rng).g.key_string()]++;
    Graph dbl(2, graph_mode::multi);
    dbl.toggle_edge(0, 1, +1);
    dbl.toggle_edge(0, 1, +1);
    Graph loops(2, graph_mode::multi);
    loops.toggle_edge(0, 0, +1);
    loops.toggle_edge(1, 1, +1);
    std::map<std::string, double> expect{{dbl.key_string(), S * 2.0 / 3.0},
                                         {loops.key_string(), S * 1.0 / 3.0}};
    int dof;
    double stat = chi_square(obs, expect, &dof);
    CHECK(dof == 1);
    CHECK(stat < chi2_crit_p01(dof));
  }

  SECTION("cm pairing frequencies, kappa=(2,1,1)") {
    auto prior = PriorModel::config_model({2, 1, 1});
    std::map<std::string, long long> obs;
    const int S = 30000;
    for (int s = 0; s < S; ++s) obs[sample_prior(prior, rng).g.key_string()]++;
    std::map<std::string, double> expect;
    for (const auto& g : enumerate_multigraphs(3, 2)) {
      double lp = log_prior_state(prior, g, nullptr);
      if (!impossible(lp)) expect[g.key_string()] = S * std::exp2(lp);
    }
    double mass = 0;
    for (auto& [k, v] : expect) mass += v;
    CHECK_THAT(mass, Catch::Matchers::WithinAbs(double(S), 1e-6));
    int dof;
    double stat = chi_square(obs, expect, &dof);
    CHECK(stat < chi2_crit_p01(dof));
  }

  SECTION("er simple uniform over supports") {
    auto prior = PriorModel::er(4, edge_count_prior::delta(2));
    std::map<std::string, long long> obs;
    const int S = 15000;
    for (int s = 0; s < S; ++s) {
      auto d = sample_prior(prior, rng);
      REQUIRE(d.g.edge_total() == 2);
      REQUIRE(d.g.is_simple());
      obs[d.g.key_string()]++;
    }
    std::map<std::string, double> expect;
    for (const auto& g : enumerate_simple_graphs(4, 2)) expect[g.key_string()] = S / 15.0;
    int dof;
    double stat = chi_square(obs, expect, &dof);
    CHECK(dof == 14);
    CHECK(stat < chi2_crit_p01(dof));
  }

  SECTION("er multi and ucm uniform cells") {
    auto em = PriorModel::er(2, edge_count_prior::delta(2), false);
    std::map<std::string, long long> obs;
    const int S = 12000;
    for (int s = 0; s < S; ++s) obs[sample_prior(em, rng).g.key_string()]++;
    std::map<std::string, double> expect;
    for (const auto& g : enumerate_multigraphs(2, 2)) expect[g.key_string()] = S / 6.0;
    int dof;
    double stat = chi_square(obs, expect, &dof);
    CHECK(dof == 5);
    CHECK(stat < chi2_crit_p01(dof));

    auto ucm = PriorModel::ucm(3, edge_count_prior::delta(1));
    obs.clear();
    expect.clear();
    for (int s = 0; s < S; ++s) obs[sample_prior(ucm, rng).g.key_string()]++;
    for (const auto& g : enumerate_multigraphs(3, 1)) expect[g.key_string()] = S / 6.0;
    double stat2 = chi_square(obs, expect, &dof);
    CHECK(stat2 < chi2_crit_p01(dof));
  }

  SECTION("sbm joint (graph, partition) frequencies") {
    auto prior = PriorModel::sbm(3, edge_count_prior::delta(1));
    std::map<std::string, long long> obs;
    const int S = 100000;
    for (int s = 0; s < S; ++s) {
      auto d = sample_prior(prior, rng);
      REQUIRE(d.has_partition);
      std::string key = d.g.key_string() + "|";
      for (int v : d.part.b) key += char('0' + v);
      obs[key]++;
    }
    std::map<std::string, double> expect;
    for (const auto& g : enumerate_multigraphs(3, 1))
      for (const auto& p : enumerate_partitions(3, 3)) {
        double lp = log_prior_state(prior, g, &p);
        if (impossible(lp)) continue;
        std::string key = g.key_string() + "|";
        for (int v : p.b) key += char('0' + v);
        expect[key] = S * std::exp2(lp);
      }
    int dof;
    double stat = chi_square(obs, expect, &dof);
    CHECK(dof > 20);
    CHECK(stat < chi2_crit_p01(dof));
  }

  SECTION("geometric edge-count sampling") {
    auto prior = PriorModel::er(30, edge_count_prior::geometric(1.5), false);
    std::map<std::string, long long> obs;
    const int S = 20000;
    double mean = 0;
    for (int s = 0; s < S; ++s) {
      auto d = sample_prior(prior, rng);
      long long e = d.g.edge_total();
      mean += double(e);
      obs[std::to_string(std::min(e, 8LL))]++;
    }
    mean /= S;
    CHECK(std::abs(mean - 1.5) < 0.05);
    std::map<std::string, double> expect;
    double tail = double(S);
    for (long long e = 0; e < 8; ++e) {
      double p = std::exp2(log_edge_count_prior(e, prior.ec));
      expect[std::to_string(e)] = S * p;
      tail -= S * p;
    }
    expect["8"] = tail;
    int dof;
    double stat = chi_square(obs, expect, &dof);
    CHECK(stat < chi2_crit_p01(dof));
  }
}

TEST_CASE("uniform multiset and subset samplers") {
  std::mt19937_64 rng(55);
  const int S = 12000;
  std::map<std::string, long long> obs;
  for (int s = 0; s < S; ++s) {
    auto v = sample_uniform_multiset(3, 2, rng);
    obs[std::to_string(v[0]) + std::to_string(v[1])]++;
  }
  // 6 multisets of size 2 over {0,1,2}
  std::map<std::string, double> expect;
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) expect[std::to_string(a) + std::to_string(b)] = S / 6.0;
  int dof;
  CHECK(chi_square(obs, expect, &dof) < chi2_crit_p01(dof));

  obs.clear();
  expect.clear();
  for (int s = 0; s < S; ++s) {
    auto v = sample_uniform_subset(5, 2, rng);
    obs[std::to_string(v[0]) + std::to_string(v[1])]++;
  }
  for (int a = 0; a < 5; ++a)
    for (int b = a + 1; b < 5; ++b) expect[std::to_string(a) + std::to_string(b)] = S / 10.0;
  CHECK(chi_square(obs, expect, &dof) < chi2_crit_p01(dof));
  CHECK(sample_uniform_multiset(4, 0, rng).empty());
  CHECK_THROWS_AS(sample_uniform_subset(3, 5, rng), std::invalid_argument);
}

TEST_CASE("sbm marginal prior sums partitions correctly") {
  // marginalizing the partition must renormalize over graphs at fixed E
  auto prior = PriorModel::sbm(3, edge_count_prior::delta(2));
  double total = 0.0;
  for (const auto& g : enumerate_multigraphs(3, 2))
    total += std::exp2(sbm_log_marginal_prior(g, prior));
  CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-10));
}

TEST_CASE("natural graph modes") {
  CHECK(natural_mode(prior_kind::er_simple) == graph_mode::simple);
  CHECK(natural_mode(prior_kind::er_multi) == graph_mode::multi);
  CHECK(natural_mode(prior_kind::cm) == graph_mode::multi);
  CHECK(natural_mode(prior_kind::ucm) == graph_mode::multi);
  CHECK(natural_mode(prior_kind::sbm) == graph_mode::multi);
  CHECK(prior_kind_from_string("ucm") == prior_kind::ucm);
  CHECK_THROWS_AS(prior_kind_from_string("dcsbm"), std::invalid_argument);
}
