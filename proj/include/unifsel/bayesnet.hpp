#ifndef UNIFSEL_BAYESNET_HPP
#define UNIFSEL_BAYESNET_HPP

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "unifsel/dataset.hpp"

namespace unifsel {

// Discrete Bayesian network: DAG plus one CPT per node. CPT rows are
// indexed by the row-major parent configuration (parents in listed order,
// last parent varying fastest); each row is a distribution over the node's
// values. Immutable after validation.
struct BayesianNetwork {
  std::vector<std::string> node_names;
  std::vector<int> cardinalities;
  std::vector<std::vector<int>> parent_lists;
  std::vector<std::vector<std::vector<double>>> cpts;  // [node][parent config][value]
  std::vector<int> topo_order;  // filled by validate()

  int n_nodes() const { return static_cast<int>(node_names.size()); }
  int node_index(const std::string& name) const;
  std::vector<std::vector<int>> children_lists() const;

  std::size_t parent_config_index(int node, std::span<const std::int32_t> full_assignment) const;
};

struct Violation {
  std::string node;
  std::string message;
};

// Explicit joint distribution over all configurations, row-major in node
// order (last node varies fastest). The brute-force oracle substrate.
struct JointDistribution {
  std::vector<int> cardinalities;
  std::vector<double> probs;

  std::size_t n_configs() const { return probs.size(); }
};

struct MbSets {
  std::vector<int> parents;
  std::vector<int> children;
  std::vector<int> spouses;
  std::vector<int> pc() const;
  std::vector<int> mb() const;
};

struct RelevancePartition {
  std::vector<int> strong;
  std::vector<int> weak;
  std::vector<int> irrelevant;
};

struct BestSubsetResult {
  std::vector<int> subset;
  double mi = 0.0;
};

std::vector<Violation> validate(BayesianNetwork& bn);
void validate_or_throw(BayesianNetwork& bn);

BayesianNetwork load_network(const std::string& path);
void save_network(const BayesianNetwork& bn, const std::string& path);

// ancestral sampling in topological order; row r uses PRNG stream r so
// the result is deterministic per (bn, m, seed) and rows are independent
DiscreteDataset forward_sample(const BayesianNetwork& bn, std::size_t m, std::uint64_t seed,
                               int class_node = -1);

bool d_separated(const BayesianNetwork& bn, int i, int j, std::span<const int> s);

MbSets true_mb(const BayesianNetwork& bn, int target);
std::vector<int> true_pc(const BayesianNetwork& bn, int target);

JointDistribution exact_joint(const BayesianNetwork& bn,
                              std::size_t config_cap = std::size_t{1} << 22);

double exact_entropy(const JointDistribution& joint, std::span<const int> vars);
// I(X;Y|S) on the exact distribution; S may be empty
double exact_mi(const JointDistribution& joint, int x, int y, std::span<const int> s = {});

// Strong/weak/irrelevant feature partition against the class variable,
// by exhaustive conditioning-set enumeration on the exact joint.
RelevancePartition brute_force_relevance(const JointDistribution& joint, int target,
                                         double epsilon = 1e-9);

// argmax_S I(target; S) over all subsets up to max_size; ties prefer the
// smaller then lexicographically-first subset
BestSubsetResult brute_force_best_subset(const JointDistribution& joint, int target,
                                         int max_size);

struct RandomNetworkOptions {
  int max_parents = 2;
  int min_cardinality = 2;
  int max_cardinality = 3;
};

BayesianNetwork random_network(int n, int max_parents, std::uint64_t seed);
BayesianNetwork random_network(int n, std::uint64_t seed, const RandomNetworkOptions& opts);

// A network passes the screen when every graph-dependent (i, j | s) with
// |s| <= 2 carries exact CMI above the margin; only screened networks feed
// faithfulness-dependent property tests.
bool faithful_screen(const BayesianNetwork& bn, const JointDistribution& joint,
                     double margin = 1e-6);

}  // namespace unifsel

#endif
