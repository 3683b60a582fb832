#include "unifsel/bayesnet.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <deque>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "unifsel/prng.hpp"

namespace unifsel {

using nlohmann::json;

int BayesianNetwork::node_index(const std::string& name) const {
  for (int i = 0; i < n_nodes(); ++i)
    if (node_names[i] == name) return i;
  throw std::runtime_error("network: unknown node '" + name + "'");
}

std::vector<std::vector<int>> BayesianNetwork::children_lists() const {
  std::vector<std::vector<int>> ch(n_nodes());
  for (int i = 0; i < n_nodes(); ++i)
    for (int p : parent_lists[i]) ch[p].push_back(i);
  return ch;
}

std::size_t BayesianNetwork::parent_config_index(int node,
                                                 std::span<const std::int32_t> assignment) const {
  std::size_t idx = 0;
  for (int p : parent_lists[node]) idx = idx * cardinalities[p] + assignment[p];
  return idx;
}

std::vector<Violation> validate(BayesianNetwork& bn) {
  std::vector<Violation> out;
  const int n = bn.n_nodes();
  if (static_cast<int>(bn.cardinalities.size()) != n ||
      static_cast<int>(bn.parent_lists.size()) != n || static_cast<int>(bn.cpts.size()) != n) {
    out.push_back({"", "node/cardinality/parent/cpt count mismatch"});
    return out;
  }

  for (int i = 0; i < n; ++i) {
    if (bn.cardinalities[i] < 1) out.push_back({bn.node_names[i], "cardinality must be >= 1"});
    std::size_t rows = 1;
    for (int p : bn.parent_lists[i]) {
      if (p < 0 || p >= n) {
        out.push_back({bn.node_names[i], "parent index out of range"});
        continue;
      }
      rows *= bn.cardinalities[p];
    }
    if (bn.cpts[i].size() != rows)
      out.push_back({bn.node_names[i], "cpt has " + std::to_string(bn.cpts[i].size()) +
                                           " rows, expected " + std::to_string(rows)});
    for (const auto& row : bn.cpts[i]) {
      if (row.size() != static_cast<std::size_t>(bn.cardinalities[i])) {
        out.push_back({bn.node_names[i], "cpt row width mismatch"});
        break;
      }
      double sum = 0.0;
      bool negative = false;
      for (double v : row) {
        sum += v;
        negative |= v < 0.0;
      }
      if (negative) out.push_back({bn.node_names[i], "negative cpt entry"});
      if (std::abs(sum - 1.0) > 1e-9)
        out.push_back({bn.node_names[i], "cpt row sums to " + std::to_string(sum)});
    }
  }

  // Kahn's algorithm; leftover nodes are on a cycle
  std::vector<int> indegree(n, 0);
  auto children = bn.children_lists();
  for (int i = 0; i < n; ++i) indegree[i] = static_cast<int>(bn.parent_lists[i].size());
  std::deque<int> queue;
  for (int i = 0; i < n; ++i)
    if (indegree[i] == 0) queue.push_back(i);
  std::vector<int> order;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    order.push_back(u);
    for (int v : children[u])
      if (--indegree[v] == 0) queue.push_back(v);
  }
  if (static_cast<int>(order.size()) != n) {
    std::string cyc;
    for (int i = 0; i < n; ++i)
      if (indegree[i] > 0) cyc += (cyc.empty() ? "" : ", ") + bn.node_names[i];
    out.push_back({"", "cycle involving: " + cyc});
  } else {
    bn.topo_order = order;
  }
  return out;
}

void validate_or_throw(BayesianNetwork& bn) {
  auto violations = validate(bn);
  if (!violations.empty()) {
    std::string msg = "invalid network:";
    for (const auto& v : violations) msg += "\n  [" + v.node + "] " + v.message;
    throw std::runtime_error(msg);
  }
}

BayesianNetwork load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("network: cannot open " + path);
  json doc = json::parse(in);
  BayesianNetwork bn;
  for (const auto& node : doc.at("nodes")) {
    bn.node_names.push_back(node.at("name").get<std::string>());
    bn.cardinalities.push_back(node.at("cardinality").get<int>());
  }
  for (const auto& node : doc.at("nodes")) {
    std::vector<int> parents;
    for (const auto& p : node.at("parents")) parents.push_back(bn.node_index(p.get<std::string>()));
    bn.parent_lists.push_back(std::move(parents));
    bn.cpts.push_back(node.at("cpt").get<std::vector<std::vector<double>>>());
  }
  validate_or_throw(bn);
  return bn;
}

void save_network(const BayesianNetwork& bn, const std::string& path) {
  json nodes = json::array();
  for (int i = 0; i < bn.n_nodes(); ++i) {
    json node;
    node["name"] = bn.node_names[i];
    node["cardinality"] = bn.cardinalities[i];
    json parents = json::array();
    for (int p : bn.parent_lists[i]) parents.push_back(bn.node_names[p]);
    node["parents"] = parents;
    node["cpt"] = bn.cpts[i];
    nodes.push_back(node);
  }
  json doc;
  doc["format"] = "unifsel/1";
  doc["nodes"] = nodes;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("network: cannot write " + path);
  out << doc.dump(2) << '\n';
}

DiscreteDataset forward_sample(const BayesianNetwork& bn, std::size_t m, std::uint64_t seed,
                               int class_node) {
  const int n = bn.n_nodes();
  DiscreteDataset data;
  data.feature_names = bn.node_names;
  data.cardinalities = bn.cardinalities;
  data.class_index = class_node >= 0 ? class_node : n - 1;
  data.columns.assign(n, {});
  for (auto& col : data.columns) col.resize(m);
  data.levels.assign(n, {});
  for (int i = 0; i < n; ++i)
    for (int v = 0; v < bn.cardinalities[i]; ++v) data.levels[i].push_back(std::to_string(v));

  Prng base(seed, 0x73616d70);
  std::vector<std::int32_t> row(n);
  for (std::size_t r = 0; r < m; ++r) {
    Prng rng = base.split(r);
    for (int node : bn.topo_order) {
      const auto& table = bn.cpts[node][bn.parent_config_index(node, row)];
      row[node] = rng.categorical(table);
    }
    for (int i = 0; i < n; ++i) data.columns[i][r] = row[i];
  }
  return data;
}

bool d_separated(const BayesianNetwork& bn, int i, int j, std::span<const int> s) {
  if (i == j) throw std::invalid_argument("d_separated: i == j");
  const int n = bn.n_nodes();
  std::vector<bool> in_s(n, false);
  for (int v : s) {
    if (v == i || v == j) throw std::invalid_argument("d_separated: endpoint inside s");
    in_s[v] = true;
  }

  // ancestors of S, needed for the collider rule
  auto children = bn.children_lists();
  std::vector<bool> anc_of_s(n, false);
  {
    std::deque<int> queue(s.begin(), s.end());
    for (int v : s) anc_of_s[v] = true;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int p : bn.parent_lists[u])
        if (!anc_of_s[p]) {
          anc_of_s[p] = true;
          queue.push_back(p);
        }
    }
  }

  // reachability over (node, arrival direction); direction 0 = via edge
  // into the node (from a parent), 1 = via edge out of the node (from a child)
  std::vector<std::array<bool, 2>> seen(n, {false, false});
  std::deque<std::pair<int, int>> queue;
  queue.push_back({i, 1});  // as if leaving i upward
  seen[i][1] = true;
  queue.push_back({i, 0});
  seen[i][0] = true;

  while (!queue.empty()) {
    auto [u, dir] = queue.front();
    queue.pop_front();
    if (u == j && !(u == i)) return false;

    if (dir == 1) {  // arrived from a child (or start): trail goes up
      if (!in_s[u]) {
        for (int p : bn.parent_lists[u])
          if (!seen[p][1]) {
            seen[p][1] = true;
            if (p == j) return false;
            queue.push_back({p, 1});
          }
        for (int c : children[u])
          if (!seen[c][0]) {
            seen[c][0] = true;
            if (c == j) return false;
            queue.push_back({c, 0});
          }
      }
    } else {  // arrived from a parent: u is a chain or collider node
      if (!in_s[u]) {
        for (int c : children[u])
          if (!seen[c][0]) {
            seen[c][0] = true;
            if (c == j) return false;
            queue.push_back({c, 0});
          }
      }
      if (anc_of_s[u]) {  // collider open when u or a descendant is in S
        for (int p : bn.parent_lists[u])
          if (!seen[p][1]) {
            seen[p][1] = true;
            if (p == j) return false;
            queue.push_back({p, 1});
          }
      }
    }
  }
  return true;
}

std::vector<int> MbSets::pc() const {
  std::set<int> all(parents.begin(), parents.end());
  all.insert(children.begin(), children.end());
  return {all.begin(), all.end()};
}

std::vector<int> MbSets::mb() const {
  std::set<int> all(parents.begin(), parents.end());
  all.insert(children.begin(), children.end());
  all.insert(spouses.begin(), spouses.end());
  return {all.begin(), all.end()};
}

MbSets true_mb(const BayesianNetwork& bn, int target) {
  if (target < 0 || target >= bn.n_nodes()) throw std::out_of_range("true_mb: bad target");
  MbSets sets;
  sets.parents = bn.parent_lists[target];
  std::sort(sets.parents.begin(), sets.parents.end());
  auto children = bn.children_lists();
  sets.children = children[target];
  std::sort(sets.children.begin(), sets.children.end());
  std::set<int> sp;
  for (int child : sets.children)
    for (int p : bn.parent_lists[child])
      if (p != target) sp.insert(p);
  for (int c : sets.children) sp.erase(c);
  for (int p : sets.parents) sp.erase(p);
  sets.spouses.assign(sp.begin(), sp.end());
  return sets;
}

std::vector<int> true_pc(const BayesianNetwork& bn, int target) { return true_mb(bn, target).pc(); }

JointDistribution exact_joint(const BayesianNetwork& bn, std::size_t config_cap) {
  std::size_t total = 1;
  for (int r : bn.cardinalities) {
    if (total > config_cap / std::max(r, 1))
      throw std::runtime_error("exact_joint: configuration cap exceeded");
    total *= r;
  }
  JointDistribution joint;
  joint.cardinalities = bn.cardinalities;
  joint.probs.assign(total, 0.0);

  const int n = bn.n_nodes();
  std::vector<std::int32_t> config(n, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    double p = 1.0;
    for (int node = 0; node < n && p > 0.0; ++node)
      p *= bn.cpts[node][bn.parent_config_index(node, config)][config[node]];
    joint.probs[idx] = p;
    for (int node = n - 1; node >= 0; --node) {
      if (++config[node] < bn.cardinalities[node]) break;
      config[node] = 0;
    }
  }
  return joint;
}

namespace {

// marginal table over the given variables, row-major in listed order
std::vector<double> marginal(const JointDistribution& joint, std::span<const int> vars) {
  std::size_t size = 1;
  for (int v : vars) size *= joint.cardinalities[v];
  std::vector<double> out(size, 0.0);

  const int n = static_cast<int>(joint.cardinalities.size());
  std::vector<std::size_t> stride(n, 1);
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * joint.cardinalities[i + 1];

  std::vector<std::int32_t> config(n, 0);
  for (std::size_t idx = 0; idx < joint.probs.size(); ++idx) {
    const double p = joint.probs[idx];
    if (p > 0.0) {
      std::size_t key = 0;
      for (int v : vars) key = key * joint.cardinalities[v] + ((idx / stride[v]) % joint.cardinalities[v]);
      out[key] += p;
    }
  }
  return out;
}

double entropy_of_probs(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

}  // namespace

double exact_entropy(const JointDistribution& joint, std::span<const int> vars) {
  if (vars.empty()) throw std::invalid_argument("exact_entropy: empty variable set");
  return entropy_of_probs(marginal(joint, vars));
}

double exact_mi(const JointDistribution& joint, int x, int y, std::span<const int> s) {
  if (x == y) throw std::invalid_argument("exact_mi: x == y");
  std::vector<int> xs(s.begin(), s.end()), ys(s.begin(), s.end()), ss(s.begin(), s.end()),
      xys(s.begin(), s.end());
  xs.push_back(x);
  ys.push_back(y);
  xys.push_back(x);
  xys.push_back(y);
  double h = exact_entropy(joint, xs) + exact_entropy(joint, ys) - exact_entropy(joint, xys);
  if (!ss.empty()) h -= exact_entropy(joint, ss);
  return h;
}

namespace {

// exact I(target; S) for a feature subset, via H(C) + H(S) - H(C,S)
double exact_mi_set(const JointDistribution& joint, int target, std::span<const int> subset) {
  const int vc[] = {target};
  if (subset.empty()) return 0.0;
  std::vector<int> with(subset.begin(), subset.end());
  with.push_back(target);
  return exact_entropy(joint, vc) + exact_entropy(joint, subset) - exact_entropy(joint, with);
}

}  // namespace

RelevancePartition brute_force_relevance(const JointDistribution& joint, int target,
                                         double epsilon) {
  const int n = static_cast<int>(joint.cardinalities.size());
  std::vector<int> features;
  for (int i = 0; i < n; ++i)
    if (i != target) features.push_back(i);

  RelevancePartition part;
  for (int f : features) {
    std::vector<int> rest;
    for (int g : features)
      if (g != f) rest.push_back(g);
    if (exact_mi(joint, f, target, rest) > epsilon) {
      part.strong.push_back(f);
      continue;
    }
    // weak: some strict subset of the remaining features opens dependence
    bool weak = false;
    const int k = static_cast<int>(rest.size());
    for (std::uint64_t mask = 0; mask + 1 < (std::uint64_t{1} << k) && !weak; ++mask) {
      std::vector<int> s;
      for (int b = 0; b < k; ++b)
        if (mask & (std::uint64_t{1} << b)) s.push_back(rest[b]);
      if (exact_mi(joint, f, target, s) > epsilon) weak = true;
    }
    (weak ? part.weak : part.irrelevant).push_back(f);
  }
  return part;
}

BestSubsetResult brute_force_best_subset(const JointDistribution& joint, int target,
                                         int max_size) {
  const int n = static_cast<int>(joint.cardinalities.size());
  if (n > 16) throw std::invalid_argument("brute_force_best_subset: too many variables");
  std::vector<int> features;
  for (int i = 0; i < n; ++i)
    if (i != target) features.push_back(i);
  const int k = static_cast<int>(features.size());

  BestSubsetResult best;  // empty subset, I = 0
  std::vector<std::uint64_t> masks;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask)
    if (std::popcount(mask) <= max_size) masks.push_back(mask);
  // ties prefer smaller then lexicographically-first subsets
  std::sort(masks.begin(), masks.end(), [&](std::uint64_t a, std::uint64_t b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    return a < b;
  });

  for (std::uint64_t mask : masks) {
    std::vector<int> subset;
    for (int b = 0; b < k; ++b)
      if (mask & (std::uint64_t{1} << b)) subset.push_back(features[b]);
    const double mi = exact_mi_set(joint, target, subset);
    if (mi > best.mi + 1e-12) {
      best.mi = mi;
      best.subset = subset;
    }
  }
  return best;
}

BayesianNetwork random_network(int n, int max_parents, std::uint64_t seed) {
  RandomNetworkOptions opts;
  opts.max_parents = max_parents;
  return random_network(n, seed, opts);
}

BayesianNetwork random_network(int n, std::uint64_t seed, const RandomNetworkOptions& opts) {
  if (n < 2) throw std::invalid_argument("random_network: n must be >= 2");
  Prng rng(seed, 0x6e657477);
  BayesianNetwork bn;
  bn.node_names.reserve(n);
  for (int i = 0; i < n; ++i) bn.node_names.push_back("V" + std::to_string(i));
  for (int i = 0; i < n; ++i)
    bn.cardinalities.push_back(opts.min_cardinality +
                               static_cast<int>(rng.below(opts.max_cardinality - opts.min_cardinality + 1)));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  std::vector<int> position(n);
  for (int i = 0; i < n; ++i) position[order[i]] = i;

  bn.parent_lists.assign(n, {});
  for (int pos = 0; pos < n; ++pos) {
    const int node = order[pos];
    const int cap = std::min(opts.max_parents, pos);
    const int k = cap > 0 ? static_cast<int>(rng.below(cap + 1)) : 0;
    std::vector<int> pool(order.begin(), order.begin() + pos);
    for (int t = 0; t < k; ++t) {
      const std::size_t pick = rng.below(pool.size());
      bn.parent_lists[node].push_back(pool[pick]);
      pool.erase(pool.begin() + pick);
    }
    std::sort(bn.parent_lists[node].begin(), bn.parent_lists[node].end());
  }

  bn.cpts.assign(n, {});
  for (int i = 0; i < n; ++i) {
    std::size_t rows = 1;
    for (int p : bn.parent_lists[i]) rows *= bn.cardinalities[p];
    bn.cpts[i].assign(rows, std::vector<double>(bn.cardinalities[i]));
    for (auto& row : bn.cpts[i]) {
      double sum = 0.0;
      for (double& v : row) {
        v = rng.uniform();
        while (v <= 0.0) v = rng.uniform();
        sum += v;
      }
      for (double& v : row) v /= sum;
    }
  }
  validate_or_throw(bn);
  return bn;
}

bool faithful_screen(const BayesianNetwork& bn, const JointDistribution& joint, double margin) {
  const int n = bn.n_nodes();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      std::vector<int> others;
      for (int v = 0; v < n; ++v)
        if (v != i && v != j) others.push_back(v);
      const int k = static_cast<int>(others.size());
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
        if (std::popcount(mask) > 2) continue;
        std::vector<int> s;
        for (int b = 0; b < k; ++b)
          if (mask & (std::uint64_t{1} << b)) s.push_back(others[b]);
        if (!d_separated(bn, i, j, s) && exact_mi(joint, i, j, s) <= margin) return false;
      }
    }
  return true;
}

}  // namespace unifsel
