#include "unifsel/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace unifsel {

namespace {

constexpr std::size_t kDenseCap = std::size_t{1} << 21;

// joint cell counts over the listed columns; dense table when the config
// space is small, ordered map on the packed tuple otherwise
struct JointCounts {
  std::vector<std::uint32_t> dense;
  std::map<std::vector<std::int32_t>, std::uint32_t> sparse;
  bool is_dense = false;
};

std::size_t config_space(const DiscreteDataset& data, std::span<const int> vars) {
  std::size_t total = 1;
  for (int v : vars) {
    const std::size_t r = static_cast<std::size_t>(data.cardinalities[v]);
    if (total > kDenseCap / std::max<std::size_t>(r, 1)) return kDenseCap + 1;
    total *= r;
  }
  return total;
}

JointCounts count_joint(const DiscreteDataset& data, std::span<const int> vars) {
  JointCounts out;
  const std::size_t m = data.rows();
  const std::size_t space = config_space(data, vars);
  if (space <= kDenseCap) {
    out.is_dense = true;
    out.dense.assign(space, 0);
    for (std::size_t r = 0; r < m; ++r) {
      std::size_t key = 0;
      for (int v : vars) key = key * data.cardinalities[v] + data.columns[v][r];
      ++out.dense[key];
    }
  } else {
    std::vector<std::int32_t> key(vars.size());
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t i = 0; i < vars.size(); ++i) key[i] = data.columns[vars[i]][r];
      ++out.sparse[key];
    }
  }
  return out;
}

double entropy_of_counts(const JointCounts& counts, std::size_t m) {
  if (m == 0) return 0.0;
  double h = 0.0;
  const double dm = static_cast<double>(m);
  if (counts.is_dense) {
    for (std::uint32_t n : counts.dense)
      if (n > 0) h -= (n / dm) * std::log(n / dm);
  } else {
    for (const auto& [key, n] : counts.sparse) h -= (n / dm) * std::log(n / dm);
  }
  return h;
}

void check_columns(const DiscreteDataset& data, std::span<const int> vars) {
  for (int v : vars)
    if (v < 0 || v >= static_cast<int>(data.n_columns()))
      throw std::out_of_range("infotheory: column index out of range");
}

}  // namespace

double entropy(const DiscreteDataset& data, std::span<const int> vars) {
  if (vars.empty()) throw std::invalid_argument("entropy: empty variable set");
  check_columns(data, vars);
  return entropy_of_counts(count_joint(data, vars), data.rows());
}

double mutual_information(const DiscreteDataset& data, int x, int y) {
  if (x == y) throw std::invalid_argument("mutual_information: x == y");
  const int vx[] = {x}, vy[] = {y}, vxy[] = {x, y};
  return entropy(data, vx) + entropy(data, vy) - entropy(data, vxy);
}

double conditional_mutual_information(const DiscreteDataset& data, int x, int y,
                                      std::span<const int> s) {
  if (x == y) throw std::invalid_argument("cmi: x == y");
  for (int v : s)
    if (v == x || v == y) throw std::invalid_argument("cmi: x or y inside conditioning set");
  if (s.empty()) return mutual_information(data, x, y);
  check_columns(data, s);
  std::vector<int> xs(s.begin(), s.end()), ys(s.begin(), s.end()), xys(s.begin(), s.end());
  xs.push_back(x);
  ys.push_back(y);
  xys.push_back(x);
  xys.push_back(y);
  std::vector<int> ss(s.begin(), s.end());
  return entropy(data, xs) + entropy(data, ys) - entropy(data, ss) - entropy(data, xys);
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: length mismatch");
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0 || q[i] < 0) throw std::invalid_argument("kl_divergence: negative entry");
    sp += p[i];
    sq += q[i];
  }
  if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9)
    throw std::invalid_argument("kl_divergence: inputs must sum to 1");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) throw std::domain_error("kl_divergence: p > 0 where q = 0");
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(kl, 0.0);
}

double gamma_q(double a, double x) {
  if (a <= 0) return x > 0 ? 0.0 : 1.0;
  if (x <= 0) return 1.0;
  return boost::math::gamma_q(a, x);
}

double chi_square_upper_tail(double statistic, double dof) {
  if (dof <= 0) return 1.0;
  return gamma_q(dof / 2.0, std::max(statistic, 0.0) / 2.0);
}

IndependenceResult g2_test(const DiscreteDataset& data, int x, int y,
                           std::span<const int> s, double xi) {
  if (x == y) throw std::invalid_argument("g2_test: x == y");
  for (int v : s)
    if (v == x || v == y) throw std::invalid_argument("g2_test: x or y inside conditioning set");
  const int idx[] = {x, y};
  check_columns(data, idx);
  check_columns(data, s);

  const std::size_t m = data.rows();
  const int rx = data.cardinalities[x];
  const int ry = data.cardinalities[y];

  IndependenceResult res;
  res.n_effective = static_cast<long long>(m);

  double rs_product = 1.0;
  long long dof_s = 1;
  bool dof_overflow = false;
  for (int v : s) {
    rs_product *= data.cardinalities[v];
    if (dof_s > (1LL << 60) / std::max(data.cardinalities[v], 1))
      dof_overflow = true;
    else
      dof_s *= data.cardinalities[v];
  }
  res.reliable = static_cast<double>(m) >= xi * rx * ry * rs_product;
  res.dof = dof_overflow ? (1LL << 60)
                         : static_cast<long long>(rx - 1) * (ry - 1) * dof_s;

  if (res.dof <= 0 || m == 0) {
    res.dof = std::max(res.dof, 0LL);
    res.p_value = 1.0;
    res.reliable = true;
    return res;
  }

  // single pass: per S-config contingency tables of X x Y
  const std::size_t cell = static_cast<std::size_t>(rx) * ry;
  std::map<std::vector<std::int32_t>, std::vector<std::uint32_t>> sparse;
  std::vector<std::uint32_t> dense;
  std::vector<int> svars(s.begin(), s.end());
  const std::size_t s_space = config_space(data, svars);
  const bool use_dense = s_space <= kDenseCap / cell;
  if (use_dense) dense.assign(s_space * cell, 0);

  std::vector<std::int32_t> key(svars.size());
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t off = static_cast<std::size_t>(data.columns[x][r]) * ry + data.columns[y][r];
    if (use_dense) {
      std::size_t sk = 0;
      for (int v : svars) sk = sk * data.cardinalities[v] + data.columns[v][r];
      ++dense[sk * cell + off];
    } else {
      for (std::size_t i = 0; i < svars.size(); ++i) key[i] = data.columns[svars[i]][r];
      auto [it, inserted] = sparse.try_emplace(key);
      if (inserted) it->second.assign(cell, 0);
      ++it->second[off];
    }
  }

  std::vector<double> nx(rx), ny(ry);
  double acc = 0.0;
  auto accumulate_table = [&](const std::uint32_t* table) {
    double ns = 0.0;
    std::fill(nx.begin(), nx.end(), 0.0);
    std::fill(ny.begin(), ny.end(), 0.0);
    for (int a = 0; a < rx; ++a)
      for (int b = 0; b < ry; ++b) {
        const double n = table[a * ry + b];
        nx[a] += n;
        ny[b] += n;
        ns += n;
      }
    if (ns == 0.0) return;
    for (int a = 0; a < rx; ++a)
      for (int b = 0; b < ry; ++b) {
        const double n = table[a * ry + b];
        if (n > 0.0) acc += n * std::log(n * ns / (nx[a] * ny[b]));
      }
  };
  if (use_dense) {
    for (std::size_t sk = 0; sk < s_space; ++sk) accumulate_table(&dense[sk * cell]);
  } else {
    for (const auto& [k, table] : sparse) accumulate_table(table.data());
  }

  res.g2 = std::max(2.0 * acc, 0.0);
  res.mi_nats = res.g2 / (2.0 * static_cast<double>(m));
  res.p_value = chi_square_upper_tail(res.g2, static_cast<double>(res.dof));
  return res;
}

}  // namespace unifsel
