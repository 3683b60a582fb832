#include "unifsel/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "unifsel/infotheory.hpp"
#include "unifsel/prng.hpp"

namespace unifsel {

namespace {

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {  // compensated so aggregation order cannot matter
    double y = x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(xs.size());
}

double std_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mu = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

int majority_class(const DiscreteDataset& train) {
  std::vector<long long> counts(train.class_cardinality(), 0);
  for (std::int32_t c : train.columns[train.class_index]) ++counts[c];
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

}  // namespace

PrecisionRecall precision_recall(const std::vector<int>& found, const std::vector<int>& truth) {
  std::set<int> truth_set(truth.begin(), truth.end());
  long long hits = 0;
  for (int f : found) hits += truth_set.count(f);
  PrecisionRecall pr;
  if (found.empty())
    pr.precision = truth.empty() ? 1.0 : 0.0;
  else
    pr.precision = static_cast<double>(hits) / static_cast<double>(found.size());
  pr.recall = truth.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(truth.size());
  return pr;
}

std::vector<std::vector<double>> nbc_posteriors(const DiscreteDataset& train,
                                                const DiscreteDataset& test,
                                                const std::vector<int>& features) {
  const int n_classes = train.class_cardinality();
  const std::size_t m = train.rows();
  std::vector<double> prior(n_classes, 0.0);
  for (std::int32_t c : train.columns[train.class_index]) prior[c] += 1.0;
  for (double& p : prior) p /= static_cast<double>(m);

  // class-conditional counts with add-one smoothing
  std::vector<std::vector<std::vector<double>>> cond(features.size());
  for (std::size_t fi = 0; fi < features.size(); ++fi) {
    const int f = features[fi];
    cond[fi].assign(n_classes, std::vector<double>(train.cardinalities[f], 1.0));
    for (std::size_t r = 0; r < m; ++r)
      cond[fi][train.columns[train.class_index][r]][train.columns[f][r]] += 1.0;
    for (int c = 0; c < n_classes; ++c) {
      double total = 0.0;
      for (double v : cond[fi][c]) total += v;
      for (double& v : cond[fi][c]) v /= total;
    }
  }

  std::vector<std::vector<double>> out(test.rows(), std::vector<double>(n_classes));
  for (std::size_t r = 0; r < test.rows(); ++r) {
    std::vector<double> log_post(n_classes);
    for (int c = 0; c < n_classes; ++c)
      log_post[c] = prior[c] > 0.0 ? std::log(prior[c]) : -1e100;
    for (std::size_t fi = 0; fi < features.size(); ++fi) {
      const std::int32_t v = test.columns[features[fi]][r];
      for (int c = 0; c < n_classes; ++c) log_post[c] += std::log(cond[fi][c][v]);
    }
    const double peak = *std::max_element(log_post.begin(), log_post.end());
    double total = 0.0;
    for (int c = 0; c < n_classes; ++c) {
      out[r][c] = std::exp(log_post[c] - peak);
      total += out[r][c];
    }
    for (double& p : out[r]) p /= total;
  }
  return out;
}

std::vector<int> nbc_predict(const DiscreteDataset& train, const DiscreteDataset& test,
                             const std::vector<int>& features) {
  if (features.empty())
    return std::vector<int>(test.rows(), majority_class(train));
  const auto posteriors = nbc_posteriors(train, test, features);
  std::vector<int> out(test.rows());
  for (std::size_t r = 0; r < test.rows(); ++r) {
    int best = 0;
    for (int c = 1; c < train.class_cardinality(); ++c)
      if (posteriors[r][c] > posteriors[r][best]) best = c;
    out[r] = best;
  }
  return out;
}

std::vector<int> knn_predict(const DiscreteDataset& train, const DiscreteDataset& test,
                             const std::vector<int>& features, int k) {
  if (k < 1) throw std::invalid_argument("knn: k must be >= 1");
  const std::size_t m = train.rows();
  if (features.empty())
    return std::vector<int>(test.rows(), majority_class(train));
  const int n_classes = train.class_cardinality();
  const int kk = static_cast<int>(std::min<std::size_t>(k, m));

  std::vector<int> out(test.rows());
  std::vector<std::pair<int, std::size_t>> dist(m);  // (hamming, train row)
  for (std::size_t r = 0; r < test.rows(); ++r) {
    for (std::size_t t = 0; t < m; ++t) {
      int d = 0;
      for (int f : features) d += train.columns[f][t] != test.columns[f][r];
      dist[t] = {d, t};
    }
    std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
    std::vector<int> votes(n_classes, 0);
    for (int i = 0; i < kk; ++i) ++votes[train.columns[train.class_index][dist[i].second]];
    int best = 0;
    for (int c = 1; c < n_classes; ++c)
      if (votes[c] > votes[best]) best = c;
    out[r] = best;
  }
  return out;
}

std::vector<std::vector<long long>> confusion_matrix(const std::vector<int>& truth,
                                                     const std::vector<int>& predicted,
                                                     int n_classes) {
  std::vector<std::vector<long long>> cm(n_classes, std::vector<long long>(n_classes, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) ++cm[truth[i]][predicted[i]];
  return cm;
}

double accuracy(const std::vector<int>& truth, const std::vector<int>& predicted) {
  if (truth.empty()) return 0.0;
  long long hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == predicted[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double kappa(const std::vector<std::vector<long long>>& confusion) {
  const std::size_t n = confusion.size();
  double total = 0.0, diag = 0.0;
  std::vector<double> row(n, 0.0), col(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      total += static_cast<double>(confusion[i][j]);
      row[i] += static_cast<double>(confusion[i][j]);
      col[j] += static_cast<double>(confusion[i][j]);
      if (i == j) diag += static_cast<double>(confusion[i][j]);
    }
  if (total <= 0.0) throw std::invalid_argument("kappa: empty confusion matrix");
  const double po = diag / total;
  double pe = 0.0;
  for (std::size_t i = 0; i < n; ++i) pe += (row[i] / total) * (col[i] / total);
  if (std::abs(1.0 - pe) < 1e-15) return 0.0;
  return (po - pe) / (1.0 - pe);
}

double auc_binary(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("auc: length mismatch");
  double n_pos = 0.0, n_neg = 0.0;
  for (int y : labels) (y == 1 ? n_pos : n_neg) += 1.0;
  if (n_pos == 0.0 || n_neg == 0.0)
    throw std::invalid_argument("auc: both classes must be present");

  // rank sum with midranks for ties
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t)
      if (labels[order[t]] == 1) rank_sum_pos += midrank;
    i = j;
  }
  return (rank_sum_pos - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

ErrorBounds bayes_error_bounds(double h_cs_nats, int n_classes) {
  if (n_classes < 2) throw std::invalid_argument("bayes_error_bounds: K must be >= 2");
  if (h_cs_nats < 0.0) throw std::invalid_argument("bayes_error_bounds: negative entropy");
  if (h_cs_nats > std::log(static_cast<double>(n_classes)) + 1e-9)
    throw std::invalid_argument("bayes_error_bounds: H(C|S) exceeds ln K");

  ErrorBounds bounds;
  if (n_classes == 2) bounds.upper = h_cs_nats / 2.0;

  if (h_cs_nats <= 0.0) {
    bounds.lower = 0.0;
  } else {
    auto binary_h = [](double p) {
      double h = 0.0;
      if (p > 0.0) h -= p * std::log(p);
      if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
      return h;
    };
    const double log_km1 = std::log(static_cast<double>(n_classes - 1));
    const double p_max = 1.0 - 1.0 / static_cast<double>(n_classes);
    auto fano = [&](double p) { return binary_h(p) + p * log_km1; };
    double lo = 0.0, hi = p_max;
    if (fano(hi) <= h_cs_nats) {
      bounds.lower = hi;
    } else {
      for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
        const double mid = (lo + hi) / 2.0;
        (fano(mid) >= h_cs_nats ? hi : lo) = mid;
      }
      bounds.lower = hi;
    }
  }
  if (bounds.upper && bounds.lower > *bounds.upper + 1e-15) bounds.crossed = true;
  return bounds;
}

double conditional_log_likelihood(const DiscreteDataset& data, const std::vector<int>& s) {
  const std::size_t m = data.rows();
  const int n_classes = data.class_cardinality();
  std::map<std::vector<std::int32_t>, std::vector<double>> counts;
  std::vector<std::int32_t> key(s.size());
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t i = 0; i < s.size(); ++i) key[i] = data.columns[s[i]][r];
    auto [it, inserted] = counts.try_emplace(key);
    if (inserted) it->second.assign(n_classes, 0.0);
    ++it->second[data.columns[data.class_index][r]];
  }
  double acc = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t i = 0; i < s.size(); ++i) key[i] = data.columns[s[i]][r];
    const auto& row = counts.at(key);
    double total = 0.0;
    for (double v : row) total += v;
    const double q = (row[data.columns[data.class_index][r]] + 1.0) /
                     (total + static_cast<double>(n_classes));
    acc += std::log(q);
  }
  return acc / static_cast<double>(m);
}

double conditional_entropy_nats(const DiscreteDataset& data, const std::vector<int>& s) {
  const int cvar[] = {data.class_index};
  if (s.empty()) return entropy(data, cvar);
  std::vector<int> with = s;
  with.push_back(data.class_index);
  return entropy(data, with) - entropy(data, s);
}

double exact_bayes_error(const JointDistribution& joint, int target,
                         const std::vector<int>& vars) {
  const int n = static_cast<int>(joint.cardinalities.size());
  std::vector<std::size_t> stride(n, 1);
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * joint.cardinalities[i + 1];

  std::size_t space = 1;
  for (int v : vars) space *= joint.cardinalities[v];
  std::vector<std::vector<double>> table(space, std::vector<double>(joint.cardinalities[target], 0.0));
  for (std::size_t idx = 0; idx < joint.probs.size(); ++idx) {
    const double p = joint.probs[idx];
    if (p <= 0.0) continue;
    std::size_t key = 0;
    for (int v : vars) key = key * joint.cardinalities[v] + ((idx / stride[v]) % joint.cardinalities[v]);
    table[key][(idx / stride[target]) % joint.cardinalities[target]] += p;
  }
  double err = 0.0;
  for (const auto& row : table) {
    double total = 0.0, best = 0.0;
    for (double v : row) {
      total += v;
      best = std::max(best, v);
    }
    err += total - best;
  }
  return err;
}

CausalAlgo causal_algo_from_name(const std::string& name) {
  if (name == "iamb") return CausalAlgo::IAMB;
  if (name == "interiamb") return CausalAlgo::INTER_IAMB;
  if (name == "mmpc") return CausalAlgo::MMPC;
  if (name == "mmmb") return CausalAlgo::MMMB;
  if (name == "hitonpc") return CausalAlgo::HITON_PC;
  if (name == "hitonmb") return CausalAlgo::HITON_MB;
  if (name == "ipcmb") return CausalAlgo::IPC_MB;
  if (name == "stmb") return CausalAlgo::STMB;
  throw std::invalid_argument(
      "unknown algorithm '" + name +
      "' (expected iamb|interiamb|mmpc|mmmb|hitonpc|hitonmb|ipcmb|stmb)");
}

std::string causal_algo_name(CausalAlgo algo) {
  switch (algo) {
    case CausalAlgo::IAMB: return "iamb";
    case CausalAlgo::INTER_IAMB: return "interiamb";
    case CausalAlgo::MMPC: return "mmpc";
    case CausalAlgo::MMMB: return "mmmb";
    case CausalAlgo::HITON_PC: return "hitonpc";
    case CausalAlgo::HITON_MB: return "hitonmb";
    case CausalAlgo::IPC_MB: return "ipcmb";
    case CausalAlgo::STMB: return "stmb";
  }
  return "?";
}

bool causal_algo_is_pc(CausalAlgo algo) {
  return algo == CausalAlgo::MMPC || algo == CausalAlgo::HITON_PC;
}

SelectorSpec SelectorSpec::from_name(const std::string& name) {
  SelectorSpec spec;
  if (name == "all") {
    spec.kind = SelectorKind::AllFeatures;
  } else if (name == "truemb") {
    spec.kind = SelectorKind::TrueMb;
  } else if (name == "truepc") {
    spec.kind = SelectorKind::TruePc;
  } else if (name == "fcbf") {
    spec.kind = SelectorKind::Fcbf;
    spec.fcbf.alpha = 0.05;
  } else {
    try {
      spec.criterion.kind = criterion_from_name(name);
      spec.kind = SelectorKind::Criterion;
      if (spec.criterion.kind == Criterion::MIFS) spec.criterion.beta = 1.0;
      return spec;
    } catch (const std::invalid_argument&) {
    }
    spec.algo = causal_algo_from_name(name);
    spec.kind = causal_algo_is_pc(spec.algo) ? SelectorKind::CausalPc : SelectorKind::CausalMb;
  }
  return spec;
}

std::string SelectorSpec::name() const {
  switch (kind) {
    case SelectorKind::Criterion: return criterion_name(criterion.kind);
    case SelectorKind::Fcbf: return "fcbf";
    case SelectorKind::CausalMb:
    case SelectorKind::CausalPc: return causal_algo_name(algo);
    case SelectorKind::TrueMb: return "truemb";
    case SelectorKind::TruePc: return "truepc";
    case SelectorKind::AllFeatures: return "all";
  }
  return "?";
}

SelectionOutcome run_selector(const DiscreteDataset& train, const SelectorSpec& spec,
                              const BayesianNetwork* bn, int target) {
  SelectionOutcome out;
  switch (spec.kind) {
    case SelectorKind::Criterion: {
      const auto res = greedy_select(train, spec.criterion, spec.psi);
      out.features = res.selected;
      break;
    }
    case SelectorKind::Fcbf: {
      const auto res = fcbf(train, spec.fcbf);
      out.features = res.selected;
      break;
    }
    case SelectorKind::CausalMb:
    case SelectorKind::CausalPc: {
      MBResult res;
      switch (spec.algo) {
        case CausalAlgo::IAMB: res = iamb_at(train, target, spec.causal); break;
        case CausalAlgo::INTER_IAMB: res = inter_iamb_at(train, target, spec.causal); break;
        case CausalAlgo::MMMB: res = mmmb(train, target, spec.causal); break;
        case CausalAlgo::HITON_MB: res = hiton_mb(train, target, spec.causal); break;
        case CausalAlgo::IPC_MB: res = ipc_mb(train, target, spec.causal); break;
        case CausalAlgo::STMB: res = stmb(train, target, spec.causal); break;
        case CausalAlgo::MMPC:
          res.pc = mmpc(train, target, spec.causal);
          res.mb = res.pc;
          break;
        case CausalAlgo::HITON_PC:
          res.pc = hiton_pc(train, target, spec.causal);
          res.mb = res.pc;
          break;
      }
      out.features = res.mb;
      out.mb = res.mb;
      out.tests_run = res.tests_run;
      break;
    }
    case SelectorKind::TrueMb: {
      if (!bn) throw std::invalid_argument("truemb selector needs a network");
      out.features = true_mb(*bn, target).mb();
      out.mb = out.features;
      break;
    }
    case SelectorKind::TruePc: {
      if (!bn) throw std::invalid_argument("truepc selector needs a network");
      out.features = true_pc(*bn, target);
      out.mb = out.features;
      break;
    }
    case SelectorKind::AllFeatures:
      out.features = train.feature_indices();
      break;
  }
  return out;
}

namespace {

struct SplitEval {
  FoldDetail detail;
  double cond_entropy_nats = 0.0;
};

SplitEval evaluate_split(const DiscreteDataset& train, const DiscreteDataset& test,
                         const SelectorSpec& selector, const ClassifierSpec& classifier,
                         const BayesianNetwork* bn, int target, std::uint64_t seed) {
  SplitEval ev;
  ev.detail.seed = seed;
  const SelectionOutcome sel = run_selector(train, selector, bn, target);
  ev.detail.selected = sel.features;

  std::vector<int> truth(test.columns[test.class_index].begin(),
                         test.columns[test.class_index].end());
  std::vector<int> predicted;
  std::vector<double> scores;
  if (classifier.kind == "nbc") {
    predicted = nbc_predict(train, test, sel.features);
    if (train.class_cardinality() == 2 && !sel.features.empty()) {
      const auto post = nbc_posteriors(train, test, sel.features);
      for (const auto& row : post) scores.push_back(row[1]);
    }
  } else if (classifier.kind == "knn") {
    predicted = knn_predict(train, test, sel.features, classifier.k);
  } else {
    throw std::invalid_argument("unknown classifier '" + classifier.kind + "'");
  }

  ev.detail.confusion = confusion_matrix(truth, predicted, train.class_cardinality());
  ev.detail.accuracy = accuracy(truth, predicted);
  ev.detail.kappa = kappa(ev.detail.confusion);
  if (!scores.empty()) {
    const bool both = std::count(truth.begin(), truth.end(), 1) > 0 &&
                      std::count(truth.begin(), truth.end(), 0) > 0;
    if (both) ev.detail.auc = auc_binary(scores, truth);
  }
  ev.cond_entropy_nats = conditional_entropy_nats(train, sel.features);
  return ev;
}

EvaluationReport aggregate(const std::vector<SplitEval>& evals, int n_classes) {
  EvaluationReport report;
  std::vector<double> accs, kappas, aucs, hs;
  for (const auto& ev : evals) {
    accs.push_back(ev.detail.accuracy);
    kappas.push_back(ev.detail.kappa);
    if (ev.detail.auc) aucs.push_back(*ev.detail.auc);
    hs.push_back(ev.cond_entropy_nats);
    report.per_fold.push_back(ev.detail);
  }
  report.accuracy_mean = mean_of(accs);
  report.accuracy_std = std_of(accs);
  report.kappa_mean = mean_of(kappas);
  report.kappa_std = std_of(kappas);
  if (!aucs.empty()) {
    report.auc_mean = mean_of(aucs);
    report.auc_std = std_of(aucs);
  }
  const double h_nats = mean_of(hs);
  report.cond_entropy_bits = h_nats / std::log(2.0);
  const ErrorBounds bounds = bayes_error_bounds(h_nats, n_classes);
  report.bound_lower = bounds.lower;
  report.bound_upper = bounds.upper;
  report.bounds_crossed = bounds.crossed;
  return report;
}

}  // namespace

EvaluationReport evaluate_pipeline(const NetworkPlan& plan, const SelectorSpec& selector,
                                   const ClassifierSpec& classifier) {
  if (!plan.bn || plan.seeds.empty()) throw std::invalid_argument("evaluate_pipeline: empty plan");
  const auto start = std::chrono::steady_clock::now();

  const auto truth_mb = true_mb(*plan.bn, plan.target);
  const std::vector<int> truth = causal_algo_is_pc(selector.algo) &&
                                         (selector.kind == SelectorKind::CausalPc)
                                     ? truth_mb.pc()
                                     : truth_mb.mb();

  std::vector<SplitEval> evals;
  std::vector<double> precisions, recalls;
  for (std::uint64_t seed : plan.seeds) {
    const DiscreteDataset train =
        forward_sample(*plan.bn, plan.train_rows, seed, plan.target);
    const DiscreteDataset test =
        forward_sample(*plan.bn, plan.test_rows, Prng::mix64(seed ^ 0x7465737421ULL), plan.target);
    evals.push_back(evaluate_split(train, test, selector, classifier, plan.bn, plan.target, seed));
    const auto pr = precision_recall(evals.back().detail.selected, truth);
    precisions.push_back(pr.precision);
    recalls.push_back(pr.recall);
  }

  EvaluationReport report = aggregate(evals, plan.bn->cardinalities[plan.target]);
  report.precision = mean_of(precisions);
  report.recall = mean_of(recalls);
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

EvaluationReport evaluate_pipeline(const FoldPlanSpec& plan, const SelectorSpec& selector,
                                   const ClassifierSpec& classifier) {
  if (!plan.data) throw std::invalid_argument("evaluate_pipeline: null data");
  const auto start = std::chrono::steady_clock::now();
  const FoldPlan folds = make_folds(*plan.data, plan.k, plan.seed);

  std::vector<SplitEval> evals;
  for (int fold = 0; fold < plan.k; ++fold) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t r = 0; r < plan.data->rows(); ++r)
      (folds.assignments[r] == fold ? test_rows : train_rows).push_back(r);
    const DiscreteDataset train = take_rows(*plan.data, train_rows);
    const DiscreteDataset test = take_rows(*plan.data, test_rows);
    evals.push_back(evaluate_split(train, test, selector, classifier, nullptr,
                                   plan.data->class_index, static_cast<std::uint64_t>(fold)));
  }

  EvaluationReport report = aggregate(evals, plan.data->class_cardinality());
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace unifsel
