#include "unifsel/noncausal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "unifsel/infotheory.hpp"

namespace unifsel {

namespace {

std::uint64_t pair_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

std::uint64_t triple_key(int a, int b, int z) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 42) | (static_cast<std::uint64_t>(b) << 21) |
         static_cast<std::uint64_t>(z);
}

}  // namespace

Criterion criterion_from_name(const std::string& name) {
  if (name == "mim") return Criterion::MIM;
  if (name == "mifs") return Criterion::MIFS;
  if (name == "mrmr") return Criterion::MRMR;
  if (name == "jmi") return Criterion::JMI;
  if (name == "cife") return Criterion::CIFE;
  if (name == "cmim") return Criterion::CMIM;
  if (name == "relaxmrmr") return Criterion::RELAX_MRMR;
  throw std::invalid_argument("unknown criterion '" + name +
                              "' (expected mim|mifs|mrmr|jmi|cife|cmim|relaxmrmr)");
}

std::string criterion_name(Criterion kind) {
  switch (kind) {
    case Criterion::MIM: return "mim";
    case Criterion::MIFS: return "mifs";
    case Criterion::MRMR: return "mrmr";
    case Criterion::JMI: return "jmi";
    case Criterion::CIFE: return "cife";
    case Criterion::CMIM: return "cmim";
    case Criterion::RELAX_MRMR: return "relaxmrmr";
  }
  return "?";
}

void CriterionSpec::validate() const {
  const bool uses_beta = kind == Criterion::MIFS || kind == Criterion::CIFE;
  const bool uses_gamma = kind == Criterion::CIFE;
  if (beta && !uses_beta)
    throw std::invalid_argument("criterion " + criterion_name(kind) + " does not take beta");
  if (gamma_weight && !uses_gamma)
    throw std::invalid_argument("criterion " + criterion_name(kind) + " does not take gamma");
  if (kind == Criterion::MIFS && !beta)
    throw std::invalid_argument("criterion mifs requires beta");
  for (const auto& value : {beta, gamma_weight})
    if (value && (*value < 0.0 || *value > 1.0))
      throw std::invalid_argument("criterion weights must lie in [0,1]");
}

double PairwiseCache::mi_with_class(int x) {
  auto it = mi_class_.find(x);
  if (it != mi_class_.end()) return it->second;
  const double v = mutual_information(*data_, x, data_->class_index);
  mi_class_.emplace(x, v);
  return v;
}

double PairwiseCache::mi(int x, int y) {
  const auto key = pair_key(x, y);
  auto it = mi_.find(key);
  if (it != mi_.end()) return it->second;
  const double v = mutual_information(*data_, x, y);
  mi_.emplace(key, v);
  return v;
}

double PairwiseCache::cmi_given_class(int x, int y) {
  const auto key = pair_key(x, y);
  auto it = cmi_class_.find(key);
  if (it != cmi_class_.end()) return it->second;
  const int cond[] = {data_->class_index};
  const double v = conditional_mutual_information(*data_, x, y, cond);
  cmi_class_.emplace(key, v);
  return v;
}

double PairwiseCache::cmi(int x, int y, int z) {
  const auto key = triple_key(x, y, z);
  auto it = cmi2_.find(key);
  if (it != cmi2_.end()) return it->second;
  const int cond[] = {z};
  const double v = conditional_mutual_information(*data_, x, y, cond);
  cmi2_.emplace(key, v);
  return v;
}

double score_generalized(const DiscreteDataset& data, int x, const std::vector<int>& s,
                         double beta, double gamma, PairwiseCache& cache) {
  (void)data;
  double score = cache.mi_with_class(x);
  for (int f : s) score += gamma * cache.cmi_given_class(x, f) - beta * cache.mi(x, f);
  return score;
}

double score_candidate(const DiscreteDataset& data, int x, const std::vector<int>& s,
                       const CriterionSpec& spec, PairwiseCache& cache) {
  spec.validate();
  if (std::find(s.begin(), s.end(), x) != s.end())
    throw std::invalid_argument("score_candidate: x already selected");

  const double relevance = cache.mi_with_class(x);
  if (s.empty()) return relevance;
  const double inv = 1.0 / static_cast<double>(s.size());

  switch (spec.kind) {
    case Criterion::MIM:
      return relevance;
    case Criterion::MIFS:
      return score_generalized(data, x, s, spec.beta_or(1.0), 0.0, cache);
    case Criterion::MRMR:
      return score_generalized(data, x, s, inv, 0.0, cache);
    case Criterion::JMI:
      return score_generalized(data, x, s, inv, inv, cache);
    case Criterion::CIFE:
      return score_generalized(data, x, s, spec.beta_or(1.0), spec.gamma_or(1.0), cache);
    case Criterion::CMIM: {
      double worst = -std::numeric_limits<double>::infinity();
      for (int f : s) worst = std::max(worst, cache.mi(x, f) - cache.cmi_given_class(x, f));
      return relevance - worst;
    }
    case Criterion::RELAX_MRMR: {
      double score = relevance;
      for (int f : s) score += cache.cmi_given_class(x, f);
      double penalty = 0.0;
      for (int fi : s) {
        penalty += cache.mi(x, fi);
        for (int fj : s)
          if (fj != fi) penalty += cache.cmi(x, fj, fi);
      }
      return score - inv * penalty;
    }
  }
  throw std::logic_error("score_candidate: unhandled criterion");
}

SelectionResult greedy_select(const DiscreteDataset& data, const CriterionSpec& spec, int psi) {
  spec.validate();
  const auto features = data.feature_indices();
  if (psi < 1 || psi > static_cast<int>(features.size()))
    throw std::invalid_argument("greedy_select: psi out of range [1, n]");

  PairwiseCache cache(data);
  SelectionResult result;
  result.criterion = criterion_name(spec.kind);
  result.psi = psi;

  std::vector<int> remaining = features;
  while (static_cast<int>(result.selected.size()) < psi) {
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int x : remaining) {
      const double score = score_candidate(data, x, result.selected, spec, cache);
      if (score > best_score || (score == best_score && x < best)) {
        best_score = score;
        best = x;
      }
    }
    result.selected.push_back(best);
    result.step_scores.push_back(best_score);
    remaining.erase(std::find(remaining.begin(), remaining.end(), best));
  }
  return result;
}

SelectionResult fcbf(const DiscreteDataset& data, const FcbfParams& params) {
  if (params.alpha.has_value() == params.delta.has_value())
    throw std::invalid_argument("fcbf: provide exactly one of alpha / delta");

  PairwiseCache cache(data);
  const int class_col = data.class_index;

  // forward: keep features relevant to C, strongest first
  struct Entry {
    int feature;
    double relevance;
  };
  std::vector<Entry> kept;
  for (int x : data.feature_indices()) {
    const double rel = cache.mi_with_class(x);
    bool relevant;
    if (params.delta) {
      relevant = rel > *params.delta;
    } else {
      const auto res = g2_test(data, x, class_col, {});
      relevant = res.reliable && res.p_value <= *params.alpha;
    }
    if (relevant) kept.push_back({x, rel});
  }
  std::stable_sort(kept.begin(), kept.end(), [](const Entry& a, const Entry& b) {
    if (a.relevance != b.relevance) return a.relevance > b.relevance;
    return a.feature < b.feature;
  });

  // backward: scanning kept features in order, X removes any later Y with
  // I(X;Y) > I(Y;C)
  std::vector<bool> removed(kept.size(), false);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (removed[i]) continue;
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      if (removed[j]) continue;
      if (cache.mi(kept[i].feature, kept[j].feature) > kept[j].relevance) removed[j] = true;
    }
  }

  SelectionResult result;
  result.criterion = params.delta ? "fcbf(delta)" : "fcbf(alpha)";
  result.psi = static_cast<int>(data.feature_indices().size());
  for (std::size_t i = 0; i < kept.size(); ++i)
    if (!removed[i]) {
      result.selected.push_back(kept[i].feature);
      result.step_scores.push_back(kept[i].relevance);
    }
  return result;
}

}  // namespace unifsel
