#ifndef UNIFSEL_NONCAUSAL_HPP
#define UNIFSEL_NONCAUSAL_HPP

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "unifsel/dataset.hpp"

namespace unifsel {

enum class Criterion { MIM, MIFS, MRMR, JMI, CIFE, CMIM, RELAX_MRMR };

Criterion criterion_from_name(const std::string& name);
std::string criterion_name(Criterion kind);

// beta weights the redundancy penalty (MIFS only). CIFE optionally takes
// the generalized (beta, gamma_weight) pair; its defaults (1, 1) are the
// plain CIFE score and other kinds reject both knobs.
struct CriterionSpec {
  Criterion kind = Criterion::MIM;
  std::optional<double> beta;
  std::optional<double> gamma_weight;

  void validate() const;
  double beta_or(double fallback) const { return beta.value_or(fallback); }
  double gamma_or(double fallback) const { return gamma_weight.value_or(fallback); }
};

struct SelectionResult {
  std::vector<int> selected;        // ordered feature columns
  std::vector<double> step_scores;  // winning score per step
  std::string criterion;            // resolved criterion / fcbf description
  int psi = 0;
};

// Cache of pairwise statistics shared across greedy steps: I(x;C),
// I(x;y), I(x;y|C) (both symmetric) and the RelaxMRMR second-order
// I(x;y|z) keyed on (min, max, z). One cache per selection run; callers
// scoring concurrently must confine it to one task.
class PairwiseCache {
 public:
  explicit PairwiseCache(const DiscreteDataset& data) : data_(&data) {}

  double mi_with_class(int x);
  double mi(int x, int y);
  double cmi_given_class(int x, int y);
  double cmi(int x, int y, int z);  // I(x;y|z)

  std::size_t size() const {
    return mi_class_.size() + mi_.size() + cmi_class_.size() + cmi2_.size();
  }

 private:
  const DiscreteDataset* data_;
  std::unordered_map<int, double> mi_class_;
  std::unordered_map<std::uint64_t, double> mi_;
  std::unordered_map<std::uint64_t, double> cmi_class_;
  std::unordered_map<std::uint64_t, double> cmi2_;
};

// Score of the criterion for candidate x against the already-selected set
// s; every kind reduces to I(x;C) when s is empty.
double score_candidate(const DiscreteDataset& data, int x, const std::vector<int>& s,
                       const CriterionSpec& spec, PairwiseCache& cache);

// The (beta, gamma) family: I(x;C) - beta sum I(x;Fi) + gamma sum I(x;Fi|C).
double score_generalized(const DiscreteDataset& data, int x, const std::vector<int>& s,
                         double beta, double gamma, PairwiseCache& cache);

// Forward greedy selection of psi features; ties break to the lowest
// feature index.
SelectionResult greedy_select(const DiscreteDataset& data, const CriterionSpec& spec, int psi);

// Relevance gate: either a G2 significance test at alpha (default) or a
// raw MI threshold delta; exactly one must be set.
struct FcbfParams {
  std::optional<double> alpha;
  std::optional<double> delta;
};

SelectionResult fcbf(const DiscreteDataset& data, const FcbfParams& params);

}  // namespace unifsel

#endif
