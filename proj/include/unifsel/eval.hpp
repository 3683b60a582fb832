#ifndef UNIFSEL_EVAL_HPP
#define UNIFSEL_EVAL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unifsel/bayesnet.hpp"
#include "unifsel/causal.hpp"
#include "unifsel/dataset.hpp"
#include "unifsel/noncausal.hpp"

namespace unifsel {

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

// |found & truth| / |found| and / |truth|; empty-found conventions:
// precision 1 when truth is also empty, else 0
PrecisionRecall precision_recall(const std::vector<int>& found, const std::vector<int>& truth);

// Categorical naive Bayes, add-one smoothing on the class-conditional
// counts, empirical priors; posterior ties go to the lowest class code.
// An empty feature set predicts the training majority class.
std::vector<int> nbc_predict(const DiscreteDataset& train, const DiscreteDataset& test,
                             const std::vector<int>& features);
// per-row class posteriors (rows x classes), for scoring
std::vector<std::vector<double>> nbc_posteriors(const DiscreteDataset& train,
                                                const DiscreteDataset& test,
                                                const std::vector<int>& features);

// k nearest by Hamming distance over the selected features, distance then
// training-row index for neighbor ties, majority vote with lowest class
// code on vote ties
std::vector<int> knn_predict(const DiscreteDataset& train, const DiscreteDataset& test,
                             const std::vector<int>& features, int k);

std::vector<std::vector<long long>> confusion_matrix(const std::vector<int>& truth,
                                                     const std::vector<int>& predicted,
                                                     int n_classes);
double accuracy(const std::vector<int>& truth, const std::vector<int>& predicted);

// Cohen's kappa; 0 when chance agreement is 1
double kappa(const std::vector<std::vector<long long>>& confusion);

// rank-based (Mann-Whitney) AUC; ties contribute 1/2
double auc_binary(const std::vector<double>& scores, const std::vector<int>& labels);

struct ErrorBounds {
  double lower = 0.0;                  // Fano inverse, consistent units
  std::optional<double> upper;         // H/2 as stated, binary only; raw nats
  bool crossed = false;                // lower > upper (unit mismatch artifact)
};

// H_cs in nats. lower solves H(P) + P ln(K-1) = H_cs on [0, 1-1/K] by
// bisection; upper = H_cs/2 reported verbatim for K = 2 and absent
// otherwise. The two are deliberately not unit-reconciled; `crossed`
// flags when the raw values invert.
ErrorBounds bayes_error_bounds(double h_cs_nats, int n_classes);

// average log q(c_i|s_i) in nats, q fit on the same data with add-one
// smoothing over class counts per S-configuration
double conditional_log_likelihood(const DiscreteDataset& data, const std::vector<int>& s);

// plug-in H(C|S) on a dataset, nats; s may be empty (gives H(C))
double conditional_entropy_nats(const DiscreteDataset& data, const std::vector<int>& s);

// exact Bayes error of predicting the target from the listed variables
double exact_bayes_error(const JointDistribution& joint, int target,
                         const std::vector<int>& vars);

enum class SelectorKind { Criterion, Fcbf, CausalMb, CausalPc, TrueMb, TruePc, AllFeatures };
enum class CausalAlgo { IAMB, INTER_IAMB, MMPC, MMMB, HITON_PC, HITON_MB, IPC_MB, STMB };

CausalAlgo causal_algo_from_name(const std::string& name);
std::string causal_algo_name(CausalAlgo algo);
bool causal_algo_is_pc(CausalAlgo algo);

struct SelectorSpec {
  SelectorKind kind = SelectorKind::AllFeatures;
  CriterionSpec criterion;
  int psi = 0;
  FcbfParams fcbf;
  CausalAlgo algo = CausalAlgo::IAMB;
  CausalConfig causal;

  // resolves names like "mrmr", "hitonmb", "fcbf", "truemb", "all"
  static SelectorSpec from_name(const std::string& name);
  std::string name() const;
};

struct ClassifierSpec {
  std::string kind = "knn";  // "nbc" | "knn"
  int k = 1;
};

// selected features plus selection bookkeeping for one training set
struct SelectionOutcome {
  std::vector<int> features;
  std::size_t tests_run = 0;
  std::vector<int> mb;  // causal selectors only
};

SelectionOutcome run_selector(const DiscreteDataset& train, const SelectorSpec& spec,
                              const BayesianNetwork* bn, int target);

struct FoldDetail {
  std::uint64_t seed = 0;
  std::vector<int> selected;
  std::vector<std::vector<long long>> confusion;
  double accuracy = 0.0;
  double kappa = 0.0;
  std::optional<double> auc;
};

struct EvaluationReport {
  double precision = 0.0;
  double recall = 0.0;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  double kappa_mean = 0.0;
  double kappa_std = 0.0;
  std::optional<double> auc_mean;
  std::optional<double> auc_std;
  double cond_entropy_bits = 0.0;
  double bound_lower = 0.0;
  std::optional<double> bound_upper;
  bool bounds_crossed = false;
  double runtime_seconds = 0.0;
  std::vector<FoldDetail> per_fold;
};

// Train/test plan sampled from a network: per seed, sample, select on the
// training rows only, fit, score on fresh test rows.
struct NetworkPlan {
  const BayesianNetwork* bn = nullptr;
  int target = -1;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::vector<std::uint64_t> seeds;
};

// Cross-validation plan over a fixed dataset.
struct FoldPlanSpec {
  const DiscreteDataset* data = nullptr;
  int k = 10;
  std::uint64_t seed = 0;
};

EvaluationReport evaluate_pipeline(const NetworkPlan& plan, const SelectorSpec& selector,
                                   const ClassifierSpec& classifier);
EvaluationReport evaluate_pipeline(const FoldPlanSpec& plan, const SelectorSpec& selector,
                                   const ClassifierSpec& classifier);

}  // namespace unifsel

#endif
