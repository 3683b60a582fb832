#ifndef UNIFSEL_INFOTHEORY_HPP
#define UNIFSEL_INFOTHEORY_HPP

#include <span>
#include <vector>

#include "unifsel/dataset.hpp"

namespace unifsel {

// G2 conditional-independence test outcome. All information measures in
// this module are plug-in (maximum likelihood) estimates in nats with
// 0*ln 0 == 0; no smoothing.
struct IndependenceResult {
  double g2 = 0.0;
  long long dof = 0;
  double p_value = 1.0;
  double mi_nats = 0.0;  // g2 / (2 m), same accumulation as g2
  bool reliable = true;
  long long n_effective = 0;
};

// joint entropy over the listed columns, in nats
double entropy(const DiscreteDataset& data, std::span<const int> vars);

double mutual_information(const DiscreteDataset& data, int x, int y);

// I(X;Y|S); S empty reduces to mutual_information
double conditional_mutual_information(const DiscreteDataset& data, int x, int y,
                                      std::span<const int> s);

// sum p ln(p/q); requires both to sum to 1 and q > 0 wherever p > 0
double kl_divergence(std::span<const double> p, std::span<const double> q);

// Likelihood-ratio test of X indep Y given S. dof is the full-table
// (r_X-1)(r_Y-1) prod r_S; dof 0 yields p = 1. reliable applies the
// m >= xi * r_X * r_Y * prod r_S sample rule.
IndependenceResult g2_test(const DiscreteDataset& data, int x, int y,
                           std::span<const int> s, double xi = 5.0);

// regularized upper incomplete gamma Q(a, x); chi-square upper tail at
// dof d and statistic g is Q(d/2, g/2)
double gamma_q(double a, double x);
double chi_square_upper_tail(double statistic, double dof);

}  // namespace unifsel

#endif
