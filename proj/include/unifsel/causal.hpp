#ifndef UNIFSEL_CAUSAL_HPP
#define UNIFSEL_CAUSAL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "unifsel/dataset.hpp"
#include "unifsel/infotheory.hpp"

namespace unifsel {

// What every algorithm below means by the two verdicts:
//   dependent(x, y | s)   = the G2 test ran, was reliable, and rejected at alpha
//   independent(x, y | s) = the test ran, was reliable, and failed to reject
// An unreliable test is skipped; under skip-as-dependent it never declares
// independence (features stall or stay), under skip-as-independent it counts
// as an independence verdict.
enum class UnreliablePolicy { SkipAsDependent, SkipAsIndependent };

enum class Verdict { Dependent, Independent, Unreliable };

struct CausalConfig {
  double alpha = 0.05;
  int gamma_cap = 3;  // max conditioning-subset size; -1 = unlimited
  double xi = 5.0;
  UnreliablePolicy policy = UnreliablePolicy::SkipAsDependent;

  void validate() const;
};

struct LedgerEntry {
  int x = -1;
  int y = -1;
  std::vector<int> s;
  double g2 = 0.0;
  long long dof = 0;
  double p_value = -1.0;  // -1 when the test was skipped as unreliable
  double mi = 0.0;
  bool reliable = false;
  Verdict verdict = Verdict::Unreliable;
};

struct MBResult {
  std::vector<int> pc;
  std::vector<int> spouses;
  std::vector<int> mb;
  std::size_t tests_run = 0;
  std::vector<LedgerEntry> ledger;
};

// Memoizing test oracle shared by one algorithm run (including its
// symmetry-correction and spouse sub-runs). Every distinct query appends
// one ledger entry; repeats are free and not re-logged.
class CiEngine {
 public:
  CiEngine(const DiscreteDataset& data, const CausalConfig& config);

  const LedgerEntry& query(int x, int y, std::vector<int> s);

  bool dependent(int x, int y, std::vector<int> s);
  bool independent(int x, int y, std::vector<int> s);
  // mi of a performed test, NaN if skipped as unreliable
  double association(int x, int y, std::vector<int> s);

  std::size_t tests_run() const { return ledger_.size(); }
  const std::vector<LedgerEntry>& ledger() const { return ledger_; }
  const CausalConfig& config() const { return config_; }
  const DiscreteDataset& data() const { return *data_; }

 private:
  const DiscreteDataset* data_;
  CausalConfig config_;
  std::map<std::tuple<int, int, std::vector<int>>, std::size_t> memo_;
  std::vector<LedgerEntry> ledger_;
};

enum class PcRoutine { MMPC, HITON_PC, IPCMB_BACKWARD };

// Simultaneous MB discovery conditioning on the whole selected set.
// pc is left empty: these algorithms do not separate PC from spouses.
MBResult iamb(const DiscreteDataset& data, const CausalConfig& config);
MBResult inter_iamb(const DiscreteDataset& data, const CausalConfig& config);
MBResult iamb_at(const DiscreteDataset& data, int target, const CausalConfig& config);
MBResult inter_iamb_at(const DiscreteDataset& data, int target, const CausalConfig& config);

// Divide-and-conquer PC discovery (gamma-capped subset search).
std::vector<int> mmpc(const DiscreteDataset& data, int target, const CausalConfig& config);
std::vector<int> hiton_pc(const DiscreteDataset& data, int target, const CausalConfig& config);

MBResult mmmb(const DiscreteDataset& data, int target, const CausalConfig& config);
MBResult hiton_mb(const DiscreteDataset& data, int target, const CausalConfig& config);
MBResult ipc_mb(const DiscreteDataset& data, int target, const CausalConfig& config);
MBResult stmb(const DiscreteDataset& data, int target, const CausalConfig& config);

// Keep X in pc_candidates iff target shows up in the same routine's PC run
// seeded at X.
std::vector<int> symmetry_correction(const DiscreteDataset& data, int target,
                                     const std::vector<int>& pc_candidates,
                                     const CausalConfig& config, PcRoutine routine);

std::string verdict_name(Verdict v);

}  // namespace unifsel

#endif
