#include "unifsel/causal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace unifsel {

void CausalConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("config: alpha must be in (0,1)");
  if (xi <= 0.0) throw std::invalid_argument("config: xi must be positive");
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Dependent: return "dependent";
    case Verdict::Independent: return "independent";
    case Verdict::Unreliable: return "unreliable";
  }
  return "?";
}

CiEngine::CiEngine(const DiscreteDataset& data, const CausalConfig& config)
    : data_(&data), config_(config) {
  config_.validate();
}

const LedgerEntry& CiEngine::query(int x, int y, std::vector<int> s) {
  if (x > y) std::swap(x, y);
  std::sort(s.begin(), s.end());
  auto key = std::make_tuple(x, y, s);
  auto it = memo_.find(key);
  if (it != memo_.end()) return ledger_[it->second];

  LedgerEntry entry;
  entry.x = x;
  entry.y = y;
  entry.s = s;

  // the sample rule decides whether the test runs at all
  double requirement = config_.xi * data_->cardinalities[x] * data_->cardinalities[y];
  for (int v : s) requirement *= data_->cardinalities[v];
  if (static_cast<double>(data_->rows()) < requirement) {
    entry.reliable = false;
    entry.verdict = Verdict::Unreliable;
    entry.p_value = -1.0;
    entry.mi = std::numeric_limits<double>::quiet_NaN();
  } else {
    const IndependenceResult res = g2_test(*data_, x, y, s, config_.xi);
    entry.g2 = res.g2;
    entry.dof = res.dof;
    entry.p_value = res.p_value;
    entry.mi = res.mi_nats;
    entry.reliable = res.reliable;
    entry.verdict = res.p_value <= config_.alpha ? Verdict::Dependent : Verdict::Independent;
  }
  memo_.emplace(std::move(key), ledger_.size());
  ledger_.push_back(std::move(entry));
  return ledger_.back();
}

bool CiEngine::dependent(int x, int y, std::vector<int> s) {
  return query(x, y, std::move(s)).verdict == Verdict::Dependent;
}

bool CiEngine::independent(int x, int y, std::vector<int> s) {
  const Verdict v = query(x, y, std::move(s)).verdict;
  if (v == Verdict::Unreliable) return config_.policy == UnreliablePolicy::SkipAsIndependent;
  return v == Verdict::Independent;
}

double CiEngine::association(int x, int y, std::vector<int> s) {
  return query(x, y, std::move(s)).mi;
}

namespace {

std::vector<int> other_columns(const DiscreteDataset& data, int target) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(data.n_columns()); ++i)
    if (i != target) out.push_back(i);
  return out;
}

// visit subsets of base in size-ascending then lexicographic order; the
// callback may stop the walk by returning true
template <typename F>
bool for_each_subset(const std::vector<int>& base, int cap, F&& visit) {
  const int n = static_cast<int>(base.size());
  const int kmax = cap < 0 ? n : std::min(cap, n);
  std::vector<int> subset;
  if (visit(subset)) return true;
  std::vector<int> idx;
  for (int k = 1; k <= kmax; ++k) {
    idx.resize(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      subset.clear();
      for (int i : idx) subset.push_back(base[i]);
      if (visit(subset)) return true;
      int pos = k - 1;
      while (pos >= 0 && idx[pos] == n - k + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  return false;
}

// same walk restricted to one subset size
template <typename F>
bool for_each_subset_of_size(const std::vector<int>& base, int k, F&& visit) {
  const int n = static_cast<int>(base.size());
  if (k > n) return false;
  if (k == 0) {
    std::vector<int> empty;
    return visit(empty);
  }
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<int> subset;
  while (true) {
    subset.clear();
    for (int i : idx) subset.push_back(base[i]);
    if (visit(subset)) return true;
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) return false;
    ++idx[pos];
    for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
}

std::vector<int> without(const std::vector<int>& xs, int drop) {
  std::vector<int> out;
  out.reserve(xs.size());
  for (int x : xs)
    if (x != drop) out.push_back(x);
  return out;
}

struct PcRun {
  std::vector<int> pc;                     // candidate PC set (sorted), pre symmetry
  std::map<int, std::vector<int>> sepset;  // first separating subset per removed feature
};

// max-min heuristic: add the candidate whose worst (minimum) association
// over tested subsets of S is largest, discard on any separating subset
PcRun mmpc_run(CiEngine& eng, int target) {
  const int cap = eng.config().gamma_cap;
  const auto candidates = other_columns(eng.data(), target);

  struct State {
    bool discarded = false;
    bool in_s = false;
    bool testable = false;  // saw at least one reliable test
    double min_assoc = std::numeric_limits<double>::infinity();
  };
  std::map<int, State> state;
  for (int x : candidates) state[x];

  PcRun run;
  std::vector<int> s;  // kept sorted

  auto consider = [&](int x, const std::vector<int>& cond) {
    State& st = state[x];
    const LedgerEntry& e = eng.query(x, target, cond);
    if (e.verdict == Verdict::Independent ||
        (e.verdict == Verdict::Unreliable &&
         eng.config().policy == UnreliablePolicy::SkipAsIndependent)) {
      st.discarded = true;
      run.sepset[x] = cond;
    } else if (e.verdict == Verdict::Dependent) {
      st.testable = true;
      st.min_assoc = std::min(st.min_assoc, e.mi);
    }
  };

  for (int x : candidates) consider(x, {});

  while (true) {
    int best = -1;
    double best_assoc = -1.0;
    for (int x : candidates) {
      const State& st = state[x];
      if (st.discarded || st.in_s || !st.testable) continue;
      if (st.min_assoc > best_assoc) {
        best_assoc = st.min_assoc;
        best = x;
      }
    }
    if (best < 0) break;

    state[best].in_s = true;
    s.insert(std::lower_bound(s.begin(), s.end(), best), best);

    // every remaining candidate is now checked against the subsets of S
    // that contain the new member (older subsets are already covered)
    if (cap == 0) continue;
    for (int x : candidates) {
      State& st = state[x];
      if (st.discarded || st.in_s || !st.testable) continue;
      const std::vector<int> rest = without(s, best);
      for_each_subset(rest, cap < 0 ? cap : cap - 1, [&](const std::vector<int>& sub) {
        std::vector<int> cond = sub;
        cond.insert(std::lower_bound(cond.begin(), cond.end(), best), best);
        consider(x, cond);
        return st.discarded;
      });
    }
  }

  // backward sweep over the selected set
  for (int y : std::vector<int>(s)) {
    const std::vector<int> rest = without(s, y);
    bool removed = for_each_subset(rest, cap, [&](const std::vector<int>& sub) {
      if (eng.independent(target, y, sub)) {
        run.sepset[y] = sub;
        return true;
      }
      return false;
    });
    if (removed) s.erase(std::find(s.begin(), s.end(), y));
  }

  run.pc = s;
  return run;
}

// interleaving max heuristic: marginally ranked queue, prune after each
// admission
PcRun hiton_pc_run(CiEngine& eng, int target) {
  const int cap = eng.config().gamma_cap;
  const auto candidates = other_columns(eng.data(), target);

  PcRun run;
  struct Ranked {
    int feature;
    double relevance;
  };
  std::vector<Ranked> queue;
  for (int x : candidates) {
    const LedgerEntry& e = eng.query(x, target, {});
    if (e.verdict == Verdict::Dependent) {
      queue.push_back({x, e.mi});
    } else if (e.verdict == Verdict::Independent ||
               (e.verdict == Verdict::Unreliable &&
                eng.config().policy == UnreliablePolicy::SkipAsIndependent)) {
      run.sepset[x] = {};
    }
    // unreliable under skip-as-dependent: unusable, stays out of the queue
  }
  std::stable_sort(queue.begin(), queue.end(), [](const Ranked& a, const Ranked& b) {
    if (a.relevance != b.relevance) return a.relevance > b.relevance;
    return a.feature < b.feature;
  });

  std::vector<int> s;
  for (const Ranked& head : queue) {
    s.insert(std::lower_bound(s.begin(), s.end(), head.feature), head.feature);
    for (int y : std::vector<int>(s)) {
      const std::vector<int> rest = without(s, y);
      bool removed = for_each_subset(rest, cap, [&](const std::vector<int>& sub) {
        if (eng.independent(target, y, sub)) {
          run.sepset[y] = sub;
          return true;
        }
        return false;
      });
      if (removed) s.erase(std::find(s.begin(), s.end(), y));
    }
  }
  run.pc = s;
  return run;
}

// pure backward strategy: start from everything, remove level by level
PcRun ipc_backward_run(CiEngine& eng, int target) {
  const int cap = eng.config().gamma_cap;
  PcRun run;
  std::vector<int> s = other_columns(eng.data(), target);

  int level = 0;
  while (level < static_cast<int>(s.size()) && (cap < 0 || level <= cap)) {
    for (int y : std::vector<int>(s)) {
      const std::vector<int> rest = without(s, y);
      bool removed = for_each_subset_of_size(rest, level, [&](const std::vector<int>& sub) {
        if (eng.independent(target, y, sub)) {
          run.sepset[y] = sub;
          return true;
        }
        return false;
      });
      if (removed) s.erase(std::find(s.begin(), s.end(), y));
    }
    ++level;
  }
  run.pc = s;
  return run;
}

PcRun pc_run(CiEngine& eng, int target, PcRoutine routine) {
  switch (routine) {
    case PcRoutine::MMPC: return mmpc_run(eng, target);
    case PcRoutine::HITON_PC: return hiton_pc_run(eng, target);
    case PcRoutine::IPCMB_BACKWARD: return ipc_backward_run(eng, target);
  }
  throw std::logic_error("pc_run: unhandled routine");
}

// shares one engine across the whole algorithm run and caches PC sub-runs
// so symmetry correction and the spouse phase reuse each other's work
struct AlgoContext {
  CiEngine engine;
  PcRoutine routine;
  std::map<int, PcRun> runs;

  AlgoContext(const DiscreteDataset& data, const CausalConfig& config, PcRoutine r)
      : engine(data, config), routine(r) {}

  const PcRun& get(int target) {
    auto it = runs.find(target);
    if (it != runs.end()) return it->second;
    return runs.emplace(target, pc_run(engine, target, routine)).first->second;
  }
};

std::vector<int> symmetry_filter(AlgoContext& ctx, int target, const std::vector<int>& cands) {
  std::vector<int> kept;
  for (int x : cands) {
    const PcRun& back = ctx.get(x);
    if (std::find(back.pc.begin(), back.pc.end(), target) != back.pc.end()) kept.push_back(x);
  }
  return kept;
}

// common spouse phase: for each PC member X, candidates are the PC of X;
// a candidate is a spouse when some witness set separates it from the
// target but adding X restores dependence
std::vector<int> spouse_phase(AlgoContext& ctx, int target, const std::vector<int>& pc,
                              const PcRun& target_run) {
  const int cap = ctx.engine.config().gamma_cap;
  std::set<int> pc_set(pc.begin(), pc.end());
  std::set<int> spouses;

  for (int x : pc) {
    const PcRun& around_x = ctx.get(x);
    for (int y : around_x.pc) {
      if (y == target || pc_set.count(y) || spouses.count(y)) continue;

      std::vector<int> witness;
      bool have_witness = false;
      auto it = target_run.sepset.find(y);
      if (it != target_run.sepset.end() &&
          std::find(it->second.begin(), it->second.end(), x) == it->second.end()) {
        witness = it->second;
        have_witness = ctx.engine.independent(target, y, witness);
      }
      if (!have_witness) {
        std::vector<int> base;
        for (int p : pc)
          if (p != x && p != y) base.push_back(p);
        have_witness = for_each_subset(base, cap, [&](const std::vector<int>& sub) {
          if (ctx.engine.independent(target, y, sub)) {
            witness = sub;
            return true;
          }
          return false;
        });
      }
      if (!have_witness) continue;

      std::vector<int> with_x = witness;
      with_x.insert(std::lower_bound(with_x.begin(), with_x.end(), x), x);
      if (ctx.engine.dependent(target, y, with_x)) spouses.insert(y);
    }
  }
  return {spouses.begin(), spouses.end()};
}

MBResult finish(AlgoContext& ctx, std::vector<int> pc, std::vector<int> spouses) {
  MBResult res;
  res.pc = std::move(pc);
  res.spouses = std::move(spouses);
  std::set<int> all(res.pc.begin(), res.pc.end());
  all.insert(res.spouses.begin(), res.spouses.end());
  res.mb.assign(all.begin(), all.end());
  res.tests_run = ctx.engine.tests_run();
  res.ledger = ctx.engine.ledger();
  return res;
}

MBResult divide_and_conquer_mb(const DiscreteDataset& data, int target,
                               const CausalConfig& config, PcRoutine routine) {
  AlgoContext ctx(data, config, routine);
  const PcRun& run = ctx.get(target);
  std::vector<int> pc = symmetry_filter(ctx, target, run.pc);
  std::vector<int> spouses = spouse_phase(ctx, target, pc, run);
  return finish(ctx, std::move(pc), std::move(spouses));
}

MBResult iamb_impl(const DiscreteDataset& data, int target, const CausalConfig& config,
                   bool interleaved) {
  AlgoContext ctx(data, config, PcRoutine::MMPC);
  CiEngine& eng = ctx.engine;
  const auto candidates = other_columns(data, target);
  std::vector<int> s;  // sorted

  auto backward_fixpoint = [&]() {
    while (true) {
      int worst = -1;
      double worst_mi = std::numeric_limits<double>::infinity();
      for (int y : s) {
        const LedgerEntry& e = eng.query(y, target, without(s, y));
        const bool indep =
            e.verdict == Verdict::Independent ||
            (e.verdict == Verdict::Unreliable &&
             config.policy == UnreliablePolicy::SkipAsIndependent);
        if (!indep) continue;
        const double mi = e.verdict == Verdict::Unreliable ? -1.0 : e.mi;
        if (mi < worst_mi) {
          worst_mi = mi;
          worst = y;
        }
      }
      if (worst < 0) break;
      s.erase(std::find(s.begin(), s.end(), worst));
    }
  };

  while (true) {
    int best = -1;
    double best_mi = -std::numeric_limits<double>::infinity();
    for (int x : candidates) {
      if (std::binary_search(s.begin(), s.end(), x)) continue;
      const LedgerEntry& e = eng.query(x, target, s);
      if (e.verdict == Verdict::Dependent && e.mi > best_mi) {
        best_mi = e.mi;
        best = x;
      }
    }
    if (best < 0) break;
    s.insert(std::lower_bound(s.begin(), s.end(), best), best);
    if (interleaved) backward_fixpoint();
  }
  if (!interleaved) backward_fixpoint();

  MBResult res = finish(ctx, {}, {});
  res.mb = s;
  return res;
}

}  // namespace

MBResult iamb_at(const DiscreteDataset& data, int target, const CausalConfig& config) {
  return iamb_impl(data, target, config, false);
}

MBResult inter_iamb_at(const DiscreteDataset& data, int target, const CausalConfig& config) {
  return iamb_impl(data, target, config, true);
}

MBResult iamb(const DiscreteDataset& data, const CausalConfig& config) {
  return iamb_at(data, data.class_index, config);
}

MBResult inter_iamb(const DiscreteDataset& data, const CausalConfig& config) {
  return inter_iamb_at(data, data.class_index, config);
}

std::vector<int> mmpc(const DiscreteDataset& data, int target, const CausalConfig& config) {
  AlgoContext ctx(data, config, PcRoutine::MMPC);
  return ctx.get(target).pc;
}

std::vector<int> hiton_pc(const DiscreteDataset& data, int target, const CausalConfig& config) {
  AlgoContext ctx(data, config, PcRoutine::HITON_PC);
  return ctx.get(target).pc;
}

MBResult mmmb(const DiscreteDataset& data, int target, const CausalConfig& config) {
  return divide_and_conquer_mb(data, target, config, PcRoutine::MMPC);
}

MBResult hiton_mb(const DiscreteDataset& data, int target, const CausalConfig& config) {
  return divide_and_conquer_mb(data, target, config, PcRoutine::HITON_PC);
}

MBResult ipc_mb(const DiscreteDataset& data, int target, const CausalConfig& config) {
  return divide_and_conquer_mb(data, target, config, PcRoutine::IPCMB_BACKWARD);
}

MBResult stmb(const DiscreteDataset& data, int target, const CausalConfig& config) {
  AlgoContext ctx(data, config, PcRoutine::IPCMB_BACKWARD);
  CiEngine& eng = ctx.engine;
  const int cap = config.gamma_cap;

  const PcRun& run = ctx.get(target);
  std::vector<int> s = run.pc;
  std::vector<int> spouses;

  // spouse sweep over everything the backward pass removed, reusing each
  // feature's recorded separator as the witness
  const std::vector<int> outside = [&] {
    std::vector<int> out;
    for (int v : other_columns(data, target))
      if (!std::binary_search(s.begin(), s.end(), v)) out.push_back(v);
    return out;
  }();

  for (int x : outside) {
    auto wit = run.sepset.find(x);
    if (wit == run.sepset.end()) continue;
    if (!eng.independent(target, x, wit->second)) continue;

    bool admitted = false;
    for (int y : s) {
      if (std::find(wit->second.begin(), wit->second.end(), y) != wit->second.end()) continue;
      std::vector<int> with_y = wit->second;
      with_y.insert(std::lower_bound(with_y.begin(), with_y.end(), y), y);
      if (eng.dependent(target, x, with_y)) {
        admitted = true;
        break;
      }
    }
    if (!admitted) continue;
    spouses.insert(std::lower_bound(spouses.begin(), spouses.end(), x), x);

    // the admitted spouse may expose a false PC member; if so the pair
    // (member, spouse) leaves together
    bool pair_fired = false;
    for (int y : std::vector<int>(s)) {
      std::vector<int> base = without(s, y);
      base.insert(std::lower_bound(base.begin(), base.end(), x), x);
      pair_fired = for_each_subset(base, cap, [&](const std::vector<int>& sub) {
        return eng.independent(target, y, sub);
      });
      if (pair_fired) {
        s.erase(std::find(s.begin(), s.end(), y));
        spouses.erase(std::find(spouses.begin(), spouses.end(), x));
        break;
      }
    }
  }

  // final pruning against the assembled blanket
  for (int x : std::vector<int>(spouses)) {
    std::vector<int> cond;
    for (int v : s) cond.push_back(v);
    for (int v : spouses)
      if (v != x) cond.push_back(v);
    std::sort(cond.begin(), cond.end());
    if (eng.independent(target, x, cond))
      spouses.erase(std::find(spouses.begin(), spouses.end(), x));
  }
  for (int y : std::vector<int>(s)) {
    std::vector<int> cond;
    for (int v : s)
      if (v != y) cond.push_back(v);
    for (int v : spouses) cond.push_back(v);
    std::sort(cond.begin(), cond.end());
    if (eng.independent(target, y, cond)) s.erase(std::find(s.begin(), s.end(), y));
  }

  return finish(ctx, std::move(s), std::move(spouses));
}

std::vector<int> symmetry_correction(const DiscreteDataset& data, int target,
                                     const std::vector<int>& pc_candidates,
                                     const CausalConfig& config, PcRoutine routine) {
  AlgoContext ctx(data, config, routine);
  return symmetry_filter(ctx, target, pc_candidates);
}

}  // namespace unifsel
