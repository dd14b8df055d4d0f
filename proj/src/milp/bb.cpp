#include "ott/milp/bb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <queue>
#include <string>

#include "ott/error.hpp"

namespace ott::milp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require_linear(const MilpModel& model) {
  if (!model.sealed()) throw InvalidInput("model must be sealed before solving");
  if (!model.quadratic_objective().empty())
    throw InvalidInput("quadratic objective terms need an external solver (export the model as MPS)");
}

// Binaries the root presolve left free, in increasing variable order.
std::vector<std::size_t> free_binaries(const MilpModel& model, const LpEngine& engine) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < model.num_variables(); ++j)
    if (model.variable(j).kind == VarKind::binary && engine.root_lower(j) < engine.root_upper(j))
      out.push_back(j);
  return out;
}

struct Node {
  double bound;
  std::size_t id;
  std::size_t depth;
  std::vector<std::int8_t> fix;  // per free binary: -1 free, else fixed value
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id < b.id;  // newest first on ties
  }
};

}  // namespace

SolveOutcome solve_bb(const MilpModel& model, const std::optional<std::vector<double>>& warm_start,
                      const BbOptions& opt) {
  require_linear(model);
  const auto t0 = Clock::now();
  LpEngine engine(model, opt.lp);
  const std::vector<std::size_t> bins = free_binaries(model, engine);

  SolveOutcome out;
  double incumbent = kInf;
  std::vector<double> best;
  if (warm_start) {
    if (warm_start->size() != model.num_variables())
      throw InvalidInput("warm start has " + std::to_string(warm_start->size()) + " values, model has " +
                         std::to_string(model.num_variables()));
    const double viol = model.max_violation(*warm_start);
    if (viol > opt.feasibility_tol)
      throw InvalidInput("warm start is infeasible (max violation " + std::to_string(viol) + ")");
    best = *warm_start;
    for (std::size_t j = 0; j < best.size(); ++j)
      if (model.variable(j).kind == VarKind::binary) best[j] = std::round(best[j]);
    incumbent = model.objective_value(best);
  }
  auto cutoff = [&]() {
    return std::isfinite(incumbent) ? incumbent - opt.gap * std::max(1.0, std::abs(incumbent)) : kInf;
  };

  auto apply = [&](const std::vector<std::int8_t>& fix) {
    for (std::size_t k = 0; k < bins.size(); ++k) {
      const std::size_t v = bins[k];
      if (fix[k] < 0)
        engine.set_bounds(v, engine.root_lower(v), engine.root_upper(v));
      else
        engine.set_bounds(v, fix[k], fix[k]);
    }
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  std::size_t next_id = 0;
  open.push(Node{-kInf, next_id++, 0, std::vector<std::int8_t>(bins.size(), -1)});
  bool stopped = false;
  SolveStatus stop_status = SolveStatus::node_limit;
  double stopped_bound = kInf;

  while (!open.empty()) {
    if (open.top().bound >= cutoff()) {
      open.pop();
      continue;
    }
    if (out.nodes >= opt.node_limit || seconds_since(t0) > opt.time_limit_seconds) {
      stopped = true;
      stop_status = out.nodes >= opt.node_limit ? SolveStatus::node_limit : SolveStatus::gap_limit;
      break;
    }
    Node node = open.top();
    open.pop();
    ++out.nodes;

    apply(node.fix);
    const LpStatus st = engine.solve();
    NodeInfo info{node.id, node.depth, node.bound, kInf, incumbent};
    if (st == LpStatus::unbounded) {
      // An unbounded relaxation says nothing about integer feasibility until
      // every binary is fixed; keep branching on the lowest free one.
      const auto free_it = std::find(node.fix.begin(), node.fix.end(), std::int8_t{-1});
      if (free_it == node.fix.end()) {
        out.status = SolveStatus::unbounded;
        out.objective = -kInf;
        out.lp_iterations = engine.iterations();
        out.wall_seconds = seconds_since(t0);
        return out;
      }
      const auto k = static_cast<std::size_t>(free_it - node.fix.begin());
      for (std::int8_t v : {std::int8_t{1}, std::int8_t{0}}) {
        Node child{-kInf, next_id++, node.depth + 1, node.fix};
        child.fix[k] = v;
        open.push(std::move(child));
      }
      continue;
    }
    if (st == LpStatus::infeasible) {
      if (opt.observer) opt.observer(info);
      continue;
    }
    const double obj = engine.objective();
    info.lp_objective = obj;
    if (opt.observer) opt.observer(info);
    if (obj >= cutoff()) continue;

    const std::vector<double> x = engine.solution();
    std::size_t branch = bins.size();
    double worst = opt.integrality_tol;
    double tiny_worst = 0.0;
    std::size_t tiny = bins.size();
    for (std::size_t k = 0; k < bins.size(); ++k) {
      if (node.fix[k] >= 0) continue;
      const double f = std::abs(x[bins[k]] - std::round(x[bins[k]]));
      if (f > worst) {
        worst = f;
        branch = k;
      }
      if (f > tiny_worst) {
        tiny_worst = f;
        tiny = k;
      }
    }

    if (branch == bins.size()) {
      // Integral within tolerance: re-solve with the binaries pinned so the
      // continuous part is exact rather than exploiting the tolerance.
      std::vector<std::int8_t> pinned = node.fix;
      for (std::size_t k = 0; k < bins.size(); ++k)
        if (pinned[k] < 0) pinned[k] = static_cast<std::int8_t>(std::lround(x[bins[k]]));
      apply(pinned);
      if (engine.solve() == LpStatus::optimal) {
        std::vector<double> cand = engine.solution();
        for (std::size_t k = 0; k < bins.size(); ++k) cand[bins[k]] = pinned[k];
        const double val = model.objective_value(cand);
        if (val < incumbent) {
          incumbent = val;
          best = std::move(cand);
        }
        continue;
      }
      if (tiny == bins.size()) continue;
      branch = tiny;
    }

    const double xv = x[bins[branch]];
    const std::int8_t near = xv >= 0.5 ? 1 : 0;
    for (std::int8_t v : {static_cast<std::int8_t>(1 - near), near}) {
      Node child{obj, next_id++, node.depth + 1, node.fix};
      child.fix[branch] = v;
      open.push(std::move(child));
    }
  }

  if (stopped) {
    stopped_bound = incumbent;
    auto rest = open;
    while (!rest.empty()) {
      stopped_bound = std::min(stopped_bound, rest.top().bound);
      rest.pop();
    }
  }

  out.lp_iterations = engine.iterations();
  out.wall_seconds = seconds_since(t0);
  if (!best.empty()) {
    out.assignment = std::move(best);
    out.objective = incumbent;
  }
  if (stopped) {
    out.status = stop_status;
    out.bound = stopped_bound;
  } else if (std::isfinite(incumbent)) {
    out.status = SolveStatus::optimal;
    out.bound = incumbent;
  } else {
    out.status = SolveStatus::infeasible;
    out.bound = kInf;
  }
  return out;
}

namespace {

struct BinaryRow {
  std::vector<std::pair<std::size_t, double>> terms;  // free-binary position, coef
  Sense sense;
  double rhs;  // after folding fixed binaries
};

struct LeafBest {
  bool found = false;
  bool unbounded = false;
  double objective = kInf;
  std::uint64_t key = 0;
  std::vector<double> x;
  std::size_t leaves = 0;
  std::size_t iterations = 0;
};

bool better(double obj, std::uint64_t key, const LeafBest& cur) {
  if (!cur.found) return true;
  const double tie = 1e-9 * std::max(1.0, std::abs(cur.objective));
  if (obj < cur.objective - tie) return true;
  return std::abs(obj - cur.objective) <= tie && key < cur.key;
}

class Enumerator {
 public:
  Enumerator(const MilpModel& model, const LpEngine& root, std::vector<std::size_t> bins)
      : model_(model), engine_(root), bins_(std::move(bins)) {
    std::vector<std::size_t> pos(model.num_variables(), static_cast<std::size_t>(-1));
    for (std::size_t k = 0; k < bins_.size(); ++k) pos[bins_[k]] = k;
    member_.assign(bins_.size(), {});
    for (const Row& row : model.rows()) {
      BinaryRow br{{}, row.sense, row.rhs};
      bool pure = true;
      for (const Term& t : row.terms) {
        if (model.variable(t.var).kind != VarKind::binary) {
          pure = false;
          break;
        }
        if (pos[t.var] == static_cast<std::size_t>(-1))
          br.rhs -= t.coef * root.root_lower(t.var);
        else
          br.terms.emplace_back(pos[t.var], t.coef);
      }
      if (!pure || br.terms.empty()) continue;
      const std::size_t idx = rows_.size();
      for (auto [p, a] : br.terms) member_[p].emplace_back(idx, a);
      rows_.push_back(std::move(br));
    }
    fixed_.assign(rows_.size(), 0.0);
    lo_rest_.assign(rows_.size(), 0.0);
    hi_rest_.assign(rows_.size(), 0.0);
    for (std::size_t i = 0; i < rows_.size(); ++i)
      for (auto [p, a] : rows_[i].terms) {
        lo_rest_[i] += std::min(0.0, a);
        hi_rest_[i] += std::max(0.0, a);
      }
    value_.assign(bins_.size(), 0);
  }

  // Assigns position p; returns false when some pure-binary row is violated.
  bool assign(std::size_t p, std::int8_t v) {
    value_[p] = v;
    bool ok = true;
    for (auto [i, a] : member_[p]) {
      lo_rest_[i] -= std::min(0.0, a);
      hi_rest_[i] -= std::max(0.0, a);
      fixed_[i] += a * v;
      ok = ok && row_possible(i);
    }
    return ok;
  }

  void unassign(std::size_t p) {
    const std::int8_t v = value_[p];
    for (auto [i, a] : member_[p]) {
      lo_rest_[i] += std::min(0.0, a);
      hi_rest_[i] += std::max(0.0, a);
      fixed_[i] -= a * v;
    }
  }

  void dfs(std::size_t p, std::uint64_t key, LeafBest& best) {
    if (p == bins_.size()) {
      leaf(key, best);
      return;
    }
    for (std::int8_t v : {std::int8_t{0}, std::int8_t{1}}) {
      const std::uint64_t k = (key << 1) | static_cast<std::uint64_t>(v);
      if (assign(p, v)) dfs(p + 1, k, best);
      unassign(p);
    }
  }

  LpEngine& engine() { return engine_; }

 private:
  bool row_possible(std::size_t i) const {
    const double tol = 1e-9;
    const BinaryRow& r = rows_[i];
    const double lo = fixed_[i] + lo_rest_[i];
    const double hi = fixed_[i] + hi_rest_[i];
    switch (r.sense) {
      case Sense::le: return lo <= r.rhs + tol;
      case Sense::ge: return hi >= r.rhs - tol;
      case Sense::eq: return lo <= r.rhs + tol && hi >= r.rhs - tol;
    }
    return true;
  }

  void leaf(std::uint64_t key, LeafBest& best) {
    for (std::size_t k = 0; k < bins_.size(); ++k) engine_.set_bounds(bins_[k], value_[k], value_[k]);
    ++best.leaves;
    const std::size_t before = engine_.iterations();
    const LpStatus st = engine_.solve();
    best.iterations += engine_.iterations() - before;
    if (st == LpStatus::unbounded) {
      best.unbounded = true;
      return;
    }
    if (st != LpStatus::optimal) return;
    std::vector<double> x = engine_.solution();
    for (std::size_t k = 0; k < bins_.size(); ++k) x[bins_[k]] = value_[k];
    const double obj = model_.objective_value(x);
    if (better(obj, key, best)) {
      best.found = true;
      best.objective = obj;
      best.key = key;
      best.x = std::move(x);
    }
  }

  const MilpModel& model_;
  LpEngine engine_;
  std::vector<std::size_t> bins_;
  std::vector<BinaryRow> rows_;
  std::vector<std::vector<std::pair<std::size_t, double>>> member_;
  std::vector<double> fixed_, lo_rest_, hi_rest_;
  std::vector<std::int8_t> value_;
};

void merge(LeafBest& into, LeafBest&& part) {
  into.leaves += part.leaves;
  into.iterations += part.iterations;
  into.unbounded = into.unbounded || part.unbounded;
  if (part.found && better(part.objective, part.key, into)) {
    into.found = true;
    into.objective = part.objective;
    into.key = part.key;
    into.x = std::move(part.x);
  }
}

SolveOutcome finish(LeafBest&& best, Clock::time_point t0) {
  SolveOutcome out;
  out.nodes = best.leaves;
  out.lp_iterations = best.iterations;
  out.wall_seconds = seconds_since(t0);
  if (best.unbounded) {
    out.status = SolveStatus::unbounded;
    out.objective = -kInf;
  } else if (best.found) {
    out.status = SolveStatus::optimal;
    out.objective = best.objective;
    out.bound = best.objective;
    out.assignment = std::move(best.x);
  } else {
    out.status = SolveStatus::infeasible;
    out.bound = kInf;
  }
  return out;
}

std::vector<std::size_t> checked_binaries(const MilpModel& model, const LpEngine& root,
                                          std::size_t max_binaries) {
  std::vector<std::size_t> bins = free_binaries(model, root);
  if (bins.size() > max_binaries)
    throw EnumerationTooLarge("enumeration too large: " + std::to_string(bins.size()) +
                              " free binaries exceed the brute-force cap of " +
                              std::to_string(max_binaries));
  return bins;
}

}  // namespace

SolveOutcome brute_force_binary_serial(const MilpModel& model, std::size_t max_binaries, LpOptions lp) {
  require_linear(model);
  const auto t0 = Clock::now();
  lp.parallel_pivot = false;
  LpEngine root(model, lp);
  Enumerator en(model, root, checked_binaries(model, root, max_binaries));
  LeafBest best;
  en.dfs(0, 0, best);
  return finish(std::move(best), t0);
}

SolveOutcome brute_force_binary(const MilpModel& model, std::size_t max_binaries, LpOptions lp) {
  require_linear(model);
  const auto t0 = Clock::now();
  lp.parallel_pivot = false;  // parallelism lives at the task level here
  LpEngine root(model, lp);
  const std::vector<std::size_t> bins = checked_binaries(model, root, max_binaries);
  const std::size_t split = std::min<std::size_t>(bins.size(), 8);
  const std::int64_t tasks = std::int64_t{1} << split;
  std::vector<LeafBest> parts(static_cast<std::size_t>(tasks));

#pragma omp parallel
  {
    Enumerator en(model, root, bins);
#pragma omp for schedule(dynamic)
    for (std::int64_t task = 0; task < tasks; ++task) {
      LeafBest& part = parts[static_cast<std::size_t>(task)];
      std::size_t assigned = 0;
      bool ok = true;
      for (; assigned < split && ok; ++assigned) {
        const auto v = static_cast<std::int8_t>((task >> (split - 1 - assigned)) & 1);
        ok = en.assign(assigned, v);
      }
      if (ok) en.dfs(split, static_cast<std::uint64_t>(task), part);
      while (assigned > 0) en.unassign(--assigned);
    }
  }

  LeafBest best;
  for (auto& part : parts) merge(best, std::move(part));
  return finish(std::move(best), t0);
}

}  // namespace ott::milp
