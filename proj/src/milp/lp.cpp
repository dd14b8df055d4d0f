#include "ott/milp/lp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "ott/error.hpp"
#include "ott/milp/kernels.hpp"

namespace ott::milp {

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);
constexpr double kFixTol = 1e-12;
constexpr double kStepZero = 1e-12;

}  // namespace

LpEngine::LpEngine(const MilpModel& model, LpOptions options) : model_(&model), opt_(options) {
  presolve(model);
  build_tableau();
}

void LpEngine::presolve(const MilpModel& model) {
  nv_ = model.num_variables();
  root_lo_.resize(nv_);
  root_up_.resize(nv_);
  for (std::size_t j = 0; j < nv_; ++j) {
    const Variable& v = model.variable(j);
    root_lo_[j] = v.lower;
    root_up_[j] = v.upper;
    if (v.kind == VarKind::binary) {
      root_lo_[j] = std::ceil(root_lo_[j] - 1e-9);
      root_up_[j] = std::floor(root_up_[j] + 1e-9);
    }
    if (root_lo_[j] > root_up_[j]) root_infeasible_ = true;
  }
  auto is_fixed = [&](std::size_t j) { return root_up_[j] - root_lo_[j] <= kFixTol; };

  const std::size_t nr = model.num_rows();
  std::vector<bool> alive(nr, true);
  bool changed = true;
  while (changed && !root_infeasible_) {
    changed = false;
    for (std::size_t i = 0; i < nr; ++i) {
      if (!alive[i]) continue;
      const Row& row = model.row(i);
      double fixed = 0.0;
      std::size_t free_count = 0;
      const Term* single = nullptr;
      for (const Term& t : row.terms) {
        if (is_fixed(t.var)) {
          fixed += t.coef * root_lo_[t.var];
        } else {
          ++free_count;
          single = &t;
        }
      }
      const double rhs = row.rhs - fixed;
      if (free_count == 0) {
        const double tol = 1e-9 * (1.0 + std::abs(row.rhs));
        const bool ok = row.sense == Sense::le   ? 0.0 <= rhs + tol
                        : row.sense == Sense::ge ? 0.0 >= rhs - tol
                                                 : std::abs(rhs) <= tol;
        if (!ok) root_infeasible_ = true;
        alive[i] = false;
        continue;
      }
      if (free_count != 1) continue;
      const std::size_t j = single->var;
      const double bound = rhs / single->coef;
      const bool positive = single->coef > 0.0;
      double lo = root_lo_[j];
      double up = root_up_[j];
      if (row.sense == Sense::eq) {
        lo = std::max(lo, bound);
        up = std::min(up, bound);
      } else if ((row.sense == Sense::le) == positive) {
        up = std::min(up, bound);
      } else {
        lo = std::max(lo, bound);
      }
      if (model.variable(j).kind == VarKind::binary) {
        lo = std::ceil(lo - 1e-9);
        up = std::floor(up + 1e-9);
      }
      if (lo > up + 1e-9) {
        root_infeasible_ = true;
      } else if (lo > up) {
        up = lo;
      }
      root_lo_[j] = lo;
      root_up_[j] = up;
      alive[i] = false;
      changed = true;
    }
  }
  cur_lo_ = root_lo_;
  cur_up_ = root_up_;

  col_of_.assign(nv_, npos);
  var_of_.clear();
  fixed_cost_ = 0.0;
  for (std::size_t j = 0; j < nv_; ++j) {
    if (is_fixed(j)) {
      root_up_[j] = root_lo_[j];
      cur_up_[j] = cur_lo_[j];
      fixed_cost_ += model.variable(j).objective * root_lo_[j];
    } else {
      col_of_[j] = var_of_.size();
      var_of_.push_back(j);
    }
  }
  n_ = var_of_.size();

  acol_.assign(n_, {});
  b_.clear();
  std::vector<Sense> senses;
  for (std::size_t i = 0; i < nr; ++i) {
    if (!alive[i]) continue;
    const Row& row = model.row(i);
    double fixed = 0.0;
    std::size_t free_count = 0;
    for (const Term& t : row.terms) {
      if (col_of_[t.var] == npos)
        fixed += t.coef * root_lo_[t.var];
      else
        ++free_count;
    }
    if (free_count < 2) continue;
    const std::size_t r = b_.size();
    for (const Term& t : row.terms)
      if (col_of_[t.var] != npos) acol_[col_of_[t.var]].emplace_back(r, t.coef);
    b_.push_back(row.rhs - fixed);
    senses.push_back(row.sense);
  }
  m_ = b_.size();

  const std::size_t total = n_ + m_;
  cost_.assign(total, 0.0);
  lo_.assign(total, 0.0);
  up_.assign(total, 0.0);
  double cmax = 0.0;
  for (std::size_t c = 0; c < n_; ++c) {
    cost_[c] = model.variable(var_of_[c]).objective;
    cmax = std::max(cmax, std::abs(cost_[c]));
    lo_[c] = root_lo_[var_of_[c]];
    up_[c] = root_up_[var_of_[c]];
  }
  for (std::size_t r = 0; r < m_; ++r) {
    // a x + s = b
    switch (senses[r]) {
      case Sense::le: lo_[n_ + r] = 0.0; up_[n_ + r] = kInf; break;
      case Sense::ge: lo_[n_ + r] = -kInf; up_[n_ + r] = 0.0; break;
      case Sense::eq: lo_[n_ + r] = 0.0; up_[n_ + r] = 0.0; break;
    }
  }
  dual_tol_ = std::max(opt_.dual_floor, opt_.dual_rel * cmax);
}

void LpEngine::build_tableau() {
  reset_to_slack_basis();
}

void LpEngine::reset_to_slack_basis() {
  const std::size_t total = n_ + m_;
  t_ = Matrix(m_, total);
  for (std::size_t c = 0; c < n_; ++c)
    for (auto [r, a] : acol_[c]) t_(r, c) = a;
  for (std::size_t r = 0; r < m_; ++r) t_(r, n_ + r) = 1.0;
  head_.resize(m_);
  for (std::size_t r = 0; r < m_; ++r) head_[r] = n_ + r;
  state_.assign(total, State::lower);
  x_.assign(total, 0.0);
  d_.assign(total, 0.0);
  for (std::size_t r = 0; r < m_; ++r) state_[n_ + r] = State::basic;
  for (std::size_t c = 0; c < n_; ++c) {
    if (std::isfinite(lo_[c])) {
      state_[c] = State::lower;
      x_[c] = lo_[c];
    } else if (std::isfinite(up_[c])) {
      state_[c] = State::upper;
      x_[c] = up_[c];
    } else {
      state_[c] = State::zero;
      x_[c] = 0.0;
    }
  }
  since_refactor_ = 0;
  refresh_dual();
  refresh_primal();
}

bool LpEngine::refactor() {
  if (m_ == 0) {
    since_refactor_ = 0;
    return true;
  }
  // Rebuild from [A | I] by pivoting the structural basic columns back in.
  // Most basic columns are slacks, so this stays far cheaper than a dense
  // inverse; partial pivoting over the rows still held by outgoing slacks.
  const std::vector<std::size_t> target = head_;
  const std::vector<State> saved_state = state_;
  const std::size_t total = n_ + m_;
  std::vector<bool> keep(total, false);
  std::vector<std::size_t> structural;
  for (std::size_t h : target) {
    keep[h] = true;
    if (h < n_) structural.push_back(h);
  }
  std::sort(structural.begin(), structural.end(),
            [&](std::size_t a, std::size_t b) { return acol_[a].size() < acol_[b].size(); });

  t_ = Matrix(m_, total);
  for (std::size_t c = 0; c < n_; ++c)
    for (auto [r, a] : acol_[c]) t_(r, c) = a;
  for (std::size_t r = 0; r < m_; ++r) {
    t_(r, n_ + r) = 1.0;
    head_[r] = n_ + r;
  }
  for (std::size_t h : structural) {
    std::size_t r = npos;
    double best = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (keep[head_[i]]) continue;
      const double a = std::abs(t_(i, h));
      if (a > best) {
        best = a;
        r = i;
      }
    }
    if (r == npos || best < 1e-9) {
      state_ = saved_state;
      return false;
    }
    kernels::pivot_serial(t_, r, h, nz_);
    head_[r] = h;
  }
  state_ = saved_state;
  since_refactor_ = 0;
  refresh_dual();
  refresh_primal();
  return true;
}

void LpEngine::refresh_primal() {
  std::vector<double> r(b_);
  for (std::size_t c = 0; c < n_; ++c) {
    if (state_[c] == State::basic || x_[c] == 0.0) continue;
    for (auto [row, a] : acol_[c]) r[row] -= a * x_[c];
  }
  for (std::size_t k = 0; k < m_; ++k)
    if (state_[n_ + k] != State::basic) r[k] -= x_[n_ + k];
  for (std::size_t i = 0; i < m_; ++i) {
    const double* ti = t_.row(i).data() + n_;
    double s = 0.0;
    for (std::size_t k = 0; k < m_; ++k) s += ti[k] * r[k];
    x_[head_[i]] = s;
  }
}

void LpEngine::refresh_dual() {
  std::vector<double> y(m_, 0.0);
  for (std::size_t i = 0; i < m_; ++i) {
    const double cb = cost_[head_[i]];
    if (cb == 0.0) continue;
    const double* ti = t_.row(i).data() + n_;
    for (std::size_t k = 0; k < m_; ++k) y[k] += cb * ti[k];
  }
  for (std::size_t c = 0; c < n_; ++c) {
    double s = cost_[c];
    for (auto [r, a] : acol_[c]) s -= y[r] * a;
    d_[c] = s;
  }
  for (std::size_t k = 0; k < m_; ++k) d_[n_ + k] = cost_[n_ + k] - y[k];
  for (std::size_t i = 0; i < m_; ++i) d_[head_[i]] = 0.0;
}

void LpEngine::place_nonbasic() {
  const double tol = dual_tol();
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (state_[j] == State::basic) continue;
    const bool has_lo = std::isfinite(lo_[j]);
    const bool has_up = std::isfinite(up_[j]);
    if (has_lo && has_up) {
      if (up_[j] - lo_[j] <= kFixTol) {
        state_[j] = State::lower;
      } else if (state_[j] == State::upper) {
        if (d_[j] > tol) state_[j] = State::lower;
      } else if (state_[j] == State::lower) {
        if (d_[j] < -tol) state_[j] = State::upper;
      } else {
        state_[j] = d_[j] < 0.0 ? State::upper : State::lower;
      }
    } else if (has_lo) {
      state_[j] = State::lower;
    } else if (has_up) {
      state_[j] = State::upper;
    } else {
      state_[j] = State::zero;
    }
    x_[j] = state_[j] == State::lower ? lo_[j] : state_[j] == State::upper ? up_[j] : 0.0;
  }
}

bool LpEngine::primal_feasible() const {
  const double tol = opt_.primal_tol;
  for (std::size_t i = 0; i < m_; ++i) {
    const std::size_t h = head_[i];
    if (x_[h] < lo_[h] - tol || x_[h] > up_[h] + tol) return false;
  }
  return true;
}

bool LpEngine::dual_feasible() const {
  const double tol = dual_tol();
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (state_[j] == State::basic || up_[j] - lo_[j] <= kFixTol) continue;
    if (state_[j] == State::lower && d_[j] < -tol) return false;
    if (state_[j] == State::upper && d_[j] > tol) return false;
    if (state_[j] == State::zero && std::abs(d_[j]) > tol) return false;
  }
  return true;
}

void LpEngine::pivot(std::size_t r, std::size_t q) {
  if (opt_.parallel_pivot)
    kernels::pivot_parallel(t_, r, q, nz_);
  else
    kernels::pivot_serial(t_, r, q, nz_);
  head_[r] = q;
  state_[q] = State::basic;
}

void LpEngine::count_iteration(bool degenerate) {
  ++iterations_;
  ++since_refactor_;
  if (degenerate) {
    if (++degenerate_run_ > 10 * (m_ + n_)) bland_ = true;
  } else {
    degenerate_run_ = 0;
    bland_ = false;
  }
}

LpStatus LpEngine::primal(Phase phase) {
  const double ptol = opt_.primal_tol;
  const double piv = opt_.pivot_tol;
  const std::size_t total = n_ + m_;
  const std::size_t cap = iterations_ + 50 * (total + m_) + 20000;
  std::vector<double> d1;
  std::vector<double> w(m_);
  std::vector<double> col(m_);

  while (true) {
    if (iterations_ > cap) throw NumericalError("simplex iteration limit reached");
    if (since_refactor_ >= opt_.refactor_interval && !refactor()) reset_to_slack_basis();

    const std::vector<double>* dptr = &d_;
    double dtol = dual_tol();
    if (phase == Phase::one) {
      bool any = false;
      for (std::size_t i = 0; i < m_; ++i) {
        const std::size_t h = head_[i];
        w[i] = x_[h] < lo_[h] - ptol ? -1.0 : x_[h] > up_[h] + ptol ? 1.0 : 0.0;
        any = any || w[i] != 0.0;
      }
      if (!any) return LpStatus::optimal;
      d1.assign(total, 0.0);
      for (std::size_t i = 0; i < m_; ++i) {
        if (w[i] == 0.0) continue;
        const double* ti = t_.row(i).data();
        for (std::size_t j = 0; j < total; ++j) d1[j] -= w[i] * ti[j];
      }
      for (std::size_t i = 0; i < m_; ++i) d1[head_[i]] = 0.0;
      dptr = &d1;
      dtol = 1e-9;
    }
    const std::vector<double>& d = *dptr;

    // Pricing.
    std::size_t q = npos;
    double best = 0.0;
    for (std::size_t j = 0; j < total; ++j) {
      const State s = state_[j];
      if (s == State::basic || up_[j] - lo_[j] <= kFixTol) continue;
      const double dj = d[j];
      const bool ok = (s == State::lower && dj < -dtol) || (s == State::upper && dj > dtol) ||
                      (s == State::zero && std::abs(dj) > dtol);
      if (!ok) continue;
      if (bland_) {
        q = j;
        break;
      }
      if (std::abs(dj) > best) {
        best = std::abs(dj);
        q = j;
      }
    }
    if (q == npos) return phase == Phase::one ? LpStatus::infeasible : LpStatus::optimal;

    const double dir = state_[q] == State::lower ? 1.0
                       : state_[q] == State::upper ? -1.0
                       : (d[q] < 0.0 ? 1.0 : -1.0);
    for (std::size_t i = 0; i < m_; ++i) col[i] = t_(i, q);

    // Harris two-pass ratio test.
    auto classify = [&](std::size_t i, double tol, double& ratio, bool& to_lower) {
      const double a = col[i];
      if (std::abs(a) <= piv) return false;
      const double rate = -dir * a;
      const std::size_t h = head_[i];
      const double xi = x_[h];
      if (phase == Phase::one && xi < lo_[h] - ptol) {
        if (rate <= 0.0) return false;
        ratio = (lo_[h] - xi + tol) / rate;
        to_lower = true;
        return true;
      }
      if (phase == Phase::one && xi > up_[h] + ptol) {
        if (rate >= 0.0) return false;
        ratio = (xi - up_[h] + tol) / -rate;
        to_lower = false;
        return true;
      }
      if (rate < 0.0) {
        if (!std::isfinite(lo_[h])) return false;
        ratio = (xi - lo_[h] + tol) / -rate;
        to_lower = true;
      } else {
        if (!std::isfinite(up_[h])) return false;
        ratio = (up_[h] - xi + tol) / rate;
        to_lower = false;
      }
      return true;
    };

    double tmax = kInf;
    for (std::size_t i = 0; i < m_; ++i) {
      double ratio;
      bool lower;
      if (classify(i, bland_ ? 0.0 : ptol, ratio, lower)) tmax = std::min(tmax, std::max(ratio, 0.0));
    }
    const double flip =
        std::isfinite(lo_[q]) && std::isfinite(up_[q]) ? up_[q] - lo_[q] : kInf;

    if (flip <= tmax && std::isfinite(flip)) {
      const double step = dir * flip;
      x_[q] += step;
      for (std::size_t i = 0; i < m_; ++i) x_[head_[i]] -= col[i] * step;
      state_[q] = state_[q] == State::lower ? State::upper : State::lower;
      x_[q] = state_[q] == State::lower ? lo_[q] : up_[q];
      count_iteration(false);
      continue;
    }
    if (!std::isfinite(tmax)) {
      if (phase == Phase::two) return LpStatus::unbounded;
      throw NumericalError("phase-one ratio test found no limit");
    }

    std::size_t r = npos;
    double r_ratio = 0.0;
    bool r_lower = true;
    double best_abs = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      double ratio;
      bool lower;
      if (!classify(i, 0.0, ratio, lower)) continue;
      ratio = std::max(ratio, 0.0);
      if (ratio > tmax) continue;
      if (bland_) {
        if (r == npos || ratio < r_ratio - kStepZero ||
            (ratio <= r_ratio + kStepZero && head_[i] < head_[r])) {
          r = i;
          r_ratio = ratio;
          r_lower = lower;
        }
      } else if (std::abs(col[i]) > best_abs) {
        best_abs = std::abs(col[i]);
        r = i;
        r_ratio = ratio;
        r_lower = lower;
      }
    }
    if (r == npos) throw NumericalError("ratio test failed");

    const double step = dir * r_ratio;
    x_[q] += step;
    for (std::size_t i = 0; i < m_; ++i) x_[head_[i]] -= col[i] * step;
    const std::size_t leaving = head_[r];
    if (phase == Phase::two) {
      const double ratio_d = d_[q] / col[r];
      const double* tr = t_.row(r).data();
      for (std::size_t j = 0; j < total; ++j)
        if (tr[j] != 0.0) d_[j] -= ratio_d * tr[j];
      d_[q] = 0.0;
    }
    pivot(r, q);
    state_[leaving] = r_lower ? State::lower : State::upper;
    x_[leaving] = r_lower ? lo_[leaving] : up_[leaving];
    count_iteration(r_ratio < kStepZero);
  }
}

LpStatus LpEngine::dual() {
  // Most columns have zero cost, so the dual is heavily degenerate. Shift
  // every cost away from its sign boundary by a deterministic amount above
  // the dual tolerance, run the dual on the perturbed costs, then restore;
  // the caller's primal phase two removes what the shift left behind.
  const std::vector<double> saved = cost_;
  const double base = 10.0 * dual_tol();
  std::uint64_t h = 0x9e3779b97f4a7c15ull;
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    const double xi = base * (1.0 + static_cast<double>(h >> 11) * 0x1.0p-53) * (1.0 + 1e-6 * std::abs(cost_[j]) / base);
    const bool has_lo = std::isfinite(lo_[j]), has_up = std::isfinite(up_[j]);
    if (up_[j] - lo_[j] <= kFixTol || (!has_lo && !has_up)) continue;
    if (state_[j] == State::upper || (!has_lo && state_[j] == State::basic)) cost_[j] -= xi;
    else cost_[j] += xi;
  }
  refresh_dual();
  const LpStatus st = dual_loop();
  cost_ = saved;
  refresh_dual();
  return st;
}

LpStatus LpEngine::dual_loop() {
  const double ptol = opt_.primal_tol;
  const double piv = opt_.pivot_tol;
  const double dtol = dual_tol();
  const std::size_t total = n_ + m_;
  // Healthy dual solves here take well under (total + m) pivots; past the
  // cap the reduced costs have usually lost feasibility and the loop cycles.
  const std::size_t cap = iterations_ + 5 * (total + m_) + 1000;
  std::vector<double> col(m_);

  while (true) {
    // Giving up is safe: the caller falls back to primal phase one.
    if (iterations_ > cap) return LpStatus::unbounded;
    if (since_refactor_ >= opt_.refactor_interval && !refactor()) {
      // Basis went singular; the caller restarts from phase one.
      reset_to_slack_basis();
      return LpStatus::unbounded;
    }

    // Leaving row: largest bound violation.
    std::size_t r = npos;
    double worst = ptol;
    bool increase = false;
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t h = head_[i];
      const double below = lo_[h] - x_[h];
      const double above = x_[h] - up_[h];
      const double v = std::max(below, above);
      if (v <= ptol) continue;
      if (bland_) {
        if (r == npos || h < head_[r]) {
          r = i;
          increase = below > above;
        }
      } else if (v > worst) {
        worst = v;
        r = i;
        increase = below > above;
      }
    }
    if (r == npos) return LpStatus::optimal;

    const double* tr = t_.row(r).data();
    auto eligible = [&](std::size_t j) {
      const State s = state_[j];
      if (s == State::basic || up_[j] - lo_[j] <= kFixTol) return false;
      const double a = tr[j];
      if (std::abs(a) <= piv) return false;
      if (s == State::zero) return true;
      // x_r moves by -a * dx_j.
      const bool up_move = s == State::lower;
      return increase ? (up_move ? a < 0.0 : a > 0.0) : (up_move ? a > 0.0 : a < 0.0);
    };

    // Distance of d_j from its sign boundary; a reduced cost that drifted to
    // the wrong side within tolerance has no room left.
    auto dual_room = [&](std::size_t j) {
      switch (state_[j]) {
        case State::lower: return std::max(d_[j], 0.0);
        case State::upper: return std::max(-d_[j], 0.0);
        default: return 0.0;
      }
    };

    std::size_t q = npos;
    if (bland_) {
      double best_ratio = kInf;
      for (std::size_t j = 0; j < total; ++j) {
        if (!eligible(j)) continue;
        const double ratio = dual_room(j) / std::abs(tr[j]);
        if (ratio < best_ratio - kStepZero) {
          best_ratio = ratio;
          q = j;
        }
      }
    } else {
      double tmax = kInf;
      for (std::size_t j = 0; j < total; ++j)
        if (eligible(j)) tmax = std::min(tmax, (dual_room(j) + dtol) / std::abs(tr[j]));
      double best_abs = 0.0;
      for (std::size_t j = 0; j < total; ++j) {
        if (!eligible(j)) continue;
        if (dual_room(j) / std::abs(tr[j]) > tmax) continue;
        if (std::abs(tr[j]) > best_abs) {
          best_abs = std::abs(tr[j]);
          q = j;
        }
      }
    }
    if (q == npos) return LpStatus::infeasible;
    const std::size_t leaving = head_[r];
    const double target = increase ? lo_[leaving] : up_[leaving];
    const double arq = tr[q];
    const double dx = (x_[leaving] - target) / arq;
    for (std::size_t i = 0; i < m_; ++i) col[i] = t_(i, q);
    for (std::size_t i = 0; i < m_; ++i) x_[head_[i]] -= col[i] * dx;
    x_[q] += dx;

    // A step whose reduced cost already sat on the wrong side makes no dual
    // progress, however large ratio_d is; count it toward the Bland switch.
    const bool stalled = dual_room(q) / std::abs(arq) <= 1e-3 * dtol;
    const double ratio_d = d_[q] / arq;
    for (std::size_t j = 0; j < total; ++j)
      if (tr[j] != 0.0) d_[j] -= ratio_d * tr[j];
    d_[q] = 0.0;

    pivot(r, q);
    state_[leaving] = increase ? State::lower : State::upper;
    x_[leaving] = target;
    count_iteration(stalled);
  }
}

void LpEngine::set_bounds(std::size_t var, double lower, double upper) {
  cur_lo_.at(var) = std::max(lower, root_lo_[var]);
  cur_up_.at(var) = std::min(upper, root_up_[var]);
}

void LpEngine::reset_bounds() {
  cur_lo_ = root_lo_;
  cur_up_ = root_up_;
}

double LpEngine::compute_objective() const {
  double obj = model_->objective_constant() + fixed_cost_;
  for (std::size_t c = 0; c < n_; ++c) obj += cost_[c] * x_[c];
  return obj;
}

LpStatus LpEngine::solve() {
  objective_ = kInf;
  if (root_infeasible_) return LpStatus::infeasible;
  for (std::size_t j = 0; j < nv_; ++j) {
    if (cur_lo_[j] > cur_up_[j] + 1e-9) return LpStatus::infeasible;
    const std::size_t c = col_of_[j];
    if (c == npos) continue;
    lo_[c] = cur_lo_[j];
    up_[c] = std::max(cur_up_[j], cur_lo_[j]);
  }
  bland_ = false;
  degenerate_run_ = 0;
  if (since_refactor_ >= opt_.refactor_interval && !refactor()) reset_to_slack_basis();
  refresh_dual();
  place_nonbasic();
  refresh_primal();

  for (int attempt = 0; attempt < 4; ++attempt) {
    if (!primal_feasible()) {
      bool need_phase_one = true;
      if (dual_feasible()) {
        const LpStatus st = dual();
        need_phase_one = st != LpStatus::optimal;
      }
      if (need_phase_one && primal(Phase::one) == LpStatus::infeasible) {
        // Confirm against a fresh tableau before reporting infeasibility.
        if (!refactor()) reset_to_slack_basis();
        if (primal(Phase::one) == LpStatus::infeasible) return LpStatus::infeasible;
      }
      refresh_dual();
    }
    if (primal(Phase::two) == LpStatus::unbounded) return LpStatus::unbounded;
    refresh_primal();
    refresh_dual();
    if (primal_feasible() && dual_feasible()) {
      objective_ = compute_objective();
      return LpStatus::optimal;
    }
    if (!refactor()) reset_to_slack_basis();
    place_nonbasic();
    refresh_primal();
  }
  throw NumericalError("simplex failed to reach a verified optimum");
}

std::vector<double> LpEngine::solution() const {
  std::vector<double> x(nv_);
  for (std::size_t j = 0; j < nv_; ++j) {
    const std::size_t c = col_of_[j];
    x[j] = c == npos ? root_lo_[j] : x_[c];
  }
  return x;
}

SolveOutcome solve_lp(const MilpModel& model, LpOptions options) {
  if (!model.sealed()) throw InvalidInput("model must be sealed before solving");
  const auto start = std::chrono::steady_clock::now();
  LpEngine engine(model, options);
  SolveOutcome out;
  const LpStatus st = engine.solve();
  out.lp_iterations = engine.iterations();
  if (st == LpStatus::optimal) {
    out.status = SolveStatus::optimal;
    out.assignment = engine.solution();
    out.objective = engine.objective();
    out.bound = out.objective;
  } else {
    out.status = st == LpStatus::infeasible ? SolveStatus::infeasible : SolveStatus::unbounded;
    out.objective = st == LpStatus::unbounded ? -kInf : kInf;
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace ott::milp
