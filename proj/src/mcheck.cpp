#include "ott/mcheck.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include <omp.h>

#include "ott/dcflow.hpp"
#include "ott/error.hpp"

namespace ott::mcheck {

bool variant_violates(const GridCase& grid, const Topology& z, const std::vector<double>& pg) {
  return !dcflow::relaxed_feasible(grid, z, pg);
}

namespace {

struct Work {
  const RhoScenario* scenario;
  std::size_t t;
  VariantSpace space;
  std::vector<std::uint64_t> draws;  // sample mode: variant indices to evaluate
  std::uint64_t evaluations() const { return draws.empty() ? space.count() : draws.size(); }
  std::uint64_t index(std::uint64_t i) const { return draws.empty() ? i : draws[i]; }
};

std::vector<Work> plan(const std::vector<RhoScenario>& scenarios, const RhoOptions& opt) {
  std::vector<Work> work;
  for (const RhoScenario& s : scenarios) {
    if (!s.grid) throw InvalidInput("rho scenario " + s.id + " has no case");
    const auto& Z = s.trajectory.topologies;
    for (const Topology& z : Z) s.grid->check_topology(z);
    if (s.pg.size() != s.grid->num_buses()) throw InvalidInput("rho scenario " + s.id + ": dispatch size mismatch");
    for (std::size_t t = 1; t < Z.size(); ++t) {
      // Exhaustive mode enforces the cap; sampling only needs the index range.
      const std::size_t cap = opt.mode == RhoMode::exhaustive ? opt.cap : 63;
      work.push_back(Work{&s, t, VariantSpace(Z[t - 1], Z[t], cap), {}});
    }
  }
  if (opt.mode == RhoMode::sample) {
    if (opt.samples == 0) throw InvalidInput("sample mode needs at least one draw per batch");
    for (std::size_t b = 0; b < work.size(); ++b) {
      const std::uint64_t n = work[b].space.count();
      if (n == 0) continue;
      std::mt19937_64 rng(opt.seed + b);
      std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
      work[b].draws.resize(opt.samples);
      for (auto& d : work[b].draws) d = pick(rng);
    }
  }
  return work;
}

RhoResult summarize(const std::vector<Work>& work, const std::vector<std::uint64_t>& hits, const RhoOptions& opt) {
  RhoResult r;
  double total_variants = 0.0;
  for (const Work& w : work) total_variants += static_cast<double>(w.space.count());
  double var = 0.0, acc = 0.0;
  for (std::size_t b = 0; b < work.size(); ++b) {
    const Work& w = work[b];
    RhoBatch rb;
    rb.scenario = w.scenario->id;
    rb.t = w.t;
    rb.variants = w.space.count();
    rb.hits = hits[b];
    if (opt.mode == RhoMode::sample && rb.variants > 0) {
      rb.draws = w.draws.size();
      const double p = static_cast<double>(hits[b]) / static_cast<double>(rb.draws);
      rb.violations = p * static_cast<double>(rb.variants);
      const double wt = static_cast<double>(rb.variants) / total_variants;
      var += wt * wt * p * (1.0 - p) / static_cast<double>(rb.draws);
    } else {
      rb.violations = static_cast<double>(hits[b]);
    }
    acc += rb.violations;
    r.batches.push_back(rb);
  }
  if (total_variants == 0.0) {
    r.no_intermediates = true;
    return r;
  }
  r.rho = acc / total_variants;
  r.standard_error = std::sqrt(var);
  return r;
}

}  // namespace

RhoResult rho_probability_serial(const std::vector<RhoScenario>& scenarios, const RhoOptions& options) {
  const std::vector<Work> work = plan(scenarios, options);
  std::vector<std::uint64_t> hits(work.size(), 0);
  for (std::size_t b = 0; b < work.size(); ++b) {
    const Work& w = work[b];
    for (std::uint64_t i = 0; i < w.evaluations(); ++i)
      if (variant_violates(*w.scenario->grid, w.space.topology(w.index(i)), w.scenario->pg)) ++hits[b];
  }
  return summarize(work, hits, options);
}

RhoResult rho_probability(const std::vector<RhoScenario>& scenarios, const RhoOptions& options) {
  const std::vector<Work> work = plan(scenarios, options);
  std::vector<std::uint64_t> offset(work.size() + 1, 0);
  for (std::size_t b = 0; b < work.size(); ++b) offset[b + 1] = offset[b] + work[b].evaluations();
  const std::int64_t total = static_cast<std::int64_t>(offset.back());
  std::vector<std::uint64_t> hits(work.size(), 0);

#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t g = 0; g < total; ++g) {
    const auto ug = static_cast<std::uint64_t>(g);
    const std::size_t b =
        static_cast<std::size_t>(std::upper_bound(offset.begin(), offset.end(), ug) - offset.begin()) - 1;
    const Work& w = work[b];
    if (variant_violates(*w.scenario->grid, w.space.topology(w.index(ug - offset[b])), w.scenario->pg)) {
#pragma omp atomic
      ++hits[b];
    }
  }
  return summarize(work, hits, options);
}

void write_rho_csv(std::ostream& os, const RhoResult& r) {
  const auto old = os.precision(9);
  os << "scenario,t,variants,violations,rho\n";
  double variants = 0.0, violations = 0.0;
  for (const RhoBatch& b : r.batches) {
    os << b.scenario << ',' << b.t << ',' << b.variants << ',' << b.violations << ',' << b.rho() << '\n';
    variants += static_cast<double>(b.variants);
    violations += b.violations;
  }
  os << "total,," << variants << ',' << violations << ',' << r.rho << '\n';
  os.precision(old);
}

}  // namespace ott::mcheck
