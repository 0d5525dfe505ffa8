#ifndef TASEP_SIMULATOR_HPP
#define TASEP_SIMULATOR_HPP

// Kinetic Monte Carlo for the two-species process.  Every eligible move
// fires at rate 1, so Gillespie stepping draws an Exp(1)/|moves| holding
// time and then a uniform move choice.  Checkpoints consume no draws, which
// makes a multi-checkpoint sweep consume the random stream exactly like a
// single-checkpoint run: estimates shared across a (t, x) grid are bitwise
// equal to pointwise calls with the same seed.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tasep/detail/parallel.hpp"
#include "tasep/detail/rng.hpp"
#include "tasep/model.hpp"

namespace tasep::simulator {

struct ProbEstimate {
  double p_hat = 0.0;
  double std_err = 0.0;  // sqrt(p_hat (1 - p_hat) / n)
  long long n_samples = 0;
};

namespace detail_sim {

// replay one path, presenting the state to `visit` at each checkpoint; the
// state vectors stay position-sorted because steps fire into empty sites
// only and swaps exchange labels only.  Draw order per event: holding time,
// then move choice; the choice of the event that crosses the final
// checkpoint is never drawn.
template <typename Visit>
void walk_path(const std::vector<int>& pos0, const std::vector<int>& lab0,
               const std::vector<double>& times, tasep::detail::splitmix64& rng, Visit&& visit) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0) throw std::invalid_argument("simulate: times must be >= 0");
    if (i > 0 && times[i] < times[i - 1])
      throw std::invalid_argument("simulate: times must be sorted ascending");
  }
  if (times.empty()) return;
  std::vector<int> pos = pos0;
  std::vector<int> lab = lab0;
  const int n = static_cast<int>(pos.size());
  std::size_t cp = 0;
  if (n == 0) {
    for (; cp < times.size(); ++cp) visit(cp, pos, lab);
    return;
  }
  std::vector<int> moves;  // encoded: 2i = step of particle i, 2i+1 = swap
  moves.reserve(static_cast<std::size_t>(n));
  double now = 0.0;
  for (;;) {
    while (cp < times.size() && times[cp] <= now) {
      visit(cp, pos, lab);
      ++cp;
    }
    if (cp >= times.size()) return;
    moves.clear();
    for (int i = 0; i < n; ++i) {
      const bool neighbor = (i + 1 < n) && pos[static_cast<std::size_t>(i + 1)] ==
                                               pos[static_cast<std::size_t>(i)] + 1;
      if (!neighbor)
        moves.push_back(2 * i);
      else if (lab[static_cast<std::size_t>(i)] == 2 && lab[static_cast<std::size_t>(i + 1)] == 1)
        moves.push_back(2 * i + 1);
    }
    // the rightmost particle can always step, so moves is never empty
    const double event_time = now + rng.exponential() / static_cast<double>(moves.size());
    while (cp < times.size() && times[cp] < event_time) {
      visit(cp, pos, lab);
      ++cp;
    }
    if (cp >= times.size()) return;
    const int mv = moves[static_cast<std::size_t>(rng.below(moves.size()))];
    const auto i = static_cast<std::size_t>(mv >> 1);
    if (mv & 1)
      std::swap(lab[i], lab[i + 1]);
    else
      pos[i] += 1;
    now = event_time;
  }
}

// replica blocks are a fixed size so that hit counts never depend on how
// many threads the sweep happens to run on
inline constexpr long long replica_block = 4096;

}  // namespace detail_sim

inline std::vector<model::ParticleConfig> simulate_path_multi(const model::ParticleConfig& initial,
                                                              const std::vector<double>& times,
                                                              tasep::detail::splitmix64& rng) {
  std::vector<model::ParticleConfig> out(times.size());
  detail_sim::walk_path(initial.positions, initial.labels, times, rng,
                        [&](std::size_t cp, const std::vector<int>& pos,
                            const std::vector<int>& lab) {
                          out[cp] = model::ParticleConfig(pos, lab);
                        });
  return out;
}

inline model::ParticleConfig simulate_path(const model::ParticleConfig& initial, double t,
                                           tasep::detail::splitmix64& rng) {
  return simulate_path_multi(initial, {t}, rng).front();
}

inline void require_marked_word(const model::ParticleConfig& initial, int k) {
  if (initial.size() < 1) throw std::invalid_argument("mc: need at least one particle");
  if (!(k >= 0 && k <= initial.size()) ||
      initial.labels != model::SpeciesSequence::nu(k, initial.size()).word)
    throw std::invalid_argument("mc: initial labels must be k leading 2s then 1s");
}

// integer hit counts on the (times x xs) grid over n replicas; counts[i][j]
// pairs times[i] with xs[j].  Replica r always uses stream (seed, r), so the
// result is identical for any thread count and any grid that contains the
// same cell.
inline std::vector<std::vector<long long>> mc_event_counts(const model::ParticleConfig& initial,
                                                           int k, const std::vector<int>& xs,
                                                           const std::vector<double>& times,
                                                           long long n, std::uint64_t seed) {
  require_marked_word(initial, k);
  if (n < 1) throw std::invalid_argument("mc: need n >= 1");
  if (xs.empty() || times.empty()) throw std::invalid_argument("mc: empty grid");
  const std::size_t cells = times.size() * xs.size();
  const auto blocks =
      static_cast<std::size_t>((n + detail_sim::replica_block - 1) / detail_sim::replica_block);
  std::vector<std::vector<long long>> block_counts(blocks, std::vector<long long>(cells, 0));
  tasep::detail::parallel_for(blocks, [&](std::size_t b) {
    auto& counts = block_counts[b];
    const long long lo = static_cast<long long>(b) * detail_sim::replica_block;
    const long long hi = std::min<long long>(n, lo + detail_sim::replica_block);
    for (long long rep = lo; rep < hi; ++rep) {
      auto rng = tasep::detail::replica_stream(seed, static_cast<std::uint64_t>(rep));
      detail_sim::walk_path(initial.positions, initial.labels, times, rng,
                            [&](std::size_t cp, const std::vector<int>& pos,
                                const std::vector<int>& lab) {
                              for (std::size_t j = 0; j < xs.size(); ++j)
                                if (model::event_holds(pos, lab, k, xs[j]))
                                  ++counts[cp * xs.size() + j];
                            });
    }
  });
  std::vector<std::vector<long long>> totals(times.size(),
                                             std::vector<long long>(xs.size(), 0));
  for (const auto& counts : block_counts)
    for (std::size_t i = 0; i < times.size(); ++i)
      for (std::size_t j = 0; j < xs.size(); ++j) totals[i][j] += counts[i * xs.size() + j];
  return totals;
}

inline ProbEstimate estimate_from_count(long long hits, long long n) {
  ProbEstimate e;
  e.p_hat = static_cast<double>(hits) / static_cast<double>(n);
  e.std_err = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(n));
  e.n_samples = n;
  return e;
}

inline std::vector<std::vector<ProbEstimate>> mc_event_sweep(const model::ParticleConfig& initial,
                                                             int k, const std::vector<int>& xs,
                                                             const std::vector<double>& times,
                                                             long long n, std::uint64_t seed) {
  const auto counts = mc_event_counts(initial, k, xs, times, n, seed);
  std::vector<std::vector<ProbEstimate>> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    out[i].reserve(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j)
      out[i].push_back(estimate_from_count(counts[i][j], n));
  }
  return out;
}

inline ProbEstimate mc_event_probability(const model::ParticleConfig& initial, int k, int x,
                                         double t, long long n, std::uint64_t seed) {
  return mc_event_sweep(initial, k, {x}, {t}, n, seed)[0][0];
}

}  // namespace tasep::simulator

#endif
