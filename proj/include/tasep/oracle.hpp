#ifndef TASEP_ORACLE_HPP
#define TASEP_ORACLE_HPP

// Master-equation oracle by uniformization.  Total jump intensity is at most
// N (each particle has at most one eligible move at rate 1), so with
// Lambda = N the time-t law is sum_j P(Poisson(Lambda t) = j) (delta_Y U^j)
// with U = I + Q/Lambda, and truncating at jump_cap costs at most the
// Poisson tail beyond it.  The reachable state space to depth jump_cap is
// finite because positions only move right and each second-class particle
// overtakes each first-class one at most once.  This route shares no code or
// math with the contour-moment formulas, which is the point.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tasep/errors.hpp"
#include "tasep/model.hpp"

namespace tasep::simulator {

struct OracleParams {
  int jump_cap = 0;                    // 0: smallest cap satisfying the tail bound
  double tol = 1e-10;                  // admissible truncation error
  std::size_t max_states = 4'000'000;  // enumeration memory budget
};

// P(Poisson(lambda) > cap), summed from the tail upward
inline double poisson_tail(double lambda, int cap) {
  if (lambda < 0) throw std::invalid_argument("poisson_tail: lambda must be >= 0");
  if (cap < 0) return 1.0;
  if (lambda == 0.0) return 0.0;
  double log_term = -lambda + (cap + 1) * std::log(lambda) - std::lgamma(cap + 2.0);
  double term = std::exp(log_term);
  double sum = 0.0;
  for (int j = cap + 1; j < cap + 1000; ++j) {
    sum += term;
    term *= lambda / (j + 1);
    if (term < sum * 1e-18 + 1e-300) break;
  }
  return sum;
}

inline int choose_jump_cap(double lambda, double tol) {
  if (tol <= 0) throw std::invalid_argument("oracle: tol must be positive");
  int cap = static_cast<int>(lambda);
  while (poisson_tail(lambda, cap) > tol) ++cap;
  return cap;
}

namespace detail_oracle {

inline std::string state_key(const std::vector<int>& pos, const std::vector<int>& lab) {
  std::string key;
  key.reserve(pos.size() * 5);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    auto u = static_cast<std::uint32_t>(pos[i]);
    key.push_back(static_cast<char>(u & 0xff));
    key.push_back(static_cast<char>((u >> 8) & 0xff));
    key.push_back(static_cast<char>((u >> 16) & 0xff));
    key.push_back(static_cast<char>((u >> 24) & 0xff));
    key.push_back(static_cast<char>(lab[i]));
  }
  return key;
}

}  // namespace detail_oracle

// time-t distribution over every configuration reachable within jump_cap
// events; reusable across event anchors x (and any k-word query) at fixed
// (initial, t)
struct OracleDistribution {
  std::vector<std::vector<int>> state_pos;
  std::vector<std::vector<int>> state_lab;
  std::vector<double> mass;   // time-t probability per state
  double sink_mass = 0.0;     // mass leaked out of the enumeration (0 by depth argument)
  double tail_bound = 0.0;    // Poisson mass beyond jump_cap
  double row_defect = 0.0;    // max |row sum - 1| over the uniformized kernel
  int jump_cap = 0;

  double event_mass(int k, int x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i)
      if (model::event_holds(state_pos[i], state_lab[i], k, x)) s += mass[i];
    return s;
  }
};

inline OracleDistribution oracle_distribution(const model::ParticleConfig& initial, double t,
                                              const OracleParams& params = {}) {
  using detail_oracle::state_key;
  const int n = initial.size();
  if (n < 1) throw std::invalid_argument("oracle: need at least one particle");
  if (t < 0) throw std::invalid_argument("oracle: t must be >= 0");
  const double lambda_t = static_cast<double>(n) * t;
  int cap = params.jump_cap;
  if (cap == 0) {
    cap = choose_jump_cap(lambda_t, params.tol);
  } else if (poisson_tail(lambda_t, cap) > params.tol) {
    throw std::invalid_argument("oracle: jump_cap violates the Poisson tail bound for tol");
  }

  OracleDistribution out;
  out.jump_cap = cap;
  out.tail_bound = poisson_tail(lambda_t, cap);

  // breadth-first enumeration by jump depth
  std::unordered_map<std::string, int> index;
  out.state_pos.push_back(initial.positions);
  out.state_lab.push_back(initial.labels);
  index.emplace(state_key(initial.positions, initial.labels), 0);
  std::vector<int> frontier{0};
  for (int depth = 0; depth < cap && !frontier.empty(); ++depth) {
    std::vector<int> next;
    for (int s : frontier) {
      const model::ParticleConfig cfg(out.state_pos[static_cast<std::size_t>(s)],
                                      out.state_lab[static_cast<std::size_t>(s)]);
      for (const auto& mv : model::eligible_moves(cfg)) {
        const model::ParticleConfig tgt = model::apply_move(cfg, mv);
        const std::string key = state_key(tgt.positions, tgt.labels);
        auto it = index.find(key);
        if (it == index.end()) {
          if (out.state_pos.size() >= params.max_states)
            throw resource_error("oracle: state enumeration exceeds max_states = " +
                                 std::to_string(params.max_states));
          const int id = static_cast<int>(out.state_pos.size());
          out.state_pos.push_back(tgt.positions);
          out.state_lab.push_back(tgt.labels);
          index.emplace(key, id);
          next.push_back(id);
        }
      }
    }
    frontier = std::move(next);
  }

  // uniformized kernel in compressed rows; unresolved targets go to a sink
  const auto n_states = out.state_pos.size();
  std::vector<std::size_t> row_start(n_states + 1, 0);
  std::vector<int> row_target;
  for (std::size_t s = 0; s < n_states; ++s) {
    const model::ParticleConfig cfg(out.state_pos[s], out.state_lab[s]);
    for (const auto& mv : model::eligible_moves(cfg)) {
      const model::ParticleConfig tgt = model::apply_move(cfg, mv);
      auto it = index.find(state_key(tgt.positions, tgt.labels));
      row_target.push_back(it == index.end() ? -1 : it->second);
    }
    row_start[s + 1] = row_target.size();
  }
  const double inv_rate = 1.0 / static_cast<double>(n);
  for (std::size_t s = 0; s < n_states; ++s) {
    const auto deg = static_cast<double>(row_start[s + 1] - row_start[s]);
    const double row_sum = (1.0 - deg * inv_rate) + deg * inv_rate;
    out.row_defect = std::max(out.row_defect, std::abs(row_sum - 1.0));
  }

  // dist = sum_j P(Poisson(lambda t) = j) * (delta U^j), matrix-free
  std::vector<double> v(n_states, 0.0), vnext(n_states, 0.0);
  v[0] = 1.0;
  double sink_v = 0.0, sink_next = 0.0;
  out.mass.assign(n_states, 0.0);
  double weight = std::exp(-lambda_t);
  for (std::size_t s = 0; s < n_states; ++s) out.mass[s] = weight * v[s];
  out.sink_mass = weight * sink_v;
  for (int j = 1; j <= cap; ++j) {
    std::fill(vnext.begin(), vnext.end(), 0.0);
    sink_next = sink_v;  // the sink is absorbing
    for (std::size_t s = 0; s < n_states; ++s) {
      const double m = v[s];
      if (m == 0.0) continue;
      const auto deg = row_start[s + 1] - row_start[s];
      vnext[s] += m * (1.0 - static_cast<double>(deg) * inv_rate);
      for (std::size_t e = row_start[s]; e < row_start[s + 1]; ++e) {
        const int tgt = row_target[e];
        if (tgt < 0)
          sink_next += m * inv_rate;
        else
          vnext[static_cast<std::size_t>(tgt)] += m * inv_rate;
      }
    }
    v.swap(vnext);
    sink_v = sink_next;
    weight *= lambda_t / j;
    for (std::size_t s = 0; s < n_states; ++s) out.mass[s] += weight * v[s];
    out.sink_mass += weight * sink_v;
  }
  return out;
}

inline double master_equation_probability(const model::ParticleConfig& initial, int k, int x,
                                          double t, const OracleParams& params = {}) {
  if (!(k >= 0 && k <= initial.size()) ||
      initial.labels != model::SpeciesSequence::nu(k, initial.size()).word)
    throw std::invalid_argument("oracle: initial labels must be k leading 2s then 1s");
  return oracle_distribution(initial, t, params).event_mass(k, x);
}

}  // namespace tasep::simulator

#endif
