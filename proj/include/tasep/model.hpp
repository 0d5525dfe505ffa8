#ifndef TASEP_MODEL_HPP
#define TASEP_MODEL_HPP

// Domain types for the two-species TASEP on Z.  Species 2 (first class) may
// jump right into a site held by a species-1 particle, exchanging positions;
// species 1 is blocked by any occupant.  Configurations are kept
// position-sorted, so a swap is realized as "exchange the two labels".

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "tasep/errors.hpp"

namespace tasep::model {

inline constexpr int default_n_cap = 12;

struct SpeciesSequence {
  std::vector<int> word;  // entries are 1 or 2, position-ordered

  SpeciesSequence() = default;
  explicit SpeciesSequence(std::vector<int> w) : word(std::move(w)) {
    for (int s : word)
      if (s != 1 && s != 2) throw std::invalid_argument("species labels must be 1 or 2");
  }

  // k leading 2s followed by N-k 1s
  static SpeciesSequence nu(int k, int n) {
    if (n < 0 || k < 0 || k > n) throw std::invalid_argument("nu(k,N) needs 0 <= k <= N");
    std::vector<int> w(static_cast<std::size_t>(n), 1);
    for (int i = 0; i < k; ++i) w[static_cast<std::size_t>(i)] = 2;
    return SpeciesSequence(std::move(w));
  }

  bool operator==(const SpeciesSequence& o) const { return word == o.word; }
};

struct ParticleConfig {
  std::vector<int> positions;  // strictly increasing
  std::vector<int> labels;     // same length, entries 1 or 2

  ParticleConfig() = default;
  ParticleConfig(std::vector<int> pos, std::vector<int> lab, int n_cap = default_n_cap)
      : positions(std::move(pos)), labels(std::move(lab)) {
    if (positions.size() != labels.size())
      throw std::invalid_argument("positions and labels must have equal length");
    if (positions.size() > static_cast<std::size_t>(n_cap))
      throw resource_error("particle count exceeds cap " + std::to_string(n_cap));
    for (std::size_t i = 1; i < positions.size(); ++i)
      if (positions[i - 1] >= positions[i])
        throw std::invalid_argument("positions must be strictly increasing");
    for (int s : labels)
      if (s != 1 && s != 2) throw std::invalid_argument("species labels must be 1 or 2");
  }

  int size() const { return static_cast<int>(positions.size()); }
  bool operator==(const ParticleConfig& o) const {
    return positions == o.positions && labels == o.labels;
  }
};

struct EventSpec {
  double t = 0.0;  // time
  int k = 0;       // leading first-class block length
  int x = 0;       // anchor site
};

enum class MoveKind { step_right, swap_right };

struct Move {
  int particle = 0;  // 0-based index into the sorted configuration
  MoveKind kind = MoveKind::step_right;
  bool operator==(const Move& o) const { return particle == o.particle && kind == o.kind; }
};

// Event E_{t,k,x} at a fixed configuration: for k >= 1 the species word must
// be nu(k,N) and the k first-class particles must sit at x, x+1, ..., x+k-1;
// for k = 0 all labels are 1 and the leftmost particle is at >= x.
inline bool event_holds(const std::vector<int>& positions, const std::vector<int>& labels, int k,
                        int x) {
  const int n = static_cast<int>(positions.size());
  if (k < 0 || k > n) throw std::invalid_argument("event_holds: k out of range");
  for (int i = 0; i < n; ++i)
    if (labels[static_cast<std::size_t>(i)] != (i < k ? 2 : 1)) return false;
  if (k == 0) return n == 0 || positions[0] >= x;
  for (int i = 0; i < k; ++i)
    if (positions[static_cast<std::size_t>(i)] != x + i) return false;
  return true;
}

inline bool event_holds(const ParticleConfig& cfg, int k, int x) {
  return event_holds(cfg.positions, cfg.labels, k, x);
}

inline std::vector<Move> eligible_moves(const ParticleConfig& cfg) {
  std::vector<Move> out;
  int n = cfg.size();
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int target = cfg.positions[static_cast<std::size_t>(i)] + 1;
    bool neighbor = (i + 1 < n) && cfg.positions[static_cast<std::size_t>(i + 1)] == target;
    if (!neighbor) {
      out.push_back({i, MoveKind::step_right});
    } else if (cfg.labels[static_cast<std::size_t>(i)] == 2 &&
               cfg.labels[static_cast<std::size_t>(i + 1)] == 1) {
      out.push_back({i, MoveKind::swap_right});
    }
  }
  return out;
}

inline ParticleConfig apply_move(const ParticleConfig& cfg, const Move& mv) {
  int n = cfg.size();
  if (mv.particle < 0 || mv.particle >= n) throw std::logic_error("apply_move: bad particle index");
  ParticleConfig out = cfg;
  auto i = static_cast<std::size_t>(mv.particle);
  if (mv.kind == MoveKind::step_right) {
    int target = cfg.positions[i] + 1;
    if (mv.particle + 1 < n && cfg.positions[i + 1] == target)
      throw std::logic_error("apply_move: step into occupied site");
    out.positions[i] = target;
  } else {
    if (mv.particle + 1 >= n || cfg.positions[i + 1] != cfg.positions[i] + 1 ||
        cfg.labels[i] != 2 || cfg.labels[i + 1] != 1)
      throw std::logic_error("apply_move: swap not eligible");
    std::swap(out.labels[i], out.labels[i + 1]);
  }
  return out;
}

}  // namespace tasep::model

#endif
