#pragma once

// Seeded random inputs shared by the unit tests and the acceptance run.

#include <closedsum/closedsum.hpp>

#include <random>
#include <utility>
#include <vector>

namespace cases {

using namespace closedsum;

inline Index uniform_index(Rng& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

/// Pair in C^d that plants each of the four intersections with some probability,
/// so degenerate components show up regularly.
inline std::pair<Subspace, Subspace> structured_pair(Index d, Rng& rng) {
  const CMatrix q = column_space(random_gaussian(d, d, rng));  // unitary frame
  Index at = 0;
  auto take = [&](Index want) {
    const Index k = std::min(want, d - at);
    CMatrix cols = q.middleCols(at, k);
    at += k;
    return cols;
  };
  std::bernoulli_distribution coin(0.5);
  const CMatrix both = take(coin(rng) ? uniform_index(rng, 0, 2) : 0);
  const CMatrix first_only = take(coin(rng) ? 1 : 0);
  const CMatrix second_only = take(coin(rng) ? 1 : 0);
  const Index generic = (d - at) / 2 > 0 ? uniform_index(rng, 0, (d - at) / 2) : 0;
  const CMatrix u = take(generic);
  const CMatrix w = take(generic);
  std::uniform_real_distribution<double> angle(0.05, 1.5);
  CMatrix v(d, generic);
  for (Index i = 0; i < generic; ++i) {
    const double t = angle(rng);
    v.col(i) = std::cos(t) * u.col(i) + std::sin(t) * w.col(i);
  }
  CMatrix b1(d, both.cols() + first_only.cols() + u.cols());
  b1 << both, first_only, u;
  CMatrix b2(d, both.cols() + second_only.cols() + v.cols());
  b2 << both, second_only, v;
  return {from_spanning(b1), from_spanning(b2)};
}

/// Pair of uniformly random subspaces with random ranks 0..d.
inline std::pair<Subspace, Subspace> generic_pair(Index d, Rng& rng) {
  return {random_subspace(d, uniform_index(rng, 0, d), rng), random_subspace(d, uniform_index(rng, 0, d), rng)};
}

/// Alternates structured and generic pairs over d = 2..12.
inline std::vector<std::pair<Subspace, Subspace>> pair_batch(int count, std::uint64_t seed, Index max_d = 12) {
  Rng rng(seed);
  std::vector<std::pair<Subspace, Subspace>> out;
  for (int i = 0; i < count; ++i) {
    const Index d = 2 + i % (max_d - 1);
    out.push_back(i % 2 == 0 ? structured_pair(d, rng) : generic_pair(d, rng));
  }
  return out;
}

/// Random ranks r_k in [1, max_rank] with Σr_k = d, giving a system that is
/// independent with full sum almost surely.
inline SubspaceSystem independent_full_system(Index n, Rng& rng, Index max_rank = 2) {
  std::vector<Index> ranks;
  for (Index k = 0; k < n; ++k) ranks.push_back(uniform_index(rng, 1, max_rank));
  Index d = 0;
  for (Index r : ranks) d += r;
  return random_system(d, ranks, rng);
}

/// Random system in C^d; with `full` false the ranks add up to less than d.
inline SubspaceSystem random_ranked_system(Index d, Index n, bool full, Rng& rng) {
  std::vector<Index> ranks;
  if (full) {
    for (Index k = 0; k < n; ++k) ranks.push_back(uniform_index(rng, 1, d - 1));
    Index total = 0;
    for (Index r : ranks) total += r;
    if (total < d) ranks.back() += d - total;
    ranks.back() = std::min(ranks.back(), d);
  } else {
    const Index budget = d - 1;
    for (Index k = 0; k < n; ++k) ranks.push_back(1);
    Index total = n;
    while (total < budget && std::bernoulli_distribution(0.5)(rng)) {
      ranks[static_cast<std::size_t>(uniform_index(rng, 0, n - 1))] += 1;
      ++total;
    }
  }
  return random_system(d, ranks, rng);
}

inline std::vector<cplx> random_poly(Rng& rng, int max_degree = 3) {
  std::normal_distribution<double> g(0.0, 1.0);
  const int deg = static_cast<int>(uniform_index(rng, 0, max_degree));
  std::vector<cplx> c;
  for (int i = 0; i <= deg; ++i) c.emplace_back(g(rng), g(rng));
  return c;
}

}  // namespace cases
