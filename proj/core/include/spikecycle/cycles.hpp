// Bipartite signed cycle statistics.
//
// The order-k statistic of an n x p matrix X is
//
//   B_{n,k} = n^{-k} sum X(i0,j0) X(i1,j0) X(i1,j1) X(i2,j1) ...
//                        X(i_{k-1},j_{k-1}) X(i0,j_{k-1})
//
// over pairwise distinct i0..i_{k-1} in [n] and pairwise distinct
// j0..j_{k-1} in [p]; each j_t couples i_t to i_{t+1} (cyclically).
// B_{n,1} reduces to n^{-1} sum_ij X(i,j)^2.
//
// cycle_brute sums the definition directly. cycle_fast removes the
// distinctness constraints by Moebius inversion over the two partition
// lattices: the distinct-index sum equals
//
//   sum over partition pairs (pi_I, pi_J) of
//     mobius(pi_I) mobius(pi_J) * U(pi_I, pi_J)
//
// where U is the unconstrained sum with positions in a block sharing
// one free index, and mobius(pi) = prod over blocks (-1)^{|b|-1}(|b|-1)!
// is the lattice Moebius weight relative to the discrete partition.
// Each U is a contraction of a small tensor network (the cycle with
// vertices merged per block; parallel edges become entrywise powers of
// X) and is evaluated by eliminating one block index at a time along a
// greedy min-degree order, falling back to slicing an index when every
// remaining vertex has three or more distinct neighbours. Contractions
// are memoized on a canonical form of the collapsed pattern, shared
// across k inside cycle_vector.
//
// Determinism: the partition loop may run on several threads, but each
// term lands in its own slot and the final reduction is a fixed
// pairwise tree, so results are bit-identical for any thread count.
#pragma once

#include <vector>

#include "spikecycle/linalg.hpp"

namespace spikecycle {

struct Partition {
  std::vector<int> block_of;  // restricted growth string; block_of[0] == 0
  int num_blocks = 0;
  double mobius = 1.0;  // relative to the discrete partition
};

struct PartitionPlan {
  int k = 0;
  std::vector<Partition> partitions;  // Bell(k) entries, RGS order
};

// All set partitions of {0..k-1} with Moebius weights. k <= 12.
[[nodiscard]] PartitionPlan enumerate_partitions(int k);

struct CycleOptions {
  int k_max = 6;             // refuse larger k (cost grows like Bell(k)^2)
  int threads = 1;           // workers for the partition loop
  double brute_budget = 1e8; // max n^k p^k products accepted by cycle_brute
};

// Direct enumeration of the definition. Cost n^k p^k products; throws
// std::domain_error when that exceeds the budget.
[[nodiscard]] double cycle_brute(const Matrix& x, int k,
                                 double budget = 1e8);

// Moebius-inverted evaluation; equals cycle_brute exactly (up to
// floating point roundoff) at polynomial cost in n, p.
[[nodiscard]] double cycle_fast(const Matrix& x, int k,
                                const CycleOptions& opts = {});

struct CycleStats {
  int n = 0;
  int p = 0;
  double gamma_hat = 0.0;  // p / n
  std::vector<double> b;   // b[i] = B_{n,i+1}, orders 1..m
};

// B_{n,1..m} with pattern memoization shared across orders.
[[nodiscard]] CycleStats cycle_vector(const Matrix& x, int m,
                                      const CycleOptions& opts = {});

}  // namespace spikecycle
