#include "spikecycle/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <utility>

#include "spikecycle/parallel.hpp"

namespace spikecycle {

// ===== partitions ===========================================================

PartitionPlan enumerate_partitions(int k) {
  if (k < 1 || k > 12)
    throw std::invalid_argument("enumerate_partitions: k must be in [1,12]");
  PartitionPlan plan;
  plan.k = k;
  std::vector<int> rgs(k, 0);
  const auto emit = [&] {
    Partition part;
    part.block_of = rgs;
    part.num_blocks = 1 + *std::max_element(rgs.begin(), rgs.end());
    std::vector<int> size(part.num_blocks, 0);
    for (int b : rgs) ++size[b];
    double mobius = 1.0;
    for (int b = 0; b < part.num_blocks; ++b) {
      // (-1)^{s-1} (s-1)!
      for (int f = 2; f < size[b]; ++f) mobius *= f;
      if (size[b] % 2 == 0) mobius = -mobius;
    }
    part.mobius = mobius;
    plan.partitions.push_back(std::move(part));
  };
  // Restricted growth: position t may join blocks 0..max_used+1.
  const auto recurse = [&](auto&& self, int t, int max_used) -> void {
    if (t == k) {
      emit();
      return;
    }
    for (int b = 0; b <= max_used + 1; ++b) {
      rgs[t] = b;
      self(self, t + 1, std::max(max_used, b));
    }
  };
  rgs[0] = 0;
  recurse(recurse, 1, 0);
  return plan;
}

// ===== brute force ==========================================================

double cycle_brute(const Matrix& x, int k, double budget) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  if (n < 1 || p < 1) throw std::invalid_argument("cycle_brute: empty matrix");
  if (k < 1) throw std::invalid_argument("cycle_brute: k must be >= 1");
  const double products = std::pow(static_cast<double>(n), k) *
                          std::pow(static_cast<double>(p), k);
  if (products > budget)
    throw std::domain_error("cycle_brute: n^k p^k exceeds the budget");
  if (k > n || k > p) return 0.0;  // no distinct tuples exist

  std::vector<int> is(k), js(k);
  std::vector<char> i_used(n, 0), j_used(p, 0);
  double sum = 0.0, comp = 0.0;  // Kahan
  const auto add = [&](double term) {
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  };
  const auto fill_j = [&](auto&& self, int t) -> void {
    if (t == k) {
      double prod = 1.0;
      for (int s = 0; s < k; ++s)
        prod *= x(is[s], js[s]) * x(is[(s + 1) % k], js[s]);
      add(prod);
      return;
    }
    for (int j = 0; j < p; ++j) {
      if (j_used[j]) continue;
      j_used[j] = 1;
      js[t] = j;
      self(self, t + 1);
      j_used[j] = 0;
    }
  };
  const auto fill_i = [&](auto&& self, int t) -> void {
    if (t == k) {
      fill_j(fill_j, 0);
      return;
    }
    for (int i = 0; i < n; ++i) {
      if (i_used[i]) continue;
      i_used[i] = 1;
      is[t] = i;
      self(self, t + 1);
      i_used[i] = 0;
    }
  };
  fill_i(fill_i, 0);
  return sum / std::pow(static_cast<double>(n), k);
}

// ===== collapsed-pattern contraction ========================================

namespace {

struct Factor {
  int a = 0, b = 0;                 // vertex ids, a < b
  std::shared_ptr<const Matrix> m;  // dim(a) x dim(b)
};

struct Net {
  std::vector<int> dim;
  std::vector<char> alive;
  std::vector<Vector> weight;  // size 0 = no weight yet
  std::vector<Factor> factors;
  double scale = 1.0;
};

void push_weight(Net& net, int w, const Vector& vec) {
  if (net.weight[w].size() == 0)
    net.weight[w] = vec;
  else
    net.weight[w] = net.weight[w].cwiseProduct(vec);
}

void add_factor(Net& net, int a, int b, Matrix m) {
  if (a > b) {
    std::swap(a, b);
    m = m.transpose().eval();
  }
  for (auto& f : net.factors) {
    if (f.a == a && f.b == b) {
      f.m = std::make_shared<Matrix>(f.m->cwiseProduct(m));
      return;
    }
  }
  net.factors.push_back(Factor{a, b, std::make_shared<Matrix>(std::move(m))});
}

// All parallel factors between v and w, Hadamard-merged, rows indexed
// by v.
Matrix merged_factor(const Net& net, int v, int w) {
  Matrix acc;
  bool first = true;
  for (const auto& f : net.factors) {
    if (!((f.a == v && f.b == w) || (f.a == w && f.b == v))) continue;
    Matrix piece = (f.a == v) ? *f.m : Matrix(f.m->transpose());
    if (first) {
      acc = std::move(piece);
      first = false;
    } else {
      acc = acc.cwiseProduct(piece);
    }
  }
  return acc;
}

void drop_vertex(Net& net, int v) {
  net.alive[v] = 0;
  net.weight[v].resize(0);
  std::erase_if(net.factors,
                [v](const Factor& f) { return f.a == v || f.b == v; });
}

double contract(Net net) {
  for (;;) {
    // Distinct alive neighbours per vertex.
    const int nv = static_cast<int>(net.dim.size());
    std::vector<std::set<int>> nbr(nv);
    for (const auto& f : net.factors) {
      nbr[f.a].insert(f.b);
      nbr[f.b].insert(f.a);
    }
    int best = -1, best_deg = 0;
    double best_cost = 0.0;
    for (int v = 0; v < nv; ++v) {
      if (!net.alive[v]) continue;
      const int deg = static_cast<int>(nbr[v].size());
      double cost = static_cast<double>(net.dim[v]);
      for (int w : nbr[v]) cost *= static_cast<double>(net.dim[w]);
      if (best < 0 || deg < best_deg ||
          (deg == best_deg && cost < best_cost)) {
        best = v;
        best_deg = deg;
        best_cost = cost;
      }
    }
    if (best < 0) return net.scale;

    if (best_deg >= 3) {
      // No cheap elimination left: sum explicitly over the smallest
      // remaining index. Each slice reduces to a smaller network.
      int sv = -1;
      for (int v = 0; v < nv; ++v)
        if (net.alive[v] && (sv < 0 || net.dim[v] < net.dim[sv])) sv = v;
      // Incident factors, oriented so the slice picks a row.
      std::vector<std::pair<int, std::shared_ptr<const Matrix>>> rows, cols;
      for (const auto& f : net.factors) {
        if (f.a == sv) rows.emplace_back(f.b, f.m);
        else if (f.b == sv) cols.emplace_back(f.a, f.m);
      }
      Vector sweight = net.weight[sv];
      Net base = net;
      drop_vertex(base, sv);
      std::vector<double> slice(net.dim[sv]);
      for (int s = 0; s < net.dim[sv]; ++s) {
        Net piece = base;
        for (const auto& [w, m] : rows)
          push_weight(piece, w, m->row(s).transpose());
        for (const auto& [w, m] : cols) push_weight(piece, w, m->col(s));
        if (sweight.size() != 0) piece.scale *= sweight(s);
        slice[s] = contract(std::move(piece));
      }
      return pairwise_sum(slice);
    }

    const int v = best;
    if (best_deg == 0) {
      net.scale *= net.weight[v].size() != 0
                       ? net.weight[v].sum()
                       : static_cast<double>(net.dim[v]);
      drop_vertex(net, v);
      continue;
    }
    if (best_deg == 1) {
      const int w = *nbr[v].begin();
      const Matrix f = merged_factor(net, v, w);
      const Vector vec = net.weight[v].size() != 0
                             ? Vector(f.transpose() * net.weight[v])
                             : Vector(f.colwise().sum().transpose());
      drop_vertex(net, v);
      push_weight(net, w, vec);
      continue;
    }
    // best_deg == 2
    auto it = nbr[v].begin();
    const int w1 = *it++;
    const int w2 = *it;
    const Matrix f1 = merged_factor(net, v, w1);
    const Matrix f2 = merged_factor(net, v, w2);
    Matrix joined;
    if (net.weight[v].size() != 0)
      joined = f1.transpose() * net.weight[v].asDiagonal() * f2;
    else
      joined = f1.transpose() * f2;
    drop_vertex(net, v);
    add_factor(net, w1, w2, std::move(joined));
  }
}

// Canonical form of a collapsed pattern: the visit sequence
// (bi0, bj0, bi1, bj1, ...) minimized over the k rotations and the
// reflection of the cycle, blocks relabeled by first occurrence on
// each side. Patterns with equal keys describe the same network.
std::vector<int> canonical_pattern(const std::vector<int>& bi,
                                   const std::vector<int>& bj) {
  const int k = static_cast<int>(bi.size());
  std::vector<int> best;
  std::vector<int> cand(2 * k), ri(k, -1), rj(k, -1);
  for (int dir = 0; dir < 2; ++dir) {
    for (int r = 0; r < k; ++r) {
      std::fill(ri.begin(), ri.end(), -1);
      std::fill(rj.begin(), rj.end(), -1);
      int next_i = 0, next_j = 0;
      for (int t = 0; t < k; ++t) {
        int raw_i, raw_j;
        if (dir == 0) {
          raw_i = bi[(t + r) % k];
          raw_j = bj[(t + r) % k];
        } else {
          raw_i = bi[((k - t) % k + r) % k];
          raw_j = bj[((k - 1 - t) % k + r) % k];
        }
        if (ri[raw_i] < 0) ri[raw_i] = next_i++;
        if (rj[raw_j] < 0) rj[raw_j] = next_j++;
        cand[2 * t] = ri[raw_i];
        cand[2 * t + 1] = rj[raw_j];
      }
      if (best.empty() || cand < best) best = cand;
    }
  }
  return best;
}

// Shared scratch for one matrix: entrywise powers of X and memoized
// pattern values.
struct Workspace {
  const Matrix* x = nullptr;
  int n = 0, p = 0;
  std::map<int, std::shared_ptr<const Matrix>> powers;
  std::map<std::vector<int>, double> memo;
  std::mutex memo_mutex;

  std::shared_ptr<const Matrix> power(int m) {
    auto it = powers.find(m);
    if (it != powers.end()) return it->second;
    std::shared_ptr<const Matrix> result;
    if (m == 1) {
      result = std::make_shared<Matrix>(*x);
    } else {
      result = std::make_shared<Matrix>(
          x->array().pow(static_cast<double>(m)).matrix());
    }
    powers.emplace(m, result);
    return result;
  }
};

// Unconstrained collapsed sum for the canonical pattern key.
double pattern_value(Workspace& ws, const std::vector<int>& key) {
  {
    std::lock_guard<std::mutex> lock(ws.memo_mutex);
    auto it = ws.memo.find(key);
    if (it != ws.memo.end()) return it->second;
  }
  const int k = static_cast<int>(key.size()) / 2;
  int blocks_i = 0, blocks_j = 0;
  for (int t = 0; t < k; ++t) {
    blocks_i = std::max(blocks_i, key[2 * t] + 1);
    blocks_j = std::max(blocks_j, key[2 * t + 1] + 1);
  }
  // Vertices: I blocks then J blocks; initial factors always run
  // I-side x J-side, matching X's orientation.
  Net net;
  const int nv = blocks_i + blocks_j;
  net.dim.resize(nv);
  net.alive.assign(nv, 1);
  net.weight.resize(nv);
  for (int v = 0; v < blocks_i; ++v) net.dim[v] = ws.n;
  for (int v = blocks_i; v < nv; ++v) net.dim[v] = ws.p;
  std::map<std::pair<int, int>, int> multiplicity;
  for (int t = 0; t < k; ++t) {
    const int jv = blocks_i + key[2 * t + 1];
    ++multiplicity[{key[2 * t], jv}];
    ++multiplicity[{key[2 * ((t + 1) % k)], jv}];
  }
  for (const auto& [edge, mult] : multiplicity)
    net.factors.push_back(Factor{edge.first, edge.second, ws.power(mult)});
  const double value = contract(std::move(net));
  {
    std::lock_guard<std::mutex> lock(ws.memo_mutex);
    ws.memo.emplace(key, value);
  }
  return value;
}

double cycle_fast_with(Workspace& ws, int k, const CycleOptions& opts) {
  if (k < 1) throw std::invalid_argument("cycle_fast: k must be >= 1");
  if (k > opts.k_max)
    throw std::domain_error("cycle_fast: k exceeds k_max");
  const PartitionPlan plan = enumerate_partitions(k);
  const std::size_t count = plan.partitions.size();

  // Touch every entrywise power on one thread before the parallel part:
  // the power map is read-only afterwards.
  for (const auto& pi : plan.partitions)
    for (const auto& pj : plan.partitions) {
      std::map<std::pair<int, int>, int> multiplicity;
      for (int t = 0; t < k; ++t) {
        ++multiplicity[{pi.block_of[t], pj.block_of[t]}];
        ++multiplicity[{pi.block_of[(t + 1) % k], pj.block_of[t]}];
      }
      for (const auto& [edge, mult] : multiplicity) ws.power(mult);
    }

  std::vector<double> terms(count * count);
  parallel_for(count * count, opts.threads, [&](std::size_t idx) {
    const Partition& pi = plan.partitions[idx / count];
    const Partition& pj = plan.partitions[idx % count];
    const std::vector<int> key =
        canonical_pattern(pi.block_of, pj.block_of);
    terms[idx] = pi.mobius * pj.mobius * pattern_value(ws, key);
  });
  return pairwise_sum(terms) / std::pow(static_cast<double>(ws.n), k);
}

}  // namespace

double cycle_fast(const Matrix& x, int k, const CycleOptions& opts) {
  if (x.rows() < 1 || x.cols() < 1)
    throw std::invalid_argument("cycle_fast: empty matrix");
  Workspace ws;
  ws.x = &x;
  ws.n = static_cast<int>(x.rows());
  ws.p = static_cast<int>(x.cols());
  return cycle_fast_with(ws, k, opts);
}

CycleStats cycle_vector(const Matrix& x, int m, const CycleOptions& opts) {
  if (x.rows() < 1 || x.cols() < 1)
    throw std::invalid_argument("cycle_vector: empty matrix");
  if (m < 1) throw std::invalid_argument("cycle_vector: m must be >= 1");
  Workspace ws;
  ws.x = &x;
  ws.n = static_cast<int>(x.rows());
  ws.p = static_cast<int>(x.cols());
  CycleStats stats;
  stats.n = ws.n;
  stats.p = ws.p;
  stats.gamma_hat = static_cast<double>(ws.p) / ws.n;
  stats.b.reserve(m);
  for (int k = 1; k <= m; ++k) stats.b.push_back(cycle_fast_with(ws, k, opts));
  return stats;
}

}  // namespace spikecycle
