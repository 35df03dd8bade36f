// Exhaustive enumeration of rooted spanning forests on nodes {0, 1, ..., n}.
// Every forest is encoded by a parent map on 1..n; a map is kept when it is
// acyclic and its roots are the allowed ones. Cost is n^n, hence n <= 6.

#include <algorithm>
#include <string>

#include "mlpr/mmatrix.hpp"

namespace mlpr {

namespace {

constexpr std::size_t kMaxNodes = 6;
constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

std::size_t check_weights(const TreeWeights& w) {
  if (w.size() < 2) throw DimensionError("tree oracle: need at least one node");
  const std::size_t n = w.size() - 1;
  if (n > kMaxNodes) throw DimensionError("tree oracle: enumeration limited to n <= 6");
  for (const auto& r : w)
    if (r.size() != n + 1) throw DimensionError("tree oracle: weights must be (n+1) x (n+1)");
  return n;
}

// Root reached from node i by following parents; kNoParent on a cycle.
std::size_t root_of(const std::vector<std::size_t>& parent, std::size_t i, std::size_t n) {
  std::size_t steps = 0;
  while (parent[i] != kNoParent && i != 0) {
    i = parent[i];
    if (++steps > n) return kNoParent;
  }
  return i;
}

bool reaches(const std::vector<std::size_t>& parent, std::size_t from, std::size_t target, std::size_t n) {
  std::size_t steps = 0;
  while (from != target) {
    if (from == 0 || parent[from] == kNoParent) return false;
    from = parent[from];
    if (++steps > n) return false;
  }
  return true;
}

// Calls fn(parent) for every parent map where nodes in `free` choose parents
// and the remaining nodes 1..n are roots.
template <class Fn>
void for_each_map(std::size_t n, std::size_t root_l, Fn fn) {
  std::vector<std::size_t> parent(n + 1, kNoParent);
  std::vector<std::size_t> nodes;
  for (std::size_t i = 1; i <= n; ++i)
    if (i != root_l) nodes.push_back(i);
  // Odometer over choices; node i picks from {0..n} \ {i}.
  std::vector<std::size_t> choice(nodes.size(), 0);
  auto apply = [&] {
    for (std::size_t t = 0; t < nodes.size(); ++t) {
      const std::size_t i = nodes[t];
      parent[i] = choice[t] < i ? choice[t] : choice[t] + 1;
    }
  };
  while (true) {
    apply();
    fn(parent);
    std::size_t t = 0;
    while (t < nodes.size()) {
      if (++choice[t] < n) break;
      choice[t] = 0;
      ++t;
    }
    if (t == nodes.size()) break;
  }
}

double weight_of(const TreeWeights& w, const std::vector<std::size_t>& parent, std::size_t n) {
  double p = 1.0;
  for (std::size_t i = 1; i <= n; ++i)
    if (parent[i] != kNoParent) p *= w[i][parent[i]];
  return p;
}

// Forests with roots {0, l} (l = 1-based; 0 means a single tree at 0).
// `need_k`: k must lie in l's tree. `trivial0`: nobody attaches to 0.
std::vector<TreeMonomial> forests(const TreeWeights& w, std::size_t l, std::size_t k, bool trivial0,
                                  bool nontrivial0) {
  const std::size_t n = w.size() - 1;
  std::vector<TreeMonomial> out;
  for_each_map(n, l, [&](const std::vector<std::size_t>& parent) {
    bool any_at0 = false;
    for (std::size_t i = 1; i <= n; ++i) {
      if (i == l) continue;
      const std::size_t r = root_of(parent, i, n);
      if (r == kNoParent) return;
      if (r != 0 && r != l) return;
      if (r == 0) any_at0 = true;
    }
    if (l != 0 && !reaches(parent, k, l, n)) return;
    if (trivial0 && any_at0) return;
    if (nontrivial0 && !any_at0) return;
    TreeMonomial m;
    m.parent = parent;
    for (auto& p : m.parent)
      if (p == kNoParent) p = 0;
    m.parent[0] = 0;
    if (l != 0) m.parent[l] = kNoParent;
    m.weight = weight_of(w, parent, n);
    out.push_back(std::move(m));
  });
  return out;
}

double total(const std::vector<TreeMonomial>& ms) {
  double s = 0.0;
  for (const auto& m : ms) s += m.weight;
  return s;
}

}  // namespace

std::vector<TreeMonomial> tree_det_monomials(const TreeWeights& w) {
  check_weights(w);
  return forests(w, 0, 0, false, false);
}

std::vector<TreeMonomial> tree_adj_monomials(const TreeWeights& w, std::size_t k, std::size_t l) {
  const std::size_t n = check_weights(w);
  if (k >= n || l >= n) throw DimensionError("tree oracle: index out of range");
  return forests(w, l + 1, k + 1, false, false);
}

double tree_oracle_det(const TreeWeights& w) { return total(tree_det_monomials(w)); }

DenseMatrix tree_oracle_adj(const TreeWeights& w) {
  const std::size_t n = check_weights(w);
  DenseMatrix a(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) a(k, l) = total(forests(w, l + 1, k + 1, false, false));
  return a;
}

PartialInverse tree_oracle_RS(const TreeWeights& w) {
  const std::size_t n = check_weights(w);
  const double det = tree_oracle_det(w);
  if (det == 0.0) throw SingularError("tree oracle: determinant is zero");
  PartialInverse pi;
  pi.z.assign(n, 0.0);
  pi.S = DenseMatrix(n, n);
  pi.inverse = DenseMatrix(n, n);
  for (std::size_t l = 0; l < n; ++l) {
    // Trivial T0 forces every node into l's tree, independent of k.
    pi.z[l] = total(forests(w, l + 1, 1, true, false)) / det;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = total(forests(w, l + 1, k + 1, false, true));
      pi.S(k, l) = s / det;
      pi.inverse(k, l) = pi.z[l] + pi.S(k, l);
    }
  }
  return pi;
}

std::string monomial_string(const TreeMonomial& m) {
  std::string s;
  for (std::size_t i = 1; i < m.parent.size(); ++i) {
    if (m.parent[i] == kNoParent) continue;
    if (!s.empty()) s += '*';
    s += 'w' + std::to_string(i) + std::to_string(m.parent[i]);
  }
  return s;
}

TripletMMatrix triplet_from_weights(const TreeWeights& w) {
  const std::size_t n = check_weights(w);
  TripletMMatrix t;
  t.offdiag = DenseMatrix(n, n);
  t.sums.assign(n, 0.0);
  t.orientation = Orientation::Row;
  for (std::size_t i = 1; i <= n; ++i) {
    t.sums[i - 1] = w[i][0];
    for (std::size_t j = 1; j <= n; ++j)
      if (i != j) t.offdiag(i - 1, j - 1) = w[i][j];
  }
  return t;
}

}  // namespace mlpr
