#include "mlpr/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <random>
#include <sstream>

#include "mlpr/errors.hpp"

namespace mlpr {

bool Adjacency::has_edge(std::size_t i, std::size_t j) const {
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(i, j));
}

void Adjacency::normalize() {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

Adjacency read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty Matrix Market file", 0);
  ++lineno;
  std::istringstream hs(line);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw ParseError("missing %%MatrixMarket banner", lineno);
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw ParseError("unsupported object '" + object + "'", lineno);
  if (format != "coordinate") throw ParseError("only coordinate format is supported", lineno);
  const bool pattern = field == "pattern";
  if (!pattern && field != "real" && field != "integer")
    throw ParseError("unsupported field '" + field + "'", lineno);
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") throw ParseError("unsupported symmetry '" + symmetry + "'", lineno);

  std::size_t rows = 0, cols = 0, nnz = 0;
  bool have_size = false;
  Adjacency a;
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line) || line[0] == '%') continue;
    std::istringstream ls(line);
    if (!have_size) {
      if (!(ls >> rows >> cols >> nnz)) throw ParseError("malformed size line", lineno);
      if (rows != cols) throw ParseError("adjacency matrix must be square", lineno);
      a.n = rows;
      have_size = true;
      continue;
    }
    long long i = 0, j = 0;
    double value = 1.0;
    if (!(ls >> i >> j)) throw ParseError("malformed entry", lineno);
    if (!pattern && !(ls >> value)) throw ParseError("missing value", lineno);
    std::string extra;
    if (ls >> extra) throw ParseError("trailing data in entry", lineno);
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > rows || static_cast<std::size_t>(j) > cols)
      throw ParseError("index out of range", lineno);
    if (!std::isfinite(value)) throw ParseError("non-finite value", lineno);
    ++seen;
    if (seen > nnz) throw ParseError("more entries than declared", lineno);
    if (value == 0.0) continue;
    const auto r = static_cast<std::size_t>(i - 1), c = static_cast<std::size_t>(j - 1);
    a.edges.emplace_back(r, c);
    if (symmetric && r != c) a.edges.emplace_back(c, r);
  }
  if (!have_size) throw ParseError("missing size line", lineno);
  if (seen != nnz) throw ParseError("expected " + std::to_string(nnz) + " entries, found " + std::to_string(seen), lineno);
  a.normalize();
  return a;
}

Adjacency read_matrix_market_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  return read_matrix_market(f);
}

Tensor3 three_cycle_tensor(const Adjacency& a) {
  const std::size_t n = a.n;
  std::vector<std::vector<std::size_t>> out(n);
  for (const auto& [i, j] : a.edges) out[i].push_back(j);
  std::vector<TensorEntry> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : out[i]) {
      if (j == i) continue;
      for (std::size_t k : out[j])
        if (k != i && k != j && a.has_edge(k, i)) e.push_back({i, j, k, 1.0});
    }
  return Tensor3::from_entries(n, std::move(e));
}

Tensor3 column_normalize_substochastic(const Tensor3& c) {
  const std::size_t n = c.dim();
  const Vec sums = unfolding_column_sums(c);
  std::vector<TensorEntry> e;
  e.reserve(c.nnz());
  for (const auto& t : c.entries()) e.push_back({t.i, t.j, t.k, t.value / sums[c.column_index(t.j, t.k)]});
  return Tensor3::from_entries(n, std::move(e));
}

Tensor3 build_pagerank_tensor(const Adjacency& a, std::span<const double> v, double nu) {
  const std::size_t n = a.n;
  if (v.size() != n) throw DimensionError("build_pagerank_tensor: v has wrong length");
  if (!(nu >= 0.0 && nu <= 1.0)) throw DomainError("nu must lie in [0, 1]");
  double vs = 0.0;
  for (double x : v) {
    if (!(x >= 0.0)) throw DomainError("v must be nonnegative");
    vs += x;
  }
  if (std::fabs(vs - 1.0) > 1e-13) throw DomainError("v must sum to 1");

  // M' = M + v dangling(M), M = A^T D^+.
  std::vector<std::size_t> outdeg(n, 0);
  for (const auto& [i, j] : a.edges) ++outdeg[i];
  DenseMatrix mp(n, n);
  for (const auto& [i, j] : a.edges) mp(j, i) = 1.0 / static_cast<double>(outdeg[i]);
  for (std::size_t j = 0; j < n; ++j)
    if (outdeg[j] == 0)
      for (std::size_t i = 0; i < n; ++i) mp(i, j) = v[i];

  const Tensor3 s = column_normalize_substochastic(three_cycle_tensor(a));
  const Vec ssum = unfolding_column_sums(s);

  std::vector<TensorEntry> e;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t col = j + k * n;
      const double dangling = ssum[col] == 0.0 ? 1.0 : 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double sv = s(i, j, k) + v[i] * dangling;
        const double val = nu * sv + (1.0 - nu) * mp(i, k);
        if (val != 0.0) e.push_back({i, j, k, val});
      }
    }
  return Tensor3::from_entries(n, std::move(e));
}

Vec heavy_tailed_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(n);
  double s = 0.0;
  for (auto& x : v) {
    const double r = unif(rng);
    x = r * std::exp(9.0 * gauss(rng));
    s += x;
  }
  if (!(s > 0.0)) throw DomainError("heavy_tailed_vector: degenerate draw");
  for (auto& x : v) x /= s;
  return v;
}

Builtin parse_builtin(std::string_view name) {
  const std::string s = lower(std::string(name));
  if (s == "intro") return Builtin::Intro;
  if (s == "ex1") return Builtin::Ex1;
  if (s == "ex2") return Builtin::Ex2;
  throw DomainError("unknown builtin '" + std::string(name) + "'");
}

std::string_view builtin_name(Builtin b) {
  switch (b) {
    case Builtin::Intro: return "intro";
    case Builtin::Ex1: return "ex1";
    case Builtin::Ex2: return "ex2";
  }
  return "?";
}

Vec snap_stochastic(std::span<const double> v) {
  if (v.empty()) return {};
  const std::size_t top = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  const double q = std::ldexp(1.0, -53);
  Vec out(v.size());
  double rest = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i == top) continue;
    out[i] = std::nearbyint(v[i] / q) * q;
    rest += out[i];
  }
  out[top] = 1.0 - rest;
  return out;
}

namespace {

Tensor3 from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  DenseMatrix u(n, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < n * n; ++c) u(i, c) = rows[i][c];
  return Tensor3::from_unfolding(u);
}

Vec normalized(Vec v) {
  double s = 0.0;
  for (double x : v) s += x;
  for (auto& x : v) x /= s;
  return v;
}

}  // namespace

BuiltinData builtin_data(Builtin b, double delta) {
  BuiltinData d;
  switch (b) {
    case Builtin::Intro:
      if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
      d.P = from_rows({{1, 0.5, 0.5, 0}, {0, 0.5, 0.5, 1}});
      d.v_raw = {1.0 - delta, delta};
      break;
    case Builtin::Ex1:
      d.P = from_rows({{0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 0.5, 0, 1},
                       {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0.5, 1, 0, 0, 0},
                       {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0.5, 0, 0, 0, 0},
                       {1, 1, 1, 1, 1, 1, 0, 1, 1, 0, 0, 0, 0, 0.5, 1, 0}});
      d.v_raw = {1.5462e-2, 1.4317e-12, 3.5898e-7, 9.8454e-1};
      break;
    case Builtin::Ex2:
      d.P = from_rows({{0, 0, 0, 0, 0, 0, 0.5, 0, 1, 0, 0, 0, 0, 0, 0, 0},
                       {0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0.5, 0, 0, 0},
                       {0, 0, 0, 0, 0, 0, 0.5, 0, 0, 0, 1, 0, 0.5, 0.5, 1, 0},
                       {1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 1, 0, 0.5, 0, 1}});
      d.v_raw = {1e-4, 0, 0, 9.999e-4};
      break;
  }
  if (b == Builtin::Ex2) {
    // The last entry is read as 0.9999; the printed 9.999e-4 does not sum to 1.
    d.v = snap_stochastic(Vec{1e-4, 0, 0, 0.9999});
  } else {
    d.v = snap_stochastic(normalized(d.v_raw));
  }
  return d;
}

Problem builtin(Builtin b, double alpha, double delta, std::optional<double> one_minus_two_alpha) {
  BuiltinData d = builtin_data(b, delta);
  return Problem::pagerank(std::move(d.v), std::move(d.P), alpha, one_minus_two_alpha);
}

}  // namespace mlpr
