#include "mlpr/tensor.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "mlpr/errors.hpp"
#include "mlpr/kernels.hpp"

namespace mlpr {

namespace {

bool entry_less(const TensorEntry& a, const TensorEntry& b, std::size_t n) {
  if (a.i != b.i) return a.i < b.i;
  return a.j + a.k * n < b.j + b.k * n;
}

void require_dim(const Tensor3& b, std::size_t m, const char* what) {
  if (b.dim() != m) throw DimensionError(std::string(what) + ": dimension mismatch");
}

}  // namespace

Tensor3::Tensor3(std::size_t n) : n_(n) { build_index(); }

Tensor3 Tensor3::from_entries(std::size_t n, std::vector<TensorEntry> entries) {
  if (n == 0) throw DimensionError("tensor dimension must be positive");
  for (const auto& e : entries) {
    if (e.i >= n || e.j >= n || e.k >= n) throw DimensionError("tensor entry index out of range");
    if (!(e.value >= 0.0) || !std::isfinite(e.value))
      throw DomainError("tensor entries must be finite and nonnegative");
  }
  std::sort(entries.begin(), entries.end(),
            [n](const TensorEntry& a, const TensorEntry& b) { return entry_less(a, b, n); });
  for (std::size_t p = 1; p < entries.size(); ++p) {
    const auto& a = entries[p - 1];
    const auto& b = entries[p];
    if (a.i == b.i && a.j == b.j && a.k == b.k) {
      throw DomainError("duplicate tensor entry (" + std::to_string(a.i + 1) + "," +
                        std::to_string(a.j + 1) + "," + std::to_string(a.k + 1) + ")");
    }
  }
  // Explicit zeros carry no information and would break exact round trips.
  std::erase_if(entries, [](const TensorEntry& e) { return e.value == 0.0; });
  Tensor3 t;
  t.n_ = n;
  t.entries_ = std::move(entries);
  t.build_index();
  return t;
}

Tensor3 Tensor3::from_unfolding(const DenseMatrix& u) {
  const std::size_t n = u.rows();
  if (n == 0 || u.cols() != n * n) throw DimensionError("unfolding must be n x n^2");
  std::vector<TensorEntry> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < n * n; ++c)
      if (u(i, c) != 0.0) e.push_back({i, c % n, c / n, u(i, c)});
  return from_entries(n, std::move(e));
}

void Tensor3::build_index() {
  row_ptr_.assign(n_ + 1, 0);
  for (const auto& e : entries_) ++row_ptr_[e.i + 1];
  for (std::size_t i = 0; i < n_; ++i) row_ptr_[i + 1] += row_ptr_[i];
  dense_.clear();
  if (n_ > 0 && n_ <= kDenseLimit) {
    dense_.assign(n_ * n_ * n_, 0.0);
    for (const auto& e : entries_) dense_[column_index(e.j, e.k) * n_ + e.i] = e.value;
  }
}

std::span<const TensorEntry> Tensor3::row(std::size_t i) const {
  if (i >= n_) throw DimensionError("tensor row out of range");
  return std::span<const TensorEntry>(entries_).subspan(row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
}

double Tensor3::operator()(std::size_t i, std::size_t j, std::size_t k) const {
  if (i >= n_ || j >= n_ || k >= n_) throw DimensionError("tensor index out of range");
  if (has_dense()) return dense_[column_index(j, k) * n_ + i];
  const auto r = row(i);
  const std::size_t c = column_index(j, k);
  auto it = std::lower_bound(r.begin(), r.end(), c, [this](const TensorEntry& e, std::size_t col) {
    return column_index(e.j, e.k) < col;
  });
  if (it != r.end() && column_index(it->j, it->k) == c) return it->value;
  return 0.0;
}

DenseMatrix Tensor3::unfolding() const {
  DenseMatrix u(n_, n_ * n_);
  for (const auto& e : entries_) u(e.i, column_index(e.j, e.k)) = e.value;
  return u;
}

Tensor3 Tensor3::scaled(double s) const {
  if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("tensor scale must be finite and nonnegative");
  std::vector<TensorEntry> e = entries_;
  for (auto& x : e) x.value *= s;
  std::erase_if(e, [](const TensorEntry& x) { return x.value == 0.0; });
  Tensor3 t;
  t.n_ = n_;
  t.entries_ = std::move(e);
  t.build_index();
  return t;
}

bool operator==(const Tensor3& a, const Tensor3& b) {
  if (a.n_ != b.n_ || a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t p = 0; p < a.entries_.size(); ++p) {
    const auto& x = a.entries_[p];
    const auto& y = b.entries_[p];
    if (x.i != y.i || x.j != y.j || x.k != y.k || x.value != y.value) return false;
  }
  return true;
}

// Both paths add b_ijk * (x_j * y_k) into y_i in ascending unfolding-column
// order, so they agree bit for bit.
Vec apply_bilinear(const Tensor3& b, std::span<const double> x, std::span<const double> y) {
  const std::size_t n = b.dim();
  if (x.size() != n || y.size() != n) throw DimensionError("apply_bilinear: dimension mismatch");
  Vec out(n, 0.0);
  if (b.nnz() == 0) return out;
  if (b.has_dense()) {
    const auto& kt = kernels::active();
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        const double w = x[j] * y[k];
        if (w == 0.0) continue;
        kt.axpy(out.data(), b.dense_column(b.column_index(j, k)), w, n);
      }
    }
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto& e : b.row(i)) {
      const double t = e.value * (x[e.j] * y[e.k]);
      s = s + t;
    }
    out[i] = s;
  }
  return out;
}

Vec apply_quadratic(const Tensor3& b, std::span<const double> x) {
  if (x.size() != b.dim()) throw DimensionError("apply_quadratic: dimension mismatch");
  return apply_bilinear(b, x, x);
}

DenseMatrix contract_left(const Tensor3& b, std::span<const double> x) {
  require_dim(b, x.size(), "contract_left");
  const std::size_t n = b.dim();
  DenseMatrix m(n, n);
  for (const auto& e : b.entries()) m(e.i, e.k) += e.value * x[e.j];
  return m;
}

DenseMatrix contract_right(const Tensor3& b, std::span<const double> x) {
  require_dim(b, x.size(), "contract_right");
  const std::size_t n = b.dim();
  DenseMatrix m(n, n);
  for (const auto& e : b.entries()) m(e.i, e.j) += e.value * x[e.k];
  return m;
}

DenseMatrix jacobian_complement(const Tensor3& b, std::span<const double> x) {
  const std::size_t n = b.dim();
  DenseMatrix c = contract_left(b, x);
  const DenseMatrix r = contract_right(b, x);
  DenseMatrix out = DenseMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) -= c(i, j) + r(i, j);
  return out;
}

Vec unfolding_column_sums(const Tensor3& b) {
  const std::size_t n = b.dim();
  Vec s(n * n, 0.0);
  for (const auto& e : b.entries()) s[b.column_index(e.j, e.k)] += e.value;
  return s;
}

StochasticityReport check_stochastic(const Tensor3& b, double target, double tol) {
  if (!(tol >= 0.0)) throw DomainError("check_stochastic: tol must be nonnegative");
  StochasticityReport rep;
  const std::size_t n = b.dim();
  const Vec s = unfolding_column_sums(b);
  for (std::size_t c = 0; c < s.size(); ++c) {
    const double d = std::fabs(s[c] - target);
    if (d > rep.max_deviation || std::isnan(d)) {
      rep.max_deviation = d;
      rep.worst_j = c % n;
      rep.worst_k = c / n;
    }
  }
  rep.ok = rep.max_deviation <= tol;
  return rep;
}

namespace {

bool skip_line(const std::string& s) {
  const auto p = s.find_first_not_of(" \t\r");
  return p == std::string::npos || s[p] == '#' || s[p] == '%';
}

double parse_double(const std::string& tok, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') throw ParseError("bad number '" + tok + "'", line);
  if (!std::isfinite(v)) throw ParseError("non-finite value '" + tok + "'", line);
  return v;
}

std::size_t parse_index(const std::string& tok, std::size_t line) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    throw ParseError("bad index '" + tok + "'", line);
  return std::stoull(tok);
}

}  // namespace

Tensor3 read_tensor(std::istream& in) {
  std::string s;
  std::size_t line = 0;
  std::size_t n = 0, nnz = 0;
  bool header = false;
  std::vector<TensorEntry> entries;
  while (std::getline(in, s)) {
    ++line;
    if (skip_line(s)) continue;
    std::istringstream ls(s);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (!header) {
      if (tok.size() != 2) throw ParseError("expected header 'n nnz'", line);
      n = parse_index(tok[0], line);
      nnz = parse_index(tok[1], line);
      if (n == 0) throw ParseError("dimension must be positive", line);
      header = true;
      entries.reserve(nnz);
      continue;
    }
    if (tok.size() != 4) throw ParseError("expected 'i j k value'", line);
    const std::size_t i = parse_index(tok[0], line);
    const std::size_t j = parse_index(tok[1], line);
    const std::size_t k = parse_index(tok[2], line);
    if (i < 1 || i > n || j < 1 || j > n || k < 1 || k > n)
      throw ParseError("index out of range", line);
    const double v = parse_double(tok[3], line);
    if (v < 0.0 || std::signbit(v)) throw ParseError("negative tensor entry", line);
    if (entries.size() == nnz) throw ParseError("more entries than declared", line);
    entries.push_back({i - 1, j - 1, k - 1, v});
  }
  if (!header) throw ParseError("missing header", line);
  if (entries.size() != nnz)
    throw ParseError("expected " + std::to_string(nnz) + " entries, found " + std::to_string(entries.size()), line);
  try {
    return Tensor3::from_entries(n, std::move(entries));
  } catch (const DomainError& e) {
    throw ParseError(e.what(), line);
  }
}

Tensor3 read_tensor_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  return read_tensor(f);
}

void write_tensor(std::ostream& out, const Tensor3& b) {
  out << b.dim() << ' ' << b.nnz() << '\n';
  char buf[64];
  for (const auto& e : b.entries()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.value);
    out << e.i + 1 << ' ' << e.j + 1 << ' ' << e.k + 1 << ' ' << buf << '\n';
  }
}

void write_tensor_file(const std::string& path, const Tensor3& b) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  write_tensor(f, b);
  if (!f) throw Error("write failed: " + path);
}

Vec read_vector(std::istream& in) {
  std::string s;
  std::size_t line = 0;
  Vec v;
  while (std::getline(in, s)) {
    ++line;
    if (skip_line(s)) continue;
    std::istringstream ls(s);
    for (std::string t; ls >> t;) v.push_back(parse_double(t, line));
  }
  if (v.empty()) throw ParseError("empty vector", line);
  // A leading integer equal to the remaining count is treated as a length prefix.
  if (v.size() > 1 && v[0] == static_cast<double>(v.size() - 1) && std::floor(v[0]) == v[0] && v[0] > 1.0)
    v.erase(v.begin());
  return v;
}

Vec read_vector_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  return read_vector(f);
}

}  // namespace mlpr
