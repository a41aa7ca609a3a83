#pragma once

// Bit-packed linear algebra over GF(2). Matrices store rows in 64-bit words;
// row XOR is the hot operation for elimination and multiplication. State
// vectors are column vectors, matrices act on the left, so a circuit applied
// left-to-right composes matrices right-to-left.

#include <cstdint>
#include <string>
#include <vector>

#include "hwprep/errors.hpp"

namespace hwprep::gf2 {

namespace detail {
inline int word_count(int bits) { return (bits + 63) / 64; }
}  // namespace detail

class Gf2Vector {
 public:
  Gf2Vector() = default;
  explicit Gf2Vector(int len) : len_(len), words_(detail::word_count(len), 0) {
    hwprep::detail::check(len >= 0, "Gf2Vector length must be non-negative");
  }

  int size() const { return len_; }

  bool get(int i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

  void set(int i, bool value) {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value)
      words_[i >> 6] |= mask;
    else
      words_[i >> 6] &= ~mask;
  }

  void flip(int i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  Gf2Vector& operator^=(const Gf2Vector& other) {
    hwprep::detail::check(len_ == other.len_, "Gf2Vector size mismatch");
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
    return *this;
  }

  bool any() const {
    for (std::uint64_t w : words_)
      if (w) return true;
    return false;
  }

  int popcount() const {
    int total = 0;
    for (std::uint64_t w : words_) total += __builtin_popcountll(w);
    return total;
  }

  friend bool operator==(const Gf2Vector& a, const Gf2Vector& b) {
    return a.len_ == b.len_ && a.words_ == b.words_;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  int len_ = 0;
  std::vector<std::uint64_t> words_;
};

class Gf2Matrix {
 public:
  Gf2Matrix() = default;
  Gf2Matrix(int rows, int cols)
      : rows_(rows), cols_(cols), wpr_(detail::word_count(cols)),
        words_(static_cast<std::size_t>(rows) * wpr_, 0) {
    hwprep::detail::check(rows >= 0 && cols >= 0, "matrix dims must be non-negative");
  }

  static Gf2Matrix identity(int n) {
    Gf2Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, true);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool get(int r, int c) const {
    return (words_[static_cast<std::size_t>(r) * wpr_ + (c >> 6)] >> (c & 63)) & 1u;
  }

  void set(int r, int c, bool value) {
    std::uint64_t& w = words_[static_cast<std::size_t>(r) * wpr_ + (c >> 6)];
    const std::uint64_t mask = std::uint64_t{1} << (c & 63);
    if (value)
      w |= mask;
    else
      w &= ~mask;
  }

  void flip(int r, int c) {
    words_[static_cast<std::size_t>(r) * wpr_ + (c >> 6)] ^= std::uint64_t{1} << (c & 63);
  }

  // row[dst] ^= row[src]
  void row_xor(int dst, int src) {
    std::uint64_t* d = row_ptr(dst);
    const std::uint64_t* s = row_ptr(src);
    for (int w = 0; w < wpr_; ++w) d[w] ^= s[w];
  }

  void swap_rows(int a, int b) {
    if (a == b) return;
    std::uint64_t* pa = row_ptr(a);
    std::uint64_t* pb = row_ptr(b);
    for (int w = 0; w < wpr_; ++w) std::swap(pa[w], pb[w]);
  }

  Gf2Vector row(int r) const {
    Gf2Vector v(cols_);
    for (int c = 0; c < cols_; ++c)
      if (get(r, c)) v.set(c, true);
    return v;
  }

  void set_row(int r, const Gf2Vector& v) {
    hwprep::detail::check(v.size() == cols_, "row length mismatch");
    for (int c = 0; c < cols_; ++c) set(r, c, v.get(c));
  }

  Gf2Vector col(int c) const {
    Gf2Vector v(rows_);
    for (int r = 0; r < rows_; ++r)
      if (get(r, c)) v.set(r, true);
    return v;
  }

  void set_col(int c, const Gf2Vector& v) {
    hwprep::detail::check(v.size() == rows_, "column length mismatch");
    for (int r = 0; r < rows_; ++r) set(r, c, v.get(r));
  }

  Gf2Matrix transpose() const {
    Gf2Matrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c)
        if (get(r, c)) t.set(c, r, true);
    return t;
  }

  bool is_zero() const {
    for (std::uint64_t w : words_)
      if (w) return false;
    return true;
  }

  bool is_identity() const {
    if (rows_ != cols_) return false;
    return *this == identity(rows_);
  }

  friend bool operator==(const Gf2Matrix& a, const Gf2Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.words_ == b.words_;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(static_cast<std::size_t>(rows_) * (cols_ + 1));
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) s.push_back(get(r, c) ? '1' : '0');
      s.push_back('\n');
    }
    return s;
  }

 private:
  std::uint64_t* row_ptr(int r) { return words_.data() + static_cast<std::size_t>(r) * wpr_; }
  const std::uint64_t* row_ptr(int r) const {
    return words_.data() + static_cast<std::size_t>(r) * wpr_;
  }

  friend Gf2Matrix multiply(const Gf2Matrix&, const Gf2Matrix&);
  friend Gf2Vector multiply(const Gf2Matrix&, const Gf2Vector&);

  int rows_ = 0;
  int cols_ = 0;
  int wpr_ = 0;  // words per row
  std::vector<std::uint64_t> words_;
};

inline Gf2Matrix identity(int n) { return Gf2Matrix::identity(n); }

// Product over GF(2) by the method of rows: result row i accumulates the rows
// of b selected by the set bits of a's row i.
inline Gf2Matrix multiply(const Gf2Matrix& a, const Gf2Matrix& b) {
  hwprep::detail::check(a.cols() == b.rows(), "multiply: inner dimensions differ");
  Gf2Matrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    std::uint64_t* dst = c.words_.data() + static_cast<std::size_t>(i) * c.wpr_;
    for (int j = 0; j < a.cols(); ++j) {
      if (!a.get(i, j)) continue;
      const std::uint64_t* src = b.words_.data() + static_cast<std::size_t>(j) * b.wpr_;
      for (int w = 0; w < b.wpr_; ++w) dst[w] ^= src[w];
    }
  }
  return c;
}

inline Gf2Vector multiply(const Gf2Matrix& a, const Gf2Vector& v) {
  hwprep::detail::check(a.cols() == v.size(), "multiply: dimension mismatch");
  Gf2Vector out(a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    const std::uint64_t* row = a.words_.data() + static_cast<std::size_t>(i) * a.wpr_;
    int parity = 0;
    for (int w = 0; w < a.wpr_; ++w) parity ^= __builtin_popcountll(row[w] & v.words()[w]) & 1;
    out.set(i, parity != 0);
  }
  return out;
}

// XOR of two equally-shaped matrices (addition over GF(2)).
inline Gf2Matrix add(const Gf2Matrix& a, const Gf2Matrix& b) {
  hwprep::detail::check(a.rows() == b.rows() && a.cols() == b.cols(),
                        "add: shape mismatch");
  Gf2Matrix c = a;
  for (int r = 0; r < b.rows(); ++r)
    for (int col = 0; col < b.cols(); ++col)
      if (b.get(r, col)) c.flip(r, col);
  return c;
}

inline int rank(Gf2Matrix m) {
  int r = 0;
  for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
    int pivot = -1;
    for (int i = r; i < m.rows(); ++i)
      if (m.get(i, c)) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    m.swap_rows(r, pivot);
    for (int i = 0; i < m.rows(); ++i)
      if (i != r && m.get(i, c)) m.row_xor(i, r);
    ++r;
  }
  return r;
}

// Gauss-Jordan on [m | I]; throws SingularMatrixError when rank < n.
inline Gf2Matrix invert(const Gf2Matrix& m) {
  hwprep::detail::check(m.rows() == m.cols(), "invert: matrix must be square");
  const int n = m.rows();
  Gf2Matrix a = m;
  Gf2Matrix inv = Gf2Matrix::identity(n);
  for (int c = 0; c < n; ++c) {
    int pivot = -1;
    for (int i = c; i < n; ++i)
      if (a.get(i, c)) {
        pivot = i;
        break;
      }
    if (pivot < 0) throw SingularMatrixError("matrix is singular over GF(2)");
    a.swap_rows(c, pivot);
    inv.swap_rows(c, pivot);
    for (int i = 0; i < n; ++i) {
      if (i != c && a.get(i, c)) {
        a.row_xor(i, c);
        inv.row_xor(i, c);
      }
    }
  }
  return inv;
}

// Basis of the right null space {v : m v = 0}.
inline std::vector<Gf2Vector> kernel_basis(const Gf2Matrix& m) {
  const int n = m.cols();
  Gf2Matrix a = m;
  std::vector<int> pivot_col_of_row(a.rows(), -1);
  std::vector<bool> is_pivot_col(n, false);
  int r = 0;
  for (int c = 0; c < n && r < a.rows(); ++c) {
    int pivot = -1;
    for (int i = r; i < a.rows(); ++i)
      if (a.get(i, c)) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    a.swap_rows(r, pivot);
    for (int i = 0; i < a.rows(); ++i)
      if (i != r && a.get(i, c)) a.row_xor(i, r);
    pivot_col_of_row[r] = c;
    is_pivot_col[c] = true;
    ++r;
  }
  std::vector<Gf2Vector> basis;
  for (int c = 0; c < n; ++c) {
    if (is_pivot_col[c]) continue;
    Gf2Vector v(n);
    v.set(c, true);
    for (int i = 0; i < r; ++i)
      if (a.get(i, c)) v.set(pivot_col_of_row[i], true);
    basis.push_back(v);
  }
  return basis;
}

// True iff (m + I)^n = 0 over GF(2); checked by repeated squaring, at most
// ceil(log2 n) + 1 squarings.
inline bool is_unipotent(const Gf2Matrix& m) {
  hwprep::detail::check(m.rows() == m.cols(), "is_unipotent: matrix must be square");
  const int n = m.rows();
  if (n == 0) return true;
  Gf2Matrix nil = add(m, Gf2Matrix::identity(n));
  int covered = 1;
  while (true) {
    if (nil.is_zero()) return true;
    if (covered >= n) return false;
    nil = multiply(nil, nil);
    covered *= 2;
  }
}

}  // namespace hwprep::gf2
