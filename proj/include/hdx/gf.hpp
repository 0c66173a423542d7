#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hdx/rng.hpp"

namespace hdx {

bool is_prime(int p);
int mod_inverse(int a, int p);

// Dense matrix over GF(p), p prime and < 256. Row-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, int p);

  static Matrix identity(int n, int p);
  static Matrix from_rows(const std::vector<std::vector<int>>& rows, int cols, int p);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int modulus() const { return p_; }

  int operator()(int r, int c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }
  void set(int r, int c, int v);
  const uint8_t* row(int r) const { return a_.data() + static_cast<size_t>(r) * cols_; }
  uint8_t* row(int r) { return a_.data() + static_cast<size_t>(r) * cols_; }
  std::vector<int> row_vector(int r) const;
  const std::vector<uint8_t>& data() const { return a_; }

  Matrix operator*(const Matrix& rhs) const;
  Matrix transpose() const;
  // Rows [r0, r1).
  Matrix row_block(int r0, int r1) const;
  static Matrix vstack(const Matrix& top, const Matrix& bottom);

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && p_ == o.p_ && a_ == o.a_;
  }
  bool operator!=(const Matrix& o) const { return !(*this == o); }

 private:
  int rows_ = 0;
  int cols_ = 0;
  int p_ = 2;
  std::vector<uint8_t> a_;
};

struct RrefResult {
  Matrix basis;  // nonzero rows only
  int rank = 0;
};

RrefResult rref(const Matrix& m);
int rank(const Matrix& m);
// Basis (as rows) of {x : m x = 0}.
Matrix kernel(const Matrix& m);
Matrix inverse(const Matrix& m);

// Row space of a matrix, stored as its reduced row-echelon basis.
class Subspace {
 public:
  Subspace() = default;

  static Subspace span(const Matrix& generators);
  static Subspace zero(int ambient, int p);
  static Subspace full(int ambient, int p);
  static Subspace from_vectors(const std::vector<std::vector<int>>& vecs, int ambient, int p);

  int ambient() const { return basis_.cols(); }
  int dim() const { return basis_.rows(); }
  int modulus() const { return basis_.modulus(); }
  const Matrix& basis() const { return basis_; }

  bool contains(const Subspace& other) const;
  bool contains_vector(const std::vector<int>& v) const;

  // Canonical text form, e.g. "5:4:1023,0140".
  std::string encode() const;
  static Subspace decode(const std::string& s);
  size_t hash() const;

  bool operator==(const Subspace& o) const { return basis_ == o.basis_; }
  bool operator!=(const Subspace& o) const { return !(*this == o); }
  bool operator<(const Subspace& o) const;

 private:
  explicit Subspace(Matrix canonical) : basis_(std::move(canonical)) {}
  Matrix basis_;
};

struct SubspaceHash {
  size_t operator()(const Subspace& s) const { return s.hash(); }
};

Subspace subspace_sum(const Subspace& a, const Subspace& b);
Subspace subspace_intersect(const Subspace& a, const Subspace& b);

// Image {m v : v in u} with column-vector convention.
Subspace apply(const Matrix& m, const Subspace& u);

// omega(v, w) = sum_i v_i w_{n+i} - w_i v_{n+i} on GF(p)^{2n}.
int symplectic_form(const std::vector<int>& u, const std::vector<int>& v, int p);
Matrix omega_matrix(int n, int p);
Subspace symplectic_complement(const Subspace& u);
bool is_isotropic(const Subspace& u);
bool is_symplectic(const Matrix& m);

Matrix random_matrix(int rows, int cols, int p, Rng& rng);
Matrix random_gl(int d, int p, Rng& rng);
Matrix random_sp(int n, int p, Rng& rng, int word_len = 64);
// Uniform k-dim subspace of GF(p)^n.
Subspace random_subspace(int n, int k, int p, Rng& rng);
// Uniform k-dim subspace of `within`.
Subspace random_subspace_of(const Subspace& within, int k, Rng& rng);

double gaussian_binomial(int n, int k, int q);

}  // namespace hdx
