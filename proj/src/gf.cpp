#include "hdx/gf.hpp"

#include <cmath>
#include <stdexcept>

namespace hdx {

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

int mod_inverse(int a, int p) {
  int t = 0, newt = 1, r = p, newr = ((a % p) + p) % p;
  if (newr == 0) throw std::domain_error("mod_inverse: zero has no inverse");
  while (newr != 0) {
    int q = r / newr;
    int tmp = t - q * newt;
    t = newt;
    newt = tmp;
    tmp = r - q * newr;
    r = newr;
    newr = tmp;
  }
  return t < 0 ? t + p : t;
}

Matrix::Matrix(int rows, int cols, int p) : rows_(rows), cols_(cols), p_(p) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative size");
  if (!is_prime(p) || p > 251) throw std::invalid_argument("Matrix: modulus must be a prime below 256");
  a_.assign(static_cast<size_t>(rows) * cols, 0);
}

Matrix Matrix::identity(int n, int p) {
  Matrix m(n, n, p);
  for (int i = 0; i < n; ++i) m.set(i, i, 1);
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<int>>& rows, int cols, int p) {
  Matrix m(static_cast<int>(rows.size()), cols, p);
  for (int r = 0; r < m.rows(); ++r) {
    if (static_cast<int>(rows[r].size()) != cols) throw std::invalid_argument("from_rows: ragged input");
    for (int c = 0; c < cols; ++c) m.set(r, c, rows[r][c]);
  }
  return m;
}

void Matrix::set(int r, int c, int v) {
  v %= p_;
  if (v < 0) v += p_;
  a_[static_cast<size_t>(r) * cols_ + c] = static_cast<uint8_t>(v);
}

std::vector<int> Matrix::row_vector(int r) const {
  return std::vector<int>(row(r), row(r) + cols_);
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_ || p_ != rhs.p_) throw std::invalid_argument("Matrix product: shape or field mismatch");
  Matrix out(rows_, rhs.cols_, p_);
  std::vector<int> acc(rhs.cols_);
  for (int i = 0; i < rows_; ++i) {
    std::fill(acc.begin(), acc.end(), 0);
    for (int k = 0; k < cols_; ++k) {
      int a = (*this)(i, k);
      if (a == 0) continue;
      const uint8_t* b = rhs.row(k);
      for (int j = 0; j < rhs.cols_; ++j) acc[j] += a * b[j];
    }
    for (int j = 0; j < rhs.cols_; ++j) out.row(i)[j] = static_cast<uint8_t>(acc[j] % p_);
  }
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_, p_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t.row(j)[i] = (*this)(i, j);
  return t;
}

Matrix Matrix::row_block(int r0, int r1) const {
  Matrix out(r1 - r0, cols_, p_);
  std::copy(row(r0), row(r0) + static_cast<size_t>(r1 - r0) * cols_, out.a_.begin());
  return out;
}

Matrix Matrix::vstack(const Matrix& top, const Matrix& bottom) {
  if (top.cols_ != bottom.cols_ || top.p_ != bottom.p_) throw std::invalid_argument("vstack: shape mismatch");
  Matrix out(top.rows_ + bottom.rows_, top.cols_, top.p_);
  std::copy(top.a_.begin(), top.a_.end(), out.a_.begin());
  std::copy(bottom.a_.begin(), bottom.a_.end(), out.a_.begin() + top.a_.size());
  return out;
}

namespace {

// In-place reduction; returns pivot columns.
std::vector<int> reduce(Matrix& m) {
  const int p = m.modulus();
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
    int piv = -1;
    for (int i = r; i < m.rows(); ++i)
      if (m(i, c) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != r) std::swap_ranges(m.row(piv), m.row(piv) + m.cols(), m.row(r));
    int inv = mod_inverse(m(r, c), p);
    uint8_t* pr = m.row(r);
    for (int j = c; j < m.cols(); ++j) pr[j] = static_cast<uint8_t>((pr[j] * inv) % p);
    for (int i = 0; i < m.rows(); ++i) {
      if (i == r) continue;
      int f = m(i, c);
      if (f == 0) continue;
      uint8_t* pi = m.row(i);
      for (int j = c; j < m.cols(); ++j) pi[j] = static_cast<uint8_t>((pi[j] + (p - f) * pr[j]) % p);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

RrefResult rref(const Matrix& m) {
  Matrix w = m;
  auto pivots = reduce(w);
  int r = static_cast<int>(pivots.size());
  return {w.row_block(0, r), r};
}

int rank(const Matrix& m) {
  Matrix w = m;
  return static_cast<int>(reduce(w).size());
}

Matrix kernel(const Matrix& m) {
  Matrix w = m;
  auto pivots = reduce(w);
  const int n = m.cols(), p = m.modulus();
  std::vector<char> is_pivot(n, 0);
  for (int c : pivots) is_pivot[c] = 1;
  Matrix k(n - static_cast<int>(pivots.size()), n, p);
  int row = 0;
  for (int f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    k.set(row, f, 1);
    for (size_t r = 0; r < pivots.size(); ++r) k.set(row, pivots[r], -static_cast<int>(w(static_cast<int>(r), f)));
    ++row;
  }
  return k;
}

Matrix inverse(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse: not square");
  const int n = m.rows();
  Matrix aug(n, 2 * n, m.modulus());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug.row(i)[j] = static_cast<uint8_t>(m(i, j));
    aug.row(i)[n + i] = 1;
  }
  auto pivots = reduce(aug);
  if (static_cast<int>(pivots.size()) < n || pivots[n - 1] != n - 1) throw std::domain_error("inverse: singular matrix");
  Matrix inv(n, n, m.modulus());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv.row(i)[j] = aug(i, n + j);
  return inv;
}

Subspace Subspace::span(const Matrix& generators) { return Subspace(rref(generators).basis); }

Subspace Subspace::zero(int ambient, int p) { return Subspace(Matrix(0, ambient, p)); }

Subspace Subspace::full(int ambient, int p) { return Subspace(Matrix::identity(ambient, p)); }

Subspace Subspace::from_vectors(const std::vector<std::vector<int>>& vecs, int ambient, int p) {
  return span(Matrix::from_rows(vecs, ambient, p));
}

bool Subspace::contains_vector(const std::vector<int>& v) const {
  const int n = ambient(), p = modulus();
  if (static_cast<int>(v.size()) != n) throw std::invalid_argument("contains_vector: length mismatch");
  std::vector<int> rem(n);
  for (int j = 0; j < n; ++j) rem[j] = ((v[j] % p) + p) % p;
  for (int r = 0; r < dim(); ++r) {
    const uint8_t* b = basis_.row(r);
    int c = 0;
    while (b[c] == 0) ++c;
    int f = rem[c];
    if (f == 0) continue;
    for (int j = c; j < n; ++j) rem[j] = (rem[j] + (p - f) * b[j]) % p;
  }
  for (int x : rem)
    if (x != 0) return false;
  return true;
}

bool Subspace::contains(const Subspace& other) const {
  if (other.ambient() != ambient() || other.modulus() != modulus())
    throw std::invalid_argument("contains: ambient mismatch");
  if (other.dim() > dim()) return false;
  for (int r = 0; r < other.dim(); ++r)
    if (!contains_vector(other.basis_.row_vector(r))) return false;
  return true;
}

std::string Subspace::encode() const {
  const int p = modulus();
  static const char* hex = "0123456789abcdef";
  std::string s = std::to_string(p) + ":" + std::to_string(ambient()) + ":";
  for (int r = 0; r < dim(); ++r) {
    if (r) s += '.';
    for (int c = 0; c < ambient(); ++c) {
      int v = basis_(r, c);
      if (p <= 16) {
        s += hex[v];
      } else {
        s += hex[v >> 4];
        s += hex[v & 15];
      }
    }
  }
  return s;
}

Subspace Subspace::decode(const std::string& s) {
  auto c1 = s.find(':');
  auto c2 = s.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) throw std::invalid_argument("Subspace::decode: malformed");
  int p = std::stoi(s.substr(0, c1));
  int n = std::stoi(s.substr(c1 + 1, c2 - c1 - 1));
  std::string body = s.substr(c2 + 1);
  std::vector<std::vector<int>> rows;
  const int width = p <= 16 ? 1 : 2;
  size_t pos = 0;
  while (pos < body.size()) {
    auto dot = body.find('.', pos);
    std::string row = body.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (static_cast<int>(row.size()) != n * width) throw std::invalid_argument("Subspace::decode: bad row");
    std::vector<int> v(n);
    for (int c = 0; c < n; ++c) v[c] = std::stoi(row.substr(static_cast<size_t>(c) * width, width), nullptr, 16);
    rows.push_back(v);
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return from_vectors(rows, n, p);
}

size_t Subspace::hash() const {
  uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](uint64_t b) {
    h ^= b;
    h *= 1099511628211ULL;
  };
  mix(static_cast<uint64_t>(ambient()));
  mix(static_cast<uint64_t>(modulus()));
  mix(static_cast<uint64_t>(dim()));
  for (uint8_t b : basis_.data()) mix(b);
  return static_cast<size_t>(h);
}

bool Subspace::operator<(const Subspace& o) const {
  if (ambient() != o.ambient()) return ambient() < o.ambient();
  if (dim() != o.dim()) return dim() < o.dim();
  return basis_.data() < o.basis_.data();
}

namespace {
void check_same(const Subspace& a, const Subspace& b) {
  if (a.ambient() != b.ambient() || a.modulus() != b.modulus())
    throw std::invalid_argument("subspace operation: ambient mismatch");
}
}  // namespace

Subspace subspace_sum(const Subspace& a, const Subspace& b) {
  check_same(a, b);
  return Subspace::span(Matrix::vstack(a.basis(), b.basis()));
}

Subspace subspace_intersect(const Subspace& a, const Subspace& b) {
  check_same(a, b);
  const int p = a.modulus();
  if (a.dim() == 0 || b.dim() == 0) return Subspace::zero(a.ambient(), p);
  Matrix neg_b(b.dim(), b.ambient(), p);
  for (int i = 0; i < b.dim(); ++i)
    for (int j = 0; j < b.ambient(); ++j) neg_b.set(i, j, -b.basis()(i, j));
  // x A - y B = 0  <=>  [x y] is in the left kernel of [A; -B].
  Matrix left = kernel(Matrix::vstack(a.basis(), neg_b).transpose());
  if (left.rows() == 0) return Subspace::zero(a.ambient(), p);
  Matrix coeff(left.rows(), a.dim(), p);
  for (int i = 0; i < left.rows(); ++i)
    for (int j = 0; j < a.dim(); ++j) coeff.set(i, j, left(i, j));
  return Subspace::span(coeff * a.basis());
}

Subspace apply(const Matrix& m, const Subspace& u) {
  if (m.rows() != m.cols() || m.cols() != u.ambient() || m.modulus() != u.modulus())
    throw std::invalid_argument("apply: dimension mismatch");
  if (u.dim() == 0) return u;
  return Subspace::span(u.basis() * m.transpose());
}

int symplectic_form(const std::vector<int>& u, const std::vector<int>& v, int p) {
  if (u.size() != v.size() || u.size() % 2 != 0) throw std::invalid_argument("symplectic_form: odd or mismatched dimension");
  const size_t n = u.size() / 2;
  long long s = 0;
  for (size_t i = 0; i < n; ++i) s += static_cast<long long>(u[i]) * v[n + i] - static_cast<long long>(v[i]) * u[n + i];
  s %= p;
  return static_cast<int>(s < 0 ? s + p : s);
}

Matrix omega_matrix(int n, int p) {
  Matrix w(2 * n, 2 * n, p);
  for (int i = 0; i < n; ++i) {
    w.set(i, n + i, 1);
    w.set(n + i, i, -1);
  }
  return w;
}

Subspace symplectic_complement(const Subspace& u) {
  const int two_n = u.ambient(), p = u.modulus();
  if (two_n % 2 != 0) throw std::invalid_argument("symplectic_complement: odd ambient dimension");
  if (u.dim() == 0) return Subspace::full(two_n, p);
  const int n = two_n / 2;
  // omega(w, x) = <w, Jx> with (Jx)_i = x_{n+i}, (Jx)_{n+i} = -x_i.
  Matrix rows(u.dim(), two_n, p);
  for (int r = 0; r < u.dim(); ++r)
    for (int i = 0; i < n; ++i) {
      rows.set(r, i, u.basis()(r, n + i));
      rows.set(r, n + i, -u.basis()(r, i));
    }
  return Subspace::span(kernel(rows));
}

bool is_isotropic(const Subspace& u) {
  if (u.ambient() % 2 != 0) throw std::invalid_argument("is_isotropic: odd ambient dimension");
  for (int i = 0; i < u.dim(); ++i)
    for (int j = i + 1; j < u.dim(); ++j)
      if (symplectic_form(u.basis().row_vector(i), u.basis().row_vector(j), u.modulus()) != 0) return false;
  return true;
}

bool is_symplectic(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0) return false;
  Matrix w = omega_matrix(m.rows() / 2, m.modulus());
  return m.transpose() * w * m == w;
}

Matrix random_matrix(int rows, int cols, int p, Rng& rng) {
  Matrix m(rows, cols, p);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m.set(i, j, uniform_int(rng, p));
  return m;
}

Matrix random_gl(int d, int p, Rng& rng) {
  if (d < 1) throw std::invalid_argument("random_gl: d must be >= 1");
  for (;;) {
    Matrix m = random_matrix(d, d, p, rng);
    if (rank(m) == d) return m;
  }
}

Matrix random_sp(int n, int p, Rng& rng, int word_len) {
  if (n < 1) throw std::invalid_argument("random_sp: n must be >= 1");
  Matrix m = Matrix::identity(2 * n, p);
  const Matrix w = omega_matrix(n, p);
  for (int step = 0; step < word_len; ++step) {
    Matrix g = Matrix::identity(2 * n, p);
    switch (uniform_int(rng, 3)) {
      case 0: {  // [[I, A], [0, I]] with A symmetric
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) {
            int a = uniform_int(rng, p);
            g.set(i, n + j, a);
            g.set(j, n + i, a);
          }
        break;
      }
      case 1: {  // diag(C, C^{-T})
        Matrix c = random_gl(n, p, rng);
        Matrix cit = inverse(c).transpose();
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            g.set(i, j, c(i, j));
            g.set(n + i, n + j, cit(i, j));
          }
        break;
      }
      default:
        g = w;
    }
    m = m * g;
  }
  return m;
}

Subspace random_subspace(int n, int k, int p, Rng& rng) {
  if (k < 0 || k > n) throw std::invalid_argument("random_subspace: bad dimension");
  if (k == 0) return Subspace::zero(n, p);
  for (;;) {
    Matrix m = random_matrix(k, n, p, rng);
    RrefResult r = rref(m);
    if (r.rank == k) return Subspace::span(r.basis);
  }
}

Subspace random_subspace_of(const Subspace& within, int k, Rng& rng) {
  if (k < 0 || k > within.dim()) throw std::invalid_argument("random_subspace_of: bad dimension");
  if (k == 0) return Subspace::zero(within.ambient(), within.modulus());
  for (;;) {
    Matrix c = random_matrix(k, within.dim(), within.modulus(), rng);
    if (rank(c) == k) return Subspace::span(c * within.basis());
  }
}

double gaussian_binomial(int n, int k, int q) {
  if (k < 0 || k > n) return 0.0;
  long double num = 1, den = 1;
  for (int i = 0; i < k; ++i) {
    num *= std::pow(static_cast<long double>(q), n - i) - 1;
    den *= std::pow(static_cast<long double>(q), i + 1) - 1;
  }
  return static_cast<double>(std::llround(num / den));
}

}  // namespace hdx
