#include "lohe/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lohe {

TensorShape::TensorShape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  for (auto d : dims_) {
    if (d == 0) throw InvalidInput("tensor dimension must be positive");
    size_ *= d;
  }
}

TensorShape TensorShape::doubled() const {
  std::vector<std::size_t> d = dims_;
  d.insert(d.end(), dims_.begin(), dims_.end());
  return TensorShape(std::move(d));
}

void TensorShape::unravel(std::size_t flat, std::span<std::size_t> digits) const {
  for (std::size_t k = rank(); k-- > 0;) {
    digits[k] = flat % dims_[k];
    flat /= dims_[k];
  }
}

std::size_t TensorShape::ravel(std::span<const std::size_t> digits) const {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < rank(); ++k) flat = flat * dims_[k] + digits[k];
  return flat;
}

std::string TensorShape::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t k = 0; k < dims_.size(); ++k) os << (k ? "x" : "") << dims_[k];
  os << ')';
  return os.str();
}

ComplexTensor::ComplexTensor(TensorShape shape)
    : shape_(std::move(shape)), entries_(shape_.size()) {}

ComplexTensor::ComplexTensor(TensorShape shape, std::vector<Complex> entries)
    : shape_(std::move(shape)), entries_(std::move(entries)) {
  if (entries_.size() != shape_.size())
    throw InvalidInput("entry count " + std::to_string(entries_.size()) +
                       " does not match shape " + shape_.str());
}

ComplexTensor ComplexTensor::vector(std::vector<Complex> entries) {
  TensorShape s({entries.size()});
  return ComplexTensor(std::move(s), std::move(entries));
}

ComplexTensor ComplexTensor::matrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries) {
  return ComplexTensor(TensorShape({rows, cols}), std::move(entries));
}

ComplexTensor ComplexTensor::identity(std::size_t d) {
  ComplexTensor out(TensorShape({d, d}));
  for (std::size_t i = 0; i < d; ++i) out.at(i, i) = 1.0;
  return out;
}

ComplexTensor ComplexTensor::conj() const {
  ComplexTensor out = *this;
  for (auto& e : out.entries_) e = std::conj(e);
  return out;
}

namespace {
void require_same_shape(const ComplexTensor& a, const ComplexTensor& b, const char* what) {
  if (!(a.shape() == b.shape()))
    throw InvalidInput(std::string(what) + ": shape mismatch " + a.shape().str() + " vs " +
                       b.shape().str());
}
}  // namespace

ComplexTensor& ComplexTensor::operator+=(const ComplexTensor& rhs) {
  require_same_shape(*this, rhs, "operator+=");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += rhs.entries_[i];
  return *this;
}

ComplexTensor& ComplexTensor::operator-=(const ComplexTensor& rhs) {
  require_same_shape(*this, rhs, "operator-=");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= rhs.entries_[i];
  return *this;
}

ComplexTensor& ComplexTensor::operator*=(Complex s) {
  for (auto& e : entries_) e *= s;
  return *this;
}

ComplexTensor& ComplexTensor::add_scaled(Complex s, const ComplexTensor& x) {
  require_same_shape(*this, x, "add_scaled");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += s * x.entries_[i];
  return *this;
}

SkewHermitianGenerator::SkewHermitianGenerator(TensorShape base)
    : base_(std::move(base)), tensor_(base_.doubled()) {}

SkewHermitianGenerator::SkewHermitianGenerator(TensorShape base, ComplexTensor tensor)
    : base_(std::move(base)), tensor_(std::move(tensor)) {
  if (!(tensor_.shape() == base_.doubled()))
    throw InvalidInput("generator shape " + tensor_.shape().str() + " does not act on " +
                       base_.str());
  if (!check_skew_hermitian(tensor_, kConstructionTolerance))
    throw InvalidInput("generator is not skew-hermitian");
}

SkewHermitianGenerator SkewHermitianGenerator::from_hamiltonian(const ComplexTensor& h) {
  if (h.shape().rank() != 2 || h.shape().dim(0) != h.shape().dim(1))
    throw InvalidInput("hamiltonian must be a square matrix");
  ComplexTensor a = Complex(0.0, -1.0) * h;
  return SkewHermitianGenerator(TensorShape({h.shape().dim(0)}), std::move(a));
}

double frobenius_norm_sq(const ComplexTensor& t) {
  double s = 0.0;
  for (const auto& e : t.entries()) s += std::norm(e);
  return s;
}

double frobenius_norm(const ComplexTensor& t) { return std::sqrt(frobenius_norm_sq(t)); }

Complex frobenius_inner(const ComplexTensor& a, const ComplexTensor& b) {
  require_same_shape(a, b, "frobenius_inner");
  Complex s = 0.0;
  auto ea = a.entries();
  auto eb = b.entries();
  for (std::size_t i = 0; i < ea.size(); ++i) s += std::conj(ea[i]) * eb[i];
  return s;
}

double frobenius_distance(const ComplexTensor& a, const ComplexTensor& b) {
  require_same_shape(a, b, "frobenius_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

bool check_skew_hermitian(const ComplexTensor& tensor, double tol) {
  const auto& dims = tensor.shape().dims();
  const std::size_t r = dims.size();
  if (r % 2 != 0) throw InvalidInput("skew-hermitian check needs even rank");
  for (std::size_t k = 0; k < r / 2; ++k)
    if (dims[k] != dims[k + r / 2]) throw InvalidInput("generator dims must split as (d*, d*)");
  std::size_t block = 1;
  for (std::size_t k = 0; k < r / 2; ++k) block *= dims[k];
  for (std::size_t a0 = 0; a0 < block; ++a0)
    for (std::size_t a1 = 0; a1 < block; ++a1) {
      const Complex x = std::conj(tensor[a0 * block + a1]) + tensor[a1 * block + a0];
      if (std::abs(x) > tol) return false;
    }
  return true;
}

ComplexTensor coupling_term(const ComplexTensor& tj, const ComplexTensor& tc,
                            std::span<const int> i_star) {
  require_same_shape(tj, tc, "coupling_term");
  const TensorShape& shape = tj.shape();
  const std::size_t m = shape.rank();
  if (i_star.size() != m)
    throw InvalidInput("bit pattern length " + std::to_string(i_star.size()) +
                       " does not match rank " + std::to_string(m));
  const std::size_t d_total = shape.size();

  // digits[flat * m + k] = k-th index of the flat offset
  std::vector<std::size_t> digits(d_total * m);
  for (std::size_t f = 0; f < d_total; ++f)
    shape.unravel(f, std::span<std::size_t>(digits.data() + f * m, m));

  ComplexTensor out(shape);
  std::vector<std::size_t> pick(m), rest(m);
  for (std::size_t a0 = 0; a0 < d_total; ++a0) {
    const std::size_t* d0 = digits.data() + a0 * m;
    Complex acc = 0.0;
    for (std::size_t a1 = 0; a1 < d_total; ++a1) {
      const std::size_t* d1 = digits.data() + a1 * m;
      for (std::size_t k = 0; k < m; ++k) {
        pick[k] = i_star[k] ? d1[k] : d0[k];
        rest[k] = i_star[k] ? d0[k] : d1[k];
      }
      const std::size_t ip = shape.ravel(pick);
      const std::size_t ir = shape.ravel(rest);
      acc += (tc[ip] * std::conj(tj[a1]) - tj[ip] * std::conj(tc[a1])) * tj[ir];
    }
    out[a0] = acc;
  }
  return out;
}

ComplexTensor apply_generator(const SkewHermitianGenerator& a, const ComplexTensor& t) {
  if (!(a.base_shape() == t.shape()))
    throw InvalidInput("generator acts on " + a.base_shape().str() + ", got " + t.shape().str());
  const std::size_t n = t.size();
  ComplexTensor out(t.shape());
  for (std::size_t a0 = 0; a0 < n; ++a0) {
    Complex acc = 0.0;
    for (std::size_t a1 = 0; a1 < n; ++a1) acc += a(a0, a1) * t[a1];
    out[a0] = acc;
  }
  return out;
}

namespace {
void require_matrix(const ComplexTensor& a, const char* what) {
  if (a.shape().rank() != 2) throw InvalidInput(std::string(what) + ": expected a matrix");
}
}  // namespace

ComplexTensor matmul(const ComplexTensor& a, const ComplexTensor& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  const std::size_t n = a.shape().dim(0), k = a.shape().dim(1), m = b.shape().dim(1);
  if (b.shape().dim(0) != k) throw InvalidInput("matmul: inner dimension mismatch");
  ComplexTensor out(TensorShape({n, m}));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      const Complex ail = a.at(i, l);
      for (std::size_t j = 0; j < m; ++j) out.at(i, j) += ail * b.at(l, j);
    }
  return out;
}

ComplexTensor adjoint(const ComplexTensor& a) {
  require_matrix(a, "adjoint");
  const std::size_t n = a.shape().dim(0), m = a.shape().dim(1);
  ComplexTensor out(TensorShape({m, n}));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out.at(j, i) = std::conj(a.at(i, j));
  return out;
}

Complex trace(const ComplexTensor& a) {
  require_matrix(a, "trace");
  Complex s = 0.0;
  for (std::size_t i = 0; i < std::min(a.shape().dim(0), a.shape().dim(1)); ++i) s += a.at(i, i);
  return s;
}

ComplexTensor solve(ComplexTensor a, ComplexTensor b) {
  require_matrix(a, "solve");
  require_matrix(b, "solve");
  const std::size_t n = a.shape().dim(0);
  if (a.shape().dim(1) != n || b.shape().dim(0) != n) throw InvalidInput("solve: bad dimensions");
  const std::size_t m = b.shape().dim(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a.at(r, c)) > std::abs(a.at(piv, c))) piv = r;
    if (std::abs(a.at(piv, c)) == 0.0) throw InvalidInput("solve: singular matrix");
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a.at(c, j), a.at(piv, j));
      for (std::size_t j = 0; j < m; ++j) std::swap(b.at(c, j), b.at(piv, j));
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const Complex f = a.at(r, c) / a.at(c, c);
      if (f == Complex(0.0)) continue;
      for (std::size_t j = c; j < n; ++j) a.at(r, j) -= f * a.at(c, j);
      for (std::size_t j = 0; j < m; ++j) b.at(r, j) -= f * b.at(c, j);
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    for (std::size_t j = 0; j < m; ++j) {
      Complex s = b.at(c, j);
      for (std::size_t k = c + 1; k < n; ++k) s -= a.at(c, k) * b.at(k, j);
      b.at(c, j) = s / a.at(c, c);
    }
  }
  return b;
}

ComplexTensor matrix_exp(const SkewHermitianGenerator& omega, double t) {
  if (omega.base_shape().rank() != 1) throw InvalidInput("matrix_exp needs a rank-1 generator");
  const std::size_t d = omega.base_shape().dim(0);
  ComplexTensor a = Complex(t) * omega.tensor();
  if (t == 0.0) return ComplexTensor::identity(d);

  // 1-norm (max column sum) drives the scaling so that ||A / 2^s|| <= 1/2.
  double norm1 = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < d; ++i) col += std::abs(a.at(i, j));
    norm1 = std::max(norm1, col);
  }
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  a *= std::ldexp(1.0, -squarings);

  // [6/6] diagonal Pade coefficients c_k = (2q-k)! q! / ((2q)! k! (q-k)!)
  constexpr int q = 6;
  double c[q + 1];
  c[0] = 1.0;
  for (int k = 1; k <= q; ++k) c[k] = c[k - 1] * double(q - k + 1) / double(k * (2 * q - k + 1));

  ComplexTensor num = ComplexTensor::identity(d);
  ComplexTensor den = ComplexTensor::identity(d);
  ComplexTensor power = ComplexTensor::identity(d);
  for (int k = 1; k <= q; ++k) {
    power = matmul(power, a);
    num.add_scaled(c[k], power);
    den.add_scaled((k % 2 ? -1.0 : 1.0) * c[k], power);
  }
  ComplexTensor e = solve(std::move(den), std::move(num));
  for (int s = 0; s < squarings; ++s) e = matmul(e, e);
  return e;
}

}  // namespace lohe
