#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lohe {

using Complex = std::complex<double>;

/// Thrown when an operation receives arguments that violate its preconditions
/// (shape mismatch, wrong rank, non-unit norm, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Rank and per-index dimensions of a dense tensor. Rank 0 is a scalar.
class TensorShape {
 public:
  TensorShape() = default;
  explicit TensorShape(std::vector<std::size_t> dims);

  std::size_t rank() const noexcept { return dims_.size(); }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t dim(std::size_t k) const { return dims_.at(k); }
  /// Total number of entries, the product of all dims (1 for rank 0).
  std::size_t size() const noexcept { return size_; }

  /// Shape (d_1..d_m, d_1..d_m) of an operator acting on this shape.
  TensorShape doubled() const;

  /// Row-major digits (last index fastest) of a flat offset.
  void unravel(std::size_t flat, std::span<std::size_t> digits) const;
  std::size_t ravel(std::span<const std::size_t> digits) const;

  bool operator==(const TensorShape& other) const noexcept { return dims_ == other.dims_; }

  std::string str() const;

 private:
  std::vector<std::size_t> dims_;
  std::size_t size_ = 1;
};

/// Dense complex tensor, row-major with the last index fastest.
class ComplexTensor {
 public:
  ComplexTensor() = default;
  explicit ComplexTensor(TensorShape shape);
  ComplexTensor(TensorShape shape, std::vector<Complex> entries);

  static ComplexTensor vector(std::vector<Complex> entries);
  /// Row-major rows x cols matrix.
  static ComplexTensor matrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  static ComplexTensor identity(std::size_t d);

  const TensorShape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return entries_.size(); }

  std::span<Complex> entries() noexcept { return entries_; }
  std::span<const Complex> entries() const noexcept { return entries_; }

  Complex& operator[](std::size_t flat) noexcept { return entries_[flat]; }
  const Complex& operator[](std::size_t flat) const noexcept { return entries_[flat]; }
  Complex& at(std::size_t i, std::size_t j) { return entries_[i * shape_.dim(1) + j]; }
  const Complex& at(std::size_t i, std::size_t j) const { return entries_[i * shape_.dim(1) + j]; }

  ComplexTensor conj() const;

  ComplexTensor& operator+=(const ComplexTensor& rhs);
  ComplexTensor& operator-=(const ComplexTensor& rhs);
  ComplexTensor& operator*=(Complex s);
  /// this += s * x
  ComplexTensor& add_scaled(Complex s, const ComplexTensor& x);

  friend ComplexTensor operator+(ComplexTensor a, const ComplexTensor& b) { return a += b; }
  friend ComplexTensor operator-(ComplexTensor a, const ComplexTensor& b) { return a -= b; }
  friend ComplexTensor operator*(Complex s, ComplexTensor a) { return a *= s; }

  bool operator==(const ComplexTensor& other) const = default;

 private:
  TensorShape shape_;
  std::vector<Complex> entries_;
};

/// Rank-2m tensor A acting on rank-m tensors via [A]_{a0 a1}[T]_{a1}, with
/// conj([A]_{a0 a1}) = -[A]_{a1 a0}. For m = 1 this is a skew-hermitian matrix.
class SkewHermitianGenerator {
 public:
  static constexpr double kConstructionTolerance = 1e-12;

  /// Zero generator on `base`.
  explicit SkewHermitianGenerator(TensorShape base);
  /// Validates the skew-hermitian property at kConstructionTolerance.
  SkewHermitianGenerator(TensorShape base, ComplexTensor tensor);

  /// -i H for a hermitian matrix H (matrix model free flow).
  static SkewHermitianGenerator from_hamiltonian(const ComplexTensor& hamiltonian);

  const TensorShape& base_shape() const noexcept { return base_; }
  const ComplexTensor& tensor() const noexcept { return tensor_; }
  /// Element [A]_{a0 a1} addressed by flat offsets of the two index blocks.
  const Complex& operator()(std::size_t a0, std::size_t a1) const noexcept {
    return tensor_[a0 * base_.size() + a1];
  }

 private:
  TensorShape base_;
  ComplexTensor tensor_;
};

double frobenius_norm(const ComplexTensor& t);
double frobenius_norm_sq(const ComplexTensor& t);
/// sum conj(a) * b, conjugate-linear in the first slot.
Complex frobenius_inner(const ComplexTensor& a, const ComplexTensor& b);
double frobenius_distance(const ComplexTensor& a, const ComplexTensor& b);

/// True iff max |conj(A_{a0 a1}) + A_{a1 a0}| <= tol. Throws on odd rank or
/// a dim split that is not (d_*, d_*).
bool check_skew_hermitian(const ComplexTensor& tensor, double tol);

/// Cubic coupling for one bit pattern i*:
///   [Tc]_{a*i*} conj([Tj]_{a*1}) [Tj]_{a*(1-i*)} - [Tj]_{a*i*} conj([Tc]_{a*1}) [Tj]_{a*(1-i*)}
/// summed over the a*1 block, free indices a*0. Cost O(D^2).
ComplexTensor coupling_term(const ComplexTensor& tj, const ComplexTensor& tc,
                            std::span<const int> i_star);

ComplexTensor apply_generator(const SkewHermitianGenerator& a, const ComplexTensor& t);

/// exp(t * Omega) for m = 1, scaling and squaring with a [6/6] Pade approximant.
ComplexTensor matrix_exp(const SkewHermitianGenerator& omega, double t);

// Small dense matrix helpers used by the matrix model and the tests.
ComplexTensor matmul(const ComplexTensor& a, const ComplexTensor& b);
ComplexTensor adjoint(const ComplexTensor& a);
Complex trace(const ComplexTensor& a);
/// Solve A X = B for square A by Gaussian elimination with partial pivoting.
ComplexTensor solve(ComplexTensor a, ComplexTensor b);

}  // namespace lohe
