#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace gpeps {

using cplx = std::complex<double>;

/// Dense complex tensor, row-major flat storage (last index fastest).
/// Rank 0 is a scalar with a single data element.
class Tensor {
  public:
    Tensor() : shape_{}, data_(1, cplx(0.0)) {}
    explicit Tensor(std::vector<std::size_t> shape);
    Tensor(std::vector<std::size_t> shape, std::vector<cplx> data);

    static Tensor scalar(cplx v);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_[axis]; }

    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }
    cplx& operator[](std::size_t i) { return data_[i]; }
    const cplx& operator[](std::size_t i) const { return data_[i]; }

    cplx& at(const std::vector<std::size_t>& idx);
    const cplx& at(const std::vector<std::size_t>& idx) const;

    /// Row-major strides.
    std::vector<std::size_t> strides() const;

    double norm() const;     // Frobenius
    double max_abs() const;
    bool all_finite() const;

    Tensor& operator*=(cplx s);

  private:
    std::vector<std::size_t> shape_;
    std::vector<cplx> data_;
};

struct SvdResult {
    Tensor left;                          // left dims + [k], isometric columns
    std::vector<double> singular_values;  // descending, >= 0
    Tensor right;                         // [k] + right dims, isometric rows
    double truncation_error = 0.0;        // sqrt(sum discarded s^2 / sum all s^2)
};

Tensor permute(const Tensor& t, const std::vector<std::size_t>& axes);
Tensor conj(const Tensor& t);

/// Sum-product over the given (axis of a, axis of b) pairs. Remaining axes
/// of a then b, keeping their original relative order.
Tensor contract(const Tensor& a, const Tensor& b,
                const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

/// Matricize over the axis partition (left_axes | the rest, original order),
/// keep at most chi singular values, drop values below floor * s_max.
SvdResult svd_truncate(const Tensor& t, const std::vector<std::size_t>& left_axes,
                       std::size_t chi, double floor = 1e-12);

/// Rank-revealing left reduction T = Q * R over the partition
/// (left_axes | rest).  Q is column-isometric (left dims + [r]), R is
/// [r] + right dims.  apply_left(W) computes Q * W without forming Q
/// explicitly on large inputs.
class Reduction {
  public:
    const Tensor& r() const { return r_; }
    std::size_t rank_kept() const { return rank_; }

    /// W must be a matrix [rank_kept, k]; returns left dims + [k].
    Tensor apply_left(const Tensor& w) const;

  private:
    friend Reduction reduce_left(const Tensor&, const std::vector<std::size_t>&);
    Tensor r_;
    std::size_t rank_ = 0;
    std::vector<std::size_t> left_dims_;
    bool explicit_q_ = true;
    Tensor q_;     // explicit route
    Tensor m_;     // gram route: permuted matricization [m, n]
    Tensor proj_;  // gram route: [n, rank], Q = m_ * proj_
};

Reduction reduce_left(const Tensor& t, const std::vector<std::size_t>& left_axes);

// Dense matrix helpers used across the engine (all row-major).
Tensor matmul(const Tensor& a, const Tensor& b);

/// Hermitian eigendecomposition of a [n, n] matrix; eigenvalues ascending.
void eigh(const Tensor& herm, std::vector<double>& eigenvalues, Tensor& eigenvectors);

} // namespace gpeps
