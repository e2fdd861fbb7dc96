#include "gpeps/tensor.hpp"
#include "gpeps/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <cblas.h>
#include <lapacke.h>

namespace gpeps {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t p = 1;
    for (std::size_t d : shape) {
        if (d == 0) throw InvalidArgument("tensor dimensions must be >= 1");
        p *= d;
    }
    return p;
}

void check_permutation(const std::vector<std::size_t>& axes, std::size_t rank) {
    if (axes.size() != rank) throw InvalidArgument("axes size does not match tensor rank");
    std::vector<bool> seen(rank, false);
    for (std::size_t a : axes) {
        if (a >= rank || seen[a]) throw InvalidArgument("axes is not a permutation");
        seen[a] = true;
    }
}

const cplx kOne(1.0, 0.0);
const cplx kZero(0.0, 0.0);

// c[m,n] = a[m,k] * b[k,n], row-major
void gemm(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n) {
    if (m == 0 || n == 0 || k == 0) return;
    cblas_zgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(m),
                static_cast<int>(n), static_cast<int>(k), &kOne, a, static_cast<int>(k), b,
                static_cast<int>(n), &kZero, c, static_cast<int>(n));
}

} // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), cplx(0.0)) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<cplx> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_product(shape_))
        throw InvalidArgument("data length does not match shape");
}

Tensor Tensor::scalar(cplx v) {
    Tensor t;
    t.data_[0] = v;
    return t;
}

std::vector<std::size_t> Tensor::strides() const {
    std::vector<std::size_t> s(shape_.size());
    std::size_t acc = 1;
    for (std::size_t i = shape_.size(); i-- > 0;) {
        s[i] = acc;
        acc *= shape_[i];
    }
    return s;
}

cplx& Tensor::at(const std::vector<std::size_t>& idx) {
    const auto& self = *this;
    return const_cast<cplx&>(self.at(idx));
}

const cplx& Tensor::at(const std::vector<std::size_t>& idx) const {
    if (idx.size() != rank()) throw InvalidArgument("index rank mismatch");
    std::size_t off = 0, acc = 1;
    for (std::size_t i = idx.size(); i-- > 0;) {
        if (idx[i] >= shape_[i]) throw InvalidArgument("index out of range");
        off += idx[i] * acc;
        acc *= shape_[i];
    }
    return data_[off];
}

double Tensor::norm() const {
    double s = 0.0;
    for (const cplx& v : data_) s += std::norm(v);
    return std::sqrt(s);
}

double Tensor::max_abs() const {
    double s = 0.0;
    for (const cplx& v : data_) s = std::max(s, std::abs(v));
    return s;
}

bool Tensor::all_finite() const {
    for (const cplx& v : data_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

Tensor& Tensor::operator*=(cplx s) {
    for (cplx& v : data_) v *= s;
    return *this;
}

Tensor permute(const Tensor& t, const std::vector<std::size_t>& axes) {
    check_permutation(axes, t.rank());
    if (t.rank() <= 1) return t;

    bool identity = true;
    for (std::size_t i = 0; i < axes.size(); ++i)
        if (axes[i] != i) identity = false;
    if (identity) return t;

    std::vector<std::size_t> out_shape(t.rank());
    for (std::size_t i = 0; i < axes.size(); ++i) out_shape[i] = t.dim(axes[i]);
    Tensor out(out_shape);

    // Walk the output linearly; in_stride[i] is the source stride of output axis i.
    const auto src_strides = t.strides();
    std::vector<std::size_t> in_stride(t.rank());
    for (std::size_t i = 0; i < axes.size(); ++i) in_stride[i] = src_strides[axes[i]];

    const std::size_t rank = t.rank();
    std::vector<std::size_t> counter(rank, 0);
    const cplx* src = t.data();
    cplx* dst = out.data();
    const std::size_t total = t.size();
    std::size_t src_off = 0;

    // Fast path: innermost output axis maps to a contiguous source axis.
    const std::size_t inner = out_shape[rank - 1];
    if (in_stride[rank - 1] == 1) {
        for (std::size_t o = 0; o < total; o += inner) {
            std::memcpy(dst + o, src + src_off, inner * sizeof(cplx));
            for (std::size_t i = rank - 1; i-- > 0;) {
                src_off += in_stride[i];
                if (++counter[i] < out_shape[i]) break;
                src_off -= in_stride[i] * out_shape[i];
                counter[i] = 0;
            }
        }
        return out;
    }

    const std::size_t inner_stride = in_stride[rank - 1];
    for (std::size_t o = 0; o < total; o += inner) {
        std::size_t s = src_off;
        for (std::size_t j = 0; j < inner; ++j, s += inner_stride) dst[o + j] = src[s];
        for (std::size_t i = rank - 1; i-- > 0;) {
            src_off += in_stride[i];
            if (++counter[i] < out_shape[i]) break;
            src_off -= in_stride[i] * out_shape[i];
            counter[i] = 0;
        }
    }
    return out;
}

Tensor conj(const Tensor& t) {
    Tensor out = t;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::conj(out[i]);
    return out;
}

Tensor contract(const Tensor& a, const Tensor& b,
                const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    std::vector<bool> used_a(a.rank(), false), used_b(b.rank(), false);
    for (const auto& [ax, bx] : pairs) {
        if (ax >= a.rank() || bx >= b.rank()) throw InvalidArgument("contract: axis out of range");
        if (used_a[ax] || used_b[bx]) throw InvalidArgument("contract: repeated axis");
        if (a.dim(ax) != b.dim(bx)) throw InvalidArgument("contract: dimension mismatch");
        used_a[ax] = true;
        used_b[bx] = true;
    }

    std::vector<std::size_t> free_a, free_b, perm_a, perm_b;
    std::size_t m = 1, n = 1, k = 1;
    for (std::size_t i = 0; i < a.rank(); ++i)
        if (!used_a[i]) {
            free_a.push_back(i);
            m *= a.dim(i);
        }
    for (std::size_t i = 0; i < b.rank(); ++i)
        if (!used_b[i]) {
            free_b.push_back(i);
            n *= b.dim(i);
        }
    perm_a = free_a;
    for (const auto& [ax, bx] : pairs) {
        perm_a.push_back(ax);
        perm_b.push_back(bx);
        k *= a.dim(ax);
    }
    for (std::size_t i : free_b) perm_b.push_back(i);

    Tensor pa = permute(a, perm_a);
    Tensor pb = permute(b, perm_b);

    std::vector<std::size_t> out_shape;
    for (std::size_t i : free_a) out_shape.push_back(a.dim(i));
    for (std::size_t i : free_b) out_shape.push_back(b.dim(i));
    Tensor out(out_shape);
    gemm(pa.data(), pb.data(), out.data(), m, k, n);
    return out;
}

namespace {

// Split t's axes into (left_axes | rest in original order); return the
// permuted tensor together with the row and column counts.
struct Matricized {
    Tensor t;
    std::size_t rows = 1, cols = 1;
    std::vector<std::size_t> left_dims, right_dims;
};

Matricized matricize(const Tensor& t, const std::vector<std::size_t>& left_axes) {
    std::vector<bool> is_left(t.rank(), false);
    for (std::size_t a : left_axes) {
        if (a >= t.rank()) throw InvalidArgument("split axis out of range");
        if (is_left[a]) throw InvalidArgument("split axis repeated");
        is_left[a] = true;
    }
    Matricized res;
    std::vector<std::size_t> perm(left_axes);
    for (std::size_t i = 0; i < t.rank(); ++i)
        if (!is_left[i]) perm.push_back(i);
    res.t = permute(t, perm);
    for (std::size_t a : left_axes) {
        res.left_dims.push_back(t.dim(a));
        res.rows *= t.dim(a);
    }
    for (std::size_t i = 0; i < t.rank(); ++i)
        if (!is_left[i]) {
            res.right_dims.push_back(t.dim(i));
            res.cols *= t.dim(i);
        }
    return res;
}

} // namespace

SvdResult svd_truncate(const Tensor& t, const std::vector<std::size_t>& left_axes,
                       std::size_t chi, double floor) {
    if (chi < 1) throw InvalidArgument("chi must be >= 1");
    if (!t.all_finite()) throw NumericError("svd_truncate: non-finite input");

    Matricized mat = matricize(t, left_axes);
    const std::size_t m = mat.rows, n = mat.cols, r = std::min(m, n);

    std::vector<double> s(r);
    Tensor u({m, r}), vt({r, n});
    int info = LAPACKE_zgesdd(LAPACK_ROW_MAJOR, 'S', static_cast<int>(m), static_cast<int>(n),
                              mat.t.data(), static_cast<int>(n), s.data(), u.data(),
                              static_cast<int>(r), vt.data(), static_cast<int>(n));
    if (info != 0) throw NumericError("zgesdd failed, info=" + std::to_string(info));

    double total = 0.0;
    for (double v : s) total += v * v;
    const double smax = s.empty() ? 0.0 : s[0];
    std::size_t k = std::min(chi, r);
    while (k > 1 && s[k - 1] < floor * smax) --k;

    double discarded = 0.0;
    for (std::size_t i = k; i < r; ++i) discarded += s[i] * s[i];

    SvdResult res;
    res.singular_values.assign(s.begin(), s.begin() + k);
    res.truncation_error = total > 0.0 ? std::sqrt(discarded / total) : 0.0;

    std::vector<std::size_t> lshape = mat.left_dims;
    lshape.push_back(k);
    Tensor left(lshape);
    for (std::size_t i = 0; i < m; ++i)
        std::memcpy(left.data() + i * k, u.data() + i * r, k * sizeof(cplx));
    res.left = std::move(left);

    std::vector<std::size_t> rshape{k};
    for (std::size_t d : mat.right_dims) rshape.push_back(d);
    Tensor right(rshape);
    std::memcpy(right.data(), vt.data(), k * n * sizeof(cplx));
    res.right = std::move(right);
    return res;
}

Tensor Reduction::apply_left(const Tensor& w) const {
    if (w.rank() != 2 || w.dim(0) != rank_) throw InvalidArgument("apply_left: bad W shape");
    const std::size_t k = w.dim(1);
    std::vector<std::size_t> out_shape = left_dims_;
    out_shape.push_back(k);
    Tensor out(out_shape);
    std::size_t m = 1;
    for (std::size_t d : left_dims_) m *= d;
    if (explicit_q_) {
        gemm(q_.data(), w.data(), out.data(), m, rank_, k);
    } else {
        Tensor pw = matmul(proj_, w); // [n, k]
        gemm(m_.data(), pw.data(), out.data(), m, m_.dim(1), k);
    }
    return out;
}

Reduction reduce_left(const Tensor& t, const std::vector<std::size_t>& left_axes) {
    Matricized mat = matricize(t, left_axes);
    const std::size_t m = mat.rows, n = mat.cols, r = std::min(m, n);

    Reduction red;
    red.left_dims_ = mat.left_dims;

    // Householder QR is exact but costs 2*m*n^2; for large panels the
    // Gram-matrix route (m*n^2 and no Q formation) wins.
    const double flops = static_cast<double>(m) * n * n;
    if (flops <= 2.5e8 || m < n) {
        std::vector<cplx> tau(r);
        Tensor a = mat.t; // consumed by geqrf
        int info = LAPACKE_zgeqrf(LAPACK_ROW_MAJOR, static_cast<int>(m), static_cast<int>(n),
                                  a.data(), static_cast<int>(n), tau.data());
        if (info != 0) throw NumericError("zgeqrf failed");
        Tensor rmat({r, n});
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < n; ++j)
                rmat[i * n + j] = j >= i ? a[i * n + j] : cplx(0.0);
        info = LAPACKE_zungqr(LAPACK_ROW_MAJOR, static_cast<int>(m), static_cast<int>(r),
                              static_cast<int>(r), a.data(), static_cast<int>(n), tau.data());
        if (info != 0) throw NumericError("zungqr failed");
        Tensor q({m, r});
        for (std::size_t i = 0; i < m; ++i)
            std::memcpy(q.data() + i * r, a.data() + i * n, r * sizeof(cplx));
        red.explicit_q_ = true;
        red.q_ = std::move(q);
        red.r_ = std::move(rmat);
        red.rank_ = r;
    } else {
        // G = M^H M, eigendecompose, R = sqrt(d) U^H on the kept subspace.
        Tensor gram({n, n});
        cblas_zherk(CblasRowMajor, CblasUpper, CblasConjTrans, static_cast<int>(n),
                    static_cast<int>(m), 1.0, mat.t.data(), static_cast<int>(n), 0.0,
                    gram.data(), static_cast<int>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) gram[i * n + j] = std::conj(gram[j * n + i]);

        std::vector<double> d;
        Tensor evec;
        eigh(gram, d, evec); // ascending
        const double dmax = d.empty() ? 0.0 : std::max(0.0, d[n - 1]);
        const double cut = dmax * 1e-28;
        std::size_t kept = 0;
        for (double v : d)
            if (v > cut) ++kept;
        if (kept == 0) kept = 1;

        // Descending order of eigenvalues; R[i,:] = sqrt(d_i) * evec[:,i]^H
        Tensor rmat({kept, n}), proj({n, kept});
        for (std::size_t i = 0; i < kept; ++i) {
            const std::size_t col = n - 1 - i;
            const double root = std::sqrt(std::max(0.0, d[col]));
            const double inv = root > 0.0 ? 1.0 / root : 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                rmat[i * n + j] = root * std::conj(evec[j * n + col]);
                proj[j * kept + i] = inv * evec[j * n + col];
            }
        }
        red.explicit_q_ = false;
        red.m_ = std::move(mat.t);
        red.r_ = std::move(rmat);
        red.proj_ = std::move(proj);
        red.rank_ = kept;
    }
    return red;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0))
        throw InvalidArgument("matmul: shape mismatch");
    Tensor out({a.dim(0), b.dim(1)});
    gemm(a.data(), b.data(), out.data(), a.dim(0), a.dim(1), b.dim(1));
    return out;
}

void eigh(const Tensor& herm, std::vector<double>& eigenvalues, Tensor& eigenvectors) {
    if (herm.rank() != 2 || herm.dim(0) != herm.dim(1)) throw InvalidArgument("eigh: not square");
    const std::size_t n = herm.dim(0);
    eigenvectors = herm;
    eigenvalues.assign(n, 0.0);
    int info = LAPACKE_zheevd(LAPACK_ROW_MAJOR, 'V', 'U', static_cast<int>(n),
                              eigenvectors.data(), static_cast<int>(n), eigenvalues.data());
    if (info != 0) throw NumericError("zheevd failed, info=" + std::to_string(info));
}

} // namespace gpeps
