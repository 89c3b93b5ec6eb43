#include "mixwit/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <lapacke.h>

namespace mixwit {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t p = 1;
    for (auto s : shape) p *= s;
    return p;
}

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ColMat = Eigen::MatrixXcd;

Eigen::Map<const RowMat> as_matrix(const ComplexTensor& t, std::size_t rows, std::size_t cols) {
    return Eigen::Map<const RowMat>(t.data().data(), static_cast<Eigen::Index>(rows),
                                    static_cast<Eigen::Index>(cols));
}

ColMat to_colmajor(const ComplexTensor& m) {
    if (m.rank() != 2) throw std::invalid_argument("expected a matrix");
    return as_matrix(m, m.extent(0), m.extent(1));
}

ComplexTensor from_colmajor(const ColMat& m) {
    ComplexTensor out({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
    Eigen::Map<RowMat>(out.data().data(), m.rows(), m.cols()) = m;
    return out;
}

void check_hermitian(const ColMat& m, double tol) {
    const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (dev > tol)
        throw invariant_error("matrix is not Hermitian: max entrywise deviation " + std::to_string(dev));
}

} // namespace

ComplexTensor::ComplexTensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), cplx(0.0, 0.0)) {
    for (auto s : shape_)
        if (s == 0) throw std::invalid_argument("tensor extents must be positive");
}

ComplexTensor::ComplexTensor(std::vector<std::size_t> shape, std::vector<cplx> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    for (auto s : shape_)
        if (s == 0) throw std::invalid_argument("tensor extents must be positive");
    if (data_.size() != shape_product(shape_))
        throw std::invalid_argument("data length does not match shape");
}

ComplexTensor ComplexTensor::matrix(std::size_t rows, std::size_t cols) {
    return ComplexTensor({rows, cols});
}

std::size_t ComplexTensor::offset(const std::vector<std::size_t>& idx) const {
    if (idx.size() != shape_.size()) throw std::invalid_argument("index rank mismatch");
    std::size_t off = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] >= shape_[k]) throw std::out_of_range("tensor index out of range");
        off = off * shape_[k] + idx[k];
    }
    return off;
}

ComplexTensor ComplexTensor::reshape(std::vector<std::size_t> new_shape) const {
    if (shape_product(new_shape) != data_.size())
        throw std::invalid_argument("reshape does not preserve element count");
    return ComplexTensor(std::move(new_shape), data_);
}

ComplexTensor ComplexTensor::permute(const std::vector<std::size_t>& perm) const {
    if (perm.size() != shape_.size()) throw std::invalid_argument("permutation rank mismatch");
    std::vector<bool> seen(perm.size(), false);
    for (auto p : perm) {
        if (p >= perm.size() || seen[p]) throw std::invalid_argument("invalid axis permutation");
        seen[p] = true;
    }
    const std::size_t r = rank();
    std::vector<std::size_t> new_shape(r);
    for (std::size_t k = 0; k < r; ++k) new_shape[k] = shape_[perm[k]];

    // old strides, then gather: out[i0,..] = in[idx with idx[perm[k]] = ik]
    std::vector<std::size_t> old_stride(r, 1);
    for (std::size_t k = r; k-- > 1;) old_stride[k - 1] = old_stride[k] * shape_[k];
    std::vector<std::size_t> gather_stride(r);
    for (std::size_t k = 0; k < r; ++k) gather_stride[k] = old_stride[perm[k]];

    ComplexTensor out(new_shape);
    std::vector<std::size_t> idx(r, 0);
    std::size_t src = 0;
    const std::size_t total = data_.size();
    for (std::size_t flat = 0; flat < total; ++flat) {
        out.data_[flat] = data_[src];
        for (std::size_t k = r; k-- > 0;) {
            ++idx[k];
            src += gather_stride[k];
            if (idx[k] < new_shape[k]) break;
            src -= gather_stride[k] * new_shape[k];
            idx[k] = 0;
        }
    }
    return out;
}

ComplexTensor ComplexTensor::conjugate() const {
    ComplexTensor out(shape_, data_);
    for (auto& v : out.data_) v = std::conj(v);
    return out;
}

ComplexTensor ComplexTensor::scaled(cplx factor) const {
    ComplexTensor out(shape_, data_);
    for (auto& v : out.data_) v *= factor;
    return out;
}

cplx ComplexTensor::scalar() const {
    if (data_.size() != 1) throw std::invalid_argument("tensor is not a scalar");
    return data_[0];
}

double ComplexTensor::max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
}

ComplexTensor contract(const ComplexTensor& a, const ComplexTensor& b,
                       const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    const std::size_t ra = a.rank(), rb = b.rank();
    std::vector<bool> a_paired(ra, false), b_paired(rb, false);
    std::size_t contracted = 1;
    for (const auto& [ax, bx] : pairs) {
        if (ax >= ra || bx >= rb) throw std::invalid_argument("contract: axis out of range");
        if (a_paired[ax] || b_paired[bx]) throw std::invalid_argument("contract: repeated axis");
        if (a.extent(ax) != b.extent(bx))
            throw std::invalid_argument("contract: extent mismatch on paired axes");
        a_paired[ax] = true;
        b_paired[bx] = true;
        contracted *= a.extent(ax);
    }

    std::vector<std::size_t> a_free, b_free;
    for (std::size_t k = 0; k < ra; ++k)
        if (!a_paired[k]) a_free.push_back(k);
    for (std::size_t k = 0; k < rb; ++k)
        if (!b_paired[k]) b_free.push_back(k);

    // a -> (free..., paired...), b -> (paired..., free...), then GEMM
    std::vector<std::size_t> a_perm = a_free, b_perm;
    for (const auto& pr : pairs) a_perm.push_back(pr.first);
    for (const auto& pr : pairs) b_perm.push_back(pr.second);
    for (auto k : b_free) b_perm.push_back(k);

    const ComplexTensor ap = a.permute(a_perm);
    const ComplexTensor bp = b.permute(b_perm);

    std::size_t m = 1, n = 1;
    std::vector<std::size_t> out_shape;
    for (auto k : a_free) {
        m *= a.extent(k);
        out_shape.push_back(a.extent(k));
    }
    for (auto k : b_free) {
        n *= b.extent(k);
        out_shape.push_back(b.extent(k));
    }

    ComplexTensor out(out_shape.empty() ? std::vector<std::size_t>{} : out_shape);
    if (out_shape.empty()) out = ComplexTensor({}, std::vector<cplx>{cplx(0.0)});

    Eigen::Map<RowMat> r(out.data().data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    r.noalias() = as_matrix(ap, m, contracted) * as_matrix(bp, contracted, n);
    return out;
}

ComplexTensor trace_axes(const ComplexTensor& t, std::size_t ax1, std::size_t ax2) {
    if (ax1 == ax2 || ax1 >= t.rank() || ax2 >= t.rank())
        throw std::invalid_argument("trace_axes: bad axes");
    if (t.extent(ax1) != t.extent(ax2)) throw std::invalid_argument("trace_axes: extent mismatch");
    if (ax1 > ax2) std::swap(ax1, ax2);

    const std::size_t r = t.rank();
    std::vector<std::size_t> perm;
    std::vector<std::size_t> out_shape;
    for (std::size_t k = 0; k < r; ++k)
        if (k != ax1 && k != ax2) {
            perm.push_back(k);
            out_shape.push_back(t.extent(k));
        }
    perm.push_back(ax1);
    perm.push_back(ax2);
    const ComplexTensor tp = t.permute(perm);

    const std::size_t d = t.extent(ax1);
    const std::size_t outer = tp.size() / (d * d);
    ComplexTensor out(out_shape.empty() ? std::vector<std::size_t>{} : out_shape);
    if (out_shape.empty()) out = ComplexTensor({}, std::vector<cplx>{cplx(0.0)});
    for (std::size_t o = 0; o < outer; ++o) {
        cplx s(0.0);
        const std::size_t base = o * d * d;
        for (std::size_t i = 0; i < d; ++i) s += tp[base + i * d + i];
        out[o] = s;
    }
    return out;
}

ComplexTensor tensor_product(const ComplexTensor& a, const ComplexTensor& b) {
    std::vector<std::size_t> shape = a.shape();
    shape.insert(shape.end(), b.shape().begin(), b.shape().end());
    ComplexTensor out(shape);
    const std::size_t nb = b.size();
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < nb; ++j) out[i * nb + j] = a[i] * b[j];
    return out;
}

std::vector<double> hermitian_spectrum(const ComplexTensor& m, double herm_tol) {
    if (!m.is_square_matrix()) throw std::invalid_argument("hermitian_spectrum: not a square matrix");
    ColMat a = to_colmajor(m);
    check_hermitian(a, herm_tol);
    const lapack_int n = static_cast<lapack_int>(a.rows());
    std::vector<double> w(static_cast<std::size_t>(n));
    lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'U', n,
                                     reinterpret_cast<lapack_complex_double*>(a.data()), n, w.data());
    if (info != 0) throw invariant_error("zheevd failed, info=" + std::to_string(info));
    std::reverse(w.begin(), w.end());
    return w;
}

HermitianEig hermitian_eig(const ComplexTensor& m, double herm_tol) {
    if (!m.is_square_matrix()) throw std::invalid_argument("hermitian_eig: not a square matrix");
    ColMat a = to_colmajor(m);
    check_hermitian(a, herm_tol);
    const lapack_int n = static_cast<lapack_int>(a.rows());
    std::vector<double> w(static_cast<std::size_t>(n));
    lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n,
                                     reinterpret_cast<lapack_complex_double*>(a.data()), n, w.data());
    if (info != 0) throw invariant_error("zheevd failed, info=" + std::to_string(info));
    // ascending -> descending, reorder columns to match
    ColMat v(n, n);
    std::vector<double> wd(static_cast<std::size_t>(n));
    for (lapack_int k = 0; k < n; ++k) {
        wd[static_cast<std::size_t>(k)] = w[static_cast<std::size_t>(n - 1 - k)];
        v.col(k) = a.col(n - 1 - k);
    }
    return {std::move(wd), from_colmajor(v)};
}

SvdResult svd(const ComplexTensor& m) {
    if (m.rank() != 2) throw std::invalid_argument("svd: not a matrix");
    ColMat a = to_colmajor(m);
    const lapack_int rows = static_cast<lapack_int>(a.rows());
    const lapack_int cols = static_cast<lapack_int>(a.cols());
    const lapack_int k = std::min(rows, cols);
    std::vector<double> s(static_cast<std::size_t>(k));
    ColMat u(rows, k), vt(k, cols);
    lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', rows, cols,
                                     reinterpret_cast<lapack_complex_double*>(a.data()), rows, s.data(),
                                     reinterpret_cast<lapack_complex_double*>(u.data()), rows,
                                     reinterpret_cast<lapack_complex_double*>(vt.data()), k);
    if (info != 0) throw invariant_error("zgesdd failed, info=" + std::to_string(info));
    return {from_colmajor(u), std::move(s), from_colmajor(vt.adjoint())};
}

std::vector<double> singular_values(const ComplexTensor& m) {
    if (m.rank() != 2) throw std::invalid_argument("singular_values: not a matrix");
    ColMat a = to_colmajor(m);
    const lapack_int rows = static_cast<lapack_int>(a.rows());
    const lapack_int cols = static_cast<lapack_int>(a.cols());
    const lapack_int k = std::min(rows, cols);
    std::vector<double> s(static_cast<std::size_t>(k));
    lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', rows, cols,
                                     reinterpret_cast<lapack_complex_double*>(a.data()), rows, s.data(),
                                     nullptr, rows, nullptr, k);
    if (info != 0) throw invariant_error("zgesdd failed, info=" + std::to_string(info));
    return s;
}

namespace {

GeneralEig general_eig_impl(const ComplexTensor& m, bool want_vectors) {
    if (!m.is_square_matrix()) throw std::invalid_argument("general_eig: not a square matrix");
    ColMat a = to_colmajor(m);
    const lapack_int n = static_cast<lapack_int>(a.rows());
    std::vector<cplx> w(static_cast<std::size_t>(n));
    ColMat vl(n, n), vr(n, n);
    lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', want_vectors ? 'V' : 'N',
                                    n, reinterpret_cast<lapack_complex_double*>(a.data()), n,
                                    reinterpret_cast<lapack_complex_double*>(w.data()),
                                    reinterpret_cast<lapack_complex_double*>(vl.data()), n,
                                    reinterpret_cast<lapack_complex_double*>(vr.data()), n);
    if (info != 0) throw invariant_error("zgeev failed, info=" + std::to_string(info));

    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return std::abs(w[i]) > std::abs(w[j]); });

    GeneralEig out;
    out.values.resize(w.size());
    ColMat vls(n, n), vrs(n, n);
    for (std::size_t k = 0; k < w.size(); ++k) {
        out.values[k] = w[order[k]];
        if (want_vectors) {
            vls.col(static_cast<Eigen::Index>(k)) = vl.col(static_cast<Eigen::Index>(order[k]));
            vrs.col(static_cast<Eigen::Index>(k)) = vr.col(static_cast<Eigen::Index>(order[k]));
        }
    }
    if (want_vectors) {
        out.left = from_colmajor(vls);
        out.right = from_colmajor(vrs);
    }
    return out;
}

} // namespace

std::vector<cplx> general_spectrum(const ComplexTensor& m) {
    return general_eig_impl(m, false).values;
}

GeneralEig general_eig(const ComplexTensor& m) { return general_eig_impl(m, true); }

double zero_tolerance(std::size_t dim, double max_abs) {
    return 1e-12 * static_cast<double>(dim) * max_abs;
}

} // namespace mixwit
