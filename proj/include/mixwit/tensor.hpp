#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mixwit {

using cplx = std::complex<double>;

/// Raised when a numerical invariant is violated (trace drift, cross-check
/// mismatch, symmetry breach, ...). Distinct from std::invalid_argument so the
/// CLI can map it to its own exit code.
class invariant_error : public std::runtime_error {
  public:
    explicit invariant_error(const std::string& what) : std::runtime_error(what) {}
};

/// Dense complex tensor, row-major. Axis permutations materialize the data.
class ComplexTensor {
  public:
    ComplexTensor() = default;

    explicit ComplexTensor(std::vector<std::size_t> shape);

    ComplexTensor(std::vector<std::size_t> shape, std::vector<cplx> data);

    static ComplexTensor matrix(std::size_t rows, std::size_t cols);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    std::size_t extent(std::size_t axis) const { return shape_.at(axis); }

    const std::vector<cplx>& data() const { return data_; }
    std::vector<cplx>& data() { return data_; }

    cplx& operator[](std::size_t flat) { return data_[flat]; }
    const cplx& operator[](std::size_t flat) const { return data_[flat]; }

    /// Row-major flat offset of a multi-index.
    std::size_t offset(const std::vector<std::size_t>& idx) const;

    cplx at(const std::vector<std::size_t>& idx) const { return data_[offset(idx)]; }
    cplx& at(const std::vector<std::size_t>& idx) { return data_[offset(idx)]; }

    /// Same data, new shape; product of extents must match.
    ComplexTensor reshape(std::vector<std::size_t> new_shape) const;

    /// Materialized axis permutation: result axis k is old axis perm[k].
    ComplexTensor permute(const std::vector<std::size_t>& perm) const;

    ComplexTensor conjugate() const;

    ComplexTensor scaled(cplx factor) const;

    /// Value of a tensor with a single entry (all extents 1 or rank 0).
    cplx scalar() const;

    bool is_square_matrix() const { return rank() == 2 && shape_[0] == shape_[1]; }

    double max_abs() const;

  private:
    std::vector<std::size_t> shape_;
    std::vector<cplx> data_;
};

/// Sum over paired axes; result axes are the unpaired axes of a (in order)
/// followed by the unpaired axes of b.
ComplexTensor contract(const ComplexTensor& a, const ComplexTensor& b,
                       const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

/// Partial trace of a tensor over two of its own axes (equal extents).
ComplexTensor trace_axes(const ComplexTensor& t, std::size_t ax1, std::size_t ax2);

ComplexTensor tensor_product(const ComplexTensor& a, const ComplexTensor& b);

/// Eigenvalues of a Hermitian matrix, descending. Throws invariant_error if
/// the input deviates from Hermiticity by more than herm_tol entrywise.
std::vector<double> hermitian_spectrum(const ComplexTensor& m, double herm_tol = 1e-10);

struct HermitianEig {
    std::vector<double> values; // descending
    ComplexTensor vectors;      // column k is the eigenvector of values[k]
};

HermitianEig hermitian_eig(const ComplexTensor& m, double herm_tol = 1e-10);

struct SvdResult {
    ComplexTensor u;
    std::vector<double> singular_values; // descending
    ComplexTensor v; // m = u * diag(s) * v^dagger
};

SvdResult svd(const ComplexTensor& m);

std::vector<double> singular_values(const ComplexTensor& m);

/// Eigenvalues of a general square matrix, by descending magnitude.
std::vector<cplx> general_spectrum(const ComplexTensor& m);

struct GeneralEig {
    std::vector<cplx> values;   // descending magnitude
    ComplexTensor right;        // right eigenvectors as columns
    ComplexTensor left;         // left eigenvectors as columns (l^dag M = lambda l^dag)
};

GeneralEig general_eig(const ComplexTensor& m);

/// Global "numerically zero" threshold for spectra: 1e-12 * dim * max|value|.
double zero_tolerance(std::size_t dim, double max_abs);

} // namespace mixwit
