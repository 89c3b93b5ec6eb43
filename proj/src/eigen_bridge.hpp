#pragma once

#include <Eigen/Dense>

#include "mixwit/tensor.hpp"

namespace mixwit::detail {

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<const RowMat> map_matrix(const ComplexTensor& t, std::size_t rows, std::size_t cols) {
    return Eigen::Map<const RowMat>(t.data().data(), static_cast<Eigen::Index>(rows),
                                    static_cast<Eigen::Index>(cols));
}

inline Eigen::Map<const RowMat> map_matrix(const ComplexTensor& t) {
    return map_matrix(t, t.extent(0), t.extent(1));
}

inline ComplexTensor from_eigen(const Eigen::MatrixXcd& m) {
    ComplexTensor out({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
    Eigen::Map<RowMat>(out.data().data(), m.rows(), m.cols()) = m;
    return out;
}

inline Eigen::MatrixXcd to_eigen(const ComplexTensor& t, std::size_t rows, std::size_t cols) {
    return map_matrix(t, rows, cols);
}

inline Eigen::MatrixXcd to_eigen(const ComplexTensor& t) { return map_matrix(t); }

} // namespace mixwit::detail
