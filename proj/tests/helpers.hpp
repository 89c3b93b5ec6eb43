#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mixwit/ensembles.hpp"
#include "mixwit/qstate.hpp"
#include "mixwit/rng.hpp"
#include "mixwit/tensor.hpp"

namespace mixwit::testing {

inline PureState basis_state(int n, std::size_t label) {
    ComplexTensor amp({std::size_t{1} << n});
    amp[label] = 1.0;
    return make_pure(n, std::move(amp));
}

/// (|01> + |10>)/sqrt(2)
inline PureState bell_01_10() {
    ComplexTensor amp({4});
    amp[1] = amp[2] = 1.0 / std::sqrt(2.0);
    return make_pure(2, std::move(amp));
}

/// (|00> + |11>)/sqrt(2)
inline PureState bell_00_11() {
    ComplexTensor amp({4});
    amp[0] = amp[3] = 1.0 / std::sqrt(2.0);
    return make_pure(2, std::move(amp));
}

inline PureState ghz(int k) {
    ComplexTensor amp({std::size_t{1} << k});
    amp[0] = amp[amp.size() - 1] = 1.0 / std::sqrt(2.0);
    return make_pure(k, std::move(amp));
}

inline bool multiset_close(std::vector<double> a, std::vector<double> b, double tol,
                           bool pad_zeros = true) {
    if (pad_zeros) {
        while (a.size() < b.size()) a.push_back(0.0);
        while (b.size() < a.size()) b.push_back(0.0);
    }
    if (a.size() != b.size()) return false;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
}

inline ComplexTensor random_unitary(std::size_t d, Rng& rng) {
    // QR of a Gaussian matrix, with Gram-Schmidt done by hand to stay
    // dependency-light in test code
    std::vector<std::vector<cplx>> cols(d, std::vector<cplx>(d));
    for (std::size_t c = 0; c < d; ++c) {
        for (std::size_t r = 0; r < d; ++r) cols[c][r] = rng.gaussian_complex();
        for (std::size_t p = 0; p < c; ++p) {
            cplx ov(0.0);
            for (std::size_t r = 0; r < d; ++r) ov += std::conj(cols[p][r]) * cols[c][r];
            for (std::size_t r = 0; r < d; ++r) cols[c][r] -= ov * cols[p][r];
        }
        double nrm = 0.0;
        for (std::size_t r = 0; r < d; ++r) nrm += std::norm(cols[c][r]);
        nrm = std::sqrt(nrm);
        for (std::size_t r = 0; r < d; ++r) cols[c][r] /= nrm;
    }
    ComplexTensor u({d, d});
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) u[r * d + c] = cols[c][r];
    return u;
}

inline ComplexTensor random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    ComplexTensor m({rows, cols});
    for (auto& v : m.data()) v = rng.gaussian_complex();
    return m;
}

inline ComplexTensor random_hermitian(std::size_t d, Rng& rng) {
    ComplexTensor m = random_matrix(d, d, rng);
    ComplexTensor h({d, d});
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) h[i * d + j] = 0.5 * (m[i * d + j] + std::conj(m[j * d + i]));
    return h;
}

inline double max_abs_diff(const ComplexTensor& a, const ComplexTensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace mixwit::testing
