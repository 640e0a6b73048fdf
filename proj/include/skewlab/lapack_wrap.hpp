#pragma once

// LAPACK bindings for the dense complex eigen/singular decompositions.
// Eigen is used as the matrix container (column-major, matching LAPACK).

#include <complex>
#define lapack_complex_double std::complex<double>
#define lapack_complex_float std::complex<float>
#include <lapacke.h>

#include <Eigen/Dense>

#include "skewlab/common.hpp"

namespace skewlab {

using MatrixXc = Eigen::MatrixXcd;

struct EigResult {
    std::vector<cpx> values;  // sorted by decreasing modulus
    MatrixXc vectors;         // right eigenvectors (columns), if requested
};

inline EigResult eig_dense(const MatrixXc& T, bool with_vectors = false) {
    const lapack_int n = lapack_int(T.rows());
    MatrixXc a = T;  // zgeev overwrites its input
    std::vector<cpx> w(n);
    MatrixXc vr;
    if (with_vectors) vr.resize(n, n);
    const lapack_int info =
        LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', with_vectors ? 'V' : 'N', n, a.data(), n, w.data(),
                      nullptr, 1, with_vectors ? vr.data() : nullptr, with_vectors ? n : 1);
    if (info != 0)
        throw NumericalGateError("zgeev failed to converge (info=" + std::to_string(info) + ")");

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        const double mi = std::abs(w[i]), mj = std::abs(w[j]);
        if (mi != mj) return mi > mj;
        return w[i].real() > w[j].real();
    });
    EigResult res;
    res.values.resize(n);
    if (with_vectors) res.vectors.resize(n, n);
    for (int i = 0; i < n; ++i) {
        res.values[i] = w[order[i]];
        if (with_vectors) res.vectors.col(i) = vr.col(order[i]);
    }
    return res;
}

inline std::vector<double> singular_values_dense(const MatrixXc& T) {
    const lapack_int n = lapack_int(T.rows());
    MatrixXc a = T;
    std::vector<double> s(n);
    const lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', n, n, a.data(), n, s.data(),
                                           nullptr, 1, nullptr, 1);
    if (info != 0)
        throw NumericalGateError("zgesdd failed to converge (info=" + std::to_string(info) + ")");
    return s;  // LAPACK returns them in decreasing order
}

}  // namespace skewlab
