#include "cbrisk/kron.h"

#include <algorithm>
#include <cmath>

#include "cbrisk/errors.h"

namespace cbrisk {

ComplexMatrix kron_reduce(const ComplexMatrix& y, const std::vector<std::size_t>& keep) {
    const auto n = static_cast<std::size_t>(y.rows());
    if (y.rows() != y.cols()) throw DomainError("kron_reduce: matrix is not square");

    std::vector<bool> kept(n, false);
    for (auto k : keep) {
        if (k >= n) throw DomainError("kron_reduce: kept node " + std::to_string(k) + " out of range");
        if (kept[k]) throw DomainError("kron_reduce: node " + std::to_string(k) + " listed twice");
        kept[k] = true;
    }

    ComplexMatrix work = y;
    const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
    for (std::size_t p = 0; p < n; ++p) {
        if (kept[p]) continue;
        const auto pi = static_cast<Eigen::Index>(p);
        const Complex pivot = work(pi, pi);
        if (!(std::abs(pivot) > 1e-13 * scale)) {
            throw NumericalError("kron_reduce: eliminated block is singular at node " + std::to_string(p));
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == p || work(i, pi) == Complex{}) continue;
            const auto ii = static_cast<Eigen::Index>(i);
            const Complex factor = work(ii, pi) / pivot;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == p) continue;
                const auto jj = static_cast<Eigen::Index>(j);
                work(ii, jj) -= factor * work(pi, jj);
            }
            work(ii, pi) = 0.0;
        }
        work.row(pi).setZero();
        work(pi, pi) = 0.0;
    }

    const auto m = static_cast<Eigen::Index>(keep.size());
    ComplexMatrix out(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            out(i, j) = work(static_cast<Eigen::Index>(keep[i]), static_cast<Eigen::Index>(keep[j]));
        }
    }
    return out;
}

}  // namespace cbrisk
