#pragma once

#include <cstddef>
#include <vector>

#include "cbrisk/ybus.h"

namespace cbrisk {

/// Eliminates every node not listed in `keep` from `y`, one node at a time:
/// Y_red = Y_kk - Y_ke Y_ee^-1 Y_ek. The result is ordered like `keep`.
///
/// Throws NumericalError naming the node whose pivot vanished when the
/// eliminated block is singular.
ComplexMatrix kron_reduce(const ComplexMatrix& y, const std::vector<std::size_t>& keep);

}  // namespace cbrisk
