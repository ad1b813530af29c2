#pragma once

#include <complex>

#include <Eigen/Dense>

#include "cbrisk/network.h"

namespace cbrisk {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

enum class Sequence { positive, negative, zero };

/// Nodal admittance matrix of the branches and bus shunts, indexed like
/// `system.buses`. Positive and negative sequence share branch data (phase
/// shift is reversed for negative sequence). Zero sequence uses
/// `system.zero_sequence`; line charging and bus shunts carry no
/// zero-sequence current.
///
/// Throws SingularElementError for an in-service branch with zero series
/// impedance.
ComplexMatrix build_ybus(const PowerSystem& system, Sequence sequence = Sequence::positive);

/// Adds one branch's pi model to `y`. Exposed for the fault-node code and
/// for tests that assemble matrices element by element.
void stamp_branch(ComplexMatrix& y, std::size_t from, std::size_t to, Complex z_series,
                  double b_total, Complex tap);

}  // namespace cbrisk
