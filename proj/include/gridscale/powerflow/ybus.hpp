#pragma once

#include <complex>
#include <vector>

#include <Eigen/Sparse>

#include "gridscale/grid/case.hpp"

namespace gridscale::powerflow {

using Complex = std::complex<double>;
using SparseComplex = Eigen::SparseMatrix<Complex>;

/// Per-branch two-port admittances (pu), pi model with off-nominal tap and
/// phase shift on the from side:  I_from = yff V_from + yft V_to,
/// I_to = ytf V_from + ytt V_to.
struct BranchAdmittance {
  Complex yff, yft, ytf, ytt;
};

BranchAdmittance branch_admittance(const grid::Branch& branch);

/// Bus admittance matrix over in-service branches plus bus shunts, indexed by
/// bus position in the case.
SparseComplex build_ybus(const grid::NetworkCase& network);

}  // namespace gridscale::powerflow
