#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "gridscale/grid/case.hpp"
#include "gridscale/powerflow/ybus.hpp"

namespace gridscale::powerflow {

enum class SolveStatus { converged, singular_jacobian, diverged };

std::string_view to_string(SolveStatus status);

struct SolveOptions {
  double tolerance = 1e-8;  ///< max |power mismatch|, pu
  int max_iterations = 20;  ///< per Newton run
  bool enforce_q_limits = true;
  int max_q_limit_rounds = 20;
};

/// Per-generator overrides applied on top of the case data. Empty vectors
/// mean "no overrides"; otherwise each must have one entry per generator.
struct Setpoints {
  std::vector<std::optional<double>> p_mw;
  std::vector<std::optional<double>> v_pu;
};

struct SteadyStateSolution {
  SolveStatus status = SolveStatus::diverged;
  bool converged = false;
  int iterations = 0;       ///< Newton updates summed over all Q-limit rounds
  double max_mismatch = 0;  ///< pu, at the returned iterate
  std::string message;

  std::vector<double> v_mag;  ///< pu, per bus
  std::vector<double> v_ang;  ///< rad, per bus
  std::vector<double> p_inj;  ///< MW, generation minus load per bus
  std::vector<double> q_inj;  ///< MVAr
  std::vector<double> gen_p;  ///< MW, per generator (0 when out of service)
  std::vector<double> gen_q;  ///< MVAr
  std::vector<std::complex<double>> s_from;  ///< MVA per branch (0 when out of service)
  std::vector<std::complex<double>> s_to;
  std::vector<double> branch_loading;  ///< max(|s_from|, |s_to|) / rate_mva, per branch
  std::vector<bool> q_limited;         ///< generators switched to PQ by limit enforcement
  double losses = 0;                   ///< MW, series and shunt losses
};

/// Polar Newton-Raphson AC power flow from a flat start. The solver owns its
/// scratch space; use one instance per thread.
class PowerFlowSolver {
 public:
  SteadyStateSolution solve(const grid::NetworkCase& network, const Setpoints& setpoints = {},
                            const SolveOptions& options = {});

 private:
  struct NewtonResult {
    SolveStatus status;
    int iterations;
    double mismatch;
    std::string message;
  };

  NewtonResult run_newton(const SparseComplex& ybus, const Eigen::VectorXcd& s_spec, Eigen::VectorXcd& v,
                          const std::vector<int>& pv, const std::vector<int>& pq, const SolveOptions& options);

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

/// Convenience wrapper around a temporary solver.
SteadyStateSolution solve_power_flow(const grid::NetworkCase& network, const Setpoints& setpoints = {},
                                     const SolveOptions& options = {});

/// Loading ratios of in-service branches, in branch order. Throws if the
/// solution did not converge.
std::vector<double> branch_loadings(const SteadyStateSolution& solution, const grid::NetworkCase& network);

}  // namespace gridscale::powerflow
