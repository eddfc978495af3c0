#pragma once

#include <complex>
#include <vector>

#include "dthermo/spin_model.hpp"

// Open-system dynamics of the driven three-level model.
//
// The master equation is integrated in angular units: a Hamiltonian entry of
// f MHz contributes a phase 2*pi*f per microsecond, and a collapse rate of
// g MHz is likewise scaled by 2*pi. Steady states are invariant under this
// common scaling; it only fixes the absolute time axis of evolve().
namespace dthermo::lindblad {

inline constexpr double kTwoPi = 6.283185307179586;

// green-laser repolarization into |0>, expressed in the tagged basis
struct CollapseSet {
  double gamma_gl = 10.0;                     // MHz
  spin::Basis basis = spin::Basis::Dressed;

  void validate() const;
};

// the two collapse operators sqrt(Gamma_gl)|0><-1|, sqrt(Gamma_gl)|0><+1|
// rotated into the working basis (rate factor included)
std::vector<Eigen::Matrix3cd> collapse_operators(const CollapseSet& c);

struct DensityMatrix {
  Eigen::Matrix3cd rho = Eigen::Matrix3cd::Zero();
  spin::Basis basis = spin::Basis::Dressed;

  void validate(double trace_tol = 1e-9, double psd_floor = -1e-9) const;
  double population0() const { return rho(1, 1).real(); }
};

DensityMatrix pure_state0(spin::Basis basis);

using Matrix9 = Eigen::Matrix<std::complex<double>, 9, 9>;
using Vector9 = Eigen::Matrix<std::complex<double>, 9, 1>;

// superoperator acting on column-stacked vec(rho)
struct Liouvillian {
  Matrix9 op = Matrix9::Zero();
  spin::Basis basis = spin::Basis::Dressed;

  // max |sum over diagonal rows|; zero for a trace-preserving generator
  double trace_defect() const;
};

Vector9 vectorize(const Eigen::Matrix3cd& m);
Eigen::Matrix3cd unvectorize(const Vector9& v);

// -i[H,rho] + sum_L (L rho L^+ - 1/2 {L^+L, rho}), scaled by 2*pi
Liouvillian build_liouvillian(const spin::Matrix3& h, const CollapseSet& c);

struct SteadyStateResult {
  DensityMatrix rho;
  int null_dim = 1;        // dimension of the numerical null space
  double residual = 0.0;   // ||L vec(rho)|| / ||L||
};

// steady state via the trace-constrained linear system
SteadyStateResult steady_state_info(const Liouvillian& l);

// convenience wrapper; throws if the null space is degenerate
DensityMatrix steady_state(const Liouvillian& l);

struct EvolveOptions {
  double rel_tol = 1e-9;     // local error per unit time
  double abs_tol = 1e-12;
  double initial_dt = 1e-3;  // us
  long max_steps = 2000000;
};

struct IntegrationError : std::runtime_error {
  double t_reached;
  IntegrationError(const std::string& msg, double t)
      : std::runtime_error(msg), t_reached(t) {}
};

// adaptive Dormand-Prince propagation of vec(rho) to time t (us)
DensityMatrix evolve(const Liouvillian& l, const DensityMatrix& rho0, double t_us,
                     const EvolveOptions& opts = {});

// affine photoluminescence readout: R_base * (1 - C_max * (1 - rho00))
struct ReadoutModel {
  double r_base = 1e6;   // counts/s off resonance
  double c_max = 0.2;    // maximum contrast

  void validate() const;
};

double pl_rate(const DensityMatrix& rho, const ReadoutModel& ro);

// (1/2)||a - b||_1
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace dthermo::lindblad
