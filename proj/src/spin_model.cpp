#include "dthermo/spin_model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dthermo::spin {

void NVParams::validate() const {
  if (d0 <= 0.0) throw std::invalid_argument("NVParams: d0 must be > 0");
  if (gamma_e <= 0.0) throw std::invalid_argument("NVParams: gamma_e must be > 0");
  if (strain_e < 0.0) throw std::invalid_argument("NVParams: strain_e must be >= 0");
}

void FieldVector::validate() const {
  if (b_mag < 0.0) throw std::invalid_argument("FieldVector: b_mag must be >= 0");
  if (theta < 0.0 || theta > 1.5707963267948966 + 1e-12)
    throw std::invalid_argument("FieldVector: theta must be in [0, pi/2]");
}

bool is_hermitian(const Eigen::Matrix3cd& m, double rel_tol) {
  double scale = m.norm();
  if (scale == 0.0) return true;
  return (m - m.adjoint()).norm() <= rel_tol * scale;
}

Matrix3 bare_hamiltonian(const NVParams& nv, const FieldVector& b, double t_shift_k) {
  nv.validate();
  b.validate();
  const double d = nv.d_at(t_shift_k);
  const double gbz = nv.gamma_e * b.bz();
  // spin-1 matrix element of Sx between |+-1> and |0> carries 1/sqrt(2)
  const double gbx = nv.gamma_e * b.bx() / std::sqrt(2.0);
  Matrix3 h;
  h.basis = Basis::Bare;
  h.m << d + gbz, gbx, nv.strain_e,
         gbx, 0.0, gbx,
         nv.strain_e, gbx, d - gbz;
  return h;
}

Eigen::Vector3d eigenvalues_sorted(const Matrix3& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(h.m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();  // ascending by construction
}

std::pair<double, double> transition_frequencies(const Matrix3& h) {
  if (h.basis != Basis::Bare)
    throw std::invalid_argument("transition_frequencies: expected a bare-basis Hamiltonian");
  if (!is_hermitian(h.m))
    throw std::invalid_argument("transition_frequencies: matrix is not Hermitian");
  Eigen::Vector3d e = eigenvalues_sorted(h);
  return {e[1] - e[0], e[2] - e[0]};
}

LambdaApprox lambda_approx(const NVParams& nv, const FieldVector& b) {
  nv.validate();
  b.validate();
  const double d = nv.d0;
  const double gbz = nv.gamma_e * b.bz();
  const double gbx = nv.gamma_e * b.bx();
  const double corr = 1.5 * gbx * gbx / d;
  LambdaApprox out;
  out.lambda_minus = d - gbz + corr;
  out.lambda_plus = d + gbz + corr;
  out.series_ok = gbx / d < 0.2;
  return out;
}

DriveParams resonant_drive(const NVParams& nv, const FieldVector& b, double omega) {
  if (omega <= 0.0) throw std::invalid_argument("resonant_drive: omega must be > 0");
  auto [w1, w2] = transition_frequencies(bare_hamiltonian(nv, b));
  DriveParams drive;
  drive.omega = omega;
  drive.omega1 = w1;
  drive.omega2 = w2;
  drive.valid = nv.gamma_e * b.bz() > omega;
  if (!drive.valid) {
    std::ostringstream msg;
    msg << "drive invalid: gamma_e*Bz = " << nv.gamma_e * b.bz()
        << " MHz must exceed Omega = " << omega
        << " MHz to address the two transitions independently";
    drive.diagnostic = msg.str();
  }
  return drive;
}

DressedDetuning dressed_detuning(const NVParams& nv, const FieldVector& b,
                                 const RawDetuning& raw) {
  nv.validate();
  b.validate();
  DressedDetuning det;
  det.delta_d = raw.d_shift +
                3.0 * (nv.gamma_e * b.bx() / nv.d0) * nv.gamma_e * raw.dbx;
  det.delta_b = nv.gamma_e * raw.dbz;
  return det;
}

Matrix3 dressed_hamiltonian(const DressedDetuning& det, const DriveParams& drive) {
  if (!drive.valid)
    throw std::invalid_argument("dressed_hamiltonian: " +
                                (drive.diagnostic.empty()
                                     ? std::string("drive validity flag not set")
                                     : drive.diagnostic));
  const double g = std::sqrt(2.0) * drive.omega;
  Matrix3 h;
  h.basis = Basis::Dressed;
  h.m << det.delta_d, g, det.delta_b,
         g, 0.0, 0.0,
         det.delta_b, 0.0, det.delta_d;
  return h;
}

Matrix3 dressed_from_bare(const NVParams& nv, const FieldVector& b,
                          const RawDetuning& raw, const DriveParams& drive) {
  return dressed_hamiltonian(dressed_detuning(nv, b, raw), drive);
}

}  // namespace dthermo::spin
