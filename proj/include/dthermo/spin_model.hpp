#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>

// Ground-state spin Hamiltonians of a single NV orientation class.
//
// Conventions used throughout the package:
//   - energies/frequencies in MHz, magnetic fields in G, angles in rad
//   - bare basis ordering  |+1>, |0>, |-1>
//   - dressed basis ordering |Bright>, |0>, |Dark>, with
//     |Bright/Dark> = (|+1> +- |-1>)/sqrt(2)
namespace dthermo::spin {

enum class Basis { Bare, Dressed };

// physical constants of one NV orientation class
struct NVParams {
  double d0 = 2870.0;       // zero-field splitting at reference temperature, MHz
  double dd_dt = -0.074;    // thermal shift dD/dT, MHz/K (sign carried as given)
  double gamma_e = 2.8;     // electron gyromagnetic ratio, MHz/G
  double strain_e = 0.0;    // off-axis strain E, MHz

  void validate() const;
  double d_at(double t_shift_k) const { return d0 + dd_dt * t_shift_k; }
};

// static field described by magnitude and angle to the NV axis
struct FieldVector {
  double b_mag = 0.0;   // G
  double theta = 0.0;   // rad, in [0, pi/2]

  void validate() const;
  double bz() const { return b_mag * std::cos(theta); }
  double bx() const { return b_mag * std::sin(theta); }
};

// two-tone drive; valid only when the Zeeman splitting separates the tones
struct DriveParams {
  double omega = 0.0;    // per-tone Rabi frequency, MHz
  double omega1 = 0.0;   // lower transition tone, MHz
  double omega2 = 0.0;   // upper transition tone, MHz
  bool valid = false;
  std::string diagnostic;

  double splitting() const { return omega2 - omega1; }
  double f_avg() const { return 0.5 * (omega1 + omega2); }
};

// tones placed on the exact transition frequencies at the reference condition
DriveParams resonant_drive(const NVParams& nv, const FieldVector& b, double omega);

// environmental shifts relative to the reference condition
struct RawDetuning {
  double d_shift = 0.0;   // shift of D(T), MHz
  double dbz = 0.0;       // axial field shift, G
  double dbx = 0.0;       // transverse field shift, G
};

// detuning entries of the dressed-frame Hamiltonian (recomputed, never cached)
struct DressedDetuning {
  double delta_d = 0.0;   // MHz
  double delta_b = 0.0;   // MHz
};

DressedDetuning dressed_detuning(const NVParams& nv, const FieldVector& b,
                                 const RawDetuning& raw);

// 3x3 Hermitian matrix tagged with its basis ordering
struct Matrix3 {
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  Basis basis = Basis::Bare;
};

bool is_hermitian(const Eigen::Matrix3cd& m, double rel_tol = 1e-12);

// lab-frame Hamiltonian with D(T) = D0 + dD/dT * t_shift
Matrix3 bare_hamiltonian(const NVParams& nv, const FieldVector& b, double t_shift_k = 0.0);

// eigenvalues ascending
Eigen::Vector3d eigenvalues_sorted(const Matrix3& h);

// transition frequencies (e1-e0, e2-e0) of a bare-basis Hamiltonian
std::pair<double, double> transition_frequencies(const Matrix3& h);

struct LambdaApprox {
  double lambda_minus = 0.0;   // MHz
  double lambda_plus = 0.0;    // MHz
  bool series_ok = true;       // false once gamma_e*Bx/D >= 0.2
};

// second-order level splittings lambda_-+ = D -+ gamma_e*Bz + (3/2)(gamma_e*Bx)^2/D
LambdaApprox lambda_approx(const NVParams& nv, const FieldVector& b);

// dressed-basis doubly-rotating-frame Hamiltonian
//   [[delta_D, sqrt(2) Omega, delta_B],
//    [sqrt(2) Omega, 0, 0],
//    [delta_B, 0, delta_D]]
Matrix3 dressed_hamiltonian(const DressedDetuning& det, const DriveParams& drive);

// convenience: raw detunings -> dressed detunings -> dressed Hamiltonian
Matrix3 dressed_from_bare(const NVParams& nv, const FieldVector& b,
                          const RawDetuning& raw, const DriveParams& drive);

}  // namespace dthermo::spin
