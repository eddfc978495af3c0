#include "dthermo/lindblad.hpp"

#include <cmath>
#include <stdexcept>

namespace dthermo::lindblad {

using std::complex;

void CollapseSet::validate() const {
  if (gamma_gl < 0.0) throw std::invalid_argument("CollapseSet: gamma_gl must be >= 0");
}

void ReadoutModel::validate() const {
  if (r_base <= 0.0) throw std::invalid_argument("ReadoutModel: r_base must be > 0");
  if (c_max < 0.0 || c_max >= 1.0)
    throw std::invalid_argument("ReadoutModel: c_max must be in [0, 1)");
}

std::vector<Eigen::Matrix3cd> collapse_operators(const CollapseSet& c) {
  c.validate();
  const double s = std::sqrt(c.gamma_gl);
  std::vector<Eigen::Matrix3cd> ops(2, Eigen::Matrix3cd::Zero());
  if (c.basis == spin::Basis::Bare) {
    ops[0](1, 0) = s;  // |0><+1|
    ops[1](1, 2) = s;  // |0><-1|
  } else {
    // |+-1> = (|B> +- |D>)/sqrt(2)
    const double r = s / std::sqrt(2.0);
    ops[0](1, 0) = r;
    ops[0](1, 2) = r;
    ops[1](1, 0) = r;
    ops[1](1, 2) = -r;
  }
  return ops;
}

void DensityMatrix::validate(double trace_tol, double psd_floor) const {
  if (!spin::is_hermitian(rho, 1e-9))
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > trace_tol || std::abs(rho.trace().imag()) > trace_tol)
    throw std::invalid_argument("DensityMatrix: trace != 1");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < psd_floor)
    throw std::invalid_argument("DensityMatrix: negative eigenvalue");
}

DensityMatrix pure_state0(spin::Basis basis) {
  DensityMatrix d;
  d.basis = basis;
  d.rho(1, 1) = 1.0;
  return d;
}

Vector9 vectorize(const Eigen::Matrix3cd& m) {
  Vector9 v;
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 3; ++r) v[3 * c + r] = m(r, c);
  return v;
}

Eigen::Matrix3cd unvectorize(const Vector9& v) {
  Eigen::Matrix3cd m;
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 3; ++r) m(r, c) = v[3 * c + r];
  return m;
}

namespace {

// kron(a, b) for 3x3 blocks, column-stacking convention
Matrix9 kron3(const Eigen::Matrix3cd& a, const Eigen::Matrix3cd& b) {
  Matrix9 out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.block<3, 3>(3 * i, 3 * j) = a(i, j) * b;
  return out;
}

}  // namespace

double Liouvillian::trace_defect() const {
  Eigen::Matrix<complex<double>, 1, 9> row =
      op.row(0) + op.row(4) + op.row(8);
  double norm = op.norm();
  double defect = row.norm();
  return norm > 0.0 ? defect / norm : defect;
}

Liouvillian build_liouvillian(const spin::Matrix3& h, const CollapseSet& c) {
  if (h.basis != c.basis)
    throw std::invalid_argument("build_liouvillian: Hamiltonian and collapse set disagree on basis");
  if (!spin::is_hermitian(h.m))
    throw std::invalid_argument("build_liouvillian: Hamiltonian is not Hermitian");

  const Eigen::Matrix3cd id = Eigen::Matrix3cd::Identity();
  const complex<double> im(0.0, 1.0);

  Liouvillian l;
  l.basis = h.basis;
  l.op = -im * (kron3(id, h.m) - kron3(h.m.transpose(), id));
  for (const auto& op : collapse_operators(c)) {
    Eigen::Matrix3cd opd_op = op.adjoint() * op;
    l.op += kron3(op.conjugate(), op) -
            0.5 * (kron3(id, opd_op) + kron3(opd_op.transpose(), id));
  }
  l.op *= kTwoPi;
  return l;
}

SteadyStateResult steady_state_info(const Liouvillian& l) {
  // append the trace constraint and solve in least squares sense
  Eigen::Matrix<complex<double>, 10, 9> m;
  m.topRows<9>() = l.op;
  m.row(9).setZero();
  m(9, 0) = m(9, 4) = m(9, 8) = 1.0;
  Eigen::Matrix<complex<double>, 10, 1> b;
  b.setZero();
  b[9] = 1.0;
  Vector9 v = m.colPivHouseholderQr().solve(b);

  SteadyStateResult out;
  Eigen::Matrix3cd rho = unvectorize(v);
  rho = 0.5 * (rho + rho.adjoint());  // symmetrize away roundoff
  rho /= rho.trace().real();
  out.rho.rho = rho;
  out.rho.basis = l.basis;

  double lnorm = l.op.norm();
  out.residual = lnorm > 0.0 ? (l.op * vectorize(rho)).norm() / lnorm : 0.0;

  Eigen::JacobiSVD<Matrix9> svd(l.op);
  const auto& sv = svd.singularValues();
  double tol = 1e-10 * sv[0];
  out.null_dim = 0;
  for (int i = 0; i < 9; ++i)
    if (sv[i] <= tol) ++out.null_dim;
  if (out.null_dim == 0) out.null_dim = 1;  // zero is always in the spectrum
  return out;
}

DensityMatrix steady_state(const Liouvillian& l) {
  SteadyStateResult r = steady_state_info(l);
  if (r.null_dim > 1)
    throw std::runtime_error("steady_state: degenerate null space (dim " +
                             std::to_string(r.null_dim) + "), steady state not unique");
  return r.rho;
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

}  // namespace

DensityMatrix evolve(const Liouvillian& l, const DensityMatrix& rho0, double t_us,
                     const EvolveOptions& opts) {
  if (rho0.basis != l.basis)
    throw std::invalid_argument("evolve: density matrix basis mismatch");
  rho0.validate(1e-8);
  if (t_us < 0.0) throw std::invalid_argument("evolve: negative time");
  if (t_us == 0.0) return rho0;

  auto f = [&](const Vector9& v) -> Vector9 { return l.op * v; };

  Vector9 y = vectorize(rho0.rho);
  double t = 0.0;
  double dt = std::min(opts.initial_dt, t_us);
  Vector9 k1 = f(y);
  long steps = 0;

  while (t < t_us) {
    if (++steps > opts.max_steps)
      throw IntegrationError("evolve: step limit exceeded at t = " + std::to_string(t) + " us", t);
    if (t + dt > t_us) dt = t_us - t;

    Vector9 k2 = f(y + dt * (kA21 * k1));
    Vector9 k3 = f(y + dt * (kA31 * k1 + kA32 * k2));
    Vector9 k4 = f(y + dt * (kA41 * k1 + kA42 * k2 + kA43 * k3));
    Vector9 k5 = f(y + dt * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
    Vector9 k6 = f(y + dt * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
    Vector9 y5 = y + dt * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    Vector9 k7 = f(y5);
    Vector9 err = dt * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

    // local error per unit time against the configured tolerance
    double scale = opts.abs_tol + opts.rel_tol * std::max(y.norm(), y5.norm());
    double enorm = err.norm() / (scale * std::max(dt, 1e-300));
    if (enorm <= 1.0) {
      t += dt;
      y = y5;
      k1 = k7;  // FSAL
    }
    double factor = enorm > 0.0 ? 0.9 * std::pow(enorm, -0.2) : 5.0;
    dt *= std::clamp(factor, 0.2, 5.0);
    if (dt <= 1e-14)
      throw IntegrationError("evolve: step size underflow at t = " + std::to_string(t) + " us", t);
  }

  DensityMatrix out;
  out.basis = l.basis;
  out.rho = unvectorize(y);
  out.rho = 0.5 * (out.rho + out.rho.adjoint());
  return out;
}

double pl_rate(const DensityMatrix& rho, const ReadoutModel& ro) {
  ro.validate();
  return ro.r_base * (1.0 - ro.c_max * (1.0 - rho.population0()));
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  Eigen::Matrix3cd diff = a.rho - b.rho;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace dthermo::lindblad
