#include "stam/expm.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace stam {

namespace {

// Projected propagator c(tau) = exp(-i sign tau T) e1 from the eigensystem of
// the real symmetric tridiagonal T.
struct TridiagonalExp {
  Eigen::MatrixXd vecs;
  Eigen::VectorXd vals;
  Eigen::VectorXd first_row;

  explicit TridiagonalExp(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    if (alpha.size() == 1) {
      vecs = Eigen::MatrixXd::Ones(1, 1);
      vals = alpha;
    } else {
      es.computeFromTridiagonal(alpha, beta.head(alpha.size() - 1), Eigen::ComputeEigenvectors);
      vecs = es.eigenvectors();
      vals = es.eigenvalues();
    }
    first_row = vecs.row(0).transpose();
  }

  Vector coefficients(double signed_tau) const {
    const Eigen::Index m = vals.size();
    Eigen::VectorXd re(m), im(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      re(i) = first_row(i) * std::cos(signed_tau * vals(i));
      im(i) = -first_row(i) * std::sin(signed_tau * vals(i));
    }
    Vector c(m);
    c.real() = vecs * re;
    c.imag() = vecs * im;
    return c;
  }

  // Only the last entry, for the error estimate.
  double last_magnitude(double signed_tau) const {
    const Eigen::Index m = vals.size();
    double re = 0.0, im = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double w = vecs(m - 1, i) * first_row(i);
      re += w * std::cos(signed_tau * vals(i));
      im -= w * std::sin(signed_tau * vals(i));
    }
    return std::hypot(re, im);
  }
};

// u <- u - alpha v - beta p, then one more Gram-Schmidt pass against v and p
// (local reorthogonalization); returns |u|. Real arithmetic on interleaved
// storage keeps the loops vectorized.
double lanczos_update(Vector& u, const Eigen::Ref<const Vector>& v, const Eigen::Ref<const Vector>& p,
                      double alpha, double beta, bool has_prev) {
  const Eigen::Index n = u.size();
  double* us = reinterpret_cast<double*>(u.data());
  const double* vs = reinterpret_cast<const double*>(v.data());
  const double* ps = reinterpret_cast<const double*>(p.data());
  const double b = has_prev ? beta : 0.0;
  // Second pass coefficients <v, u> and <p, u> accumulated with the update.
  double cvr = 0, cvi = 0, cpr = 0, cpi = 0;
  for (Eigen::Index i = 0; i < 2 * n; i += 2) {
    const double ur = us[i] - alpha * vs[i] - b * ps[i];
    const double ui = us[i + 1] - alpha * vs[i + 1] - b * ps[i + 1];
    us[i] = ur;
    us[i + 1] = ui;
    cvr += vs[i] * ur + vs[i + 1] * ui;
    cvi += vs[i] * ui - vs[i + 1] * ur;
    cpr += ps[i] * ur + ps[i + 1] * ui;
    cpi += ps[i] * ui - ps[i + 1] * ur;
  }
  if (!has_prev) cpr = cpi = 0.0;
  double nrm = 0.0;
  for (Eigen::Index i = 0; i < 2 * n; i += 2) {
    const double ur = us[i] - (cvr * vs[i] - cvi * vs[i + 1]) - (cpr * ps[i] - cpi * ps[i + 1]);
    const double ui = us[i + 1] - (cvr * vs[i + 1] + cvi * vs[i]) - (cpr * ps[i + 1] + cpi * ps[i]);
    us[i] = ur;
    us[i + 1] = ui;
    nrm += ur * ur + ui * ui;
  }
  return std::sqrt(nrm);
}

Vector krylov_action(const BandedOperator& h, double t, const Vector& psi, const KrylovOptions& options,
                     KrylovStats& st) {
  const Eigen::Index n = psi.size();
  const double sign = t > 0 ? 1.0 : -1.0;
  const double total = std::abs(t);
  const double hnorm = h.norm_bound();
  const int m_max = int(std::min<Eigen::Index>(options.max_subspace, n));
  const int m_min = std::min(options.min_subspace, m_max);

  Vector w = psi;
  if (hnorm == 0.0 || w.norm() == 0.0) return w;

  // Per-step budget is proportional to the step, floored at what rounding
  // in the projected exponential can resolve.
  auto budget = [&](double step, double scale) {
    return std::max(options.tolerance * step / total, 1e-14 * scale);
  };
  // Bound on || e^{-i tau H} v - V e^{-i tau T} e1 || from the last Krylov
  // coefficient: beta_m * int_0^tau |e_m^T e^{-isT} e1| ds <= beta_m tau |c_m(tau)|
  // when c_m grows monotonically in s.
  auto estimate = [&](double scale, double b, double step, const TridiagonalExp& te) {
    return scale * b * step * te.last_magnitude(sign * step);
  };

  double done = 0.0;
  bool full_size_last = false;
  double tau = std::min(total, 0.5 * m_max / hnorm);
  Matrix basis(n, m_max + 1);
  Eigen::VectorXd alpha(m_max), beta(m_max);
  Vector u(n);

  while (done < total) {
    if (st.steps >= options.max_steps)
      throw ConvergenceError("expm_action: step limit reached before covering the time interval",
                             st.error_estimate);
    tau = std::min(tau, total - done);
    const double b0 = w.norm();
    basis.col(0) = w * (1.0 / b0);

    // Grow the subspace until the a posteriori estimate accepts tau, checking
    // at doubling sizes. Once a step has needed the full subspace the next
    // one will too, so skip the intermediate estimates.
    int next_check = full_size_last ? m_max : m_min;
    int m = 0;
    bool breakdown = false, accepted = false;
    double err = 0.0;
    Vector coef;
    for (int j = 0; j < m_max; ++j) {
      h.apply(basis.col(j), u);
      ++st.matvecs;
      alpha(j) = basis.col(j).dot(u).real();
      if (options.full_reorthogonalization) {
        u -= alpha(j) * basis.col(j);
        if (j > 0) u -= beta(j - 1) * basis.col(j - 1);
        u -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * u);
        beta(j) = u.norm();
      } else {
        beta(j) = lanczos_update(u, basis.col(j), j > 0 ? basis.col(j - 1) : basis.col(j), alpha(j),
                                 j > 0 ? beta(j - 1) : 0.0, j > 0);
      }
      m = j + 1;
      if (beta(j) <= 1e-13 * hnorm) {
        breakdown = true;
        break;
      }
      basis.col(j + 1) = u * (1.0 / beta(j));
      if (m == next_check) {
        next_check = std::min(2 * m, m_max);
        const TridiagonalExp te(alpha.head(m), beta.head(m));
        err = estimate(b0, beta(j), tau, te);
        if (err <= budget(tau, b0)) {
          accepted = true;
          coef = te.coefficients(sign * tau);
          break;
        }
      }
    }

    if (breakdown) {
      const TridiagonalExp te(alpha.head(m), beta.head(m));
      // Invariant subspace: the projection is exact for any step length.
      tau = total - done;
      coef = te.coefficients(sign * tau);
      err = 0.0;
    } else if (!accepted) {
      const TridiagonalExp te(alpha.head(m), beta.head(m));
      // Reuse the basis with shorter steps until the estimate passes.
      for (int tries = 0;; ++tries) {
        const double ratio = err / budget(tau, b0);
        tau *= std::clamp(0.9 * std::pow(ratio, -1.0 / m), 0.05, 0.9);
        err = estimate(b0, beta(m - 1), tau, te);
        if (err <= budget(tau, b0)) {
          coef = te.coefficients(sign * tau);
          break;
        }
        if (tries > 200 || tau < 1e-300)
          throw ConvergenceError("expm_action: step size underflow", err);
      }
    }

    w = b0 * (basis.leftCols(m) * coef);
    done += tau;
    ++st.steps;
    st.error_estimate += err;
    full_size_last = !breakdown && m == m_max;
    if (accepted) {
      const double slack = err > 0.0 ? 0.9 * std::pow(err / budget(tau, b0), -1.0 / m) : 1.5;
      tau *= std::clamp(slack, 1.0, 1.5);
    }
  }
  return w;
}

}  // namespace

StateVector expm_action(const BandedOperator& h, double t, const StateVector& psi,
                        const KrylovOptions& options, KrylovStats* stats) {
  if (!h.hermitian()) throw std::invalid_argument("expm_action: Hermitian operator required");
  if (!std::isfinite(t)) throw std::invalid_argument("expm_action: time must be finite");
  if (psi.dim() != h.dim() || psi.qubit_levels() != h.qubit_levels())
    throw std::invalid_argument("expm_action: state and operator live on different spaces");
  KrylovStats local;
  KrylovStats& st = stats ? *stats : local;
  if (t == 0.0) return psi;

  if (h.is_diagonal()) {
    const Vector diag = h.diagonal();
    Vector w(psi.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = std::polar(1.0, -t * diag(i).real()) * psi.amplitudes()(i);
    ++st.steps;
    return StateVector(psi.space(), psi.qubit_levels(), std::move(w));
  }

  // Residue chains evolve independently; chains the state does not occupy
  // stay exactly zero.
  const int s = h.stride();
  const int d = h.dim();
  if (s > 1 && d >= 2 * s) {
    Vector out = Vector::Zero(psi.size());
    for (int r = 0; r < s; ++r) {
      const int len = (d - r + s - 1) / s;
      Vector sub(Eigen::Index(len) * psi.qubit_levels());
      for (int q = 0; q < psi.qubit_levels(); ++q)
        for (int i = 0; i < len; ++i) sub(q * len + i) = psi.amplitudes()(q * d + r + s * i);
      if (sub.isZero(0.0)) continue;
      const Vector res = krylov_action(h.chain(r, s), t, sub, options, st);
      for (int q = 0; q < psi.qubit_levels(); ++q)
        for (int i = 0; i < len; ++i) out(q * d + r + s * i) = res(q * len + i);
    }
    return StateVector(psi.space(), psi.qubit_levels(), std::move(out));
  }
  return StateVector(psi.space(), psi.qubit_levels(), krylov_action(h, t, psi.amplitudes(), options, st));
}

Matrix expm_dense(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("expm_dense: square matrix required");
  if (m.rows() > 4096) throw std::invalid_argument("expm_dense: dimension guard (4096) exceeded");
  return m.exp();
}

Matrix propagator_dense(const BandedOperator& h, double t) {
  return expm_dense(Complex(0.0, -t) * h.to_dense());
}

}  // namespace stam
