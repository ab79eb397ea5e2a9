#include "qline/psdfactor.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace qline {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void symmetric_swap(Matrix& w, Eigen::Index a, Eigen::Index b) {
  if (a == b) return;
  w.row(a).swap(w.row(b));
  w.col(a).swap(w.col(b));
}

// Eigenpairs of [[a, b], [b, c]] by a single Jacobi rotation.
void eigen_2x2(double a, double b, double c, double& l1, double& l2, Eigen::Matrix2d& q) {
  if (b == 0.0) {
    l1 = a;
    l2 = c;
    q.setIdentity();
    return;
  }
  const double tau = (c - a) / (2.0 * b);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
  const double cs = 1.0 / std::hypot(1.0, t);
  const double sn = t * cs;
  // Columns (cs, -sn) and (sn, cs) carry a - t b and c + t b.
  double lo = a - t * b, hi = c + t * b;
  Eigen::Vector2d vlo(cs, -sn), vhi(sn, cs);
  if (lo > hi) {
    std::swap(lo, hi);
    std::swap(vlo, vhi);
  }
  l1 = hi;
  l2 = lo;
  q.col(0) = vhi;
  q.col(1) = vlo;
}

// y = L^{-1} P b
Vector forward(const FactorizationBundle& f, const Vector& b) {
  const Eigen::Index n = f.size();
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = b[f.permutation[static_cast<size_t>(i)]];
  return f.lower.triangularView<Eigen::UnitLower>().solve(y);
}

// x = P^T L^{-T} z
Vector backward(const FactorizationBundle& f, const Vector& z) {
  const Vector y = f.lower.transpose().triangularView<Eigen::UnitUpper>().solve(z);
  Vector x(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) x[f.permutation[static_cast<size_t>(i)]] = y[i];
  return x;
}

// z = Q diag(1/lambda) Q^T y, blockwise.
Vector block_solve(const FactorizationBundle& f, const Vector& lambda, const Vector& y) {
  Vector z(y.size());
  for (const PivotBlock& blk : f.blocks) {
    const auto q = f.block_eigenvectors.block(blk.start, blk.start, blk.size, blk.size);
    const Vector c = q.transpose() * y.segment(blk.start, blk.size);
    const Vector scaled = c.cwiseQuotient(lambda.segment(blk.start, blk.size));
    z.segment(blk.start, blk.size) = q * scaled;
  }
  return z;
}

}  // namespace

double inf_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

Matrix FactorizationBundle::permutation_matrix() const {
  const Eigen::Index n = size();
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) p(i, permutation[static_cast<size_t>(i)]) = 1.0;
  return p;
}

FactorizationBundle::Inertia FactorizationBundle::inertia(double zero_tolerance) const {
  Inertia out;
  for (Eigen::Index i = 0; i < block_eigenvalues.size(); ++i) {
    const double l = block_eigenvalues[i];
    if (l > zero_tolerance) {
      ++out.positive;
    } else if (l < -zero_tolerance) {
      ++out.negative;
    } else {
      ++out.zero;
    }
  }
  return out;
}

Vector FactorizationBundle::solve(const Vector& b) const {
  if (b.size() != size()) throw InvalidArgument("right-hand side has wrong dimension");
  const double scale = block_eigenvalues.size() ? block_eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  const double floor = static_cast<double>(size()) * kEps * scale;
  for (Eigen::Index i = 0; i < block_eigenvalues.size(); ++i) {
    if (std::abs(block_eigenvalues[i]) <= floor) {
      throw NumericFailure("singular block in symmetric indefinite factorization");
    }
  }
  return backward(*this, block_solve(*this, block_eigenvalues, forward(*this, b)));
}

FactorizationBundle ldl_factor(const Matrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("ldl_factor requires a square matrix");
  if (!a.allFinite()) throw NumericFailure("ldl_factor: non-finite matrix entry");
  const Eigen::Index n = a.rows();
  const double norm = inf_norm(a);
  const double asym = n ? (a - a.transpose()).cwiseAbs().maxCoeff() : 0.0;
  if (asym > 1e-10 * norm) {
    std::ostringstream os;
    os << "ldl_factor: matrix is not symmetric (max asymmetry " << asym << ")";
    throw InvalidArgument(os.str());
  }

  const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
  Matrix w = 0.5 * (a + a.transpose());

  FactorizationBundle f;
  f.permutation.resize(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) f.permutation[static_cast<size_t>(i)] = i;
  f.lower = Matrix::Identity(n, n);
  f.block_diagonal = Matrix::Zero(n, n);

  auto swap_all = [&](Eigen::Index k, Eigen::Index p, Eigen::Index r) {
    // Interchange positions p and r (p, r >= k); earlier L columns follow.
    if (p == r) return;
    symmetric_swap(w, p, r);
    std::swap(f.permutation[static_cast<size_t>(p)], f.permutation[static_cast<size_t>(r)]);
    if (k > 0) f.lower.block(p, 0, 1, k).swap(f.lower.block(r, 0, 1, k));
  };

  Eigen::Index k = 0;
  while (k < n) {
    const double absakk = std::abs(w(k, k));
    Eigen::Index r = k;
    double colmax = 0.0;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (std::abs(w(i, k)) > colmax) {
        colmax = std::abs(w(i, k));
        r = i;
      }
    }

    Eigen::Index pivot_size = 1;
    if (std::max(absakk, colmax) == 0.0 || absakk >= alpha * colmax) {
      // 1x1 pivot in place
    } else {
      double rowmax = 0.0;
      for (Eigen::Index j = k; j < n; ++j) {
        if (j != r) rowmax = std::max(rowmax, std::abs(w(r, j)));
      }
      if (absakk * rowmax >= alpha * colmax * colmax) {
        // 1x1 pivot in place
      } else if (std::abs(w(r, r)) >= alpha * rowmax) {
        swap_all(k, k, r);
      } else {
        pivot_size = 2;
        swap_all(k, k + 1, r);
      }
    }

    const Eigen::Index rest = n - k - pivot_size;
    if (pivot_size == 1) {
      const double d = w(k, k);
      f.block_diagonal(k, k) = d;
      if (rest > 0 && d != 0.0) {
        const Vector l = w.block(k + 1, k, rest, 1) / d;
        f.lower.block(k + 1, k, rest, 1) = l;
        w.block(k + 1, k + 1, rest, rest).noalias() -= d * l * l.transpose();
      }
    } else {
      const Eigen::Matrix2d e = w.block<2, 2>(k, k);
      f.block_diagonal.block<2, 2>(k, k) = e;
      if (rest > 0) {
        const Matrix c = w.block(k + 2, k, rest, 2);
        const Matrix l = c * e.inverse();
        f.lower.block(k + 2, k, rest, 2) = l;
        w.block(k + 2, k + 2, rest, rest).noalias() -= l * c.transpose();
      }
    }
    if (rest > 0) {
      auto trailing = w.block(n - rest, n - rest, rest, rest);
      const Matrix sym = 0.5 * (trailing + trailing.transpose());
      trailing = sym;
    }
    f.blocks.push_back({k, pivot_size});
    k += pivot_size;
  }

  BlockSpectrum spec = block_spectral(f.block_diagonal, f.blocks);
  f.block_eigenvectors = std::move(spec.eigenvectors);
  f.block_eigenvalues = std::move(spec.eigenvalues);
  return f;
}

BlockSpectrum block_spectral(const Matrix& b, const std::vector<PivotBlock>& blocks) {
  const Eigen::Index n = b.rows();
  BlockSpectrum out{Matrix::Identity(n, n), Vector::Zero(n)};
  for (const PivotBlock& blk : blocks) {
    if (blk.size == 1) {
      out.eigenvalues[blk.start] = b(blk.start, blk.start);
    } else if (blk.size == 2) {
      const Eigen::Index s = blk.start;
      double l1 = 0.0, l2 = 0.0;
      Eigen::Matrix2d q;
      eigen_2x2(b(s, s), 0.5 * (b(s, s + 1) + b(s + 1, s)), b(s + 1, s + 1), l1, l2, q);
      out.eigenvalues[s] = l1;
      out.eigenvalues[s + 1] = l2;
      out.eigenvectors.block<2, 2>(s, s) = q;
    } else {
      throw InvalidArgument("block_spectral: pivot blocks must be 1x1 or 2x2");
    }
  }
  return out;
}

double default_delta(const Matrix& a) {
  return std::sqrt(kEps) * std::max(1.0, inf_norm(a));
}

PsdModification psd_modify(const Matrix& a) { return psd_modify(a, default_delta(a)); }

PsdModification psd_modify(const Matrix& a, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("psd_modify: delta must be positive");
  PsdModification m;
  m.delta = delta;
  m.factorization = ldl_factor(a);
  const FactorizationBundle& f = m.factorization;
  const Eigen::Index n = f.size();

  m.shifts = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lambda = f.block_eigenvalues[i];
    if (lambda < delta) m.shifts[i] = delta - lambda;
  }
  m.modified_eigenvalues = f.block_eigenvalues + m.shifts;

  m.shift = Matrix::Zero(n, n);
  for (const PivotBlock& blk : f.blocks) {
    const auto q = f.block_eigenvectors.block(blk.start, blk.start, blk.size, blk.size);
    m.shift.block(blk.start, blk.start, blk.size, blk.size) =
        q * m.shifts.segment(blk.start, blk.size).asDiagonal() * q.transpose();
  }

  if (m.shifts.isZero(0.0)) {
    m.modified_matrix = 0.5 * (a + a.transpose());
    m.modification_frobenius = 0.0;
    return m;
  }

  // E = P^T L F L^T P
  const Matrix lfl = f.lower * m.shift * f.lower.transpose();
  Matrix e(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      e(f.permutation[static_cast<size_t>(i)], f.permutation[static_cast<size_t>(j)]) = lfl(i, j);
    }
  }
  e = (0.5 * (e + e.transpose())).eval();
  m.modification_frobenius = e.norm();
  m.modified_matrix = 0.5 * (a + a.transpose()) + e;
  return m;
}

Vector PsdModification::solve(const Vector& b) const {
  if (b.size() != factorization.size()) {
    throw InvalidArgument("right-hand side has wrong dimension");
  }
  return backward(factorization,
                  block_solve(factorization, modified_eigenvalues, forward(factorization, b)));
}

double PsdModification::block_condition() const {
  if (modified_eigenvalues.size() == 0) return 1.0;
  const Vector mags = modified_eigenvalues.cwiseAbs();
  return mags.maxCoeff() / mags.minCoeff();
}

}  // namespace qline
