#include "rlab/tensor.hpp"

#include <cmath>

#include "rlab/error.hpp"

namespace rlab {

namespace {

SmallMat inverse_spd(const SmallMat& g) {
  Eigen::LLT<SmallMat> llt(g);
  SmallMat inv = llt.solve(SmallMat::Identity(g.rows(), g.cols()));
  return 0.5 * (inv + inv.transpose());
}

void require_dim4(int dim, const char* what) {
  if (dim != 4) throw InvalidArgument(std::string(what) + " is defined in dimension 4 only");
}

}  // namespace

Connection christoffel(const MetricJets& j, const SmallMat& gi) {
  const int n = static_cast<int>(j.g.rows());
  Tensor3 first(n);  // first(a,i,j) = Γ_aij
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i)
      for (int k = i; k < n; ++k) first(a, i, k) = first(a, k, i) = 0.5 * (j.dg(i, k, a) + j.dg(k, i, a) - j.dg(a, i, k));

  Connection c{Tensor3(n), Tensor4(n)};
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int l = i; l < n; ++l) {
        double s = 0.0;
        for (int a = 0; a < n; ++a) s += gi(k, a) * first(a, i, l);
        c.gamma(k, i, l) = c.gamma(k, l, i) = s;
      }

  // ∂_m Γ^k_ij = g^{ka} (∂_m Γ_aij − ∂_m g_ab Γ^b_ij)
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int l = i; l < n; ++l) {
        double t[kMaxDim];
        for (int a = 0; a < n; ++a) {
          double v = 0.5 * (j.d2g(m, i, l, a) + j.d2g(m, l, i, a) - j.d2g(m, a, i, l));
          for (int b = 0; b < n; ++b) v -= j.dg(m, a, b) * c.gamma(b, i, l);
          t[a] = v;
        }
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int a = 0; a < n; ++a) s += gi(k, a) * t[a];
          c.dgamma(m, k, i, l) = c.dgamma(m, k, l, i) = s;
        }
      }
  return c;
}

Connection christoffel(const MetricField& metric, std::span<const double> point) {
  const MetricJets j = metric_jets(metric, point);
  return christoffel(j, inverse_spd(j.g));
}

CurvaturePoint curvature_at(const MetricField& metric, std::span<const double> point) {
  const MetricJets j = metric_jets(metric, point);
  const int n = metric.dim();
  CurvaturePoint cp;
  cp.dim = n;
  cp.point = to_vec(point);
  cp.g = j.g;
  cp.g_inv = inverse_spd(j.g);
  Connection c = christoffel(j, cp.g_inv);
  cp.gamma = c.gamma;
  cp.dgamma = c.dgamma;

  // Textbook (1,3) tensor: R^m_kij = ∂_iΓ^m_jk − ∂_jΓ^m_ik + Γ^m_ia Γ^a_jk − Γ^m_ja Γ^a_ik,
  // lowered with the opposite sign: R_ijkl = −g_lm R^m_kij.
  Tensor4 up(n);
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < n; ++jj) {
          double v = cp.dgamma(i, m, jj, k) - cp.dgamma(jj, m, i, k);
          for (int a = 0; a < n; ++a) v += cp.gamma(m, i, a) * cp.gamma(a, jj, k) - cp.gamma(m, jj, a) * cp.gamma(a, i, k);
          up(m, k, i, jj) = v;
        }
  cp.riem = Tensor4(n);
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double v = 0.0;
          for (int m = 0; m < n; ++m) v -= cp.g(l, m) * up(m, k, i, jj);
          cp.riem(i, jj, k, l) = v;
        }

  cp.ricci = SmallMat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      double v = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) v += cp.g_inv(a, b) * cp.riem(i, a, k, b);
      cp.ricci(i, k) = v;
    }
  cp.scalar = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) cp.scalar += cp.g_inv(i, k) * cp.ricci(i, k);
  return cp;
}

double CurvaturePoint::riem_apply(const SmallVec& x, const SmallVec& y, const SmallVec& z, const SmallVec& w) const {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    if (x[i] == 0.0) continue;
    for (int j = 0; j < dim; ++j) {
      if (y[j] == 0.0) continue;
      double t = 0.0;
      for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l) t += riem(i, j, k, l) * z[k] * w[l];
      s += x[i] * y[j] * t;
    }
  }
  return s;
}

SmallVec CurvaturePoint::riem_operator(const SmallVec& x, const SmallVec& y, const SmallVec& z) const {
  SmallVec low(dim);
  for (int l = 0; l < dim; ++l) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k) s += riem(i, j, k, l) * x[i] * y[j] * z[k];
    low[l] = s;
  }
  return g_inv * low;
}

double CurvaturePoint::scale() const { return frame_components(*this, cholesky_frame(*this)).max_abs(); }

double sectional(const CurvaturePoint& cp, const SmallVec& v, const SmallVec& w) {
  const double vv = cp.inner(v, v), ww = cp.inner(w, w), vw = cp.inner(v, w);
  const double gram = vv * ww - vw * vw;
  if (!(gram > 1e-14 * vv * ww)) throw InvalidArgument("sectional curvature of a degenerate plane");
  return cp.riem_apply(v, w, v, w) / gram;
}

Frame cholesky_frame(const CurvaturePoint& cp) {
  Eigen::LLT<SmallMat> llt(cp.g);
  const SmallMat l = llt.matrixL();
  Frame f;
  f.vectors = l.triangularView<Eigen::Lower>().solve(SmallMat::Identity(cp.dim, cp.dim));
  f.point = cp.point;
  return f;
}

Tensor4 frame_components(const CurvaturePoint& cp, const Frame& frame) {
  const int n = cp.dim;
  const SmallMat& e = frame.vectors;
  Tensor4 a(n), b(n);
  // Contract one slot at a time.
  for (int p = 0; p < n; ++p)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int i = 0; i < n; ++i) s += e(p, i) * cp.riem(i, j, k, l);
          a(p, j, k, l) = s;
        }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int j = 0; j < n; ++j) s += e(q, j) * a(p, j, k, l);
          b(p, q, k, l) = s;
        }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int k = 0; k < n; ++k) s += e(r, k) * b(p, q, k, l);
          a(p, q, r, l) = s;
        }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int t = 0; t < n; ++t) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) s += e(t, l) * a(p, q, r, l);
          b(p, q, r, t) = s;
        }
  return b;
}

double pfaffian_norm(const CurvaturePoint& cp) {
  require_dim4(cp.dim, "pfaffian_norm");
  const Tensor4 r = frame_components(cp, cholesky_frame(cp));
  double r2 = 0.0, ric2 = 0.0, scal = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 4; ++c) {
      double ric = 0.0;
      for (int b = 0; b < 4; ++b) {
        ric += r(a, b, c, b);
        for (int d = 0; d < 4; ++d) r2 += r(a, b, c, d) * r(a, b, c, d);
      }
      ric2 += ric * ric;
      if (a == c) scal += ric;
    }
  return (r2 - 4.0 * ric2 + scal * scal) / 8.0;
}

namespace {

Tensor4 checked_frame_components(const CurvaturePoint& cp, const Frame& frame, const char* what) {
  require_dim4(cp.dim, what);
  if (frame.dim() != 4 || frame.vectors.cols() != 4) throw InvalidArgument(std::string(what) + " needs a 4-frame");
  if (orthonormality_defect(cp.g, frame) > 1e-10) {
    throw InvalidArgument(std::string(what) + " needs a frame orthonormal to 1e-10");
  }
  return frame_components(cp, frame);
}

}  // namespace

double pfaffian_frame(const CurvaturePoint& cp, const Frame& frame) {
  const Tensor4 t = checked_frame_components(cp, frame, "pfaffian_frame");
  const auto R = [&t](int a, int b, int c, int d) { return t(a - 1, b - 1, c - 1, d - 1); };
  return R(1, 2, 1, 2) * R(3, 4, 3, 4) + R(1, 2, 1, 3) * R(3, 4, 4, 2) + R(1, 2, 1, 4) * R(3, 4, 2, 3) +
         R(1, 2, 2, 3) * R(3, 4, 1, 4) + R(1, 2, 2, 4) * R(3, 4, 3, 1) + R(1, 2, 3, 4) * R(3, 4, 1, 2) +
         R(1, 3, 1, 2) * R(4, 2, 3, 4) + R(1, 3, 1, 3) * R(4, 2, 4, 2) + R(1, 3, 1, 4) * R(4, 2, 2, 3) +
         R(1, 3, 2, 3) * R(4, 2, 1, 4) + R(1, 3, 2, 4) * R(4, 2, 3, 1) + R(1, 3, 3, 4) * R(4, 2, 1, 2) +
         R(1, 4, 1, 2) * R(2, 3, 3, 4) + R(1, 4, 1, 3) * R(2, 3, 4, 2) + R(1, 4, 1, 4) * R(2, 3, 2, 3) +
         R(1, 4, 2, 3) * R(2, 3, 1, 4) + R(1, 4, 2, 4) * R(2, 3, 3, 1) + R(1, 4, 3, 4) * R(2, 3, 1, 2);
}

double pfaffian_simplified(const CurvaturePoint& cp, const Frame& frame) {
  const Tensor4 t = checked_frame_components(cp, frame, "pfaffian_simplified");
  const auto R = [&t](int a, int b, int c, int d) { return t(a - 1, b - 1, c - 1, d - 1); };
  return R(1, 2, 1, 2) * R(3, 4, 3, 4) + R(1, 3, 1, 3) * R(4, 2, 4, 2) + R(1, 4, 1, 4) * R(2, 3, 2, 3) +
         R(1, 2, 3, 4) * R(1, 2, 3, 4) + R(1, 3, 4, 2) * R(1, 3, 4, 2) + R(1, 4, 2, 3) * R(1, 4, 2, 3);
}

double pfaffian_density(const MetricField& metric, std::span<const double> point) {
  require_dim4(metric.dim(), "pfaffian_density");
  SmallMat g;
  Tensor3 dg;
  Tensor4 d2g;
  metric.entries().jets(point, g, dg, d2g);
  const Eigen::Matrix4d g4 = g;
  Eigen::LLT<Eigen::Matrix4d> llt(g4);
  if (llt.info() != Eigen::Success) require_positive_definite(g, "at a quadrature node");
  const Eigen::Matrix4d l = llt.matrixL();
  const double sqrt_det = l(0, 0) * l(1, 1) * l(2, 2) * l(3, 3);
  if (!(sqrt_det > 0.0)) require_positive_definite(g, "at a quadrature node");
  const Eigen::Matrix4d gi = llt.solve(Eigen::Matrix4d::Identity());

  double first[4][4][4];  // Γ_aij
  double second[4][4][4];  // Γ^k_ij
  for (int a = 0; a < 4; ++a)
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) first[a][i][j] = first[a][j][i] = 0.5 * (dg(i, j, a) + dg(j, i, a) - dg(a, i, j));
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        double s = 0.0;
        for (int a = 0; a < 4; ++a) s += gi(k, a) * first[a][i][j];
        second[k][i][j] = second[k][j][i] = s;
      }

  static constexpr int kPair[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  static constexpr int kSign[6] = {1, -1, 1, 1, -1, 1};
  double r6[6][6];
  for (int p = 0; p < 6; ++p)
    for (int q = p; q < 6; ++q) {
      const int i = kPair[p][0], j = kPair[p][1], k = kPair[q][0], l = kPair[q][1];
      double v = 0.5 * (-d2g(i, k, j, l) + d2g(i, l, j, k) + d2g(j, k, i, l) - d2g(j, l, i, k));
      for (int m = 0; m < 4; ++m) v += first[m][i][l] * second[m][j][k] - first[m][j][l] * second[m][i][k];
      r6[p][q] = r6[q][p] = v;
    }
  // Pairs p and 5-p are complementary.
  double s = 0.0;
  for (int p = 0; p < 6; ++p)
    for (int q = 0; q < 6; ++q) s += kSign[p] * kSign[q] * r6[p][q] * r6[5 - p][5 - q];
  return s / (2.0 * sqrt_det);
}

double symmetry_residual(const CurvaturePoint& cp) {
  const int n = cp.dim;
  double res = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double r = cp.riem(i, j, k, l);
          res = std::max({res, std::abs(r + cp.riem(j, i, k, l)), std::abs(r + cp.riem(i, j, l, k)),
                          std::abs(r - cp.riem(k, l, i, j))});
        }
  return res / (1.0 + cp.riem.max_abs());
}

double first_bianchi_residual(const CurvaturePoint& cp) {
  const int n = cp.dim;
  double res = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          res = std::max(res, std::abs(cp.riem(i, j, k, l) + cp.riem(j, k, i, l) + cp.riem(k, i, j, l)));
  return res / (1.0 + cp.riem.max_abs());
}

namespace {

// nabla_r(u,i,j,k,l) packed as an array of Tensor4 indexed by u.
std::vector<Tensor4> covariant_riem(const MetricField& metric, std::span<const double> point, double step) {
  const int n = metric.dim();
  const CurvaturePoint cp = curvature_at(metric, point);
  std::vector<Tensor4> out(static_cast<std::size_t>(n), Tensor4(n));
  for (int u = 0; u < n; ++u) {
    SmallVec p = cp.point, q = cp.point;
    p[u] += step;
    q[u] -= step;
    const CurvaturePoint cpp = curvature_at(metric, as_span(p));
    const CurvaturePoint cpm = curvature_at(metric, as_span(q));
    Tensor4& t = out[static_cast<std::size_t>(u)];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double v = (cpp.riem(i, j, k, l) - cpm.riem(i, j, k, l)) / (2.0 * step);
            for (int m = 0; m < n; ++m) {
              v -= cp.gamma(m, u, i) * cp.riem(m, j, k, l) + cp.gamma(m, u, j) * cp.riem(i, m, k, l) +
                   cp.gamma(m, u, k) * cp.riem(i, j, m, l) + cp.gamma(m, u, l) * cp.riem(i, j, k, m);
            }
            t(i, j, k, l) = v;
          }
  }
  return out;
}

}  // namespace

double second_bianchi_residual(const MetricField& metric, std::span<const double> point, double step) {
  const int n = metric.dim();
  const std::vector<Tensor4> d = covariant_riem(metric, point, step);
  const CurvaturePoint cp = curvature_at(metric, point);
  double res = 0.0, scale = cp.riem.max_abs();
  for (int u = 0; u < n; ++u) scale = std::max(scale, d[static_cast<std::size_t>(u)].max_abs());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int u = 0; u < n; ++u) {
            const double c = d[static_cast<std::size_t>(u)](i, j, k, l) + d[static_cast<std::size_t>(k)](i, j, l, u) +
                             d[static_cast<std::size_t>(l)](i, j, u, k);
            res = std::max(res, std::abs(c));
          }
  return res / (1.0 + scale);
}

Tensor3 cov_deriv_q(const MetricField& metric, const SymTensorField& q, std::span<const double> point) {
  const int n = metric.dim();
  if (q.dim() != n) throw InvalidArgument("q and the metric have different dimensions");
  const Connection c = christoffel(metric, point);
  SmallMat qv;
  Tensor3 dq;
  Tensor4 d2q;
  q.jets(point, qv, dq, d2q);
  Tensor3 out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = dq(k, i, j);
        for (int m = 0; m < n; ++m) v -= c.gamma(m, k, i) * qv(m, j) + c.gamma(m, k, j) * qv(i, m);
        out(i, j, k) = v;
      }
  return out;
}

Tensor4 cov_deriv2_q(const MetricField& metric, const SymTensorField& q, std::span<const double> point) {
  const int n = metric.dim();
  if (q.dim() != n) throw InvalidArgument("q and the metric have different dimensions");
  const Connection c = christoffel(metric, point);
  SmallMat qv;
  Tensor3 dq;
  Tensor4 d2q;
  q.jets(point, qv, dq, d2q);

  Tensor3 first(n);  // ∇q_ij;k
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = dq(k, i, j);
        for (int m = 0; m < n; ++m) v -= c.gamma(m, k, i) * qv(m, j) + c.gamma(m, k, j) * qv(i, m);
        first(i, j, k) = v;
      }

  Tensor4 out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          // ∂_l of ∇q_ij;k
          double v = d2q(k, l, i, j);
          for (int m = 0; m < n; ++m) {
            v -= c.dgamma(l, m, k, i) * qv(m, j) + c.gamma(m, k, i) * dq(l, m, j) + c.dgamma(l, m, k, j) * qv(i, m) +
                 c.gamma(m, k, j) * dq(l, i, m);
          }
          for (int m = 0; m < n; ++m) {
            v -= c.gamma(m, l, i) * first(m, j, k) + c.gamma(m, l, j) * first(i, m, k) + c.gamma(m, l, k) * first(i, j, m);
          }
          out(i, j, k, l) = v;
        }
  return out;
}

namespace {

void field_jets(std::span<const Expr> field, std::span<const double> point, int n, Jet2* out) {
  if (static_cast<int>(field.size()) != n) throw InvalidArgument("vector field has the wrong number of components");
  for (int i = 0; i < n; ++i) out[i] = field[static_cast<std::size_t>(i)].eval_jet(point);
}

}  // namespace

double divergence(const MetricField& metric, std::span<const Expr> field, std::span<const double> point) {
  const int n = metric.dim();
  Jet2 f[kMaxDim];
  field_jets(field, point, n, f);
  const Connection c = christoffel(metric, point);
  double div = 0.0;
  for (int i = 0; i < n; ++i) {
    div += f[i].grad[i];
    for (int j = 0; j < n; ++j) div += c.gamma(i, i, j) * f[j].value;
  }
  return div;
}

SmallMat covariant_derivative(const MetricField& metric, std::span<const Expr> field, std::span<const double> point) {
  const int n = metric.dim();
  Jet2 f[kMaxDim];
  field_jets(field, point, n, f);
  const Connection c = christoffel(metric, point);
  SmallMat nabla(n, n);
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k) {
      double v = f[m].grad[k];
      for (int j = 0; j < n; ++j) v += c.gamma(m, k, j) * f[j].value;
      nabla(m, k) = v;
    }
  return nabla;
}

SmallMat hessian(const MetricField& metric, const Expr& f, std::span<const double> point) {
  const int n = metric.dim();
  if (f.max_coordinate() > n) throw InvalidArgument("function uses coordinates beyond the metric's dimension");
  const Jet2 fj = f.eval_jet(point);
  const Connection c = christoffel(metric, point);
  SmallMat h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = fj.hess(i, j);
      for (int k = 0; k < n; ++k) v -= c.gamma(k, i, j) * fj.grad[k];
      h(i, j) = v;
    }
  return h;
}

}  // namespace rlab
