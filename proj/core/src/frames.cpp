#include "rlab/frames.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "rlab/error.hpp"
#include "rlab/random.hpp"

namespace rlab {

double orthonormality_defect(const SmallMat& g, const Frame& frame) {
  const SmallMat gram = frame.vectors * g * frame.vectors.transpose();
  return (gram - SmallMat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

SmallVec canonical_sign(const SmallVec& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best]) * (1.0 + 1e-12)) best = i;
  }
  return v[best] < 0.0 ? SmallVec(-v) : v;
}

Frame gram_schmidt(const SmallMat& g, const SmallMat& seeds, const SmallVec& point) {
  const Eigen::Index n = g.rows();
  if (seeds.cols() != n || seeds.rows() > n) throw InvalidArgument("seed vectors do not match the metric dimension");
  Frame f;
  f.vectors.resize(seeds.rows(), n);
  f.point = point;
  for (Eigen::Index a = 0; a < seeds.rows(); ++a) {
    SmallVec v = seeds.row(a).transpose();
    const double len0 = std::sqrt(std::max(0.0, v.dot(g * v)));
    // Two passes keep the result orthogonal to rounding.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index b = 0; b < a; ++b) {
        const SmallVec e = f.vectors.row(b).transpose();
        v -= e.dot(g * v) * e;
      }
    }
    const double len = std::sqrt(std::max(0.0, v.dot(g * v)));
    if (!(len0 > 0.0) || !(len > 1e-12 * len0)) {
      throw InvalidArgument("seed vectors are linearly dependent (vector " + std::to_string(a + 1) + ")");
    }
    f.vectors.row(a) = (v / len).transpose();
  }
  return f;
}

Frame complete_frame(const SmallMat& g, const SmallMat& leading, const SmallVec& point) {
  const Eigen::Index n = g.rows();
  SmallMat seeds(n, n);
  seeds.topRows(leading.rows()) = leading;
  Eigen::Index row = leading.rows();
  // Add the coordinate vectors least aligned with what is already present.
  std::vector<std::pair<double, Eigen::Index>> order;
  const Frame lead = gram_schmidt(g, leading);
  for (Eigen::Index i = 0; i < n; ++i) {
    SmallVec e = SmallVec::Unit(n, i);
    double overlap = 0.0;
    for (Eigen::Index b = 0; b < lead.vectors.rows(); ++b) {
      const SmallVec v = lead.vectors.row(b).transpose();
      overlap += std::pow(v.dot(g * e), 2) / e.dot(g * e);
    }
    order.push_back({overlap, i});
  }
  std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  for (const auto& [overlap, i] : order) {
    if (row == n) break;
    seeds.row(row++) = SmallVec::Unit(n, i).transpose();
  }
  return gram_schmidt(g, seeds, point);
}

namespace {

using Vec4 = Eigen::Vector4d;
using Mat42 = Eigen::Matrix<double, 4, 2>;

struct Candidate {
  Mat42 y;
  double value = 0.0;
  double gradient = 0.0;
  bool converged = false;
};

// Minimizes sign·R(u,v,u,v) over orthonormal pairs in an orthonormal frame.
class PlaneSearch {
 public:
  PlaneSearch(const Tensor4& r, double sign, double scale, double tol)
      : r_(r), sign_(sign), scale_(scale), tol_(tol) {}

  double value(const Mat42& y) const { return sign_ * quad(y.col(0), y.col(1)); }

  Mat42 gradient(const Mat42& y) const {
    const Vec4 u = y.col(0), v = y.col(1);
    Mat42 g;
    for (int a = 0; a < 4; ++a) {
      double gu = 0.0, gv = 0.0;
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) {
            gu += r_(a, j, k, l) * v[j] * u[k] * v[l];
            gv += r_(a, j, k, l) * u[j] * v[k] * u[l];
          }
      g(a, 0) = 2.0 * sign_ * gu;
      g(a, 1) = 2.0 * sign_ * gv;
    }
    const Eigen::Matrix4d proj = Eigen::Matrix4d::Identity() - y * y.transpose();
    return proj * g;
  }

  Candidate optimize(Mat42 y) const {
    y = orthonormalize(y);
    double f = value(y);
    Mat42 xi = gradient(y);
    double t = 1.0 / (1.0 + scale_);
    Mat42 y_prev = y, xi_prev = xi;
    // Projected gradient descent with Barzilai-Borwein steps and Armijo backtracking.
    for (int it = 0; it < 300 && xi.norm() > 1e-6 * (1.0 + scale_); ++it) {
      if (it > 0) {
        const Mat42 s = y - y_prev, dy = xi - xi_prev;
        const double sy = (s.array() * dy.array()).sum();
        if (sy > 0.0) t = std::clamp((s.array() * s.array()).sum() / sy, 1e-6 / (1.0 + scale_), 1e3 / (1.0 + scale_));
      }
      const double xi2 = xi.squaredNorm();
      bool accepted = false;
      for (int k = 0; k < 40; ++k) {
        const Mat42 yn = orthonormalize(y - t * xi);
        const double fn = value(yn);
        if (fn <= f - 1e-4 * t * xi2) {
          y_prev = y;
          xi_prev = xi;
          y = yn;
          f = fn;
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) break;
      xi = gradient(y);
    }
    return polish(y);
  }

 private:
  double quad(const Vec4& u, const Vec4& v) const {
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const double uv = u[i] * v[j];
        if (uv == 0.0) continue;
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) s += r_(i, j, k, l) * uv * u[k] * v[l];
      }
    return s;
  }

  static Mat42 orthonormalize(const Mat42& a) {
    Mat42 y;
    y.col(0) = a.col(0).normalized();
    Vec4 v = a.col(1) - y.col(0).dot(a.col(1)) * y.col(0);
    v -= y.col(0).dot(v) * y.col(0);
    y.col(1) = v.normalized();
    return y;
  }

  // sign·K of the plane spanned by y + y_perp·Θ as a jet in the four entries of Θ.
  Jet2 local_jet(const Mat42& y, const Mat42& perp) const {
    Jet2 a[4], b[4];
    const Jet2 t[4] = {Jet2::variable(0, 0.0), Jet2::variable(1, 0.0), Jet2::variable(2, 0.0), Jet2::variable(3, 0.0)};
    for (int i = 0; i < 4; ++i) {
      a[i] = Jet2::constant(y(i, 0)) + perp(i, 0) * t[0] + perp(i, 1) * t[1];
      b[i] = Jet2::constant(y(i, 1)) + perp(i, 0) * t[2] + perp(i, 1) * t[3];
    }
    Jet2 bb[4][4], aa[4][4];
    for (int j = 0; j < 4; ++j)
      for (int l = j; l < 4; ++l) {
        bb[j][l] = bb[l][j] = b[j] * b[l];
        aa[j][l] = aa[l][j] = a[j] * a[l];
      }
    Jet2 n = Jet2::constant(0.0);
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) {
        Jet2 m = Jet2::constant(0.0);
        for (int j = 0; j < 4; ++j)
          for (int l = 0; l < 4; ++l) {
            const double c = r_(i, j, k, l);
            if (c != 0.0) m += c * bb[j][l];
          }
        n += m * aa[i][k];
      }
    Jet2 ua = Jet2::constant(0.0), vb = Jet2::constant(0.0), ab = Jet2::constant(0.0);
    for (int i = 0; i < 4; ++i) {
      ua += aa[i][i];
      vb += bb[i][i];
      ab += a[i] * b[i];
    }
    return sign_ * n / (ua * vb - ab * ab);
  }

  static Mat42 complement(const Mat42& y) {
    Eigen::HouseholderQR<Mat42> qr(y);
    const Eigen::Matrix4d q = qr.householderQ();
    return q.rightCols<2>();
  }

  // Newton iterations in local coordinates of the Grassmannian.
  Candidate polish(Mat42 y) const {
    Candidate c;
    for (int it = 0; it < 60; ++it) {
      const Mat42 perp = complement(y);
      const Jet2 j = local_jet(y, perp);
      Eigen::Vector4d g(j.grad[0], j.grad[1], j.grad[2], j.grad[3]);
      c.y = y;
      c.value = j.value;
      c.gradient = g.norm();
      if (c.gradient <= tol_) {
        c.converged = true;
        return c;
      }
      Eigen::Matrix4d h;
      for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q) h(p, q) = j.hess(p, q);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(h);
      const double lmin = es.eigenvalues()[0];
      const double mu = lmin > 1e-8 * (1.0 + scale_) ? 0.0 : -lmin + 1e-6 * (1.0 + scale_);
      Eigen::Vector4d step = -(h + mu * Eigen::Matrix4d::Identity()).ldlt().solve(g);
      bool moved = false;
      for (int k = 0; k < 30; ++k) {
        Mat42 a = y;
        a.col(0) += perp * step.head<2>();
        a.col(1) += perp * step.tail<2>();
        const Mat42 yn = orthonormalize(a);
        const double fn = value(yn);
        if (fn <= j.value + 1e-14 * (1.0 + scale_)) {
          const Jet2 jn = local_jet(yn, complement(yn));
          const double gn = std::sqrt(jn.grad[0] * jn.grad[0] + jn.grad[1] * jn.grad[1] + jn.grad[2] * jn.grad[2] +
                                      jn.grad[3] * jn.grad[3]);
          if (gn < c.gradient || fn < j.value - 1e-14 * (1.0 + scale_)) {
            y = yn;
            moved = true;
            break;
          }
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    const Jet2 j = local_jet(y, complement(y));
    c.y = y;
    c.value = j.value;
    c.gradient = std::sqrt(j.grad[0] * j.grad[0] + j.grad[1] * j.grad[1] + j.grad[2] * j.grad[2] + j.grad[3] * j.grad[3]);
    c.converged = c.gradient <= tol_;
    return c;
  }

  const Tensor4& r_;
  double sign_;
  double scale_;
  double tol_;
};

double radical_inverse(unsigned base, unsigned index) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (index > 0) {
    r += f * (index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

std::vector<Mat42> start_planes(int quasi_random) {
  std::vector<Mat42> starts;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      Mat42 y = Mat42::Zero();
      y(i, 0) = 1.0;
      y(j, 1) = 1.0;
      starts.push_back(y);
    }
  static constexpr unsigned kPrimes[8] = {2, 3, 5, 7, 11, 13, 17, 19};
  for (int n = 1; n <= quasi_random; ++n) {
    Mat42 y;
    for (int d = 0; d < 8; ++d) y(d % 4, d / 4) = 2.0 * radical_inverse(kPrimes[d], static_cast<unsigned>(n)) - 1.0;
    if (y.col(0).norm() < 1e-3) continue;
    const Vec4 u = y.col(0).normalized();
    const Vec4 v = y.col(1) - u.dot(y.col(1)) * u;
    if (v.norm() < 1e-3) continue;
    starts.push_back(y);
  }
  return starts;
}

struct SearchResult {
  std::vector<Candidate> ties;
  Candidate best;
};

SearchResult search_planes(const Tensor4& r, double sign, double scale, const MinimizingFrameOptions& opt) {
  const double tol = opt.gradient_tol * (1.0 + scale);
  const PlaneSearch search(r, sign, scale, tol);
  std::vector<Candidate> found;
  for (const Mat42& y : start_planes(opt.quasi_random_starts)) found.push_back(search.optimize(y));

  auto best_of = [](const std::vector<Candidate>& cs, bool converged_only) {
    const Candidate* b = nullptr;
    for (const Candidate& c : cs) {
      if (converged_only && !c.converged) continue;
      if (b == nullptr || c.value < b->value) b = &c;
    }
    return b;
  };

  Rng rng(0x5eed5eedULL);
  int restarts = 0;
  while (best_of(found, true) == nullptr) {
    if (restarts >= opt.max_restarts) {
      const Candidate* b = best_of(found, false);
      throw ConvergenceError("plane search did not reach the gradient tolerance after " + std::to_string(restarts) +
                                 " restarts",
                             b ? b->gradient : INFINITY);
    }
    Mat42 y = best_of(found, false)->y;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 2; ++j) y(i, j) += rng.uniform(-0.1, 0.1);
    found.push_back(search.optimize(y));
    ++restarts;
  }
  SearchResult res;
  res.best = *best_of(found, true);
  const double tie_tol = 1e-9 * (1.0 + scale);
  for (const Candidate& c : found) {
    if (c.converged && c.value <= res.best.value + tie_tol) res.ties.push_back(c);
  }
  return res;
}

// Second stage: minimize R(v,w,v,w) over v in span(u1,u2), w in span(n1,n2).
struct TorusResult {
  double alpha = 0.0, beta = 0.0, value = 0.0, gradient = 0.0;
};

TorusResult search_torus(const Tensor4& r, const Vec4 x[2], const Vec4 n[2], double scale, double tol) {
  double c[2][2][2][2];
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q)
      for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t) {
          double v = 0.0;
          for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
              for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) v += r(i, j, k, l) * x[p][i] * n[q][j] * x[s][k] * n[t][l];
          c[p][q][s][t] = v;
        }
  const auto eval = [&c](double a, double b) {
    const double va[2] = {std::cos(a), std::sin(a)}, wb[2] = {std::cos(b), std::sin(b)};
    double f = 0.0;
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q)
        for (int s = 0; s < 2; ++s)
          for (int t = 0; t < 2; ++t) f += c[p][q][s][t] * va[p] * wb[q] * va[s] * wb[t];
    return f;
  };
  const auto jet = [&c](double a, double b) {
    const Jet2 ja = Jet2::variable(0, a), jb = Jet2::variable(1, b);
    const Jet2 va[2] = {cos(ja), sin(ja)}, wb[2] = {cos(jb), sin(jb)};
    Jet2 f;
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q)
        for (int s = 0; s < 2; ++s)
          for (int t = 0; t < 2; ++t) f += c[p][q][s][t] * (va[p] * wb[q] * va[s] * wb[t]);
    return f;
  };

  constexpr int kGrid = 72;
  const double step = std::numbers::pi / kGrid;
  TorusResult best{0.0, 0.0, eval(0.0, 0.0), 0.0};
  const double tie_tol = 1e-12 * (1.0 + scale);
  for (int i = 0; i < kGrid; ++i)
    for (int j = 0; j < kGrid; ++j) {
      const double v = eval(i * step, j * step);
      if (v < best.value - tie_tol) best = {i * step, j * step, v, 0.0};
    }
  for (int it = 0; it < 60; ++it) {
    const Jet2 f = jet(best.alpha, best.beta);
    const Eigen::Vector2d g(f.grad[0], f.grad[1]);
    best.value = f.value;
    best.gradient = g.norm();
    if (best.gradient <= tol) break;
    Eigen::Matrix2d h;
    h << f.hess(0, 0), f.hess(0, 1), f.hess(1, 0), f.hess(1, 1);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
    const double lmin = es.eigenvalues()[0];
    const double mu = lmin > 1e-8 * (1.0 + scale) ? 0.0 : -lmin + 1e-6 * (1.0 + scale);
    Eigen::Vector2d d = -(h + mu * Eigen::Matrix2d::Identity()).ldlt().solve(g);
    bool moved = false;
    for (int k = 0; k < 30; ++k) {
      const double a = best.alpha + d[0], b = best.beta + d[1];
      if (eval(a, b) <= f.value + 1e-14 * (1.0 + scale)) {
        const Jet2 fn = jet(a, b);
        if (std::hypot(fn.grad[0], fn.grad[1]) < best.gradient) {
          best.alpha = a;
          best.beta = b;
          moved = true;
          break;
        }
      }
      d *= 0.5;
    }
    if (!moved) break;
  }
  const Jet2 f = jet(best.alpha, best.beta);
  best.value = f.value;
  best.gradient = std::hypot(f.grad[0], f.grad[1]);
  return best;
}

bool lexicographically_less(const SmallMat& a, const SmallMat& b) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (std::abs(a(i, j) - b(i, j)) > 1e-9) return a(i, j) < b(i, j);
    }
  return false;
}

void require_dim4(const CurvaturePoint& cp, const char* what) {
  if (cp.dim != 4) throw InvalidArgument(std::string(what) + " is defined in dimension 4 only");
}

}  // namespace

MinimizingFrame minimizing_frame(const CurvaturePoint& cp, const MinimizingFrameOptions& options) {
  require_dim4(cp, "minimizing_frame");
  const Frame base = cholesky_frame(cp);
  const Tensor4 r = frame_components(cp, base);
  const double scale = r.max_abs();
  const double tol = options.gradient_tol * (1.0 + scale);
  const SearchResult sr = search_planes(r, 1.0, scale, options);

  MinimizingFrame out;
  bool have = false;
  for (const Candidate& c : sr.ties) {
    Eigen::HouseholderQR<Mat42> qr(c.y);
    const Eigen::Matrix4d q = qr.householderQ();
    const Vec4 x[2] = {c.y.col(0), c.y.col(1)};
    const Vec4 n[2] = {q.col(2), q.col(3)};
    const TorusResult tr = search_torus(r, x, n, scale, tol);
    const double ca = std::cos(tr.alpha), sa = std::sin(tr.alpha), cb = std::cos(tr.beta), sb = std::sin(tr.beta);
    const Vec4 local[4] = {ca * x[0] + sa * x[1], -sa * x[0] + ca * x[1], cb * n[0] + sb * n[1], -sb * n[0] + cb * n[1]};
    Frame f;
    f.point = cp.point;
    f.vectors.resize(4, 4);
    for (int a = 0; a < 4; ++a) {
      const SmallVec chart = base.vectors.transpose() * SmallVec(local[a]);
      f.vectors.row(a) = canonical_sign(chart).transpose();
    }
    if (!have || lexicographically_less(f.vectors, out.frame.vectors)) {
      out.frame = f;
      out.stage1_gradient = c.gradient;
      out.stage2_gradient = tr.gradient;
      have = true;
    }
  }
  const Tensor4 t = frame_components(cp, out.frame);
  const auto R = [&t](int a, int b, int c, int d) { return t(a - 1, b - 1, c - 1, d - 1); };
  out.min_sectional = R(1, 2, 1, 2);
  out.second_stage_value = R(1, 3, 1, 3);
  out.vanishing = {R(1, 2, 1, 3), R(1, 2, 1, 4), R(2, 1, 2, 3), R(2, 1, 2, 4), R(3, 1, 3, 2), R(1, 3, 1, 4)};
  return out;
}

double min_sectional(const CurvaturePoint& cp, const MinimizingFrameOptions& options) {
  require_dim4(cp, "min_sectional");
  const Tensor4 r = frame_components(cp, cholesky_frame(cp));
  return search_planes(r, 1.0, r.max_abs(), options).best.value;
}

double max_sectional(const CurvaturePoint& cp, const MinimizingFrameOptions& options) {
  require_dim4(cp, "max_sectional");
  const Tensor4 r = frame_components(cp, cholesky_frame(cp));
  return -search_planes(r, -1.0, r.max_abs(), options).best.value;
}

std::string_view to_string(RicciTag tag) {
  switch (tag) {
    case RicciTag::Degenerate: return "Degenerate";
    case RicciTag::DegenerateAmbiguous: return "DegenerateAmbiguous";
    case RicciTag::NegativeDefinite: return "NegativeDefinite";
    case RicciTag::Nondegenerate: return "Nondegenerate";
  }
  return "?";
}

Classification classify_point(const CurvaturePoint& cp, std::optional<double> eps_deg, std::optional<double> eps_gap,
                              bool half_scalar_check) {
  Classification c;
  c.scalar = cp.scalar;
  c.eps_deg = eps_deg.value_or(1e-8 * (1.0 + std::abs(cp.scalar)));
  c.eps_gap = eps_gap.value_or(1e-6 * (1.0 + std::abs(cp.scalar)));
  if (!(c.eps_deg > 0.0) || !(c.eps_gap > 0.0)) throw InvalidArgument("classification tolerances must be positive");

  Eigen::GeneralizedSelfAdjointEigenSolver<SmallMat> es(cp.ricci, cp.g);
  if (es.info() != Eigen::Success) throw ConvergenceError("generalized eigen-solver failed", INFINITY);
  c.eigenvalues = es.eigenvalues();
  c.eigenvectors = es.eigenvectors();
  const Eigen::Index n = c.eigenvalues.size();
  c.gap = n > 1 ? c.eigenvalues[1] - c.eigenvalues[0] : 0.0;

  bool near_zero = false;
  for (Eigen::Index i = 0; i < n; ++i) near_zero = near_zero || std::abs(c.eigenvalues[i]) <= c.eps_deg;
  if (near_zero) {
    c.tag = RicciTag::Degenerate;
  } else if (c.eigenvalues[n - 1] < -c.eps_deg) {
    c.tag = c.gap > c.eps_gap ? RicciTag::NegativeDefinite : RicciTag::DegenerateAmbiguous;
  } else {
    c.tag = RicciTag::Nondegenerate;
  }

  if (c.tag == RicciTag::NegativeDefinite) {
    c.V = canonical_sign(c.eigenvectors.col(0));
    if (half_scalar_check && cp.dim == 4) {
      const double scale = cp.scale();
      const double tol = 1e-8 * (1.0 + scale);
      if (max_sectional(cp) <= tol && std::abs(pfaffian_norm(cp)) <= tol * (1.0 + scale)) {
        c.half_scalar_residual = std::abs(c.eigenvalues[0] - cp.scalar / 2.0);
      }
    }
  }
  return c;
}

}  // namespace rlab
