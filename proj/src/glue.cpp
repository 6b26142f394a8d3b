#include "peglue/glue.hpp"
#include "peglue/parallel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace peglue {

namespace {

double value_of(double v) { return v; }
double value_of(const AD2& v) { return v.value().value(); }

template <class T>
T smoothstep_r(const T& r) {
  const double rv = value_of(r);
  if (rv <= 0.5) return r * 0.0;
  if (rv >= 2.0) return r * 0.0 + 1.0;
  const T s = (r - 0.5) / 1.5;
  const T s3 = s * s * s;
  return s3 * (10.0 + s * (-15.0 + 6.0 * s));
}

template <class T>
T norm2(const T* w, int d) {
  T r2 = w[0] * w[0];
  for (int a = 1; a < d; ++a) r2 = r2 + w[a] * w[a];
  return r2;
}

// out = J G J with J = 1 - 2 w w^T / |w|^2 (symmetric, orthogonal)
template <class T>
void reflect(const T* w, int d, const T* G, T* out) {
  const T r2 = norm2(w, d);
  T J[kMaxDim * kMaxDim];
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) J[i * d + j] = (i == j ? 1.0 : 0.0) - 2.0 * w[i] * w[j] / r2;
  T tmp[kMaxDim * kMaxDim];
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      T s = J[i * d] * G[j];
      for (int p = 1; p < d; ++p) s = s + J[i * d + p] * G[p * d + j];
      tmp[i * d + j] = s;
    }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      T s = tmp[i * d] * J[j];
      for (int p = 1; p < d; ++p) s = s + tmp[i * d + p] * J[p * d + j];
      out[i * d + j] = s;
    }
}

class NormalChart : public AnalyticMetric {
 public:
  NormalChart(MetricPtr g, const std::vector<double>& p) : g_(std::move(g)), p_(p) {
    const int d = g_->dim();
    const int n = d - 1;
    if (static_cast<int>(p_.size()) != n) throw std::invalid_argument("boundary point has wrong dimension");
    double w[kMaxDim];
    w[0] = 0;
    for (int a = 0; a < n; ++a) w[a + 1] = p_[a];
    const MetricJet j = g_->jet(w);
    // normal form check: g00 = 1, g0a = 0 at the boundary point
    if (std::abs(j.g(0, 0) - 1) > 1e-8 || j.g.row(0).tail(n).cwiseAbs().maxCoeff() > 1e-8)
      throw std::invalid_argument("metric not in boundary normal form");
    const Eigen::MatrixXd h = j.g.bottomRightCorner(n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    A_ = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    const Eigen::MatrixXd hinv = h.inverse();
    gamma_.assign(n, Eigen::MatrixXd::Zero(n, n));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          double s = 0;
          for (int e = 0; e < n; ++e)
            s += 0.5 * hinv(a, e) *
                 (j.dg[b + 1](e + 1, c + 1) + j.dg[c + 1](e + 1, b + 1) - j.dg[e + 1](b + 1, c + 1));
          gamma_[a](b, c) = s;
        }
  }
  int dim() const override { return g_->dim(); }
  std::string name() const override { return "normal_chart(" + g_->name() + ")"; }
  void eval(const double* w, double* out) const override { apply(w, out); }
  void eval(const AD2* w, AD2* out) const override { apply(w, out); }

 private:
  template <class T>
  void apply(const T* w, T* out) const {
    const int d = g_->dim();
    const int n = d - 1;
    T v[kMaxDim], y[kMaxDim + 1];
    for (int a = 0; a < n; ++a) {
      v[a] = w[1] * A_(a, 0);
      for (int b = 1; b < n; ++b) v[a] = v[a] + w[b + 1] * A_(a, b);
    }
    y[0] = w[0];
    for (int a = 0; a < n; ++a) {
      T q = w[0] * 0.0;
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) q = q + gamma_[a](b, c) * v[b] * v[c];
      y[a + 1] = p_[a] + v[a] - 0.5 * q;
    }
    // J^a_b = A^a_b - Gamma^a_{mc} v^m A^c_b
    T J[kMaxDim * kMaxDim];
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        T s = w[0] * 0.0 + A_(a, b);
        for (int m = 0; m < n; ++m)
          for (int c = 0; c < n; ++c) s = s - gamma_[a](m, c) * v[m] * A_(c, b);
        J[a * n + b] = s;
      }
    T G[kMaxDim * kMaxDim];
    g_->eval(y, G);
    out[0] = G[0];
    for (int b = 0; b < n; ++b) {
      T s = w[0] * 0.0;
      for (int a = 0; a < n; ++a) s = s + G[a + 1] * J[a * n + b];
      out[b + 1] = s;
      out[(b + 1) * d] = s;
    }
    for (int b = 0; b < n; ++b)
      for (int c = b; c < n; ++c) {
        T s = w[0] * 0.0;
        for (int a = 0; a < n; ++a)
          for (int e = 0; e < n; ++e) s = s + J[a * n + b] * G[(a + 1) * d + e + 1] * J[e * n + c];
        out[(b + 1) * d + c + 1] = s;
        out[(c + 1) * d + b + 1] = s;
      }
  }
  MetricPtr g_;
  std::vector<double> p_;
  Eigen::MatrixXd A_;
  std::vector<Eigen::MatrixXd> gamma_;
};

// gbar - delta on the tangential block only
class TangentialDeviation : public AnalyticMetric {
 public:
  explicit TangentialDeviation(MetricPtr g) : g_(std::move(g)) {}
  int dim() const override { return g_->dim(); }
  std::string name() const override { return "discrepancy(" + g_->name() + ")"; }
  void eval(const double* w, double* out) const override { apply(w, out); }
  void eval(const AD2* w, AD2* out) const override { apply(w, out); }

 private:
  template <class T>
  void apply(const T* w, T* out) const {
    const int d = dim();
    g_->eval(w, out);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        if (i == 0 || j == 0) out[i * d + j] = w[0] * 0.0;
        else if (i == j) out[i * d + j] = out[i * d + j] - 1.0;
      }
  }
  MetricPtr g_;
};

class Rescaled : public AnalyticMetric {
 public:
  Rescaled(TensorPtr k, double eps) : k_(std::move(k)), eps_(eps) {}
  int dim() const override { return k_->dim(); }
  std::string name() const override { return "rescaled(" + k_->name() + ")"; }
  void eval(const double* w, double* out) const override { apply(w, out); }
  void eval(const AD2* w, AD2* out) const override { apply(w, out); }

 private:
  template <class T>
  void apply(const T* w, T* out) const {
    T v[kMaxDim];
    for (int a = 0; a < dim(); ++a) v[a] = eps_ * w[a];
    k_->eval(v, out);
  }
  TensorPtr k_;
  double eps_;
};

class Inverted : public AnalyticMetric {
 public:
  explicit Inverted(TensorPtr k) : k_(std::move(k)) {}
  int dim() const override { return k_->dim(); }
  std::string name() const override { return "inverted(" + k_->name() + ")"; }
  void eval(const double* w, double* out) const override { apply(w, out); }
  void eval(const AD2* w, AD2* out) const override { apply(w, out); }

 private:
  template <class T>
  void apply(const T* w, T* out) const {
    const int d = dim();
    const T r2 = norm2(w, d);
    T v[kMaxDim];
    for (int a = 0; a < d; ++a) v[a] = w[a] / r2;
    T G[kMaxDim * kMaxDim];
    k_->eval(v, G);
    reflect(w, d, G, out);
  }
  TensorPtr k_;
};

class Difference : public AnalyticMetric {
 public:
  Difference(TensorPtr a, TensorPtr b) : a_(std::move(a)), b_(std::move(b)) {}
  int dim() const override { return a_->dim(); }
  std::string name() const override { return a_->name() + "-" + b_->name(); }
  void eval(const double* w, double* out) const override { apply(w, out); }
  void eval(const AD2* w, AD2* out) const override { apply(w, out); }

 private:
  template <class T>
  void apply(const T* w, T* out) const {
    const int d = dim();
    T tmp[kMaxDim * kMaxDim];
    a_->eval(w, out);
    b_->eval(w, tmp);
    for (int i = 0; i < d * d; ++i) out[i] = out[i] - tmp[i];
  }
  TensorPtr a_, b_;
};

class TangentialConstant : public ModelBase<TangentialConstant> {
 public:
  TangentialConstant(int n, double c) : n_(n), c_(c) {}
  int dim() const override { return n_ + 1; }
  std::string name() const override { return "tangential_constant"; }
  template <class T>
  void metric(const T* w, T* out) const {
    const int d = n_ + 1;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out[i * d + j] = w[0] * 0.0 + (i == j && i > 0 ? c_ : 0.0);
  }

 private:
  int n_;
  double c_;
};

// chi(r) a(eps w) + (1 - chi(r)) J b(eps I(w)) J; `scale` multiplies the result
class Glued : public AnalyticMetric {
 public:
  Glued(MetricPtr a, MetricPtr b, double eps, double scale, std::string name)
      : a_(std::move(a)), b_(std::move(b)), eps_(eps), scale_(scale), name_(std::move(name)) {}
  int dim() const override { return a_->dim(); }
  std::string name() const override { return name_; }
  void eval(const double* w, double* out) const override { apply(w, out); }
  void eval(const AD2* w, AD2* out) const override { apply(w, out); }

 private:
  template <class T>
  void apply(const T* w, T* out) const {
    using std::sqrt;
    const int d = dim();
    const T r2 = norm2(w, d);
    const T chi = smoothstep_r(T(sqrt(r2)));
    const double c = value_of(chi);
    T G1[kMaxDim * kMaxDim], G2[kMaxDim * kMaxDim], v[kMaxDim];
    if (c > 0) {
      for (int a = 0; a < d; ++a) v[a] = eps_ * w[a];
      a_->eval(v, G1);
    }
    if (c < 1) {
      for (int a = 0; a < d; ++a) v[a] = eps_ * w[a] / r2;
      T B[kMaxDim * kMaxDim];
      b_->eval(v, B);
      reflect(w, d, B, G2);
    }
    for (int i = 0; i < d * d; ++i) {
      if (c >= 1) out[i] = scale_ * G1[i];
      else if (c <= 0) out[i] = scale_ * G2[i];
      else out[i] = scale_ * (chi * G1[i] + (1.0 - chi) * G2[i]);
    }
  }
  MetricPtr a_, b_;
  double eps_, scale_;
  std::string name_;
};

}  // namespace

double cutoff(double r) { return smoothstep_r(r); }

Eigen::VectorXd inversion(const Eigen::VectorXd& w) { return w / w.squaredNorm(); }

MetricPtr normal_chart(MetricPtr g, const std::vector<double>& p) { return std::make_shared<NormalChart>(g, p); }

std::vector<Eigen::VectorXd> shell_samples(int n, double r0, double r1, int nr, int nang) {
  const int d = n + 1;
  std::vector<Eigen::VectorXd> pts;
  const double pi = std::numbers::pi;
  for (int i = 0; i < nr; ++i) {
    const double r = nr == 1 ? r0 : r0 * std::pow(r1 / r0, static_cast<double>(i) / (nr - 1));
    // polar angle from the x axis in (0, pi/2); remaining angles uniform
    for (int a = 0; a < nang; ++a) {
      const double phi = (a + 0.5) / nang * (pi / 2);
      if (n == 1) {
        Eigen::VectorXd w(2);
        w << r * std::cos(phi), r * std::sin(phi);
        pts.push_back(w);
        pts.push_back(Eigen::Vector2d(w[0], -w[1]));
        continue;
      }
      for (int b = 0; b < 2 * nang; ++b) {
        const double th = (b + 0.25) / (2 * nang) * 2 * pi;
        Eigen::VectorXd w(d);
        w[0] = r * std::cos(phi);
        if (n == 2) {
          w[1] = r * std::sin(phi) * std::cos(th);
          w[2] = r * std::sin(phi) * std::sin(th);
        } else {
          // n = 3: one more angle, sampled coarsely
          const double ps = (b % nang + 0.5) / nang * pi;
          w[1] = r * std::sin(phi) * std::cos(ps);
          w[2] = r * std::sin(phi) * std::sin(ps) * std::cos(th);
          w[3] = r * std::sin(phi) * std::sin(ps) * std::sin(th);
        }
        pts.push_back(w);
      }
    }
  }
  return pts;
}

double sup_norm(const AnalyticTensor& k, const std::vector<Eigen::VectorXd>& pts) {
  double m = 0;
  for (const auto& w : pts) {
    const SmallMat v = k.value(w.data());
    m = std::max(m, v.norm());
  }
  return m;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int m = static_cast<int>(x.size());
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < m; ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

DiscrepancyTensor discrepancy(MetricPtr g, const std::vector<double>& p) {
  DiscrepancyTensor out;
  out.k = std::make_shared<TangentialDeviation>(normal_chart(g, p));
  const int n = g->dim() - 1;
  std::vector<double> rs, sups;
  for (int i = 0; i < 6; ++i) {
    const double r = 0.05 * std::pow(2.0, i * 0.5);
    rs.push_back(r);
    const double s = sup_norm(*out.k, shell_samples(n, r, r, 1, 8));
    sups.push_back(s);
    out.constant = std::max(out.constant, s / (r * r));
  }
  bool zero = true;
  for (double s : sups) zero = zero && s < 1e-14;
  out.growth_exponent = zero ? std::numeric_limits<double>::infinity() : fit_slope(rs, sups);
  return out;
}

TensorPtr rescale_pullback(TensorPtr k, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  return std::make_shared<Rescaled>(std::move(k), eps);
}

TensorPtr inversion_pullback(TensorPtr k) { return std::make_shared<Inverted>(std::move(k)); }

TensorPtr difference(TensorPtr a, TensorPtr b) { return std::make_shared<Difference>(std::move(a), std::move(b)); }

TensorPtr tangential_constant(int n, double c) { return std::make_shared<TangentialConstant>(n, c); }

GluedAtlas glue_metrics(MetricPtr g1, MetricPtr g2, double eps) {
  if (!(eps > 0 && eps <= 0.5)) throw std::invalid_argument("eps outside (0, 0.5]");
  if (g1->dim() != g2->dim()) throw std::invalid_argument("summands have different dimensions");
  // chart 2 must cover the image of A: eps * I(A) lies in |w'| <= 2 eps
  GluedAtlas a;
  a.n = g1->dim() - 1;
  a.eps = eps;
  a.g1 = g1;
  a.g2 = g2;
  a.glued = std::make_shared<Glued>(g1, g2, eps, 1.0, "glued(" + g1->name() + "," + g2->name() + ")");
  return a;
}

MetricPtr glue_boundary(MetricPtr h1, MetricPtr h2, double eps) {
  if (!(eps > 0 && eps <= 0.5)) throw std::invalid_argument("eps outside (0, 0.5]");
  return std::make_shared<Glued>(h1, h2, eps, eps * eps, "glued_boundary(" + h1->name() + "," + h2->name() + ")");
}

std::vector<ResidualRow> residual_study(MetricPtr g1, MetricPtr g2, const std::vector<double>& eps_list, int nr,
                                        int nang) {
  if (eps_list.size() < 3) throw std::invalid_argument("need at least three eps values");
  const int n = g1->dim() - 1;
  const auto inside = shell_samples(n, 0.5, 2.0, nr, nang);
  auto outside = shell_samples(n, 0.3, 0.49, 4, nang / 2);
  const auto far = shell_samples(n, 2.01, 3.0, 4, nang / 2);
  outside.insert(outside.end(), far.begin(), far.end());

  std::vector<ResidualRow> rows;
  std::vector<double> es, ss;
  for (double eps : eps_list) {
    const GluedAtlas atlas = glue_metrics(g1, g2, eps);
    auto sup_over = [&](const std::vector<Eigen::VectorXd>& pts) {
      std::vector<double> vals(pts.size());
      parallel_for(static_cast<long>(pts.size()), [&](long b, long e) {
        for (long i = b; i < e; ++i) {
          const Eigen::VectorXd& w = pts[i];
          const FrameGeometry f = frame_geometry(w[0], atlas.glued->jet(w.data()));
          vals[i] = tensor_norm(f.einstein, f.ginv) / w[0];
        }
      });
      double m = 0;
      for (double v : vals) m = std::max(m, v);
      return m;
    };
    ResidualRow row;
    row.eps = eps;
    row.sup_residual = sup_over(inside);
    row.sup_outside = sup_over(outside);
    es.push_back(eps);
    ss.push_back(row.sup_residual);
    // a fit through round-off says nothing
    bool positive = true;
    for (double s : ss) positive = positive && s > 1e-10;
    row.slope_so_far = positive ? fit_slope(es, ss) : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace peglue
