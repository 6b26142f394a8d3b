#include "peglue/models.hpp"

#include <cmath>
#include <stdexcept>

namespace peglue {

namespace {

// Seeds w as independent variables for value, gradient and Hessian.
std::array<AD2, kMaxDim> seed(int d, const double* w) {
  std::array<AD2, kMaxDim> W;
  for (int i = 0; i < d; ++i) {
    AD1 inner(w[i], SmallVec::Unit(d, i));
    AD1Vec outer(d);
    for (int j = 0; j < d; ++j) outer[j] = AD1(i == j ? 1.0 : 0.0, SmallVec::Zero(d));
    W[i] = AD2(inner, outer);
  }
  return W;
}

double val(const AD2& a) { return a.value().value(); }
double d1(const AD2& a, int m) { return a.value().derivatives().size() ? a.value().derivatives()[m] : 0.0; }
double d2(const AD2& a, int m, int l) {
  if (a.derivatives().size() == 0) return 0.0;
  const auto& inner = a.derivatives()[m].derivatives();
  return inner.size() ? inner[l] : 0.0;
}

// forces evaluation of autodiff expression templates before squaring
template <class T, class E>
T sq(const E& e) {
  const T v = e;
  return v * v;
}

class HalfSpace : public ModelBase<HalfSpace> {
 public:
  explicit HalfSpace(int d, bool boundary) : d_(d), boundary_(boundary) {}
  int dim() const override { return d_; }
  std::string name() const override { return boundary_ ? "flat_boundary" : "hyperbolic_half_space"; }
  template <class T>
  void metric(const T* w, T* out) const {
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j) out[i * d_ + j] = w[0] * 0.0 + (i == j ? 1.0 : 0.0);
  }

 private:
  int d_;
  bool boundary_;
};

class BallChart : public ModelBase<BallChart> {
 public:
  explicit BallChart(int n) : n_(n) {}
  int dim() const override { return n_ + 1; }
  std::string name() const override { return "poincare_ball_chart"; }
  template <class T>
  void metric(const T* w, T* out) const {
    const int d = n_ + 1;
    T y2 = w[1] * w[1];
    for (int a = 2; a <= n_; ++a) y2 += w[a] * w[a];
    const T a = 1.0 - w[0] * w[0] / 4.0;
    const T b = 1.0 / sq<T>(1.0 + y2 / 4.0);
    const T t = a * a * b;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out[i * d + j] = i != j ? w[0] * 0.0 : (i == 0 ? w[0] * 0.0 + 1.0 : t);
  }

 private:
  int n_;
};

class PolyTangential : public ModelBase<PolyTangential> {
 public:
  PolyTangential(int n, double a1, double a2) : n_(n), a1_(a1), a2_(a2) {}
  int dim() const override { return n_ + 1; }
  std::string name() const override { return "polynomial_tangential"; }
  template <class T>
  void metric(const T* w, T* out) const {
    const int d = n_ + 1;
    const T t = 1.0 + a1_ * w[0] + a2_ * w[0] * w[0];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out[i * d + j] = i != j ? w[0] * 0.0 : (i == 0 ? w[0] * 0.0 + 1.0 : t);
  }

 private:
  int n_;
  double a1_, a2_;
};

class Perturbed : public AnalyticMetric {
 public:
  Perturbed(MetricPtr base, ScalarPtr phi, double amp) : base_(std::move(base)), phi_(std::move(phi)), amp_(amp) {}
  int dim() const override { return base_->dim(); }
  std::string name() const override { return "perturbed(" + base_->name() + "," + phi_->name() + ")"; }
  void eval(const double* w, double* out) const override { apply(w, out); }
  void eval(const AD2* w, AD2* out) const override { apply(w, out); }

 private:
  template <class T>
  void apply(const T* w, T* out) const {
    using std::exp;
    base_->eval(w, out);
    const T f = exp(2.0 * amp_ * phi_->eval(w));
    const int d = dim();
    for (int k = 0; k < d * d; ++k) out[k] = f * out[k];
  }
  MetricPtr base_;
  ScalarPtr phi_;
  double amp_;
};

class GenericTest : public ModelBase<GenericTest> {
 public:
  GenericTest(int n, double amp) : n_(n), amp_(amp) {}
  int dim() const override { return n_ + 1; }
  std::string name() const override { return "generic_test_metric"; }
  template <class T>
  void metric(const T* w, T* out) const {
    using std::cos;
    using std::sin;
    const int d = n_ + 1;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        T arg = 0.7 * w[0] + 0.5 * (i + 1) * (j + 1) * 0.3;
        for (int a = 1; a < d; ++a) arg = arg + (0.4 + 0.2 * ((a + i + j) % 3)) * w[a];
        T v = amp_ * (sin(arg) + 0.5 * cos(1.3 * arg + w[0]));
        if (i == j) v = v + 1.0 + 0.1 * i;
        out[i * d + j] = v;
        out[j * d + i] = v;
      }
  }

 private:
  int n_;
  double amp_;
};

class Gaussian : public AnalyticScalar {
 public:
  Gaussian(std::vector<double> c, double s) : c_(std::move(c)), s_(s) {}
  double eval(const double* w) const override { return apply(w); }
  AD2 eval(const AD2* w) const override { return apply(w); }
  std::string name() const override { return "gaussian"; }

 private:
  template <class T>
  T apply(const T* w) const {
    using std::exp;
    T r2 = sq<T>(w[0] - c_[0]);
    for (size_t a = 1; a < c_.size(); ++a) r2 = r2 + sq<T>(w[a] - c_[a]);
    return exp(-r2 / (s_ * s_));
  }
  std::vector<double> c_;
  double s_;
};

class Wave : public AnalyticScalar {
 public:
  Wave(int d, double scale) : d_(d), scale_(scale) {}
  double eval(const double* w) const override { return apply(w); }
  AD2 eval(const AD2* w) const override { return apply(w); }
  std::string name() const override { return "smooth_wave"; }

 private:
  template <class T>
  T apply(const T* w) const {
    using std::cos;
    using std::sin;
    T a = 0.9 * w[0], b = 0.6 * w[0];
    for (int k = 1; k < d_; ++k) {
      a = a + (0.5 + 0.3 * k) * w[k];
      b = b - (0.8 - 0.2 * k) * w[k];
    }
    return sin(scale_ * a) + 0.5 * cos(scale_ * b + 0.4);
  }
  int d_;
  double scale_;
};

class Coordinate : public AnalyticScalar {
 public:
  explicit Coordinate(int axis) : axis_(axis) {}
  double eval(const double* w) const override { return w[axis_]; }
  AD2 eval(const AD2* w) const override { return w[axis_]; }
  std::string name() const override { return "coordinate"; }

 private:
  int axis_;
};

class RoundSphere : public ModelBase<RoundSphere> {
 public:
  explicit RoundSphere(int n) : n_(n) {}
  int dim() const override { return n_; }
  std::string name() const override { return "round_sphere"; }
  template <class T>
  void metric(const T* w, T* out) const {
    T y2 = w[0] * w[0];
    for (int a = 1; a < n_; ++a) y2 = y2 + w[a] * w[a];
    const T b = 1.0 / sq<T>(1.0 + y2 / 4.0);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) out[i * n_ + j] = i == j ? b : w[0] * 0.0;
  }

 private:
  int n_;
};

}  // namespace

SmallMat AnalyticMetric::value(const double* w) const {
  const int d = dim();
  double buf[kMaxDim * kMaxDim];
  eval(w, buf);
  SmallMat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = buf[i * d + j];
  return g;
}

MetricJet AnalyticMetric::jet(const double* w) const {
  const int d = dim();
  auto W = seed(d, w);
  std::array<AD2, kMaxDim * kMaxDim> out;
  eval(W.data(), out.data());
  MetricJet j = MetricJet::zero(d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const AD2& v = out[a * d + b];
      j.g(a, b) = val(v);
      for (int m = 0; m < d; ++m) {
        j.dg[m](a, b) = d1(v, m);
        for (int l = 0; l < d; ++l) j.ddg[m][l](a, b) = d2(v, m, l);
      }
    }
  return j;
}

void scalar_jet(const AnalyticScalar& f, int d, const double* w, double& value, SmallVec& grad, SmallMat& hess) {
  auto W = seed(d, w);
  const AD2 v = f.eval(W.data());
  value = val(v);
  grad.resize(d);
  hess.resize(d, d);
  for (int m = 0; m < d; ++m) {
    grad[m] = d1(v, m);
    for (int l = 0; l < d; ++l) hess(m, l) = d2(v, m, l);
  }
}

MetricPtr hyperbolic_half_space(int n) { return std::make_shared<HalfSpace>(n + 1, false); }
MetricPtr poincare_ball_chart(int n) { return std::make_shared<BallChart>(n); }
MetricPtr polynomial_tangential(int n, double a1, double a2) { return std::make_shared<PolyTangential>(n, a1, a2); }
MetricPtr perturbed(MetricPtr base, ScalarPtr phi, double amplitude) {
  return std::make_shared<Perturbed>(std::move(base), std::move(phi), amplitude);
}
MetricPtr generic_test_metric(int n, double amplitude) { return std::make_shared<GenericTest>(n, amplitude); }
ScalarPtr gaussian_bump(std::vector<double> center, double width) {
  if (!(width > 0)) throw std::invalid_argument("bump width must be positive");
  return std::make_shared<Gaussian>(std::move(center), width);
}
ScalarPtr smooth_wave(int d, double scale) { return std::make_shared<Wave>(d, scale); }
ScalarPtr coordinate_function(int axis) {
  if (axis < 0 || axis >= kMaxDim) throw std::invalid_argument("invalid axis");
  return std::make_shared<Coordinate>(axis);
}
MetricPtr flat_boundary(int n) { return std::make_shared<HalfSpace>(n, true); }
MetricPtr round_sphere_boundary(int n) { return std::make_shared<RoundSphere>(n); }

}  // namespace peglue
