#include "peglue/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace peglue {

MetricJet MetricJet::zero(int d) {
  MetricJet j;
  j.d = d;
  j.g = SmallMat::Zero(d, d);
  for (int m = 0; m < d; ++m) {
    j.dg[m] = SmallMat::Zero(d, d);
    for (int l = 0; l < d; ++l) j.ddg[m][l] = SmallMat::Zero(d, d);
  }
  return j;
}

MetricJet operator+(const MetricJet& a, const MetricJet& b) {
  MetricJet r = a;
  r.g += b.g;
  for (int m = 0; m < a.d; ++m) {
    r.dg[m] += b.dg[m];
    for (int l = 0; l < a.d; ++l) r.ddg[m][l] += b.ddg[m][l];
  }
  return r;
}

CoordinateCurvature coordinate_curvature(const MetricJet& jet) {
  const int d = jet.d;
  CoordinateCurvature c;
  c.d = d;
  Eigen::LLT<SmallMat> llt(jet.g);
  if (llt.info() != Eigen::Success) throw std::domain_error("metric not positive definite");
  c.ginv = llt.solve(SmallMat::Identity(d, d));

  // first-kind symbols Gamma_{l,ij} = 1/2 (d_i g_lj + d_j g_li - d_l g_ij)
  std::array<SmallMat, kMaxDim> first;
  for (int l = 0; l < d; ++l) {
    first[l].resize(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) first[l](i, j) = 0.5 * (jet.dg[i](l, j) + jet.dg[j](l, i) - jet.dg[l](i, j));
  }
  for (int k = 0; k < d; ++k) {
    c.gamma[k] = SmallMat::Zero(d, d);
    for (int l = 0; l < d; ++l) c.gamma[k] += c.ginv(k, l) * first[l];
  }

  for (int m = 0; m < d; ++m) {
    const SmallMat dginv = -c.ginv * jet.dg[m] * c.ginv;
    std::array<SmallMat, kMaxDim> dfirst;
    for (int l = 0; l < d; ++l) {
      dfirst[l].resize(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          dfirst[l](i, j) =
              0.5 * (jet.ddg[m][i](l, j) + jet.ddg[m][j](l, i) - jet.ddg[m][l](i, j));
    }
    for (int k = 0; k < d; ++k) {
      c.dgamma[m][k] = SmallMat::Zero(d, d);
      for (int l = 0; l < d; ++l) c.dgamma[m][k] += dginv(k, l) * first[l] + c.ginv(k, l) * dfirst[l];
    }
  }

  // R_jk = d_i G^i_jk - d_j G^i_ik + G^i_ip G^p_jk - G^i_jp G^p_ik
  c.ricci = SmallMat::Zero(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = j; k < d; ++k) {
      double r = 0;
      for (int i = 0; i < d; ++i) {
        r += c.dgamma[i][i](j, k) - c.dgamma[j][i](i, k);
        for (int p = 0; p < d; ++p) r += c.gamma[i](i, p) * c.gamma[p](j, k) - c.gamma[i](j, p) * c.gamma[p](i, k);
      }
      c.ricci(j, k) = c.ricci(k, j) = r;
    }
  c.scalar = (c.ginv.cwiseProduct(c.ricci)).sum();
  return c;
}

Tensor4 coordinate_riemann(const MetricJet& jet, const CoordinateCurvature& c) {
  const int d = jet.d;
  Tensor4 up(d);  // R_ijk^m
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int m = 0; m < d; ++m) {
          double r = c.dgamma[i][m](j, k) - c.dgamma[j][m](i, k);
          for (int p = 0; p < d; ++p) r += c.gamma[m](i, p) * c.gamma[p](j, k) - c.gamma[m](j, p) * c.gamma[p](i, k);
          up(i, j, k, m) = r;
        }
  Tensor4 rm(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double s = 0;
          for (int m = 0; m < d; ++m) s += jet.g(l, m) * up(i, j, k, m);
          rm(i, j, k, l) = s;
        }
  return rm;
}

SmallMat ricci_cc_point(double x, const MetricJet& jet, const CoordinateCurvature& c) {
  const int d = jet.d;
  const int n = d - 1;
  const SmallMat& g0 = c.gamma[0];
  const double tr = c.ginv.cwiseProduct(g0).sum();
  return x * x * c.ricci - (n - 1) * x * g0 - (x * tr + n * c.ginv(0, 0)) * jet.g;
}

SmallMat conformal_ricci(const MetricJet& jet, const CoordinateCurvature& c, const SmallVec& df,
                         const SmallMat& hess_f) {
  const int d = jet.d;
  const int n = d - 1;
  SmallMat H = hess_f;
  for (int k = 0; k < d; ++k) H -= df[k] * c.gamma[k];  // covariant Hessian
  const double lap = c.ginv.cwiseProduct(H).sum();
  const double df2 = df.dot(c.ginv * df);
  return c.ricci - (n - 1) * (H - df * df.transpose()) - (lap + (n - 1) * df2) * jet.g;
}

FrameGeometry frame_geometry(double x, const MetricJet& jet, bool with_riemann, bool with_e_omega) {
  const int d = jet.d;
  const int n = d - 1;
  const CoordinateCurvature c = coordinate_curvature(jet);
  FrameGeometry f;
  f.d = d;
  f.x = x;
  f.g = jet.g;
  f.ginv = c.ginv;
  for (int k = 0; k < d; ++k) {
    f.omega[k] = x * c.gamma[k] + c.ginv(k, 0) * jet.g;
    for (int i = 0; i < d; ++i)
      if (i == k) f.omega[k](i, 0) -= 1.0;
  }
  f.ricci = ricci_cc_point(x, jet, c);
  f.einstein = f.ricci + n * jet.g;

  if (with_e_omega) {
    for (int m = 0; m < d; ++m) {
      const SmallMat dginv = -c.ginv * jet.dg[m] * c.ginv;
      for (int k = 0; k < d; ++k) {
        SmallMat t = x * c.dgamma[m][k] + c.ginv(k, 0) * jet.dg[m] + dginv(k, 0) * jet.g;
        if (m == 0) t += c.gamma[k];
        f.e_omega[m][k] = x * t;
      }
    }
    f.has_e_omega = true;
  }

  if (with_riemann) {
    // x^2 Rm(gbar) - A (kn) gbar,  A = x Gamma^0 + 1/2 gbar^{00} gbar,
    // (h kn k)_ijkl = h_il k_jk + h_jk k_il - h_ik k_jl - h_jl k_ik
    const Tensor4 rb = coordinate_riemann(jet, c);
    const SmallMat A = x * c.gamma[0] + 0.5 * c.ginv(0, 0) * jet.g;
    const SmallMat& G = jet.g;
    f.riemann = Tensor4(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
          for (int l = 0; l < d; ++l)
            f.riemann(i, j, k, l) = x * x * rb(i, j, k, l) -
                                    (A(i, l) * G(j, k) + A(j, k) * G(i, l) - A(i, k) * G(j, l) - A(j, l) * G(i, k));
    f.has_riemann = true;
  }
  return f;
}

double tensor_norm(const SmallMat& t, const SmallMat& ginv) {
  const SmallMat u = ginv * t * ginv;
  return std::sqrt(std::max(0.0, u.cwiseProduct(t).sum()));
}

double oneform_norm(const SmallVec& v, const SmallMat& ginv) { return std::sqrt(std::max(0.0, v.dot(ginv * v))); }

}  // namespace peglue
