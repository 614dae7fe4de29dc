#pragma once

namespace abf {

// Truncated second-order forward-mode number along two directions u, v:
// f + du*e_u + dv*e_v + duv*e_u*e_v with e_u^2 = e_v^2 = 0. The e_u*e_v
// coefficient of a composed function is its mixed second derivative, which is
// exactly what a Hessian entry needs — no step size, no truncation error.
struct HyperDual {
  double f = 0, du = 0, dv = 0, duv = 0;

  HyperDual() = default;
  HyperDual(double f_, double du_, double dv_, double duv_) : f(f_), du(du_), dv(dv_), duv(duv_) {}
  static HyperDual constant(double c) { return {c, 0, 0, 0}; }

  HyperDual operator+(const HyperDual& o) const { return {f + o.f, du + o.du, dv + o.dv, duv + o.duv}; }
  HyperDual operator-(const HyperDual& o) const { return {f - o.f, du - o.du, dv - o.dv, duv - o.duv}; }
  HyperDual operator*(const HyperDual& o) const {
    return {f * o.f, f * o.du + du * o.f, f * o.dv + dv * o.f,
            f * o.duv + du * o.dv + dv * o.du + duv * o.f};
  }
  HyperDual operator/(const HyperDual& o) const {
    double inv = 1.0 / o.f;
    HyperDual r{inv, -o.du * inv * inv, -o.dv * inv * inv,
                (2.0 * o.du * o.dv * inv - o.duv) * inv * inv};
    return *this * r;
  }
};

// Chain rule for a scalar function with known first/second derivative at s.f.
inline HyperDual compose(const HyperDual& s, double f, double fp, double fpp) {
  return {f, fp * s.du, fp * s.dv, fp * s.duv + fpp * s.du * s.dv};
}

}  // namespace abf
