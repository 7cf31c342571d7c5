// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "jspec/errors.hpp"

namespace jspec {

using cplx = std::complex<double>;

// ldexp applied to both components; exact scaling by a power of two.
inline cplx ldexp_c(const cplx& v, int k) {
  return {std::ldexp(v.real(), k), std::ldexp(v.imag(), k)};
}

// Column vector in C^2.  <x,y> = x1 conj(y1) + x2 conj(y2).
struct Vec2 {
  cplx x{}, y{};

  double norm2() const { return std::norm(x) + std::norm(y); }
  double norm() const { return std::sqrt(norm2()); }
  bool is_zero() const { return x == 0.0 && y == 0.0; }

  friend Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(const cplx& s, const Vec2& v) { return {s * v.x, s * v.y}; }
};

inline cplx dot(const Vec2& a, const Vec2& b) {
  return a.x * std::conj(b.x) + a.y * std::conj(b.y);
}

// Dense 2x2 complex matrix, row major.
struct Mat2 {
  cplx m11{}, m12{}, m21{}, m22{};

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 zero() { return {}; }

  cplx trace() const { return m11 + m22; }
  cplx det() const { return m11 * m22 - m12 * m21; }

  // Entrywise complex conjugation.
  Mat2 conjugate() const {
    return {std::conj(m11), std::conj(m12), std::conj(m21), std::conj(m22)};
  }
  Mat2 transpose() const { return {m11, m21, m12, m22}; }
  // Hermitian transpose.
  Mat2 adjoint() const {
    return {std::conj(m11), std::conj(m21), std::conj(m12), std::conj(m22)};
  }

  Mat2 inverse() const {
    cplx d = det();
    if (d == 0.0) throw Error("Mat2::inverse: singular matrix");
    return {m22 / d, -m12 / d, -m21 / d, m11 / d};
  }

  Vec2 apply(const Vec2& v) const {
    return {m11 * v.x + m12 * v.y, m21 * v.x + m22 * v.y};
  }

  friend Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
            a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
  }
  friend Mat2 operator*(const cplx& s, const Mat2& a) {
    return {s * a.m11, s * a.m12, s * a.m21, s * a.m22};
  }
  friend Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.m11 + b.m11, a.m12 + b.m12, a.m21 + b.m21, a.m22 + b.m22};
  }
  friend Mat2 operator-(const Mat2& a, const Mat2& b) {
    return {a.m11 - b.m11, a.m12 - b.m12, a.m21 - b.m21, a.m22 - b.m22};
  }

  double frobenius() const {
    return std::sqrt(std::norm(m11) + std::norm(m12) + std::norm(m21) + std::norm(m22));
  }
  // Entrywise 1-norm of the matrix viewed as a vector in C^4.
  double entry_one_norm() const {
    return std::abs(m11) + std::abs(m12) + std::abs(m21) + std::abs(m22);
  }
  // Operator norm: largest singular value, closed form from the entries.
  double op_norm() const {
    double f2 = std::norm(m11) + std::norm(m12) + std::norm(m21) + std::norm(m22);
    double d = std::abs(det());
    double radicand = std::max(f2 * f2 - 4.0 * d * d, 0.0);
    return std::sqrt(0.5 * (f2 + std::sqrt(radicand)));
  }

  double max_abs() const {
    return std::max(std::max(std::abs(m11), std::abs(m12)),
                    std::max(std::abs(m21), std::abs(m22)));
  }
  double max_abs_imag() const {
    return std::max(std::max(std::abs(m11.imag()), std::abs(m12.imag())),
                    std::max(std::abs(m21.imag()), std::abs(m22.imag())));
  }
};

// (tr M)^2 - 4 det M.
inline cplx discriminant(const Mat2& m) {
  cplx t = m.trace();
  return t * t - 4.0 * m.det();
}

// Hermitian symmetrisation (M + M*)/2.  The result equals its own Hermitian
// transpose exactly: the diagonal is forced real and the off-diagonal pair
// conjugate by construction.
inline Mat2 sym_part(const Mat2& m) {
  cplx w = 0.5 * (m.m12 + std::conj(m.m21));
  return {cplx(m.m11.real(), 0.0), w, std::conj(w), cplx(m.m22.real(), 0.0)};
}

// Quarter-turn rotation [[0,-1],[1,0]]; the constant matrix E.
inline const Mat2 kE{0.0, -1.0, 1.0, 0.0};

}  // namespace jspec
