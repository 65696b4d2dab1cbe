#pragma once

#include <cmath>

namespace smaflow {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Symmetric 2x2 tensor [[xx, xy], [xy, yy]].
struct SymTensor {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    double trace() const { return xx + yy; }
};

inline SymTensor operator+(SymTensor a, SymTensor b) {
    return {a.xx + b.xx, a.xy + b.xy, a.yy + b.yy};
}

inline SymTensor operator-(SymTensor a, SymTensor b) {
    return {a.xx - b.xx, a.xy - b.xy, a.yy - b.yy};
}

inline SymTensor operator*(double s, SymTensor a) {
    return {s * a.xx, s * a.xy, s * a.yy};
}

// Full contraction A:B (the xy component counts twice).
inline double ddot(SymTensor a, SymTensor b) {
    return a.xx * b.xx + 2.0 * a.xy * b.xy + a.yy * b.yy;
}

// Trace-free symmetric 2x2 tensor [[a, b], [b, -a]], stored as the pair (a,b).
// Pointwise laws (dissipation, hardening, prox) use the Euclidean norm of
// (a,b); the elastic coupling embeds the tensor via as_sym and contracts fully.
struct DevTensor {
    double a = 0.0;
    double b = 0.0;

    SymTensor as_sym() const { return {a, b, -a}; }
    double norm() const { return std::sqrt(a * a + b * b); }
};

inline DevTensor operator+(DevTensor p, DevTensor q) { return {p.a + q.a, p.b + q.b}; }
inline DevTensor operator-(DevTensor p, DevTensor q) { return {p.a - q.a, p.b - q.b}; }
inline DevTensor operator*(double s, DevTensor p) { return {s * p.a, s * p.b}; }

// Inner product on the (a,b) representation.
inline double dot(DevTensor p, DevTensor q) { return p.a * q.a + p.b * q.b; }

// Deviatoric part of a symmetric tensor, in (a,b) coordinates.
inline DevTensor deviatoric(SymTensor e) {
    return {0.5 * (e.xx - e.yy), e.xy};
}

}  // namespace smaflow
