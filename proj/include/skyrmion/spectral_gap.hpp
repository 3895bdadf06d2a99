#pragma once

// Tangent vector harmonics on the unit sphere and the harmonic-map Hessian at
// the identity, h(z, x) = int (grad z : grad x - 2 z . x).
//
// Each real scalar harmonic Y_{n,j} is the restriction of
//   f(x, y, z) = c T_n^|j|(z) C_j(x, y),  T_n^m = d^m P_n / dz^m,
//   C_j = Re (x + i y)^j (j > 0), Im (x + i y)^|j| (j < 0), 1 (j = 0),
// so surface derivatives are tangential projections of ambient ones and the
// poles need no special treatment.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "skyrmion/field.hpp"
#include "skyrmion/specfun.hpp"

namespace skyrmion {

/// Gauss-Legendre in z times the uniform rule in azimuth.
struct SphereQuadrature {
    int order = 0;
    std::vector<Vec3> points;
    std::vector<double> weights;

    /// order Legendre nodes and 2 order azimuthal nodes; exact for restrictions
    /// of polynomials of degree < 2 order.
    static SphereQuadrature make(int order) {
        if (order < 1) throw DomainError("SphereQuadrature: order must be positive");
        // Golub-Welsch
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
        for (int k = 1; k < order; ++k) J(k, k - 1) = J(k - 1, k) = k / std::sqrt(4.0 * k * k - 1.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
        SphereQuadrature q;
        q.order = order;
        const int na = 2 * order;
        for (int a = 0; a < order; ++a) {
            const double z = es.eigenvalues()(a);
            const double wz = 2.0 * es.eigenvectors()(0, a) * es.eigenvectors()(0, a);
            const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
            for (int b = 0; b < na; ++b) {
                const double phi = 2.0 * std::numbers::pi * b / na;
                q.points.emplace_back(s * std::cos(phi), s * std::sin(phi), z);
                q.weights.push_back(wz * 2.0 * std::numbers::pi / na);
            }
        }
        return q;
    }
};

enum class HarmonicKind { Type2, Type3 };

/// Type2: grad Y / sqrt(n(n+1)); Type3: y x grad Y / sqrt(n(n+1)).
struct VectorHarmonic {
    int n = 1;
    int j = 0;
    HarmonicKind kind = HarmonicKind::Type2;

    void validate() const {
        if (n < 1 || j < -n || j > n) throw DomainError("VectorHarmonic: need n >= 1 and |j| <= n");
    }
};

/// Value, ambient gradient and Hessian of a scalar extension at a point.
struct ScalarJet {
    double value = 0.0;
    Vec3 grad = Vec3::Zero();
    Eigen::Matrix3d hess = Eigen::Matrix3d::Zero();
};

/// Tangent field value and its surface derivative (rows: components, columns: directions).
struct TangentJet {
    Vec3 value = Vec3::Zero();
    Eigen::Matrix3d grad = Eigen::Matrix3d::Zero();
};

namespace detail {

// T_n^m and its first two derivatives at z.
inline std::array<double, 3> legendre_derivative(int n, int m, double z) {
    double t0 = 1.0;
    for (int k = 1; k <= m; ++k) t0 *= 2.0 * k - 1.0;
    if (n == m) return {t0, 0.0, 0.0};
    double a = t0, da = 0.0, dda = 0.0;
    double b = (2.0 * m + 1.0) * z * t0, db = (2.0 * m + 1.0) * t0, ddb = 0.0;
    for (int k = m + 1; k < n; ++k) {
        const double c = 1.0 / (k - m + 1.0);
        const double nb = c * ((2.0 * k + 1.0) * z * b - (k + m) * a);
        const double ndb = c * ((2.0 * k + 1.0) * (b + z * db) - (k + m) * da);
        const double nddb = c * ((2.0 * k + 1.0) * (2.0 * db + z * ddb) - (k + m) * dda);
        a = b, da = db, dda = ddb;
        b = nb, db = ndb, ddb = nddb;
    }
    return {b, db, ddb};
}

inline double harmonic_norm(int n, int m) {
    double r = (2.0 * n + 1.0) / (4.0 * std::numbers::pi);
    for (int k = n - m + 1; k <= n + m; ++k) r /= k;
    return std::sqrt(m == 0 ? r : 2.0 * r);
}

}  // namespace detail

/// Orthonormal real harmonic Y_{n,j} extended off the sphere as above.
inline ScalarJet scalar_harmonic_jet(int n, int j, const Vec3& y) {
    if (n < 0 || j < -n || j > n) throw DomainError("scalar_harmonic: need |j| <= n");
    const int m = std::abs(j);
    const auto [T, dT, ddT] = detail::legendre_derivative(n, m, y.z());
    double C = 1.0, Cx = 0.0, Cy = 0.0, Cxx = 0.0, Cxy = 0.0, Cyy = 0.0;
    if (m > 0) {
        const std::complex<double> w(y.x(), y.y());
        const auto w1 = std::pow(w, m - 1);
        const auto w2 = m >= 2 ? std::pow(w, m - 2) : std::complex<double>(0.0, 0.0);
        const auto wm = w1 * w;
        const double mm = m, m2 = m * (m - 1.0);
        if (j > 0) {
            C = wm.real(), Cx = mm * w1.real(), Cy = -mm * w1.imag();
            Cxx = m2 * w2.real(), Cxy = -m2 * w2.imag(), Cyy = -m2 * w2.real();
        } else {
            C = wm.imag(), Cx = mm * w1.imag(), Cy = mm * w1.real();
            Cxx = m2 * w2.imag(), Cxy = m2 * w2.real(), Cyy = -m2 * w2.imag();
        }
    }
    const double c = detail::harmonic_norm(n, m);
    ScalarJet s;
    s.value = c * T * C;
    s.grad = c * Vec3(T * Cx, T * Cy, dT * C);
    s.hess << T * Cxx, T * Cxy, dT * Cx, T * Cxy, T * Cyy, dT * Cy, dT * Cx, dT * Cy, ddT * C;
    s.hess *= c;
    return s;
}

inline double scalar_harmonic(int n, int j, const Vec3& y) { return scalar_harmonic_jet(n, j, y).value; }

/// Value and surface derivative of a vector harmonic at a point of the sphere.
inline TangentJet harmonic_jet(const VectorHarmonic& h, const Vec3& y) {
    h.validate();
    const auto s = scalar_harmonic_jet(h.n, h.j, y);
    const double inv = 1.0 / std::sqrt(h.n * (h.n + 1.0));
    const Eigen::Matrix3d P = Eigen::Matrix3d::Identity() - y * y.transpose();
    // v = grad f - (y . grad f) y, extended off the sphere by the same formula.
    const double yg = y.dot(s.grad);
    const Vec3 v = inv * (s.grad - yg * y);
    const Vec3 dyg = s.grad + s.hess * y;  // d(y . grad f) / dy
    const Eigen::Matrix3d Jv = inv * (s.hess - y * dyg.transpose() - yg * Eigen::Matrix3d::Identity());
    TangentJet out;
    if (h.kind == HarmonicKind::Type2) {
        out.value = v;
        out.grad = Jv * P;
        return out;
    }
    Eigen::Matrix3d Ju;
    for (int l = 0; l < 3; ++l) Ju.col(l) = Vec3::Unit(l).cross(v) + y.cross(Jv.col(l));
    out.value = y.cross(v);
    out.grad = Ju * P;
    return out;
}

inline Vec3 harmonic_eval(const VectorHarmonic& h, const Vec3& y) { return harmonic_jet(h, y).value; }

/// Finite linear combination of vector harmonics.
struct Expansion {
    struct Term {
        VectorHarmonic h;
        double coef = 0.0;
    };
    std::vector<Term> terms;

    TangentJet jet(const Vec3& y) const {
        TangentJet out;
        for (const auto& t : terms) {
            const auto j = harmonic_jet(t.h, y);
            out.value += t.coef * j.value;
            out.grad += t.coef * j.grad;
        }
        return out;
    }
};

/// Every vector harmonic with 1 <= n <= n_max, ordered by n, kind, j.
inline std::vector<VectorHarmonic> harmonic_basis(int n_max) {
    std::vector<VectorHarmonic> out;
    for (int n = 1; n <= n_max; ++n)
        for (auto kind : {HarmonicKind::Type2, HarmonicKind::Type3})
            for (int j = -n; j <= n; ++j) out.push_back({n, j, kind});
    return out;
}

class TangencyError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Node samples of a tangent field.
struct NodeField {
    std::vector<TangentJet> jets;
};

inline NodeField sample_nodes(const Expansion& e, const SphereQuadrature& q, double tangency_tol = 1e-12) {
    NodeField f;
    f.jets.reserve(q.points.size());
    for (const auto& y : q.points) {
        f.jets.push_back(e.jet(y));
        if (std::abs(f.jets.back().value.dot(y)) > tangency_tol)
            throw TangencyError("sample_nodes: field is not tangent to the sphere");
    }
    return f;
}

/// int grad z : grad x and int z . x by quadrature.
struct BilinearForms {
    double dirichlet = 0.0;
    double l2 = 0.0;
    double hessian() const { return dirichlet - 2.0 * l2; }
};

inline BilinearForms bilinear_forms(const NodeField& a, const NodeField& b, const SphereQuadrature& q) {
    BilinearForms r;
    for (std::size_t k = 0; k < q.weights.size(); ++k) {
        r.dirichlet += q.weights[k] * (a.jets[k].grad.array() * b.jets[k].grad.array()).sum();
        r.l2 += q.weights[k] * a.jets[k].value.dot(b.jets[k].value);
    }
    return r;
}

inline double hessian_form(const Expansion& zeta, const Expansion& xi, const SphereQuadrature& q) {
    return bilinear_forms(sample_nodes(zeta, q), sample_nodes(xi, q), q).hessian();
}

/// Gram matrices of harmonic_basis(n_max) in the Dirichlet and L2 products.
struct GramMatrices {
    std::vector<VectorHarmonic> basis;
    Eigen::MatrixXd dirichlet;
    Eigen::MatrixXd l2;
};

inline GramMatrices gram_matrices(int n_max, const SphereQuadrature& q) {
    GramMatrices g;
    g.basis = harmonic_basis(n_max);
    const auto nb = static_cast<Eigen::Index>(g.basis.size());
    std::vector<NodeField> samples;
    for (const auto& h : g.basis) samples.push_back(sample_nodes(Expansion{{{h, 1.0}}}, q));
    g.dirichlet.resize(nb, nb);
    g.l2.resize(nb, nb);
    for (Eigen::Index a = 0; a < nb; ++a)
        for (Eigen::Index b = a; b < nb; ++b) {
            const auto f = bilinear_forms(samples[a], samples[b], q);
            g.dirichlet(a, b) = g.dirichlet(b, a) = f.dirichlet;
            g.l2(a, b) = g.l2(b, a) = f.l2;
        }
    return g;
}

struct GapRow {
    int n = 0;
    double eigenvalue = 0.0;  // Dirichlet eigenvalue, n(n+1)
    double hessian_eigenvalue = 0.0;
    int multiplicity = 0;
    double ratio = 0.0;  // hessian / dirichlet
    double max_deviation = 0.0;  // largest |computed - n(n+1)| in the cluster
};

struct GapReport {
    std::vector<GapRow> rows;
    int null_dimension = 0;
    double min_ratio = 0.0;  // over n >= 2
    int argmin_n = 0;
};

/// Generalized eigenvalues of (Dirichlet, L2) on the basis up to n_max, grouped by n.
inline GapReport gap_report(int n_max = 6, int order = 16, double null_tol = 1e-9) {
    if (n_max < 2) throw DomainError("gap_report: n_max must be at least 2");
    const auto q = SphereQuadrature::make(order);
    const auto g = gram_matrices(n_max, q);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(g.dirichlet, g.l2);
    const Eigen::VectorXd mu = es.eigenvalues();

    GapReport r;
    r.min_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < mu.size(); ++k)
        if (std::abs(mu(k) - 2.0) <= null_tol) ++r.null_dimension;
    Eigen::Index k = 0;
    for (int n = 1; n <= n_max; ++n) {
        GapRow row;
        row.n = n;
        row.multiplicity = 2 * (2 * n + 1);
        const double exact = n * (n + 1.0);
        double sum = 0.0;
        for (int c = 0; c < row.multiplicity; ++c, ++k) {
            sum += mu(k);
            row.max_deviation = std::max(row.max_deviation, std::abs(mu(k) - exact));
        }
        row.eigenvalue = sum / row.multiplicity;
        row.hessian_eigenvalue = row.eigenvalue - 2.0;
        row.ratio = row.hessian_eigenvalue / row.eigenvalue;
        if (n >= 2 && row.ratio < r.min_ratio) {
            r.min_ratio = row.ratio;
            r.argmin_n = n;
        }
        r.rows.push_back(row);
    }
    return r;
}

}  // namespace skyrmion
