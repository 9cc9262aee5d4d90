#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "manifold_gdp/rng.hpp"

namespace mgdp {

inline constexpr double pi = std::numbers::pi;

enum class ManifoldKind { euclidean, circle, sphere, hyperbolic };

inline const char* to_string(ManifoldKind k) {
    switch (k) {
        case ManifoldKind::euclidean: return "euclidean";
        case ManifoldKind::circle: return "circle";
        case ManifoldKind::sphere: return "sphere";
        case ManifoldKind::hyperbolic: return "hyperbolic";
    }
    return "?";
}

/// Descriptor of a constant-curvature space. Curvature is normalized to
/// {-1, 0, +1}; other |kappa| are handled by rescaling distances externally.
struct ManifoldSpec {
    ManifoldKind kind;
    int dim;                // intrinsic dimension
    double curvature;       // 0, +1 or -1
    double injectivity_radius;

    static ManifoldSpec euclidean(int d) {
        require_dim(d);
        return {ManifoldKind::euclidean, d, 0.0, std::numeric_limits<double>::infinity()};
    }
    static ManifoldSpec circle() { return {ManifoldKind::circle, 1, 1.0, pi}; }
    static ManifoldSpec sphere(int d) {
        require_dim(d);
        return {ManifoldKind::sphere, d, 1.0, pi};
    }
    static ManifoldSpec hyperbolic(int d) {
        require_dim(d);
        return {ManifoldKind::hyperbolic, d, -1.0, std::numeric_limits<double>::infinity()};
    }

    /// Length of the coordinate vector representing a point.
    int ambient_dim() const {
        switch (kind) {
            case ManifoldKind::euclidean: return dim;
            case ManifoldKind::circle: return 1;
            default: return dim + 1;
        }
    }

    bool compact() const { return kind == ManifoldKind::circle || kind == ManifoldKind::sphere; }

  private:
    static void require_dim(int d) {
        if (d < 1) throw std::invalid_argument("ManifoldSpec: dimension must be positive");
    }
};

/// Point in the ambient representation: plain vector (euclidean), angle in
/// (-pi, pi] (circle), unit vector (sphere), or hyperboloid coordinates with
/// Minkowski norm -1 and first coordinate >= 1 (hyperbolic).
struct Point {
    Eigen::VectorXd coords;
};

/// Tangent vector anchored at `base`, stored in ambient coordinates.
struct TangentVector {
    Point base;
    Eigen::VectorXd vec;
};

namespace detail {

inline double wrap_angle(double theta) {
    // maps to (-pi, pi]
    double t = std::fmod(theta, 2.0 * pi);
    if (t <= -pi) t += 2.0 * pi;
    if (t > pi) t -= 2.0 * pi;
    return t;
}

inline double minkowski_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double s = -a[0] * b[0];
    for (Eigen::Index i = 1; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline void check_dims(const ManifoldSpec& m, const Point& p, const char* who) {
    if (p.coords.size() != m.ambient_dim())
        throw std::invalid_argument(std::string(who) + ": point dimension mismatch");
}

// Restores the defining quadric constraint after arithmetic.
inline Point project_to_manifold(const ManifoldSpec& m, Eigen::VectorXd x) {
    switch (m.kind) {
        case ManifoldKind::sphere: x /= x.norm(); break;
        case ManifoldKind::hyperbolic: {
            double s = x.tail(x.size() - 1).squaredNorm();
            x[0] = std::sqrt(1.0 + s);
            break;
        }
        case ManifoldKind::circle: x[0] = wrap_angle(x[0]); break;
        case ManifoldKind::euclidean: break;
    }
    return {std::move(x)};
}

}  // namespace detail

/// Throws unless p satisfies the defining constraints of M.
inline void validate_point(const ManifoldSpec& m, const Point& p) {
    detail::check_dims(m, p, "validate_point");
    switch (m.kind) {
        case ManifoldKind::euclidean: break;
        case ManifoldKind::circle:
            if (!(p.coords[0] > -pi - 1e-12 && p.coords[0] <= pi + 1e-12))
                throw std::invalid_argument("validate_point: angle outside (-pi, pi]");
            break;
        case ManifoldKind::sphere:
            if (std::abs(p.coords.norm() - 1.0) > 1e-12)
                throw std::invalid_argument("validate_point: sphere point not unit norm");
            break;
        case ManifoldKind::hyperbolic:
            if (std::abs(detail::minkowski_dot(p.coords, p.coords) + 1.0) > 1e-12 ||
                p.coords[0] < 1.0 - 1e-12)
                throw std::invalid_argument("validate_point: not on the hyperboloid sheet");
            break;
    }
}

/// Geodesic distance between p and q.
inline double distance(const ManifoldSpec& m, const Point& p, const Point& q) {
    detail::check_dims(m, p, "distance");
    detail::check_dims(m, q, "distance");
    switch (m.kind) {
        case ManifoldKind::euclidean:
            return (p.coords - q.coords).norm();
        case ManifoldKind::circle:
            return std::abs(detail::wrap_angle(p.coords[0] - q.coords[0]));
        case ManifoldKind::sphere: {
            // chord form of arccos(p.q); keeps full precision near 0 and pi
            if (p.coords.dot(q.coords) >= 0.0) {
                double half = 0.5 * (p.coords - q.coords).norm();
                return 2.0 * std::asin(std::min(1.0, half));
            }
            double half = 0.5 * (p.coords + q.coords).norm();
            return pi - 2.0 * std::asin(std::min(1.0, half));
        }
        case ManifoldKind::hyperbolic: {
            // cosh d - 1 = <p-q, p-q>_M / 2, evaluated without cancellation
            double s = detail::minkowski_dot(p.coords - q.coords, p.coords - q.coords);
            return 2.0 * std::asinh(0.5 * std::sqrt(std::max(0.0, s)));
        }
    }
    return 0.0;
}

/// Squared Riemannian norm of a tangent vector.
inline double tangent_squared_norm(const ManifoldSpec& m, const TangentVector& v) {
    if (m.kind == ManifoldKind::hyperbolic) return detail::minkowski_dot(v.vec, v.vec);
    return v.vec.squaredNorm();
}

inline double tangent_norm(const ManifoldSpec& m, const TangentVector& v) {
    return std::sqrt(std::max(0.0, tangent_squared_norm(m, v)));
}

/// Geodesic endpoint gamma_{(p,v)}(1). exp_p(0) returns p unchanged.
inline Point exp_map(const ManifoldSpec& m, const TangentVector& v) {
    detail::check_dims(m, v.base, "exp_map");
    const Eigen::VectorXd& p = v.base.coords;
    switch (m.kind) {
        case ManifoldKind::euclidean:
            return {p + v.vec};
        case ManifoldKind::circle:
            return {Eigen::VectorXd::Constant(1, detail::wrap_angle(p[0] + v.vec[0]))};
        case ManifoldKind::sphere: {
            double t = v.vec.norm();
            if (t == 0.0) return v.base;
            Eigen::VectorXd x = std::cos(t) * p + (std::sin(t) / t) * v.vec;
            return detail::project_to_manifold(m, std::move(x));
        }
        case ManifoldKind::hyperbolic: {
            double t = tangent_norm(m, v);
            if (t == 0.0) return v.base;
            Eigen::VectorXd x = std::cosh(t) * p + (std::sinh(t) / t) * v.vec;
            return detail::project_to_manifold(m, std::move(x));
        }
    }
    return v.base;
}

/// Inverse of exp_map at p. Requires d(p, q) below the injectivity radius;
/// throws std::domain_error at the cut locus (antipodal points).
inline TangentVector log_map(const ManifoldSpec& m, const Point& p, const Point& q) {
    detail::check_dims(m, p, "log_map");
    detail::check_dims(m, q, "log_map");
    switch (m.kind) {
        case ManifoldKind::euclidean:
            return {p, q.coords - p.coords};
        case ManifoldKind::circle: {
            double diff = detail::wrap_angle(q.coords[0] - p.coords[0]);
            if (pi - std::abs(diff) < 1e-12)
                throw std::domain_error("log_map: antipodal points on the circle");
            return {p, Eigen::VectorXd::Constant(1, diff)};
        }
        case ManifoldKind::sphere: {
            double theta = distance(m, p, q);
            if (pi - theta < 1e-12)
                throw std::domain_error("log_map: antipodal points on the sphere");
            double c = std::clamp(p.coords.dot(q.coords), -1.0, 1.0);
            Eigen::VectorXd w = q.coords - c * p.coords;
            double n = w.norm();
            if (n < 1e-14) return {p, Eigen::VectorXd::Zero(p.coords.size())};
            return {p, (theta / n) * w};
        }
        case ManifoldKind::hyperbolic: {
            double d = distance(m, p, q);
            double alpha = std::max(1.0, -detail::minkowski_dot(p.coords, q.coords));
            Eigen::VectorXd w = q.coords - alpha * p.coords;
            double n2 = detail::minkowski_dot(w, w);
            if (n2 <= 0.0 || d == 0.0) return {p, Eigen::VectorXd::Zero(p.coords.size())};
            return {p, (d / std::sqrt(n2)) * w};
        }
    }
    return {p, Eigen::VectorXd::Zero(p.coords.size())};
}

/// Draws a tangent vector at p whose coefficients in an orthonormal basis of
/// T_p M are i.i.d. N(0, scale^2).
inline TangentVector draw_tangent_gaussian(const ManifoldSpec& m, const Point& p, double scale,
                                           RngStream& rng) {
    detail::check_dims(m, p, "draw_tangent_gaussian");
    switch (m.kind) {
        case ManifoldKind::euclidean:
        case ManifoldKind::circle: {
            Eigen::VectorXd v(p.coords.size());
            for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal(scale);
            return {p, std::move(v)};
        }
        case ManifoldKind::sphere: {
            Eigen::VectorXd z(p.coords.size());
            for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal(scale);
            // Orthogonal projection of an isotropic normal stays isotropic.
            z -= z.dot(p.coords) * p.coords;
            return {p, std::move(z)};
        }
        case ManifoldKind::hyperbolic: {
            // Gram-Schmidt an ambient basis against the Minkowski metric,
            // then fill coefficients; the tangent metric is positive definite.
            const Eigen::Index n = p.coords.size();
            Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
            std::vector<Eigen::VectorXd> basis;
            basis.reserve(m.dim);
            for (Eigen::Index i = 1; i < n && static_cast<int>(basis.size()) < m.dim; ++i) {
                Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
                b[i] = 1.0;
                b += detail::minkowski_dot(b, p.coords) * p.coords;  // project onto T_p
                for (const auto& e : basis) b -= detail::minkowski_dot(b, e) * e;
                double nb = detail::minkowski_dot(b, b);
                if (nb <= 1e-20) continue;
                b /= std::sqrt(nb);
                basis.push_back(std::move(b));
            }
            for (const auto& e : basis) v += rng.normal(scale) * e;
            return {p, std::move(v)};
        }
    }
    return {p, Eigen::VectorXd::Zero(p.coords.size())};
}

/// Unit-norm tangent direction, uniform on the unit sphere of T_p M.
inline TangentVector draw_tangent_direction(const ManifoldSpec& m, const Point& p, RngStream& rng) {
    for (;;) {
        TangentVector v = draw_tangent_gaussian(m, p, 1.0, rng);
        double n = tangent_norm(m, v);
        if (n > 1e-12) {
            v.vec /= n;
            return v;
        }
    }
}

/// Reference point for sampling: uniform w.r.t. the Riemannian measure on
/// compact kinds; the canonical origin on euclidean/hyperbolic space, where
/// homogeneity makes the base point irrelevant.
inline Point random_point(const ManifoldSpec& m, RngStream& rng) {
    switch (m.kind) {
        case ManifoldKind::euclidean:
            return {Eigen::VectorXd::Zero(m.dim)};
        case ManifoldKind::circle: {
            double theta = (rng.uniform_closed() - 0.5) * 2.0 * pi;
            return {Eigen::VectorXd::Constant(1, theta)};
        }
        case ManifoldKind::sphere: {
            Eigen::VectorXd z(m.dim + 1);
            for (;;) {
                for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
                double n = z.norm();
                if (n > 1e-12) return {z / n};
            }
        }
        case ManifoldKind::hyperbolic: {
            Eigen::VectorXd apex = Eigen::VectorXd::Zero(m.dim + 1);
            apex[0] = 1.0;
            return {apex};
        }
    }
    return {Eigen::VectorXd::Zero(m.ambient_dim())};
}

/// Endpoint of the geodesic from p along the given unit direction, at arc
/// length delta.
inline Point point_at_distance(const ManifoldSpec& m, const Point& p, double delta,
                               const TangentVector& unit_dir) {
    if (!(delta > 0.0) || (m.compact() && delta >= m.injectivity_radius))
        throw std::invalid_argument("point_at_distance: delta out of range");
    return exp_map(m, {p, delta * unit_dir.vec});
}

/// Point at exact distance delta from p, direction uniform on the unit
/// tangent sphere.
inline Point random_point_at_distance(const ManifoldSpec& m, const Point& p, double delta,
                                      RngStream& rng) {
    if (!(delta > 0.0) || (m.compact() && delta >= m.injectivity_radius))
        throw std::invalid_argument("random_point_at_distance: delta out of range");
    return point_at_distance(m, p, delta, draw_tangent_direction(m, p, rng));
}

/// n points uniform w.r.t. the Riemannian volume element in the closed ball
/// B_r(center): uniform direction, radius density proportional to sn(t)^{d-1}
/// with sn = t, sin t or sinh t according to the curvature sign.
inline std::vector<Point> sample_ball(const ManifoldSpec& m, const Point& center, double r,
                                      std::size_t n, RngStream& rng) {
    if (!(r > 0.0) || !(r < m.injectivity_radius / 2.0))
        throw std::invalid_argument("sample_ball: radius must lie in (0, inj/2)");
    auto sn = [&](double t) {
        if (m.curvature > 0.0) return std::sin(t);
        if (m.curvature < 0.0) return std::sinh(t);
        return t;
    };
    const double sn_max = sn(r);  // sn is increasing on (0, inj/2)
    const int exponent = m.dim - 1;
    std::vector<Point> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t;
        for (;;) {
            t = r * rng.uniform();
            if (exponent == 0) break;
            double accept = std::pow(sn(t) / sn_max, exponent);
            if (rng.uniform() <= accept) break;
        }
        TangentVector dir = draw_tangent_direction(m, center, rng);
        out.push_back(exp_map(m, {center, t * dir.vec}));
    }
    return out;
}

/// Convenience constructors for points.
inline Point make_point(const ManifoldSpec& m, std::initializer_list<double> cs) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(cs.size()));
    Eigen::Index i = 0;
    for (double c : cs) x[i++] = c;
    Point p{std::move(x)};
    validate_point(m, p);
    return p;
}

inline Point circle_point(double theta) {
    return {Eigen::VectorXd::Constant(1, detail::wrap_angle(theta))};
}

}  // namespace mgdp
