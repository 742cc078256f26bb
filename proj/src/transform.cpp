#include "zastava/transform.hpp"

#include <cmath>
#include <sstream>

#include "zastava/error.hpp"

namespace zastava
{

namespace
{

constexpr double kGaugeSymmetryTol = 1e-9;

// Full marked-point lists per vertex, derived points included.
std::vector<std::vector<Complex>> full_points(const ReducedChartPoint& p)
{
    std::vector<std::vector<Complex>> full(p.quiver.vertex_count());
    for (int vi = 0; vi < p.quiver.vertex_count(); ++vi)
        full[vi] = p.full_w(vi);
    return full;
}

void validate_gauge(const TransformSpec& spec, const std::vector<std::vector<Complex>>& full)
{
    const bool has_phi = static_cast<bool>(spec.log_phi);
    const bool has_deriv = static_cast<bool>(spec.log_phi_deriv);
    if (has_phi != has_deriv)
        throw Error(ErrorCode::ValidationError,
                    "custom gauge must supply both the log-potential and its derivatives");
    if (!has_phi)
        return;
    for (std::size_t vi = 0; vi < full.size(); ++vi) {
        const int a = static_cast<int>(full[vi].size());
        for (int r = 0; r < a; ++r)
            for (int s = r + 1; s < a; ++s) {
                const Complex rs = spec.log_phi_deriv(static_cast<int>(vi), r, s, full[vi]);
                const Complex sr = spec.log_phi_deriv(static_cast<int>(vi), s, r, full[vi]);
                if (std::abs(rs - sr) > kGaugeSymmetryTol * std::max(1.0, std::abs(rs))) {
                    std::ostringstream msg;
                    msg << "gauge log-potential has asymmetric mixed partials at vertex index "
                        << vi << ", indices (" << (r + 1) << ", " << (s + 1) << ")";
                    throw Error(ErrorCode::ValidationError, msg.str());
                }
            }
    }
}

void check_transform_shape(const TransformSpec& spec, const ReducedChartPoint& p)
{
    validate_point(p);
    if (spec.quiver.vertices != p.quiver.vertices ||
        spec.alpha.counts != p.alpha.counts)
        throw Error(ErrorCode::DimensionMismatch,
                    "transform spec and chart point describe different spaces");
}

Complex psi_at(const TransformSpec& spec, int vertex, int r,
               const std::vector<std::vector<Complex>>& full)
{
    const Complex w = full[vertex][r];
    Complex value(1.0, 0.0);
    for (const Arrow& h : spec.quiver.arrows) {
        if (h.source != vertex)
            continue;
        for (Complex wt : full[h.target]) {
            const Complex arg = w - wt;
            if (lattice_distance(arg, spec.mp) < kPoleThreshold) {
                std::ostringstream msg;
                msg << "theta factor vanishes: w[" << spec.quiver.vertices[vertex] << ","
                    << (r + 1) << "] meets a marked point of color "
                    << spec.quiver.vertices[h.target] << " modulo the lattice";
                throw Error(ErrorCode::ThetaZero, msg.str());
            }
            value *= theta(arg, spec.mp);
        }
    }
    return value;
}

Complex gauge_log_ratio(const TransformSpec& spec, int vertex, int r,
                        const std::vector<std::vector<Complex>>& full)
{
    if (!spec.log_phi)
        return Complex(0.0, 0.0);
    const int last = static_cast<int>(full[vertex].size()) - 1;
    return spec.log_phi(vertex, r, full[vertex]) - spec.log_phi(vertex, last, full[vertex]);
}

// Multiplicative factor Y_{i,r} / Z_{i,r} for a free index r.
Complex transform_factor(const TransformSpec& spec, int vertex, int r,
                         const std::vector<std::vector<Complex>>& full)
{
    const int last = static_cast<int>(full[vertex].size()) - 1;
    const Complex ratio = psi_at(spec, vertex, r, full) / psi_at(spec, vertex, last, full);
    if (!spec.log_phi)
        return ratio;
    return ratio * std::exp(gauge_log_ratio(spec, vertex, r, full));
}

} // namespace

Complex psi_factor(const TransformSpec& spec, int vertex, int r, const ReducedChartPoint& p)
{
    check_transform_shape(spec, p);
    if (vertex < 0 || vertex >= spec.quiver.vertex_count())
        throw Error(ErrorCode::UnknownVertex, "psi_factor: vertex index out of range");
    if (r < 0 || r >= p.alpha.counts[vertex])
        throw Error(ErrorCode::DimensionMismatch, "psi_factor: marked point index out of range");
    return psi_at(spec, vertex, r, full_points(p));
}

ReducedChartPoint zastava_from_coulomb(const TransformSpec& spec, const ReducedChartPoint& p)
{
    check_transform_shape(spec, p);
    const auto full = full_points(p);
    validate_gauge(spec, full);
    ReducedChartPoint out = p;
    for (int vi = 0; vi < spec.quiver.vertex_count(); ++vi)
        for (int r = 0; r + 1 < p.alpha.counts[vi]; ++r)
            out.ratio[vi][r] = p.ratio[vi][r] * transform_factor(spec, vi, r, full);
    return out;
}

ReducedChartPoint coulomb_from_zastava(const TransformSpec& spec, const ReducedChartPoint& p)
{
    check_transform_shape(spec, p);
    const auto full = full_points(p);
    validate_gauge(spec, full);
    ReducedChartPoint out = p;
    for (int vi = 0; vi < spec.quiver.vertex_count(); ++vi)
        for (int r = 0; r + 1 < p.alpha.counts[vi]; ++r)
            out.ratio[vi][r] = p.ratio[vi][r] / transform_factor(spec, vi, r, full);
    return out;
}

BracketMatrix pushforward_bracket(const TransformSpec& spec, const ReducedChartPoint& p)
{
    check_transform_shape(spec, p);
    require_cross_color_separation(p, spec.mp);
    const auto full = full_points(p);
    validate_gauge(spec, full);

    const BracketMatrix base = coulomb_reduced_bracket_matrix(p);

    std::vector<int> offsets(spec.quiver.vertex_count(), 0);
    int total = 0;
    for (int vi = 0; vi < spec.quiver.vertex_count(); ++vi) {
        offsets[vi] = total;
        total += p.alpha.counts[vi] - 1;
    }
    const int n = 2 * total;

    // Jacobian of (w, Z) -> (w, Y): identity on w, diagonal Y/Z block on the
    // ratios, and the theta log-derivative block d Y_{i,r} / d w_{k,t}.
    Eigen::MatrixXcd jac = Eigen::MatrixXcd::Identity(n, n);
    for (int vi = 0; vi < spec.quiver.vertex_count(); ++vi) {
        const int a_i = p.alpha.counts[vi];
        const int last_i = a_i - 1;
        for (int r = 0; r + 1 < a_i; ++r) {
            const int row = total + offsets[vi] + r;
            const Complex factor = transform_factor(spec, vi, r, full);
            const Complex y = p.ratio[vi][r] * factor;
            jac(row, row) = factor;

            // Same-color sums S_r and T over all outgoing arrows.
            Complex sum_r(0.0, 0.0);
            Complex sum_last(0.0, 0.0);
            for (const Arrow& h : spec.quiver.arrows) {
                if (h.source != vi)
                    continue;
                for (Complex wt : full[h.target]) {
                    sum_r += theta_log_deriv(full[vi][r] - wt, spec.mp);
                    sum_last += theta_log_deriv(full[vi][last_i] - wt, spec.mp);
                }
            }
            for (int t = 0; t + 1 < a_i; ++t) {
                Complex d = sum_last;
                if (t == r)
                    d += sum_r;
                if (spec.log_phi_deriv)
                    d += spec.log_phi_deriv(vi, r, t, full[vi]) -
                         spec.log_phi_deriv(vi, r, last_i, full[vi]) -
                         spec.log_phi_deriv(vi, last_i, t, full[vi]) +
                         spec.log_phi_deriv(vi, last_i, last_i, full[vi]);
                jac(row, offsets[vi] + t) = y * d;
            }

            // Head colors of outgoing arrows, chain rule through both derived points.
            for (const Arrow& h : spec.quiver.arrows) {
                if (h.source != vi)
                    continue;
                const int vj = h.target;
                const int last_j = p.alpha.counts[vj] - 1;
                const Complex zr_aj = theta_log_deriv(full[vi][r] - full[vj][last_j], spec.mp);
                const Complex za_aj =
                    theta_log_deriv(full[vi][last_i] - full[vj][last_j], spec.mp);
                for (int t = 0; t + 1 < p.alpha.counts[vj]; ++t) {
                    const Complex d = -theta_log_deriv(full[vi][r] - full[vj][t], spec.mp) +
                                      zr_aj +
                                      theta_log_deriv(full[vi][last_i] - full[vj][t], spec.mp) -
                                      za_aj;
                    jac(row, offsets[vj] + t) = y * d;
                }
            }
        }
    }

    BracketMatrix out;
    out.labels = chart_labels(BracketFamily::FoReduced, spec.quiver, spec.alpha);
    out.m = jac * base.m * jac.transpose();
    return out;
}

Complex zeta_four_term(const FourTermConfig& c, const ModularParam& mp)
{
    return weierstrass_zeta(c.wi_r - c.wj_s, mp) - weierstrass_zeta(c.wi_r - c.wj_a, mp) -
           weierstrass_zeta(c.wi_a - c.wj_s, mp) + weierstrass_zeta(c.wi_a - c.wj_a, mp);
}

Complex rational_four_term(const FourTermConfig& c)
{
    return 1.0 / (c.wi_r - c.wj_s) - 1.0 / (c.wi_r - c.wj_a) - 1.0 / (c.wi_a - c.wj_s) +
           1.0 / (c.wi_a - c.wj_a);
}

namespace
{

Complex pi_cot(Complex x)
{
    const double pi = 3.14159265358979323846;
    const Complex px = pi * x;
    return pi * std::cos(px) / std::sin(px);
}

} // namespace

Complex cot_four_term(const FourTermConfig& c)
{
    return pi_cot(c.wi_r - c.wj_s) - pi_cot(c.wi_r - c.wj_a) - pi_cot(c.wi_a - c.wj_s) +
           pi_cot(c.wi_a - c.wj_a);
}

LimitReport rational_limit_check(const FourTermConfig& base, const std::vector<double>& epsilons,
                                 const ModularParam& mp)
{
    LimitReport report;
    const Complex target = rational_four_term(base);
    for (double eps : epsilons) {
        const FourTermConfig scaled{eps * base.wi_r, eps * base.wi_a, eps * base.wj_s,
                                    eps * base.wj_a};
        const Complex combination = eps * zeta_four_term(scaled, mp);
        report.samples.push_back(
            {eps, combination, target, std::abs(combination - target)});
    }
    for (std::size_t k = 0; k + 1 < report.samples.size(); ++k) {
        const double e0 = report.samples[k].abs_error;
        const double e1 = report.samples[k + 1].abs_error;
        const double s0 = report.samples[k].parameter;
        const double s1 = report.samples[k + 1].parameter;
        report.observed_orders.push_back(std::log(e0 / e1) / std::log(s0 / s1));
    }
    return report;
}

LimitReport trigonometric_limit_check(const FourTermConfig& base,
                                      const std::vector<double>& im_tau_ladder)
{
    LimitReport report;
    const Complex target = cot_four_term(base);
    for (double im_tau : im_tau_ladder) {
        const ModularParam mp = make_modular_param(Complex(0.0, im_tau));
        const Complex combination = zeta_four_term(base, mp);
        report.samples.push_back(
            {im_tau, combination, target, std::abs(combination - target)});
    }
    // Orders measured against the natural small parameter |q| = exp(-2 pi Im tau);
    // proportionality to |q| shows up as order ~ 1.
    const double two_pi = 2.0 * 3.14159265358979323846;
    for (std::size_t k = 0; k + 1 < report.samples.size(); ++k) {
        const double e0 = report.samples[k].abs_error;
        const double e1 = report.samples[k + 1].abs_error;
        const double q0 = std::exp(-two_pi * report.samples[k].parameter);
        const double q1 = std::exp(-two_pi * report.samples[k + 1].parameter);
        report.observed_orders.push_back(std::log(e0 / e1) / std::log(q0 / q1));
    }
    return report;
}

std::vector<Complex> sl2_residue_coordinates(const std::vector<Complex>& poles,
                                             const std::vector<Complex>& pole_data,
                                             const ModularParam& mp, int nodes, double delta)
{
    if (poles.size() != pole_data.size())
        throw Error(ErrorCode::DimensionMismatch,
                    "sl2_residue_coordinates: one residue per pole required");
    if (poles.empty())
        return {};
    if (nodes < 4)
        throw Error(ErrorCode::ValidationError, "contour quadrature needs at least 4 nodes");
    if (!(delta > 0.0))
        throw Error(ErrorCode::ValidationError, "separation delta must be positive");

    const double radius = std::min(delta / 2.0, 0.05);
    for (std::size_t a = 0; a < poles.size(); ++a)
        for (std::size_t b = a + 1; b < poles.size(); ++b) {
            const double dist = lattice_distance(poles[a] - poles[b], mp);
            if (dist < 2.0 * radius) {
                std::ostringstream msg;
                msg << "contour circles of radius " << radius << " around poles " << a << " and "
                    << b << " overlap: separation " << dist << " modulo the lattice";
                throw Error(ErrorCode::ContourTooClose, msg.str());
            }
        }

    // Deterministic reference point: first grid candidate clear of every pole.
    Complex w0(0.0, 0.0);
    bool found = false;
    const double margin = std::max(2.5 * radius, 0.1);
    for (int k = 0; k < 25 && !found; ++k) {
        const double s = 0.07 + 0.192 * (k % 5);
        const double t = 0.07 + 0.192 * (k / 5);
        const Complex candidate = Complex(s, 0.0) + Complex(t, 0.0) * mp.tau;
        bool clear = true;
        for (Complex w : poles)
            if (lattice_distance(candidate - w, mp) < margin) {
                clear = false;
                break;
            }
        if (clear) {
            w0 = candidate;
            found = true;
        }
    }
    if (!found)
        throw Error(ErrorCode::ValidationError,
                    "could not place the reference point away from the poles");

    Complex total(0.0, 0.0);
    for (Complex c : pole_data)
        total += c;
    const auto t_prime = [&](Complex x) {
        Complex value(0.0, 0.0);
        for (std::size_t r = 0; r < poles.size(); ++r)
            value += pole_data[r] * weierstrass_zeta(x - poles[r], mp);
        return value - total * weierstrass_zeta(x - w0, mp);
    };

    const double two_pi = 2.0 * 3.14159265358979323846;
    std::vector<Complex> recovered(poles.size());
    for (std::size_t r = 0; r < poles.size(); ++r) {
        Complex sum(0.0, 0.0);
        for (int k = 0; k < nodes; ++k) {
            const double angle = two_pi * k / nodes;
            const Complex offset = radius * Complex(std::cos(angle), std::sin(angle));
            sum += t_prime(poles[r] + offset) * offset;
        }
        recovered[r] = sum / static_cast<double>(nodes);
    }
    return recovered;
}

} // namespace zastava
