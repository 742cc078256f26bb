#include "zastava/flows.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <utility>

#include "zastava/error.hpp"

namespace zastava
{

namespace
{

Eigen::VectorXcd pack_blocks(const std::vector<std::vector<Complex>>& a,
                             const std::vector<std::vector<Complex>>& b)
{
    Eigen::Index n = 0;
    for (const auto& block : a)
        n += static_cast<Eigen::Index>(block.size());
    for (const auto& block : b)
        n += static_cast<Eigen::Index>(block.size());
    Eigen::VectorXcd out(n);
    Eigen::Index k = 0;
    for (const auto& block : a)
        for (const Complex& v : block)
            out[k++] = v;
    for (const auto& block : b)
        for (const Complex& v : block)
            out[k++] = v;
    return out;
}

void unpack_blocks(const Eigen::VectorXcd& state, std::vector<std::vector<Complex>>& a,
                   std::vector<std::vector<Complex>>& b)
{
    Eigen::Index k = 0;
    for (auto& block : a)
        for (Complex& v : block)
            v = state[k++];
    for (auto& block : b)
        for (Complex& v : block)
            v = state[k++];
}

void check_steps(double t_end, int steps)
{
    if (steps < 1)
        throw Error(ErrorCode::ValidationError,
                    "flow_integrate needs at least one step, got " + std::to_string(steps));
    if (!std::isfinite(t_end))
        throw Error(ErrorCode::ValidationError, "flow_integrate needs a finite t_end");
}

void check_coordinate_indices(const Hamiltonian& h, Eigen::Index dim)
{
    for (const int idx : h.coordinates)
        if (idx < 0 || idx >= dim)
            throw Error(ErrorCode::DimensionMismatch,
                        "hamiltonian coordinate index " + std::to_string(idx) +
                            " outside chart of dimension " + std::to_string(dim));
}

void check_moment_vertex(const Hamiltonian& h, int vertex_count)
{
    if (h.vertex < 0 || h.vertex >= vertex_count)
        throw Error(ErrorCode::ValidationError,
                    "hamiltonian moment color " + std::to_string(h.vertex) +
                        " outside quiver with " + std::to_string(vertex_count) + " vertices");
}

// Offsets of each color's w block at the front of the chart ordering.
std::vector<int> w_offsets(const std::vector<int>& sizes)
{
    std::vector<int> off(sizes.size() + 1, 0);
    for (std::size_t i = 0; i < sizes.size(); ++i)
        off[i + 1] = off[i] + sizes[i];
    return off;
}

struct ChartOps {
    std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)> velocity;
    std::function<Complex(const Eigen::VectorXcd&)> hamiltonian;
    std::function<std::vector<Complex>(const Eigen::VectorXcd&)> moments;
};

FlowReport run_rk4(const Eigen::VectorXcd& x0, double t_end, int steps,
                   std::vector<std::string> labels, const ChartOps& ops)
{
    FlowReport report;
    report.labels = std::move(labels);
    report.samples.reserve(static_cast<std::size_t>(steps) + 1);
    report.samples.push_back({0.0, x0});

    const double h = t_end / steps;
    Eigen::VectorXcd x = x0;
    // First evaluation outside the conversion guard: an invalid *input* point
    // should surface its own error code, not TrajectoryLeftChart.
    Eigen::VectorXcd k1 = ops.velocity(x);
    for (int step = 0; step < steps; ++step) {
        const double t = h * step;
        try {
            if (step > 0)
                k1 = ops.velocity(x);
            const Eigen::VectorXcd k2 = ops.velocity(x + (h / 2.0) * k1);
            const Eigen::VectorXcd k3 = ops.velocity(x + (h / 2.0) * k2);
            const Eigen::VectorXcd k4 = ops.velocity(x + h * k3);
            x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "trajectory left the chart during step " << step + 1 << " (t = " << t
                << "): " << e.what();
            throw Error(ErrorCode::TrajectoryLeftChart, msg.str());
        }
        report.samples.push_back({h * (step + 1), x});
    }

    const Complex h0 = ops.hamiltonian(x0);
    const std::vector<Complex> m0 = ops.moments(x0);
    report.moment_drift.assign(m0.size(), 0.0);
    for (const TrajectorySample& sample : report.samples) {
        report.hamiltonian_drift =
            std::max(report.hamiltonian_drift, std::abs(ops.hamiltonian(sample.state) - h0));
        const std::vector<Complex> m = ops.moments(sample.state);
        for (std::size_t i = 0; i < m0.size(); ++i)
            report.moment_drift[i] = std::max(report.moment_drift[i], std::abs(m[i] - m0[i]));
    }
    return report;
}

Eigen::VectorXcd indicator_gradient(const std::vector<int>& indices, Eigen::Index dim)
{
    Eigen::VectorXcd grad = Eigen::VectorXcd::Zero(dim);
    for (const int idx : indices)
        grad[idx] += Complex(1.0, 0.0);
    return grad;
}

} // namespace

Hamiltonian Hamiltonian::coordinate(int flat_index)
{
    Hamiltonian h;
    h.kind = Kind::CoordinateSum;
    h.coordinates = {flat_index};
    return h;
}

Hamiltonian Hamiltonian::coordinate_sum(std::vector<int> flat_indices)
{
    Hamiltonian h;
    h.kind = Kind::CoordinateSum;
    h.coordinates = std::move(flat_indices);
    return h;
}

Hamiltonian Hamiltonian::moment(int vertex)
{
    Hamiltonian h;
    h.kind = Kind::Moment;
    h.vertex = vertex;
    return h;
}

Eigen::VectorXcd hamiltonian_vector_field(const BracketMatrix& bm, const Eigen::VectorXcd& grad_h)
{
    if (bm.m.rows() != grad_h.size())
        throw Error(ErrorCode::DimensionMismatch,
                    "gradient of length " + std::to_string(grad_h.size()) +
                        " does not match bracket matrix of dimension " +
                        std::to_string(bm.m.rows()));
    return bm.m * grad_h;
}

FlowReport flow_integrate(BracketFamily family, const UnreducedChartPoint& p, const Hamiltonian& h,
                          double t_end, int steps)
{
    if (family != BracketFamily::Rational && family != BracketFamily::Coulomb)
        throw Error(ErrorCode::ValidationError,
                    std::string("bracket family ") + bracket_family_name(family) +
                        " acts on reduced chart points");
    check_steps(t_end, steps);

    const auto build = [family](const UnreducedChartPoint& q) {
        return family == BracketFamily::Rational ? rational_bracket_matrix(q)
                                                 : coulomb_bracket_matrix(q);
    };
    const BracketMatrix bm0 = build(p);
    const Eigen::Index dim = bm0.m.rows();

    const std::vector<int>& sizes = p.alpha.counts;
    const std::vector<int> off = w_offsets(sizes);
    Eigen::VectorXcd grad;
    if (h.kind == Hamiltonian::Kind::CoordinateSum) {
        check_coordinate_indices(h, dim);
        grad = indicator_gradient(h.coordinates, dim);
    } else {
        check_moment_vertex(h, p.quiver.vertex_count());
        std::vector<int> slots(static_cast<std::size_t>(sizes[h.vertex]));
        std::iota(slots.begin(), slots.end(), off[h.vertex]);
        grad = indicator_gradient(slots, dim);
    }

    UnreducedChartPoint scratch = p;
    ChartOps ops;
    ops.velocity = [&scratch, &build, &grad](const Eigen::VectorXcd& state) {
        unpack_blocks(state, scratch.w, scratch.fiber);
        return hamiltonian_vector_field(build(scratch), grad);
    };
    ops.hamiltonian = [&grad](const Eigen::VectorXcd& state) { return grad.dot(state); };
    ops.moments = [&sizes, &off](const Eigen::VectorXcd& state) {
        std::vector<Complex> m(sizes.size(), Complex(0.0, 0.0));
        for (std::size_t vi = 0; vi < sizes.size(); ++vi)
            for (int r = 0; r < sizes[vi]; ++r)
                m[vi] += state[off[vi] + r];
        return m;
    };

    return run_rk4(pack_blocks(p.w, p.fiber), t_end, steps, bm0.labels, ops);
}

FlowReport flow_integrate(BracketFamily family, const ReducedChartPoint& p, const Hamiltonian& h,
                          double t_end, int steps, const ModularParam& mp)
{
    if (family != BracketFamily::CoulombReduced && family != BracketFamily::FoReduced)
        throw Error(ErrorCode::ValidationError,
                    std::string("bracket family ") + bracket_family_name(family) +
                        " acts on unreduced chart points");
    check_steps(t_end, steps);

    const auto build = [family, &mp](const ReducedChartPoint& q) {
        return family == BracketFamily::CoulombReduced ? coulomb_reduced_bracket_matrix(q)
                                                       : fo_reduced_bracket_matrix(q, mp);
    };
    const BracketMatrix bm0 = build(p);
    const Eigen::Index dim = bm0.m.rows();

    Eigen::VectorXcd grad;
    if (h.kind == Hamiltonian::Kind::CoordinateSum) {
        check_coordinate_indices(h, dim);
        grad = indicator_gradient(h.coordinates, dim);
    } else {
        check_moment_vertex(h, p.quiver.vertex_count());
        // The per-color moment on a reduced chart is the stored constraint:
        // constant, so its Hamiltonian vector field vanishes.
        grad = Eigen::VectorXcd::Zero(dim);
    }

    ReducedChartPoint scratch = p;
    ChartOps ops;
    ops.velocity = [&scratch, &build, &grad](const Eigen::VectorXcd& state) {
        unpack_blocks(state, scratch.w_free, scratch.ratio);
        return hamiltonian_vector_field(build(scratch), grad);
    };
    if (h.kind == Hamiltonian::Kind::CoordinateSum)
        ops.hamiltonian = [&grad](const Eigen::VectorXcd& state) { return grad.dot(state); };
    else
        ops.hamiltonian = [&p, &h](const Eigen::VectorXcd&) { return p.sum_constraint[h.vertex]; };
    ops.moments = [&p](const Eigen::VectorXcd&) { return p.sum_constraint; };

    return run_rk4(pack_blocks(p.w_free, p.ratio), t_end, steps, bm0.labels, ops);
}

} // namespace zastava
