#include <doctest.h>

#include <cmath>
#include <complex>

#include "zastava/error.hpp"
#include "zastava/flows.hpp"

namespace
{

using zastava::BracketFamily;
using zastava::Complex;
using zastava::Hamiltonian;

zastava::UnreducedChartPoint coulomb_a2_point()
{
    zastava::UnreducedChartPoint p;
    p.quiver = zastava::named_quiver("A2");
    p.alpha = zastava::Degree{{2, 1}};
    p.w = {{Complex(0.3, 0.0), Complex(-0.2, 0.0)}, {Complex(0.1, 0.0)}};
    p.fiber = {{Complex(1.2, 0.0), Complex(0.7, -0.4)}, {Complex(2.0, 1.0)}};
    return p;
}

} // namespace

TEST_CASE("flows: hamiltonian vector field is bracket times gradient")
{
    zastava::UnreducedChartPoint p;
    p.quiver = zastava::named_quiver("A1");
    p.alpha = zastava::Degree{{1}};
    p.w = {{Complex(0.2, 0.0)}};
    p.fiber = {{Complex(2.0, 0.0)}};
    const zastava::BracketMatrix bm = zastava::coulomb_bracket_matrix(p);

    // H = w[1,1]: the only motion is zdot = {z, w} = +z.
    Eigen::VectorXcd grad = Eigen::VectorXcd::Zero(2);
    grad[0] = Complex(1.0, 0.0);
    const Eigen::VectorXcd field = zastava::hamiltonian_vector_field(bm, grad);
    CHECK(field[0] == Complex(0.0, 0.0));
    CHECK(field[1] == Complex(2.0, 0.0));

    // Constant H has a zero field.
    const Eigen::VectorXcd none =
        zastava::hamiltonian_vector_field(bm, Eigen::VectorXcd::Zero(2));
    CHECK(none.norm() == 0.0);

    CHECK_THROWS_AS(zastava::hamiltonian_vector_field(bm, Eigen::VectorXcd::Zero(3)),
                    zastava::Error);
}

TEST_CASE("flows: moment flow on the Coulomb chart scales z by e^t")
{
    const zastava::UnreducedChartPoint p = coulomb_a2_point();
    const zastava::FlowReport report =
        zastava::flow_integrate(BracketFamily::Coulomb, p, Hamiltonian::moment(0), 1.0, 1000);

    REQUIRE(report.samples.size() == 1001);
    const Eigen::VectorXcd& x0 = report.samples.front().state;
    const Eigen::VectorXcd& x1 = report.samples.back().state;
    // Layout: w[1,1], w[1,2], w[2,1], z[1,1], z[1,2], z[2,1].
    for (int k = 0; k < 3; ++k)
        CHECK(x1[k] == x0[k]); // w velocities vanish identically
    const double e = std::exp(1.0);
    CHECK(std::abs(x1[3] / x0[3] - e) < 1e-12);
    CHECK(std::abs(x1[4] / x0[4] - e) < 1e-12);
    CHECK(x1[5] == x0[5]); // other color's fiber is not moved

    CHECK(report.hamiltonian_drift == 0.0);
    REQUIRE(report.moment_drift.size() == 2);
    CHECK(report.moment_drift[0] == 0.0);
    CHECK(report.moment_drift[1] == 0.0);
}

TEST_CASE("flows: a Hamiltonian is conserved along its own flow")
{
    zastava::UnreducedChartPoint p = coulomb_a2_point();
    // Rational chart, H = w[1,1] + w[1,2]: all w's freeze, y[1,r] decays e^{-t}.
    const zastava::FlowReport report = zastava::flow_integrate(
        BracketFamily::Rational, p, Hamiltonian::coordinate_sum({0, 1}), 1.0, 500);

    const Eigen::VectorXcd& x0 = report.samples.front().state;
    const Eigen::VectorXcd& x1 = report.samples.back().state;
    CHECK(report.hamiltonian_drift == 0.0);
    for (int k = 0; k < 3; ++k)
        CHECK(x1[k] == x0[k]);
    const double inv_e = std::exp(-1.0);
    CHECK(std::abs(x1[3] / x0[3] - inv_e) < 1e-12);
    CHECK(std::abs(x1[4] / x0[4] - inv_e) < 1e-12);
    CHECK(x1[5] == x0[5]); // cross-color y has zero bracket with H

    // Moments of untouched colors cannot drift; color 1's moment is H itself.
    CHECK(report.moment_drift[0] == 0.0);
    CHECK(report.moment_drift[1] == 0.0);
}

TEST_CASE("flows: Y-coordinate flow on the elliptic chart preserves the moments")
{
    const zastava::ModularParam mp = zastava::make_modular_param(Complex(0.0, 1.0));
    zastava::ReducedChartPoint p;
    p.quiver = zastava::named_quiver("A2");
    p.alpha = zastava::Degree{{2, 2}};
    p.w_free = {{Complex(0.31, 0.0)}, {Complex(0.05, 0.0)}};
    p.sum_constraint = {Complex(0.14, 0.0), Complex(0.47, 0.0)};
    p.ratio = {{Complex(1.0, 0.3)}, {Complex(0.8, -0.1)}};

    // Layout: w[1,1], w[2,1], Y[1,1], Y[2,1]; H = Y[1,1].
    const zastava::FlowReport report =
        zastava::flow_integrate(BracketFamily::FoReduced, p, Hamiltonian::coordinate(2), 0.4, 400,
                                mp);

    CHECK(report.hamiltonian_drift == 0.0);
    CHECK(report.moment_drift[0] == 0.0);
    CHECK(report.moment_drift[1] == 0.0);

    const Eigen::VectorXcd& x0 = report.samples.front().state;
    const Eigen::VectorXcd& x1 = report.samples.back().state;
    // H itself never moves, so w[1,1] follows the exact line w - t*Y[1,1].
    CHECK(x1[2] == x0[2]);
    CHECK(std::abs(x1[0] - (x0[0] - 0.4 * x0[2])) < 1e-12);
    CHECK(x1[1] == x0[1]);                  // other color's w is untouched
    CHECK(std::abs(x1[3] - x0[3]) > 1e-3);  // adjacent Y genuinely evolves

    // The reduced moment is the constraint: flowing it moves nothing.
    const zastava::FlowReport frozen = zastava::flow_integrate(
        BracketFamily::CoulombReduced, p, Hamiltonian::moment(0), 1.0, 10, mp);
    CHECK(frozen.samples.back().state == frozen.samples.front().state);
}

TEST_CASE("flows: leaving the generic region aborts with TrajectoryLeftChart")
{
    zastava::UnreducedChartPoint p;
    p.quiver = zastava::named_quiver("A2");
    p.alpha = zastava::Degree{{1, 1}};
    p.w = {{Complex(0.2, 0.0)}, {Complex(0.1, 0.0)}};
    p.fiber = {{Complex(-1.0, 0.0)}, {Complex(1.0, 0.0)}};
    p.delta = 0.05;

    // H = y[1,1] drives w[1,1] at speed -1 towards w[2,1].
    try {
        zastava::flow_integrate(BracketFamily::Rational, p, Hamiltonian::coordinate(2), 0.2, 100);
        FAIL("expected TrajectoryLeftChart");
    } catch (const zastava::Error& e) {
        CHECK(e.code() == zastava::ErrorCode::TrajectoryLeftChart);
    }

    // An initial point that is already degenerate keeps its own error code.
    zastava::UnreducedChartPoint bad = p;
    bad.w[0][0] = Complex(0.1004, 0.0);
    try {
        zastava::flow_integrate(BracketFamily::Rational, bad, Hamiltonian::coordinate(2), 0.2,
                                100);
        FAIL("expected CoincidentPoints");
    } catch (const zastava::Error& e) {
        CHECK(e.code() == zastava::ErrorCode::CoincidentPoints);
    }
}

TEST_CASE("flows: selector and argument validation")
{
    const zastava::UnreducedChartPoint p = coulomb_a2_point();
    CHECK_THROWS_AS(
        zastava::flow_integrate(BracketFamily::Coulomb, p, Hamiltonian::coordinate(2), 1.0, 0),
        zastava::Error);
    CHECK_THROWS_AS(
        zastava::flow_integrate(BracketFamily::Coulomb, p, Hamiltonian::coordinate(17), 1.0, 10),
        zastava::Error);
    CHECK_THROWS_AS(
        zastava::flow_integrate(BracketFamily::Coulomb, p, Hamiltonian::moment(5), 1.0, 10),
        zastava::Error);
    CHECK_THROWS_AS(
        zastava::flow_integrate(BracketFamily::FoReduced, p, Hamiltonian::coordinate(0), 1.0, 10),
        zastava::Error);
}
