#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "zastava/charts.hpp"

namespace zastava
{

// Hamiltonians the flow integrator understands: a sum of chart coordinates
// with unit coefficients, or the moment of a single color. On reduced charts
// the moment is the stored sum constraint, so its gradient vanishes.
struct Hamiltonian {
    enum class Kind { CoordinateSum, Moment };

    Kind kind = Kind::CoordinateSum;
    std::vector<int> coordinates; // flat chart indices (CoordinateSum)
    int vertex = -1;              // color index (Moment)

    static Hamiltonian coordinate(int flat_index);
    static Hamiltonian coordinate_sum(std::vector<int> flat_indices);
    static Hamiltonian moment(int vertex);
};

// v = bm * grad_h, i.e. v_k = {x_k, H}. Throws DimensionMismatch when the
// gradient length differs from the matrix dimension.
Eigen::VectorXcd hamiltonian_vector_field(const BracketMatrix& bm,
                                          const Eigen::VectorXcd& grad_h);

struct TrajectorySample {
    double t = 0.0;
    Eigen::VectorXcd state;
};

// Trajectory plus conservation diagnostics: the largest deviation of H and of
// each per-color moment from their initial values across all samples.
struct FlowReport {
    std::vector<std::string> labels;
    std::vector<TrajectorySample> samples; // steps + 1 entries, t = 0 .. t_end
    double hamiltonian_drift = 0.0;
    std::vector<double> moment_drift;      // one entry per color
};

// Classical RK4 integration of x' = {x, H} in the given chart. The initial
// point is validated by the bracket builder itself; any failure at a later
// stage (separation below delta, a zeta argument on the lattice, a fiber
// passing through zero) aborts with TrajectoryLeftChart carrying the step and
// time at which the trajectory degenerated.
FlowReport flow_integrate(BracketFamily family, const UnreducedChartPoint& p,
                          const Hamiltonian& h, double t_end, int steps);
FlowReport flow_integrate(BracketFamily family, const ReducedChartPoint& p, const Hamiltonian& h,
                          double t_end, int steps, const ModularParam& mp);

} // namespace zastava
