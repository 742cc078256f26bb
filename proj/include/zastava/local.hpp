#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "zastava/elliptic.hpp"
#include "zastava/quiver.hpp"

namespace zastava
{

// A colored point configuration with a clustering threshold. Points of the same
// or different colors may coincide; the multiplicity pattern is obtained by
// merging points closer than delta under transitive closure.
struct Configuration {
    Quiver quiver;
    Degree alpha;
    std::vector<std::vector<Complex>> points; // [vertex][r]
    double delta = 1e-3;
};

struct PointCluster {
    std::vector<std::pair<int, int>> members; // (vertex index, point index), sorted
    Complex centroid;
};

// Deterministic transitive-closure clustering: clusters are ordered by their
// smallest member in flattened (vertex, index) order.
std::vector<PointCluster> cluster_configuration(const Configuration& config);

// Rank of the beta-summand of the Mirkovic factorizable bundle: prod_i C(a_i, b_i).
// Throws DegreeOverflow when beta exceeds alpha componentwise (or the product
// overflows), DegreeMismatch on length mismatch or negative entries.
std::uint64_t mirkovic_summand_rank(const Degree& alpha, const Degree& beta);

// Sum of summand ranks over all beta <= alpha; equals 2^{|alpha|}.
std::uint64_t mirkovic_total_rank(const Degree& alpha);

// Total degree of the twist divisor of the Coulomb factorizable bundle for the
// decomposition (beta, gamma): sum over arrows of b_{source} * c_{target}.
long coulomb_twist_degree(const Quiver& quiver, const Degree& beta, const Degree& gamma);

// Twist degree of the Mirkovic bundle for the decomposition (beta, gamma):
// sum_i b_i (b_i - 1) - sum_arrows b_{source} b_{target} + sum_i b_i c_i.
long mirkovic_twist_degree(const Quiver& quiver, const Degree& beta, const Degree& gamma);

// Subset-indexed coordinate vector of the Segre embedding. Entries are indexed
// by bitmasks over the flattened point order; the empty subset is entry 0.
struct SegreVector {
    int count = 0;                // number of points
    std::vector<Complex> entries; // size 1 << count
};

// entry(mask) = product of values over the subset, highest index peeled last so
// every entry is the left-to-right product in ascending index order.
SegreVector segre_embed(const std::vector<Complex>& values);

// Maximum violation of the Segre relations: multiplicativity
// |entry(S) - prod_{k in S} entry({k})| and the 2x2 exchange relations
// |s_{S+a} s_{S+b} - s_S s_{S+a+b}|. Zero on embedded vectors.
double segre_residual(const SegreVector& v);

// Chart-level diagonal model for adjacent colors: solves the local equation
// y_i y_j = y_ij (w1 - w2) and certifies that the rational bracket {y_i, y_j}
// extends through the diagonal as the Cartan-pairing multiple of y_ij. The
// regularity quotient equals 1 identically.
struct A2LocalModel {
    Complex y_ij;
    Complex bracket_regularity;
};

A2LocalModel a2_local_model(Complex w1, Complex w2, Complex y_i, Complex y_j,
                            double delta = 1e-3);

} // namespace zastava
