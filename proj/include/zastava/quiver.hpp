#pragma once

#include <string>
#include <vector>

#include "zastava/error.hpp"

namespace zastava
{

// Oriented edge between vertex indices: source -> target.
struct Arrow {
    int source;
    int target;
};

// Simply-laced quiver. Strict mode requires the underlying graph to be a
// connected ADE Dynkin diagram; permissive mode accepts any finite loop-free
// graph with at most one arrow per vertex pair.
struct Quiver {
    std::vector<std::string> vertices;
    std::vector<Arrow> arrows;
    bool permissive = false;

    int index_of(const std::string& id) const; // throws UnknownVertex
    bool adjacent(int vi, int vj) const;
    int vertex_count() const { return static_cast<int>(vertices.size()); }
};

// Validates and normalizes; throws ValidationError on structural violations.
Quiver make_quiver(std::vector<std::string> vertices, std::vector<std::pair<std::string, std::string>> arrows,
                   bool permissive = false);

// Catalog: A1..A8, D4..D8, E6, E7, E8 with Bourbaki labels "1".."n" and every
// edge oriented from the higher label to the lower one.
Quiver named_quiver(const std::string& name);

// Symmetric Cartan pairing of coroots for a simply-laced diagram:
// 2 on the diagonal, -1 for adjacent vertices, 0 otherwise.
int cartan_pairing(const Quiver& q, int vi, int vj);
int cartan_pairing(const Quiver& q, const std::string& i, const std::string& j);

// Dimension-vector style degree, aligned with Quiver::vertices.
struct Degree {
    std::vector<int> counts;

    int total() const;
    bool admissible() const; // every entry >= 1
};

// Throws DegreeMismatch unless deg is aligned with q and entrywise >= 0.
void validate_degree(const Quiver& q, const Degree& deg);

// True iff sub <= deg entrywise (both must have equal length).
bool subdegree_leq(const Degree& sub, const Degree& deg);

// All beta with 0 <= beta <= alpha entrywise, in ascending lexicographic order
// (leftmost entry most significant): prod_i (a_i + 1) results, from the zero
// degree up to alpha itself.
std::vector<Degree> enumerate_subdegrees(const Degree& alpha);

} // namespace zastava
