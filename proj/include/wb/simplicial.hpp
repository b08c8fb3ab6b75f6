#pragma once

#include "wb/complexes.hpp"

namespace wb {

struct InvalidSubcomplex : Error {
    explicit InvalidSubcomplex(const std::string& what) : Error(what) {}
};

struct NotSimplicial : Error {
    explicit NotSimplicial(const std::string& what) : Error(what) {}
};

// Finite abstract simplicial complex: facets are sorted distinct vertex
// tuples; the closure under subsets is generated on construction.
struct SimplicialComplex {
    size_t nvertices = 0;
    std::vector<std::vector<int>> facets;
    // simplices[d]: the d-simplices, each sorted, the list lexicographic.
    std::vector<std::vector<std::vector<int>>> simplices;

    int dim() const { return static_cast<int>(simplices.size()) - 1; }
    size_t count(int d) const {
        return d >= 0 && d <= dim() ? simplices[static_cast<size_t>(d)].size()
                                    : 0;
    }
    // Index of a sorted tuple among the d-simplices, or -1.
    int index_of(const std::vector<int>& s) const;
    bool has_simplex(const std::vector<int>& s) const {
        return index_of(s) >= 0;
    }
    Int euler() const;
};

// Validates and closes the facet list; throws Error on out-of-range or
// repeated vertices.
SimplicialComplex make_simplicial(size_t nvertices,
                                  std::vector<std::vector<int>> facets);

bool is_subcomplex(const SimplicialComplex& k, const SimplicialComplex& l);

// Simplicial cochains: C^n free on the n-simplices in lexicographic order,
// coboundary the signed incidence matrix with signs (-1)^position.
CochainComplex cochain_of(const SimplicialComplex& k);
// Relative cochains of the pair (k, l): the kernel of the restriction,
// free on the simplices of k not in l.  Throws InvalidSubcomplex.
CochainComplex cochain_of_pair(const SimplicialComplex& k,
                               const SimplicialComplex& l);

// Vertex assignment src -> dst carrying every simplex to a simplex.
struct SimplicialMap {
    SimplicialComplex src, dst;
    std::vector<int> vertex_map;  // size src.nvertices
};

// Checks simpliciality (throws NotSimplicial) and builds the contravariant
// induced map C*(dst) -> C*(src); degenerate images contribute 0, others
// the sign of the sorting permutation.
CochainMap cochain_map_of(const SimplicialMap& f);

// Standard small models.
SimplicialComplex simplicial_point();
SimplicialComplex simplicial_circle(int nvertices = 3);  // cycle graph
SimplicialComplex simplicial_disk();          // solid triangle
SimplicialComplex simplicial_projective_plane();  // 6-vertex model

}  // namespace wb
