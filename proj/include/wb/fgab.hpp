#pragma once

#include <functional>
#include <optional>

#include "wb/matrix.hpp"

namespace wb {

// Finitely generated abelian group in canonical form:
//   Z^rank  (+)  Z/d_1 (+) ... (+) Z/d_t,   2 <= d_1 | d_2 | ... | d_t.
// Elements are coordinate vectors over the canonical generators, laid out
// [free coordinates | torsion coordinates]; torsion coordinate i is reduced
// into [0, d_i).
struct FgAbGroup {
    size_t rank = 0;
    std::vector<Int> torsion;

    FgAbGroup() = default;
    FgAbGroup(size_t r, std::vector<Int> tors);

    size_t ngens() const { return rank + torsion.size(); }
    bool is_trivial() const { return rank == 0 && torsion.empty(); }
    // Order of generator i (0 meaning infinite).
    Int gen_order(size_t i) const {
        return i < rank ? Int(0) : torsion[i - rank];
    }
    std::optional<Int> order() const;  // nullopt if infinite

    std::vector<Int> reduce(std::vector<Int> x) const;
    bool operator==(const FgAbGroup& o) const {
        return rank == o.rank && torsion == o.torsion;
    }
    std::string describe() const;

    static FgAbGroup zero() { return FgAbGroup(); }
    static FgAbGroup free(size_t r) { return FgAbGroup(r, {}); }
    static FgAbGroup cyclic(const Int& d);
};

// Homomorphism between canonical-form groups, stored as the matrix of images
// of the domain generators (columns) in codomain coordinates.  Construction
// checks well-definedness: f(g) must be killed by the order of g.
struct FgMorphism {
    FgAbGroup dom, cod;
    IntMatrix mat;  // cod.ngens() x dom.ngens()

    FgMorphism() = default;
    FgMorphism(FgAbGroup d, FgAbGroup c, IntMatrix m);

    std::vector<Int> apply(const std::vector<Int>& x) const {
        return cod.reduce(mat.apply(dom.reduce(x)));
    }
    bool is_zero() const;
    bool equals(const FgMorphism& o) const;

    static FgMorphism zero(FgAbGroup d, FgAbGroup c) {
        return FgMorphism(std::move(d), std::move(c),
                          IntMatrix::zero(c.ngens(), d.ngens()));
    }
    static FgMorphism identity(FgAbGroup g) {
        IntMatrix m = IntMatrix::identity(g.ngens());
        return FgMorphism(g, g, std::move(m));
    }
};

FgMorphism compose(const FgMorphism& g, const FgMorphism& f);  // g after f

// Canonical form of an integer subquotient K/R, where K is the column
// lattice of `sub` in Z^s and R (column lattice of `rel`) lies inside K.
// Keeps enough data to move elements in and out of the canonical form.
struct ZSubquotient {
    FgAbGroup group;
    // Representatives of the canonical generators, as columns in Z^s.
    IntMatrix reps;
    // Coordinates of an element of K in canonical form; throws if x not in K.
    std::vector<Int> express(const std::vector<Int>& x) const;
    bool contains(const std::vector<Int>& x) const;

    // internal data
    IntMatrix basis;  // columns: Z-basis of K
    IntMatrix umat;   // SNF row transform of the relation coordinates
    std::vector<Int> orders;  // per umat-row order (0 = free, 1 = dropped)
};

ZSubquotient z_subquotient(size_t ambient, const IntMatrix& sub,
                           const IntMatrix& rel);

// Canonical form of the group on `gens` generators modulo the columns of
// `relations`; express() translates generator words into canonical
// coordinates.
ZSubquotient group_from_presentation(size_t gens, const IntMatrix& relations);

// Canonical forms make isomorphism a plain comparison.
inline bool is_isomorphic(const FgAbGroup& a, const FgAbGroup& b) {
    return a == b;
}

// Kernel, image, cokernel with the structure maps.
struct FgSubgroupResult {
    FgAbGroup group;
    FgMorphism map;  // inclusion (kernel/image) or projection (cokernel)
};

FgSubgroupResult kernel_fg(const FgMorphism& f);
FgSubgroupResult image_fg(const FgMorphism& f);
// Cokernel: map is the projection cod -> coker; `section` picks canonical
// representatives (coker coords -> cod coords).
struct FgCokernelResult {
    FgAbGroup group;
    FgMorphism map;
    IntMatrix section;
    std::vector<Int> express(const std::vector<Int>& x) const {
        return group.reduce(map.mat.apply(x));
    }
};
FgCokernelResult cokernel_fg(const FgMorphism& f);

bool is_isomorphism_fg(const FgMorphism& f);

// One preimage of y under f, or nullopt.
std::optional<std::vector<Int>> solve_preimage_fg(const FgMorphism& f,
                                                  const std::vector<Int>& y);

// Direct sum with injections/projections.
struct FgDirectSum {
    FgAbGroup group;
    std::vector<FgMorphism> inject;   // A_i -> sum
    std::vector<FgMorphism> project;  // sum -> A_i
};
FgDirectSum direct_sum_fg(const std::vector<FgAbGroup>& parts);

// Hom(A, B) in canonical form.  Each canonical generator is itself a
// morphism A -> B; `to_morphism` realizes an element, `coords_of` inverts it.
struct HomFgGroup {
    FgAbGroup group;
    FgAbGroup a, b;
    std::vector<FgMorphism> gens;
    FgMorphism to_morphism(const std::vector<Int>& coords) const;
    std::vector<Int> coords_of(const FgMorphism& f) const;

    // internal: cyclic decomposition before canonicalization
    std::vector<FgMorphism> cyclic_gens;
    std::vector<Int> cyclic_orders;  // 0 = infinite
    ZSubquotient canon;
};
HomFgGroup hom_group(const FgAbGroup& a, const FgAbGroup& b);

// Ext(A, B) in canonical form (closed form from the decompositions).
FgAbGroup ext_group(const FgAbGroup& a, const FgAbGroup& b);

// Hom(u, B): Hom(A2, B) -> Hom(A1, B) for u : A1 -> A2.
FgMorphism hom_induced(const FgMorphism& u, const HomFgGroup& hom_dom,
                       const HomFgGroup& hom_cod);

// Hom(A, v): Hom(A, B1) -> Hom(A, B2) for v : B1 -> B2.
FgMorphism hom_postcompose(const FgMorphism& v, const HomFgGroup& hom_dom,
                           const HomFgGroup& hom_cod);

}  // namespace wb
