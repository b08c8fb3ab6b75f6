#pragma once

#include <optional>

#include "wb/fgab.hpp"

namespace wb {

// Bounded cochain complex of finitely generated abelian groups.  Degrees run
// upward: groups[k] sits in degree lo + k, and deltas[k] : C^{lo+k} ->
// C^{lo+k+1}.  Degrees outside the stored range are the zero group.
struct CochainComplex {
    int lo = 0;
    std::vector<FgAbGroup> groups;
    std::vector<FgMorphism> deltas;  // size == groups.size() - 1 (or 0)

    bool empty() const { return groups.empty(); }
    int hi() const { return lo + static_cast<int>(groups.size()) - 1; }
    bool in_range(int n) const {
        return !groups.empty() && n >= lo && n <= hi();
    }
    FgAbGroup group(int n) const;
    // The differential C^n -> C^{n+1}; a zero morphism outside the range.
    FgMorphism differential(int n) const;
};

// Builds a complex after checking the shape: each deltas[k] must go from
// groups[k] to groups[k+1].  Throws Error on mismatch; does NOT check that
// consecutive differentials compose to zero (see validate()).
CochainComplex make_complex(int lo, std::vector<FgAbGroup> groups,
                            std::vector<FgMorphism> deltas);

// Same complex with every degree shifted up by k.
CochainComplex shift(const CochainComplex& c, int k);

struct ComplexReport {
    bool ok = true;
    int degree = 0;  // first offending degree when !ok
    std::string message;
};

// Checks d(n+1) . d(n) = 0 at every degree.
ComplexReport validate(const CochainComplex& c);

// Alternating sum of ranks (torsion ignored), an invariant of the complex.
Int euler_characteristic(const CochainComplex& c);

// Cohomology at one degree with all the structure maps spelled out:
//
//       d'            i                husk           p
//  C^{n-1} ->> B  --------> Z  >--j--> C^n       Z -->> H
//
// plus the quotient q : C^{n+1} ->> C^{n+1}/B^{n+1} used downstream.
struct CohomologyData {
    int n = 0;
    FgAbGroup h;  // Z / B
    FgAbGroup z;  // kernel of d(n)
    FgAbGroup b;  // image of d(n-1)
    FgMorphism i;            // b -> z
    FgMorphism j;            // z -> C^n (inclusion)
    FgMorphism delta_prime;  // C^{n-1} ->> b
    FgMorphism p;            // z ->> h
    FgAbGroup coker_next;    // C^{n+1} / B^{n+1}
    FgMorphism q;            // C^{n+1} ->> coker_next
    IntMatrix q_section;     // coker_next coords -> C^{n+1} coords
    // One representative cocycle (column, in C^n coordinates) per canonical
    // generator of h.
    IntMatrix reps;

    // Class of a cocycle x in C^n coordinates; throws Error if d(n) x != 0.
    std::vector<Int> class_of(const std::vector<Int>& x) const;

  private:
    friend CohomologyData cohomology(const CochainComplex&, int);
    FgMorphism delta_;  // d(n), kept to check cocycles in class_of
};

CohomologyData cohomology(const CochainComplex& c, int n);

// Degreewise map of complexes commuting with the differentials.
struct CochainMap {
    CochainComplex src, dst;
    int lo = 0;
    std::vector<FgMorphism> comps;  // comps[k] : src C^{lo+k} -> dst C^{lo+k}

    FgMorphism component(int n) const;
};

// Builds a map after checking each component's domain/codomain and every
// commuting square d . f = f . d.  Components may be given for any degree
// range; missing degrees get zero maps, which must also commute (checked).
CochainMap make_cochain_map(CochainComplex src, CochainComplex dst, int lo,
                            std::vector<FgMorphism> comps);

CochainMap identity_cochain_map(const CochainComplex& c);
// g after f.
CochainMap compose(const CochainMap& g, const CochainMap& f);

// Map H^n(src) -> H^n(dst) on cohomology classes.
FgMorphism induced_on_cohomology(const CochainMap& f, int n);
FgMorphism induced_on_cohomology(const CochainMap& f,
                                 const CohomologyData& src_h,
                                 const CohomologyData& dst_h);

// Direct system of complexes indexed by the naturals: a finite prefix of
// complexes with bonding maps toward higher indices, optionally followed by
// one complex repeated forever with a fixed self-map.
struct TowerOfComplexes {
    std::vector<CochainComplex> prefix;
    // prefix_maps[k] : prefix[k] -> prefix[k+1]; if a tail is present the
    // last entry maps prefix.back() into the tail complex.
    std::vector<CochainMap> prefix_maps;
    std::optional<CochainComplex> tail;
    std::optional<CochainMap> tail_map;  // tail -> tail

    const CochainComplex& complex_at(size_t k) const;
    // Bonding map level k -> level k+1.
    CochainMap bond(size_t k) const;
};

// Shape/seam checks; throws Error on inconsistency.
void validate_tower(const TowerOfComplexes& t);

struct NotFinitelyGeneratedColimit : Error {
    int degree;
    explicit NotFinitelyGeneratedColimit(int d)
        : Error("colimit is not finitely generated: tail self-map is not an "
                "isomorphism at degree " +
                std::to_string(d)),
          degree(d) {}
};

// Degreewise colimit.  Requires the tail self-map to be a degreewise
// isomorphism (then the colimit is the tail complex) or no tail at all
// (then it is the last prefix complex); otherwise throws
// NotFinitelyGeneratedColimit naming the failing degree.
CochainComplex colimit(const TowerOfComplexes& t);

}  // namespace wb
