#pragma once

#include <functional>
#include <optional>

#include "wb/fgab.hpp"

namespace wb {

// Groups of the shape  Q^a (+) (Q/Z)^b (+) Z^c (+) Z/d_1 (+) ... (+) Z/d_t.
// Elements live in the ambient space Q^{a+b+c+t}; the Q/Z coordinates are
// taken mod 1 and the Z/d coordinates mod d.  Coordinates are laid out
// [Q | Q/Z | Z | torsion].  Z and torsion coordinates must be integers.
//
// Canonicalized results always carry their torsion factors as a divisibility
// chain; intermediate groups (e.g. direct sums) may hold them in any order,
// and isomorphism tests compare canonicalized signatures.
enum class CoordKind { Q, QZ, Z, Tor };

struct QZGroup {
    size_t nq = 0, nqz = 0, nz = 0;
    std::vector<Int> torsion;

    QZGroup() = default;
    QZGroup(size_t a, size_t b, size_t c, std::vector<Int> tors);

    size_t dim() const { return nq + nqz + nz + torsion.size(); }
    CoordKind kind(size_t i) const;
    bool q_type(size_t i) const {
        CoordKind k = kind(i);
        return k == CoordKind::Q || k == CoordKind::QZ;
    }
    // Order of the torsion coordinate i (kind must be Tor).
    Int tor_order(size_t i) const { return torsion.at(i - nq - nqz - nz); }

    bool is_trivial() const { return dim() == 0; }
    bool valid_element(const std::vector<Rat>& x) const;
    std::vector<Rat> reduce(std::vector<Rat> x) const;
    bool is_zero_element(const std::vector<Rat>& x) const;

    // Generators of the identification lattice (Q/Z units, d * torsion unit).
    RatMatrix lattice_cols() const;

    bool operator==(const QZGroup& o) const {
        return nq == o.nq && nqz == o.nqz && nz == o.nz && torsion == o.torsion;
    }
    // Signature with torsion rewritten as a divisibility chain.
    QZGroup canonical() const;
    bool isomorphic_to(const QZGroup& o) const {
        return canonical() == o.canonical();
    }

    // Conversion to/from finitely generated groups (a = b = 0 required).
    FgAbGroup to_fg() const;
    static QZGroup from_fg(const FgAbGroup& g);
    static QZGroup divisible(size_t a, size_t b) { return QZGroup(a, b, 0, {}); }

    std::string describe() const;
};

// Morphism represented by a rational matrix on ambient coordinates.
// Construction enforces the block-legality rules of the category: no nonzero
// maps from divisible to reduced summands or from torsion to torsion-free
// ones, integrality where the target is Z-like, and compatibility with the
// identification lattices.
struct QZMorphism {
    QZGroup dom, cod;
    RatMatrix mat;

    QZMorphism() = default;
    QZMorphism(QZGroup d, QZGroup c, RatMatrix m);

    std::vector<Rat> apply(const std::vector<Rat>& x) const {
        return cod.reduce(mat.apply(x));
    }
    std::vector<Rat> apply_raw(const std::vector<Rat>& x) const {
        return mat.apply(x);
    }
    bool is_zero() const;
    bool equals(const QZMorphism& o) const;

    static QZMorphism zero(QZGroup d, QZGroup c) {
        return QZMorphism(std::move(d), std::move(c),
                          RatMatrix::zero(c.dim(), d.dim()));
    }
    static QZMorphism identity(QZGroup g) {
        RatMatrix m = RatMatrix::identity(g.dim());
        return QZMorphism(g, g, std::move(m));
    }
};

QZMorphism compose(const QZMorphism& g, const QZMorphism& f);
QZMorphism fg_to_qz_morphism(const FgMorphism& f);

// Solve aq * x + az * u = y with x rational and u integral.  Pivots are
// chosen independently of y, so the solution depends linearly on y whenever
// the system is solvable; free variables are set to zero.
bool solve_mixed(const RatMatrix& aq, const RatMatrix& az,
                 const std::vector<Rat>& y, std::vector<Rat>& x,
                 std::vector<Int>& u);

// A subgroup of the ambient group of `parent`, written as the internal
// direct sum of a rational subspace (columns of d) and a free lattice
// (columns of f); columns are independent and the subspace has no Z-type
// ambient coordinates.
struct QZSubgroup {
    QZGroup parent;
    RatMatrix d, f;

    bool member(const std::vector<Rat>& x) const;
    // Unique coordinates (rational on d, integral on f); throws if outside.
    void coords(const std::vector<Rat>& x, std::vector<Rat>& cd,
                std::vector<Int>& cf) const;
};

QZSubgroup normalize_subgroup(const QZGroup& parent, const RatMatrix& dgens,
                              const RatMatrix& fgens);
QZSubgroup full_subgroup(const QZGroup& g);
QZSubgroup lattice_subgroup(const QZGroup& g);
QZSubgroup add_subgroups(const QZSubgroup& s1, const QZSubgroup& s2);
bool subgroup_contains(const QZSubgroup& outer, const QZSubgroup& inner);

// {x : f(x) = 0 in cod}; always contains the identification lattice of dom.
QZSubgroup kernel_subgroup(const QZMorphism& f);
// f(dom) as a subgroup of the ambient of cod (lattice of cod not included).
QZSubgroup image_subgroup(const QZMorphism& f);

// Canonical form of the subquotient K/R together with coordinates:
// `lin` is a fixed linear lift of the projection (no modular reduction),
// `project` gives canonical coordinates of the class of x in K, and
// `section` exhibits representatives of the canonical generators/summands.
struct CanonQZ {
    QZGroup group;
    QZGroup parent;
    RatMatrix section;  // parent.dim x group.dim
    std::function<std::vector<Rat>(const std::vector<Rat>&)> lin;
    std::vector<Rat> project(const std::vector<Rat>& x) const {
        return group.reduce(lin(x));
    }
};

// Requires R <= K as subgroups of the ambient of parent; R should contain
// whatever part of the identification lattice is being killed (callers
// normally pass R + lattice).
CanonQZ canonical_subquotient(const QZGroup& parent, const QZSubgroup& k,
                              const QZSubgroup& r);

struct QZKernel {
    QZGroup group;
    QZMorphism inclusion;
    CanonQZ canon;
};
QZKernel kernel_qz(const QZMorphism& f);

struct QZQuotient {
    QZGroup group;
    QZMorphism projection;
    CanonQZ canon;
};
// Quotient of parent by (r + lattice).
QZQuotient quotient_qz(const QZGroup& parent, const QZSubgroup& r);
QZQuotient cokernel_qz(const QZMorphism& f);

bool is_isomorphism_qz(const QZMorphism& f);

std::optional<std::vector<Rat>> solve_preimage_qz(const QZMorphism& f,
                                                  const std::vector<Rat>& y);

// ker(d_out) / im(d_in) for composable d_in, d_out with d_out . d_in = 0.
CanonQZ subquotient_homology(const QZMorphism& d_out, const QZMorphism& d_in);

struct QZDirectSum {
    QZGroup group;
    std::vector<QZMorphism> inject, project;
    // offset maps: component coordinate -> sum coordinate
    std::vector<std::vector<size_t>> coord_of;
};
QZDirectSum direct_sum_qz(const std::vector<QZGroup>& parts);

// Hom(A, W) for finitely generated A and divisible W (W.nz == 0, no
// torsion).  The result is again a group in this category; `eval` applies an
// element of Hom(A, W) to an element of A, `from_values` recovers the
// coordinates of the morphism with the given values on the canonical
// generators of A.  The _raw variants skip modular reduction and are linear.
struct HomQZ {
    QZGroup group;
    FgAbGroup a;
    QZGroup w;
    // slot bookkeeping: hom coordinate -> (generator of a, coordinate of w)
    std::vector<std::pair<size_t, size_t>> slot;

    std::vector<Rat> eval_raw(const std::vector<Rat>& coords,
                              const std::vector<Int>& elt) const;
    std::vector<Rat> eval(const std::vector<Rat>& coords,
                          const std::vector<Int>& elt) const {
        return w.reduce(eval_raw(coords, elt));
    }
    std::vector<Rat> from_values_raw(
        const std::vector<std::vector<Rat>>& values) const;
    std::vector<Rat> from_values(
        const std::vector<std::vector<Rat>>& values) const {
        return group.reduce(from_values_raw(values));
    }
};

HomQZ hom_into(const FgAbGroup& a, const QZGroup& w);

// Extension along u : A -> C into an injective (divisible, torsion-free-
// quotient) target W = Q^a (+) (Q/Z)^b: given the value of a homomorphism
// phi : A -> W on each canonical generator of A, returns values on the
// canonical generators of C defining some psi : C -> W with psi . u = phi.
// The returned values depend linearly on the input values.  Throws
// NotDivisibleTarget if W has Z-type or torsion coordinates, LiftFailure if
// no extension exists (possible only when u is not injective).
std::vector<std::vector<Rat>> extend_to_divisible(
    const FgMorphism& u, const QZGroup& w,
    const std::vector<std::vector<Rat>>& values);

// Hom(u, W) : Hom(B, W) -> Hom(A, W) for u : A -> B.
QZMorphism hom_induced_qz(const FgMorphism& u, const HomQZ& hom_dom,
                          const HomQZ& hom_cod);
// Hom(A, v) : Hom(A, W) -> Hom(A, W') for v : W -> W'.
QZMorphism hom_postcompose_qz(const QZMorphism& v, const HomQZ& hom_dom,
                              const HomQZ& hom_cod);

}  // namespace wb
