#pragma once

#include <map>

#include "wb/complexes.hpp"
#include "wb/qz.hpp"

namespace wb {

// Two-term injective resolution 0 -> G -> G' -> G'' -> 0 of the coefficient
// group.  G is either finitely generated (g_fg, with gsrc its image in the
// ambient category) or itself injective (divisible_coeff, in which case the
// resolution is 0 -> G -> G -> 0 -> 0).
struct InjectiveResolution {
    bool divisible_coeff = false;
    FgAbGroup g_fg;
    QZGroup gsrc;      // from_fg(g_fg), or the divisible coefficient group
    QZGroup gp, gpp;   // G', G''
    QZMorphism alpha;  // gsrc -> gp, injective
    QZMorphism beta;   // gp -> gpp, surjective, with ker beta = im alpha
};

// Componentwise resolution: Z-summands get 0 -> Z -> Q -> Q/Z -> 0, Z/d
// summands get 0 -> Z/d -> Q/Z -> Q/Z -> 0 with alpha = (1/d) and beta = d.
// Exactness is verified on construction.
InjectiveResolution standard_resolution(const FgAbGroup& g);
// For an injective coefficient group (sums of Q and Q/Z): G' = G, G'' = 0.
InjectiveResolution self_resolution(const QZGroup& g);
// Checks beta . alpha = 0, ker beta = im alpha, alpha injective and beta
// surjective; throws Error on failure.
void verify_resolution(const InjectiveResolution& r);

// The chain complex with level-n group Hom(C^n;G') (+) Hom(C^{n+1};G'') and
// boundary (phi', phi'') -> (phi' . d, beta . phi' - phi'' . d).  Level n is
// nonzero only for base.lo - 1 <= n <= base.hi.
struct ConeComplex {
    CochainComplex base;
    InjectiveResolution res;
    int lo = 0;

    struct Level {
        HomQZ hom_p;            // Hom(C^n, G')
        HomQZ hom_pp;           // Hom(C^{n+1}, G'')
        QZDirectSum sum;
        QZMorphism boundary;    // level n -> level n-1 (zero map at n = lo)
    };
    std::vector<Level> levels;

    bool empty() const { return levels.empty(); }
    int hi() const { return lo + static_cast<int>(levels.size()) - 1; }
    bool in_range(int n) const { return !empty() && n >= lo && n <= hi(); }
    const Level& level(int n) const;
    QZGroup group(int n) const;
    QZMorphism boundary(int n) const;  // zero morphism outside the range
    // Ambient element from the two components' coordinates.
    std::vector<Rat> pair_element(int n, const std::vector<Rat>& cp,
                                  const std::vector<Rat>& cpp) const;
};

// Assembles the cone and verifies that consecutive boundaries compose to
// zero.  The base complex must be valid.
ConeComplex build_cone(const CochainComplex& base,
                       const InjectiveResolution& res);

struct ConeHomology {
    FgAbGroup group;  // valid only when fg
    bool fg = true;   // false only for injective coefficients
    CanonQZ canon;    // representatives/coordinates in the level-n ambient
};

struct UcfReport {
    int n = 0;
    FgAbGroup ext;            // Ext(H^{n+1};G), closed form
    FgAbGroup ext_via_beta;   // Hom(H^{n+1};G'') / im beta_*
    FgAbGroup hbar;           // level-n cone homology
    FgAbGroup hom;            // Hom(H^n;G)
    IntMatrix chi_matrix;     // ext -> hbar on canonical generators
    IntMatrix xi_matrix;      // hbar -> hom on canonical generators
    bool ext_routes_agree = false;
    bool chi_well_defined = false;   // second extension gives the same class
    bool chi_kills_beta = false;     // chi . beta_* = 0
    bool chi_injective = false;
    bool xi_surjective = false;
    bool xi_chi_zero = false;            // xi_bar . chi_bar = 0
    bool ker_xi_hit_by_chi = false;      // explicit chi-preimage per generator
    bool exact() const {
        return ext_routes_agree && chi_well_defined && chi_kills_beta &&
               chi_injective && xi_surjective && xi_chi_zero &&
               ker_xi_hit_by_chi;
    }
};

struct KerXiReport {
    int n = 0;
    bool sigma_injective = false;
    bool omega_lands_in_ker_xi = false;  // images are cycles killed by xi
    bool omega_onto_ker_xi = false;      // explicit preimage per generator
    bool im_sigma_eq_ker_omega = false;
    bool ok() const {
        return sigma_injective && omega_lands_in_ker_xi &&
               omega_onto_ker_xi && im_sigma_eq_ker_omega;
    }
};

struct NaturalityReport {
    int n = 0;
    bool cone_map_is_chain_map = false;
    bool square_tau = false;   // tau . f~# = (f#, f~#) . tau'
    bool square_mu = false;    // mu . (f#, f~#) = f~ . mu'
    bool square_xi = false;    // xi . fbar = Hom(f*) . xi'
    bool square_chi = false;   // fbar . chi' = chi . Ext(f*)
    bool ok() const {
        return cone_map_is_chain_map && square_tau && square_mu &&
               square_xi && square_chi;
    }
};

struct ClassicalCompare {
    int n = 0;
    FgAbGroup classical;       // H_n(Hom(C*;G))
    FgAbGroup hbar;
    IntMatrix alpha_star;      // classical -> hbar
    bool alpha_star_iso = false;
    bool square_chi = false;   // alpha_star . chi_0 = chi
    bool square_xi = false;    // xi_bar . alpha_star = xi~
    bool connecting_well_defined = false;  // two lifts, same value
    bool ok() const {
        return alpha_star_iso && square_chi && square_xi &&
               connecting_well_defined;
    }
};

// All level-n verifications around one cone, with cached cohomology data.
class ConeUcf {
  public:
    ConeUcf(CochainComplex base, InjectiveResolution res);

    const ConeComplex& cone() const { return cone_; }
    const CochainComplex& base() const { return cone_.base; }
    const InjectiveResolution& res() const { return cone_.res; }
    const CohomologyData& cohomology_at(int n) const;
    const ConeHomology& homology(int n) const;

    // The homomorphism H^n -> G carried by a cycle at level n (the
    // alpha-preimage of phi' . j, descended to cohomology).  Throws NotACycle
    // and LiftFailure.  Finitely generated coefficients only.
    FgMorphism xi_cycle(int n, const std::vector<Rat>& x) const;
    const HomFgGroup& hom_h(int n) const;  // Hom(H^n;G), fg coefficients
    FgMorphism xi_bar(int n) const;        // hbar_n -> Hom(H^n;G)

    // For an injective coefficient group: hbar_n -> Hom(H^n;G) in the
    // ambient category (the right side need not be finitely generated).
    struct DivisibleXi {
        HomQZ hom;       // Hom(H^n;G)
        QZMorphism map;  // from_fg(hbar_n) -> hom.group
    };
    DivisibleXi xi_bar_divisible(int n) const;

    // Class in hbar_n of the cycle (0, -phi''), where phi'' extends
    // phibar'' . p over C^{n+1} and phibar'' : H^{n+1} -> G'' is given by its
    // values on the canonical generators.  `variant` > 0 uses a different
    // extension (for well-definedness checks).
    std::vector<Int> chi_class(int n,
                               const std::vector<std::vector<Rat>>& values,
                               int variant = 0) const;

    // Ext(H^{n+1};G) realized as Hom(H^{n+1};G'')/im beta_*.
    struct ExtData {
        FgAbGroup group;
        HomQZ hom_pp;       // Hom(H^{n+1};G'')
        HomQZ hom_p;        // Hom(H^{n+1};G')
        QZMorphism beta_star;
        QZQuotient quotient;
    };
    const ExtData& ext_data(int n) const;
    FgMorphism chi_bar(int n) const;  // ext_data(n).group -> hbar_n

    UcfReport verify(int n) const;
    KerXiReport verify_ker_xi(int n) const;

    // The two sides of the Ker xi short exact sequence at level n:
    // sigma : Hom(C^{n+1}/B^{n+1};G') -> Hom(C^{n+1};G') (+)
    // Hom(C^{n+1}/B^{n+1};G'') and omega from the middle onto Ker xi
    // inside the level-n cone group.
    struct OmegaSigma {
        HomQZ hom_hq_p;    // Hom(C^{n+1}/B^{n+1}, G')
        HomQZ hom_c1_p;    // Hom(C^{n+1}, G')
        HomQZ hom_hq_pp;   // Hom(C^{n+1}/B^{n+1}, G'')
        QZDirectSum mid;   // hom_c1_p (+) hom_hq_pp
        QZMorphism sigma;  // hom_hq_p -> mid
        QZMorphism omega;  // mid -> cone level n
    };
    OmegaSigma omega_sigma(int n) const;

  private:
    ConeComplex cone_;
    mutable std::map<int, CohomologyData> cohomology_;
    mutable std::map<int, ConeHomology> homology_;
    mutable std::map<int, HomFgGroup> hom_h_;
    mutable std::map<int, ExtData> ext_;

    friend NaturalityReport naturality_check(const CochainMap& f,
                                             const FgAbGroup& g, int n);
    friend FgMorphism cone_induced(const ConeUcf& target_cone,
                                   const ConeUcf& source_cone,
                                   const CochainMap& f, int n);

    // phi'/phi'' values of a level-n element on the generators of C^n and
    // C^{n+1} (raw, unreduced; linear in x).
    std::vector<std::vector<Rat>> phi_p_values(int n,
                                               const std::vector<Rat>& x) const;
    std::vector<std::vector<Rat>> phi_pp_values(
        int n, const std::vector<Rat>& x) const;
    // Representative cycle of the hbar_n element with the given coordinates.
    std::vector<Rat> representative(int n, const std::vector<Int>& h) const;
    // One phibar'' : H^{n+1} -> G'' with chi(phibar'') = class of the given
    // cycle x; requires xi_cycle(n, x) = 0.
    std::vector<std::vector<Rat>> d1_preimage(int n,
                                              const std::vector<Rat>& x) const;
};

// Homology of the classical complex Hom(C*;G) at level n; any C*, fg G.
FgAbGroup classical_hom_homology(const CochainComplex& c, const FgAbGroup& g,
                                 int n);
// Theorem-2 comparison; requires C* degreewise free (throws NotFree).
ClassicalCompare classical_compare(const CochainComplex& c,
                                   const FgAbGroup& g, int n);

// Induced map hbar_n(dst of f) -> hbar_n(src of f) (contravariant).  Here
// and below, source_cone is built over f.dst and target_cone over f.src.
FgMorphism cone_induced(const ConeUcf& target_cone, const ConeUcf& source_cone,
                        const CochainMap& f, int n);
// Level-n cone map cone(f.dst) -> cone(f.src) inducing the above.
QZMorphism cone_level_map(const ConeUcf& target_cone,
                          const ConeUcf& source_cone, const CochainMap& f,
                          int n);
// Induced map on Ext(H^{n+1};G) through the Hom(H^{n+1};G'')/im beta_* model.
FgMorphism ext_induced(const ConeUcf& target_cone, const ConeUcf& source_cone,
                       const CochainMap& f, int n);
// Induced map on Hom(H^n;G).
FgMorphism hom_h_induced(const ConeUcf& target_cone,
                         const ConeUcf& source_cone, const CochainMap& f,
                         int n);
// The map C^{n+1}/B^{n+1}(src of f) -> C'^{n+1}/B'^{n+1}(dst of f) induced
// on the quotients carried by the level-n OmegaSigma data.
FgMorphism quotient_next_induced(const ConeUcf& target_cone,
                                 const ConeUcf& source_cone,
                                 const CochainMap& f, int n);
// Vertical maps between OmegaSigma objects: the left term
// Hom(C'^{n+1}/B'^{n+1};G') -> Hom(C^{n+1}/B^{n+1};G') and the middle pair.
QZMorphism ker_xi_sub_induced(const ConeUcf& target_cone,
                              const ConeUcf& source_cone, const CochainMap& f,
                              int n);
QZMorphism ker_xi_mid_induced(const ConeUcf& target_cone,
                              const ConeUcf& source_cone, const CochainMap& f,
                              int n);

NaturalityReport naturality_check(const CochainMap& f, const FgAbGroup& g,
                                  int n);

UcfReport verify_ucf(const CochainComplex& c, const FgAbGroup& g, int n);
KerXiReport verify_ker_xi(const CochainComplex& c, const FgAbGroup& g, int n);

}  // namespace wb
