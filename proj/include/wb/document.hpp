#pragma once

#include <json.hpp>

#include "wb/cone.hpp"
#include "wb/simplicial.hpp"
#include "wb/towers.hpp"

namespace wb {

using Json = nlohmann::json;

// Malformed document: `path` names the offending field (dot/index notation).
struct DocumentError : Error {
    std::string path;
    DocumentError(const std::string& p, const std::string& what)
        : Error(p.empty() ? what : p + ": " + what), path(p) {}
};

// Scalars.  Integers become JSON numbers when they fit in 64 bits and
// decimal strings otherwise; rationals are "p/q" strings; elements of Q/Z
// are "p/q mod 1" strings.
Json int_to_json(const Int& v);
Int int_from_json(const Json& j, const std::string& path = "");
std::string rat_to_string(const Rat& v);
Rat rat_from_string(const std::string& s, const std::string& path = "");
std::string qz_elt_to_string(const Rat& v);
Rat qz_elt_from_string(const std::string& s, const std::string& path = "");

// Matrices: {"rows": r, "cols": c, "entries": [[...], ...]}.
Json matrix_to_json(const IntMatrix& m);
IntMatrix matrix_from_json(const Json& j, const std::string& path = "");
Json rat_matrix_to_json(const Matrix<Rat>& m);
Matrix<Rat> rat_matrix_from_json(const Json& j, const std::string& path = "");

// Groups and morphisms.
Json group_to_json(const FgAbGroup& g);
FgAbGroup group_from_json(const Json& j, const std::string& path = "");
Json morphism_to_json(const FgMorphism& f);
FgMorphism morphism_from_json(const Json& j, const std::string& path = "");

// Complexes and maps of complexes.
Json complex_to_json(const CochainComplex& c);
CochainComplex complex_from_json(const Json& j, const std::string& path = "");
Json cochain_map_to_json(const CochainMap& f);
CochainMap cochain_map_from_json(const Json& j, const std::string& path = "");

// Inverse systems of groups and direct systems of complexes.
Json tower_to_json(const TowerOfGroups& t);
TowerOfGroups tower_from_json(const Json& j, const std::string& path = "");
Json system_to_json(const TowerOfComplexes& t);
TowerOfComplexes system_from_json(const Json& j,
                                  const std::string& path = "");

// Simplicial complexes: {"vertices": n, "facets": [[...], ...]}.
Json simplicial_to_json(const SimplicialComplex& k);
SimplicialComplex simplicial_from_json(const Json& j,
                                       const std::string& path = "");

// Coefficient documents: either a finitely generated group, or
// {"divisible": {"q": a, "qz": b}} for Q^a + (Q/Z)^b.
bool is_divisible_coeff(const Json& j);
QZGroup divisible_from_json(const Json& j, const std::string& path = "");

// Verification reports, with full witness matrices where the checks
// produced them.  One direction only: reports are outputs.
Json report_to_json(const UcfReport& r);
Json report_to_json(const KerXiReport& r);
Json report_to_json(const NaturalityReport& r);
Json report_to_json(const ClassicalCompare& r);
Json report_to_json(const LimResult& r);
Json report_to_json(const Lim1Certificate& r);
Json report_to_json(const Lemma2Report& r);
Json report_to_json(const Cor2Report& r);
Json report_to_json(const Lemma4Report& r);
Json report_to_json(const Cor3Report& r);
Json report_to_json(const Theorem3Report& r);
Json report_to_json(const MilnorReport& r);
Json report_to_json(const Cor5Report& r);

// Parses text, translating json syntax errors into DocumentError with the
// byte position in the path.
Json parse_document(const std::string& text);
Json load_document(const std::string& filename);

}  // namespace wb
