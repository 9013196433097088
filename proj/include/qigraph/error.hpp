#pragma once

#include <stdexcept>
#include <string>

namespace qigraph {

/// Base of every error thrown by the library.  The CLI maps these to exit
/// status 2 (bad input) and anything else to exit status 3.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define QIGRAPH_DEFINE_ERROR(Name)                                     \
  class Name : public Error {                                          \
  public:                                                              \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

QIGRAPH_DEFINE_ERROR(SyntaxError);
QIGRAPH_DEFINE_ERROR(SchemaError);
QIGRAPH_DEFINE_ERROR(VersionError);
QIGRAPH_DEFINE_ERROR(DegenerateLattice);
QIGRAPH_DEFINE_ERROR(SingularMatrix);
QIGRAPH_DEFINE_ERROR(MismatchedEnds);
QIGRAPH_DEFINE_ERROR(InvalidTarget);
QIGRAPH_DEFINE_ERROR(NotDeclared);
QIGRAPH_DEFINE_ERROR(UnknownEdge);
QIGRAPH_DEFINE_ERROR(UnknownVertex);
QIGRAPH_DEFINE_ERROR(UnpairedCusp);
QIGRAPH_DEFINE_ERROR(NonIntegralGluing);
QIGRAPH_DEFINE_ERROR(InvalidGraph);
QIGRAPH_DEFINE_ERROR(TooLarge);
QIGRAPH_DEFINE_ERROR(Unbalanced);
QIGRAPH_DEFINE_ERROR(CoverMismatch);
QIGRAPH_DEFINE_ERROR(LatticeNotContained);
QIGRAPH_DEFINE_ERROR(BaseNotTree);
QIGRAPH_DEFINE_ERROR(IncompatibleRefinement);

#undef QIGRAPH_DEFINE_ERROR

}  // namespace qigraph
