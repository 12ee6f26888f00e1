#pragma once

#include <stdexcept>
#include <string>

namespace semiharm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SEMIHARM_ERROR(Name)                     \
  class Name : public Error {                    \
   public:                                       \
    explicit Name(const std::string& what)       \
        : Error(std::string(#Name ": ") + what) {} \
  }

SEMIHARM_ERROR(SolverDivergence);
SEMIHARM_ERROR(AmbiguousCluster);
SEMIHARM_ERROR(BranchJump);
SEMIHARM_ERROR(DegenerateRadius);
SEMIHARM_ERROR(NotOnBoundary);
SEMIHARM_ERROR(VanishingGradient);
SEMIHARM_ERROR(RegionEscapesDomain);
SEMIHARM_ERROR(LogSingularity);
SEMIHARM_ERROR(InvalidCovering);
SEMIHARM_ERROR(ParseError);
SEMIHARM_ERROR(ConfigError);

#undef SEMIHARM_ERROR

}  // namespace semiharm
