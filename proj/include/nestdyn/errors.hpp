#ifndef NESTDYN_ERRORS_HPP
#define NESTDYN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nestdyn {

// Base class for all library errors. `code()` is a stable machine-readable
// tag used by the CLI to map failures to exit codes and report entries.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define NESTDYN_DEFINE_ERROR(Name)                          \
  class Name : public Error {                               \
   public:                                                  \
    explicit Name(const std::string& message)               \
        : Error(#Name, message) {}                          \
  }

// hierarchy
NESTDYN_DEFINE_ERROR(NotAPartition);
NESTDYN_DEFINE_ERROR(NotNested);
NESTDYN_DEFINE_ERROR(EmptyClass);
NESTDYN_DEFINE_ERROR(LevelOutOfRange);
NESTDYN_DEFINE_ERROR(InvalidClass);

// games
NESTDYN_DEFINE_ERROR(NonFinitePayoff);
NESTDYN_DEFINE_ERROR(EmptyClassMass);
NESTDYN_DEFINE_ERROR(UnsupportedKind);
NESTDYN_DEFINE_ERROR(InvalidState);

// profiles
NESTDYN_DEFINE_ERROR(InvalidProfile);

// dynamics
NESTDYN_DEFINE_ERROR(BoundaryState);
NESTDYN_DEFINE_ERROR(StepBlowup);
NESTDYN_DEFINE_ERROR(PositivityLoss);

// choice
NESTDYN_DEFINE_ERROR(NoConvergence);

// analysis
NESTDYN_DEFINE_ERROR(SupportMismatch);
NESTDYN_DEFINE_ERROR(WindowTooShort);
NESTDYN_DEFINE_ERROR(NotGESS);
NESTDYN_DEFINE_ERROR(NotConverged);

// cli
NESTDYN_DEFINE_ERROR(ConfigError);

#undef NESTDYN_DEFINE_ERROR

}  // namespace nestdyn

#endif  // NESTDYN_ERRORS_HPP
