#include "hardy/errors.hpp"

#include <utility>

namespace hardy {

Error::Error(std::string kind, const std::string& what)
    : std::runtime_error(what), kind_(std::move(kind)) {}

DefinitionViolationError::DefinitionViolationError(std::vector<std::string> clauses,
                                                   const std::string& what)
    : Error("definition-violation", what), clauses_(std::move(clauses)) {}

}  // namespace hardy
