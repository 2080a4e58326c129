#include "timepoint/error.hpp"

namespace timepoint {

Error::Error(std::string name, const std::string& message)
    : std::runtime_error(name + ": " + message), name_(std::move(name)) {}

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : Error("ParseError",
            "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

LengthMismatch::LengthMismatch(std::size_t gold, std::size_t pred)
    : Error("LengthMismatch", "gold has " + std::to_string(gold) + " labels, predictions have " +
                                  std::to_string(pred)) {}

DuplicateId::DuplicateId(const std::string& id)
    : Error("DuplicateId", "record id '" + id + "' appears more than once") {}

}  // namespace timepoint
