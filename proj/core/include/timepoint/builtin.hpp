#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "timepoint/schema.hpp"

namespace timepoint {

namespace detail {

struct EmbeddedFile {
  std::string_view path;  // "<kind>/<file name>", e.g. "schemas/matres.schema"
  std::string_view contents;
};

const std::vector<EmbeddedFile>& embedded_files();

}  // namespace detail

/// Contents of a file from the library's data directory, if present.
[[nodiscard]] std::optional<std::string_view> embedded_file(std::string_view path);

/// "allen13", "matres", "tbdense"
[[nodiscard]] std::vector<std::string> builtin_schema_names();

/// Parsed and validated once, then shared. Throws SchemaError "UnknownSchema".
[[nodiscard]] const RelationSchema& builtin_schema(std::string_view name);
[[nodiscard]] std::string_view builtin_schema_text(std::string_view name);

}  // namespace timepoint
