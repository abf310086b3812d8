#pragma once

#include <string>
#include <vector>

#include "iarc/json_util.hpp"

namespace iarc {

struct SchemaViolation {
  std::string pointer;  // JSON pointer into the instance
  std::string message;
};

/// Validates `instance` against a JSON Schema using the keyword subset the
/// shipped card schema relies on: type, enum, required, properties,
/// additionalProperties, items, minimum, maximum, minLength, minItems and
/// local "#/..." $ref. Annotation keywords are ignored; any other keyword is
/// rejected when the schema is loaded.
class SchemaValidator {
 public:
  explicit SchemaValidator(Json schema);

  std::vector<SchemaViolation> validate(const Json& instance) const;

 private:
  void check(const Json& schema, const Json& instance, const std::string& pointer,
             std::vector<SchemaViolation>& out) const;
  const Json& resolve(const std::string& ref) const;

  Json root_;
};

/// JSON pointer token escaping ("~" -> "~0", "/" -> "~1").
std::string pointer_escape(const std::string& token);

}  // namespace iarc
