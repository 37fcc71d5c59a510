#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "flowalg/types.hpp"
#include "flowalg/value.hpp"

namespace flowalg {

// JSON encoding of values:
//   integer -> Int, number with fraction/exponent -> Float, string -> Str,
//   boolean -> Bool, {"tuple":[...]} -> Tuple, plain array -> Bag,
//   {"list":[...]} -> List.
// Dataset files hold a single top-level array; whether it is a bag or a list
// is decided by the declared type of the place it is bound to.

nlohmann::json encodeValue(const Value& v);

/// Decodes without a type hint.
Value decodeValue(const nlohmann::json& j);

/// Decodes guided by `expected`: integers are widened where a Float is
/// expected and the result is checked against the type.
Value decodeValue(const nlohmann::json& j, const ElemType& expected);

/// `declared` is the place type (Bag<..> or List<..>).
Value decodeDataset(const nlohmann::json& j, const ElemType& declared);
nlohmann::json encodeDataset(const Value& dataset);
std::string datasetToString(const Value& dataset);

nlohmann::json readJsonFile(const std::filesystem::path& path);
void writeTextFile(const std::filesystem::path& path, const std::string& text);

}  // namespace flowalg
