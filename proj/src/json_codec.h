#ifndef CROSSFIRE_SRC_JSON_CODEC_H_
#define CROSSFIRE_SRC_JSON_CODEC_H_

// Internal JSON helpers. nlohmann::json's default object type is a std::map,
// so dump() with no indent already yields sorted keys without whitespace.

#include <string>
#include <string_view>

#include "crossfire/graph.h"
#include "json.hpp"

namespace crossfire::internal {

using Json = nlohmann::json;

Json VariableToJson(const RootVariable& v);
RootVariable VariableFromJson(const Json& j, const std::string& where);

// `root_alias`, when non-empty, replaces the root segment of every id.
Json GraphToJson(const VariableGraph& graph, std::string_view root_alias = {});
VariableGraph GraphFromJson(const Json& j, const std::string& where);

// dump() for canonical output. Strings are emitted as UTF-8.
std::string Dump(const Json& j);

// Parses text, converting nlohmann parse errors to ParseError.
Json ParseJson(std::string_view bytes);

// Typed field accessors that raise ValidationError naming `where.key`.
const Json& Require(const Json& obj, const char* key, const std::string& where);
std::string RequireString(const Json& obj, const char* key,
                          const std::string& where);
int64_t RequireInt(const Json& obj, const char* key, const std::string& where);

}  // namespace crossfire::internal

#endif  // CROSSFIRE_SRC_JSON_CODEC_H_
