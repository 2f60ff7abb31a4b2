#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "rtm/lexer.hpp"
#include "rtm/metamodel.hpp"
#include "rtm/object_graph.hpp"

namespace rtm {

// .mm:  metamodel <Name> { class <Name> { <field>: <kind>[?] ... } }
//       kinds: string | int | bool | date | ref <Class> | ref <Metamodel>.<Class>
// .im:  instance <graphId> { obj <id> : <Metamodel>.<Class> { <field> = <literal> | <field> -> <objId> ... } }

Metamodel parse_metamodel(std::string_view text);
std::string print_metamodel(const Metamodel& mm);

ObjectGraph parse_instance(std::string_view text);
/// Slots print in class field order when the class is known to `mms`,
/// otherwise alphabetically.
std::string print_instance(const ObjectGraph& g, const MetamodelSet* mms = nullptr);

/// Literal at the stream cursor: null, true, false, [-]int, "text", date.
Value parse_literal(TokenStream& ts);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view content);

Metamodel load_metamodel(const std::filesystem::path& p);
ObjectGraph load_instance(const std::filesystem::path& p);

}  // namespace rtm
