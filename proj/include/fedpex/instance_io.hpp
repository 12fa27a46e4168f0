#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "fedpex/instance.hpp"

namespace fedpex {

using AnyInstance = std::variant<MabInstance, LinearInstance>;

// {"type":"mab","means":[...],"sigma":s}
// {"type":"linear","dim":d,"contexts":[[...],...],"theta":[...],"sigma":s}
// Numbers are written with 17 significant digits.
std::string to_json(const MabInstance& inst);
std::string to_json(const LinearInstance& inst);
std::string to_json(const AnyInstance& inst);

/// Throws ParameterError on malformed or invalid documents.
AnyInstance parse_instance(std::string_view text);
AnyInstance load_instance(const std::filesystem::path& path);
void save_instance(const std::filesystem::path& path, const AnyInstance& inst);

}  // namespace fedpex
