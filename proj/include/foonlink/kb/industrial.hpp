#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "foonlink/error.hpp"
#include "foonlink/foon/format.hpp"
#include "foonlink/foon/types.hpp"
#include "foonlink/text.hpp"

namespace foonlink::kb {

enum class ResourceType { Material, Device };

inline std::string_view to_string(ResourceType t) { return t == ResourceType::Device ? "Device" : "Material"; }

struct PartCatalogEntry {
  std::string label;  // display form, e.g. "T-bolt"
  int catalog_number;
  ResourceType resource_type;

  /// Label as it appears in FOON object nodes.
  std::string node_label() const { return text::normalize_label(label); }
};

inline const std::vector<PartCatalogEntry>& part_catalog() {
  static const std::vector<PartCatalogEntry> parts{
      {"strut profile", 1, ResourceType::Material},
      {"bracket", 2, ResourceType::Material},
      {"T-bolt", 3, ResourceType::Material},
      {"flange nut", 4, ResourceType::Material},
  };
  return parts;
}

inline const PartCatalogEntry* find_part(std::string_view label) {
  auto key = text::normalize_label(label);
  for (const auto& p : part_catalog())
    if (p.node_label() == key) return &p;
  return nullptr;
}

/// Recommended state vocabulary for hand-authored industrial subgraphs.
inline constexpr std::array<std::string_view, 7> kStateVocabulary{
    "loose", "aligned", "inserted", "attached to", "secured to", "detached", "empty-slot"};

inline constexpr std::string_view kAssemblyName = "industrial_assembly";
inline constexpr std::string_view kDisassemblyName = "industrial_disassembly";

// Byte-identical copies of data/kb/*.foon.
inline constexpr std::string_view kAssemblyFoon = R"FOON(#FOONv1 industrial_assembly
O	bracket	0
S	detached
O	strut profile	0
S	empty-slot
M	pick-and-place
H	right-hand	bracket
O	bracket	0
S	aligned
S	attached to	strut profile
O	strut profile	0
S	empty-slot
//
O	t-bolt	0
S	detached
O	bracket	0
S	aligned
S	attached to	strut profile
O	strut profile	0
S	empty-slot
M	pick-and-place
H	right-hand	t-bolt
O	t-bolt	0
S	inserted	strut profile
O	bracket	0
S	aligned
S	attached to	strut profile
O	strut profile	0
//
O	flange nut	0
S	detached
O	t-bolt	0
S	inserted	strut profile
M	pick-and-place
H	right-hand	flange nut
O	flange nut	0
S	loose
S	attached to	t-bolt
O	t-bolt	0
S	inserted	strut profile
//
O	flange nut	0
S	loose
S	attached to	t-bolt
O	t-bolt	0
S	inserted	strut profile
O	bracket	0
S	aligned
S	attached to	strut profile
O	strut profile	0
M	screw
H	right-hand	flange nut
O	flange nut	0
S	secured to	t-bolt
O	bracket	1
S	secured to	strut profile
O	strut profile	0
O	t-bolt	0
S	secured to	strut profile
//
)FOON";

inline constexpr std::string_view kDisassemblyFoon = R"FOON(#FOONv1 industrial_disassembly
O	flange nut	0
S	secured to	t-bolt
O	t-bolt	0
S	secured to	strut profile
O	bracket	0
S	secured to	strut profile
O	strut profile	0
M	unscrew
H	right-hand	flange nut
O	flange nut	0
S	loose
S	attached to	t-bolt
O	t-bolt	0
S	inserted	strut profile
O	bracket	0
S	aligned
S	attached to	strut profile
O	strut profile	0
//
O	flange nut	0
S	loose
S	attached to	t-bolt
O	t-bolt	0
S	inserted	strut profile
M	pick-and-place
H	right-hand	flange nut
O	flange nut	0
S	detached
O	t-bolt	0
S	inserted	strut profile
//
O	t-bolt	0
S	inserted	strut profile
O	bracket	0
S	aligned
S	attached to	strut profile
O	strut profile	0
M	pick-and-place
H	right-hand	t-bolt
O	t-bolt	0
S	detached
O	bracket	0
S	aligned
S	attached to	strut profile
O	strut profile	0
S	empty-slot
//
O	bracket	0
S	aligned
S	attached to	strut profile
O	strut profile	0
S	empty-slot
M	pick-and-place
H	right-hand	bracket
O	bracket	1
S	detached
O	strut profile	0
S	empty-slot
//
)FOON";

inline Subgraph load_assembly() { return parse_foon(kAssemblyFoon); }
inline Subgraph load_disassembly() { return parse_foon(kDisassemblyFoon); }

inline std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Resolves a subgraph by name. With a kb_dir, `<kb_dir>/<name>.foon` takes
/// precedence over the embedded copies.
inline std::optional<Subgraph> load_named(std::string_view name, const std::optional<std::filesystem::path>& kb_dir = {}) {
  if (kb_dir) {
    if (auto doc = read_file(*kb_dir / (std::string(name) + ".foon"))) return parse_foon(*doc);
  }
  if (name == kAssemblyName) return load_assembly();
  if (name == kDisassemblyName) return load_disassembly();
  return std::nullopt;
}

}  // namespace foonlink::kb
