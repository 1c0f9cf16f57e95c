#include <string>

#include "mref/instruction.hpp"
#include "mref/text.hpp"

namespace mref {

void AssetCatalog::add(const AssetRef& id, CatalogEntry entry) {
  if (entry.byte_size == 0) {
    throw InstructionError(InstructionErrc::CatalogParse, "asset " + id.id() + " has zero byte size");
  }
  const auto [it, inserted] = entries_.emplace(id.id(), std::move(entry));
  if (!inserted) {
    throw InstructionError(InstructionErrc::DuplicateAsset, "duplicate asset id " + id.id());
  }
}

const CatalogEntry* AssetCatalog::find(std::string_view id) const {
  const auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

AssetCatalog AssetCatalog::parse(std::string_view text) {
  AssetCatalog catalog;
  const auto lines = text::split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string where = "line " + std::to_string(n + 1);
    const auto body = text::trim(lines[n]);
    if (body.empty() || body.front() == '#') {
      continue;
    }
    const auto tokens = text::tokenize(body);
    if (!tokens || tokens->size() != 5 || (*tokens)[0] != "asset") {
      throw InstructionError(InstructionErrc::CatalogParse,
                             where + ": expected `asset <id> name=\"...\" bytes=<u64> sha=\"<hex>\"`");
    }
    if (!AssetRef::is_valid((*tokens)[1])) {
      throw InstructionError(InstructionErrc::CatalogParse, where + ": invalid asset id");
    }
    CatalogEntry entry;
    bool have_name = false, have_bytes = false, have_sha = false;
    for (std::size_t i = 2; i < tokens->size(); ++i) {
      const auto kv = text::key_value((*tokens)[i]);
      if (!kv) {
        throw InstructionError(InstructionErrc::CatalogParse, where + ": expected key=value, got " + (*tokens)[i]);
      }
      const auto [key, value] = *kv;
      if (key == "name" && !have_name) {
        entry.display_name = std::string(value);
        have_name = true;
      } else if (key == "bytes" && !have_bytes) {
        const auto bytes = text::parse_u64(value);
        if (!bytes || *bytes == 0) {
          throw InstructionError(InstructionErrc::CatalogParse, where + ": bytes must be a positive integer");
        }
        entry.byte_size = *bytes;
        have_bytes = true;
      } else if (key == "sha" && !have_sha) {
        if (!text::from_hex(value, entry.content_hash.data(), entry.content_hash.size())) {
          throw InstructionError(InstructionErrc::CatalogParse, where + ": sha must be 64 hex characters");
        }
        have_sha = true;
      } else {
        throw InstructionError(InstructionErrc::CatalogParse, where + ": unexpected field " + std::string(key));
      }
    }
    try {
      catalog.add(AssetRef((*tokens)[1]), std::move(entry));
    } catch (const InstructionError& e) {
      throw InstructionError(e.code(), where + ": " + e.what());
    }
  }
  return catalog;
}

AssetCatalog AssetCatalog::load(const std::string& path) {
  std::string content;
  try {
    content = text::read_file(path);
  } catch (const std::exception& e) {
    throw InstructionError(InstructionErrc::Io, e.what());
  }
  return parse(content);
}

}  // namespace mref
