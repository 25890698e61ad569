#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "arf/model.hpp"

namespace arf {

// Artifact container: magic "ARF1", a format version, a length-prefixed
// canonical little-endian payload (schema, forest, parameter table,
// metadata) and a CRC-32 over the payload. Serialization is canonical:
// saving a loaded model reproduces the file byte for byte.
//
// The forest's out-of-bag masks and leaf row-id lists reference the training
// table and are not persisted; leaf real-row counts survive.
inline constexpr char kModelMagic[4] = {'A', 'R', 'F', '1'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::string save_model_bytes(const ArfModel& model);
ArfModel load_model_bytes(const std::string& bytes);

// File variants. Saving writes to a temporary file in the target directory
// and renames it into place, so a failed save never leaves a partial
// artifact. Loading rejects unknown magic/version, truncation and checksum
// mismatches without returning a partial model.
void save_model(const ArfModel& model, const std::filesystem::path& path);
ArfModel load_model(const std::filesystem::path& path);

// CRC-32 (IEEE reflected polynomial), exposed for tests.
std::uint32_t crc32(const void* data, std::size_t size);

// Writes a file atomically: content goes to a sibling temp file first, then
// an atomic rename replaces the target.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace arf
