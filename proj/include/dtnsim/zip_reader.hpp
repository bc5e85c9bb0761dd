#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace dtnsim {

/// Reads every regular entry of a zip archive into memory, keyed by the entry
/// name with any directory prefix removed. Supports stored and deflated
/// entries; zip64 and encryption are rejected with kFeedFormat.
std::map<std::string, std::string> read_zip_archive(const std::filesystem::path& path);

}  // namespace dtnsim
