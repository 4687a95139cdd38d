#pragma once

#include <string>
#include <string_view>

namespace gpsup::cli {

/// Hex SHA-1 of `content` framed as a git blob ("blob <size>\0" prefix), so
/// `git hash-object` on the same bytes gives the same digest.
std::string git_blob_sha1(std::string_view content);

/// git_blob_sha1 of a file's bytes; throws ConfigError naming `field` when unreadable.
std::string file_sha1(const std::string& path, const std::string& field);

}  // namespace gpsup::cli
