// Copyright 2026 The rtleval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace rtleval {

std::string read_file(const std::filesystem::path& path);
std::optional<std::string> read_file_if_exists(const std::filesystem::path& path);

// Write-temp-then-rename; the file either has the full new content or the
// old one, never a prefix.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

void ensure_dir(const std::filesystem::path& dir);

// Unique scratch directory under `root`, created by this call.
std::filesystem::path make_scratch_dir(const std::filesystem::path& root,
                                       const std::string& tag);

}  // namespace rtleval
