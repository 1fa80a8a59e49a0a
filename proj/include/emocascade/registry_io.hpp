// include/emocascade/registry_io.hpp

// Copyright 2026  The emocascade authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABILITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef EMOCASCADE_REGISTRY_IO_HPP_
#define EMOCASCADE_REGISTRY_IO_HPP_

#include <string>

#include "emocascade/cascade.hpp"

namespace emocascade {

inline constexpr int kArchiveFormatVersion = 1;

// Writes the registry as a single JSON document with sorted keys and
// round-trip-exact numbers, so saving the same registry twice produces
// byte-identical files.
void SaveRegistry(const ModelRegistry &registry, const std::string &path);

// Reads a registry archive written by SaveRegistry.  Throws IoError on a
// missing or unparsable file, a wrong format_version, or a structurally
// incomplete document.
ModelRegistry LoadRegistry(const std::string &path);

}  // namespace emocascade

#endif  // EMOCASCADE_REGISTRY_IO_HPP_
