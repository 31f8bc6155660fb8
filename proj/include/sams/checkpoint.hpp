#pragma once

#include <string>

#include "sams/model.hpp"

namespace sams {

/// Writes the model: a `SAMS v1` line, a `dim <d> senses <n> encoder <kind>
/// vocab <V>` line, V `token<TAB>count` lines, then named blocks, each a
/// `block <name> <rows> <cols>` line followed by little-endian float32 data.
/// Optimizer state is not stored.
void saveModel(const Model& model, const std::string& path);

/// Reads a checkpoint written by saveModel. Throws IoError, VersionError
/// (bad header) or FormatError (malformed or truncated block, named).
Model loadModel(const std::string& path);

}  // namespace sams
