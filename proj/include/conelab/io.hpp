#pragma once

#include <string>

#include "conelab/mesh.hpp"
#include "json.hpp"

namespace conelab {

using json = nlohmann::ordered_json;

/// Parses a whole file as JSON. Syntax errors become ParseError with
/// "path:line:col" location.
json read_json_file(const std::string& path);

/// Writes `doc` (2-space indent, trailing newline) via temp file + rename.
void write_json_file_atomic(const std::string& path, const json& doc);

/// Mesh document: {"dim": d, "vertices": [[x..], ..] | count, "simplices": [[v0..vd], ..]}.
/// Lower faces are generated; an "orientation" key is rejected.
SimplicialComplex load_mesh(const json& doc, const std::string& where = "mesh");
SimplicialComplex load_mesh_file(const std::string& path);
json mesh_to_json(const SimplicialComplex& c);

}  // namespace conelab
