#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "conelab/io.hpp"

namespace conelab {

namespace {

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file", path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), path + ":" + line_col(text, e.byte == 0 ? 0 : e.byte - 1));
  }
}

void write_json_file_atomic(const std::string& path, const json& doc) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << doc.dump(2) << '\n';
    if (!out.flush()) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error("cannot replace " + path + ": " + ec.message());
}

SimplicialComplex load_mesh(const json& doc, const std::string& where) {
  if (!doc.is_object()) throw ParseError("mesh document must be a JSON object", where);
  if (doc.contains("orientation")) {
    throw ParseError("user-supplied orientations are not accepted; orientation is sorted vertex order",
                     where + "/orientation");
  }
  if (!doc.contains("dim") || !doc["dim"].is_number_integer())
    throw ParseError("missing integer field 'dim'", where);
  if (!doc.contains("simplices") || !doc["simplices"].is_array())
    throw ParseError("missing array field 'simplices'", where);
  const int dim = doc["dim"].get<int>();

  std::vector<Simplex> top;
  const auto& S = doc["simplices"];
  top.reserve(S.size());
  for (std::size_t i = 0; i < S.size(); ++i) {
    const std::string loc = where + "/simplices/" + std::to_string(i);
    if (!S[i].is_array()) throw ParseError("simplex must be an array of vertex ids", loc);
    Simplex s;
    for (const auto& v : S[i]) {
      if (!v.is_number_integer()) throw ParseError("vertex id must be an integer", loc);
      s.push_back(v.get<int>());
    }
    top.push_back(std::move(s));
  }

  int nv = -1;
  Eigen::MatrixXd X;
  if (doc.contains("vertices")) {
    const auto& V = doc["vertices"];
    if (V.is_number_integer()) {
      nv = V.get<int>();
    } else if (V.is_array()) {
      nv = static_cast<int>(V.size());
      std::size_t D = nv > 0 && V[0].is_array() ? V[0].size() : 0;
      X.resize(nv, static_cast<Eigen::Index>(D));
      for (int r = 0; r < nv; ++r) {
        const std::string loc = where + "/vertices/" + std::to_string(r);
        if (!V[r].is_array() || V[r].size() != D) throw ParseError("coordinate rows must all have length " + std::to_string(D), loc);
        for (std::size_t c = 0; c < D; ++c) {
          if (!V[r][c].is_number()) throw ParseError("coordinate must be a number", loc);
          X(r, static_cast<Eigen::Index>(c)) = V[r][c].get<double>();
        }
      }
    } else {
      throw ParseError("'vertices' must be a coordinate list or a vertex count", where + "/vertices");
    }
  }
  return SimplicialComplex::from_top(dim, std::move(top), nv, std::move(X));
}

SimplicialComplex load_mesh_file(const std::string& path) { return load_mesh(read_json_file(path), path); }

json mesh_to_json(const SimplicialComplex& c) {
  json doc;
  doc["dim"] = c.dim();
  if (c.has_coordinates()) {
    json V = json::array();
    const auto& X = c.coordinates();
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index k = 0; k < X.cols(); ++k) row.push_back(X(r, k));
      V.push_back(std::move(row));
    }
    doc["vertices"] = std::move(V);
  } else {
    doc["vertices"] = c.vertex_count();
  }
  doc["simplices"] = c.simplices(c.dim());
  return doc;
}

}  // namespace conelab
