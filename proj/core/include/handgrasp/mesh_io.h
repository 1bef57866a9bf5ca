// Copyright 2026 The Handgrasp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HANDGRASP_MESH_IO_H_
#define HANDGRASP_MESH_IO_H_

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "handgrasp/mesh.h"

namespace handgrasp {

// Raw contents of a PLY file before mesh validation.
struct PlyData {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;  // polygons are fan-triangulated
  // Every non-coordinate scalar vertex property, by name.
  std::map<std::string, std::vector<double>> vertex_properties;
};

// Reads ASCII or binary little-endian PLY.
PlyData ReadPly(const std::filesystem::path& path);

// Loads an OBJ or PLY mesh (chosen by extension). Zero-area faces are
// dropped and counted in `stats`. Throws InputError on parse failure or when
// the mesh is empty after validation.
Mesh LoadMesh(const std::filesystem::path& path, MeshStats* stats = nullptr);

// Loads a PLY mesh together with a per-vertex scalar property. An empty
// `property` selects "quality". Throws InputError if the property is absent.
std::pair<Mesh, std::vector<double>> LoadPlyWithScalar(
    const std::filesystem::path& path, const std::string& property = "");

struct NamedMesh {
  std::string name;
  Mesh mesh;
};

// Writes one OBJ with an `o` group per mesh.
void WriteObj(std::ostream& out, const std::vector<NamedMesh>& meshes);
void WriteObj(const std::filesystem::path& path,
              const std::vector<NamedMesh>& meshes);

// Writes PLY (ASCII or binary little-endian), optionally with one float
// vertex property.
void WritePly(const std::filesystem::path& path, const Mesh& mesh, bool binary,
              const std::string& property_name = "",
              const std::vector<double>& property_values = {});

}  // namespace handgrasp

#endif  // HANDGRASP_MESH_IO_H_
