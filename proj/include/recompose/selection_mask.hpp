// Copyright 2026 The Recompose Authors.
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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace recompose {

struct TriMesh;
struct BrushStroke;
class Transform3;

// Per-vertex keep/drop flags. Only the painting operations in
// segmentation.hpp mutate an existing mask.
class SelectionMask {
 public:
  SelectionMask() = default;
  explicit SelectionMask(std::size_t vertex_count, bool kept = true)
      : kept_(vertex_count, kept ? 1 : 0) {}

  std::size_t size() const { return kept_.size(); }
  bool kept(std::size_t vertex) const { return kept_[vertex] != 0; }
  std::span<const std::uint8_t> flags() const { return kept_; }
  std::size_t kept_count() const;
  bool all_kept() const { return kept_count() == size(); }
  bool none_kept() const { return kept_count() == 0; }

  friend bool operator==(const SelectionMask&, const SelectionMask&) = default;

 private:
  friend SelectionMask apply_stroke(const TriMesh&, const BrushStroke&, const Transform3&);
  friend SelectionMask set_all(const TriMesh&, bool);
  friend void clear(SelectionMask&);

  std::vector<std::uint8_t> kept_;
};

}  // namespace recompose
