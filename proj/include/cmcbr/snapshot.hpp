#pragma once

// Versioned snapshot container.
//
// Layout:
//   line 1: "cmcbr-snapshot <version>"
//   line 2: one-line JSON header {"grid": {...}, "time": t, "fields": [{"name", "components"}...]}
//   then every component of every field, in header order, as raw
//   little-endian IEEE-754 doubles in grid index order (x fastest).

#include <iosfwd>
#include <string>
#include <vector>

#include "cmcbr/evolution.hpp"
#include "cmcbr/grid.hpp"

namespace cmcbr {

inline constexpr int kSnapshotVersion = 1;

struct NamedField {
  std::string name;
  std::vector<ScalarField> components;

  friend bool operator==(const NamedField&, const NamedField&) = default;
};

struct Snapshot {
  GridSpec grid;
  double time = 0.0;
  std::vector<NamedField> fields;

  const NamedField* find(const std::string& name) const;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

void write_snapshot(std::ostream& out, const Snapshot& snapshot);
/// Throws SnapshotFormat on a bad tag, version or truncated payload.
Snapshot read_snapshot(std::istream& in);

Snapshot to_snapshot(const SliceState& state);
SliceState state_from_snapshot(const Snapshot& snapshot);

}  // namespace cmcbr
