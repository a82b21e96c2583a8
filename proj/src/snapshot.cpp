#include "cmcbr/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cmcbr/error.hpp"

namespace cmcbr {

namespace {

constexpr const char* kTag = "cmcbr-snapshot";

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
}

void write_values(std::ostream& out, std::span<const double> values) {
  std::vector<char> buf(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(values[i]));
    std::memcpy(buf.data() + 8 * i, &bits, 8);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void read_values(std::istream& in, std::span<double> values) {
  std::vector<char> buf(values.size() * 8);
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size()))
    raise(ErrorKind::SnapshotFormat, "snapshot payload is truncated");
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, buf.data() + 8 * i, 8);
    values[i] = std::bit_cast<double>(to_little_endian(bits));
  }
}

}  // namespace

const NamedField* Snapshot::find(const std::string& name) const {
  const auto it = std::find_if(fields.begin(), fields.end(), [&](const NamedField& f) { return f.name == name; });
  return it == fields.end() ? nullptr : &*it;
}

void write_snapshot(std::ostream& out, const Snapshot& snapshot) {
  nlohmann::json header;
  header["grid"] = {{"n", snapshot.grid.n}, {"period", snapshot.grid.period}};
  header["time"] = snapshot.time;
  header["fields"] = nlohmann::json::array();
  for (const NamedField& f : snapshot.fields)
    header["fields"].push_back({{"name", f.name}, {"components", f.components.size()}});

  out << kTag << ' ' << kSnapshotVersion << '\n' << header.dump() << '\n';
  for (const NamedField& f : snapshot.fields) {
    for (const ScalarField& c : f.components) {
      if (!(c.grid() == snapshot.grid)) raise(ErrorKind::SnapshotFormat, "field " + f.name + " is on another grid");
      write_values(out, c.values());
    }
  }
  out.flush();
  if (!out) raise(ErrorKind::SinkError, "failed to write snapshot");
}

Snapshot read_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) raise(ErrorKind::SnapshotFormat, "empty snapshot");
  std::istringstream tag_line(line);
  std::string tag;
  int version = 0;
  tag_line >> tag >> version;
  if (tag != kTag) raise(ErrorKind::SnapshotFormat, "not a snapshot file (tag '" + tag + "')");
  if (version != kSnapshotVersion)
    raise(ErrorKind::SnapshotFormat, "unsupported snapshot version " + std::to_string(version));

  if (!std::getline(in, line)) raise(ErrorKind::SnapshotFormat, "missing snapshot header");
  Snapshot s;
  try {
    const nlohmann::json header = nlohmann::json::parse(line);
    s.grid.n = header.at("grid").at("n").get<std::array<int, 3>>();
    s.grid.period = header.at("grid").at("period").get<std::array<double, 3>>();
    s.time = header.at("time").get<double>();
    s.grid.validate();
    for (const auto& f : header.at("fields")) {
      NamedField nf{f.at("name").get<std::string>(), {}};
      const auto count = f.at("components").get<std::size_t>();
      for (std::size_t c = 0; c < count; ++c) nf.components.emplace_back(s.grid);
      s.fields.push_back(std::move(nf));
    }
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorKind::SnapshotFormat, std::string("bad snapshot header: ") + e.what());
  } catch (const Error& e) {
    raise(ErrorKind::SnapshotFormat, std::string("bad snapshot header: ") + e.what());
  }
  for (NamedField& f : s.fields)
    for (ScalarField& c : f.components) read_values(in, c.values());
  return s;
}

Snapshot to_snapshot(const SliceState& state) {
  Snapshot s{state.grid(), state.t, {}};
  s.fields.push_back({"g", {state.g.comp.begin(), state.g.comp.end()}});
  s.fields.push_back({"K", {state.k.comp.begin(), state.k.comp.end()}});
  s.fields.push_back({"N", {state.lapse}});
  return s;
}

SliceState state_from_snapshot(const Snapshot& snapshot) {
  auto need = [&](const std::string& name, std::size_t comps) -> const NamedField& {
    const NamedField* f = snapshot.find(name);
    if (!f || f->components.size() != comps)
      raise(ErrorKind::SnapshotFormat,
            "snapshot lacks field '" + name + "' with " + std::to_string(comps) + " components");
    return *f;
  };
  const NamedField& g = need("g", 6);
  const NamedField& k = need("K", 6);
  const NamedField& n = need("N", 1);
  SliceState state;
  state.t = snapshot.time;
  std::copy(g.components.begin(), g.components.end(), state.g.comp.begin());
  std::copy(k.components.begin(), k.components.end(), state.k.comp.begin());
  state.lapse = n.components[0];
  return state;
}

}  // namespace cmcbr
